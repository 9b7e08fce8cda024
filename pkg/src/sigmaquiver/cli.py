"""Command-line driver: enumerate, verify, chi, dump-kan, dump-paths."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .dynkin import build_dynkin
from .fields import is_prime, prime_power

log = logging.getLogger("sigmaquiver")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    d: int = 2
    w: tuple[int, ...] = (0, 2, 0)
    mode: str = "sigma"
    primes: tuple[int, ...] = (2, 3)
    v_min: tuple[int, ...] | None = None
    v_max: tuple[int, ...] | None = None
    relations: tuple[str, ...] = ("weight", "B_EF", "serre1", "serre2", "iserre", "nakajima")
    families: tuple[str, ...] = ()
    seed: int = 0
    jobs: int = 1
    out: str | None = None
    format: str = "json"

    def validate(self) -> None:
        dyn_rank = 2 * self.d - 1
        if self.d < 1:
            raise ConfigError("d must be >= 1")
        if len(self.w) != dyn_rank or any(x < 0 for x in self.w):
            raise ConfigError(f"w must have {dyn_rank} nonnegative entries")
        if self.mode not in ("sigma", "nakajima"):
            raise ConfigError("mode must be sigma or nakajima")
        if self.mode == "sigma":
            if any(x % 2 for x in self.w):
                raise ConfigError("in sigma mode every w_i must be even")
        for v in (self.v_min, self.v_max):
            if v is not None and len(v) != dyn_rank:
                raise ConfigError(f"v bounds must have {dyn_rank} entries")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not self.primes:
            raise ConfigError("need at least one field size")

    def digest(self) -> str:
        """Hash of the settings that affect results (not output path or worker count)."""
        data = asdict(self)
        for k in ("out", "format", "jobs"):
            data.pop(k)
        return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()[:16]


_VEC = re.compile(r"^\[\s*(-?\d+(\s*,\s*-?\d+)*)?\s*\]$")


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if _VEC.match(raw):
        inner = raw[1:-1].strip()
        return tuple(int(x) for x in inner.split(",")) if inner else ()
    if re.fullmatch(r"-?\d+", raw):
        return int(raw)
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        return raw[1:-1]
    return raw


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key):
            raise ConfigError(f"line {lineno}: bad key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = _parse_value(key, raw)
    return out


def _split_list(x) -> tuple[str, ...]:
    if isinstance(x, tuple):
        return tuple(str(v) for v in x)
    parts = re.split(r",(?![^()]*\))", str(x))
    return tuple(p.strip() for p in parts if p.strip())


def _int_list(x, name: str) -> tuple[int, ...]:
    if isinstance(x, int):
        return (x,)
    if isinstance(x, tuple):
        return x
    try:
        return tuple(int(p) for p in _split_list(x))
    except ValueError as e:
        raise ConfigError(f"{name} must be a list of integers") from e


def build_config(raw: dict) -> RunConfig:
    known = {f for f in RunConfig.__dataclass_fields__} | {"q"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kw = {}
    for k, v in raw.items():
        if k in ("w", "v_min", "v_max"):
            kw[k] = _int_list(v, k)
        elif k in ("primes", "q"):
            kw["primes"] = _int_list(v, k)
        elif k in ("relations", "families"):
            kw[k] = _split_list(v)
        elif k in ("d", "seed", "jobs"):
            if not isinstance(v, int):
                raise ConfigError(f"{k} must be an integer")
            kw[k] = v
        else:
            kw[k] = str(v)
    cfg = RunConfig(**kw)
    cfg.validate()
    return cfg


def load_config(args) -> RunConfig:
    raw = {}
    if args.config:
        try:
            raw = parse_config_text(Path(args.config).read_text())
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from e
    if args.q:
        raw["primes"] = _int_list(args.q, "--q")
        raw.pop("q", None)
    if args.relations:
        raw["relations"] = _split_list(args.relations)
    for key in ("out", "format", "jobs", "seed"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = val
    return build_config(raw)


def _header(cfg: RunConfig, command: str, used: list[int], bad: list[int]) -> dict:
    return {
        "tool": "sigmaquiver",
        "version": __version__,
        "command": command,
        "config_hash": cfg.digest(),
        "config": {
            "d": cfg.d,
            "w": list(cfg.w),
            "mode": cfg.mode,
            "seed": cfg.seed,
            "v_min": None if cfg.v_min is None else list(cfg.v_min),
            "v_max": None if cfg.v_max is None else list(cfg.v_max),
        },
        "primes": used,
        "bad_primes": bad,
    }


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _field_sizes(cfg: RunConfig, prime_only: bool) -> tuple[list[int], list[int]]:
    good, bad = [], []
    for q in cfg.primes:
        try:
            prime_power(q)
            ok = is_prime(q) if prime_only else True
        except ValueError:
            ok = False
        (good if ok else bad).append(q)
    return good, bad


# ---------------------------------------------------------------- commands


def _in_range(cfg: RunConfig, v) -> bool:
    lo = cfg.v_min or (0,) * len(v)
    hi = cfg.v_max or v
    return all(a <= x <= b for a, x, b in zip(lo, v, hi))


def _stratum_job(args):
    d, w, sigma, q, v = args
    from .grassmann import enumerate_L, enumerate_R
    from .verify import cached_instance

    rep, form = cached_instance(d, w, sigma).over(q)
    st = enumerate_R(rep, form, v) if sigma else enumerate_L(rep, v)
    return st.count


def cmd_enumerate(cfg: RunConfig) -> int:
    from .grassmann import dimension_vectors
    from .verify import cached_instance

    sigma = cfg.mode == "sigma"
    qs, bad = _field_sizes(cfg, prime_only=False)
    inst = cached_instance(cfg.d, tuple(cfg.w), sigma)
    tables = {}
    for q in qs:
        rep, _ = inst.over(q)
        vs = [v for v in dimension_vectors(rep, "R" if sigma else "L") if _in_range(cfg, v)]
        jobs = [(cfg.d, tuple(cfg.w), sigma, q, v) for v in vs]
        counts = _pmap(_stratum_job, jobs, cfg.jobs)
        tables[q] = list(zip(vs, counts))
    if cfg.format == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["q", "v", "count"])
        for q in qs:
            for v, c in tables[q]:
                wr.writerow([q, " ".join(map(str, v)), c])
        _emit(buf.getvalue(), cfg)
    else:
        out = _header(cfg, "enumerate", qs, bad)
        out["kind"] = "R" if sigma else "L"
        out["strata"] = {str(q): [{"v": list(v), "count": c} for v, c in tables[q]] for q in qs}
        out["totals"] = {str(q): sum(c for _, c in tables[q]) for q in qs}
        _emit(_dump(out), cfg)
    return EXIT_OK


def _pmap(fn, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _verify_job(inst):
    from .verify import run_instance

    return run_instance(inst).to_json()


def _lemma_job(args):
    from .verify import lemma_suite

    d, w, qs, seed = args
    return [r.to_json() for r in lemma_suite(d, w, qs, seed)]


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import VERIFIERS, instances_for

    qs, bad = _field_sizes(cfg, prime_only=True)
    if not qs:
        raise ConfigError("verification needs at least one prime field size")
    rels = list(cfg.relations)
    unknown = [r for r in rels if r not in VERIFIERS and r != "lemmas"]
    if unknown:
        raise ConfigError(f"unknown relations: {', '.join(unknown)}")
    sigma_rels = [r for r in rels if r not in ("nakajima", "lemmas")]
    if cfg.mode == "nakajima" and sigma_rels:
        raise ConfigError(f"relations {', '.join(sigma_rels)} need mode = sigma")
    insts = instances_for(cfg.d, cfg.w, [r for r in rels if r != "lemmas"], qs)
    reports = _pmap(_verify_job, insts, cfg.jobs)
    if "lemmas" in rels:
        reports += _lemma_job((cfg.d, tuple(cfg.w), tuple(qs), cfg.seed))
    ok = all(r["status"] == "pass" for r in reports)
    out = _header(cfg, "verify", qs, bad)
    out["reports"] = reports
    out["summary"] = {
        "status": "pass" if ok else "fail",
        "instances": len(reports),
        "failed": sum(r["status"] != "pass" for r in reports),
        "checked": sum(r["checked"] for r in reports),
    }
    _emit(_dump(out), cfg)
    return EXIT_OK if ok else EXIT_FAIL


_FAMILY = re.compile(r"^(projective|grassmannian|lagrangian|sla1)\(\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)$")


def parse_family(spec: str):
    from .chi import FiberFamily, sla1_family
    from .linalg import standard_symplectic

    m = _FAMILY.match(spec.strip())
    if not m:
        raise ConfigError(f"bad family spec {spec!r}; use projective(n), grassmannian(n,k), lagrangian(n) or sla1(n)")
    kind, a, b = m.group(1), int(m.group(2)), m.group(3)
    if kind == "projective":
        return FiberFamily(spec, a + 1, 1)
    if kind == "grassmannian":
        if b is None or int(b) > a:
            raise ConfigError(f"grassmannian needs (n, k) with k <= n: {spec!r}")
        return FiberFamily(spec, a, int(b))
    if a < 1:
        raise ConfigError(f"{kind} needs n >= 1")
    if kind == "lagrangian":
        return FiberFamily(spec, 2 * a, a, gram=standard_symplectic(2 * a))
    return sla1_family(a, spec)


def cmd_chi(cfg: RunConfig) -> int:
    from .chi import BadPrimeError, PolynomialityError, chi_family, degree_bound, sample_fields

    if not cfg.families:
        raise ConfigError("chi needs a families = ... entry")
    fams = [parse_family(s) for s in cfg.families]
    qs, bad = _field_sizes(cfg, prime_only=True)
    results, ok = [], True
    for spec, fam in zip(cfg.families, fams):
        entry = {"family": spec}
        try:
            poly = chi_family(fam, primes=tuple(qs))
            entry.update(poly.to_json())
            entry["degree_bound"] = degree_bound(fam)
            entry["bad_primes"] = sample_fields(fam, len(poly.sampled), tuple(qs))[1]
            entry["status"] = "pass"
        except (PolynomialityError, BadPrimeError) as e:
            entry["status"] = "fail"
            entry["error"] = str(e)
            ok = False
        results.append(entry)
    out = _header(cfg, "chi", qs, bad)
    out["families"] = results
    _emit(_dump(out), cfg)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_dump_kan(cfg: RunConfig) -> int:
    from .kan import dump_kan_json
    from .verify import cached_instance

    _emit(dump_kan_json(cached_instance(cfg.d, tuple(cfg.w), cfg.mode == "sigma")) + "\n", cfg)
    return EXIT_OK


def cmd_dump_paths(cfg: RunConfig) -> int:
    from .paths import build_hom_table, build_pairing, dump_paths_json

    table = build_hom_table(build_dynkin(cfg.d))
    _emit(dump_paths_json(table, build_pairing(table)) + "\n", cfg)
    return EXIT_OK


COMMANDS = {
    "enumerate": cmd_enumerate,
    "verify": cmd_verify,
    "chi": cmd_chi,
    "dump-kan": cmd_dump_kan,
    "dump-paths": cmd_dump_paths,
}


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sigmaquiver", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH")
        p.add_argument("--q", metavar="LIST", help='field sizes, e.g. "2,3,5"')
        p.add_argument("--relations", metavar="LIST")
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--jobs", type=int, metavar="N")
        p.add_argument("--seed", type=int, metavar="N")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
