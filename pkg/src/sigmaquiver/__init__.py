"""sigma-quiver varieties of type AIII and point-count checks of iquantum group relations."""

__version__ = "0.1.0"
