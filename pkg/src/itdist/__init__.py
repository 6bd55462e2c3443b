"""itdist: homological invariants of finite-dimensional quiver algebras over F_p."""

__version__ = "0.1.0"
