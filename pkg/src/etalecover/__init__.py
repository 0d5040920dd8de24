"""Exact construction and certification of finite covers of projective space
that are etale away from the hyperplane at infinity, for plane curves and
hypersurfaces over prime finite fields."""

__version__ = "0.1.0"
