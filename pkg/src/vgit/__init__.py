"""Exact toolkit for variation of GIT quotients of torus actions on projective space."""

__version__ = "0.1.0"
