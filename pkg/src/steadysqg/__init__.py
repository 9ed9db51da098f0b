"""Stationary homogeneous solutions of SQG and the generalized De Gregorio model."""

__version__ = "0.1.0"
