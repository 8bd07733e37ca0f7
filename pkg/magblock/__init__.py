"""Magnon and photon blockade in a squeezed, Kerr-nonlinear cavity magnomechanical system."""

__version__ = "0.1.0"
