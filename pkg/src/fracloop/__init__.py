"""Numerical verification engine for fractional loop-group structures.

Subpackages realize band-limited loops on finite Fourier-mode windows,
measure Schatten-class and spectral data of the induced operators, check
cocycle identities of the gauge action to machine precision, and build the
supersymmetric current algebra on finite fermionic Fock spaces.
"""

__version__ = "0.1.0"
