"""Spectral analysis of Schrodinger operators with complex potentials on S^2.

Subpackages cover: exact polynomial algebra with the rotation Poisson
bracket (polysphere), spherical harmonics and operator matrices (sphharm),
truncated Hamiltonians, eigenvalue clusters and projectors (operator), the
great-circle average transform and its bracket locus (radon), pseudospectra
and quasimodes (pseudospec), numerical ranges (numrange), and a
configuration-driven CLI (cli).
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
