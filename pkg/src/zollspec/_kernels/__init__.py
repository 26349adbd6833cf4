"""Kernel backends: compiled Cython core with a numpy fallback.

Import-time selection: the extension module is used when present, the
numpy implementation otherwise.  ``BACKEND`` names the active one.
"""

from . import _fallback

try:
    from . import _core as _active
    BACKEND = "cython"
except ImportError:
    _active = _fallback
    BACKEND = "python"

legendre_table = _active.legendre_table
triangular_sigma_min = _active.triangular_sigma_min
lcg_vector = _active.lcg_vector


def get_backend(name):
    """Return the kernel module for 'cython' or 'python', or None if absent."""
    if name == "python":
        return _fallback
    if name == "cython" and BACKEND == "cython":
        return _active
    return None
