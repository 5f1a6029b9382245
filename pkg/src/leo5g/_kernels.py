"""Array kernels for pass sampling and residual-Doppler grids.

Each kernel has a numba ``@njit`` loop implementation and a pure-numpy
implementation with the same signature. The numba path is used when numba
imports and ``LEO5G_NUMBA`` is not set to ``0``; set ``LEO5G_NUMBA=0`` to
force the numpy path. Angles here are radians, lengths km.
"""

from __future__ import annotations

import os

import numpy as np


def _numpy_slant_range(gamma, re, r):
    s = np.sin(0.5 * gamma)
    return np.sqrt((r - re) ** 2 + 4.0 * re * r * s * s)


def _numpy_doppler(gamma, re, r, scale):
    # scale = f_c / c * v_sat * R_e, so the result is in Hz
    return scale * np.sin(gamma) / _numpy_slant_range(gamma, re, r)


def numpy_slant_range_series(gamma, re, r):
    return _numpy_slant_range(np.asarray(gamma, dtype=np.float64), re, r)


def numpy_doppler_series(gamma, re, r, scale):
    return _numpy_doppler(np.asarray(gamma, dtype=np.float64), re, r, scale)


def numpy_residual_grid(gamma_true, offsets, re, r, scale):
    g = np.asarray(gamma_true, dtype=np.float64)[:, None]
    ge = g + np.asarray(offsets, dtype=np.float64)[None, :]
    # carrier scale applied after the difference keeps UL/DL ratios exact
    return scale * (_numpy_doppler(g, re, r, 1.0) - _numpy_doppler(ge, re, r, 1.0))


try:
    import numba

    @numba.njit(cache=False)
    def _nb_range(g, re, r):
        s = np.sin(0.5 * g)
        return np.sqrt((r - re) ** 2 + 4.0 * re * r * s * s)

    @numba.njit(cache=False)
    def numba_slant_range_series(gamma, re, r):
        out = np.empty(gamma.shape[0])
        for i in range(gamma.shape[0]):
            out[i] = _nb_range(gamma[i], re, r)
        return out

    @numba.njit(cache=False)
    def numba_doppler_series(gamma, re, r, scale):
        out = np.empty(gamma.shape[0])
        for i in range(gamma.shape[0]):
            g = gamma[i]
            out[i] = scale * np.sin(g) / _nb_range(g, re, r)
        return out

    @numba.njit(cache=False)
    def numba_residual_grid(gamma_true, offsets, re, r, scale):
        n, m = gamma_true.shape[0], offsets.shape[0]
        out = np.empty((n, m))
        for i in range(n):
            g = gamma_true[i]
            f_true = np.sin(g) / _nb_range(g, re, r)
            for j in range(m):
                ge = g + offsets[j]
                out[i, j] = scale * (f_true - np.sin(ge) / _nb_range(ge, re, r))
        return out

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    HAVE_NUMBA = False


USE_NUMBA = HAVE_NUMBA and os.environ.get("LEO5G_NUMBA", "1") != "0"
BACKEND = "numba" if USE_NUMBA else "numpy"


def slant_range_series(gamma, re, r):
    gamma = np.ascontiguousarray(gamma, dtype=np.float64)
    if USE_NUMBA:
        return numba_slant_range_series(gamma, re, r)
    return numpy_slant_range_series(gamma, re, r)


def doppler_series(gamma, re, r, scale):
    gamma = np.ascontiguousarray(gamma, dtype=np.float64)
    if USE_NUMBA:
        return numba_doppler_series(gamma, re, r, scale)
    return numpy_doppler_series(gamma, re, r, scale)


def residual_grid(gamma_true, offsets, re, r, scale):
    """Signed residual Doppler (Hz) for every (true angle, offset) pair."""
    gamma_true = np.ascontiguousarray(gamma_true, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.float64)
    if USE_NUMBA:
        return numba_residual_grid(gamma_true, offsets, re, r, scale)
    return numpy_residual_grid(gamma_true, offsets, re, r, scale)
