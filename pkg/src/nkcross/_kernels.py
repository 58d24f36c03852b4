"""Hot loops of the grid solver, in two interchangeable backends.

``numba`` versions are JIT-compiled loops; ``numpy`` versions are vectorized
equivalents that evaluate the same arithmetic in the same order, so both give
bit-for-bit comparable fields.  The numba path is used unless the environment
variable ``NKCROSS_NO_NUMBA`` is set to a non-empty value other than ``0``, or
numba cannot be imported.

Relaxation operates on a flat field ``u``.  Free nodes of one colour are listed
in ``idx``; ``nbr[t]`` holds the flat indices of the E, W, N, S neighbours of
``idx[t]``, ``coef[t]`` the normalized stencil weights (zero where the
neighbour is replaced by boundary data) and ``rhs[t]`` the constant part of the
stencil (boundary data and corner corrections).
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np


def _env_disabled() -> bool:
    flag = os.environ.get("NKCROSS_NO_NUMBA", "")
    return flag not in ("", "0")


# ---- numpy backend ----------------------------------------------------------

def _np_sor_color(u, idx, nbr, coef, rhs, omega):
    gs = (rhs + coef[:, 0] * u[nbr[:, 0]] + coef[:, 1] * u[nbr[:, 1]]
          + coef[:, 2] * u[nbr[:, 2]] + coef[:, 3] * u[nbr[:, 3]])
    cur = u[idx]
    u[idx] = cur + omega * (gs - cur)


def _np_max_residual(u, idx, nbr, coef, rhs):
    if idx.size == 0:
        return 0.0
    gs = (rhs + coef[:, 0] * u[nbr[:, 0]] + coef[:, 1] * u[nbr[:, 1]]
          + coef[:, 2] * u[nbr[:, 2]] + coef[:, 3] * u[nbr[:, 3]])
    return float(np.max(np.abs(gs - u[idx])))


def _np_bilinear(values, x0, y0, hx, hy, xs, ys):
    ny, nx = values.shape
    fx = (xs - x0) / hx
    fy = (ys - y0) / hy
    ix = np.clip(np.floor(fx).astype(np.int64), 0, nx - 2)
    iy = np.clip(np.floor(fy).astype(np.int64), 0, ny - 2)
    tx = fx - ix
    ty = fy - iy
    v00 = values[iy, ix]
    v01 = values[iy, ix + 1]
    v10 = values[iy + 1, ix]
    v11 = values[iy + 1, ix + 1]
    return (1 - ty) * ((1 - tx) * v00 + tx * v01) + ty * ((1 - tx) * v10 + tx * v11)


numpy_backend = SimpleNamespace(
    name="numpy",
    sor_color=_np_sor_color,
    max_residual=_np_max_residual,
    bilinear=_np_bilinear,
)


# ---- numba backend ------------------------------------------------------------

def _build_numba():
    import numba

    @numba.njit(cache=True)
    def sor_color(u, idx, nbr, coef, rhs, omega):
        for t in range(idx.shape[0]):
            i = idx[t]
            gs = (rhs[t] + coef[t, 0] * u[nbr[t, 0]] + coef[t, 1] * u[nbr[t, 1]]
                  + coef[t, 2] * u[nbr[t, 2]] + coef[t, 3] * u[nbr[t, 3]])
            cur = u[i]
            u[i] = cur + omega * (gs - cur)

    @numba.njit(cache=True)
    def max_residual(u, idx, nbr, coef, rhs):
        r = 0.0
        for t in range(idx.shape[0]):
            gs = (rhs[t] + coef[t, 0] * u[nbr[t, 0]] + coef[t, 1] * u[nbr[t, 1]]
                  + coef[t, 2] * u[nbr[t, 2]] + coef[t, 3] * u[nbr[t, 3]])
            d = abs(gs - u[idx[t]])
            if d > r:
                r = d
        return r

    @numba.njit(cache=True)
    def bilinear(values, x0, y0, hx, hy, xs, ys):
        ny, nx = values.shape
        out = np.empty(xs.shape[0])
        for k in range(xs.shape[0]):
            fx = (xs[k] - x0) / hx
            fy = (ys[k] - y0) / hy
            ix = min(max(int(np.floor(fx)), 0), nx - 2)
            iy = min(max(int(np.floor(fy)), 0), ny - 2)
            tx = fx - ix
            ty = fy - iy
            out[k] = ((1 - ty) * ((1 - tx) * values[iy, ix] + tx * values[iy, ix + 1])
                      + ty * ((1 - tx) * values[iy + 1, ix] + tx * values[iy + 1, ix + 1]))
        return out

    return SimpleNamespace(name="numba", sor_color=sor_color, max_residual=max_residual, bilinear=bilinear)


try:
    numba_backend = _build_numba()
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_backend = None


def get_backend(name: str | None = None):
    """Return the kernel namespace for ``name`` ('numba' or 'numpy'); default per env flag."""
    if name is None:
        name = "numpy" if (_env_disabled() or numba_backend is None) else "numba"
    if name == "numba":
        if numba_backend is None:
            raise RuntimeError("numba backend requested but numba is not importable")
        return numba_backend
    if name == "numpy":
        return numpy_backend
    raise ValueError(f"unknown kernel backend {name!r}")


BACKEND = get_backend().name
