"""Vectorized interpolation kernels over a 2D raster.

All samplers take continuous indices ``(fr, fc)``: the cell (r, c) center sits
at integer ``(r, c)``. Rows run along y and columns along x.
"""

from typing import Tuple

import numpy as np

from ...models.enums import InterpolationMethod

KEYS_A = -0.5

# Tolerance when deciding whether a continuous index lies inside the footprint
_INDEX_TOL = 1e-9


def linear_weights(s: np.ndarray) -> np.ndarray:
    """Weights of the two stencil nodes {0, 1}."""
    return np.stack([1.0 - s, s], axis=-1)


def lagrange_weights(s: np.ndarray) -> np.ndarray:
    """Cubic Lagrange weights for the nodes {-1, 0, 1, 2}.

    Exact for polynomials up to degree three. The interpolant is only C0
    across cell boundaries; terrain gradients for refinement use
    ``keys_weights``.
    """
    return np.stack(
        [
            -s * (s - 1.0) * (s - 2.0) / 6.0,
            (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
            -(s + 1.0) * s * (s - 2.0) / 2.0,
            (s + 1.0) * s * (s - 1.0) / 6.0,
        ],
        axis=-1,
    )


def keys_weights(s: np.ndarray, a: float = KEYS_A) -> np.ndarray:
    """Cubic convolution weights for the nodes {-1, 0, 1, 2}.

    With a = -0.5 the interpolant is C1 and reproduces linear functions.
    """
    s2 = s * s
    s3 = s2 * s
    return np.stack(
        [
            a * (s3 - 2.0 * s2 + s),
            (a + 2.0) * s3 - (a + 3.0) * s2 + 1.0,
            -(a + 2.0) * s3 + (2.0 * a + 3.0) * s2 - a * s,
            a * (s2 - s3),
        ],
        axis=-1,
    )


def index_bounds(method: InterpolationMethod, n: int) -> Tuple[float, float]:
    """Closed range of continuous indices a method can serve along one axis."""
    if method == InterpolationMethod.NEAREST:
        return -0.5, n - 0.5
    if method == InterpolationMethod.LINEAR:
        return 0.0, n - 1.0
    return 1.0, n - 2.0


def inside(method: InterpolationMethod, f: np.ndarray, n: int) -> np.ndarray:
    """Mask of continuous indices inside the method's footprint."""
    lo, hi = index_bounds(method, n)
    if method == InterpolationMethod.NEAREST:
        return (f >= lo - _INDEX_TOL) & (f < hi)
    return (f >= lo - _INDEX_TOL) & (f <= hi + _INDEX_TOL)


def sample(
    data: np.ndarray,
    fr: np.ndarray,
    fc: np.ndarray,
    method: InterpolationMethod,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Interpolate ``data`` at continuous indices.

    Returns:
        (values, valid, missing): values are NaN wherever ``valid`` is False
        or the stencil holds a missing cell; ``missing`` flags the latter.
    """
    rows, cols = data.shape
    fr = np.asarray(fr, dtype=float)
    fc = np.asarray(fc, dtype=float)
    valid = inside(method, fr, rows) & inside(method, fc, cols)

    values = np.full(fr.shape, np.nan)
    missing = np.zeros(fr.shape, dtype=bool)
    if not valid.any():
        return values, valid, missing

    r = fr[valid]
    c = fc[valid]
    nearest = data[
        np.clip(np.floor(r + 0.5).astype(np.intp), 0, rows - 1),
        np.clip(np.floor(c + 0.5).astype(np.intp), 0, cols - 1),
    ]

    if method == InterpolationMethod.NEAREST:
        result = nearest
        stencil_missing = np.isnan(result)
    else:
        if method == InterpolationMethod.LINEAR:
            lo_r, hi_r, lo_c, hi_c, size = 0, rows - 2, 0, cols - 2, 2
        else:
            lo_r, hi_r, lo_c, hi_c, size = 1, rows - 3, 1, cols - 3, 4
        r = np.clip(r, lo_r, hi_r + 1)
        c = np.clip(c, lo_c, hi_c + 1)
        r0 = np.clip(np.floor(r).astype(np.intp), lo_r, hi_r)
        c0 = np.clip(np.floor(c).astype(np.intp), lo_c, hi_c)
        sr = r - r0
        sc = c - c0

        if size == 2:
            wr, wc = linear_weights(sr), linear_weights(sc)
            offsets = np.arange(2)
        else:
            kernel = lagrange_weights if method == InterpolationMethod.BICUBIC else keys_weights
            wr, wc = kernel(sr), kernel(sc)
            offsets = np.arange(-1, 3)

        row_idx = r0[:, None] + offsets[None, :]
        col_idx = c0[:, None] + offsets[None, :]
        stencil = data[row_idx[:, :, None], col_idx[:, None, :]]

        stencil_missing = np.isnan(stencil).any(axis=(1, 2))
        stencil_infinite = np.isinf(stencil).any(axis=(1, 2)) & ~stencil_missing
        with np.errstate(invalid="ignore"):
            result = np.einsum("ni,nij,nj->n", wr, stencil, wc)
        result = np.where(stencil_infinite, nearest, result)
        result = np.where(stencil_missing, np.nan, result)

    values[valid] = result
    missing[valid] = stencil_missing
    return values, valid, missing
