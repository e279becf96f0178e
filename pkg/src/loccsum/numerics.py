"""Dense complex linear algebra for desk-scale quantum systems.

The SVD is a one-sided (Hestenes) Jacobi iteration with a fixed row-cyclic
pivot order. Its inner sweep is provided by a compiled extension
(``loccsum._jacobi``) when available, otherwise by a numpy implementation with
the same arithmetic; set ``LOCCSUM_PURE_PYTHON=1`` to force the fallback.
"""
import os
from typing import NamedTuple

import numpy as np

from . import _jacobi_py
from .errors import InvalidInput, InvalidMatrix, NotPositive, ShapeMismatch

try:
    if os.environ.get("LOCCSUM_PURE_PYTHON"):
        raise ImportError("pure python kernel requested")
    from . import _jacobi as _jacobi_ext
except ImportError:
    _jacobi_ext = None

KERNELS = {"python": _jacobi_py.jacobi_sweeps}
if _jacobi_ext is not None:
    KERNELS["compiled"] = _jacobi_ext.jacobi_sweeps
KERNEL = "compiled" if "compiled" in KERNELS else "python"

DEFAULT_EPS = 1e-8
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 60


class SvdResult(NamedTuple):
    """``m == left @ diag(singular_values) @ right.conj().T``."""

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray


class PolarResult(NamedTuple):
    """``m == unitary @ positive``."""

    unitary: np.ndarray
    positive: np.ndarray


def as_matrix(m):
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.size == 0:
        raise InvalidMatrix(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix has non-finite entries")
    return a


def _complete_columns(q, bad):
    """Replace the columns of ``q`` flagged in ``bad`` by an orthonormal completion.

    Candidates are computational basis vectors, taken in the order that leaves
    the largest residual, so the result is deterministic.
    """
    rows = q.shape[0]
    good = [k for k in range(q.shape[1]) if not bad[k]]
    basis = q[:, good]
    for k in np.flatnonzero(bad):
        cand = np.eye(rows, dtype=complex)
        for _ in range(2):
            cand = cand - basis @ (basis.conj().T @ cand)
        norms = np.linalg.norm(cand, axis=0)
        pick = int(np.argmax(norms))
        col = cand[:, pick] / norms[pick]
        q[:, k] = col
        basis = np.column_stack([basis, col])
    return q


def _jacobi_tall(a, kernel):
    rows, cols = a.shape
    at = np.array(a.T, dtype=complex, order="C")  # always a private, writable copy
    vt = np.eye(cols, dtype=complex)
    KERNELS[kernel](at, vt, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    s = np.linalg.norm(at, axis=1)
    order = np.argsort(-s, kind="stable")
    s = s[order]
    u = at[order].T.copy()
    v = vt[order].T.copy()
    smax = s[0] if s.size else 0.0
    bad = s <= max(rows, cols) * np.finfo(float).eps * smax
    if smax == 0.0:
        bad[:] = True
    nz = ~bad
    u[:, nz] /= s[nz]
    u = _complete_columns(u, bad)
    return SvdResult(u, s, v)


def svd(m, kernel=None):
    """Thin singular value decomposition by one-sided Jacobi rotations.

    Parameters
    ----------
    m : array_like
        Complex matrix of shape ``(rows, cols)``.
    kernel : {"compiled", "python"}, optional
        Sweep implementation; defaults to the compiled one when built.

    Returns
    -------
    SvdResult
        ``left`` is ``rows x k``, ``right`` is ``cols x k`` with ``k = min(rows, cols)``,
        both with orthonormal columns; singular values are descending.
    """
    a = as_matrix(m)
    kernel = kernel or KERNEL
    if a.shape[0] >= a.shape[1]:
        return _jacobi_tall(a, kernel)
    r = _jacobi_tall(a.conj().T, kernel)
    return SvdResult(r.right, r.singular_values, r.left)


def polar_decompose(m, kernel=None):
    """Right polar decomposition ``m = U P`` with ``P = sqrt(m^dagger m)``.

    For singular ``m`` the unitary factor is the SVD completion ``W V^dagger``.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"polar decomposition needs a square matrix, got {a.shape}")
    w, s, v = svd(a, kernel)
    unitary = w @ v.conj().T
    positive = (v * s) @ v.conj().T
    positive = 0.5 * (positive + positive.conj().T)
    return PolarResult(unitary, positive)


def spectral_decompose_positive(p, eps=DEFAULT_EPS, atol=1e-8):
    """Eigen-pairs of a positive semidefinite matrix above a relative cutoff.

    Returns
    -------
    list of (float, ndarray)
        ``(coefficient, unit vector)`` pairs in descending coefficient order,
        keeping only coefficients larger than ``eps`` times the largest one.
    """
    a = as_matrix(p)
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got {a.shape}")
    scale = max(1.0, np.linalg.norm(a))
    if np.linalg.norm(a - a.conj().T) > atol * scale:
        raise NotPositive("matrix is not Hermitian")
    w, vecs = np.linalg.eigh(0.5 * (a + a.conj().T))
    if w[0] < -atol * scale:
        raise NotPositive(f"matrix has negative eigenvalue {w[0]:.3g}")
    top = w[-1]
    if top <= 0:
        return []
    return [(float(w[k]), vecs[:, k]) for k in range(len(w) - 1, -1, -1) if w[k] > eps * top]


def rank_with_tolerance(m, eps=DEFAULT_EPS, kernel=None):
    """Number of singular values above ``eps`` times the largest."""
    s = svd(m, kernel).singular_values
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > eps * s[0]))


def kron(vectors):
    """Tensor product of vectors, last factor's index varying fastest."""
    vectors = list(vectors)
    if not vectors:
        raise InvalidInput("kron needs at least one vector")
    out = np.ones(1, dtype=complex)
    for v in vectors:
        v = np.asarray(v, dtype=complex).ravel()
        if v.size == 0:
            raise InvalidInput("kron factors must be non-empty")
        out = np.kron(out, v)
    return out


def independent_count(vectors, eps=DEFAULT_EPS):
    """Number of linearly independent vectors (numerical rank of their span)."""
    vectors = [np.asarray(v, dtype=complex).ravel() for v in vectors]
    if not vectors:
        return 0
    n = vectors[0].size
    if any(v.size != n for v in vectors):
        raise ShapeMismatch("vectors have different lengths")
    return rank_with_tolerance(np.column_stack(vectors), eps)


def random_unitary(dim, rng):
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
