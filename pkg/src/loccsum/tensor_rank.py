"""Bounds on tensor rank (least number of product terms) of multipartite pure states.

Lower bounds come from flattening ranks, upgraded to the exact value for three
qubits via the Cayley hyperdeterminant. Upper bounds come from explicit
witnesses: Schmidt terms for two parties, seeded alternating least squares
(ALS) otherwise, and a computational-slice expansion as the fallback.
"""
from dataclasses import dataclass
from itertools import combinations, product
from typing import NamedTuple

import numpy as np

from .errors import NotMultipartite, ShapeMismatch
from .numerics import DEFAULT_EPS, kron
from .schmidt import schmidt_decompose

HYPERDET_TOL = 1e-10
LOWER_METHODS = ("flattening", "exact_222")
UPPER_METHODS = ("witness_decomposition", "exact_222", "trivial_dim")


class ProductTerm(NamedTuple):
    weight: complex
    factors: tuple  # one unit vector per party


@dataclass(frozen=True)
class RankConfig:
    eps: float = DEFAULT_EPS
    restarts: int = 64
    iters: int = 500
    tol: float = 1e-8
    seed: int = 0
    hyperdet_tol: float = HYPERDET_TOL


@dataclass(frozen=True, eq=False)
class RankCertificate:
    lower_bound: int
    upper_bound: int
    lower_method: str
    upper_method: str
    witness: tuple = None

    def __post_init__(self):
        if not 1 <= self.lower_bound <= self.upper_bound:
            raise ValueError(f"inconsistent rank bounds [{self.lower_bound}, {self.upper_bound}]")
        if self.lower_method not in LOWER_METHODS or self.upper_method not in UPPER_METHODS:
            raise ValueError(f"unknown method {self.lower_method!r}/{self.upper_method!r}")
        if self.witness is not None and len(self.witness) != self.upper_bound:
            raise ValueError("witness length differs from the upper bound")

    @property
    def exact(self):
        return self.lower_bound == self.upper_bound

    def to_dict(self):
        return {
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "lower_method": self.lower_method,
            "upper_method": self.upper_method,
            "witness_terms": None if self.witness is None else len(self.witness),
        }


def reconstruct(witness):
    return np.sum([t.weight * kron(t.factors) for t in witness], axis=0)


def witness_residual(state, witness):
    return float(np.linalg.norm(state.amplitudes - reconstruct(witness)))


def _require_multipartite(state):
    if state.shape.n_parties < 2:
        raise NotMultipartite("tensor rank bounds need at least two parties")


def bipartitions(n_parties):
    """All two-group cuts with party 0 on the left, each listed once."""
    rest = range(1, n_parties)
    cuts = []
    for size in range(0, n_parties - 1):
        for extra in combinations(rest, size):
            cuts.append((0,) + extra)
    return cuts


def flattening_ranks(state, eps=DEFAULT_EPS):
    _require_multipartite(state)
    return {cut: schmidt_decompose(state, cut, eps).schmidt_number for cut in bipartitions(state.shape.n_parties)}


def flattening_lower_bound(state, eps=DEFAULT_EPS):
    """Largest Schmidt number over all bipartitions; tensor rank is at least this."""
    return max(flattening_ranks(state, eps).values())


def hyperdeterminant(state):
    """Cayley hyperdeterminant of a three-qubit amplitude tensor."""
    a = state.tensor() if hasattr(state, "tensor") else np.asarray(state, dtype=complex)
    if a.size != 8 or a.ndim not in (1, 3):
        raise ShapeMismatch(f"hyperdeterminant needs a 2x2x2 tensor, got shape {a.shape}")
    a = a.reshape(2, 2, 2)
    a000, a001, a010, a011 = a[0, 0, 0], a[0, 0, 1], a[0, 1, 0], a[0, 1, 1]
    a100, a101, a110, a111 = a[1, 0, 0], a[1, 0, 1], a[1, 1, 0], a[1, 1, 1]
    return complex(
        a000**2 * a111**2 + a001**2 * a110**2 + a010**2 * a101**2 + a100**2 * a011**2
        - 2 * (a000 * a001 * a110 * a111 + a000 * a010 * a101 * a111
               + a000 * a100 * a011 * a111 + a001 * a010 * a101 * a110
               + a001 * a100 * a011 * a110 + a010 * a100 * a011 * a101)
        + 4 * (a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111)
    )


def exact_rank_2x2x2(state, eps=DEFAULT_EPS, hyperdet_tol=HYPERDET_TOL):
    """Tensor rank of a three-qubit state: 1 (product), 2 (GHZ class or biseparable) or 3 (W class)."""
    if state.shape.party_dims != (2, 2, 2):
        raise ShapeMismatch(f"exact rank is only decided for 2⊗2⊗2, got {state.shape}")
    ranks = [schmidt_decompose(state, (p,), eps).schmidt_number for p in range(3)]
    if all(r == 1 for r in ranks):
        return 1
    if abs(hyperdeterminant(state)) > hyperdet_tol:
        return 2
    if min(ranks) == 1:
        return 2
    return 3


def slice_witness(state, eps=DEFAULT_EPS):
    """Expansion over computational basis states of every party but the largest.

    Always exact; its length is at most ``total_dim / max(party_dims)``.
    """
    dims = state.shape.party_dims
    big = int(np.argmax(dims))
    t = np.moveaxis(state.tensor(), big, -1)
    others = [d for i, d in enumerate(dims) if i != big]
    norms = np.linalg.norm(t, axis=-1)
    cutoff = eps * norms.max()
    terms = []
    for idx in product(*[range(d) for d in others]):
        vec = t[idx]
        nrm = norms[idx]
        if nrm <= cutoff:
            continue
        factors = [np.eye(d, dtype=complex)[i] for d, i in zip(others, idx)]
        factors.insert(big, vec / nrm)
        terms.append(ProductTerm(complex(nrm), tuple(factors)))
    return tuple(terms)


def _unfold(t, mode):
    return np.moveaxis(t, mode, 0).reshape(t.shape[mode], -1)


def _khatri_rao(mats):
    out = mats[0]
    for m in mats[1:]:
        out = (out[:, None, :] * m[None, :, :]).reshape(-1, out.shape[1])
    return out


def _seed_sequence(seed, *keys):
    return np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *keys])


def _als_restart(t, rank, iters, tol, rng):
    dims = t.shape
    factors = []
    for d in dims:
        f = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
        factors.append(f / np.linalg.norm(f, axis=0))
    unfolded = [_unfold(t, p) for p in range(len(dims))]
    weights = np.ones(rank, dtype=complex)
    residual = np.inf
    for _ in range(iters):
        for p in range(len(dims)):
            kr = _khatri_rao([factors[q] for q in range(len(dims)) if q != p])
            sol, *_ = np.linalg.lstsq(kr, unfolded[p].T, rcond=None)
            fp = sol.T
            norms = np.linalg.norm(fp, axis=0)
            dead = norms == 0
            if dead.any():
                fp[:, dead] = rng.standard_normal((dims[p], int(dead.sum())))
                norms[dead] = np.linalg.norm(fp[:, dead], axis=0)
            factors[p] = fp / norms
            weights = np.where(dead, 0, norms).astype(complex)
        residual = float(np.linalg.norm(unfolded[-1] - (factors[-1] * weights) @ kr.T))
        if not np.isfinite(residual):
            break
        if residual <= tol:
            break
    return residual, weights, factors


def als_upper_bound(state, target_rank, restarts=64, iters=500, tol=1e-8, seed=0, return_best=False):
    """Search for a ``target_rank``-term product decomposition by ALS.

    Each restart draws its initial factors from its own seed derived from
    ``(seed, target_rank, restart)``; the first restart (lowest index) whose
    residual reaches ``tol`` wins. Returns ``None`` if none does, which says
    nothing about whether such a decomposition exists. With
    ``return_best=True`` a ``(witness_or_None, best_residual)`` pair is
    returned instead.
    """
    _require_multipartite(state)
    if target_rank < 1:
        raise ValueError("target_rank must be >= 1")
    t = state.tensor()
    best = np.inf
    found = None
    for restart in range(restarts):
        rng = np.random.default_rng(_seed_sequence(seed, target_rank, restart))
        residual, weights, factors = _als_restart(t, target_rank, iters, tol, rng)
        if np.isfinite(residual):
            best = min(best, residual)
        if residual <= tol:
            found = tuple(
                ProductTerm(complex(weights[k]), tuple(f[:, k].copy() for f in factors))
                for k in range(target_rank)
            )
            break
    if found is None and target_rank >= len(slice_witness(state)):
        found = slice_witness(state)
        best = witness_residual(state, found)
    return (found, best) if return_best else found


def _schmidt_witness(sd):
    return tuple(
        ProductTerm(complex(c), (sd.left_vectors[:, k].copy(), sd.right_vectors[:, k].copy()))
        for k, c in enumerate(sd.coefficients)
    )


def rank_certificate(state, config=None):
    """Interval ``[lower, upper]`` containing the tensor rank of ``state``.

    Two-party states get the exact Schmidt number. Three qubits get the exact
    classifier as lower bound. Otherwise ALS is tried at ranks ascending from
    the flattening bound, with the slice expansion as a guaranteed fallback.
    """
    config = config or RankConfig()
    _require_multipartite(state)
    if state.shape.n_parties == 2:
        sd = schmidt_decompose(state, (0,), config.eps)
        r = sd.schmidt_number
        return RankCertificate(r, r, "flattening", "witness_decomposition", _schmidt_witness(sd))

    lower = flattening_lower_bound(state, config.eps)
    lower_method = "flattening"
    exact = None
    if state.shape.party_dims == (2, 2, 2):
        exact = exact_rank_2x2x2(state, config.eps, config.hyperdet_tol)
        lower, lower_method = max(lower, exact), "exact_222"

    trivial = slice_witness(state, config.eps)
    upper, upper_method, witness = len(trivial), "trivial_dim", trivial
    for r in range(lower, len(trivial)):
        w = als_upper_bound(state, r, config.restarts, config.iters, config.tol, config.seed)
        if w is not None:
            upper, upper_method, witness = r, "witness_decomposition", w
            break
    if exact is not None and upper > exact:
        upper, upper_method, witness = exact, "exact_222", None
    return RankCertificate(lower, upper, lower_method, upper_method, witness)
