"""Schmidt decomposition and entanglement entropy across a bipartite cut."""
from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import InvalidCut
from .numerics import DEFAULT_EPS, svd


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    cut: tuple
    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    singular_values: np.ndarray

    @property
    def schmidt_number(self):
        return len(self.coefficients)

    def reconstruct(self):
        terms = [
            c * np.kron(self.left_vectors[:, k], self.right_vectors[:, k])
            for k, c in enumerate(self.coefficients)
        ]
        return np.sum(terms, axis=0)


def parse_cut(cut, n_parties):
    """Normalize a cut to ``(left_parties, right_parties)``.

    ``cut`` may be a string such as ``"0|12"`` or ``"0,1|2"``, a pair of party
    collections, or a single collection naming the left group. ``None`` means
    the first party against the rest.
    """
    if cut is None:
        left = (0,)
    elif isinstance(cut, str):
        if "|" not in cut:
            raise InvalidCut(f"cut {cut!r} must look like '0|12'")
        lhs, rhs = cut.split("|", 1)
        left = _parse_group(lhs)
        right = _parse_group(rhs)
        if set(left) | set(right) != set(range(n_parties)) or set(left) & set(right):
            raise InvalidCut(f"cut {cut!r} does not partition parties 0..{n_parties - 1}")
    elif len(cut) == 2 and all(not isinstance(g, (int, np.integer)) for g in cut):
        left, right = (tuple(int(p) for p in g) for g in cut)
        if set(left) | set(right) != set(range(n_parties)) or set(left) & set(right):
            raise InvalidCut(f"cut {cut!r} does not partition parties 0..{n_parties - 1}")
    else:
        left = tuple(int(p) for p in cut)
    left = tuple(sorted(set(left)))
    if any(p < 0 or p >= n_parties for p in left):
        raise InvalidCut(f"cut {cut!r} names a party outside 0..{n_parties - 1}")
    right = tuple(p for p in range(n_parties) if p not in left)
    if not left or not right:
        raise InvalidCut(f"cut {cut!r} leaves one side empty")
    return left, right


def _parse_group(text):
    text = text.strip()
    if not text:
        return ()
    if "," in text:
        return tuple(int(p) for p in text.split(","))
    return tuple(int(ch) for ch in text)


def flatten(state, cut):
    """Coefficient matrix of ``state`` over (left group) x (right group)."""
    dims = state.shape.party_dims
    left, right = parse_cut(cut, len(dims))
    t = state.tensor().transpose(left + right)
    return t.reshape(prod(dims[p] for p in left), prod(dims[p] for p in right))


def schmidt_decompose(state, cut=None, eps=DEFAULT_EPS):
    """Schmidt decomposition of ``state`` across ``cut``.

    Coefficients below ``eps`` times the largest are dropped; the retained
    count is the Schmidt number.

    Examples
    --------
    >>> from loccsum.states import SystemShape, PureState, bell_states
    >>> bell = PureState(SystemShape((2, 2)), bell_states()["phi+"])
    >>> schmidt_decompose(bell).schmidt_number
    2
    """
    cut = parse_cut(cut, state.shape.n_parties)
    u, s, v = svd(flatten(state, cut))
    keep = int(np.count_nonzero(s > eps * s[0])) if s[0] > 0 else 0
    return SchmidtDecomposition(
        cut=cut,
        coefficients=s[:keep].copy(),
        left_vectors=u[:, :keep],
        right_vectors=v[:, :keep].conj(),
        singular_values=s,
    )


def schmidt_number(state, cut=None, eps=DEFAULT_EPS):
    return schmidt_decompose(state, cut, eps).schmidt_number


def entropy_from_coefficients(coefficients):
    p = np.asarray(coefficients, dtype=float) ** 2
    p = p[p > 0]
    return float(max(0.0, -np.sum(p * np.log(p))))


def entanglement_entropy(state, cut=None):
    """Entropy of entanglement in nats, ``-Σ λ² ln λ²`` over all Schmidt coefficients."""
    return entropy_from_coefficients(schmidt_decompose(state, cut).singular_values)
