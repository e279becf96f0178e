"""Product measurements, their reduction to rank-one operators, and indication tables.

A measurement outcome with Kraus operator ``A ⊗ B`` *indicates* an ensemble
state when it annihilates every other member. Any perfectly distinguishing
set ``{A_i ⊗ B_i}`` can be refined into rank-one product operators
``e |φ><φ| ⊗ |η><η|`` that still indicate, so the product vectors
``|φ>|η>`` (indicating product states, IPS) span the space; the linearly
independent ones assigned to a state number at least its Schmidt number.
"""
import json
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .errors import InvalidIndication, NotComplete, ParseError, ShapeMismatch
from .numerics import DEFAULT_EPS, as_matrix, independent_count, kron, polar_decompose
from .numerics import random_unitary, spectral_decompose_positive
from .states import Ensemble, PureState, SystemShape, decode_vector, encode_vector, load_json
from .tensor_rank import RankConfig, rank_certificate

COMPLETENESS_TOL = 1e-8
WARN_FLOOR = 1e-12

POVM_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["party_dims", "operators"],
    "properties": {
        "party_dims": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 2}},
        "operators": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["coefficient", "factors"],
                "properties": {
                    "coefficient": {"type": "number", "exclusiveMinimum": 0},
                    "factors": {
                        "type": "array",
                        "items": {
                            "type": "array",
                            "items": {
                                "type": "array",
                                "minItems": 2,
                                "maxItems": 2,
                                "items": {"type": "number"},
                            },
                        },
                    },
                },
            },
        },
    },
}


@dataclass(frozen=True, eq=False)
class LocalOperatorPair:
    op_a: np.ndarray
    op_b: np.ndarray

    def __post_init__(self):
        a, b = as_matrix(self.op_a), as_matrix(self.op_b)
        if a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
            raise ShapeMismatch("local operators must be square")
        object.__setattr__(self, "op_a", a)
        object.__setattr__(self, "op_b", b)

    @property
    def dims(self):
        return (self.op_a.shape[0], self.op_b.shape[0])

    def full(self):
        return np.kron(self.op_a, self.op_b)


@dataclass(frozen=True, eq=False)
class RankOneProductOperator:
    """``coefficient * ⊗_p |out_p><v_p|`` with unit vectors ``v_p`` (``factors``).

    ``outputs`` defaults to ``factors`` (no post-measurement rotation);
    ``source`` records the index of the operator pair it was split from.
    """

    coefficient: float
    factors: tuple
    outputs: tuple = None
    source: int = None

    def __post_init__(self):
        if not self.coefficient > 0:
            raise ValueError(f"coefficient must be positive, got {self.coefficient}")
        factors = tuple(np.asarray(f, dtype=complex).ravel() for f in self.factors)
        for f in factors:
            if abs(np.linalg.norm(f) - 1.0) > 1e-10:
                raise ValueError("product factors must be unit vectors")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "coefficient", float(self.coefficient))
        if self.outputs is not None:
            object.__setattr__(self, "outputs", tuple(np.asarray(f, dtype=complex).ravel() for f in self.outputs))

    @property
    def vector(self):
        return kron(self.factors)

    def kraus(self):
        out = kron(self.outputs if self.outputs is not None else self.factors)
        return self.coefficient * np.outer(out, self.vector.conj())


@dataclass(frozen=True, eq=False)
class ProductPovm:
    operators: tuple
    shape: SystemShape

    def __post_init__(self):
        ops = tuple(self.operators)
        dims = self.shape.party_dims
        for op in ops:
            if tuple(f.size for f in op.factors) != dims:
                raise ShapeMismatch(f"operator factors {[f.size for f in op.factors]} do not match {dims}")
        object.__setattr__(self, "operators", ops)

    def __len__(self):
        return len(self.operators)

    def vectors(self):
        return np.column_stack([op.vector for op in self.operators])

    def permuted(self, order):
        return ProductPovm(tuple(self.operators[k] for k in order), self.shape)


@dataclass(frozen=True)
class IndicationTable:
    assignment: tuple  # per operator: indicated state index or None
    liips_per_state: tuple
    conflicts: tuple = ()  # (operator, states overlapped)
    near_threshold: tuple = ()  # (operator, state, overlap) with overlap in (WARN_FLOOR, eps]

    @property
    def valid(self):
        return not self.conflicts


@dataclass(frozen=True)
class LiipsResult:
    liips_count: int
    schmidt_number: int
    satisfied: bool


def verify_completeness(povm):
    """Frobenius norm of ``Σ e_i² P_i - I`` over the rank-one product projectors ``P_i``."""
    dim = povm.shape.total_dim
    if not povm.operators:
        return float(np.sqrt(dim))
    v = povm.vectors()
    if v.shape[0] != dim:
        raise ShapeMismatch("operator vectors do not match the system dimension")
    e2 = np.array([op.coefficient**2 for op in povm.operators])
    total = (v * e2) @ v.conj().T
    return float(np.linalg.norm(total - np.eye(dim)))


def _check_same_shape(povm, ensemble):
    if povm.shape != ensemble.shape:
        raise ShapeMismatch(f"measurement on {povm.shape} but ensemble on {ensemble.shape}")


def indication_table(povm, ensemble, eps=DEFAULT_EPS):
    """Which ensemble state each rank-one operator indicates.

    Operator ``i`` indicates state ``j`` when ``|<v_i|Ψ_j>| > eps`` and its
    overlap with every other member is at most ``eps``. Operators orthogonal
    to every member indicate none and are kept; operators overlapping two or
    more members are recorded as conflicts and make the table invalid.
    """
    _check_same_shape(povm, ensemble)
    m = len(ensemble)
    if not povm.operators:
        return IndicationTable((), (0,) * m)
    psi = np.column_stack([s.amplitudes for s in ensemble.states])
    overlaps = np.abs(povm.vectors().conj().T @ psi)
    assignment, conflicts, near = [], [], []
    for i, row in enumerate(overlaps):
        hit = np.flatnonzero(row > eps)
        for j in np.flatnonzero((row > WARN_FLOOR) & (row <= eps)):
            near.append((i, int(j), float(row[j])))
        if len(hit) > 1:
            conflicts.append((i, tuple(int(j) for j in hit)))
            assignment.append(None)
        else:
            assignment.append(int(hit[0]) if len(hit) else None)
    liips = []
    for j in range(m):
        vecs = [povm.operators[i].vector for i, a in enumerate(assignment) if a == j]
        liips.append(independent_count(vecs, eps) if vecs else 0)
    return IndicationTable(tuple(assignment), tuple(liips), tuple(conflicts), tuple(near))


def liips_check(povm, ensemble, eps=DEFAULT_EPS, config=None):
    """Compare each state's LIIPS count with its tensor-rank lower bound."""
    table = indication_table(povm, ensemble, eps)
    if not table.valid:
        raise InvalidIndication(f"operators overlap several states: {list(table.conflicts)[:5]}")
    config = config or RankConfig(eps=eps)
    out = []
    for count, state in zip(table.liips_per_state, ensemble.states):
        rank = rank_certificate(state, config).lower_bound
        out.append(LiipsResult(count, rank, count >= rank))
    return out


def pairs_completeness_defect(pairs):
    dims = pairs[0].dims
    total = np.zeros((dims[0] * dims[1],) * 2, dtype=complex)
    for p in pairs:
        if p.dims != dims:
            raise ShapeMismatch("operator pairs act on different systems")
        k = p.full()
        total += k.conj().T @ k
    return float(np.linalg.norm(total - np.eye(total.shape[0])))


def reduce_to_rank_one(pairs, eps=DEFAULT_EPS, tol=COMPLETENESS_TOL):
    """Split each ``A ⊗ B`` into rank-one product operators.

    Each local operator is polar decomposed, ``A = u_A A'``, and ``A'`` is
    spectrally decomposed into ``Σ c_l |φ_l><φ_l|``. Pair ``i`` then yields the
    operators ``c_l d_k |u_A φ_l><φ_l| ⊗ |u_B η_k><η_k|``, whose projectors
    ``|φ_l η_k>`` inherit the completeness relation of the input.
    """
    pairs = list(pairs)
    if not pairs:
        raise NotComplete("no operator pairs given")
    defect = pairs_completeness_defect(pairs)
    if defect > tol:
        raise NotComplete(f"operator pairs violate completeness by {defect:.3g}")
    ops = []
    for i, pair in enumerate(pairs):
        sides = []
        for local in (pair.op_a, pair.op_b):
            u, pos = polar_decompose(local)
            sides.append([(c, v, u @ v) for c, v in spectral_decompose_positive(pos, eps)])
        for c, phi, uphi in sides[0]:
            for d, eta, ueta in sides[1]:
                ops.append(RankOneProductOperator(c * d, (phi, eta), (uphi, ueta), source=i))
    return ProductPovm(tuple(ops), SystemShape(pairs[0].dims))


def pair_indications(pairs, ensemble, eps=DEFAULT_EPS):
    """State indicated by each operator pair (or None); raises if a pair hits two states."""
    out = []
    for i, pair in enumerate(pairs):
        k = pair.full()
        hit = [j for j, s in enumerate(ensemble.states) if np.linalg.norm(k @ s.amplitudes) > eps]
        if len(hit) > 1:
            raise InvalidIndication(f"operator pair {i} acts nontrivially on states {hit}")
        out.append(hit[0] if hit else None)
    return out


def indication_preserved_under_reduction(pairs, ensemble, eps=DEFAULT_EPS):
    """True iff every rank-one operator indicates nothing or the state its parent pair indicated."""
    pairs = list(pairs)
    parents = pair_indications(pairs, ensemble, eps)
    povm = reduce_to_rank_one(pairs, eps)
    table = indication_table(povm, ensemble, eps)
    if not table.valid:
        return False
    return all(a is None or a == parents[op.source] for a, op in zip(table.assignment, povm.operators))


# --- serialization -----------------------------------------------------------


def povm_to_dict(povm):
    return {
        "party_dims": list(povm.shape.party_dims),
        "operators": [
            {"coefficient": op.coefficient, "factors": [encode_vector(f) for f in op.factors]}
            for op in povm.operators
        ],
    }


def parse_povm(document):
    doc = load_json(document)
    try:
        jsonschema.validate(doc, POVM_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ParseError(f"POVM document: {exc.message}") from exc
    shape = SystemShape(tuple(doc["party_dims"]))
    ops = []
    for i, entry in enumerate(doc["operators"]):
        factors = []
        for f in entry["factors"]:
            v = decode_vector(f)
            n = np.linalg.norm(v)
            if n == 0 or abs(n - 1) > 1e-6:
                raise ParseError(f"operator {i} has a factor of norm {n!r}")
            factors.append(v / n)
        try:
            ops.append(RankOneProductOperator(entry["coefficient"], tuple(factors)))
        except ValueError as exc:
            raise ParseError(f"operator {i}: {exc}") from exc
    try:
        return ProductPovm(tuple(ops), shape)
    except ShapeMismatch as exc:
        raise ParseError(str(exc)) from exc


def dumps_povm(povm, **kwargs):
    return json.dumps(povm_to_dict(povm), **kwargs)


# --- seeded instance generators for the property suites ----------------------


def _random_vector(dim, rng):
    return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)


def _random_groups(n, rng):
    perm = rng.permutation(n)
    cuts = sorted(rng.choice(np.arange(1, n), size=rng.integers(0, n), replace=False)) if n > 1 else []
    return [list(g) for g in np.split(perm, cuts)]


def random_indicating_instance(party_dims, rng, max_states=4):
    """A seeded (ensemble, valid indicating rank-one product POVM) pair on a bipartite system.

    Starts from a random orthonormal product basis. The basis vectors of one
    party are grouped into blocks; each cell ``|α_i> ⊗ span(block)`` is given
    to one ensemble state, and inside a cell the measurement is either a
    random rotation of the block basis or an equal-weight union of two such
    rotations (a non-orthogonal measurement). Members are random
    superpositions within their cells.
    """
    na, nb = party_dims
    shape = SystemShape((na, nb))
    bases = [random_unitary(na, rng), random_unitary(nb, rng)]
    fixed = int(rng.integers(2))  # party whose basis vectors label the cells
    grouped = 1 - fixed
    cells = []
    for i in range(party_dims[fixed]):
        for g in _random_groups(party_dims[grouped], rng):
            cells.append((i, g))
    m = int(rng.integers(2, min(len(cells), max_states) + 1))
    order = rng.permutation(len(cells))
    owner = np.empty(len(cells), dtype=int)
    owner[order[:m]] = np.arange(m)
    owner[order[m:]] = rng.integers(0, m, size=len(cells) - m)

    def product_vec(fixed_vec, grouped_vec):
        pair = [None, None]
        pair[fixed], pair[grouped] = fixed_vec, grouped_vec
        return pair

    ops = []
    states = [np.zeros(shape.total_dim, dtype=complex) for _ in range(m)]
    for (i, g), k in zip(cells, owner):
        alpha = bases[fixed][:, i]
        sub = bases[grouped][:, g]
        n_rot = 1 if rng.random() < 0.5 else 2
        for _ in range(n_rot):
            rot = sub @ random_unitary(len(g), rng)
            for col in range(len(g)):
                f = product_vec(alpha, rot[:, col])
                ops.append(RankOneProductOperator(np.sqrt(1.0 / n_rot), tuple(f)))
        local = sub @ _random_vector(len(g), rng)
        states[k] += kron(product_vec(alpha, local))
    ensemble = Ensemble(tuple(PureState(shape, s / np.linalg.norm(s)) for s in states))
    povm = ProductPovm(tuple(ops), shape)
    return ensemble, povm


def _filter_weights(n_outcomes, dim, rng):
    """Non-negative weights with unit column sums; sharp (0/1) about half the time."""
    if rng.random() < 0.5:
        w = np.zeros((n_outcomes, dim))
        w[rng.integers(0, n_outcomes, size=dim), np.arange(dim)] = 1.0
        return w
    w = rng.random((n_outcomes, dim)) * (rng.random((n_outcomes, dim)) < 0.7)
    w[rng.integers(0, n_outcomes, size=dim), np.arange(dim)] += 0.1
    return w / w.sum(axis=0)


def random_complete_pairs(party_dims, rng, max_outcomes=3):
    """Seeded complete one-way set ``{F_k ⊗ G_kl}`` with an ensemble it respects, if one exists.

    ``F_k = U_k diag(sqrt(w_k)) W_A^†`` with column-stochastic weights ``w``,
    and likewise for Bob's ``G_kl`` conditional on ``k``. Returns
    ``(pairs, ensemble)`` where ``ensemble`` is built on the connected
    components of the filter supports so every pair acts on at most one
    member, or ``None`` when there are fewer than two components.
    """
    na, nb = party_dims
    wa_basis, wb_basis = random_unitary(na, rng), random_unitary(nb, rng)
    ka = int(rng.integers(1, max_outcomes + 1))
    wa = _filter_weights(ka, na, rng)
    pairs, rects = [], []
    for k in range(ka):
        fa = random_unitary(na, rng) @ np.diag(np.sqrt(wa[k])) @ wa_basis.conj().T
        lb = int(rng.integers(1, max_outcomes + 1))
        wb = _filter_weights(lb, nb, rng)
        for l in range(lb):
            gb = random_unitary(nb, rng) @ np.diag(np.sqrt(wb[l])) @ wb_basis.conj().T
            pairs.append(LocalOperatorPair(fa, gb))
            rects.append((np.flatnonzero(wa[k] > 0), np.flatnonzero(wb[l] > 0)))

    parent = list(range(na * nb))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for rows, cols in rects:
        cells = [a * nb + b for a in rows for b in cols]
        for c in cells[1:]:
            parent[find(c)] = find(cells[0])
    comps = {}
    for c in range(na * nb):
        comps.setdefault(find(c), []).append(c)
    comps = list(comps.values())
    if len(comps) < 2:
        return pairs, None
    m = int(rng.integers(2, min(len(comps), 4) + 1))
    order = rng.permutation(len(comps))
    owner = np.empty(len(comps), dtype=int)
    owner[order[:m]] = np.arange(m)
    owner[order[m:]] = rng.integers(0, m, size=len(comps) - m)
    shape = SystemShape((na, nb))
    states = [np.zeros(na * nb, dtype=complex) for _ in range(m)]
    for comp, k in zip(comps, owner):
        for c in comp:
            a, b = divmod(c, nb)
            states[k] += complex(*rng.standard_normal(2)) * np.kron(wa_basis[:, a], wb_basis[:, b])
    ensemble = Ensemble(tuple(PureState(shape, s / np.linalg.norm(s)) for s in states))
    return pairs, ensemble
