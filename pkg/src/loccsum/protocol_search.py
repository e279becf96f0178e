"""Simulation of sequential projective LOCC protocols and a heuristic one-way search.

A protocol is a tree: each node names a party and an orthonormal basis of its
space, and each outcome leads either to a further node or to a verdict (the
index of the ensemble state being announced). The search looks for one-way
protocols in which Alice measures first and Bob's measurement depends on her
outcome; finding none proves nothing.
"""
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInput, ShapeMismatch, UnsupportedShape
from .numerics import _complete_columns, svd
from .states import SystemShape, decode_vector, encode_vector, load_json

SUCCESS_THRESHOLD = 1 - 1e-8
BRANCH_TOL = 1e-8
ZERO_TOL = 1e-12
POLISH_TOL = 1e-16
MAX_DEPTH = 4
N_REFINE_STARTS = 8
MAX_MOVES = 64


@dataclass(frozen=True, eq=False)
class ProtocolNode:
    party: int
    basis: np.ndarray  # columns are the measurement vectors
    branches: tuple  # per outcome: ProtocolNode or int verdict

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise InvalidInput("a measurement basis must be a square matrix of column vectors")
        if np.linalg.norm(b.conj().T @ b - np.eye(b.shape[0])) > 1e-10:
            raise InvalidInput("measurement basis is not orthonormal")
        if len(self.branches) != b.shape[1]:
            raise InvalidInput(f"{len(self.branches)} branches for {b.shape[1]} outcomes")
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "branches", tuple(self.branches))

    def depth(self):
        return 1 + max((br.depth() for br in self.branches if isinstance(br, ProtocolNode)), default=0)


@dataclass(frozen=True, eq=False)
class LoccProtocol:
    root: ProtocolNode
    shape: SystemShape
    max_depth: int = MAX_DEPTH

    def __post_init__(self):
        if self.root.depth() > self.max_depth:
            raise InvalidInput(f"protocol depth {self.root.depth()} exceeds {self.max_depth}")
        self._check(self.root)

    def _check(self, node):
        if not 0 <= node.party < self.shape.n_parties:
            raise InvalidInput(f"party {node.party} out of range")
        if node.basis.shape[0] != self.shape.party_dims[node.party]:
            raise ShapeMismatch(f"basis for party {node.party} has the wrong dimension")
        for br in node.branches:
            if isinstance(br, ProtocolNode):
                self._check(br)


@dataclass(frozen=True)
class SearchOutcome:
    protocol: Optional[LoccProtocol]
    best_defect: float
    candidates: int


def _measure(tensor, party, vec):
    """Project axis ``party`` of ``tensor`` onto ``vec`` and keep the product form."""
    amp = np.tensordot(vec.conj(), tensor, axes=([0], [party]))
    return np.moveaxis(np.multiply.outer(vec, amp), 0, party)


def simulate(protocol, state):
    """Distribution over verdicts when ``protocol`` is run on ``state`` (Born rule)."""
    if state.shape != protocol.shape:
        raise ShapeMismatch(f"protocol for {protocol.shape} run on a state of {state.shape}")
    dist = {}
    stack = [(protocol.root, state.tensor(), 1.0)]
    while stack:
        node, psi, prob = stack.pop()
        for k, branch in enumerate(node.branches):
            post = _measure(psi, node.party, node.basis[:, k])
            p = float(np.vdot(post, post).real)
            if p == 0.0:
                continue
            if isinstance(branch, ProtocolNode):
                stack.append((branch, post / np.sqrt(p), prob * p))
            else:
                dist[int(branch)] = dist.get(int(branch), 0.0) + prob * p
    return dist


def verify_distinguishes(protocol, ensemble, threshold=SUCCESS_THRESHOLD):
    """True iff every member is announced correctly with probability at least ``threshold``."""
    if protocol.shape != ensemble.shape:
        return False
    return all(simulate(protocol, s).get(j, 0.0) >= threshold for j, s in enumerate(ensemble.states))


# --- protocol construction ---------------------------------------------------


def _closest_orthonormal(vectors, dim):
    """Nearest orthonormal set to ``vectors`` (columns), completed to a basis of ``dim``."""
    u, _, v = svd(np.column_stack(vectors))
    q = np.zeros((dim, dim), dtype=complex)
    k = len(vectors)
    q[:, :k] = u @ v.conj().T
    bad = np.zeros(dim, dtype=bool)
    bad[k:] = True
    return _complete_columns(q, bad)


def _final_measurement(party, dim, tensors):
    """Measurement on the last party that announces the member its conditional state came from."""
    live = [(j, t) for j, t in enumerate(tensors) if np.vdot(t, t).real > ZERO_TOL]
    if not live:
        return 0
    if len(live) == 1:
        return live[0][0]
    if len(live) > dim:
        live = sorted(live, key=lambda jt: -np.vdot(jt[1], jt[1]).real)[:dim]
    vecs = [t / np.linalg.norm(t) for _, t in live]
    basis = _closest_orthonormal(vecs, dim)
    verdicts = [j for j, _ in live]
    for col in range(len(live), dim):
        overlaps = [abs(np.vdot(basis[:, col], v)) for v in vecs]
        verdicts.append(verdicts[int(np.argmax(overlaps))])
    return ProtocolNode(party, basis, tuple(verdicts))


def _build(parties, dims, tensors, bases):
    party = parties[0]
    if len(parties) == 1:
        return _final_measurement(party, dims[party], [t.ravel() for t in tensors])
    basis = bases[party]
    axis = 0  # tensors keep only the not-yet-measured parties, in order
    branches = []
    for k in range(basis.shape[1]):
        sub = [np.tensordot(basis[:, k].conj(), t, axes=([0], [axis])) for t in tensors]
        live = [j for j, t in enumerate(sub) if np.vdot(t, t).real > ZERO_TOL]
        if len(live) <= 1:
            branches.append(live[0] if live else 0)
            continue
        branches.append(_build(parties[1:], dims, sub, bases))
    return ProtocolNode(party, basis, tuple(branches))


def adaptive_protocol(ensemble, bases, order=None):
    """Parties measure in turn; the last one measures adaptively.

    ``bases`` maps each party except the last in ``order`` to a fixed basis.
    The last party measures in the orthonormal basis closest to its
    conditional states on each branch (when a branch leaves more live members
    than that dimension, the weakest are dropped). Returns ``None`` only if the
    root itself is a verdict.
    """
    shape = ensemble.shape
    order = list(order) if order is not None else list(range(shape.n_parties))
    tensors = [np.transpose(s.tensor(), order) for s in ensemble.states]
    bases = {p: np.asarray(b, dtype=complex) for p, b in dict(bases).items()}
    root = _build(order, shape.party_dims, tensors, bases)
    if not isinstance(root, ProtocolNode):
        return None
    return LoccProtocol(root, shape)


def one_way_protocol(ensemble, alice_basis):
    return adaptive_protocol(ensemble, {0: alice_basis})


def parity_protocol(shape, basis_a, basis_b, verdict_even, verdict_odd):
    """Both parties measure fixed qubit bases; the verdict depends on outcome parity."""
    basis_a, basis_b = np.asarray(basis_a, dtype=complex), np.asarray(basis_b, dtype=complex)
    branches = [
        ProtocolNode(1, basis_b, tuple(verdict_even if (a + b) % 2 == 0 else verdict_odd for b in range(2)))
        for a in range(2)
    ]
    return LoccProtocol(ProtocolNode(0, basis_a, tuple(branches)), SystemShape(tuple(shape)))


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


# --- search ------------------------------------------------------------------


def qubit_basis(theta, phi):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    return np.array([[c, -np.conj(e) * s], [e * s, c]], dtype=complex)


def givens_basis(angles, dim):
    """Unitary from one (θ, φ) Givens rotation per index pair, applied in lexicographic order."""
    u = np.eye(dim, dtype=complex)
    k = 0
    for p in range(dim - 1):
        for q in range(p + 1, dim):
            theta, phi = angles[k], angles[k + 1]
            k += 2
            g = np.eye(dim, dtype=complex)
            c, s = np.cos(theta / 2), np.sin(theta / 2)
            g[p, p], g[q, q] = c, c
            g[q, p], g[p, q] = np.exp(1j * phi) * s, -np.exp(-1j * phi) * s
            u = u @ g
    return u


def _gram_blocks(ensemble):
    mats = [s.tensor().reshape(ensemble.shape.party_dims[0], -1) for s in ensemble.states]
    m = len(mats)
    return np.array([[mats[i].conj() @ mats[j].T for j in range(m)] for i in range(m)])


def _defects(blocks, bases):
    """Branch non-orthogonality, summed over outcomes, for a stack of Alice bases ``(n, d, d)``."""
    m = blocks.shape[0]
    total = np.zeros(bases.shape[0])
    iu, ju = np.triu_indices(m, 1)
    for i, j in zip(iu, ju):
        inner = np.einsum("nak,ab,nbk->nk", bases, blocks[i, j], bases.conj())
        total += np.sum(np.abs(inner) ** 2, axis=1)
    return total


def _generator_rotation(dim, k, angle):
    """``exp(-i angle H_k / 2)`` for the k-th off-diagonal generator (X- then Y-type per index pair)."""
    pair, kind = divmod(k, 2)
    p, q = [(p, q) for p in range(dim - 1) for q in range(p + 1, dim)][pair]
    g = np.eye(dim, dtype=complex)
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    g[p, p] = g[q, q] = c
    if kind == 0:
        g[p, q] = g[q, p] = -1j * s
    else:
        g[p, q], g[q, p] = -s, s
    return g


def search_report(ensemble, grid_depth=4, refine_iters=30, seed=0):
    """One-way protocol search with diagnostics; see :func:`search_one_way`."""
    shape = ensemble.shape
    if shape.n_parties != 2 or shape.party_dims[0] > 4:
        raise UnsupportedShape(f"one-way search supports bipartite systems with N_a <= 4, got {shape}")
    na = shape.party_dims[0]
    blocks = _gram_blocks(ensemble)
    n_side = 2**grid_depth + 1
    if na == 2:
        grid = [qubit_basis(np.pi * i / (n_side - 1), 2 * np.pi * j / (n_side - 1))
                for i in range(n_side) for j in range(n_side)]
        step0 = np.pi / (n_side - 1)
    else:
        n_angles = na * (na - 1)
        rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, na]))
        grid = [np.eye(na, dtype=complex)]
        grid += [givens_basis(x, na) for x in rng.uniform(0, 2 * np.pi, size=(n_side**2 - 1, n_angles))]
        step0 = np.pi / 4
    defects = _defects(blocks, np.array(grid))
    order = np.argsort(defects, kind="stable")
    best = float(defects[order[0]])
    n_coords = na * (na - 1)

    def cost(b):
        return float(_defects(blocks, b[None])[0])

    for start in order[: min(N_REFINE_STARTS, len(order))]:
        basis = grid[start]
        fx = float(defects[start])
        step = step0
        for _ in range(refine_iters):
            if fx <= POLISH_TOL:
                break
            improved = False
            for c in range(n_coords):
                for sign in (1.0, -1.0):
                    rot = _generator_rotation(na, c, sign * step)
                    for _ in range(MAX_MOVES):
                        trial = basis @ rot
                        ft = cost(trial)
                        if ft >= fx:
                            break
                        basis, fx = trial, ft
                        improved = True
            if not improved:
                step /= 2
        best = min(best, fx)
        if fx <= BRANCH_TOL:
            protocol = one_way_protocol(ensemble, basis)
            if protocol is not None and verify_distinguishes(protocol, ensemble):
                return SearchOutcome(protocol, fx, len(grid))
    return SearchOutcome(None, best, len(grid))


def search_one_way(ensemble, grid_depth=4, refine_iters=30, seed=0):
    """Look for a verified one-way protocol (Alice first) that perfectly distinguishes ``ensemble``.

    Alice's basis is scanned on a grid of ``(2^grid_depth + 1)^2`` points
    (random seeded points for N_a > 2). The best starts are refined by
    coordinate descent on the branch non-orthogonality, one generator
    rotation at a time, halving the step after a round without progress; then
    Bob measures the basis closest to his conditional states. Returns
    ``None`` if nothing passes :func:`verify_distinguishes`.
    """
    return search_report(ensemble, grid_depth, refine_iters, seed).protocol


# --- serialization -----------------------------------------------------------


def _node_to_dict(node):
    return {
        "party": node.party,
        "basis": [encode_vector(node.basis[:, k]) for k in range(node.basis.shape[1])],
        "branches": [
            _node_to_dict(b) if isinstance(b, ProtocolNode) else {"verdict": int(b)} for b in node.branches
        ],
    }


def protocol_to_dict(protocol):
    return {"party_dims": list(protocol.shape.party_dims), "root": _node_to_dict(protocol.root)}


def _node_from_dict(doc):
    basis = np.column_stack([decode_vector(v) for v in doc["basis"]])
    branches = tuple(b["verdict"] if "verdict" in b else _node_from_dict(b) for b in doc["branches"])
    return ProtocolNode(int(doc["party"]), basis, branches)


def parse_protocol(document):
    doc = load_json(document)
    return LoccProtocol(_node_from_dict(doc["root"]), SystemShape(tuple(doc["party_dims"])))


def dumps_protocol(protocol, **kwargs):
    return json.dumps(protocol_to_dict(protocol), **kwargs)

