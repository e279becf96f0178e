"""Pure states, orthogonal ensembles, the named example catalog and JSON I/O.

Amplitudes are stored lexicographically with the last party varying fastest,
so ``|i>_A |j>_B`` sits at index ``i * N_b + j``.
"""
import json
from dataclasses import dataclass, field
from math import prod

import jsonschema
import numpy as np

from .errors import (
    InvalidInput,
    InvalidParams,
    NotNormalized,
    NotOrthogonal,
    ParseError,
    ShapeMismatch,
    TooManyStates,
    UnknownCatalogEntry,
)
from .numerics import kron

NORM_TOL = 1e-10
PARSE_NORM_TOL = 1e-6
ORTHO_TOL = 1e-8
PROB_TOL = 1e-10

ENSEMBLE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["party_dims", "states"],
    "properties": {
        "party_dims": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 2}},
        "states": {
            "type": "array",
            "minItems": 2,
            "items": {
                "type": "object",
                "required": ["amplitudes"],
                "properties": {
                    "label": {"type": "string"},
                    "amplitudes": {
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
        "probabilities": {"type": "array", "items": {"type": "number"}},
    },
}


@dataclass(frozen=True)
class SystemShape:
    party_dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.party_dims)
        if not dims or any(d < 2 for d in dims):
            raise InvalidInput(f"party dimensions must be >= 2, got {self.party_dims}")
        object.__setattr__(self, "party_dims", dims)

    @property
    def total_dim(self):
        return prod(self.party_dims)

    @property
    def n_parties(self):
        return len(self.party_dims)

    def __str__(self):
        return "⊗".join(map(str, self.party_dims))


@dataclass(frozen=True, eq=False)
class PureState:
    shape: SystemShape
    amplitudes: np.ndarray
    label: str = ""

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amps.size != self.shape.total_dim:
            raise ShapeMismatch(
                f"{amps.size} amplitudes for a system of dimension {self.shape.total_dim}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"state norm is {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def tensor(self):
        """Amplitudes reshaped to one axis per party."""
        return self.amplitudes.reshape(self.shape.party_dims)


@dataclass(frozen=True, eq=False)
class Ensemble:
    states: tuple
    probabilities: tuple = field(default=None)

    def __post_init__(self):
        states = tuple(self.states)
        if len(states) < 2:
            raise InvalidInput("an ensemble needs at least two states")
        shape = states[0].shape
        if any(s.shape != shape for s in states):
            raise ShapeMismatch("ensemble states live on different systems")
        m = len(states)
        probs = self.probabilities
        if probs is None:
            probs = (1.0 / m,) * m
        probs = tuple(float(p) for p in probs)
        if len(probs) != m:
            raise InvalidInput(f"{len(probs)} probabilities for {m} states")
        if any(not (0.0 < p <= 1.0) for p in probs):
            raise InvalidInput("probabilities must lie in (0, 1]")
        if abs(sum(probs) - 1.0) > PROB_TOL:
            raise InvalidInput(f"probabilities sum to {sum(probs)!r}")
        gram = self._gram(states)
        for i in range(m):
            for j in range(i + 1, m):
                if abs(gram[i, j]) > ORTHO_TOL:
                    raise NotOrthogonal(i, j, abs(gram[i, j]))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probabilities", probs)

    @staticmethod
    def _gram(states):
        mat = np.array([s.amplitudes for s in states])
        return mat.conj() @ mat.T

    @property
    def shape(self):
        return self.states[0].shape

    @property
    def labels(self):
        return [s.label or f"state{i}" for i, s in enumerate(self.states)]

    def __len__(self):
        return len(self.states)

    def reweighted(self, probabilities):
        return Ensemble(self.states, probabilities)

    def transformed(self, unitary):
        """Apply one unitary on the full space to every member."""
        u = np.asarray(unitary, dtype=complex)
        return Ensemble(
            tuple(PureState(s.shape, _renorm(u @ s.amplitudes), s.label) for s in self.states),
            self.probabilities,
        )


def _renorm(v):
    return v / np.linalg.norm(v)


def make_ensemble(party_dims, vectors, labels=None, probabilities=None):
    shape = SystemShape(tuple(party_dims))
    labels = labels or [""] * len(vectors)
    states = tuple(
        PureState(shape, np.asarray(v, dtype=complex), lab) for v, lab in zip(vectors, labels)
    )
    return Ensemble(states, probabilities)


def local_unitary(unitaries):
    """Full-space operator ``U_1 ⊗ ... ⊗ U_k`` in the library's basis order."""
    out = np.ones((1, 1), dtype=complex)
    for u in unitaries:
        out = np.kron(out, np.asarray(u, dtype=complex))
    return out


# --- catalog -----------------------------------------------------------------

_S2 = 1 / np.sqrt(2)


def basis_vector(dim, index):
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def bell_states():
    """The four Bell states Φ+, Φ-, Ψ+, Ψ- as 4-vectors."""
    return {
        "phi+": _S2 * np.array([1, 0, 0, 1], dtype=complex),
        "phi-": _S2 * np.array([1, 0, 0, -1], dtype=complex),
        "psi+": _S2 * np.array([0, 1, 1, 0], dtype=complex),
        "psi-": _S2 * np.array([0, 1, -1, 0], dtype=complex),
    }


def generalized_bell(n, s, t):
    """``(1/√n) Σ_j ω^(s j) |j>|j+t mod n>`` with ``ω = exp(2πi/n)``."""
    omega = np.exp(2j * np.pi / n)
    v = np.zeros(n * n, dtype=complex)
    for j in range(n):
        v[j * n + (j + t) % n] = omega ** (s * j) / np.sqrt(n)
    return v


def ghz_state(n_qubits=3):
    v = np.zeros(2**n_qubits, dtype=complex)
    v[0] = v[-1] = _S2
    return v


def w_state():
    v = np.zeros(8, dtype=complex)
    v[[1, 2, 4]] = 1 / np.sqrt(3)
    return v


def w_type(a, b, c):
    """``a|001> + b|010> + c|100>``."""
    v = np.zeros(8, dtype=complex)
    v[1], v[2], v[4] = a, b, c
    return v


def _domino_vectors():
    e = [basis_vector(3, k) for k in range(3)]

    def sup(x, y, sign):
        return _S2 * (e[x] + sign * e[y])

    pairs = [
        ("|1>|1>", e[1], e[1]),
        ("|0>|0+1>", e[0], sup(0, 1, 1)),
        ("|0>|0-1>", e[0], sup(0, 1, -1)),
        ("|2>|1+2>", e[2], sup(1, 2, 1)),
        ("|2>|1-2>", e[2], sup(1, 2, -1)),
        ("|1+2>|0>", sup(1, 2, 1), e[0]),
        ("|1-2>|0>", sup(1, 2, -1), e[0]),
        ("|0+1>|2>", sup(0, 1, 1), e[2]),
        ("|0-1>|2>", sup(0, 1, -1), e[2]),
    ]
    return [lab for lab, _, _ in pairs], [kron([a, b]) for _, a, b in pairs]


def _cat_bell3(params):
    _no_params("bell3", params)
    b = bell_states()
    names = ["phi+", "phi-", "psi+"]
    return make_ensemble([2, 2], [b[k] for k in names], names)


def _cat_bell4(params):
    _no_params("bell4", params)
    b = bell_states()
    return make_ensemble([2, 2], list(b.values()), list(b))


def _cat_comp_basis(params):
    dims = list(params) if params else [2, 2]
    if any(d < 2 for d in dims):
        raise InvalidParams("comp_basis dimensions must be >= 2")
    total = prod(dims)
    labels = []
    for idx in range(total):
        digits = np.unravel_index(idx, dims)
        labels.append("|" + "".join(str(int(d)) for d in digits) + ">")
    return make_ensemble(dims, [basis_vector(total, k) for k in range(total)], labels)


def _cat_maxent_family(params):
    if len(params) != 2:
        raise InvalidParams("maxent_family takes params [n, k]")
    n, k = params
    if n < 2 or not (2 <= k <= n * n):
        raise InvalidParams(f"maxent_family needs n >= 2 and 2 <= k <= n^2, got n={n}, k={k}")
    vecs, labels = [], []
    for q in range(k):
        t, s = divmod(q, n)
        vecs.append(generalized_bell(n, s, t))
        labels.append(f"bell({s},{t})")
    return make_ensemble([n, n], vecs, labels)


def _cat_w_triple(params):
    _no_params("w_triple", params)
    omega = np.exp(2j * np.pi / 3)
    rows = [[omega ** (r * c) / np.sqrt(3) for c in range(3)] for r in range(3)]
    return make_ensemble([2, 2, 2], [w_type(*row) for row in rows], [f"W{r}" for r in range(3)])


def _cat_ghz_w_pair(params):
    _no_params("ghz_w_pair", params)
    return make_ensemble([2, 2, 2], [ghz_state(), w_state()], ["GHZ", "W"])


def _cat_domino9(params):
    _no_params("domino9", params)
    labels, vecs = _domino_vectors()
    return make_ensemble([3, 3], vecs, labels)


def _no_params(name, params):
    if params:
        raise InvalidParams(f"{name} takes no params")


CATALOG = {
    "bell3": (_cat_bell3, "three Bell states Φ+, Φ-, Ψ+ in 2⊗2"),
    "bell4": (_cat_bell4, "all four Bell states in 2⊗2"),
    "comp_basis": (_cat_comp_basis, "computational product basis; params = party dims (default 2,2)"),
    "maxent_family": (_cat_maxent_family, "k generalized Bell states in n⊗n; params = n,k"),
    "w_triple": (_cat_w_triple, "three orthogonal W-type states a|001>+b|010>+c|100>"),
    "ghz_w_pair": (_cat_ghz_w_pair, "GHZ and W three-qubit states"),
    "domino9": (_cat_domino9, "nine orthogonal 3⊗3 product (domino) states"),
}


def catalog(name, params=()):
    """Named example ensembles with uniform probabilities."""
    try:
        builder = CATALOG[name][0]
    except KeyError:
        raise UnknownCatalogEntry(f"unknown catalog entry {name!r}; choose from {sorted(CATALOG)}")
    return builder([int(p) for p in (params or ())])


def random_orthogonal_ensemble(shape, m, seed):
    """``m`` orthonormal states from seeded complex Gaussian vectors."""
    if not isinstance(shape, SystemShape):
        shape = SystemShape(tuple(shape))
    if m > shape.total_dim:
        raise TooManyStates(f"{m} orthogonal states do not fit in dimension {shape.total_dim}")
    if m < 2:
        raise InvalidInput("an ensemble needs at least two states")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((shape.total_dim, m)) + 1j * rng.standard_normal((shape.total_dim, m))
    q, _ = np.linalg.qr(z)
    return Ensemble(tuple(PureState(shape, _renorm(q[:, k])) for k in range(m)))


# --- serialization -----------------------------------------------------------


def encode_vector(v):
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]


def decode_vector(pairs):
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def ensemble_to_dict(ensemble):
    return {
        "party_dims": list(ensemble.shape.party_dims),
        "states": [
            {"label": s.label, "amplitudes": encode_vector(s.amplitudes)} for s in ensemble.states
        ],
        "probabilities": list(ensemble.probabilities),
    }


def dumps_ensemble(ensemble, **kwargs):
    return json.dumps(ensemble_to_dict(ensemble), **kwargs)


def load_json(document):
    if isinstance(document, (bytes, str)):
        try:
            return json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    return document


def parse_ensemble(document):
    """Build a validated :class:`Ensemble` from JSON text or an already-loaded dict.

    States whose norm is within ``1e-6`` of one are renormalized; larger
    deviations raise :class:`NotNormalized`. Missing probabilities default to
    uniform.
    """
    doc = load_json(document)
    try:
        jsonschema.validate(doc, ENSEMBLE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ParseError(f"ensemble document: {exc.message}") from exc
    shape = SystemShape(tuple(doc["party_dims"]))
    states = []
    for i, entry in enumerate(doc["states"]):
        amps = decode_vector(entry["amplitudes"])
        if amps.size != shape.total_dim:
            raise ParseError(f"state {i} has {amps.size} amplitudes, expected {shape.total_dim}")
        if not np.all(np.isfinite(amps)):
            raise ParseError(f"state {i} has non-finite amplitudes")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > PARSE_NORM_TOL:
            raise NotNormalized(f"state {i} has norm {norm!r}")
        if norm != 1.0:
            amps = amps / norm
        states.append(PureState(shape, amps, entry.get("label", "")))
    return Ensemble(tuple(states), doc.get("probabilities"))
