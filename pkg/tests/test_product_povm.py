import numpy as np
import pytest

from loccsum.errors import InvalidIndication, NotComplete, ParseError, ShapeMismatch
from loccsum.numerics import independent_count, random_unitary
from loccsum.product_povm import (
    LocalOperatorPair,
    ProductPovm,
    RankOneProductOperator,
    dumps_povm,
    indication_preserved_under_reduction,
    indication_table,
    liips_check,
    pair_indications,
    pairs_completeness_defect,
    parse_povm,
    random_complete_pairs,
    random_indicating_instance,
    reduce_to_rank_one,
    verify_completeness,
)
from loccsum.schmidt import schmidt_number
from loccsum.states import SystemShape, bell_states, catalog, make_ensemble

QUBITS = SystemShape((2, 2))
E = np.eye(2, dtype=complex)
PLUS, MINUS = (E[0] + E[1]) / np.sqrt(2), (E[0] - E[1]) / np.sqrt(2)


def product_povm(factor_pairs, coefficient=1.0, shape=QUBITS):
    return ProductPovm(tuple(RankOneProductOperator(coefficient, f) for f in factor_pairs), shape)


def comp_povm():
    return product_povm([(E[i], E[j]) for i in range(2) for j in range(2)])


def hadamard_povm():
    return product_povm([(PLUS, PLUS), (MINUS, MINUS), (PLUS, MINUS), (MINUS, PLUS)])


def phi_pair():
    b = bell_states()
    return make_ensemble((2, 2), [b["phi+"], b["phi-"]])


def test_completeness_examples():
    assert verify_completeness(comp_povm()) == pytest.approx(0, abs=1e-15)
    partial = ProductPovm(comp_povm().operators[:3], QUBITS)
    assert verify_completeness(partial) == pytest.approx(1, abs=1e-15)
    half = 1 / np.sqrt(2)
    comp = [(E[i], E[j]) for i in range(2) for j in range(2)]
    had = [(PLUS, PLUS), (MINUS, MINUS), (PLUS, MINUS), (MINUS, PLUS)]
    assert verify_completeness(product_povm(comp + had, half)) == pytest.approx(0, abs=1e-12)


def test_operator_shape_checked():
    with pytest.raises(ShapeMismatch):
        product_povm([(np.ones(3) / np.sqrt(3), E[0])])
    with pytest.raises(ValueError):
        RankOneProductOperator(0.0, (E[0], E[0]))
    with pytest.raises(ValueError):
        RankOneProductOperator(1.0, (np.ones(2), E[0]))


def test_indication_comp_basis():
    table = indication_table(comp_povm(), catalog("comp_basis"))
    assert table.valid
    assert table.assignment == (0, 1, 2, 3)
    assert table.liips_per_state == (1, 1, 1, 1)


def test_indication_hadamard():
    # <++|Φ+> = <--|Φ+> = 1/√2 and <+-|Φ-> = <-+|Φ-> = 1/√2; all others vanish
    psi = phi_pair()
    overlaps = np.abs(hadamard_povm().vectors().conj().T @ np.column_stack([s.amplitudes for s in psi.states]))
    np.testing.assert_allclose(overlaps, [[2**-0.5, 0], [2**-0.5, 0], [0, 2**-0.5], [0, 2**-0.5]], atol=1e-15)
    table = indication_table(hadamard_povm(), psi)
    assert table.valid
    assert table.assignment == (0, 0, 1, 1)
    assert table.liips_per_state == (2, 2)


def test_indication_bell3_invalid():
    table = indication_table(comp_povm(), catalog("bell3"))
    assert not table.valid
    assert (0, (0, 1)) in table.conflicts


def test_indication_operators_for_none_are_kept():
    ens = make_ensemble((2, 2), [E[0].tolist() + [0, 0], [0, 1, 0, 0]])
    table = indication_table(comp_povm(), ens)
    assert table.valid and table.assignment == (0, 1, None, None)


def test_indication_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        indication_table(comp_povm(), catalog("domino9"))


def test_liips_examples():
    result = liips_check(hadamard_povm(), phi_pair())
    assert [(r.liips_count, r.schmidt_number, r.satisfied) for r in result] == [(2, 2, True)] * 2
    result = liips_check(comp_povm(), catalog("comp_basis"))
    assert [(r.liips_count, r.schmidt_number) for r in result] == [(1, 1)] * 4
    with pytest.raises(InvalidIndication):
        liips_check(comp_povm(), catalog("bell3"))


def test_indication_permutation_invariant():
    rng = np.random.default_rng(0)
    for _ in range(50):
        ens, povm = random_indicating_instance((2, 3), rng)
        base = indication_table(povm, ens)
        order = rng.permutation(len(povm))
        moved = indication_table(povm.permuted(order), ens)
        assert tuple(base.assignment[k] for k in order) == moved.assignment
        assert base.liips_per_state == moved.liips_per_state


def test_generated_instances_obey_counting():
    rng = np.random.default_rng(1)
    for trial in range(60):
        dims = (2, 2) if trial % 2 else (2, 3)
        ens, povm = random_indicating_instance(dims, rng)
        assert verify_completeness(povm) <= 1e-8
        table = indication_table(povm, ens)
        assert table.valid
        for count, s in zip(table.liips_per_state, ens.states):
            assert count >= schmidt_number(s)
        assert sum(table.liips_per_state) <= ens.shape.total_dim


def test_reduce_projective_input():
    pairs = [LocalOperatorPair(np.outer(E[i], E[i]), np.outer(E[j], E[j])) for i in range(2) for j in range(2)]
    povm = reduce_to_rank_one(pairs)
    assert len(povm) == 4
    for op, (i, j) in zip(povm.operators, [(i, j) for i in range(2) for j in range(2)]):
        assert op.coefficient == pytest.approx(1, abs=1e-14)
        assert abs(np.vdot(op.vector, np.kron(E[i], E[j]))) == pytest.approx(1, abs=1e-14)


def test_reduce_identity():
    povm = reduce_to_rank_one([LocalOperatorPair(E, E)])
    assert len(povm) == 4
    assert all(op.coefficient == pytest.approx(1) for op in povm.operators)
    v = povm.vectors()
    np.testing.assert_allclose(v.conj().T @ v, np.eye(4), atol=1e-12)


def test_reduce_filter_example():
    u = random_unitary(2, np.random.default_rng(3))
    a = u @ np.diag([1, 0.5])
    pairs = [LocalOperatorPair(a, E), LocalOperatorPair(np.diag([0, np.sqrt(3) / 2]), E)]
    assert pairs_completeness_defect(pairs) <= 1e-15
    povm = reduce_to_rank_one(pairs)
    assert len(povm) == 4 + 2
    first = [op for op in povm.operators if op.source == 0]
    assert sorted(op.coefficient for op in first) == pytest.approx([0.5, 0.5, 1, 1])
    target = np.kron(a, E).conj().T @ np.kron(a, E)
    back = sum(op.kraus().conj().T @ op.kraus() for op in first)
    assert np.linalg.norm(back - target) <= 1e-10
    for op in first:
        np.testing.assert_allclose(op.outputs[0], u @ op.factors[0], atol=1e-12)
    assert verify_completeness(povm) <= 1e-8


def test_reduce_rejects_incomplete():
    with pytest.raises(NotComplete):
        reduce_to_rank_one([LocalOperatorPair(np.diag([1, 0]), E)])


def test_reduce_random_sets():
    rng = np.random.default_rng(4)
    for trial in range(100):
        dims = [(2, 2), (2, 3), (3, 2), (3, 3)][trial % 4]
        pairs, _ = random_complete_pairs(dims, rng)
        assert pairs_completeness_defect(pairs) <= 1e-10
        povm = reduce_to_rank_one(pairs)
        assert verify_completeness(povm) <= 1e-8
        # the reduced family still spans the whole space
        assert independent_count(list(povm.vectors().T)) == dims[0] * dims[1]


def hadamard_pairs(rng):
    projectors = [np.outer(v, v.conj()) for v in (PLUS, MINUS)]
    out = []
    for pa, pb in [(0, 0), (1, 1), (0, 1), (1, 0)]:
        out.append(LocalOperatorPair(random_unitary(2, rng) @ projectors[pa], random_unitary(2, rng) @ projectors[pb]))
    return out


def test_preservation_examples():
    pairs = hadamard_pairs(np.random.default_rng(6))
    assert pair_indications(pairs, phi_pair()) == [0, 0, 1, 1]
    assert indication_preserved_under_reduction(pairs, phi_pair())
    comp = [LocalOperatorPair(np.outer(E[i], E[i]), np.outer(E[j], E[j])) for i in range(2) for j in range(2)]
    assert indication_preserved_under_reduction(comp, catalog("comp_basis"))


def test_preservation_negative_control():
    comp = [LocalOperatorPair(np.outer(E[i], E[i]), np.outer(E[j], E[j])) for i in range(2) for j in range(2)]
    with pytest.raises(InvalidIndication):
        indication_preserved_under_reduction(comp, catalog("bell3"))


def test_preservation_on_generated_sets():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(100):
        pairs, ens = random_complete_pairs((2, 3), rng)
        if ens is None:
            continue
        assert indication_preserved_under_reduction(pairs, ens)
        checked += 1
    assert checked >= 20


def test_povm_json_round_trip():
    rng = np.random.default_rng(2)
    _, povm = random_indicating_instance((2, 3), rng)
    back = parse_povm(dumps_povm(povm))
    assert back.shape == povm.shape and len(back) == len(povm)
    for a, b in zip(povm.operators, back.operators):
        assert a.coefficient == b.coefficient
        for fa, fb in zip(a.factors, b.factors):
            assert np.max(np.abs(fa - fb)) <= 1e-15


@pytest.mark.parametrize(
    "doc",
    [
        "{}",
        '{"party_dims": [2, 2], "operators": [{"coefficient": 1, "factors": [[[1, 0], [0, 0]], [[2, 0], [0, 0]]]}]}',
        '{"party_dims": [2, 2], "operators": [{"coefficient": 1, "factors": [[[1, 0], [0, 0]], [[1, 0], [0, 0], [0, 0]]]}]}',
    ],
)
def test_povm_parse_errors(doc):
    with pytest.raises(ParseError):
        parse_povm(doc)
