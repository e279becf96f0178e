import math

import numpy as np
import pytest

from loccsum.errors import InvalidCut, InvalidInput
from loccsum.info_bounds import bounds, to_bits
from loccsum.states import catalog, make_ensemble, random_orthogonal_ensemble


def test_bell4_basic():
    r = bounds(catalog("bell4"))
    assert r.average_entanglement == pytest.approx(math.log(2), abs=1e-12)
    assert abs(r.bound_basic - math.log(2)) <= 1e-12
    assert r.bound_refined == r.bound_basic


def test_comp_basis():
    r = bounds(catalog("comp_basis"))
    assert r.average_entanglement == pytest.approx(0, abs=1e-15)
    assert r.bound_basic == pytest.approx(math.log(4), abs=1e-12)


def test_bell4_refined():
    r = bounds(catalog("bell4"), output_entanglement=math.log(2))
    assert abs(r.bound_refined) <= 1e-12


def test_bits():
    r = to_bits(bounds(catalog("bell4")))
    assert r.units == "bits"
    assert r.bound_basic == pytest.approx(1, abs=1e-12)


def test_errors():
    with pytest.raises(InvalidInput):
        bounds(catalog("bell4"), output_entanglement=-0.1)
    with pytest.raises(InvalidCut):
        bounds(catalog("bell4"), cut="0|2")


def test_ordering_on_random_ensembles():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        dims = tuple(int(d) for d in rng.integers(2, 4, size=int(rng.integers(2, 4))))
        m = int(rng.integers(2, min(6, np.prod(dims)) + 1))
        r = bounds(random_orthogonal_ensemble(dims, m, seed), output_entanglement=float(rng.uniform(0, 0.5)))
        assert r.average_entanglement >= 0
        assert r.bound_refined <= r.bound_basic <= math.log(np.prod(dims)) + 1e-15


@pytest.mark.parametrize("n", [2, 3, 4])
def test_maximally_entangled(n):
    r = bounds(catalog("maxent_family", [n, n + 1]))
    assert abs(r.bound_basic - math.log(n)) <= 1e-12


def test_weight_towards_product_member_helps():
    s = 1 / math.sqrt(2)
    ens = make_ensemble((2, 2), [(s, 0, 0, s), (0, 1, 0, 0), (0, 0, 1, 0)])
    for p_hi in (0.5, 0.6, 0.8):
        for j in (1, 2):
            # the heavy weight sits on product member j, then is swapped onto the entangled member 0
            p = [0.1] * 3
            p[0], p[j] = 0.9 - p_hi, p_hi
            swapped = list(p)
            swapped[0], swapped[j] = p[j], p[0]
            assert bounds(ens.reweighted(p)).bound_basic >= bounds(ens.reweighted(swapped)).bound_basic
