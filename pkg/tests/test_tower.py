import numpy as np
import pytest

from pgtower import spec as S
from pgtower.build import build_group
from pgtower.corpus import D8
from pgtower.errors import ClassTooHigh, EquivarianceFailure, MalformedSpec
from pgtower.group import GroupHom, direct_product_group, frattini_quotient_dim
from pgtower.tower import (build_tower, central_quotient, extend_psi_to_J, induced_psi, phi_drop_last,
                           phi_residue_product, thread_element, wreath_stage)


@pytest.fixture(scope="module")
def d8_tower():
    return build_tower(D8, "wreath_central", 2, 2)


def test_drop_last(d8):
    phi = phi_drop_last(d8, 2)
    assert phi([[3, 5]]).tolist() == [[3]]
    with pytest.raises(MalformedSpec):
        phi_drop_last(d8, 1)


def test_residue_product_rule(d8):
    phi = phi_residue_product(d8, 2, 2)
    x = np.array([[1, 2, 3, 4]])
    expected = [[d8.mul(1, 3), d8.mul(2, 4)]]
    assert phi(x).tolist() == expected


def test_residue_product_not_multiplicative(d8):
    phi = phi_residue_product(d8, 2, 1)
    x, y = phi.multiplicativity_witness()
    xy = d8.table[x, y]
    lhs = phi(xy[None, :])[0]
    rhs = d8.table[phi(np.array([x]))[0], phi(np.array([y]))[0]]
    assert not np.array_equal(lhs, rhs)


def test_residue_product_congruent_mod_centre(d8):
    assert phi_residue_product(d8, 2, 2).congruence_witness() is None


def test_induced_psi_d8(d8):
    psi = induced_psi(phi_residue_product(d8, 2, 1), d8)
    assert psi.domain.order == 16 and psi.codomain.order == 4
    assert psi.is_homomorphism() and psi.is_surjective
    assert psi.kernel.order == 4


def test_class_too_high():
    W = build_group(S.Wreath(D8, 2))
    with pytest.raises(ClassTooHigh) as err:
        induced_psi(phi_residue_product(W, 2, 1), W, order_cap=1 << 16)
    assert set(err.value.witness) == {"a", "b"}


def test_psi_extension(d8):
    cq = central_quotient(d8)
    psi = induced_psi(phi_residue_product(d8, 2, 1), d8, cq=cq)
    upper, lower = wreath_stage(cq, 2, 1), wreath_stage(cq, 2, 0)
    Psi = extend_psi_to_J(psi, 2, 1, upper, lower)
    assert Psi.domain.order == 32 and Psi.codomain.order == 4
    assert Psi(upper.alpha) == lower.alpha == 0
    assert Psi.is_homomorphism() and Psi.is_surjective


def test_psi_extension_rejects_non_equivariant(d8):
    cq = central_quotient(d8)
    upper, lower = wreath_stage(cq, 2, 1), wreath_stage(cq, 2, 0)
    # projection onto the first coordinate is a homomorphism that ignores the shift
    images = np.arange(16) % 4
    first = GroupHom(direct_product_group([cq.group] * 2), lower.group, images)
    with pytest.raises(EquivarianceFailure) as err:
        extend_psi_to_J(first, 2, 1, upper, lower)
    assert isinstance(err.value.witness, int)


def test_wreath_central_tower(d8_tower, d8):
    T = d8_tower
    assert T.levels == [0, 1, 2]
    assert [G.order for G in T.stages] == [4, 32, 1024]
    dE = frattini_quotient_dim(d8, 2)
    assert [a.d for a in T.audits] == [2, dE + 1, dE + 1]
    for a in T.audits[1:]:
        assert a.link_surjective and a.link_homomorphism
    assert all(a.monolithic and a.iso_to_wreath for a in T.audits)


def test_central_power_tower():
    T = build_tower(D8, "central_power", 2, 3)
    assert [G.order for G in T.stages] == [4, 16, 64]
    assert all(a.link_surjective for a in T.audits[1:])
    assert all(a.monolithic for a in T.audits)


def test_single_stage_tower():
    T = build_tower(D8, "wreath_central", 2, 0)
    assert len(T.stages) == 1 and T.links == []


def test_tower_truncates_at_cap():
    T = build_tower(D8, "wreath_central", 2, 3)
    assert T.truncated_at == 3 and len(T.stages) == 3


def test_unknown_kind():
    with pytest.raises(MalformedSpec):
        build_tower(D8, "spiral", 2, 1)


def test_threads(d8_tower):
    T = d8_tower
    assert thread_element(T, 0) == [0, 0, 0]
    alphas = thread_element(T, T.alpha(2))
    assert alphas == [T.alpha(2), T.alpha(1), T.alpha(0)]
    rng = np.random.default_rng(7)
    for top in rng.integers(0, T.stages[-1].order, 20):
        th = thread_element(T, int(top))
        for link, (hi, lo) in zip(reversed(T.links), zip(th, th[1:])):
            assert link(hi) == lo
