from fractions import Fraction

import pytest

from endolattice.galois_cohomology import augmentation
from endolattice.lattice_core import FiniteAbelianGroup, IntMatrix
from endolattice.packets import (
    PacketError,
    central_points,
    central_restriction,
    character_eval,
    component_group,
    component_points,
    diagram_commutes,
    dual_torus_point,
    kottwitz_sign_check,
    membership_Xw,
    packet_fibers,
    parameter,
    trselp_validate,
    xw_representatives,
)
from endolattice.root_datum import (
    BasedAutomorphism,
    RootDatumError,
    automorphism_from_permutation,
    build_named,
    identity_automorphism,
    weyl_from_word,
    weyl_group,
)


def coxeter(name):
    G = build_named(name)
    w = weyl_from_word(G, range(1, G.semisimple_rank + 1))
    return G, parameter(G, w, identity_automorphism(G))


def test_sl2_elliptic():
    G, pc = coxeter("A1:sc")
    assert pc.m == 2
    assert trselp_validate(pc).ok
    assert component_group(pc).group == FiniteAbelianGroup((2,))
    fibers = packet_fibers(pc)
    assert len(fibers) == 1
    assert [len(v) for v in fibers.values()] == [2]
    assert central_points(pc) == [dual_torus_point(pc, (0,))]


def test_pgl2_elliptic_has_two_fibers():
    G, pc = coxeter("A1:ad")
    fibers = packet_fibers(pc)
    assert sorted(len(v) for v in fibers.values()) == [1, 1]
    assert {t.r for t in central_points(pc)} == {(Fraction(0),), (Fraction(1, 2),)}


@pytest.mark.parametrize("name", ["A1:sc", "A1:ad", "A2:sc", "A2:ad", "A3:sc", "A3:ad", "B2:sc",
                                  "B2:ad", "G2", "B3:sc", "C3:ad"])
def test_coxeter_orders_against_determinants(name):
    # sigma - 1 is invertible for a Coxeter element, so |X_Gamma| = |det(sigma - 1)|;
    # the fibers are indexed by X-bar_Gamma
    G, pc = coxeter(name)
    d = abs(augmentation(pc.X).det())
    assert pc.coinvariants().group.order == d
    assert component_group(pc).group.order == d
    fibers = packet_fibers(pc)
    assert len(fibers) == pc.central_coinvariants().group.order
    assert sum(len(v) for v in fibers.values()) == d
    assert len({len(v) for v in fibers.values()}) == 1


def test_trselp_failure_reports_fixed_vector():
    G = build_named("A1 x A1")
    swap = automorphism_from_permutation(G, [2, 1])
    pc = parameter(G, weyl_from_word(G, []), swap)
    res = trselp_validate(pc)
    assert not res.ok
    assert res.offending in {(1, 1), (-1, -1)}


def test_trselp_with_torus_factor():
    G = build_named("A1:sc x T1")
    pc = parameter(G, weyl_from_word(G, [1]), identity_automorphism(G))
    # the central torus direction is fixed but orthogonal to the roots
    assert trselp_validate(pc).ok


def test_parameter_order_override():
    G = build_named("A1:sc")
    s = weyl_from_word(G, [1])
    assert parameter(G, s, identity_automorphism(G), 4).m == 4
    with pytest.raises(PacketError):
        parameter(G, s, identity_automorphism(G), 3)


def test_membership_and_errors():
    G = build_named("A1 x A1")
    swap = automorphism_from_permutation(G, [2, 1])
    pc = parameter(G, weyl_from_word(G, []), swap)
    assert not membership_Xw(pc, (1, 0))
    with pytest.raises(PacketError):
        character_eval(pc, (1, 0), dual_torus_point(pc, (0, 0)))
    G, pc = coxeter("A1:sc")
    with pytest.raises(PacketError):
        dual_torus_point(pc, (Fraction(1, 3),))
    with pytest.raises(PacketError):
        dual_torus_point(pc, (0, 0))


def test_character_evaluation_sl2():
    G, pc = coxeter("A1:sc")
    t = dual_torus_point(pc, (Fraction(1, 2),))
    assert str(character_eval(pc, (1,), t)) == "1/2"
    assert character_eval(pc, (2,), t).is_zero()


def test_central_restriction_is_a_homomorphism():
    G, pc = coxeter("A3:ad")
    reps = xw_representatives(pc, shifts=False)
    for a in reps:
        for b in reps:
            s = tuple(x + y for x, y in zip(a, b))
            assert central_restriction(pc, s) == central_restriction(pc, a) + central_restriction(pc, b)


@pytest.mark.parametrize("name", ["A2:ad", "B2:ad", "A3:ad", "A1:ad x A1:ad"])
def test_diagram_commutes_on_all_trselp_twists(name):
    G = build_named(name)
    for w in weyl_group(G):
        pc = parameter(G, w, identity_automorphism(G))
        if not trselp_validate(pc).ok:
            continue
        for lam in xw_representatives(pc):
            for t in central_points(pc):
                assert diagram_commutes(pc, lam, t)


def test_component_points_cover_the_component_group():
    G, pc = coxeter("A2:sc")
    pts = component_points(pc)
    assert len(pts) == 3
    assert all(t.is_fixed(pc.a) for t in pts)


def test_kottwitz_sign_pins_the_normalization():
    G, pc = coxeter("A2:sc")
    results = {(lam, t.r, norm): kottwitz_sign_check(pc, lam, t, norm)
               for lam in xw_representatives(pc) for t in component_points(pc) for norm in ("DR", "TN")}
    assert all(v for (_, _, n), v in results.items() if n == "DR")
    assert not all(v for (_, _, n), v in results.items() if n == "TN")


def test_kottwitz_sign_order_two_cannot_distinguish():
    # with all classes of order two, DR and TN coincide
    G, pc = coxeter("A1:sc")
    for lam in xw_representatives(pc):
        for t in component_points(pc):
            assert kottwitz_sign_check(pc, lam, t, "DR") and kottwitz_sign_check(pc, lam, t, "TN")


def test_twist_of_infinite_order_is_rejected():
    G = build_named("A2")
    shear = BasedAutomorphism(IntMatrix.from_rows([[1, 1], [0, 1]]), 1, (1, 2))
    with pytest.raises(RootDatumError):
        parameter(G, weyl_from_word(G, []), shear)
