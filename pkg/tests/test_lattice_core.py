import itertools
import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_matrix
from endolattice.lattice_core import (
    AbelianElement,
    FiniteAbelianGroup,
    IntMatrix,
    NoSolution,
    QmodZ,
    cokernel,
    kernel_basis,
    rational_kernel_dim,
    rational_rank,
    smith_normal_form,
    solve_integer,
    solve_rational,
    subgroup_order,
    subquotient,
)


def minor_gcds(A: IntMatrix) -> list[int]:
    """Determinantal divisors: gcd of all k x k minors, k = 1..min(shape)."""
    out = []
    for k in range(1, min(A.shape) + 1):
        g = 0
        for rows in itertools.combinations(range(A.rows), k):
            for cols in itertools.combinations(range(A.cols), k):
                sub = IntMatrix.from_rows([[A[i, j] for j in cols] for i in rows])
                g = gcd(g, sub.det())
        out.append(g)
    return out


def snf_from_divisors(A: IntMatrix) -> list[int]:
    divs = minor_gcds(A)
    out, prev = [], 1
    for d in divs:
        if d == 0:
            out.append(0)
            prev = 0
            continue
        out.append(d // prev)
        prev = d
    return out


# -- matrices ---------------------------------------------------------------


def test_matrix_basics():
    A = IntMatrix.from_rows([[1, 2], [3, 4]])
    assert A.T.to_rows() == [[1, 3], [2, 4]]
    assert (A @ IntMatrix.identity(2)) == A
    assert A.det() == -2
    assert A.apply((1, 1)) == (3, 7)
    assert (A - A).is_zero()
    assert A.hstack(A).shape == (2, 4)
    assert A.vstack(A).shape == (4, 2)


def test_inverse_and_order():
    S = IntMatrix.from_rows([[0, -1], [1, -1]])
    assert S.order() == 3
    assert S @ S.inverse() == IntMatrix.identity(2)
    assert S ** -1 == S.inverse()
    with pytest.raises(ValueError):
        IntMatrix.from_rows([[2, 0], [0, 1]]).inverse()
    with pytest.raises(ValueError):
        IntMatrix.from_rows([[1, 1], [0, 1]]).order(cap=50)


def test_rational_inverse():
    A = IntMatrix.from_rows([[2, 1], [1, 1]])
    assert A.rational_inverse() == [[1, -1], [-1, 2]]
    B = IntMatrix.from_rows([[2, 0], [0, 3]])
    assert B.rational_inverse() == [[Fraction(1, 2), 0], [0, Fraction(1, 3)]]


def test_det_against_permutation_expansion(rng):
    for _ in range(50):
        n = rng.randint(1, 4)
        A = IntMatrix.from_rows([[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)])
        total = 0
        for perm in itertools.permutations(range(n)):
            inv = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
            prod = 1
            for i in range(n):
                prod *= A[i, perm[i]]
            total += (-1) ** inv * prod
        assert A.det() == total


# -- Smith normal form ------------------------------------------------------


def test_snf_small_examples():
    assert smith_normal_form(IntMatrix.diag([2, 3])).diagonal == (1, 6)
    A = IntMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert smith_normal_form(A).diagonal == (2, 6, 12)
    Z = IntMatrix.zeros(2, 3)
    assert smith_normal_form(Z).rank == 0


def test_snf_matches_determinantal_divisors(rng):
    for _ in range(150):
        A = random_matrix(rng, max_dim=4, bound=6)
        snf = smith_normal_form(A)
        expected = snf_from_divisors(A)
        got = list(snf.diagonal) + [0] * (min(A.shape) - len(snf.diagonal))
        assert got[: min(A.shape)] == expected, A


def _check_snf(A: IntMatrix):
    s = smith_normal_form(A)
    assert s.U @ s.D @ s.V == A
    assert s.U_inv @ A @ s.V_inv == s.D
    assert abs(s.U.det()) == 1 and abs(s.V.det()) == 1
    assert s.U @ s.U_inv == IntMatrix.identity(A.rows)
    assert s.V @ s.V_inv == IntMatrix.identity(A.cols)
    d = s.diagonal
    for i in range(A.rows):
        for j in range(A.cols):
            if i != j:
                assert s.D[i, j] == 0
    nz = [x for x in d if x]
    assert all(x > 0 for x in nz)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    assert all(x == 0 for x in d[len(nz):])
    assert s.rank == rational_rank(A)


def test_snf_contract_random(rng):
    for _ in range(300):
        _check_snf(random_matrix(rng))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(
    lambda c: st.lists(st.lists(st.integers(-20, 20), min_size=c, max_size=c), min_size=r, max_size=r))))
def test_snf_contract_hypothesis(rows):
    _check_snf(IntMatrix.from_rows(rows))


# -- kernels, cokernels, solving --------------------------------------------


def test_kernel_basis_is_saturated_and_complete(rng):
    for _ in range(200):
        A = random_matrix(rng, max_dim=5, bound=5)
        K = kernel_basis(A)
        assert K.cols == rational_kernel_dim(A)
        if K.cols:
            assert (A @ K).is_zero()
            assert all(d == 1 for d in smith_normal_form(K).diagonal)


def test_cokernel_known_groups():
    assert cokernel(IntMatrix.diag([2, 3])).group == FiniteAbelianGroup((6,), 0)
    co = cokernel(IntMatrix.from_rows([[2], [0]]))
    assert co.group == FiniteAbelianGroup((2,), 1)
    assert str(co.group) == "Z/2 x Z"


def test_cokernel_contract(rng):
    for _ in range(200):
        A = random_matrix(rng, max_dim=5, bound=6)
        co = cokernel(A)
        for j in range(A.cols):
            assert co.project(A.column(j)).is_zero()
        for e in itertools.islice(co.group.torsion().elements(), 30):
            full = co.group.element(e.coords + (0,) * co.group.free_rank)
            assert co.project(co.lift(full)) == full
        v = tuple(rng.randint(-10, 10) for _ in range(A.rows))
        w = tuple(x + y for x, y in zip(v, A.apply(tuple(rng.randint(-3, 3) for _ in range(A.cols)))))
        assert co.project(v) == co.project(w)


def test_cokernel_order_is_gcd_of_maximal_minors(rng):
    for _ in range(100):
        n = rng.randint(1, 4)
        A = IntMatrix.from_rows([[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)])
        co = cokernel(A)
        if A.det():
            assert co.group.order == abs(A.det())
        else:
            assert co.group.free_rank > 0


def test_solve_integer_and_rational(rng):
    A = IntMatrix.from_rows([[2, 0], [0, 3]])
    assert solve_integer(A, (4, 9)) == (2, 3)
    with pytest.raises(NoSolution):
        solve_integer(A, (1, 0))
    assert solve_rational(A, (1, 1)) == (Fraction(1, 2), Fraction(1, 3))
    with pytest.raises(NoSolution):
        solve_rational(IntMatrix.from_rows([[1], [1]]), (0, 1))
    for _ in range(200):
        B = random_matrix(rng, max_dim=5, bound=5)
        x = tuple(rng.randint(-4, 4) for _ in range(B.cols))
        b = B.apply(x)
        y = solve_integer(B, b)
        assert B.apply(y) == b
        z = solve_rational(B, b)
        assert B.apply(z) == b


def test_subquotient():
    K = IntMatrix.from_columns([(1, 1)], 2)
    R = IntMatrix.from_columns([(2, 2)], 2)
    sq = subquotient(K, R)
    assert sq.group == FiniteAbelianGroup((2,), 0)
    assert sq.in_span((3, 3)) and not sq.in_span((1, 0))
    assert sq.project((3, 3)) == sq.group.element((1,))
    with pytest.raises(ValueError):
        subquotient(IntMatrix.from_columns([(2, 0)], 2), R)


# -- finite abelian groups and Q/Z ------------------------------------------


def test_group_validation_and_elements():
    with pytest.raises(ValueError):
        FiniteAbelianGroup((2, 3), 0)
    with pytest.raises(ValueError):
        FiniteAbelianGroup((1,), 0)
    G = FiniteAbelianGroup((2, 4), 0)
    assert G.order == 8 and G.exponent() == 4
    assert len(list(G.elements())) == 8
    x = G.element((1, 3))
    assert x.order() == 4 and (x * 4).is_zero()
    assert x + (-x) == G.zero()
    assert subgroup_order(G, [x]) == 4
    assert subgroup_order(G, [G.element((1, 0)), G.element((0, 1))]) == 8


def test_element_canonical_coordinates():
    G = FiniteAbelianGroup((3,), 1)
    assert G.element((4, -2)) == G.element((1, -2))
    assert not G.element((0, 1)).is_torsion()


def test_qmodz():
    assert QmodZ.of(Fraction(3, 2)) == QmodZ(1, 2)
    assert QmodZ.of(Fraction(-1, 3)) == QmodZ(2, 3)
    assert QmodZ(1, 2) + QmodZ(1, 2) == QmodZ.of(0)
    assert str(QmodZ(1, 3)) == "1/3" and str(QmodZ.of(0)) == "0"
    assert (QmodZ(1, 6) * 3) == QmodZ(1, 2)
    assert QmodZ(1, 4).order() == 4


@given(st.fractions(), st.fractions())
def test_qmodz_is_a_group_hom(a, b):
    assert QmodZ.of(a + b) == QmodZ.of(a) + QmodZ.of(b)
    assert QmodZ.of(-a) == -QmodZ.of(a)
    assert 0 <= QmodZ.of(a).value < 1


def test_snf_agrees_with_sympy(rng):
    sympy = pytest.importorskip("sympy")
    from sympy.matrices.normalforms import smith_normal_form as sympy_snf

    for _ in range(200):
        A = random_matrix(rng, max_dim=5, bound=8)
        S = sympy_snf(sympy.Matrix(A.to_rows()), domain=sympy.ZZ)
        theirs = sorted(abs(int(S[i, i])) for i in range(min(A.shape)) if S[i, i] != 0)
        assert sorted(x for x in smith_normal_form(A).diagonal if x) == theirs
