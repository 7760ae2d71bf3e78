from __future__ import annotations

import random

import pytest

from procat.zlinalg import (
    IntMatrix,
    InvariantFactors,
    MatrixEquationSystem,
    invariant_factors,
    kernel_generators,
    kron,
    lattice_contains,
    lattices_equal,
    smith_normal_form,
    solve_matrix_equation,
    unimodular_inverse,
    unvec,
    vec,
)

from .oracles import DiagQuotient, in_lattice_small_search, invariant_factors_from_minors


def M(rows):
    return IntMatrix.from_rows(rows)


def no_relations(rows: int) -> IntMatrix:
    return IntMatrix.zeros(rows, 0)


def det(a: IntMatrix) -> int:
    if a.rows != a.cols:
        raise ValueError
    if a.rows == 0:
        return 1
    total = 0
    sign = 1
    for i in range(a.rows):
        sub = IntMatrix.from_rows(
            [[a[r, c] for c in range(1, a.cols)] for r in range(a.rows) if r != i],
            a.cols - 1)
        total += sign * a[i, 0] * det(sub)
        sign = -sign
    return total


def assert_valid_snf(a: IntMatrix):
    res = smith_normal_form(a)
    assert res.U.mul(a).mul(res.V).entries == res.S.entries
    assert abs(det(res.U)) == 1
    assert abs(det(res.V)) == 1
    diag = res.diagonal
    for i in range(min(a.rows, a.cols)):
        for j in range(min(a.rows, a.cols)):
            if i != j:
                pass
    for i in range(a.rows):
        for j in range(a.cols):
            if i != j:
                assert res.S[i, j] == 0
    prev = None
    for d in diag:
        assert d >= 0
        if prev is not None and prev != 0:
            assert d % prev == 0
        if prev == 0:
            assert d == 0
        prev = d
    return res


class TestSmithNormalForm:
    def test_diag_2_3(self):
        res = assert_valid_snf(M([[2, 0], [0, 3]]))
        assert res.diagonal == (1, 6)

    def test_zero_matrix(self):
        res = assert_valid_snf(IntMatrix.zeros(2, 2))
        assert res.S.is_zero()

    def test_derived_example(self):
        # d1 = gcd of entries = 2, d1*d2 = gcd of 2x2 minors = 8.
        res = assert_valid_snf(M([[2, 4], [6, 8]]))
        assert res.diagonal == (2, 4)

    def test_rectangular(self):
        assert_valid_snf(M([[1, 2, 3], [4, 5, 6]]))
        assert_valid_snf(M([[1, 2], [3, 4], [5, 6]]))

    def test_random_matches_minor_gcd_oracle(self):
        rng = random.Random(5)
        for _ in range(100):
            r = rng.randint(1, 4)
            c = rng.randint(1, 4)
            a = M([[rng.randint(-5, 5) for _ in range(c)] for _ in range(r)])
            res = assert_valid_snf(a)
            assert list(res.diagonal) == invariant_factors_from_minors(a)

    def test_deterministic(self):
        a = M([[2, 4], [6, 8]])
        r1 = smith_normal_form(a)
        r2 = smith_normal_form(M([[2, 4], [6, 8]]))
        assert r1.U.entries == r2.U.entries and r1.V.entries == r2.V.entries


class TestInvariantFactors:
    def test_presentation(self):
        # Z^2 / <(2,0),(0,3)> = Z/6
        assert invariant_factors(M([[2, 0], [0, 3]])).factors == (6,)

    def test_free(self):
        assert invariant_factors(no_relations(2)).factors == (0, 0)

    def test_mixed(self):
        # Z^2 / <(2,0)> = Z/2 + Z
        assert invariant_factors(M([[2], [0]])).factors == (2, 0)

    def test_validation(self):
        with pytest.raises(ValueError):
            InvariantFactors((0, 2))
        with pytest.raises(ValueError):
            InvariantFactors((2, 3))
        with pytest.raises(ValueError):
            InvariantFactors((1,))


class TestSolveMatrixEquation:
    def test_simple(self):
        x = solve_matrix_equation(M([[2]]), M([[4]]), no_relations(1))
        assert x is not None and M([[2]]).mul(x).entries == ((4,),)

    def test_parity_unsolvable(self):
        assert solve_matrix_equation(M([[2]]), M([[1]]), no_relations(1)) is None

    def test_modular(self):
        # 2x = 0 mod 4: any witness with 2x in <4> accepted.
        x = solve_matrix_equation(M([[2]]), M([[0]]), M([[4]]))
        assert x is not None
        assert (2 * x[0, 0]) % 4 == 0

    def test_replay_membership(self):
        rng = random.Random(11)
        solved = 0
        for _ in range(200):
            r, c, k = rng.randint(1, 3), rng.randint(1, 3), rng.randint(0, 2)
            a = M([[rng.randint(-4, 4) for _ in range(c)] for _ in range(r)])
            b = M([[rng.randint(-4, 4)] for _ in range(r)])
            rel = IntMatrix.from_rows([[rng.randint(-4, 4) for _ in range(k)] for _ in range(r)], k)
            x = solve_matrix_equation(a, b, rel)
            if x is not None:
                solved += 1
                assert lattice_contains(a.mul(x).sub(b), no_relations(r), rel)
        assert solved > 20

    def test_shape_rejection(self):
        with pytest.raises(ValueError):
            solve_matrix_equation(M([[1]]), M([[1], [1]]), no_relations(1))
        with pytest.raises(ValueError):
            solve_matrix_equation(M([[1]]), M([[1]]), no_relations(2))


class TestKernelGenerators:
    def test_mod4(self):
        k = kernel_generators(M([[2]]), M([[4]]))
        assert lattices_equal(k, M([[2]]), no_relations(1))

    def test_identity(self):
        k = kernel_generators(IntMatrix.identity(2), no_relations(2))
        assert k.cols == 0

    def test_sum_map(self):
        k = kernel_generators(M([[1, 1]]), no_relations(1))
        assert lattices_equal(k, M([[1], [-1]]), no_relations(2))
        # bounded enumeration oracle: each generator really is in <(1,-1)>
        for col in k.columns():
            assert in_lattice_small_search(col, M([[1], [-1]]))

    def test_every_generator_maps_into_lattice(self):
        rng = random.Random(23)
        for _ in range(100):
            r, c, nrel = rng.randint(1, 3), rng.randint(1, 3), rng.randint(0, 2)
            a = M([[rng.randint(-4, 4) for _ in range(c)] for _ in range(r)])
            rel = IntMatrix.from_rows([[rng.randint(-4, 4) for _ in range(nrel)] for _ in range(r)], nrel)
            k = kernel_generators(a, rel)
            if k.cols:
                assert lattice_contains(a.mul(k), no_relations(r), rel)


class TestLatticeContains:
    def test_two_z_in_z(self):
        assert lattice_contains(M([[2]]), M([[1]]), no_relations(1))

    def test_z_not_in_two_z(self):
        assert not lattice_contains(M([[1]]), M([[2]]), no_relations(1))

    def test_three_not_in_two_mod_four(self):
        # In Z/4 the subgroup <2> = {0, 2} does not contain 3.
        assert not lattice_contains(M([[3]]), M([[2]]), M([[4]]))

    def test_row_mismatch(self):
        with pytest.raises(ValueError):
            lattice_contains(M([[1]]), M([[1], [0]]), no_relations(1))

    def test_agrees_with_enumeration_on_small_quotients(self):
        rng = random.Random(7)
        shapes = [[2], [3], [4], [2, 2], [2, 4], [8], [16], [2, 8], [3, 4], [2, 2, 4]]
        for diag in shapes:
            q = DiagQuotient(diag)
            n = q.n
            rel = IntMatrix.from_rows(
                [[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])
            for _ in range(20):
                gens_b_cols = [tuple(rng.randrange(0, 8) for _ in range(n))
                               for _ in range(rng.randint(0, 2))]
                sub = q.subgroup_generated(gens_b_cols)
                target = tuple(rng.randrange(0, 8) for _ in range(n))
                gens_a = IntMatrix.from_rows([[x] for x in target])
                gens_b = (IntMatrix.from_rows([list(col) for col in zip(*gens_b_cols)])
                          if gens_b_cols else IntMatrix.zeros(n, 0))
                expected = q.reduce(target) in sub
                assert lattice_contains(gens_a, gens_b, rel) == expected


class TestMatrixEquationSystem:
    def test_two_sided(self):
        # Find g with 2*g = 4 and g*3 = 6 simultaneously.
        sys = MatrixEquationSystem()
        sys.add_unknown("g", 1, 1)
        sys.add_equation([(M([[2]]), "g", IntMatrix.identity(1))], M([[4]]))
        sys.add_equation([(IntMatrix.identity(1), "g", M([[3]]))], M([[6]]))
        sol = sys.solve()
        assert sol is not None and sol["g"].entries == ((2,),)

    def test_unsolvable(self):
        sys = MatrixEquationSystem()
        sys.add_unknown("g", 1, 1)
        sys.add_equation([(M([[2]]), "g", IntMatrix.identity(1))], M([[1]]))
        assert sys.solve() is None

    def test_kernel_sampling(self):
        sys = MatrixEquationSystem()
        sys.add_unknown("g", 1, 2)
        sys.add_equation([(IntMatrix.identity(1), "g", M([[1], [1]]))], M([[0]]))
        sol = sys.solve_with_kernel()
        assert sol is not None
        part, basis = sol
        assert part["g"].mul(M([[1], [1]])).is_zero()
        assert basis
        for b in basis:
            assert b["g"].mul(M([[1], [1]])).is_zero()

    def test_vec_kron_identity(self):
        rng = random.Random(3)
        for _ in range(20):
            l = M([[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)])
            x = M([[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)])
            r = M([[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)])
            lhs = vec(l.mul(x).mul(r))
            rhs = kron(r.transpose(), l).mul(vec(x))
            assert lhs.entries == rhs.entries
            assert unvec(vec(x), 2, 2).entries == x.entries


def test_unimodular_inverse():
    rng = random.Random(9)
    for _ in range(30):
        a = M([[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)])
        u = smith_normal_form(a).U
        ui = unimodular_inverse(u)
        assert u.mul(ui).entries == IntMatrix.identity(3).entries
