import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posmat import factorizations as fz
from posmat import matrixlab as ml
from posmat.matrix import Matrix, identity
from posmat.numerics import HPReal, relative_error


def leibniz_det(A):
    n = A.rows
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = Fraction(sign)
        for i, p in enumerate(perm):
            term *= A[i, p]
        total += term
    return total


def adjugate_inverse(A):
    n = A.rows
    det = leibniz_det(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            keep_r = [r for r in range(n) if r != j]
            keep_c = [c for c in range(n) if c != i]
            row.append((-1) ** (i + j) * leibniz_det(A.submatrix(keep_r, keep_c)) / det)
        out.append(row)
    return Matrix(out)


def small_matrices(n_max=4):
    return st.integers(1, n_max).flatmap(
        lambda n: st.lists(
            st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=6), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    ).map(Matrix)


class TestDeterminant:
    @given(small_matrices())
    @settings(max_examples=80)
    def test_bareiss_vs_leibniz(self, A):
        assert fz.bareiss_det(A) == leibniz_det(A)

    def test_zero_pivot_needs_row_swap(self):
        assert fz.bareiss_det(Matrix([[0, 1], [1, 0]])) == -1

    def test_singular(self):
        assert fz.bareiss_det(ml.ones(3)) == 0

    def test_det_hp_matches_exact(self):
        A = ml.cauchy_matrix(5)
        exact = fz.bareiss_det(A)
        assert float(relative_error(fz.det_hp(A.to_hp(128)), exact)) < 2.0**-100

    def test_beta_det_small(self):
        assert [fz.bareiss_det(ml.beta_matrix(n)) for n in range(1, 6)] == [1, 2, 6, 24, 120]


class TestInverse:
    @given(small_matrices(3))
    @settings(max_examples=60)
    def test_vs_adjugate(self, A):
        if leibniz_det(A) == 0:
            with pytest.raises(fz.SingularMatrixError):
                fz.exact_inverse(A)
        else:
            assert fz.exact_inverse(A) == adjugate_inverse(A)

    @pytest.mark.parametrize("n", range(1, 6))
    def test_beta_inverse_vs_adjugate(self, n):
        assert fz.beta_inverse_closed(n) == adjugate_inverse(ml.beta_matrix(n))

    def test_singular_reports_stage(self):
        with pytest.raises(fz.SingularMatrixError) as exc:
            fz.exact_inverse(ml.ones(3))
        assert exc.value.stage is not None


class TestCharpoly:
    @given(small_matrices(4))
    @settings(max_examples=50)
    def test_constant_term_and_trace(self, A):
        c = fz.characteristic_polynomial(A)
        n = A.rows
        assert c[0] == 1
        assert c[1] == -sum(A[i, i] for i in range(n))
        assert c[n] == (-1) ** n * leibniz_det(A)

    def test_cayley_hamilton(self):
        A = ml.bell_matrix(4)
        c = fz.characteristic_polynomial(A)
        acc = Matrix([[0] * 4 for _ in range(4)])
        P = identity(4)
        for coeff in reversed(c):
            acc = acc + P.scale(coeff)
            P = P @ A
        assert acc == Matrix([[0] * 4 for _ in range(4)])


class TestLDL:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_beta_closed_matches_algorithm(self, n):
        F = fz.beta_ldl_closed(n)
        G = fz.sym_congruence_ldl(ml.beta_matrix(n))
        assert F.compose() == ml.beta_matrix(n)
        assert F.Z == G.Z and F.d == G.d

    def test_beta_z_is_binomial(self):
        Z = fz.beta_ldl_closed(4).Z
        assert Z.tolist() == [[math.comb(i, j) for j in range(1, 5)] for i in range(1, 5)]

    @pytest.mark.parametrize("n", range(1, 9))
    def test_bell_closed(self, n):
        F = fz.bell_ldl_closed(n)
        assert F.compose() == ml.bell_matrix(n)
        assert F == fz.sym_congruence_ldl(ml.bell_matrix(n))

    def test_bell4_pieces(self):
        F = fz.sym_congruence_ldl(ml.bell_matrix(4))
        assert F.d == (1, 1, 2, 6)
        assert F.Z == ml.bell_triangle_matrix(4)

    def test_zero_leading_minor(self):
        with pytest.raises(fz.FactorizationError) as exc:
            fz.sym_congruence_ldl(Matrix([[1, 1, 0], [1, 1, 0], [0, 0, 1]]))
        assert exc.value.stage == 2

    def test_nonsymmetric_rejected(self):
        with pytest.raises(ValueError):
            fz.sym_congruence_ldl(Matrix([[1, 2], [3, 4]]))

    def test_cholesky_factor(self):
        F = fz.beta_ldl_closed(3)
        Lc = F.cholesky_factor(128)
        P = Lc @ Lc.T
        for i in range(3):
            for j in range(3):
                assert float(relative_error(P[i, j], ml.beta_matrix(3)[i, j])) < 2.0**-120


class TestBidiagonal:
    def test_factor_matrices(self):
        assert fz.L(3, 5).matrix(3).tolist() == [[1, 0, 0], [0, 1, 0], [0, 5, 1]]
        assert fz.U(2, 7).matrix(3).tolist() == [[1, 7, 0], [0, 1, 0], [0, 0, 1]]

    def test_inverse(self):
        f = fz.L(2, Fraction(3, 2))
        assert f.matrix(3) @ f.inverse().matrix(3) == identity(3)

    def test_index_validation(self):
        with pytest.raises(ValueError):
            fz.L(1, 2)

    def test_apply_factors_vs_product(self):
        fs = [fz.L(3, 2), fz.L(2, 5), fz.U(3, -1)]
        A = ml.bell_matrix(3)
        direct = fs[0].matrix(3) @ fs[1].matrix(3) @ fs[2].matrix(3) @ A
        assert fz.apply_factors(fs, A) == direct


class TestNeville:
    @pytest.mark.parametrize("n", range(2, 9))
    def test_beta_against_closed_form(self, n):
        assert fz.neville_seb(ml.beta_matrix(n)) == fz.beta_seb_closed(n)

    def test_factor_counts(self):
        F = fz.neville_seb(ml.bell_matrix(5))
        assert len(F.lower) == len(F.upper) == 10

    @pytest.mark.parametrize(
        "A",
        [ml.bell_matrix(5), ml.pascal_matrix(4), ml.cauchy_matrix(5), ml.symmetrized_stirling(ml.SECOND, 5),
         Matrix([[2, 1, 4], [1, 3, 0], [7, 2, 5]])],
    )
    def test_round_trip(self, A):
        assert fz.seb_compose(fz.neville_seb(A)) == A.with_offset(1)

    @given(small_matrices(4))
    @settings(max_examples=60)
    def test_round_trip_random(self, A):
        try:
            F = fz.neville_seb(A)
        except fz.FactorizationError:
            return
        assert fz.seb_compose(F) == A

    def test_tn_matrix_has_nonnegative_params(self):
        F = fz.neville_seb(ml.bell_matrix(5))
        assert all(p >= 0 for p in F.params()) and all(d > 0 for d in F.diagonal)

    def test_negative_params_are_reported(self):
        F = fz.neville_seb(Matrix([[1, 2], [3, 4]]))
        assert F.lower[0].param == 3 and F.diagonal == (1, -2)

    def test_zero_pivot_raises(self):
        with pytest.raises(fz.FactorizationError):
            fz.neville_seb(Matrix([[1, 0, 0], [0, 0, 1], [0, 1, 0]]))

    def test_identity_trims_to_empty(self):
        F = fz.neville_seb(identity(3)).trimmed()
        assert F.lower == () and F.upper == () and F.diagonal == (1, 1, 1)

    def test_beta_lower_half_is_binomial(self):
        n = 6
        Lp = fz.beta_seb_closed(n).lower_product()
        assert Lp.tolist() == [[math.comb(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]

    def test_json_round_trip(self):
        F = fz.neville_seb(ml.cauchy_matrix(4))
        assert fz.SEBFactorization.from_dict(F.to_dict()) == F

    def test_json_shape(self):
        d = fz.beta_seb_closed(2).to_dict()
        assert d == {"lower": [{"i": 2, "param": "2/1"}], "diag": ["1/1", "2/1"], "upper": [{"i": 2, "param": "2/1"}]}


class TestClosedForms:
    @pytest.mark.parametrize("n", range(3, 9))
    def test_yk_recursion(self, n):
        for k in range(1, n - 1):
            G = fz.calL_group(n, k)
            assert fz.apply_factors(G, fz.y_k(n, k)) == fz.y_k(n, k + 1)

    def test_yk_bounds(self):
        with pytest.raises(ValueError):
            fz.y_k(4, 4)

    @pytest.mark.parametrize("n", range(2, 11))
    def test_stirling_first(self, n):
        F = fz.stirling_first_seb_closed(n)
        S = ml.stirling_matrix(ml.FIRST, n)
        assert fz.seb_compose(F) == S
        assert fz.apply_factors(fz.inverse_lower_sequence(F), S) == identity(n)

    @pytest.mark.parametrize("n", range(2, 8))
    def test_stirling_first_matches_neville_after_trim(self, n):
        assert fz.neville_seb(ml.stirling_matrix(ml.FIRST, n)).trimmed() == fz.stirling_first_seb_closed(n).trimmed()


def test_hp_entries_in_factor_json():
    F = fz.SEBFactorization((fz.L(2, HPReal("0.5")),), (Fraction(1), Fraction(1)), ())
    assert F.to_dict()["lower"][0]["param"].startswith("0.5")
