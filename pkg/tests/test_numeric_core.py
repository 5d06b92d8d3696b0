import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    counterexample_family,
    family_one,
    random_sym,
    EX1_A1,
    EX1_A2,
    EX1_A3,
    EX2_A1,
    EX2_A2,
    EX2_A3,
)
from yuancert import (
    DegenerateBasisError,
    InputError,
    MatrixFamily,
    NotInSpanError,
    SymMatrix,
    express_in_basis,
    is_psd,
    matrix_set_rank,
    min_eigenvalue,
    numerical_rank,
    quad_form,
    sym_eigen,
)

# eigenvalues of [[0.4, -0.6], [-0.6, 1.0]] from its characteristic
# polynomial lam^2 - 1.4 lam + 0.04 = 0, solved by hand
LAM_LO = (1.4 - math.sqrt(1.8)) / 2.0
LAM_HI = (1.4 + math.sqrt(1.8)) / 2.0
M_DERIVED = np.array([[0.4, -0.6], [-0.6, 1.0]])


class TestSymMatrix:
    def test_mirror_is_exact(self):
        m = SymMatrix([[1.0, 2.0 + 1e-13], [2.0, 3.0]])
        assert m.entries[0, 1] == m.entries[1, 0]

    def test_rejects_asymmetric(self):
        with pytest.raises(InputError):
            SymMatrix([[1.0, 2.0], [0.5, 3.0]])

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            SymMatrix([[np.nan, 0.0], [0.0, 1.0]])

    def test_rejects_non_square(self):
        with pytest.raises(InputError):
            SymMatrix([[1.0, 2.0, 3.0]])

    def test_entries_read_only(self):
        m = SymMatrix(np.eye(2))
        with pytest.raises(ValueError):
            m.entries[0, 0] = 5.0


class TestSymEigen:
    def test_identity(self):
        spec = sym_eigen(SymMatrix(np.eye(2)))
        np.testing.assert_allclose(spec.eigenvalues, [1.0, 1.0])
        np.testing.assert_allclose(spec.basis.T @ spec.basis, np.eye(2), atol=1e-12)

    def test_already_diagonal(self):
        spec = sym_eigen(SymMatrix(np.diag([-1.0, 1.0])))
        np.testing.assert_allclose(spec.eigenvalues, [-1.0, 1.0])
        np.testing.assert_allclose(np.abs(spec.basis), np.eye(2), atol=1e-12)

    def test_derived_two_by_two(self):
        spec = sym_eigen(SymMatrix(M_DERIVED))
        np.testing.assert_allclose(spec.eigenvalues, [LAM_LO, LAM_HI], atol=1e-12)

    def test_deterministic(self):
        m = SymMatrix(M_DERIVED)
        s1 = sym_eigen(m)
        s2 = sym_eigen(m)
        assert np.array_equal(s1.eigenvalues, s2.eigenvalues)
        assert np.array_equal(s1.basis, s2.basis)

    def test_reconstruction_random(self):
        rng = np.random.default_rng(0)
        for _ in range(60):
            n = int(rng.integers(1, 9))
            m = random_sym(rng, n, scale=float(rng.uniform(0.1, 10.0)))
            spec = sym_eigen(m)
            scale = 1.0 + m.norm_max()
            recon = spec.basis @ np.diag(spec.eigenvalues) @ spec.basis.T
            assert np.abs(recon - m.entries).max() <= 1e-9 * scale
            assert np.abs(spec.basis.T @ spec.basis - np.eye(n)).max() <= 1e-10
            assert (np.diff(spec.eigenvalues) >= 0).all()

    def test_rayleigh_bound(self):
        rng = np.random.default_rng(1)
        for _ in range(40):
            n = int(rng.integers(1, 9))
            m = random_sym(rng, n)
            lam = min_eigenvalue(m)
            scale = 1.0 + m.norm_max()
            for _ in range(5):
                x = rng.standard_normal(n)
                x /= np.linalg.norm(x)
                assert quad_form(m, x) >= lam - 1e-9 * scale


class TestMinEigenvalue:
    def test_zero_matrix(self):
        assert min_eigenvalue(SymMatrix(np.zeros((3, 3)))) == 0.0

    def test_negative_identity(self):
        assert min_eigenvalue(SymMatrix(-np.eye(3))) == pytest.approx(-1.0, abs=1e-12)

    def test_derived(self):
        assert min_eigenvalue(SymMatrix(M_DERIVED)) == pytest.approx(LAM_LO, abs=1e-9)


class TestIsPsd:
    def test_zero_matrix(self):
        assert is_psd(SymMatrix(np.zeros((2, 2)))).psd

    def test_negative_identity_witness(self):
        verdict = is_psd(SymMatrix(-np.eye(2)))
        assert not verdict.psd
        assert verdict.value == pytest.approx(-1.0, abs=1e-12)
        assert quad_form(SymMatrix(-np.eye(2)), verdict.witness) == pytest.approx(-1.0, abs=1e-12)
        assert np.linalg.norm(verdict.witness) == pytest.approx(1.0, abs=1e-12)

    def test_derived_psd(self):
        assert is_psd(SymMatrix(M_DERIVED)).psd

    def test_negative_tol_rejected(self):
        with pytest.raises(InputError):
            is_psd(SymMatrix(np.eye(2)), tol=-1.0)


class TestQuadForm:
    def test_identity(self):
        assert quad_form(SymMatrix(np.eye(2)), [3.0, 4.0]) == pytest.approx(25.0)

    def test_example_two_values(self):
        x = [1.0, -0.3]
        assert quad_form(SymMatrix(EX2_A1), x) == pytest.approx(-0.91, abs=1e-12)
        assert quad_form(SymMatrix(EX2_A2), x) == pytest.approx(-0.38, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            quad_form(SymMatrix(np.eye(2)), [1.0, 2.0, 3.0])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-10, 10), min_size=2, max_size=2))
    def test_even_in_sign(self, x):
        m = SymMatrix(M_DERIVED)
        assert quad_form(m, x) == quad_form(m, [-v for v in x])


class TestMatrixSetRank:
    def test_example_one(self):
        result = matrix_set_rank(family_one())
        assert result.rank == 2
        assert result.basis == (0, 1)
        np.testing.assert_allclose(result.coefficients[2], [2.0, -1.0], atol=1e-9)

    def test_zero_family(self):
        assert matrix_set_rank(MatrixFamily([np.zeros((2, 2)), np.zeros((2, 2))])).rank == 0

    def test_counterexample_rank_three(self):
        assert matrix_set_rank(counterexample_family()).rank == 3

    def test_permutation_invariant(self):
        rng = np.random.default_rng(2)
        fam = family_one()
        for _ in range(5):
            perm = rng.permutation(3)
            shuffled = MatrixFamily([fam.members[i] for i in perm])
            assert matrix_set_rank(shuffled).rank == 2

    def test_scaling_invariant(self):
        for factor in (1e-6, -3.0, 1e6):
            fam = MatrixFamily([EX1_A1 * factor, EX1_A2, EX1_A3])
            assert matrix_set_rank(fam).rank == 2

    def test_mixed_orders_rejected(self):
        with pytest.raises(InputError):
            MatrixFamily([np.eye(2), np.eye(3)])


class TestExpressInBasis:
    def test_example_one(self):
        alpha, beta = express_in_basis(SymMatrix(EX1_A3), SymMatrix(EX1_A1), SymMatrix(EX1_A2))
        assert alpha == pytest.approx(2.0, abs=1e-9)
        assert beta == pytest.approx(-1.0, abs=1e-9)

    def test_example_two(self):
        alpha, beta = express_in_basis(SymMatrix(EX2_A3), SymMatrix(EX2_A1), SymMatrix(EX2_A2))
        assert alpha == pytest.approx(-1.0, abs=1e-9)
        assert beta == pytest.approx(-1.0, abs=1e-9)

    def test_basis_member_itself(self):
        alpha, beta = express_in_basis(SymMatrix(EX1_A1), SymMatrix(EX1_A1), SymMatrix(EX1_A2))
        assert alpha == pytest.approx(1.0, abs=1e-12)
        assert beta == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_basis(self):
        with pytest.raises(DegenerateBasisError):
            express_in_basis(SymMatrix(EX1_A1), SymMatrix(EX1_A2), SymMatrix(2.0 * EX1_A2))

    def test_not_in_span(self):
        with pytest.raises(NotInSpanError):
            express_in_basis(
                SymMatrix(np.diag([1.0, 0.0, 0.0])),
                SymMatrix(np.diag([0.0, 1.0, 0.0])),
                SymMatrix(np.diag([0.0, 0.0, 1.0])),
            )

    def test_roundtrip_random(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            n = int(rng.integers(2, 6))
            b1 = random_sym(rng, n)
            b2 = random_sym(rng, n)
            alpha, beta = rng.standard_normal(2) * 3.0
            target = SymMatrix(alpha * b1.entries + beta * b2.entries)
            got_a, got_b = express_in_basis(target, b1, b2)
            recon = got_a * b1.entries + got_b * b2.entries
            assert np.abs(recon - target.entries).max() <= 1e-9 * (1.0 + target.norm_max())


class TestNumericalRank:
    def test_counterexample_jacobian_columns(self):
        # flattened by hand: (1,0,0,0), (1,0,0,1), (1,0,1,0) are independent
        cols = np.array([[1.0, 0, 0, 0], [1, 0, 0, 1], [1, 0, 1, 0]]).T
        assert numerical_rank(cols) == 3

    def test_zero(self):
        assert numerical_rank(np.zeros((3, 2))) == 0
