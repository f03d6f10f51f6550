import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import imc_naive, pearson_direct
from sdsc.datagen import SubspaceSpec, generate, normalize_columns
from sdsc.errors import ValidationError
from sdsc.imc import CoefficientMatrix, affinity_max, affinity_sum, imc_coefficients, pearson


class TestPearson:
    def test_perfect_positive(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)

    def test_perfect_negative(self):
        assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_half(self):
        sxy, sxx, syy = pearson_direct([1, 2, 3], [1, 3, 2])
        assert sxy / (sxx * syy) == pytest.approx(0.5)  # oracle agrees with the hand value
        assert pearson([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5, abs=1e-15)

    def test_constant_is_undefined(self):
        assert math.isnan(pearson([1, 1, 1], [1, 2, 3]))
        assert math.isnan(pearson([0.1, 0.1, 0.1], [1, 2, 3]))

    def test_preconditions(self):
        with pytest.raises(ValidationError):
            pearson([1], [2])
        with pytest.raises(ValidationError):
            pearson([1, 2], [1, 2, 3])
        with pytest.raises(ValidationError):
            pearson([1, np.inf], [1, 2])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-100, 100), min_size=2, max_size=12), st.floats(0.1, 10),
           st.floats(-5, 5))
    def test_affine_invariance(self, xs, a, b):
        x = np.array(xs)
        r = pearson(x, a * x + b)
        if not math.isnan(r):
            assert r == pytest.approx(1.0, abs=1e-9)


def random_unit(rng, D, N):
    return normalize_columns(rng.standard_normal((D, N)))


class TestImc:
    def test_identical_point_selected(self, rng):
        X = random_unit(rng, 6, 7)
        X[:, 1] = X[:, 0]
        C = imc_coefficients(X, 1)
        idx, val = C.column(0)
        assert idx.tolist() == [1]
        assert val[0] == pytest.approx(1.0, abs=1e-12)
        psi = X[:, 0] - (X[:, 0] @ X[:, 1]) * X[:, 1]
        assert abs(psi @ X[:, 1]) < 1e-12

    @pytest.mark.parametrize("gamma", [1, 2, 3, 5])
    def test_budget_and_zero_diagonal(self, rng, gamma):
        X = random_unit(rng, 5, 12)
        C = imc_coefficients(X, gamma)
        dense = C.to_dense()
        assert np.all(np.diag(dense) == 0)
        assert np.all(np.count_nonzero(dense, axis=0) <= gamma)
        assert np.all((dense >= 0) & (dense <= 1))

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(0)
        X = random_unit(rng, 5, 8)
        C = imc_coefficients(X, 2)
        C_ref, picks = imc_naive(X, 2)
        for i in range(8):
            assert C.column(i)[0].tolist() == picks[i]
        assert np.max(np.abs(C.to_dense() - C_ref)) <= 1e-12

    def test_no_duplicates_and_residual_monotone(self, rng):
        X = random_unit(rng, 8, 30)
        C = imc_coefficients(X, 6)
        for i in range(30):
            idx, _ = C.column(i)
            assert len(set(idx.tolist())) == idx.size
            psi = X[:, i].copy()
            prev = np.linalg.norm(psi)
            for j in idx:
                psi = psi - (psi @ X[:, j]) * X[:, j]
                cur = np.linalg.norm(psi)
                assert cur <= prev + 1e-15
                prev = cur

    def test_scale_invariance_of_selection(self, rng):
        raw = rng.standard_normal((7, 15))
        scaled = raw * rng.uniform(0.1, 10.0, size=15)
        a = imc_coefficients(normalize_columns(raw), 3)
        b = imc_coefficients(normalize_columns(scaled), 3)
        assert np.array_equal(a.indices, b.indices)

    def test_parallel_matches_sequential(self, rng):
        X = random_unit(rng, 10, 90)
        a = imc_coefficients(X, 4, n_jobs=1, block_size=7)
        b = imc_coefficients(X, 4, n_jobs=3, block_size=7)
        c = imc_coefficients(X, 4)
        assert np.array_equal(a.indices, b.indices) and np.array_equal(a.indices, c.indices)
        assert np.array_equal(a.values, b.values)

    def test_validation(self, rng):
        X = random_unit(rng, 4, 5)
        with pytest.raises(ValidationError):
            imc_coefficients(X, 5)
        with pytest.raises(ValidationError):
            imc_coefficients(X, 0)
        with pytest.raises(ValidationError):
            imc_coefficients(X * 2.0, 1)
        with pytest.raises(ValidationError):
            imc_coefficients(X[:, :1], 1)

    def test_undefined_candidates_leave_short_column(self):
        # all other points are constant vectors: every correlation is undefined
        X = normalize_columns(np.array([[1.0, 1.0, 1.0], [2.0, 1.0, 1.0], [3.0, 1.0, 1.0]]))
        C = imc_coefficients(X, 2)
        assert C.column(0)[0].size == 0
        assert C.short_columns == 3

    def test_subspace_preserving_tendency(self):
        fracs = []
        for seed in range(10):
            data = generate(SubspaceSpec(5, 30, 3, 40, 0.0, seed))
            C = imc_coefficients(data, 3)
            own = np.repeat(data.labels, 3)
            sel = C.indices.ravel()
            ok = sel >= 0
            fracs.append(np.mean(data.labels[sel[ok]] == own[ok]))
        assert np.mean(fracs) >= 0.9


class TestAffinity:
    def test_max_rule(self):
        C = np.zeros((3, 3))
        C[0, 1], C[1, 0] = 0.5, 0.9
        W = affinity_max(C)
        assert W.get(0, 1) == W.get(1, 0) == 0.9

    def test_sum_rule(self):
        C = np.zeros((3, 3))
        C[0, 1], C[1, 0] = 0.5, 0.9
        assert affinity_sum(C).get(0, 1) == pytest.approx(1.4)

    def test_zero(self):
        assert affinity_max(np.zeros((4, 4))).nnz == 0
        assert affinity_sum(np.zeros((4, 4))).nnz == 0

    def test_one_sided(self):
        C = np.zeros((3, 3))
        C[0, 1] = 0.7
        assert affinity_max(C).get(1, 0) == 0.7 == affinity_sum(C).get(1, 0)
        C = np.triu(np.random.default_rng(1).random((5, 5)), 1)
        assert np.array_equal(affinity_max(C).to_dense(), C + C.T)

    def test_from_coefficient_matrix(self, rng):
        X = random_unit(rng, 6, 20)
        C = imc_coefficients(X, 3)
        dense = C.to_dense()
        assert np.array_equal(affinity_max(C).to_dense(), np.maximum(dense, dense.T))
        assert isinstance(CoefficientMatrix.from_dense(dense), CoefficientMatrix)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_max_le_sum(self, seed):
        r = np.random.default_rng(seed)
        C = r.random((8, 8)) * (r.random((8, 8)) < 0.4)
        np.fill_diagonal(C, 0)
        wm = affinity_max(C).to_dense()
        ws = affinity_sum(C).to_dense()
        assert np.all(wm <= ws + 1e-15)
        eq = np.minimum(C, C.T) == 0
        assert np.allclose(wm[eq], ws[eq])
        assert np.all(wm[~eq] < ws[~eq])
