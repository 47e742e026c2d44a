from math import factorial

import numpy as np
import pytest

from kronstats import (
    CumulantDelta,
    CumulantSet,
    KronVector,
    MomentSet,
    ShapeError,
    alpha_from_delta,
    cumulant_delta,
    cumulants_from_moments,
    delta_from_alpha,
    evaluate_moment_table,
    gaussian_cumulants,
    kron_product,
    load_moment_table,
    moments_from_cumulants,
    symmetrize,
    transform_cumulants,
)

from oracles import (
    scalar_cumulants_from_moments,
    scalar_moments_from_cumulants,
    series_exp_coefficients,
    set_partitions,
)


def random_cumulants(rng, dim, kmax):
    return CumulantSet(
        dim,
        kmax,
        {k: symmetrize(KronVector(dim, k, rng.normal(size=dim**k))) for k in range(1, kmax + 1)},
    )


def scalar_set(values, cls=CumulantSet):
    kmax = len(values)
    return cls(1, kmax, {k: KronVector(1, k, [float(values[k - 1])]) for k in range(1, kmax + 1)})


class TestUnivariate:
    def test_exponential_moments(self):
        c = scalar_set([factorial(k - 1) for k in range(1, 7)])
        m = moments_from_cumulants(c)
        for k in range(1, 7):
            assert m[k].data[0] == pytest.approx(factorial(k), rel=1e-12)

    def test_exponential_cumulants(self):
        m = scalar_set([factorial(k) for k in range(1, 7)], cls=MomentSet)
        c = cumulants_from_moments(m)
        for k in range(1, 7):
            assert c[k].data[0] == pytest.approx(factorial(k - 1), rel=1e-12)

    def test_standard_normal_moments_to_cumulants(self):
        m = scalar_set([0.0, 1.0, 0.0, 3.0], cls=MomentSet)
        c = cumulants_from_moments(m)
        np.testing.assert_allclose(
            [c[k].data[0] for k in range(1, 5)], [0.0, 1.0, 0.0, 0.0], atol=1e-14
        )

    def test_matches_scalar_recursion(self):
        rng = np.random.default_rng(101)
        values = rng.normal(size=6)
        c = scalar_set(values)
        m = moments_from_cumulants(c)
        oracle = scalar_moments_from_cumulants(list(values))
        np.testing.assert_allclose(
            [m[k].data[0] for k in range(1, 7)], oracle, rtol=1e-12, atol=1e-12
        )
        back = cumulants_from_moments(m)
        oracle_c = scalar_cumulants_from_moments(oracle)
        np.testing.assert_allclose(
            [back[k].data[0] for k in range(1, 7)], oracle_c, rtol=1e-10, atol=1e-12
        )

    def test_generating_function_composition(self):
        # coefficients of exp(sum c_k t^k / k!) are the moments
        rng = np.random.default_rng(103)
        values = rng.normal(size=6) * 0.8
        coeffs = series_exp_coefficients(list(values), 6)
        m = moments_from_cumulants(scalar_set(values))
        np.testing.assert_allclose(
            [m[k].data[0] for k in range(1, 7)], coeffs[1:], rtol=1e-10, atol=1e-12
        )


class TestGoldenTable:
    def test_table_matches_partition_enumeration(self):
        from collections import Counter

        table = load_moment_table()
        for k in range(1, 7):
            counts = Counter()
            for part in set_partitions(list(range(k))):
                sizes = tuple(sorted((len(b) for b in part), reverse=True))
                counts[sizes] += 1
            entries = {tuple(orders): coeff for coeff, orders in table[k]}
            assert entries == {sizes: n for sizes, n in counts.items()}

    def test_order6_term_uses_three_first_order_factors(self):
        table = load_moment_table()
        orders_with_3 = [orders for _, orders in table[6] if orders[0] == 3 and len(orders) > 1]
        assert [3, 1, 1, 1] in orders_with_3
        assert all(sum(orders) == 6 for _, orders in table[6])

    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_recursion_equals_table(self, dim):
        rng = np.random.default_rng(200 + dim)
        for _ in range(5):
            c = random_cumulants(rng, dim, 6)
            rec = moments_from_cumulants(c)
            tab = evaluate_moment_table(c)
            for k in range(1, 7):
                scale = np.max(np.abs(tab[k].data))
                np.testing.assert_allclose(
                    rec[k].data, tab[k].data, rtol=0, atol=1e-10 * max(scale, 1.0)
                )


class TestRoundtrip:
    @pytest.mark.parametrize("dim,kmax", [(1, 6), (2, 5), (2, 6), (3, 4)])
    def test_roundtrip_identity(self, dim, kmax):
        rng = np.random.default_rng(dim * 10 + kmax)
        for _ in range(5):
            c = random_cumulants(rng, dim, kmax)
            back = cumulants_from_moments(moments_from_cumulants(c))
            for k in range(1, kmax + 1):
                scale = max(np.max(np.abs(c[k].data)), 1.0)
                np.testing.assert_allclose(
                    back[k].data, c[k].data, rtol=0, atol=1e-10 * scale
                )

    def test_moment_outputs_are_symmetric(self):
        rng = np.random.default_rng(55)
        c = random_cumulants(rng, 2, 5)
        m = moments_from_cumulants(c)
        for k in range(1, 6):
            np.testing.assert_allclose(
                symmetrize(m[k]).data, m[k].data, rtol=0, atol=1e-12
            )


class TestDeltaAndAlpha:
    def test_zero_delta(self):
        c = scalar_set([0.1, 1.0, 0.3, 0.2])
        d = cumulant_delta(c, c)
        assert all(np.all(d[k].data == 0.0) for k in range(1, 5))
        a = alpha_from_delta(d)
        assert a[0].data[0] == 1.0
        assert all(np.all(a[k].data == 0.0) for k in range(1, 5))

    def test_matched_gaussian_reference_zeroes_low_orders(self):
        c = scalar_set([0.4, 2.0, 1.1, 0.7])
        ref = gaussian_cumulants([0.4], [[2.0]], 4)
        d = cumulant_delta(c, ref)
        assert d[1].data[0] == pytest.approx(0.0, abs=1e-15)
        assert d[2].data[0] == pytest.approx(0.0, abs=1e-15)
        assert d[3].data[0] == pytest.approx(1.1)
        assert d[4].data[0] == pytest.approx(0.7)

    def test_subtraction_example(self):
        c = scalar_set([0.0, 1.0, 2.0])
        ref = scalar_set([0.0, 1.0, 0.0])
        d = cumulant_delta(c, ref)
        np.testing.assert_allclose([d[k].data[0] for k in (1, 2, 3)], [0.0, 0.0, 2.0])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            cumulant_delta(scalar_set([0.0, 1.0]), scalar_set([0.0, 1.0, 0.0]))

    def test_single_first_order_delta_gives_powers(self):
        vecs = {k: KronVector.zeros(1, k) for k in range(1, 6)}
        vecs[1] = KronVector(1, 1, [0.7])
        a = alpha_from_delta(CumulantDelta(1, 5, vecs))
        for k in range(6):
            assert a[k].data[0] == pytest.approx(0.7**k, rel=1e-12)

    def test_alpha6_composite(self):
        rng = np.random.default_rng(77)
        d3 = symmetrize(KronVector(2, 3, rng.normal(size=8)))
        d6 = symmetrize(KronVector(2, 6, rng.normal(size=64)))
        vecs = {k: KronVector.zeros(2, k) for k in range(1, 7)}
        vecs[3], vecs[6] = d3, d6
        a = alpha_from_delta(CumulantDelta(2, 6, vecs))
        expected = d6.data + 10.0 * symmetrize(kron_product(d3, d3)).data
        np.testing.assert_allclose(a[6].data, expected, rtol=1e-12, atol=1e-13)
        for k in (3, 4, 5):
            np.testing.assert_allclose(a[k].data, vecs[k].data, atol=1e-15)

    def test_alpha_recursion_is_moment_recursion(self):
        # feeding the same numbers through both paths gives identical output
        rng = np.random.default_rng(88)
        vecs = {k: symmetrize(KronVector(2, k, rng.normal(size=2**k))) for k in range(1, 6)}
        as_delta = CumulantDelta(2, 5, dict(vecs))
        as_cumulants = CumulantSet(2, 5, dict(vecs))
        a = alpha_from_delta(as_delta)
        m = moments_from_cumulants(as_cumulants)
        for k in range(1, 6):
            np.testing.assert_array_equal(a[k].data, m[k].data)

    def test_delta_from_alpha_inverts(self):
        rng = np.random.default_rng(99)
        vecs = {k: symmetrize(KronVector(2, k, rng.normal(size=2**k))) for k in range(1, 5)}
        delta = CumulantDelta(2, 4, vecs)
        back = delta_from_alpha(alpha_from_delta(delta))
        for k in range(1, 5):
            np.testing.assert_allclose(back[k].data, delta[k].data, rtol=0, atol=1e-11)


class TestIngestionAndSerialization:
    def test_asymmetric_input_warns_and_symmetrizes(self):
        raw = np.array([0.0, 1.0, 0.0, 0.0])  # e1 (x) e2 is not symmetric
        with pytest.warns(UserWarning, match="symmetrization residual"):
            c = CumulantSet(2, 2, {1: KronVector(2, 1, [0.0, 0.0]), 2: KronVector(2, 2, raw)})
        np.testing.assert_allclose(c[2].data, [0.0, 0.5, 0.5, 0.0])

    def test_missing_order_rejected(self):
        with pytest.raises(ShapeError, match="missing order"):
            CumulantSet(1, 3, {1: KronVector(1, 1, [0.0]), 3: KronVector(1, 3, [1.0])})

    def test_json_roundtrip(self):
        rng = np.random.default_rng(111)
        c = random_cumulants(rng, 2, 4)
        c2 = CumulantSet.from_json(c.to_json())
        for k in range(1, 5):
            np.testing.assert_array_equal(c2[k].data, c[k].data)

    def test_kind_mismatch_rejected(self):
        c = scalar_set([0.0, 1.0])
        with pytest.raises(ShapeError, match="kind"):
            MomentSet.from_dict(c.to_dict())

    def test_order_cap(self):
        with pytest.raises(ShapeError):
            CumulantSet(1, 11, {k: KronVector(1, k, [0.0]) for k in range(1, 12)})


class TestTransforms:
    def test_affine_pushforward_of_gaussian(self):
        rng = np.random.default_rng(121)
        mean = rng.normal(size=2)
        cov = np.array([[1.5, 0.4], [0.4, 0.9]])
        a = rng.normal(size=(2, 2)) + 2 * np.eye(2)
        b = rng.normal(size=2)
        pushed = transform_cumulants(gaussian_cumulants(mean, cov, 4), a, b)
        direct = gaussian_cumulants(a @ mean + b, a @ cov @ a.T, 4)
        for k in range(1, 5):
            np.testing.assert_allclose(pushed[k].data, direct[k].data, rtol=1e-12, atol=1e-13)

    def test_covariance_matrix_is_symmetric_psd_from_data_like_input(self):
        rng = np.random.default_rng(131)
        x = rng.normal(size=(500, 2))
        cov = x.T @ x / 500
        c = gaussian_cumulants(np.zeros(2), cov, 2)
        mat = c.covariance()
        np.testing.assert_allclose(mat, mat.T)
        assert np.all(np.linalg.eigvalsh(mat) > 0)
