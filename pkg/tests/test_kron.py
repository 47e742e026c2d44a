import numpy as np
import pytest

from kronstats import (
    BudgetError,
    KronVector,
    ModePermutation,
    MultiIndex,
    ShapeError,
    kron_power,
    kron_product,
    multi_index_to_position,
    permute_modes,
    position_to_multi_index,
    symmetrize,
)


def kv(data, dim=None, order=None):
    data = np.asarray(data, dtype=float)
    if dim is None:
        dim = data.size
        order = 1
    return KronVector(dim, order, data)


class TestMultiIndexCodec:
    def test_row_major_examples(self):
        assert multi_index_to_position(MultiIndex(2, 2, (0, 1))) == 1
        assert multi_index_to_position(MultiIndex(3, 2, (2, 1))) == 7
        assert multi_index_to_position(MultiIndex(2, 0, ())) == 0

    def test_roundtrip_bijection(self):
        d, k = 3, 3
        seen = set()
        for pos in range(d**k):
            m = position_to_multi_index(d, k, pos)
            assert multi_index_to_position(m) == pos
            seen.add(m.indices)
        assert len(seen) == d**k

    def test_out_of_range_rejected(self):
        with pytest.raises(ShapeError):
            MultiIndex(2, 2, (0, 2))
        with pytest.raises(ShapeError):
            position_to_multi_index(2, 2, 4)

    def test_ordering_matches_kron_product(self):
        # left factor varies slowest: position of (i, j) indexes a[i] * b[j]
        a = kv([2.0, 3.0])
        b = kv([5.0, 7.0])
        prod = kron_product(a, b)
        for i in range(2):
            for j in range(2):
                pos = multi_index_to_position(MultiIndex(2, 2, (i, j)))
                assert prod.data[pos] == a.data[i] * b.data[j]


class TestKronVector:
    def test_length_must_match(self):
        with pytest.raises(ShapeError):
            KronVector(2, 2, [1.0, 2.0, 3.0])

    def test_rejects_non_finite(self):
        with pytest.raises(ShapeError):
            KronVector(2, 1, [np.nan, 1.0])
        with pytest.raises(ShapeError):
            KronVector(2, 1, [np.inf, 1.0])

    def test_order_zero_is_scalar(self):
        v = KronVector(5, 0, [3.0])
        assert v.size == 1

    def test_data_immutable(self):
        v = kv([1.0, 2.0])
        with pytest.raises(ValueError):
            v.data[0] = 9.0

    def test_json_roundtrip(self):
        v = KronVector(2, 3, np.arange(8.0))
        w = KronVector.from_json(v.to_json())
        assert w.dim == v.dim and w.order == v.order
        np.testing.assert_array_equal(w.data, v.data)


class TestKronProduct:
    def test_unit_vectors(self):
        out = kron_product(kv([1, 0]), kv([0, 1]))
        np.testing.assert_array_equal(out.data, [0, 1, 0, 0])

    def test_definition(self):
        out = kron_product(kv([1, 2]), kv([1, 2]))
        np.testing.assert_array_equal(out.data, [1, 2, 2, 4])

    def test_swap_relates_the_two_orders(self):
        rng = np.random.default_rng(7)
        a, b = kv(rng.normal(size=2)), kv(rng.normal(size=2))
        ab, ba = kron_product(a, b), kron_product(b, a)
        assert not np.allclose(ab.data, ba.data)
        swapped = permute_modes(ab, ModePermutation(2, (2, 1)))
        np.testing.assert_allclose(swapped.data, ba.data, rtol=0, atol=0)

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            kron_product(kv([1, 2]), kv([1, 2, 3]))

    def test_bilinearity(self):
        rng = np.random.default_rng(11)
        for d in (2, 3):
            for k in (1, 2, 4):
                a = KronVector(d, k, rng.normal(size=d**k))
                b = KronVector(d, k, rng.normal(size=d**k))
                c = KronVector(d, 2, rng.normal(size=d**2))
                alpha = rng.normal()
                lhs = kron_product(KronVector(d, k, alpha * a.data + b.data), c)
                rhs = alpha * kron_product(a, c).data + kron_product(b, c).data
                np.testing.assert_allclose(lhs.data, rhs, rtol=1e-12, atol=1e-14)

    def test_associativity_exact_on_integers(self):
        # float multiplication of small integers is exact, so grouping cannot matter
        rng = np.random.default_rng(13)
        a, b, c = (kv(rng.integers(-9, 9, size=3).astype(float)) for _ in range(3))
        left = kron_product(kron_product(a, b), c)
        right = kron_product(a, kron_product(b, c))
        np.testing.assert_array_equal(left.data, right.data)

    def test_associativity_to_rounding(self):
        rng = np.random.default_rng(13)
        a, b, c = (kv(rng.normal(size=3)) for _ in range(3))
        left = kron_product(kron_product(a, b), c)
        right = kron_product(a, kron_product(b, c))
        np.testing.assert_allclose(left.data, right.data, rtol=5e-16, atol=0)


class TestKronPower:
    def test_examples(self):
        np.testing.assert_array_equal(kron_power([1, 2], 2).data, [1, 2, 2, 4])
        np.testing.assert_array_equal(kron_power([5, 1], 0).data, [1])
        np.testing.assert_array_equal(kron_power([1, 1, 1], 3).data, np.ones(27))

    def test_power_splits_into_products(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=2)
        for j, k in ((1, 2), (2, 2), (0, 3)):
            combined = kron_power(x, j + k)
            split = kron_product(kron_power(x, j), kron_power(x, k))
            np.testing.assert_allclose(combined.data, split.data, rtol=5e-16, atol=0)
        # exact when the entry products round exactly
        ints = np.array([3.0, -2.0])
        np.testing.assert_array_equal(
            kron_power(ints, 4).data,
            kron_product(kron_power(ints, 1), kron_power(ints, 3)).data,
        )

    def test_budget_guard(self, monkeypatch):
        monkeypatch.setenv("KRON_BUDGET", "100")
        with pytest.raises(BudgetError):
            kron_power([1.0, 2.0, 3.0], 5)


class TestSymmetrize:
    def test_two_element_orbit(self):
        v = kron_product(kv([1, 0]), kv([0, 1]))
        np.testing.assert_allclose(symmetrize(v).data, [0, 0.5, 0.5, 0])

    def test_symmetric_fixed_point(self):
        rng = np.random.default_rng(5)
        v = KronVector(2, 3, rng.normal(size=8))
        s = symmetrize(v)
        np.testing.assert_allclose(symmetrize(s).data, s.data, rtol=1e-15, atol=1e-16)

    def test_kron_powers_are_symmetric(self):
        rng = np.random.default_rng(9)
        v = kron_power(rng.normal(size=3), 4)
        np.testing.assert_allclose(symmetrize(v).data, v.data, rtol=1e-12, atol=1e-14)

    def test_linear(self):
        rng = np.random.default_rng(17)
        a = KronVector(2, 3, rng.normal(size=8))
        b = KronVector(2, 3, rng.normal(size=8))
        lhs = symmetrize(KronVector(2, 3, 2.5 * a.data + b.data)).data
        rhs = 2.5 * symmetrize(a).data + symmetrize(b).data
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_equals_average_over_permutations(self, k):
        from itertools import permutations

        rng = np.random.default_rng(k)
        v = KronVector(2, k, rng.normal(size=2**k))
        acc = np.zeros(2**k)
        count = 0
        for perm in permutations(range(1, k + 1)):
            acc += permute_modes(v, ModePermutation(k, perm)).data
            count += 1
        np.testing.assert_allclose(symmetrize(v).data, acc / count, rtol=1e-12, atol=1e-14)

    def test_order_cap(self):
        with pytest.raises(BudgetError):
            symmetrize(KronVector(1, 11, [1.0]))


class TestPermuteModes:
    def test_reorders_product_factors(self):
        a, b, c = kv([1, 2]), kv([3, 4]), kv([5, 6])
        abc = kron_product(kron_product(a, b), c)
        acb = kron_product(kron_product(a, c), b)
        out = permute_modes(abc, ModePermutation(3, (1, 3, 2)))
        np.testing.assert_array_equal(out.data, acb.data)

    def test_identity_and_involution(self):
        rng = np.random.default_rng(23)
        v = KronVector(3, 2, rng.normal(size=9))
        np.testing.assert_array_equal(
            permute_modes(v, ModePermutation.identity(2)).data, v.data
        )
        swap = ModePermutation.swap(2, 1, 2)
        np.testing.assert_array_equal(
            permute_modes(permute_modes(v, swap), swap).data, v.data
        )

    def test_composition_law(self):
        rng = np.random.default_rng(29)
        v = KronVector(2, 4, rng.normal(size=16))
        p = ModePermutation(4, (2, 4, 1, 3))
        q = ModePermutation(4, (3, 1, 4, 2))
        seq = permute_modes(permute_modes(v, q), p)
        combined = permute_modes(v, p.compose(q))
        np.testing.assert_array_equal(seq.data, combined.data)

    def test_preserves_entry_multiset(self):
        rng = np.random.default_rng(31)
        v = KronVector(2, 3, rng.normal(size=8))
        out = permute_modes(v, ModePermutation(3, (3, 1, 2)))
        np.testing.assert_allclose(np.sort(out.data), np.sort(v.data))

    def test_order_mismatch(self):
        with pytest.raises(ShapeError):
            permute_modes(KronVector(2, 2, np.ones(4)), ModePermutation(3, (1, 2, 3)))

    def test_invalid_permutation(self):
        with pytest.raises(ShapeError):
            ModePermutation(3, (1, 1, 2))
