import numpy as np
import pytest

from omlab.fos import (
    Fos,
    FosValidation,
    Mask,
    Permutation,
    concat_fos,
    copy_fragment,
    format_fos_text,
    make_homogeneous_fos,
    parse_fos_text,
    resolve_fos,
    validate_fos,
)


def bits(s):
    return np.array([int(c) for c in s], dtype=np.uint8)


class TestMask:
    def test_sorted_and_distinct(self):
        assert Mask([3, 1, 2]).indices == (1, 2, 3)
        with pytest.raises(ValueError):
            Mask([1, 1])
        with pytest.raises(ValueError):
            Mask([])
        with pytest.raises(ValueError):
            Mask([-1, 0])

    def test_len_iter(self):
        m = Mask([5, 0])
        assert len(m) == 2
        assert list(m) == [0, 5]


class TestPermutation:
    def test_identity(self):
        assert Permutation.identity(3).mapping == (0, 1, 2)

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation([0, 0, 1])
        with pytest.raises(ValueError):
            Permutation([1, 2, 3])


class TestMakeHomogeneous:
    def test_identity_partition(self):
        fos = make_homogeneous_fos(6, 3)
        assert [m.indices for m in fos] == [(0, 1, 2), (3, 4, 5)]

    def test_permuted_partition(self):
        # the interleaved 2-wide masks example, shifted to 0-based
        perm = Permutation([0, 4, 1, 3, 2, 5])
        fos = make_homogeneous_fos(6, 2, perm)
        assert [m.indices for m in fos] == [(0, 4), (1, 3), (2, 5)]

    def test_nondividing_k_rejected(self):
        with pytest.raises(ValueError):
            make_homogeneous_fos(6, 4)

    def test_wrong_perm_size_rejected(self):
        with pytest.raises(ValueError):
            make_homogeneous_fos(6, 2, Permutation([0, 1, 2]))

    @pytest.mark.parametrize("ell,k", [(6, 1), (6, 2), (6, 3), (6, 6), (20, 5), (12, 4)])
    def test_output_valid_disjoint_uniform(self, ell, k):
        rng = np.random.default_rng(ell * 31 + k)
        perm = Permutation(rng.permutation(ell))
        fos = make_homogeneous_fos(ell, k, perm)
        assert validate_fos(fos).ok
        assert all(len(m) == k for m in fos)
        seen = set()
        for m in fos:
            assert not (seen & set(m.indices))
            seen |= set(m.indices)
        assert seen == set(range(ell))


class TestConcat:
    def test_three_layer_example(self):
        # F3 (permuted), F6, F2 concatenated keep order: 6 masks
        f3 = make_homogeneous_fos(6, 3, Permutation([1, 3, 4, 0, 2, 5]))
        f6 = make_homogeneous_fos(6, 6)
        f2 = make_homogeneous_fos(6, 2, Permutation([0, 4, 1, 3, 2, 5]))
        cat = concat_fos([f3, f6, f2])
        assert [m.indices for m in cat] == [
            (1, 3, 4),
            (0, 2, 5),
            (0, 1, 2, 3, 4, 5),
            (0, 4),
            (1, 3),
            (2, 5),
        ]
        assert validate_fos(cat).ok

    def test_single_part_identity(self):
        fos = make_homogeneous_fos(10, 5)
        assert concat_fos([fos]) == fos

    def test_mask_counting(self):
        f5 = make_homogeneous_fos(10, 5)
        f1 = make_homogeneous_fos(10, 1)
        assert len(concat_fos([f5, f1])) == 12

    def test_mismatched_ell_rejected(self):
        with pytest.raises(ValueError):
            concat_fos([make_homogeneous_fos(6, 2), make_homogeneous_fos(8, 2)])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            concat_fos([])

    def test_preserves_total_count_and_order(self):
        rng = np.random.default_rng(7)
        parts = []
        for k in (1, 2, 5, 10):
            perm = Permutation(rng.permutation(10))
            parts.append(make_homogeneous_fos(10, k, perm))
        cat = concat_fos(parts)
        assert len(cat) == sum(len(p) for p in parts)
        flat = [m for p in parts for m in p.masks]
        assert list(cat.masks) == flat


class TestValidate:
    def test_overlapping_ok(self):
        fos = Fos([Mask([0, 1]), Mask([1, 2])], ell=3)
        assert validate_fos(fos) == FosValidation(True)

    def test_uncovered_reported(self):
        fos = Fos([Mask([0, 1]), Mask([1])], ell=3)
        report = validate_fos(fos)
        assert not report.ok
        assert report.uncovered == (2,)
        assert "2" in report.message()

    def test_full_mask_ok(self):
        assert validate_fos(Fos([Mask([0, 1, 2])], ell=3)).ok

    def test_out_of_range_reported(self):
        report = validate_fos(Fos([Mask([0, 1, 5])], ell=3))
        assert not report.ok
        assert 5 in report.out_of_range


class TestCopyFragment:
    def test_basic(self):
        out = copy_fragment(bits("000"), bits("111"), Mask([1]))
        assert out.tolist() == [0, 1, 0]

    def test_identity(self):
        x = bits("0110")
        assert copy_fragment(x, x, Mask([0, 2])).tolist() == x.tolist()

    def test_two_positions(self):
        out = copy_fragment(bits("0101"), bits("1010"), Mask([0, 3]))
        assert out.tolist() == [1, 1, 0, 0]

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            copy_fragment(bits("01"), bits("011"), Mask([0]))

    def test_idempotent_and_swap(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            ell = int(rng.integers(2, 12))
            dest = rng.integers(0, 2, ell).astype(np.uint8)
            src = rng.integers(0, 2, ell).astype(np.uint8)
            size = int(rng.integers(1, ell + 1))
            mask = Mask(rng.choice(ell, size=size, replace=False))
            once = copy_fragment(dest, src, mask)
            assert np.array_equal(copy_fragment(once, src, mask), once)
            # swapping roles restores the original dest fragment into src
            back = copy_fragment(src, dest, mask)
            idx = mask.as_array()
            assert np.array_equal(back[idx], dest[idx])
            assert np.array_equal(once[idx], src[idx])


class TestTextFormat:
    def test_parse_one_based_with_comments(self):
        text = "# header\n1,2,3\n4,5,6  # trailing\n"
        fos = parse_fos_text(text, 6)
        assert [m.indices for m in fos] == [(0, 1, 2), (3, 4, 5)]

    def test_roundtrip(self):
        fos = make_homogeneous_fos(8, 2, Permutation([7, 0, 6, 1, 5, 2, 4, 3]))
        assert parse_fos_text(format_fos_text(fos), 8) == fos

    def test_zero_index_rejected(self):
        with pytest.raises(ValueError):
            parse_fos_text("0,1\n2,3\n", 4)

    def test_uncovered_rejected(self):
        with pytest.raises(ValueError):
            parse_fos_text("1,2\n", 3)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            parse_fos_text("# nothing\n", 3)


class TestResolveShorthand:
    def test_f_k(self):
        assert resolve_fos("f_k", 10, 5) == make_homogeneous_fos(10, 5)

    def test_f_k_1(self):
        got = resolve_fos("f_k,1", 10, 5)
        want = concat_fos([make_homogeneous_fos(10, 5), make_homogeneous_fos(10, 1)])
        assert got == want

    def test_unknown(self):
        with pytest.raises(ValueError):
            resolve_fos("tree", 10, 5)

    def test_missing_k(self):
        with pytest.raises(ValueError):
            resolve_fos("f_k", 10, None)
