import numpy as np
import pytest

from speedsign.morphology import StructuringElement, box, closing, dilate, erode, fill_holes, opening

from oracles import brute_dilate, brute_erode


def rand_image(rng, shape=(16, 16), p=0.4):
    return rng.random(shape) < p


class TestStructuringElement:
    def test_rejects_even_dimensions(self):
        with pytest.raises(ValueError):
            StructuringElement(np.ones((2, 3), dtype=bool))

    def test_rejects_unset_origin(self):
        mask = np.ones((3, 3), dtype=bool)
        mask[1, 1] = False
        with pytest.raises(ValueError):
            StructuringElement(mask)

    def test_reflection(self):
        mask = np.zeros((3, 3), dtype=bool)
        mask[1, 1] = mask[0, 1] = True
        se = StructuringElement(mask)
        assert se.reflected().mask[2, 1]


class TestErode:
    def test_full_image_shrinks_by_border(self):
        img = np.ones((10, 10), dtype=bool)
        out = erode(img, box(3))
        expected = np.zeros((10, 10), dtype=bool)
        expected[1:9, 1:9] = True
        assert np.array_equal(out, expected)

    def test_single_pixel_vanishes(self):
        img = np.zeros((5, 5), dtype=bool)
        img[2, 2] = True
        assert not erode(img, box(3)).any()

    def test_empty_stays_empty(self):
        img = np.zeros((4, 4), dtype=bool)
        assert not erode(img, box(3)).any()


class TestDilate:
    def test_single_pixel_becomes_block(self):
        img = np.zeros((5, 5), dtype=bool)
        img[2, 2] = True
        out = dilate(img, box(3))
        expected = np.zeros((5, 5), dtype=bool)
        expected[1:4, 1:4] = True
        assert np.array_equal(out, expected)

    def test_empty_stays_empty(self):
        assert not dilate(np.zeros((4, 4), dtype=bool), box(3)).any()


def random_se(rng, max_radius=2):
    size = 2 * int(rng.integers(1, max_radius + 1)) + 1
    mask = rng.random((size, size)) < 0.5
    mask[size // 2, size // 2] = True
    return StructuringElement(mask)


class TestAlgebra:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(10)
        for _ in range(25):
            img = rand_image(rng, (12, 12))
            se = random_se(rng)
            assert np.array_equal(erode(img, se), brute_erode(img, se.mask))
            assert np.array_equal(dilate(img, se), brute_dilate(img, se.mask))

    def test_opening_anti_extensive_everywhere(self):
        rng = np.random.default_rng(11)
        se = box(3)
        for _ in range(50):
            img = rand_image(rng)
            assert not np.any(opening(img, se) & ~img)

    def test_opening_closing_sandwich(self):
        # closing extensivity needs foreground away from the window border:
        # under the outside-is-background convention, dilation clips mass
        # at the edge, so border-touching pixels can be lost. Embedding in
        # a background frame removes the clipping.
        rng = np.random.default_rng(11)
        se = box(3)
        for _ in range(50):
            img = np.pad(rand_image(rng), 2)
            opened = opening(img, se)
            closed = closing(img, se)
            assert not np.any(opened & ~img), "opening must be anti-extensive"
            assert not np.any(img & ~closed), "closing must be extensive"

    def test_extensivity(self):
        rng = np.random.default_rng(12)
        se = box(3)
        for _ in range(50):
            img = rand_image(rng)
            assert not np.any(img & ~dilate(img, se))
            assert not np.any(erode(img, se) & ~img)

    def test_increasing_in_image(self):
        rng = np.random.default_rng(13)
        se = box(3)
        for _ in range(25):
            a = rand_image(rng)
            b = a | rand_image(rng)
            assert not np.any(dilate(a, se) & ~dilate(b, se))
            assert not np.any(erode(a, se) & ~erode(b, se))

    def test_duality_with_background_embedding(self):
        # erosion(A) = complement(dilation(complement(A), reflected SE)),
        # valid once the image is embedded in enough explicit background
        # that the implicit outside-is-background border cannot interfere.
        rng = np.random.default_rng(14)
        for _ in range(25):
            img = rand_image(rng, (12, 12))
            se = random_se(rng)
            pad = 2 * max(se.mask.shape)
            embedded = np.pad(img, pad)
            lhs = erode(embedded, se)
            rhs = ~dilate(~embedded, se.reflected())
            core = (slice(pad, pad + 12), slice(pad, pad + 12))
            assert np.array_equal(lhs[core], rhs[core])


class TestFillHoles:
    def test_ring_becomes_disk(self):
        img = np.zeros((9, 9), dtype=bool)
        img[2, 2:7] = img[6, 2:7] = True
        img[2:7, 2] = img[2:7, 6] = True
        out = fill_holes(img)
        expected = np.zeros((9, 9), dtype=bool)
        expected[2:7, 2:7] = True
        assert np.array_equal(out, expected)

    def test_open_ring_unchanged(self):
        img = np.zeros((9, 9), dtype=bool)
        img[2, 2:7] = img[6, 2:7] = True
        img[2:7, 2] = True  # "C" shape: right side open
        assert np.array_equal(fill_holes(img), img)

    def test_empty_unchanged(self):
        img = np.zeros((5, 5), dtype=bool)
        assert not fill_holes(img).any()

    def test_preserves_foreground(self):
        rng = np.random.default_rng(15)
        for _ in range(25):
            img = rand_image(rng)
            out = fill_holes(img)
            assert not np.any(img & ~out)

    def test_idempotent(self):
        rng = np.random.default_rng(16)
        for _ in range(25):
            img = rand_image(rng)
            once = fill_holes(img)
            assert np.array_equal(fill_holes(once), once)

    def test_diagonal_gap_is_not_an_escape(self):
        # background is 4-connected: a diagonal gap in the ring does not
        # leak the hole out
        img = np.zeros((7, 7), dtype=bool)
        img[1, 1:6] = img[5, 1:6] = True
        img[1:6, 1] = img[1:6, 5] = True
        img[1, 1] = False  # corner removed: hole still sealed 4-connectedly
        out = fill_holes(img)
        assert out[3, 3]
