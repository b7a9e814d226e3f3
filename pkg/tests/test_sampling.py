import numpy as np
import pytest

from fracpicard.sampling import halton_points


class TestHaltonPoints:
    def test_shape_and_range(self):
        pts = halton_points(100, 6)
        assert pts.shape == (100, 6)
        assert np.all(pts >= 0.0)
        assert np.all(pts < 1.0)

    def test_deterministic(self):
        assert np.array_equal(halton_points(50, 3), halton_points(50, 3))

    def test_base_two_prefix(self):
        # dimension 0 is the base-2 van der Corput sequence; with skip=0
        # its opening terms are the classic dyadic shuffle
        pts = halton_points(4, 1, skip=1)
        assert pts[:, 0] == pytest.approx([0.5, 0.25, 0.75, 0.125])

    def test_even_coverage(self):
        pts = halton_points(512, 2)
        for d in range(2):
            hist, _ = np.histogram(pts[:, d], bins=8, range=(0.0, 1.0))
            assert hist.min() >= 40  # 64 expected per bin; far from collapse

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            halton_points(0, 2)
        with pytest.raises(ValueError):
            halton_points(10, 0)
        with pytest.raises(ValueError):
            halton_points(10, 13)
