import pytest

from meshwave.curves import Curve
from meshwave.errors import OutOfRange


def test_interpolation():
    c = Curve(anchors=((0.0, 0.0), (0.1, 10.0), (0.2, 15.0)))
    assert c(0.0) == 0.0
    assert c(0.05) == pytest.approx(5.0)
    assert c(0.1) == pytest.approx(10.0)
    assert c(0.15) == pytest.approx(12.5)
    assert c.domain == (0.0, 0.2)


def test_no_extrapolation():
    c = Curve(anchors=((0.0, 0.0), (1.0, 1.0)))
    with pytest.raises(OutOfRange, match="outside the curve domain"):
        c(1.5)
    with pytest.raises(OutOfRange):
        c(-0.1)


def test_slopes_and_shape():
    c = Curve(anchors=((0.0, 0.0), (0.1, 10.0), (0.2, 15.0), (0.3, 16.0)))
    assert c.slopes() == pytest.approx([100.0, 50.0, 10.0])
    assert c.forward_slope(0.0) == pytest.approx(100.0)
    assert c.forward_slope(0.1) == pytest.approx(50.0)
    assert c.forward_slope(0.15) == pytest.approx(50.0)
    assert c.forward_slope(0.3) == pytest.approx(10.0)
    assert c.is_monotone()
    assert c.is_concave()

    convex = Curve(anchors=((0.0, 0.0), (1.0, 1.0), (2.0, 3.0)))
    assert convex.is_monotone()
    assert not convex.is_concave()
    assert convex.is_concave(start=1)

    falling = Curve(anchors=((0.0, 1.0), (1.0, 0.0)))
    assert not falling.is_monotone()


def test_anchor_validation():
    with pytest.raises(ValueError, match="strictly increasing"):
        Curve(anchors=((0.0, 0.0), (0.0, 1.0)))
    with pytest.raises(ValueError, match="at least one anchor"):
        Curve(anchors=())
