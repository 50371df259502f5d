import numpy as np
import pytest

from src.exceptions import ModelBuildError
from src.models import ArcRecord
from src.optimization.bpr import BPR_ALPHA, arc_time, bpr_time, build_pieces

pytestmark = pytest.mark.unit

LENGTH, SPEED, CAPACITY = 2.0, 40.0, 6000.0


def arc(capacity=CAPACITY):
    return ArcRecord(tail="a", head="b", mode="road", length=LENGTH, speed=SPEED, lanes=1, capacity=capacity)


def flow_time(y):
    return np.asarray(y) * bpr_time(LENGTH, SPEED, CAPACITY, y)


def test_free_flow_and_capacity_times():
    assert bpr_time(LENGTH, SPEED, CAPACITY, 0.0) == pytest.approx(LENGTH / SPEED)
    assert bpr_time(LENGTH, SPEED, CAPACITY, CAPACITY) == pytest.approx(LENGTH / SPEED * (1 + BPR_ALPHA))


def test_arc_time_needs_capacity():
    with pytest.raises(ModelBuildError):
        arc_time(arc(capacity=None), 10.0)


@pytest.mark.parametrize("n_pieces", [1, 4, 8])
def test_breakpoints_cover_twice_capacity(n_pieces):
    pieces = build_pieces(arc(), n_pieces)
    assert pieces.n_pieces == n_pieces
    assert pieces.width == pytest.approx(2 * CAPACITY / n_pieces)
    assert pieces.heights[0] == 0.0
    assert pieces.width * n_pieces == pytest.approx(2 * CAPACITY)


def test_envelope_is_exact_at_breakpoints():
    pieces = build_pieces(arc(), 4)
    y = pieces.width * np.arange(5)
    np.testing.assert_allclose(pieces.envelope(y), flow_time(y), rtol=1e-9, atol=1e-9)


def test_envelope_is_the_chord_interpolant():
    """y*T(y) is convex, so the max of its chords is the piecewise-linear interpolant."""
    pieces = build_pieces(arc(), 4)
    breakpoints = pieces.width * np.arange(5)
    y = np.linspace(0, 2 * CAPACITY, 97)
    env = pieces.envelope(y)
    np.testing.assert_allclose(env, np.interp(y, breakpoints, pieces.heights), rtol=1e-9, atol=1e-9)
    assert np.all(env >= flow_time(y) - 1e-9)


def test_slopes_increase():
    pieces = build_pieces(arc(), 6)
    assert np.all(np.diff(pieces.slopes) > 0)
    # first chord starts at the origin, later intercepts fall below it
    assert pieces.intercepts[0] == pytest.approx(0.0, abs=1e-12)
    assert all(xi <= 1e-12 for xi in pieces.intercepts)


def test_more_pieces_tighten_the_envelope():
    y = np.linspace(0, 2 * CAPACITY, 101)
    coarse = build_pieces(arc(), 2).envelope(y) - flow_time(y)
    fine = build_pieces(arc(), 8).envelope(y) - flow_time(y)
    assert fine.max() < coarse.max()


def test_degenerate_arc_rejected():
    with pytest.raises(ModelBuildError):
        build_pieces(arc(capacity=0.0), 4)
