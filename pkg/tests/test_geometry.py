import numpy as np
import pytest

from dfproj.geometry import Box, NonnegativeOrthant, WholeSpace, clamp_scalar


def test_orthant_projection_values():
    orthant = NonnegativeOrthant()
    assert np.array_equal(
        orthant.project([-1.0, 0.0, 2.5]), np.array([0.0, 0.0, 2.5])
    )
    assert orthant.contains([0.0, 1.0])
    assert not orthant.contains([-1e-9, 1.0])
    assert orthant.contains([-1e-9, 1.0], tol=1e-8)


def test_box_projection_values():
    box = Box(lower=np.array([0.0, -1.0]), upper=np.array([1.0, 1.0]))
    assert np.array_equal(box.project([2.0, -3.0]), np.array([1.0, -1.0]))
    assert np.array_equal(box.project([0.5, 0.0]), np.array([0.5, 0.0]))
    assert box.contains([1.0, 1.0])
    assert not box.contains([1.1, 0.0])


def test_whole_space_projection_is_identity():
    ws = WholeSpace()
    x = np.array([-5.0, 3.0])
    out = ws.project(x)
    assert np.array_equal(out, x)
    assert out is not x
    assert ws.contains(x)


@pytest.mark.parametrize(
    "feasible",
    [
        NonnegativeOrthant(),
        Box(lower=np.array([-1.0] * 6), upper=np.array([0.5] * 6)),
        WholeSpace(),
    ],
)
def test_projection_idempotent_and_nonexpansive(feasible):
    rng = np.random.default_rng(11)
    for _ in range(200):
        x = rng.normal(scale=3.0, size=6)
        y = rng.normal(scale=3.0, size=6)
        px, py = feasible.project(x), feasible.project(y)
        assert np.array_equal(feasible.project(px), px)
        assert feasible.contains(px, tol=0.0)
        assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-12


def test_projection_rejects_bad_input():
    orthant = NonnegativeOrthant()
    with pytest.raises(ValueError):
        orthant.project([np.nan, 0.0])
    with pytest.raises(ValueError):
        orthant.project([[1.0, 2.0]])
    box = Box(lower=np.zeros(2), upper=np.ones(2))
    with pytest.raises(ValueError):
        box.project([1.0, 2.0, 3.0])


def test_box_validation():
    with pytest.raises(ValueError):
        Box(lower=np.array([0.0, 2.0]), upper=np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        Box(lower=np.array([0.0]), upper=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        Box(lower=np.array([np.nan]), upper=np.array([1.0]))
    # infinite bounds are allowed
    Box(lower=np.array([-np.inf]), upper=np.array([np.inf]))


def test_clamp_scalar_values():
    assert clamp_scalar(0.5, 0.001, 0.4) == 0.4
    assert clamp_scalar(1e-5, 0.001, 0.4) == 0.001
    assert clamp_scalar(0.2, 0.001, 0.4) == 0.2
    assert clamp_scalar(0.3, 0.3, 0.3) == 0.3


def test_clamp_scalar_properties():
    rng = np.random.default_rng(5)
    for _ in range(300):
        lo, width = rng.uniform(0.0, 2.0), rng.uniform(0.0, 3.0)
        s = rng.normal(scale=5.0)
        out = clamp_scalar(s, lo, lo + width)
        assert lo <= out <= lo + width
        if lo <= s <= lo + width:
            assert out == s


def test_clamp_scalar_rejects_bad_interval():
    with pytest.raises(ValueError):
        clamp_scalar(0.5, 0.4, 0.1)
    with pytest.raises(ValueError):
        clamp_scalar(0.5, -0.1, 0.4)
