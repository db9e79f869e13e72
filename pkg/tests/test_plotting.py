import xml.etree.ElementTree as ET

import pytest

from harrod import continuous
from harrod.domain import ValidationError, make_params
from harrod.numerics import ODEControls
from harrod.plotting import CHANNELS, emit_plot

P = make_params(0.5, 10, 1)


@pytest.fixture(scope="module")
def traj():
    return continuous.simulate(P, 19, ODEControls(max_step=0.5))[0]


def test_svg_is_well_formed(traj):
    svg = emit_plot(traj, ["K", "Y_R"], title="baseline", crisis_time=19.5)
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert "realized income" in svg
    assert "crisis" in svg
    assert "<dc:date>" not in svg


def test_svg_is_deterministic(traj):
    assert emit_plot(traj, list(CHANNELS), log_scale=True) == emit_plot(traj, list(CHANNELS),
                                                                       log_scale=True)


def test_far_crisis_marker_omitted(traj):
    assert "crisis" not in emit_plot(traj, ["K"], crisis_time=100.0)


@pytest.mark.parametrize("channels", [[], ["Q"]])
def test_bad_channels(traj, channels):
    with pytest.raises(ValidationError):
        emit_plot(traj, channels)
