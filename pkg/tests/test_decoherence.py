import math
from dataclasses import replace

import pytest

from ecsteleport.constants import SI, Constants
from ecsteleport.decoherence import (
    ION_DECOHERENCE_BAND,
    RosaFaberParams,
    TegmarkParams,
    band_annotation,
    default_rosa_faber,
    default_tegmark,
    hagan_adjusted,
    sweep,
    tau_rosa_faber,
    tau_tegmark,
)

E = 1.602176634e-19
K_B = 1.380649e-23
G = 8.9875517873681764e9
HBAR = 1.054571817e-34


def test_shipped_constants():
    assert (SI.hbar, SI.k_B, SI.g, SI.e) == (HBAR, K_B, G, E)
    assert SI.version >= 1


def test_tegmark_default_by_hand():
    expected = (25e-9) ** 2 * math.sqrt(3.8e-26 * K_B * 310) / (345 * G * E**2)
    tau = tau_tegmark(default_tegmark())
    assert tau == pytest.approx(expected, rel=1e-12)
    assert tau == pytest.approx(1.0014125170380193e-13, rel=1e-12)
    assert 1e-14 <= tau <= 1e-12


def test_rosa_faber_default_by_hand():
    p = default_rosa_faber()
    expected = HBAR**3 / (G * 10 * E * E * 8e-9 * 1.82659297326e-22 * K_B * 310)
    assert tau_rosa_faber(p) == pytest.approx(expected, rel=1e-12)


def test_unit_constants():
    one = Constants.unit()
    assert tau_tegmark(TegmarkParams(D=2, m=1, T=4, N=1, q=1), one) == 8.0
    assert tau_rosa_faber(RosaFaberParams(q1=1, q2=1, x1=1, M=1, T=2), one) == 0.5


def test_constants_override():
    c = SI.replace(k_B=1.0)
    assert c.k_B == 1.0 and c.hbar == SI.hbar
    with pytest.raises(KeyError):
        SI.replace(c=3e8)
    with pytest.raises(ValueError):
        SI.replace(hbar=0)


def test_hagan_factor_exact():
    tau = tau_tegmark(default_tegmark())
    assert hagan_adjusted(tau) == tau * 1e10
    assert hagan_adjusted(1e-13) == pytest.approx(1e-3, rel=1e-15)
    with pytest.raises(ValueError):
        hagan_adjusted(0)


@pytest.mark.parametrize("T", [1.0, 77.0, 300.0, 310.0, 1234.5])
def test_temperature_scaling_exact(T):
    teg = replace(default_tegmark(), T=T)
    assert tau_tegmark(replace(teg, T=4 * T)) == 2 * tau_tegmark(teg)
    rf = replace(default_rosa_faber(), T=T)
    assert tau_rosa_faber(replace(rf, T=2 * T)) == tau_rosa_faber(rf) / 2


def test_opposite_temperature_trends():
    temps = [100.0, 200.0, 300.0, 400.0]
    teg = [tau for _, tau in sweep("tegmark", default_tegmark(), temps)]
    rf = [tau for _, tau in sweep("rosa-faber", default_rosa_faber(), temps)]
    assert teg == sorted(teg)
    assert rf == sorted(rf, reverse=True)


def test_sweep_errors():
    with pytest.raises(ValueError):
        sweep("tegmark", default_tegmark(), [])
    with pytest.raises(ValueError):
        sweep("tegmark", default_tegmark(), [300, -1])
    with pytest.raises(ValueError):
        sweep("other", default_tegmark(), [300])
    with pytest.raises(TypeError):
        sweep("rosa-faber", default_tegmark(), [300])


def test_nonpositive_params_rejected():
    with pytest.raises(ValueError):
        TegmarkParams(D=0, m=1, T=1, N=1, q=1)
    with pytest.raises(ValueError):
        RosaFaberParams(q1=1, q2=1, x1=-1, M=1, T=1)


def test_band_annotation():
    assert ION_DECOHERENCE_BAND == (1e-20, 1e-19)
    assert band_annotation(5e-20) == "inside ion band"
    assert band_annotation(1e-21) == "below ion band"
    assert band_annotation(1e-13).startswith("above ion band")
