import numpy as np
import pytest

from semiflow_lab.analytic import AnalyticFn, disk_samples
from semiflow_lab.errors import (IntegrationError, InvalidSemiflowError,
                                 PreconditionError)
from semiflow_lab.flow import (Semiflow, attraction, broken_escape, dilation,
                               estimate_generator, fixed_points_check,
                               generator_twin, resolve_flow, rotation,
                               verify_semiflow)


def test_flow_point_dilation():
    assert dilation()(np.log(2.0), 0.5) == pytest.approx(0.25)


def test_flow_point_generator_driven():
    s = generator_twin("dilation")
    assert s(np.log(2.0), 0.5) == pytest.approx(0.25, abs=1e-9)


def test_flow_point_attraction():
    assert attraction()(1.0, 0.0) == pytest.approx(1.0 - np.exp(-1.0))


def test_flow_point_rejects_negative_time():
    with pytest.raises(PreconditionError):
        dilation()(-0.5, 0.1)


def test_broken_flow_escapes_and_raises():
    with pytest.raises(InvalidSemiflowError):
        broken_escape()(1.0, 0.5)


def test_ode_escape_raises_invalid_semiflow():
    # constant outward drift is not the generator of a disk semiflow
    bad = Semiflow.from_generator(AnalyticFn.constant(2.0), name="outward")
    with pytest.raises(InvalidSemiflowError):
        bad(1.0, 0.5)


def test_ode_step_budget():
    s = Semiflow.from_generator(AnalyticFn(lambda z: -z), max_steps=3)
    with pytest.raises(IntegrationError):
        s(5.0, 0.4)


def test_estimate_generator_dilation():
    assert estimate_generator(dilation(), 0.5) == pytest.approx(-0.5, abs=1e-6)


def test_estimate_generator_attraction():
    assert estimate_generator(attraction(), 0.3) == pytest.approx(0.7, abs=1e-6)


def test_estimate_generator_rotation():
    assert estimate_generator(rotation(2.0), 0.5) == pytest.approx(1j, abs=1e-6)


def test_verify_closed_form_flows_tight():
    for s in (dilation(), rotation(1.0), attraction()):
        report = verify_semiflow(s, tol=1e-12)
        assert report.passed, (s.name, report)
        assert report.max_law_residual < 1e-12


def test_generator_flow_matches_closed_form():
    # oracle: the closed form e^{-t} z + 1 - e^{-t}, evaluated independently
    s = generator_twin("attraction")
    ts = np.linspace(0.0, 2.0, 7)
    zs = disk_samples(25)
    got = s.at_times(ts, zs)
    expected = np.exp(-ts)[:, None] * zs[None, :] + (1.0 - np.exp(-ts))[:, None]
    assert float(np.max(np.abs(got - expected))) < 1e-8


def test_verify_reports_broken_family():
    report = verify_semiflow(broken_escape(), tol=1e-8)
    assert not report.passed
    assert report.max_selfmap_excess > 0.5


def test_verify_reports_discontinuity_at_zero():
    jump = Semiflow.closed_form(lambda t, z: z if t == 0 else 0.5 * z, name="jump")
    report = verify_semiflow(jump, tol=1e-8)
    assert not report.passed
    assert report.continuity_residual > 0.1


def test_fixed_points_dilation():
    s = dilation()
    assert fixed_points_check(s, [0.0]) == [True]
    assert fixed_points_check(s, [0.5]) == [False]


def test_fixed_points_attraction_origin_moves():
    assert fixed_points_check(attraction(), [0.0]) == [False]


def test_generator_round_trip():
    for closed, name in ((dilation(), "dilation"), (rotation(1.0), "rotation"),
                         (attraction(), "attraction")):
        fitted = AnalyticFn(lambda z, _s=closed: estimate_generator(_s, z),
                            label=f"fitted-G[{name}]")
        rebuilt = Semiflow.from_generator(fitted, name=f"fit-{name}")
        ts = [0.25, 0.5, 1.0]
        zs = disk_samples(12)
        err = float(np.max(np.abs(rebuilt.at_times(ts, zs) - closed.at_times(ts, zs))))
        assert err < 1e-6, (name, err)


def test_generator_driven_flow_satisfies_its_ode():
    # central difference of the integrated flow against G(phi_t(z))
    s = generator_twin("attraction")
    zs = disk_samples(8)
    t, h = 0.6, 1e-4
    w_plus, w_minus, w = s.at_times([t + h, t - h, t], zs)
    dphi = (w_plus - w_minus) / (2.0 * h)
    assert float(np.max(np.abs(dphi - (1.0 - w)))) < 1e-6


def test_at_times_handles_unsorted_times():
    s = generator_twin("dilation")
    ts = [0.7, 0.1, 0.4, 0.0]
    zs = np.array([0.3 + 0.2j])
    got = s.at_times(ts, zs)[:, 0]
    expected = np.exp(-np.asarray(ts)) * zs[0]
    assert np.max(np.abs(got - expected)) < 1e-9


def test_self_map_stays_inside_disk():
    for s in (dilation(), rotation(2.0), attraction()):
        vals = s.at_times(np.linspace(0, 3, 9), disk_samples(30))
        assert float(np.max(np.abs(vals))) < 1.0


def test_resolve_flow_accepts_params():
    s = resolve_flow("rotation:2.0")
    assert s(np.pi / 2.0, 0.5) == pytest.approx(0.5 * np.exp(1j * np.pi))


def test_resolve_flow_rejects_unknown():
    with pytest.raises(PreconditionError):
        resolve_flow("warp")


def test_map_fn_is_analytic_fn():
    fn = attraction().map_fn(0.5)
    zs = disk_samples(9)
    assert np.allclose(fn(zs), attraction()(0.5, zs))
