import numpy as np
import pytest

from semiflow_lab.analytic import AnalyticFn, derivative, disk_samples
from semiflow_lab.cocycle import Cocycle, make_coboundary
from semiflow_lab.errors import (DegenerateOperatorError, ExtractionError,
                                 PreconditionError)
from semiflow_lab.flow import attraction
from semiflow_lab.intertwine import (AbstractOperator, check_intertwiner,
                                     commutant_check, extract_semigroup, load_bundle,
                                     recover_symbols, save_bundle)
from semiflow_lab.operators import (OperatorSemigroup, WeightedCompOp, composition_op,
                                    gallery_semigroups, matrix, multiplication_op)
from semiflow_lab.spaces import RadialWeight, SpaceSpec

A0 = SpaceSpec.bergman(2, RadialWeight.standard(0.0))
GRID = disk_samples(60, max_radius=0.9)
EXTRACT_GRID = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]


def wrap(op):
    return AbstractOperator.from_weighted_comp(op, A0)


def family_of(sg):
    return lambda t: wrap(sg.at(t, validate=False))


def diff_operator():
    def action(f):
        return AnalyticFn(lambda z, _f=f: derivative(_f, z, rho=0.04), label="f'")
    return AbstractOperator(action, A0, label="d/dz")


def test_commutant_multiplication_operator():
    g = AnalyticFn(lambda z: 1.0 / (2.0 - z), label="1/(2-z)")
    report = commutant_check(wrap(multiplication_op(g)))
    assert report.commute_residual < 1e-9
    assert report.multiplier_residual < 1e-9
    zs = disk_samples(9)
    assert np.max(np.abs(report.multiplier(zs) - g(zs))) < 1e-12


def test_commutant_rejects_composition_operator():
    phi = AnalyticFn(lambda z: z / 2.0, label="z/2")
    report = commutant_check(wrap(composition_op(phi)))
    assert report.multiplier_residual > 1e-2


def test_commutant_multiplier_is_recovered_for_shift():
    report = commutant_check(wrap(multiplication_op(AnalyticFn.identity())))
    zs = disk_samples(9)
    assert np.max(np.abs(report.multiplier(zs) - zs)) < 1e-12


def test_recover_symbols_constructed_operator():
    m_true = AnalyticFn(lambda z: 1.0 / (2.0 - z), label="m")
    phi_true = AnalyticFn(lambda z: z / 2.0, label="phi")
    m, phi, masked = recover_symbols(wrap(WeightedCompOp(m_true, phi_true)))
    assert not masked
    assert np.max(np.abs(m(GRID) - m_true(GRID))) < 1e-9
    assert np.max(np.abs(phi(GRID) - phi_true(GRID))) < 1e-9


def test_recover_symbols_shift():
    m, phi, _ = recover_symbols(wrap(multiplication_op(AnalyticFn.identity())))
    assert np.max(np.abs(m(GRID) - GRID)) < 1e-12
    assert np.max(np.abs(phi(GRID) - GRID)) < 1e-9


def test_recover_symbols_identity():
    op = wrap(multiplication_op(AnalyticFn.constant(1.0)))
    m, phi, _ = recover_symbols(op)
    assert np.max(np.abs(m(GRID) - 1.0)) < 1e-12
    assert np.max(np.abs(phi(GRID) - GRID)) < 1e-12


def test_recover_symbols_degenerate():
    zero = AbstractOperator(lambda f: AnalyticFn.constant(0.0), A0, label="0")
    with pytest.raises(DegenerateOperatorError):
        recover_symbols(zero)


def test_check_intertwiner_passes_constructed():
    op = wrap(WeightedCompOp(AnalyticFn(lambda z: np.exp(z), label="e^z"),
                             AnalyticFn(lambda z: 0.7 * z, label="0.7z")))
    report = check_intertwiner(op)
    assert report.passed
    assert report.intertwining_residual < 1e-8
    assert np.max(np.abs(report.self_map(GRID) - 0.7 * GRID)) < 1e-8


def test_check_intertwiner_rejects_differentiation():
    report = check_intertwiner(diff_operator())
    assert not report.passed
    assert report.degenerate
    assert report.intertwining_residual > 1e-2
    assert "degenerate" in report.note


def test_check_intertwiner_mobius_composition():
    mob = AnalyticFn(lambda z: (z + 0.3) / (1.0 + 0.3 * z), label="mobius")
    report = check_intertwiner(wrap(composition_op(mob)))
    assert report.passed
    assert np.max(np.abs(report.self_map(GRID) - mob(GRID))) < 1e-8


def test_check_intertwiner_flags_boundary_valued_self_map():
    # T f = f(c) with |c| essentially on the circle: intertwining holds with
    # phi = c, but the self-map bound must fail the report
    c = 1.0 - 1e-12
    op = AbstractOperator(lambda f: AnalyticFn.constant(f(c)), A0, label="eval@c")
    report = check_intertwiner(op)
    assert not report.passed
    assert report.self_map_max >= 1.0 - 1e-9
    assert report.intertwining_residual < 1e-8


def test_check_intertwiner_power_relation_spotchecks():
    op = wrap(WeightedCompOp(AnalyticFn.constant(0.5), AnalyticFn(lambda z: 0.6 * z,
                                                                  label="0.6z")))
    report = check_intertwiner(op)
    assert set(report.power_residuals) == {"1", "2", "5", "10"}
    assert max(report.power_residuals.values()) < 1e-9


def test_extraction_round_trip_families():
    families = [
        gallery_semigroups()[0],
        OperatorSemigroup(attraction(), Cocycle.derivative(attraction())),
        OperatorSemigroup(attraction(), make_coboundary(
            AnalyticFn(lambda z: np.exp(1.5 * np.log(1.0 - z)), label="(1-z)^1.5"),
            attraction())),
    ]
    zs = disk_samples(100, max_radius=0.9)
    for sg in families:
        flow, cocycle, report = extract_semigroup(family_of(sg), EXTRACT_GRID)
        assert report.passed, sg.name
        for t in (0.1, 0.3, 0.7):
            assert np.max(np.abs(flow(t, zs) - sg.flow(t, zs))) < 1e-7
            assert np.max(np.abs(cocycle.eval(t, zs) - sg.cocycle.eval(t, zs))) < 1e-7
        assert report.min_multiplier_modulus > 0.0


def test_extraction_reports_cocycle_and_flow_laws():
    sg = gallery_semigroups()[1]
    _, _, report = extract_semigroup(family_of(sg), EXTRACT_GRID)
    assert report.flow_law_residual < 1e-7
    assert report.cocycle_law_residual < 1e-7
    assert report.identity_residual < 1e-9
    assert report.unit_residual < 1e-9
    assert report.continuity_residuals[0] < 0.2


def test_extraction_rejects_corrupted_family():
    sg = gallery_semigroups()[0]
    zero = AbstractOperator(lambda f: AnalyticFn.constant(0.0), A0, label="0")

    def corrupted(t):
        if abs(t - 0.5) < 1e-9:
            return zero
        return wrap(sg.at(t, validate=False))

    with pytest.raises(ExtractionError) as err:
        extract_semigroup(corrupted, EXTRACT_GRID)
    assert err.value.t == pytest.approx(0.5)
    assert "0.5" in str(err.value)


def test_extraction_requires_zero_start():
    sg = gallery_semigroups()[0]
    with pytest.raises(PreconditionError):
        extract_semigroup(family_of(sg), [0.1, 0.2, 0.3])


def test_extraction_norm_surrogate_reported():
    sg = gallery_semigroups()[0]
    _, _, report = extract_semigroup(family_of(sg), EXTRACT_GRID)
    assert report.norm_surrogate == pytest.approx(1.0, abs=1e-6)
    assert "surrogate" in report.note


def test_intertwining_implies_form_residual():
    # numerical echo of the converse direction: small intertwining residual
    # with clean recovery forces a small weighted-composition form residual
    ops = [
        wrap(WeightedCompOp(AnalyticFn(lambda z: 1.0 / (2.0 - z), label="m"),
                            AnalyticFn(lambda z: 0.5 * z + 0.2, label="phi"))),
        wrap(composition_op(AnalyticFn(lambda z: (z + 0.3) / (1.0 + 0.3 * z),
                                       label="mobius"))),
    ]
    for op in ops:
        report = check_intertwiner(op)
        if report.intertwining_residual < 1e-8 and not report.degenerate:
            assert report.form_residual < 1e-6


def test_linearity_probe():
    op = wrap(multiplication_op(AnalyticFn(lambda z: np.exp(z))))
    assert op.linearity_residual() < 1e-9


def test_bundle_round_trip(tmp_path):
    sg = gallery_semigroups()[0]
    ts = EXTRACT_GRID
    mats = [matrix(sg.at(t, validate=False), A0, 20) for t in ts]
    manifest = save_bundle(tmp_path / "bundle", ts, mats, A0)
    t_family, t_values, space = load_bundle(manifest)
    assert t_values == ts
    assert space.label() == A0.label()
    flow, cocycle, report = extract_semigroup(t_family, t_values)
    assert report.passed
    zs = disk_samples(40, max_radius=0.8)
    assert np.max(np.abs(flow(0.3, zs) - sg.flow(0.3, zs))) < 1e-7


def test_bundle_rejects_malformed(tmp_path):
    bad = tmp_path / "manifest.json"
    bad.write_text('{"space": "hardy:2"}')
    with pytest.raises(PreconditionError):
        load_bundle(bad)
