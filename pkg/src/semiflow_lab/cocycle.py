"""Cocycles for a semiflow: coboundaries, derivative cocycles, closed forms.

A cocycle is a family m_t of analytic functions with m_0 = 1 and
m_{t+s}(z) = m_t(z) m_s(phi_t(z)).  Coboundaries are the quotients
(w o phi_t)/w for a weight w whose zeros are fixed points of the flow; the
derivative cocycle is phi_t', computed by Cauchy circle quadrature.

Sup norms over the disk are estimated from below by circle maxima on a
radius ladder; the estimates are labeled as lower bounds throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .analytic import AnalyticFn, disk_samples, unit_circle
from .errors import (AdmissibilityError, CocycleZeroError, PreconditionError)
from .flow import Semiflow, fixed_points_check

_DEFAULT_RADII = (0.9, 0.99, 0.999)


class Cocycle:
    """Multiplier family m_t bound to (or compatible with) a semiflow."""

    def __init__(self, kind: str, *, closed_map=None, weight: AnalyticFn | None = None,
                 flow: Semiflow | None = None, zeros=(), deriv_radius: float = 0.2,
                 deriv_nodes: int = 32, name: str = "cocycle"):
        if kind not in ("closed", "coboundary", "derivative"):
            raise PreconditionError(f"unknown cocycle kind {kind!r}")
        if kind == "coboundary" and (weight is None or flow is None):
            raise PreconditionError("a coboundary needs a weight and a flow")
        if kind == "derivative" and flow is None:
            raise PreconditionError("a derivative cocycle needs a flow")
        if kind == "closed" and closed_map is None:
            raise PreconditionError("a closed-form cocycle needs its map")
        self.kind = kind
        self._closed = closed_map
        self.weight = weight
        self.flow = flow
        self.zeros = tuple(complex(z) for z in zeros)
        self.deriv_radius = float(deriv_radius)
        self.deriv_nodes = int(deriv_nodes)
        self.name = name

    @classmethod
    def closed(cls, fn, name: str = "closed") -> "Cocycle":
        """Cocycle from a vectorized closed-form map (t, z_array) -> array."""
        return cls("closed", closed_map=fn, name=name)

    @classmethod
    def derivative(cls, flow: Semiflow, radius: float = 0.2, nodes: int = 32) -> "Cocycle":
        """m_t = phi_t' via Cauchy quadrature on circles inside the disk.

        The ring radius shrinks to 0.45 (1 - |z|) near the boundary, so the
        quadrature tail decays like 0.45^nodes for any self-map flow.
        """
        return cls("derivative", flow=flow, deriv_radius=radius, deriv_nodes=nodes,
                   name=f"derivative[{flow.name}]")

    def __repr__(self):
        return f"Cocycle({self.name!r}, kind={self.kind})"

    def eval(self, t: float, z):
        """m_t(z), vectorized over z."""
        z_arr = np.asarray(z, dtype=complex)
        scalar = z_arr.ndim == 0
        flat = np.atleast_1d(z_arr).ravel()
        if self.kind == "closed":
            vals = np.asarray(self._closed(float(t), flat), dtype=complex)
        elif self.kind == "coboundary":
            vals = self._eval_coboundary(float(t), flat)
        else:
            vals = self._eval_derivative(float(t), flat)
        return complex(vals[0]) if scalar else vals.reshape(z_arr.shape)

    def __call__(self, t, z):
        return self.eval(t, z)

    def _eval_coboundary(self, t, flat):
        wz = self.weight(flat)
        scale = 1.0 + float(np.max(np.abs(wz))) if flat.size else 1.0
        tiny = np.abs(wz) < 1e-13 * scale
        if np.any(tiny):
            bad = flat[tiny][0]
            for z0 in self.zeros:
                if abs(bad - z0) < 1e-9:
                    raise CocycleZeroError(
                        f"evaluation at declared zero z = {z0} of the coboundary weight "
                        "is rejected (removable singularity, no limiting procedure)")
            raise CocycleZeroError(
                f"coboundary weight vanishes at z = {bad} which is not a declared zero")
        w_phi = self.weight(self.flow.at_times([t], flat)[0])
        return w_phi / wz

    def _eval_derivative(self, t, flat):
        if flat.size and float(np.max(np.abs(flat))) >= 1.0:
            raise PreconditionError("derivative cocycle needs interior points")
        rho = np.minimum(self.deriv_radius, 0.45 * (1.0 - np.abs(flat)))
        circ = unit_circle(self.deriv_nodes)
        # One flow sweep per ring node keeps the temporaries small; the ring
        # stays strictly inside the disk so the self-map check is skipped.
        acc = np.zeros(flat.size, dtype=complex)
        for c in circ:
            acc += self.flow.at_times([t], flat + rho * c, check=False)[0] * np.conj(c)
        return acc / (self.deriv_nodes * rho)

    def fn(self, t: float) -> AnalyticFn:
        """m_t as an AnalyticFn."""
        return AnalyticFn(lambda z, _t=float(t): np.atleast_1d(self.eval(_t, z)).reshape(z.shape),
                          label=f"{self.name}.m[{t:g}]")


def make_coboundary(w: AnalyticFn, flow: Semiflow, zero_candidates=(),
                    t_grid=None, tol: float = 1e-9, name: str | None = None) -> Cocycle:
    """Coboundary m_t = (w o phi_t) / w after checking the declared zeros.

    Every declared zero of ``w`` must be a fixed point of the flow,
    otherwise the quotient would not satisfy the cocycle law.
    """
    zeros = tuple(complex(z) for z in zero_candidates)
    if zeros:
        ok = fixed_points_check(flow, zeros, t_grid=t_grid, tol=tol)
        bad = [z for z, good in zip(zeros, ok) if not good]
        if bad:
            raise AdmissibilityError(
                f"declared zeros {bad} of weight {w.label!r} are not fixed points "
                f"of {flow.name}")
    return Cocycle("coboundary", weight=w, flow=flow, zeros=zeros,
                   name=name or f"coboundary[{w.label}]")


@dataclass
class CocycleVerificationReport:
    """Residuals of the cocycle axioms over a verification grid."""

    max_law_residual: float
    max_unit_residual: float
    admissible: bool
    tolerance: float
    passed: bool
    note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def verify_cocycle(m: Cocycle, flow: Semiflow, t_grid=None, z_grid=None,
                   tol: float = 1e-8) -> CocycleVerificationReport:
    """Check m_0 = 1 and the multiplicative law; failures land in the report."""
    t_grid = np.asarray(t_grid if t_grid is not None else np.linspace(0.0, 2.0, 8), dtype=float)
    z_grid = np.asarray(z_grid if z_grid is not None else disk_samples(30), dtype=complex)
    if t_grid.size == 0 or z_grid.size == 0:
        raise PreconditionError("verification grids must be nonempty")
    admissible = True
    note = ""
    if m.kind == "coboundary" and m.zeros:
        admissible = all(fixed_points_check(flow, m.zeros))
    try:
        unit = float(np.max(np.abs(m.eval(0.0, z_grid) - 1.0)))
        law = 0.0
        m_at = {float(t): m.eval(float(t), z_grid) for t in t_grid}
        phi_at = {float(t): flow.at_times([float(t)], z_grid)[0] for t in t_grid}
        for t in t_grid:
            m_t = m_at[float(t)]
            phi_t = phi_at[float(t)]
            for s in t_grid:
                lhs = m.eval(float(t + s), z_grid)
                rhs = m_t * m.eval(float(s), phi_t)
                law = max(law, float(np.max(np.abs(lhs - rhs))))
    except (CocycleZeroError, PreconditionError) as exc:
        return CocycleVerificationReport(np.inf, np.inf, False, tol, False,
                                         note=f"evaluation failed: {exc}")
    passed = admissible and unit < tol and law < tol
    return CocycleVerificationReport(law, unit, admissible, tol, passed, note=note)


def circle_maxima(m: Cocycle, t: float, radii=_DEFAULT_RADII, nodes: int = 512) -> np.ndarray:
    """max |m_t| over each sampled circle, in the order of ``radii``."""
    radii = tuple(float(r) for r in radii)
    if any(not 0.0 < r < 1.0 for r in radii):
        raise PreconditionError("sup-norm radii must lie in (0, 1)")
    if nodes < 256:
        raise PreconditionError("sup-norm estimation needs at least 256 angular nodes")
    circ = unit_circle(nodes)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.array([float(np.max(np.abs(m.eval(t, r * circ)))) for r in radii])


def sup_norm(m: Cocycle, t: float, radii=_DEFAULT_RADII, nodes: int = 512) -> float:
    """Lower estimate of the H-infinity norm of m_t by circle maxima.

    By the maximum principle the estimate is nondecreasing in the radius, so
    the reported value is the overall maximum over the ladder.
    """
    return float(np.max(circle_maxima(m, t, radii, nodes)))


@dataclass
class LimsupProbe:
    """Small-time trend of the sup-norm lower estimates.

    ``regime`` is one of ``contractive`` (tail bounded by one), ``finite``
    (tail bounded but above one) or ``divergent`` (circle maxima grow
    without stabilizing along the radius ladder, or overflow).
    """

    tail_value: float
    regime: str
    t_values: list
    estimates: list
    divergent_times: list

    def to_dict(self) -> dict:
        return asdict(self)


def _radius_trend_divergent(profile: np.ndarray) -> bool:
    if not np.all(np.isfinite(profile)):
        return True
    if profile.size < 3 or float(np.min(profile)) <= 0.0:
        return False
    logs = np.log(profile)
    increments = np.diff(logs)
    growing = increments[-1] > max(1.2 * increments[-2], 0.05)
    return bool(growing and profile[-1] > 4.0 * profile[0])


def limsup_probe(m: Cocycle, t_seq=None, radii=_DEFAULT_RADII, nodes: int = 512,
                 tol: float = 1e-6) -> LimsupProbe:
    """Probe limsup_{t->0+} of the sup-norm estimates along a decreasing t ladder."""
    if t_seq is None:
        t_seq = 2.0 ** -np.arange(1, 11)
    t_seq = np.asarray(t_seq, dtype=float)
    if t_seq.size < 2 or np.any(np.diff(t_seq) >= 0) or t_seq[-1] <= 0:
        raise PreconditionError("t_seq must decrease strictly to 0 through positive values")
    estimates = []
    divergent = []
    for t in t_seq:
        profile = circle_maxima(m, float(t), radii, nodes)
        estimates.append(float(np.max(profile)) if np.all(np.isfinite(profile)) else np.inf)
        if _radius_trend_divergent(profile):
            divergent.append(float(t))
    tail = estimates[t_seq.size // 2:]
    tail_ts = t_seq[t_seq.size // 2:]
    tail_divergent = [t for t in divergent if t <= tail_ts[0] + 1e-15]
    tail_value = float(np.max(tail))
    if tail_divergent or not np.isfinite(tail_value):
        regime = "divergent"
    elif tail_value <= 1.0 + tol:
        regime = "contractive"
    else:
        regime = "finite"
    return LimsupProbe(tail_value, regime, [float(t) for t in t_seq], estimates,
                       divergent)


# -- gallery ----------------------------------------------------------

def unit_cocycle() -> Cocycle:
    """m_t = 1 (the unweighted case)."""
    return Cocycle.closed(lambda t, z: np.ones_like(z), name="unit")


def exp_growth_cocycle() -> Cocycle:
    """m_t = e^t; constant in z, so a cocycle for every flow."""
    return Cocycle.closed(lambda t, z: np.full_like(z, np.exp(t)), name="exp-growth")


def poisson_blowup_cocycle() -> Cocycle:
    """m_t(z) = exp(t (1+z)/(1-z)); a cocycle for the identity flow with
    unbounded circle maxima for every t > 0."""
    def mp(t, z):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(t * (1.0 + z) / (1.0 - z))
    return Cocycle.closed(mp, name="poisson-blowup")


def resolve_cocycle(text: str, flow: Semiflow) -> Cocycle:
    """Gallery lookup from a spec string.

    Supported forms: ``unit``, ``derivative``, ``exp-growth``,
    ``poisson-blowup``, ``coboundary:z``, ``coboundary:z^k``,
    ``coboundary:affine-power:<gamma>`` for w = (1-z)^gamma.
    """
    from .analytic import principal_power  # local to avoid cycles in docs tooling

    parts = [p.strip() for p in str(text).split(":")]
    head = parts[0]
    if head == "unit":
        return unit_cocycle()
    if head == "derivative":
        return Cocycle.derivative(flow)
    if head == "exp-growth":
        return exp_growth_cocycle()
    if head == "poisson-blowup":
        return poisson_blowup_cocycle()
    if head == "coboundary":
        if len(parts) < 2:
            raise PreconditionError("coboundary spec needs a weight name")
        wname = parts[1]
        if wname == "z":
            return make_coboundary(AnalyticFn.identity(), flow, zero_candidates=(0.0,))
        if wname.startswith("z^"):
            k = int(wname[2:])
            return make_coboundary(AnalyticFn.monomial(k), flow,
                                   zero_candidates=(0.0,) if k else ())
        if wname == "affine-power":
            gamma = float(parts[2]) if len(parts) > 2 else 1.0
            base = AnalyticFn(lambda z: 1.0 - z, label="1-z")
            return make_coboundary(principal_power(base, gamma), flow)
        raise PreconditionError(f"unknown coboundary weight {wname!r}")
    raise PreconditionError(f"unknown gallery cocycle {text!r}")
