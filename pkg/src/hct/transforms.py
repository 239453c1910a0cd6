"""Forward transforms: one-sided Laplace, two-sided Laplace, and Mellin.

The one-sided transform of an original f at p with phase u is

    F(p; zeta) = integral_0^inf f(t) exp(-u(p, t; zeta)) dt,

convergent in the half space Re(p) > s0.  The two-sided variant integrates
over the whole axis and converges in the strip s0 < Re(p) < s1; it is
evaluated as the sum of two one-sided integrals, the t < 0 part being the
one-sided transform of f(-t) at -p (the phase satisfies u(p,-t;z) = u(-p,t;z)
for both kernels).  The Mellin transform is the two-sided transform of
g(e^t) with p -> -p and zeta -> -zeta.

The multiplication order inside the integrand is literally f(t) * exp(-u);
for r >= 2 the factors do not commute, so the order is load-bearing and
pinned by tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .algebra import CDNumber, coeff_mul
from .errors import ContractViolationError, ConvergenceDomainError, DivergenceError
from .kernel import LINEAR, KernelSpec, kernel_weight_batch, osc_rate
from .quadrature import (IntegrandProfile, QuadratureResult,
                         integrate_interval, integrate_semi_axis)

DOMAIN_MARGIN = 1e-6

RIGHT_AXIS = "right_axis"
TWO_SIDED = "two_sided"
POSITIVE_AXIS_MULTIPLICATIVE = "positive_axis_multiplicative"
_SUPPORTS = (RIGHT_AXIS, TWO_SIDED, POSITIVE_AXIS_MULTIPLICATIVE)


@dataclass(frozen=True)
class Original:
    """An admissible time function together with its growth data.

    ``fn`` maps a float array (N,) to either a real array (N,) or a
    coefficient array (N, d).  For right-axis support the function is forced
    to zero for t < 0.  ``s0`` is the right growth index (|f| < C exp(s0 t)
    for t >= 0); ``s1`` the left decay index (|f(t)| < C exp(s1 t) for t < 0,
    i.e. f(-t) decays like exp(-s1 t)); one-sided originals use s1 = +inf.
    For multiplicative (Mellin) support, (s0, s1) are directly the strip
    endpoints in p.
    """

    fn: callable
    support: str = RIGHT_AXIS
    s0: float = 0.0
    s1: float = math.inf
    bound_const: float = 1.0
    label: str = ""
    osc_hint: float = 0.0          # dominant own frequency, improves meshes
    singular_origin: bool = False  # integrable endpoint singularity at t=0
    polynomial_degree: float = 0.0  # |f| <= C t^m e^{s0 t}; m eats half the decay budget
    truncate: object = None        # optional (p0, tol) -> (T, tail) for the t -> +inf tail
    truncate_left: object = None   # same for the t -> -inf tail (two-sided originals)

    def __post_init__(self):
        if self.support not in _SUPPORTS:
            raise ContractViolationError(f"unknown support {self.support!r}")
        if self.bound_const <= 0:
            raise ContractViolationError("bound_const must be positive")

    def sample(self, ts, dim: int) -> np.ndarray:
        """Values as rows of ``dim`` coefficients."""
        ts = np.asarray(ts, dtype=float)
        vals = np.asarray(self.fn(ts), dtype=float)
        if vals.ndim == 1:
            out = np.zeros((len(ts), dim))
            out[:, 0] = vals
        else:
            if vals.shape[1] > dim:
                raise ContractViolationError("original has more components than requested")
            out = np.zeros((len(ts), dim))
            out[:, : vals.shape[1]] = vals
        if self.support == RIGHT_AXIS:
            out[ts < 0.0] = 0.0
        return out

    def __call__(self, t: float) -> CDNumber:
        probe = np.asarray(self.fn(np.array([float(t)])), dtype=float)
        dim = 2 if probe.ndim == 1 else max(2, probe.shape[1])
        return CDNumber(self.sample(np.array([float(t)]), dim)[0])

    def reflected(self) -> "Original":
        """f(-t) as a right-axis original (used for the t < 0 half)."""
        if self.support == RIGHT_AXIS:
            raise DivergenceError("one-sided original has no left half")
        return Original(
            fn=lambda ts: self.fn(-np.asarray(ts, dtype=float)),
            support=RIGHT_AXIS,
            s0=-self.s1,
            bound_const=self.bound_const,
            label=f"{self.label}(-t)",
            osc_hint=self.osc_hint,
            polynomial_degree=self.polynomial_degree,
            truncate=self.truncate_left,
        )


@dataclass(frozen=True)
class TransformRequest:
    original: Original
    kernel: KernelSpec = LINEAR
    p: CDNumber = None
    zeta: CDNumber | None = None
    tol: float = 1e-10


def _level(req: TransformRequest) -> int:
    lvl = req.p.level
    if req.zeta is not None:
        lvl = max(lvl, req.zeta.level)
    if req.kernel.variant == "spherical":
        lvl = max(lvl, 2)
    return lvl


def laplace_one_sided(req: TransformRequest) -> QuadratureResult:
    """F(p; zeta) over [0, inf); requires Re(p) > s0 + margin."""
    f, p = req.original, req.p
    if f.support == POSITIVE_AXIS_MULTIPLICATIVE:
        raise ContractViolationError("multiplicative originals take the Mellin transform")
    if p.re < f.s0 + DOMAIN_MARGIN:
        raise ConvergenceDomainError(
            f"Re(p) = {p.re} not above growth index s0 = {f.s0}")
    lvl = _level(req)
    p = p.embed(lvl)
    zeta = CDNumber.zero(lvl) if req.zeta is None else req.zeta.embed(lvl)
    dim = 2**lvl

    def integrand(ts):
        rows = f.sample(ts, dim)
        weight = kernel_weight_batch(req.kernel, p, ts, zeta)
        return coeff_mul(rows, weight)

    osc = osc_rate(req.kernel, p) + f.osc_hint
    if f.truncate is not None:
        t_cut, tail = f.truncate(p.re, 0.5 * req.tol)
        width = min(1.0, math.pi / max(1.0, osc))
        res = integrate_interval(integrand, 0.0, t_cut, 0.5 * req.tol,
                                 max_width=width, singular_left=f.singular_origin)
        return QuadratureResult(res.value, res.err_estimate + tail,
                                res.panels_used, t_cut)
    decay = p.re - f.s0
    if not math.isfinite(decay):
        raise ContractViolationError(
            "super-exponential decay needs a truncation override on the original")
    bound = f.bound_const * math.exp(-zeta.re)
    m = f.polynomial_degree
    if m > 0.0:
        # |t^m f0| <= C (m/(e d/2))^m e^{(s0 + d/2) t}: spend half the budget
        decay = 0.5 * decay
        bound = bound * (m / (math.e * decay)) ** m
    profile = IntegrandProfile(decay_rate=decay, osc_rate=osc, bound_const=bound)
    return integrate_semi_axis(integrand, profile, req.tol,
                               singular_left=f.singular_origin)


def laplace_two_sided(req: TransformRequest) -> QuadratureResult:
    """F(p; zeta) over the whole axis; requires s0 < Re(p) < s1."""
    f, p = req.original, req.p
    if f.support != TWO_SIDED:
        raise ContractViolationError("two-sided transform needs a two-sided original")
    if f.s1 <= f.s0:
        raise DivergenceError(f"empty convergence strip ({f.s0}, {f.s1})")
    if not (f.s0 + DOMAIN_MARGIN <= p.re <= f.s1 - DOMAIN_MARGIN):
        raise ConvergenceDomainError(
            f"Re(p) = {p.re} outside the strip ({f.s0}, {f.s1})")
    right = replace(f, support=RIGHT_AXIS, s1=math.inf)
    plus = laplace_one_sided(replace(req, original=right))
    minus = laplace_one_sided(replace(req, original=f.reflected(), p=-p))
    return QuadratureResult(
        value=plus.value + minus.value,
        err_estimate=plus.err_estimate + minus.err_estimate,
        panels_used=plus.panels_used + minus.panels_used,
        truncation_point=max(plus.truncation_point, minus.truncation_point),
    )


def mellin_forward(g: Original, p: CDNumber, zeta: CDNumber | None = None,
                   tol: float = 1e-10, kernel: KernelSpec = LINEAR) -> QuadratureResult:
    """Mellin transform of g over (0, inf), strip s0 < Re(p) < s1.

    Reduces to the two-sided transform of f(t) = g(e^t) at -p, -zeta by the
    substitution t = ln(tau).
    """
    if g.support != POSITIVE_AXIS_MULTIPLICATIVE:
        raise ContractViolationError("Mellin transform needs multiplicative support")
    f = Original(
        fn=lambda ts: g.fn(np.exp(np.asarray(ts, dtype=float))),
        support=TWO_SIDED,
        s0=-g.s1,
        s1=-g.s0,
        bound_const=g.bound_const,
        label=f"{g.label}(e^t)",
        osc_hint=g.osc_hint,
        truncate=g.truncate,
        truncate_left=g.truncate_left,
    )
    nz = None if zeta is None else -zeta
    return laplace_two_sided(TransformRequest(f, kernel, -p, nz, tol))


def exp_tail_truncate(rate: float, power: float = 1.0, bound: float = 1.0):
    """Truncation override for |f(t)| <= bound * exp(-rate * e^{power t}) tails
    (originals of Mellin pairs that decay faster than any power of tau).

    Returns (T, tail) with int_T^inf |f| e^{-p0 t} dt <= tail <= requested tol.
    """
    def trunc(p0: float, tol: float) -> tuple[float, float]:
        target = math.log(max(bound / max(tol, 1e-300), 2.0)) + 2.0
        t_cut = 1.0
        while rate * math.exp(power * t_cut) - abs(p0) * t_cut < target + 1.0:
            t_cut += 0.5
            if t_cut > 400.0:
                raise ContractViolationError("tail truncation failed to settle")
        tail = bound * math.exp(-(rate * math.exp(power * t_cut) - abs(p0) * t_cut))
        return t_cut, tail

    return trunc


@dataclass(frozen=True)
class GrowthEstimate:
    s0: float
    s1: float
    bound_const: float
    heuristic: bool = True


def estimate_growth(fn, support: str = RIGHT_AXIS, margin: float = 0.45) -> GrowthEstimate:
    """Least-squares fit of ln|f| on a probe grid, padded by a safety margin.

    Heuristic: intended for user-supplied sampled originals lacking declared
    indices.  Conservative in the sense that the returned strip is shrunk by
    ``margin`` on each available side.
    """
    ts = np.linspace(1.0, 30.0, 60)

    def fit_slope(values):
        vals = np.asarray(values, dtype=float)
        if vals.ndim > 1:
            vals = np.linalg.norm(vals, axis=1)
        if not np.all(np.isfinite(vals)):
            raise ContractViolationError("non-finite sample in growth probe")
        mag = np.maximum(np.abs(vals), 1e-300)
        slope, intercept = np.polyfit(ts, np.log(mag), 1)
        return float(slope), float(math.exp(min(intercept, 300.0)))

    if support == POSITIVE_AXIS_MULTIPLICATIVE:
        right_slope, c_right = fit_slope(fn(np.exp(ts)))
        left_slope, c_left = fit_slope(fn(np.exp(-ts)))
        # |g| ~ tau^a near 0 gives strip lower bound -a; ~ tau^-b at inf gives b
        s0 = -left_slope + margin
        s1 = -right_slope - margin
        return GrowthEstimate(s0, s1, max(c_right, c_left, 1.0))
    right_slope, c_right = fit_slope(fn(ts))
    s0 = right_slope + margin
    if support == RIGHT_AXIS:
        return GrowthEstimate(s0, math.inf, max(c_right, 1.0))
    left_slope, c_left = fit_slope(fn(-ts))
    return GrowthEstimate(s0, -left_slope - margin, max(c_right, c_left, 1.0))
