"""Machine-checkable library of closed-form transform pairs.

Every pair couples an evaluatable original (with declared growth data) to a
closed-form image valid on a stated strip, plus the kernel it belongs to.
``verify_pair`` replays the forward transform by quadrature at seeded probe
points and reports the deviation from the closed form, which is the
verification backbone of the repository: the catalog is only trusted because
this check passes.

Closed forms at hypercomplex p are evaluated through the commutative plane
spanned by 1 and the imaginary direction of p (``slice_apply``), where every
holomorphic formula reduces to ordinary complex arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sps

from .algebra import CDNumber, cd_exp, cd_inverse, cd_ln_principal, cd_pow_real
from .errors import ContractViolationError, DivergenceError
from .kernel import LINEAR, SPHERICAL, KernelSpec
from .transforms import (
    POSITIVE_AXIS_MULTIPLICATIVE,
    RIGHT_AXIS,
    TWO_SIDED,
    Original,
    TransformRequest,
    exp_tail_truncate,
    laplace_one_sided,
    laplace_two_sided,
    mellin_forward,
)

# ---------------------------------------------------------------------------
# slice functional calculus
# ---------------------------------------------------------------------------

def slice_apply(fn, p: CDNumber) -> CDNumber:
    """Apply a complex-analytic scalar function to p through its slice.

    p = x + |p'| S with unit imaginary S; the value is Re(w) + Im(w) S for
    w = fn(x + i |p'|).  For purely real p the function value must be real.
    """
    x = p.re
    ap = np.array(p.coeffs, copy=True)
    ap[0] = 0.0
    r = float(np.linalg.norm(ap))
    w = complex(fn(complex(x, r)))
    if r == 0.0:
        if abs(w.imag) > 1e-12 * max(1.0, abs(w)):
            raise ContractViolationError("slice function not real on the real axis")
        return CDNumber.from_real(w.real, p.level)
    out = (w.imag / r) * ap
    out[0] = w.real
    return CDNumber(out, p.level)


# ---------------------------------------------------------------------------
# damped trigonometric moments (closed forms for int_0^inf t^n e^{-a0 t} trig)
# ---------------------------------------------------------------------------

def damped_trig_moments(n: int, alpha0: float, alpha1: float, beta: float) -> tuple[float, float]:
    """(T, S) with T = int_0^inf t^n e^{-a0 t} cos(a1 t + b) dt and S the sine
    analogue, by the binomial closed forms.  Requires a0 > 0."""
    if alpha0 <= 0:
        raise DivergenceError("damped trig moment needs alpha0 > 0")
    n = int(n)
    if n < 0:
        raise ContractViolationError("moment order must be >= 0")
    a = sum(
        math.comb(n + 1, 2 * q) * (-1) ** q * alpha0 ** (n + 1 - 2 * q) * alpha1 ** (2 * q)
        for q in range(0, (n + 1) // 2 + 1)
    )
    b = sum(
        math.comb(n + 1, 2 * q + 1) * (-1) ** q * alpha0 ** (n - 2 * q) * alpha1 ** (2 * q + 1)
        for q in range(0, n // 2 + 1)
    )
    scale = math.factorial(n) / (alpha0 * alpha0 + alpha1 * alpha1) ** (n + 1)
    t_val = scale * (math.cos(beta) * a - math.sin(beta) * b)
    s_val = scale * (math.sin(beta) * a + math.cos(beta) * b)
    return t_val, s_val


def eval_Tn_Sn(n: int, alpha0: float, alpha1: float, beta: float) -> tuple[float, float]:
    """Spec-facing alias for ``damped_trig_moments``."""
    return damped_trig_moments(n, alpha0, alpha1, beta)


# ---------------------------------------------------------------------------
# finite trigonometric expansion engine
# ---------------------------------------------------------------------------

def trig_product_expand(factors):
    """Expand prod of cos/sin(A_m t + B_m) into a flat sum of single trig terms.

    ``factors`` is a sequence of ("cos"|"sin", A, B); the result is a list of
    (coef, "cos"|"sin", A, B) with prod = sum coef * trig(A t + B), exact.
    """
    terms = [(1.0, "cos", 0.0, 0.0)]
    for kind, a2, b2 in factors:
        new = []
        for coef, k1, a1, b1 in terms:
            sa, da = a1 + a2, a1 - a2
            sb, db = b1 + b2, b1 - b2
            if k1 == "cos" and kind == "cos":
                new += [(0.5 * coef, "cos", da, db), (0.5 * coef, "cos", sa, sb)]
            elif k1 == "sin" and kind == "cos":
                new += [(0.5 * coef, "sin", sa, sb), (0.5 * coef, "sin", da, db)]
            elif k1 == "cos" and kind == "sin":
                new += [(0.5 * coef, "sin", sa, sb), (-0.5 * coef, "sin", da, db)]
            else:
                new += [(0.5 * coef, "cos", da, db), (-0.5 * coef, "cos", sa, sb)]
        terms = new
    return terms


def spherical_monomial_image(n: int, p: CDNumber, zeta: CDNumber | None = None,
                             trig_factor=None, damp: float = 0.0) -> CDNumber:
    """Closed-form spherical-kernel image of t^n (one-sided), optionally with
    an extra oscillatory factor: original t^n * trig(w t + phi) * e^{-damp t}
    for trig_factor = ("cos"|"sin", w, phi).

    Each coefficient of exp(-u) is e^{-p0 t - z0} times a product of sines and
    cosines of the angles f_j = p_j t + z_j; expanding the products reduces
    every component to damped trig moments, which is exact.
    """
    lvl = max(p.level, 2 if zeta is None else max(2, zeta.level))
    p = p.embed(lvl)
    zeta = CDNumber.zero(lvl) if zeta is None else zeta.embed(lvl)
    rate = p.re + damp
    if rate <= 0:
        raise DivergenceError("spherical t^n image needs Re(p) + damp > 0")
    dim = p.dim
    out = np.zeros(dim)
    for k in range(dim):
        if k == 0:
            factors = [("cos", p.coeffs[1], zeta.coeffs[1])]
            sign = 1.0
        else:
            factors = [("sin", p.coeffs[1], zeta.coeffs[1])]
            factors += [("sin", p.coeffs[j], zeta.coeffs[j]) for j in range(2, k + 1)]
            if k < dim - 1:
                factors.append(("cos", p.coeffs[k + 1], zeta.coeffs[k + 1]))
            sign = -1.0
        if trig_factor is not None:
            factors = [tuple(trig_factor)] + factors
        acc = 0.0
        for coef, kind, a, b in trig_product_expand(factors):
            t_val, s_val = damped_trig_moments(n, rate, a, b)
            acc += coef * (t_val if kind == "cos" else s_val)
        out[k] = sign * acc
    return math.exp(-zeta.re) * CDNumber(out, lvl)


def quaternion_exp_image(zt: CDNumber, p: CDNumber) -> CDNumber:
    """Closed-form linear-kernel image of exp(zt * t) for quaternionic zt.

    Derived by expanding exp(zt t) exp(-p t) over the orthogonal frame
    {1, N1, N2, N1 N2} with N1 along zt' and N2 along the part of p'
    orthogonal to N1; each coefficient is a damped trig moment.
    """
    lvl = max(p.level, zt.level, 2)
    p, zt = p.embed(lvl), zt.embed(lvl)
    d = p.re - zt.re
    if d <= 0:
        raise DivergenceError("needs Re(p) > Re(zeta)")
    zp = zt.imag_vector()
    z1 = float(np.linalg.norm(zp.coeffs))
    pp = p.imag_vector()
    pn = float(np.linalg.norm(pp.coeffs))
    if z1 == 0.0:
        return slice_apply(lambda w: 1.0 / (w - zt.re), p)
    n1 = zp / z1
    if pn == 0.0:
        t0, s0 = damped_trig_moments(0, d, z1, 0.0)
        return t0 + s0 * n1
    p1 = float(np.dot(pp.coeffs, n1.coeffs))
    rest = pp - p1 * n1
    p2 = float(np.linalg.norm(rest.coeffs))
    w_plus, w_minus = z1 + pn, z1 - pn
    tp, sp = damped_trig_moments(0, d, w_plus, 0.0)
    tm, sm = damped_trig_moments(0, d, w_minus, 0.0)
    out = 0.5 * ((1.0 + p1 / pn) * tm + (1.0 - p1 / pn) * tp)
    out = out + n1 * (0.5 * ((1.0 - p1 / pn) * sp + (1.0 + p1 / pn) * sm))
    if p2 > 0.0:
        n2 = rest / p2
        out = out - n2 * (p2 / (2.0 * pn) * (sp - sm))
        out = out - (n1 * n2) * (p2 / (2.0 * pn) * (tm - tp))
    return out


# ---------------------------------------------------------------------------
# the pair registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransformPair:
    """A named original/image pair with parameter defaults and a strip."""

    name: str
    provenance: str
    make_original: callable = field(repr=False, default=None)
    make_image: callable = field(repr=False, default=None)
    kernel: KernelSpec = LINEAR
    defaults: dict = field(default_factory=dict)
    exceptional: bool = False
    conditional: bool = False
    transform: str = "one_sided"  # one_sided | two_sided | mellin

    def original(self, **params) -> Original:
        return self.make_original(**{**self.defaults, **params})

    def image(self, p: CDNumber, zeta: CDNumber | None = None, **params) -> CDNumber:
        return self.make_image(p, zeta, **{**self.defaults, **params})

    def strip(self, **params) -> tuple[float, float]:
        f = self.original(**params)
        return (f.s0, f.s1)


_PAIRS: dict[str, TransformPair] = {}


def _register(pair: TransformPair) -> TransformPair:
    if pair.name in _PAIRS:
        raise ContractViolationError(f"duplicate pair name {pair.name}")
    _PAIRS[pair.name] = pair
    return pair


def catalog_list() -> list[TransformPair]:
    """All shipped pairs, stable order."""
    return [_PAIRS[k] for k in sorted(_PAIRS)]


def get_pair(name: str) -> TransformPair:
    try:
        return _PAIRS[name]
    except KeyError:
        raise KeyError(f"no catalog pair named {name!r}; see catalog_list()") from None


def _require_zero_zeta(zeta):
    if zeta is not None and float(np.linalg.norm(zeta.coeffs)) != 0.0:
        raise ContractViolationError(
            "closed-form image is tabulated for zeta = 0; use the quadrature route")


def _inv(x: CDNumber) -> CDNumber:
    return cd_inverse(x)


# -- one-sided, linear kernel ------------------------------------------------

_register(TransformPair(
    name="step",
    provenance="unit step -> 1/p on Re p > 0",
    make_original=lambda: Original(lambda ts: np.ones_like(ts), RIGHT_AXIS,
                                   s0=0.0, bound_const=1.0, label="step"),
    make_image=lambda p, zeta: (_require_zero_zeta(zeta), _inv(p))[1],
))

_register(TransformPair(
    name="sin",
    provenance="sin(w t) -> w/(p^2+w^2)",
    defaults={"omega": 1.0},
    make_original=lambda omega: Original(lambda ts: np.sin(omega * ts), RIGHT_AXIS,
                                         s0=0.0, bound_const=1.0,
                                         osc_hint=abs(omega), label="sin"),
    make_image=lambda p, zeta, omega: (_require_zero_zeta(zeta),
                                       omega * _inv(p * p + omega * omega))[1],
))

_register(TransformPair(
    name="cos",
    provenance="cos(w t) -> p/(p^2+w^2)",
    defaults={"omega": 1.0},
    make_original=lambda omega: Original(lambda ts: np.cos(omega * ts), RIGHT_AXIS,
                                         s0=0.0, bound_const=1.0,
                                         osc_hint=abs(omega), label="cos"),
    make_image=lambda p, zeta, omega: (_require_zero_zeta(zeta),
                                       p * _inv(p * p + omega * omega))[1],
))

_register(TransformPair(
    name="sinh",
    provenance="sinh(w t) -> w/(p^2-w^2) on Re p > |w|",
    defaults={"omega": 1.0},
    make_original=lambda omega: Original(lambda ts: np.sinh(omega * ts), RIGHT_AXIS,
                                         s0=abs(omega), bound_const=1.0, label="sinh"),
    make_image=lambda p, zeta, omega: (_require_zero_zeta(zeta),
                                       omega * _inv(p * p - omega * omega))[1],
))

_register(TransformPair(
    name="cosh",
    provenance="cosh(w t) -> p/(p^2-w^2) on Re p > |w|",
    defaults={"omega": 1.0},
    make_original=lambda omega: Original(lambda ts: np.cosh(omega * ts), RIGHT_AXIS,
                                         s0=abs(omega), bound_const=1.0, label="cosh"),
    make_image=lambda p, zeta, omega: (_require_zero_zeta(zeta),
                                       p * _inv(p * p - omega * omega))[1],
))

def _exp_quat_original(zeta_c):
    zc = zeta_c if isinstance(zeta_c, CDNumber) else CDNumber(zeta_c)

    def fn(ts):
        ts = np.asarray(ts, dtype=float)
        z0 = zc.re
        zp = zc.imag_vector()
        r = float(np.linalg.norm(zp.coeffs))
        out = np.zeros((len(ts), zc.dim))
        if r == 0.0:
            out[:, 0] = np.exp(z0 * ts)
            return out
        axis = zp.coeffs / r
        out += np.outer(np.exp(z0 * ts) * np.sin(r * ts), axis)
        out[:, 0] = np.exp(z0 * ts) * np.cos(r * ts)
        return out

    return Original(fn, RIGHT_AXIS, s0=zc.re, bound_const=1.0,
                    osc_hint=float(np.linalg.norm(zc.coeffs[1:])), label="exp_quat")

_register(TransformPair(
    name="exp_quat",
    provenance="exp(c t) for quaternionic c; image verified numerically",
    defaults={"zeta_c": CDNumber([0.2, 0.8, 0.5, 0.0])},
    make_original=lambda zeta_c: _exp_quat_original(zeta_c),
    make_image=lambda p, zeta, zeta_c: (_require_zero_zeta(zeta),
                                        quaternion_exp_image(
                                            zeta_c if isinstance(zeta_c, CDNumber)
                                            else CDNumber(zeta_c), p))[1],
))

_register(TransformPair(
    name="t_pow_n",
    provenance="t^n -> n!/p^{n+1}",
    defaults={"n": 1},
    make_original=lambda n: Original(lambda ts: np.maximum(ts, 0.0) ** n, RIGHT_AXIS,
                                     s0=0.0, bound_const=1.0, label="t_pow_n",
                                     polynomial_degree=n),
    make_image=lambda p, zeta, n: (_require_zero_zeta(zeta),
                                   math.factorial(n) * cd_pow_real(p, -(n + 1)))[1],
))

_register(TransformPair(
    name="t_sin",
    provenance="t sin(w t) -> 2 w p/(p^2+w^2)^2",
    defaults={"omega": 1.0},
    make_original=lambda omega: Original(lambda ts: ts * np.sin(omega * ts), RIGHT_AXIS,
                                         s0=0.0, bound_const=1.0, osc_hint=abs(omega),
                                         label="t_sin", polynomial_degree=1),
    make_image=lambda p, zeta, omega: (_require_zero_zeta(zeta),
                                       2.0 * omega * p * cd_pow_real(p * p + omega**2, -2))[1],
))

_register(TransformPair(
    name="t_cos",
    provenance="t cos(w t) -> (p^2-w^2)/(p^2+w^2)^2",
    defaults={"omega": 1.0},
    make_original=lambda omega: Original(lambda ts: ts * np.cos(omega * ts), RIGHT_AXIS,
                                         s0=0.0, bound_const=1.0, osc_hint=abs(omega),
                                         label="t_cos", polynomial_degree=1),
    make_image=lambda p, zeta, omega: (_require_zero_zeta(zeta),
                                       (p * p - omega**2) * cd_pow_real(p * p + omega**2, -2))[1],
))

_register(TransformPair(
    name="damped_sin",
    provenance="e^{-b t} sin(a t) -> a/((p+b)^2+a^2)",
    defaults={"a": 1.0, "b": 0.5},
    make_original=lambda a, b: Original(lambda ts: np.exp(-b * ts) * np.sin(a * ts),
                                        RIGHT_AXIS, s0=-b, bound_const=1.0,
                                        osc_hint=abs(a), label="damped_sin"),
    make_image=lambda p, zeta, a, b: (_require_zero_zeta(zeta),
                                      a * _inv((p + b) * (p + b) + a * a))[1],
))

_register(TransformPair(
    name="damped_cos",
    provenance="e^{-b t} cos(a t) -> (p+b)/((p+b)^2+a^2)",
    defaults={"a": 1.0, "b": 0.5},
    make_original=lambda a, b: Original(lambda ts: np.exp(-b * ts) * np.cos(a * ts),
                                        RIGHT_AXIS, s0=-b, bound_const=1.0,
                                        osc_hint=abs(a), label="damped_cos"),
    make_image=lambda p, zeta, a, b: (_require_zero_zeta(zeta),
                                      (p + b) * _inv((p + b) * (p + b) + a * a))[1],
))

_register(TransformPair(
    name="damped_t_pow",
    provenance="t^n e^{-b t} -> n!/(p+b)^{n+1}",
    defaults={"n": 2, "b": 0.5},
    make_original=lambda n, b: Original(lambda ts: np.maximum(ts, 0.0) ** n * np.exp(-b * ts),
                                        RIGHT_AXIS, s0=-b, bound_const=1.0,
                                        label="damped_t_pow", polynomial_degree=n),
    make_image=lambda p, zeta, n, b: (_require_zero_zeta(zeta),
                                      math.factorial(n) * cd_pow_real(p + b, -(n + 1)))[1],
))

_register(TransformPair(
    name="t_pow_a",
    provenance="t^a -> Gamma(a+1) p^{-a-1}, a > -1 (exceptional for a < 0)",
    defaults={"a": -0.5},
    make_original=lambda a: Original(
        lambda ts: np.where(ts > 0.0, np.maximum(ts, 1e-300) ** a, 0.0),
        RIGHT_AXIS, s0=0.0, bound_const=1.0, label="t_pow_a",
        polynomial_degree=max(a, 0.0), singular_origin=a < 0.0),
    make_image=lambda p, zeta, a: (_require_zero_zeta(zeta),
                                   math.gamma(a + 1.0) * cd_pow_real(p, -(a + 1.0)))[1],
    exceptional=True,
))

_register(TransformPair(
    name="erfc_sqrt",
    provenance="erfc(a/(2 sqrt t)) -> e^{-a sqrt p}/p",
    defaults={"a": 1.0},
    make_original=lambda a: Original(
        lambda ts: sps.erfc(a / (2.0 * np.sqrt(np.maximum(ts, 1e-300)))),
        RIGHT_AXIS, s0=0.0, bound_const=1.0, label="erfc_sqrt"),
    make_image=lambda p, zeta, a: (_require_zero_zeta(zeta),
                                   slice_apply(lambda z: np.exp(-a * np.sqrt(z)) / z, p))[1],
))

_register(TransformPair(
    name="sinc",
    provenance="sin(t)/t -> arcctg(p) = pi/2 - arctan(p)",
    make_original=lambda: Original(lambda ts: np.sinc(ts / np.pi), RIGHT_AXIS,
                                   s0=0.0, bound_const=1.0, osc_hint=1.0, label="sinc"),
    make_image=lambda p, zeta: (_require_zero_zeta(zeta),
                                slice_apply(lambda z: np.pi / 2 - np.arctan(z), p))[1],
    conditional=True,
))

_register(TransformPair(
    name="sine_integral",
    provenance="Si(t) -> arcctg(p)/p",
    make_original=lambda: Original(lambda ts: sps.sici(np.maximum(ts, 0.0))[0], RIGHT_AXIS,
                                   s0=0.0, bound_const=2.0, osc_hint=1.0,
                                   label="sine_integral"),
    make_image=lambda p, zeta: (_require_zero_zeta(zeta),
                                _inv(p) * slice_apply(lambda z: np.pi / 2 - np.arctan(z), p))[1],
    conditional=True,
))

def _exp_diff_over_t(b, c):
    def fn(ts):
        ts = np.asarray(ts, dtype=float)
        tiny = np.abs(ts) < 1e-8
        safe = np.where(tiny, 1.0, ts)
        vals = (np.exp(b * safe) - np.exp(c * safe)) / safe
        limit = (b - c) * (1.0 + 0.5 * (b + c) * ts)
        return np.where(tiny, limit, vals)
    return fn

_register(TransformPair(
    name="exp_diff_over_t",
    provenance="(e^{b t}-e^{c t})/t -> Ln((p-c)/(p-b)) on Re p > max(b, c)",
    defaults={"b": 0.5, "c": -0.5},
    make_original=lambda b, c: Original(_exp_diff_over_t(b, c), RIGHT_AXIS,
                                        s0=max(b, c), bound_const=max(1.0, abs(b - c)),
                                        label="exp_diff_over_t"),
    make_image=lambda p, zeta, b, c: (_require_zero_zeta(zeta),
                                      cd_ln_principal((p - c) * _inv(p - b)))[1],
))

# -- two-sided, linear kernel -------------------------------------------------

_register(TransformPair(
    name="abs_exp_twosided",
    provenance="e^{-a|t|}/2 -> a/(a^2-p^2) on -a < Re p < a",
    defaults={"alpha": 1.0},
    make_original=lambda alpha: Original(lambda ts: 0.5 * np.exp(-alpha * np.abs(ts)),
                                         TWO_SIDED, s0=-alpha, s1=alpha,
                                         bound_const=0.5, label="abs_exp_twosided"),
    make_image=lambda p, zeta, alpha: (_require_zero_zeta(zeta),
                                       alpha * _inv(alpha * alpha - p * p))[1],
    transform="two_sided",
))

def _gauss_truncate(alpha):
    def trunc(p0, tol):
        ell = max(math.log(max(1.0 / max(tol, 1e-300), 1.0)), 1.0) + 5.0
        t_cut = (-p0 + math.sqrt(p0 * p0 + 4.0 * alpha * ell)) / (2.0 * alpha)
        t_cut = max(t_cut, 1.0)
        tail = math.exp(-alpha * t_cut**2 - p0 * t_cut) / max(2 * alpha * t_cut + p0, 1e-3)
        return t_cut, tail
    return trunc

_register(TransformPair(
    name="gauss_twosided",
    provenance="e^{-a t^2} -> sqrt(pi/a) e^{p^2/(4a)}, entire strip",
    defaults={"alpha": 1.0},
    make_original=lambda alpha: Original(lambda ts: np.exp(-alpha * ts * ts),
                                         TWO_SIDED, s0=-math.inf, s1=math.inf,
                                         bound_const=1.0, label="gauss_twosided",
                                         truncate=_gauss_truncate(alpha),
                                         truncate_left=_gauss_truncate(alpha)),
    make_image=lambda p, zeta, alpha: (_require_zero_zeta(zeta),
                                       math.sqrt(math.pi / alpha)
                                       * cd_exp(p * p / (4.0 * alpha)))[1],
    transform="two_sided",
))

_register(TransformPair(
    name="logistic_twosided",
    provenance="1/(e^t+1) -> -pi/sin(pi p) on -1 < Re p < 0",
    make_original=lambda: Original(lambda ts: 1.0 / (np.exp(np.minimum(ts, 700.0)) + 1.0),
                                   TWO_SIDED, s0=-1.0, s1=0.0,
                                   bound_const=1.0, label="logistic_twosided"),
    make_image=lambda p, zeta: (_require_zero_zeta(zeta),
                                slice_apply(lambda z: -np.pi / np.sin(np.pi * z), p))[1],
    transform="two_sided",
))

# -- Mellin pairs --------------------------------------------------------------

_register(TransformPair(
    name="mellin_beta",
    provenance="1/(1+tau) -> pi/sin(pi p) on 0 < Re p < 1",
    make_original=lambda: Original(lambda taus: 1.0 / (1.0 + taus),
                                   POSITIVE_AXIS_MULTIPLICATIVE, s0=0.0, s1=1.0,
                                   bound_const=1.0, label="mellin_beta"),
    make_image=lambda p, zeta: (_require_zero_zeta(zeta),
                                slice_apply(lambda z: np.pi / np.sin(np.pi * z), p))[1],
    transform="mellin",
))

_register(TransformPair(
    name="mellin_gamma",
    provenance="e^{-tau} -> Gamma(p) on Re p > 0",
    make_original=lambda: Original(lambda taus: np.exp(-np.minimum(taus, 700.0)),
                                   POSITIVE_AXIS_MULTIPLICATIVE, s0=0.0, s1=math.inf,
                                   bound_const=1.0, label="mellin_gamma",
                                   truncate=exp_tail_truncate(1.0, 1.0)),
    make_image=lambda p, zeta: (_require_zero_zeta(zeta),
                                slice_apply(lambda z: sps.gamma(z), p))[1],
    transform="mellin",
))

# -- spherical kernel ----------------------------------------------------------

_register(TransformPair(
    name="spherical_t_pow",
    provenance="t^n under the spherical kernel; image built from damped trig moments",
    defaults={"n": 1},
    make_original=lambda n: Original(lambda ts: np.maximum(ts, 0.0) ** n, RIGHT_AXIS,
                                     s0=0.0, bound_const=1.0, label="spherical_t_pow",
                                     polynomial_degree=n),
    make_image=lambda p, zeta, n: spherical_monomial_image(n, p, zeta),
    kernel=SPHERICAL,
))


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def forward_transform(pair: TransformPair, p: CDNumber, zeta: CDNumber | None = None,
                      tol: float = 1e-9, **params):
    """Quadrature evaluation of the pair's forward transform at p."""
    f = pair.original(**params)
    if pair.transform == "two_sided":
        return laplace_two_sided(TransformRequest(f, pair.kernel, p, zeta, tol))
    if pair.transform == "mellin":
        return mellin_forward(f, p, zeta, tol, pair.kernel)
    return laplace_one_sided(TransformRequest(f, pair.kernel, p, zeta, tol))


def probe_points(pair: TransformPair, seed: int = 42, count: int = 12,
                 level: int = 2, **params) -> list[CDNumber]:
    """Seeded probes spanning real, slice-complex, and full hypercomplex p
    inside the pair's strip."""
    rng = np.random.default_rng(seed)
    s0, s1 = pair.strip(**params)
    lo = max(s0, -2.0) + 0.3
    hi = min(s1, max(lo + 0.2, 3.0)) - 0.05 if s1 < math.inf else lo + 2.7
    dim = 2**level
    probes = []
    for k in range(count):
        re = float(rng.uniform(lo, hi)) if hi > lo else 0.5 * (s0 + s1)
        c = np.zeros(dim)
        c[0] = re
        if k % 3 == 1:
            c[1] = rng.uniform(-2.0, 2.0)
        elif k % 3 == 2:
            c[1:] = rng.uniform(-1.0, 1.0, size=dim - 1)
        probes.append(CDNumber(c, level))
    return probes


def verify_pair(pair: TransformPair, probes=None, tol: float = 1e-6,
                seed: int = 42, quad_tol: float | None = None, **params) -> list[dict]:
    """Compare forward quadrature against the closed-form image.

    Returns one record per probe: name, probe, relative deviation, pass flag.
    Failures are report entries, not exceptions.
    """
    if probes is None:
        probes = probe_points(pair, seed=seed, **params)
    if quad_tol is None:
        quad_tol = min(tol * 5e-3, 1e-8)
    records = []
    for p in probes:
        entry = {"suite": "catalog", "name": pair.name, "probe": str(p)}
        try:
            got = forward_transform(pair, p, tol=quad_tol, **params)
            want = pair.image(p, None, **params)
            want_e = want.embed(max(want.level, got.value.level))
            got_e = got.value.embed(want_e.level)
            dev = float(np.linalg.norm(got_e.coeffs - want_e.coeffs))
            rel = dev / max(1.0, float(np.linalg.norm(want_e.coeffs)))
            entry.update(dev=rel, err_estimate=got.err_estimate, ok=bool(rel <= tol))
        except Exception as exc:  # report, never raise
            entry.update(dev=math.inf, ok=False, error=f"{type(exc).__name__}: {exc}")
        records.append(entry)
    return records
