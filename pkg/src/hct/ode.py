"""Operational-calculus solver for constant-coefficient linear ODEs over A_r.

For L[x] = x^{(n)} a_0 + ... + x' a_{n-1} + x a_n = f(t) with initial values
x(0) = x_0, ..., x^{(n-1)}(0) = x_{n-1}, the transform turns the problem into

    X(p) A(p) = F(p) + B(p),
    A(p) = p^n a_0 + p^{n-1} a_1 + ... + a_n,
    B(p) = x_0 (p^{n-1} a_0 + ... + a_{n-1}) + x_1 (p^{n-2} a_0 + ... + a_{n-2})
           + ... + x_{n-1} a_0,

solved by right division X = (F + B) A^{-1} and inverted back.  Coefficients
multiply derivatives from the right everywhere; this ordering is meaningful
for quaternionic coefficients and is never silently commuted.

Admissible coefficient domains: quaternions at level 2, reals at any level.
Real coefficients give a real-denominator rational image and the residue
path; quaternionic ones fall back to line (Bromwich) inversion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import CDNumber, cd_inverse
from .catalog import get_pair
from .errors import ContractViolationError, UnsupportedError
from .inversion import RationalImage, bromwich_invert, residue_invert_grid
from .kernel import LINEAR
from .transforms import Original, TransformRequest, laplace_one_sided

QUATERNION_COEFFS = "quaternion_coeffs"
REAL_COEFFS = "real_coeffs"

#: forcings available without a catalog pair
_BUILTIN_FORCINGS = ("zero", "step", "sin")


def _as_cd(x, level):
    if isinstance(x, CDNumber):
        return x.embed(level)
    return CDNumber.from_real(float(x), level)


@dataclass(frozen=True)
class ForcingSpec:
    """Either a catalog pair name with parameters, a builtin, or a raw Original."""

    pair: str | None = None
    params: dict = field(default_factory=dict)
    original: Original | None = None
    scale: CDNumber | float = 1.0  # constant left factor: forcing = scale * f(t)

    def resolve(self, level: int):
        """(original, rational_image | None, image_callable | None)."""
        sc = _as_cd(self.scale, level)
        if self.original is not None:
            return self._scaled(self.original, sc, level), None, None
        name = self.pair or "zero"
        if name == "zero":
            zero = Original(lambda ts: np.zeros_like(np.asarray(ts, dtype=float)),
                            s0=0.0, label="zero")
            return zero, RationalImage((CDNumber.zero(level),
                                        ), ((0.0, 1.0),)), None
        if name == "step":
            name = "step"
        pair = get_pair(name)
        params = {**pair.defaults, **self.params}
        orig = self._scaled(pair.original(**params), sc, level)
        rational = _pair_rational(name, params, sc, level)
        image = None
        if rational is None:
            def image(p, zeta=None):
                return sc * pair.image(p, zeta, **params)
        return orig, rational, image

    @staticmethod
    def _scaled(orig: Original, sc: CDNumber, level: int) -> Original:
        dim = 2**level

        def fn(ts):
            from .algebra import coeff_mul
            rows = orig.sample(np.asarray(ts, dtype=float), dim)
            return coeff_mul(np.broadcast_to(sc.coeffs, rows.shape), rows)

        return Original(fn, orig.support, orig.s0, orig.s1,
                        orig.bound_const * max(1.0, float(np.linalg.norm(sc.coeffs))),
                        label=f"scaled({orig.label})", osc_hint=orig.osc_hint,
                        singular_origin=orig.singular_origin,
                        polynomial_degree=orig.polynomial_degree,
                        truncate=orig.truncate)


def _pair_rational(name: str, params: dict, sc: CDNumber, level: int) -> RationalImage | None:
    """Rational image (with real denominator) for pairs that have one."""
    w = params.get("omega", 1.0)
    a = params.get("a", 1.0)
    b = params.get("b", 0.5)
    n = params.get("n", 1)
    one = CDNumber.one(level)
    if name == "step":
        return RationalImage((sc,), ((0.0, 1.0),))
    if name == "sin":
        return RationalImage((sc * w,), ((w * w, 0.0, 1.0),))
    if name == "cos":
        return RationalImage((CDNumber.zero(level), sc), ((w * w, 0.0, 1.0),))
    if name == "sinh":
        return RationalImage((sc * w,), ((-w * w, 0.0, 1.0),))
    if name == "cosh":
        return RationalImage((CDNumber.zero(level), sc), ((-w * w, 0.0, 1.0),))
    if name == "t_pow_n":
        num = [CDNumber.zero(level)] * 0 + [sc * float(math.factorial(n))]
        return RationalImage(tuple(num), tuple([(0.0, 1.0)] * (n + 1)))
    if name == "damped_sin":
        return RationalImage((sc * a,), ((b * b + a * a, 2 * b, 1.0),))
    if name == "damped_cos":
        return RationalImage((sc * b, sc), ((b * b + a * a, 2 * b, 1.0),))
    if name == "damped_t_pow":
        return RationalImage((sc * float(math.factorial(n)),),
                             tuple([(b, 1.0)] * (n + 1)))
    return None


@dataclass(frozen=True)
class ODEProblem:
    """coefficients a_0..a_n (a_0 first, a_0 != 0), initial values, forcing."""

    coefficients: tuple
    initial_values: tuple
    forcing: ForcingSpec = field(default_factory=ForcingSpec)
    value_domain: str = REAL_COEFFS
    level: int = 2

    def __post_init__(self):
        coeffs = tuple(_as_cd(c, self.level) for c in self.coefficients)
        ics = tuple(_as_cd(x, self.level) for x in self.initial_values)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "initial_values", ics)
        if float(np.linalg.norm(coeffs[0].coeffs)) == 0.0:
            raise ContractViolationError("leading coefficient a_0 must be nonzero")
        if len(ics) != self.order:
            raise ContractViolationError(
                f"need {self.order} initial values, got {len(ics)}")
        if self.value_domain not in (QUATERNION_COEFFS, REAL_COEFFS):
            raise ContractViolationError(f"unknown value domain {self.value_domain!r}")
        if self.value_domain == QUATERNION_COEFFS and self.level != 2:
            raise ContractViolationError("quaternionic coefficients require level 2")
        if self.value_domain == REAL_COEFFS:
            for c in coeffs:
                if np.any(c.coeffs[1:] != 0.0):
                    raise ContractViolationError(
                        "real_coeffs domain admits real coefficients only")

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def real_coefficient_list(self) -> list[float] | None:
        if self.value_domain != REAL_COEFFS:
            return None
        return [float(c.re) for c in self.coefficients]


@dataclass(frozen=True)
class ImageEquation:
    """X(p) A(p) = F(p) + B(p); A ascending real or CD, B ascending CD."""

    a_poly: tuple          # ascending; floats when real, CDNumber otherwise
    b_poly: tuple          # ascending CDNumber
    forcing_original: Original
    forcing_rational: RationalImage | None
    forcing_image: object | None
    level: int


def build_image_equation(prob: ODEProblem) -> ImageEquation:
    """Assemble A(p) and B(p) exactly as above (powers left, coefficients right)."""
    n = prob.order
    lvl = prob.level
    a = prob.coefficients  # a_0 ... a_n
    a_poly_cd = [a[n - k] for k in range(n + 1)]  # coefficient of p^k is a_{n-k}
    real = prob.real_coefficient_list()
    if real is not None:
        a_poly = tuple(real[n - k] for k in range(n + 1))
    else:
        a_poly = tuple(a_poly_cd)
    b_poly = [CDNumber.zero(lvl) for _ in range(max(n, 1))]
    for k, xk in enumerate(prob.initial_values):
        # x_k (p^{n-1-k} a_0 + p^{n-2-k} a_1 + ... + a_{n-1-k})
        for m in range(0, n - k):
            b_poly[n - 1 - k - m] = b_poly[n - 1 - k - m] + xk * a[m]
    forcing_original, rational, image = prob.forcing.resolve(lvl)
    return ImageEquation(a_poly, tuple(b_poly), forcing_original, rational, image, lvl)


def solve_image(eq: ImageEquation):
    """X(p) = (F(p) + B(p)) A(p)^{-1}.

    Returns a RationalImage when the forcing image is rational with a real
    denominator and A is real; otherwise an evaluatable p-function.
    """
    real_a = all(not isinstance(c, CDNumber) for c in eq.a_poly)
    if real_a and eq.forcing_rational is not None:
        fr = eq.forcing_rational
        den_f = fr.den_coeffs()
        num = [CDNumber.zero(eq.level) for _ in
               range(max(len(fr.num), len(eq.b_poly) + len(den_f) - 1))]
        for j, c in enumerate(fr.num):
            num[j] = num[j] + c.embed(eq.level)
        for j, c in enumerate(eq.b_poly):       # B(p) * den_f(p), real den_f
            for k, d in enumerate(den_f):
                if d != 0.0:
                    num[j + k] = num[j + k] + c * float(d)
        factors = tuple(fr.den_factors) + (tuple(eq.a_poly),)
        return RationalImage(tuple(num), factors)

    def x_image(p: CDNumber, zeta=None, tol: float = 1e-10) -> CDNumber:
        lvl = max(p.level, eq.level)
        pe = p.embed(lvl)
        if eq.forcing_rational is not None:
            f_val = eq.forcing_rational(pe)
        elif eq.forcing_image is not None:
            f_val = eq.forcing_image(pe, zeta)
        else:
            f_val = laplace_one_sided(
                TransformRequest(eq.forcing_original, LINEAR, pe, zeta, tol)).value
        b_val = CDNumber.zero(lvl)
        ppow = CDNumber.one(lvl)
        for k, c in enumerate(eq.b_poly):
            if k > 0:
                ppow = ppow * pe
            b_val = b_val + (c.embed(lvl) if isinstance(c, CDNumber) else float(c)) * ppow
        a_val = CDNumber.zero(lvl)
        ppow = CDNumber.one(lvl)
        for k, c in enumerate(eq.a_poly):
            if k > 0:
                ppow = ppow * pe
            term = ppow * (c.embed(lvl) if isinstance(c, CDNumber) else float(c))
            a_val = a_val + term
        return (f_val + b_val) * cd_inverse(a_val)

    return x_image


def _fd_weights(order: int, stencil: np.ndarray) -> np.ndarray:
    """Finite-difference weights on the given stencil offsets (Vandermonde)."""
    m = len(stencil)
    v = np.vander(stencil, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(v, rhs)


def residual_report(prob: ODEProblem, ts: np.ndarray, xs: np.ndarray,
                    f_rows: np.ndarray) -> dict:
    """max over interior grid points of |L[x] - f| / (1 + |f|), with 7-point
    finite-difference derivatives."""
    n = prob.order
    h = float(ts[1] - ts[0])
    npts = 7
    half = npts // 2
    if len(ts) < npts + 2:
        raise ContractViolationError("grid too short for the defect check")
    stencil = np.arange(-half, half + 1, dtype=float)
    interior = slice(half, len(ts) - half)
    acc = np.zeros_like(xs[interior])
    from .algebra import coeff_mul
    # L[x] = sum_k x^{(n-k)} a_k  (a_0 with the top derivative)
    for k, a in enumerate(prob.coefficients):
        dorder = n - k
        if dorder == 0:
            deriv = xs[interior]
        else:
            w = _fd_weights(dorder, stencil) / h**dorder
            deriv = sum(w[i] * xs[i: i + len(ts) - npts + 1] for i in range(npts))
        acc = acc + coeff_mul(deriv, np.broadcast_to(a.coeffs, deriv.shape))
    resid = acc - f_rows[interior]
    scale = 1.0 + np.linalg.norm(f_rows[interior], axis=1)
    rel = np.linalg.norm(resid, axis=1) / scale
    return {"max_defect": float(np.max(rel)), "grid_step": h,
            "interior_points": int(rel.shape[0])}


def solve_ode(prob: ODEProblem, t_grid, method: str = "residue",
              tol: float = 1e-6, with_report: bool = True):
    """Sample the operational solution on a grid.

    Returns (values (N, 2^level), report).  The residue method needs real
    coefficients and a rational forcing image; quaternionic data falls back
    to the Bromwich path automatically.
    """
    ts = np.asarray(t_grid, dtype=float)
    if np.any(ts < 0.0):
        raise ContractViolationError("the operational solution lives on t >= 0")
    eq = build_image_equation(prob)
    x_img = solve_image(eq)
    if method == "residue" and not isinstance(x_img, RationalImage):
        method = "bromwich"
    if method == "residue":
        xs = residue_invert_grid(x_img, ts)
    elif method == "bromwich":
        if isinstance(x_img, RationalImage):
            a_line = max((rho.real for rho, _ in x_img.poles()), default=0.0) + 0.7
            image = x_img
        else:
            a_line = _line_abscissa(eq)
            image = _CallableImage(x_img, eq.level)
        rows = []
        for t in ts:
            if t == 0.0:
                rows.append(_bromwich_zero_time(image, a_line, eq.level, tol))
            else:
                val = bromwich_invert(image, a=a_line, t=float(t), tol=tol)
                rows.append(val.coeffs)
        xs = np.vstack(rows)
    else:
        raise UnsupportedError(f"unknown method {method!r}")
    dim = xs.shape[1]
    report = {"method": method}
    if with_report:
        h = min(0.01, (ts[-1] - ts[0]) / max(len(ts) - 1, 1) if len(ts) > 1 else 0.01)
        t_dense = np.arange(ts[0], ts[-1] + h / 2, h)
        if method == "residue":
            xs_dense = residue_invert_grid(x_img, t_dense)
        else:
            xs_dense = np.vstack([
                bromwich_invert(image, a=a_line, t=float(t), tol=tol).coeffs
                if t > 0 else _bromwich_zero_time(image, a_line, eq.level, tol)
                for t in t_dense])
        f_rows = eq.forcing_original.sample(t_dense, dim)
        report.update(residual_report(prob, t_dense, xs_dense, f_rows))
    return xs, report


class _CallableImage:
    """Adapter giving a callable image a batched line evaluation."""

    def __init__(self, fn, level):
        self.fn = fn
        self.level = level

    def __call__(self, p):
        return self.fn(p)

    def eval_line(self, a, s, thetas):
        rows = []
        for th in thetas:
            rows.append(self.fn(a + float(th) * s).coeffs)
        return np.vstack(rows)


def _line_abscissa(eq: ImageEquation) -> float:
    """Line position for quaternion-coefficient problems: clear the zeros of
    the real polynomial |A|^2-ish bound by a crude norm estimate."""
    norms = [float(np.linalg.norm(c.coeffs)) if isinstance(c, CDNumber) else abs(c)
             for c in eq.a_poly]
    lead = norms[-1]
    bound = 1.0 + max(n / lead for n in norms[:-1]) if len(norms) > 1 else 1.0
    return bound + max(eq.forcing_original.s0, 0.0) + 0.5


def _bromwich_zero_time(image, a_line, level, tol):
    """One-sided limit x(0+) by cubic extrapolation from small positive times."""
    hs = np.array([0.02, 0.04, 0.06, 0.08])
    vals = np.vstack([bromwich_invert(image, a=a_line, t=float(h), tol=tol).coeffs
                      for h in hs])
    # degree-3 extrapolation to 0
    coef = np.array([4.0, -6.0, 4.0, -1.0])
    return coef @ vals
