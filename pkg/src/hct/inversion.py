"""Recover originals from images.

Three routes are provided:

* ``bromwich_invert`` -- principal-value quadrature along the straight line
  p = a + S*theta with a doubling theta ladder (works for any image callable);
  the recovery is applied componentwise, i.e. with the measure d(theta) and a
  bare (2 pi)^{-1} prefactor, which agrees with the S~-prefactor form for
  images valued in the plane of the line and stays correct for images with
  left coefficients that do not commute with S;
* ``residue_invert_rational`` -- exact-form inversion of rational images with
  real-coefficient denominators through partial fractions over the complex
  plane span{1, i1} (poles are real or conjugate pairs, so the original
  combines exponential and trigonometric terms);
* ``series_invert`` -- termwise inversion of a Laurent tail at infinity,
  F = sum c_l p^{-l}  ->  f(t) = sum c_l t^{l-1}/(l-1)!.

``mellin_invert`` is the Bromwich route after the substitution t = ln(tau),
p -> -p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import CDNumber, cd_conj
from .errors import (
    AccuracyError,
    ConditioningError,
    ContractViolationError,
    ConvergenceDomainError,
    UnsupportedError,
)
from .kernel import LINEAR, KernelSpec
from .quadrature import _adaptive, check_line_direction, line_integrand

THETA_LADDER = (64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0, 4096.0, 8192.0, 16384.0)
MULTIPLICITY_CAP = 6
_CLUSTER_REL_RADIUS = 1e-8
_SEPARATION_REL_FLOOR = 1e-6


def _as_cd(x, level=1):
    if isinstance(x, CDNumber):
        return x
    return CDNumber.from_real(float(x), level)


def _trim(seq):
    out = list(seq)
    while len(out) > 1 and np.all(np.asarray(out[-1], dtype=float) == 0.0):
        out.pop()
    return out


@dataclass(frozen=True)
class RationalImage:
    """num(p) / den(p) with CDNumber numerator coefficients (ascending powers,
    coefficients multiplying p^j from the left) and a real-coefficient
    denominator kept as a list of factors (each ascending).

    Keeping the factors separate lets the residue path root-find each factor
    on its own, which preserves multiplicity information exactly when factors
    repeat (the common case for operational-calculus solutions).
    """

    num: tuple
    den_factors: tuple
    kernel: KernelSpec = LINEAR

    def __post_init__(self):
        num = tuple(_as_cd(c) for c in _trim(self.num))
        lvl = max(c.level for c in num)
        num = tuple(c.embed(lvl) for c in num)
        den = tuple(tuple(float(x) for x in _trim(f)) for f in self.den_factors)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den_factors", den)
        for f in den:
            if f[-1] == 0.0:
                raise ContractViolationError("denominator factor with zero leading coefficient")
        if self.den_degree < 1:
            raise ContractViolationError("denominator must have degree >= 1")
        if self.num_degree >= self.den_degree:
            raise ContractViolationError(
                "numerator degree must be below denominator degree")

    @classmethod
    def from_coeffs(cls, num, den, kernel: KernelSpec = LINEAR) -> "RationalImage":
        return cls(tuple(num), (tuple(den),), kernel)

    @property
    def level(self) -> int:
        return max(2, self.num[0].level)

    @property
    def num_degree(self) -> int:
        return len(self.num) - 1

    @property
    def den_degree(self) -> int:
        return sum(len(f) - 1 for f in self.den_factors)

    def den_coeffs(self) -> np.ndarray:
        acc = np.array([1.0])
        for f in self.den_factors:
            acc = np.convolve(acc, np.asarray(f, dtype=float))
        return acc

    def den_eval_complex(self, z: np.ndarray) -> np.ndarray:
        acc = np.ones_like(z)
        for f in self.den_factors:
            acc = acc * np.polyval(np.asarray(f, dtype=float)[::-1], z)
        return acc

    def eval_line(self, a: float, s: CDNumber, thetas: np.ndarray) -> np.ndarray:
        """Rows of coefficients along p = a + S*theta (slice arithmetic)."""
        lvl = max(self.level, s.level)
        dim = 2**lvl
        z = a + 1j * np.asarray(thetas, dtype=float)
        invden = 1.0 / self.den_eval_complex(z)
        out = np.zeros((len(z), dim))
        s_full = s.embed(lvl)
        w = invden
        for j, c in enumerate(self.num):
            if j > 0:
                w = invden * z**j
            cj = c.embed(lvl)
            cjs = cj * s_full
            out += np.real(w)[:, None] * cj.coeffs[None, :]
            out += np.imag(w)[:, None] * cjs.coeffs[None, :]
        return out

    def __call__(self, p: CDNumber) -> CDNumber:
        lvl = max(self.level, p.level)
        p = p.embed(lvl)
        den = CDNumber.one(lvl)
        for f in self.den_factors:
            acc = CDNumber.zero(lvl)
            ppow = CDNumber.one(lvl)
            for k, c in enumerate(f):
                if k > 0:
                    ppow = ppow * p
                acc = acc + float(c) * ppow
            den = den * acc  # factors commute: all lie in the plane of p
        invden = 1.0 / den
        total = CDNumber.zero(lvl)
        ppow = CDNumber.one(lvl)
        for j, c in enumerate(self.num):
            if j > 0:
                ppow = ppow * p
            total = total + c.embed(lvl) * (ppow * invden)
        return total

    def poles(self):
        """Clustered poles: list of (location complex, multiplicity)."""
        roots = []
        for f in self.den_factors:
            arr = np.asarray(f, dtype=float)
            if len(arr) > 1:
                roots.extend(np.roots(arr[::-1]).tolist())
        scale = max(1.0, max(abs(r) for r in roots))
        clusters: list[list[complex]] = []
        for r in sorted(roots, key=lambda z: (z.real, z.imag)):
            for cl in clusters:
                if abs(r - cl[0]) <= _CLUSTER_REL_RADIUS * scale * 10:
                    cl.append(r)
                    break
            else:
                clusters.append([r])
        out = [(complex(np.mean(cl)), len(cl)) for cl in clusters]
        for i, (zi, _) in enumerate(out):
            for zj, _ in out[i + 1:]:
                if abs(zi - zj) < _SEPARATION_REL_FLOOR * scale:
                    raise ConditioningError(
                        f"near-degenerate pole cluster near {zi:.6g}")
        for zi, m in out:
            if m > MULTIPLICITY_CAP:
                raise UnsupportedError(f"pole multiplicity {m} exceeds cap {MULTIPLICITY_CAP}")
        return out


def _poly_shift_taylor(coeffs: np.ndarray, z0: complex, order: int) -> np.ndarray:
    """First ``order`` Taylor coefficients of the polynomial at z0."""
    c = np.asarray(coeffs, dtype=complex)  # ascending
    out = np.zeros(order, dtype=complex)
    fact = 1.0
    for k in range(order):
        if k > 0:
            c = c[1:] * np.arange(1, len(c))  # derivative, ascending
            fact *= k
        if len(c) == 0:
            break
        out[k] = np.polyval(c[::-1], z0) / fact
    return out


def _partial_fraction_terms(real_num: np.ndarray, image: RationalImage):
    """Terms (pole, order l, coefficient A) with num/den = sum A (p-pole)^-l,
    for a real (complex) numerator polynomial given ascending."""
    lead = 1.0
    for f in image.den_factors:
        lead *= f[-1]
    poles = image.poles()
    terms = []
    for rho, m in poles:
        q = np.array([lead], dtype=complex)
        for rho2, m2 in poles:
            if rho2 == rho:
                continue
            for _ in range(m2):
                q = np.convolve(q, np.array([-rho2, 1.0]))
        n_taylor = _poly_shift_taylor(real_num, rho, m)
        q_taylor = _poly_shift_taylor(q, rho, m)
        b = np.zeros(m, dtype=complex)
        for k in range(m):
            acc = n_taylor[k]
            for i in range(k):
                acc -= b[i] * q_taylor[k - i]
            b[k] = acc / q_taylor[0]
        for l in range(1, m + 1):
            terms.append((rho, l, b[m - l]))
    return terms


def residue_invert_grid(image: RationalImage, ts) -> np.ndarray:
    """Residue inversion sampled on a grid; rows of coefficients."""
    if image.kernel.variant != "linear":
        raise UnsupportedError("residue inversion is implemented for the linear kernel")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts < 0.0):
        raise ContractViolationError("residue inversion needs t >= 0")
    dim = 2**image.level
    out = np.zeros((len(ts), dim))
    for j, cj in enumerate(image.num):
        mono = np.zeros(j + 1)
        mono[j] = 1.0
        terms = _partial_fraction_terms(mono, image)
        vals = np.zeros(len(ts), dtype=complex)
        for rho, l, a in terms:
            vals += a * ts ** (l - 1) * np.exp(rho * ts) / math.factorial(l - 1)
        scale = np.max(np.abs(vals)) if len(vals) else 1.0
        if np.max(np.abs(vals.imag)) > 1e-9 * max(1.0, scale):
            raise ConditioningError("residue sum has a non-real part; pole pairing failed")
        out += np.outer(vals.real, cj.embed(image.level).coeffs)
    return out


def residue_invert_rational(image: RationalImage, t: float) -> CDNumber:
    """Sum of residues of F(p) e^{pt} over all poles; exact up to root finding."""
    if t <= 0.0:
        raise ContractViolationError("residue inversion is stated for t > 0")
    return CDNumber(residue_invert_grid(image, [t])[0])


# ---------------------------------------------------------------------------
# Bromwich line inversion
# ---------------------------------------------------------------------------

def _segment(F, a, s, t, kernel, zeta, lo, hi, tol, max_panels=120000):
    fvec = line_integrand(F, a, s, t, kernel, zeta, with_measure=False)
    width = math.pi / max(1.0, abs(t))
    n = max(2, int(np.ceil((hi - lo) / width)))
    n = min(n, max_panels // 2)
    edges = np.linspace(lo, hi, n + 1)
    vec, err, panels, _ = _adaptive(fvec, edges, tol, max_panels)
    return vec, err, panels


def bromwich_invert(F, a: float, s: CDNumber | None = None, t: float = 1.0,
                    kernel: KernelSpec = LINEAR, tol: float = 1e-6,
                    zeta: CDNumber | None = None,
                    theta_ladder=THETA_LADDER) -> CDNumber:
    """Principal-value inversion (2 pi)^{-1} S~ * line integral, doubling the
    half-width until successive values differ by less than ``tol``.

    Works for one-sided images (a above the growth index) and for two-sided /
    strip images (a inside the strip).  Raises AccuracyError with the best
    value when the ladder is exhausted.
    """
    if s is None:
        s = CDNumber.basis(max(2, getattr(F, "level", 2)), 1)
    check_line_direction(s)
    if isinstance(F, RationalImage):
        worst = max((rho.real for rho, _ in F.poles()), default=-math.inf)
        if a <= worst:
            raise ConvergenceDomainError(
                f"line Re(p) = {a} does not clear the rightmost pole {worst:.6g}")
    seg_tol = max(tol * 0.05, 1e-12)
    total = None
    err_acc = 0.0
    prev_val = None
    prev_theta = 0.0
    for theta in theta_ladder:
        if prev_theta == 0.0:
            vec, err, _ = _segment(F, a, s, t, kernel, zeta, -theta, theta, seg_tol)
            total = vec
        else:
            v1, e1, _ = _segment(F, a, s, t, kernel, zeta, -theta, -prev_theta, seg_tol)
            v2, e2, _ = _segment(F, a, s, t, kernel, zeta, prev_theta, theta, seg_tol)
            total = total + v1 + v2
            err = e1 + e2
        err_acc += err
        cur = CDNumber(total)
        if prev_val is not None:
            diff = float(np.linalg.norm(cur.coeffs - prev_val.coeffs))
            if diff < tol * max(1.0, float(np.linalg.norm(cur.coeffs))):
                return (1.0 / (2.0 * math.pi)) * cur
        prev_val = cur
        prev_theta = theta
    best = (1.0 / (2.0 * math.pi)) * prev_val
    raise AccuracyError(
        f"theta ladder exhausted at {theta_ladder[-1]} without settling to {tol}",
        best=best, err_estimate=err_acc)


# ---------------------------------------------------------------------------
# Laurent-tail inversion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentTail:
    """Coefficients c_1, c_2, ... of F(p) = sum_l c_l p^{-l}, valid |p| > radius."""

    coeffs: tuple
    radius: float
    bound_const: float | None = None

    def __post_init__(self):
        cs = tuple(_as_cd(c) for c in self.coeffs)
        lvl = max(c.level for c in cs)
        object.__setattr__(self, "coeffs", tuple(c.embed(lvl) for c in cs))
        if self.radius <= 0:
            raise ContractViolationError("radius must be positive")

    def coefficient_bound(self) -> float:
        """C with |c_l| <= C * radius^l, estimated from the stored terms."""
        if self.bound_const is not None:
            return self.bound_const
        return max(
            float(np.linalg.norm(c.coeffs)) * self.radius ** -(l + 1)
            for l, c in enumerate(self.coeffs)
        )


def series_invert(tail: LaurentTail, t: float) -> CDNumber:
    """f(t) = sum_l c_l t^{l-1}/(l-1)! for t >= 0 (truncated at the stored length)."""
    if t < 0.0:
        raise ContractViolationError("series inversion is one-sided (t >= 0)")
    lvl = tail.coeffs[0].level
    acc = np.zeros(2**lvl)
    term = 1.0  # t^{l-1}/(l-1)!
    for l, c in enumerate(tail.coeffs, start=1):
        acc = acc + c.coeffs * term
        term *= t / l
    return CDNumber(acc)


def series_remainder_bound(tail: LaurentTail, t: float) -> float:
    """Bound on the truncation remainder from |c_l| <= C R^l."""
    c = tail.coefficient_bound()
    r = tail.radius
    big_l = len(tail.coeffs)
    term = c * r ** (big_l + 1) * t**big_l / math.factorial(big_l)
    acc = 0.0
    for _ in range(2000):
        acc += term
        big_l += 1
        term *= r * t / big_l
        if term < 1e-18 * max(acc, 1.0):
            break
    return acc


def mellin_invert(G, w: float, s: CDNumber | None = None, tau: float = 1.0,
                  tol: float = 1e-6) -> CDNumber:
    """Recover g(tau) from its Mellin image along the line Re(p) = w.

    Uses the Bromwich machinery with the substitution t = ln(tau), p -> -p:
    the kernel factor exp(u(-p, ln tau; 0)) equals exp(p * (-ln tau)).
    """
    if tau <= 0.0:
        raise ContractViolationError("Mellin originals live on tau > 0")
    return bromwich_invert(G, a=w, s=s, t=-math.log(tau), kernel=LINEAR, tol=tol)
