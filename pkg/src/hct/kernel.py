"""Transform kernels.

Two phase functions u(p, t; zeta) are supported:

* linear:     u = p t + zeta
* spherical:  u = p0 t + zeta0 + M(p, t; zeta), where M places the imaginary
  phase on a spherical-coordinate axis built from all 2^r - 1 imaginary
  directions:

      M = (p1 t + z1) [ i1 cos(f2) + i2 sin(f2) cos(f3) + ...
                        + i_{2^r-1} sin(f2) ... sin(f_{2^r-1}) ],
      f_k = p_k t + z_k.

The integrand weight of every transform is exp(-u); |exp(-u)| = exp(-(p0 t + z0)).

Functions ending in ``_batch`` evaluate over a vector of times t and return
(N, 2^r) coefficient arrays; the scalar versions wrap them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import CDNumber
from .errors import ContractViolationError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class KernelSpec:
    """Kernel selector: variant 'linear' or 'spherical', ambient level r."""

    variant: str = "linear"
    level: int = 2

    def __post_init__(self):
        if self.variant not in ("linear", "spherical"):
            raise ContractViolationError(f"unknown kernel variant {self.variant!r}")
        if self.variant == "spherical" and self.level < 2:
            raise ContractViolationError("spherical kernel needs level >= 2")


LINEAR = KernelSpec("linear")
SPHERICAL = KernelSpec("spherical")


def _angles(p: CDNumber, ts: np.ndarray, zeta: CDNumber) -> np.ndarray:
    """f_k = p_k t + z_k reduced mod 2*pi, shape (N, dim); column 0 unused."""
    phi = np.outer(ts, p.coeffs) + zeta.coeffs[None, :]
    return np.fmod(phi, TWO_PI)


def _spherical_axis(phi: np.ndarray) -> np.ndarray:
    """Unit axis ladder from direction angles phi[:, 2:]; shape (N, dim)."""
    n, dim = phi.shape
    axis = np.zeros((n, dim))
    run = np.ones(n)
    for k in range(1, dim):
        if k < dim - 1:
            axis[:, k] = run * np.cos(phi[:, k + 1])
            run = run * np.sin(phi[:, k + 1])
        else:
            axis[:, k] = run
    return axis


def _pair(p: CDNumber, zeta: CDNumber | None):
    if zeta is None:
        zeta = CDNumber.zero(p.level)
    if zeta.level != p.level:
        lvl = max(p.level, zeta.level)
        p, zeta = p.embed(lvl), zeta.embed(lvl)
    return p, zeta


def imag_phase_batch(p: CDNumber, ts, zeta: CDNumber | None = None) -> np.ndarray:
    p, zeta = _pair(p, zeta)
    if p.level < 2:
        raise ContractViolationError("spherical phase needs level >= 2")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    phi = _angles(p, ts, zeta)
    modulus = p.coeffs[1] * ts + zeta.coeffs[1]  # not angle-reduced: linear factor
    return modulus[:, None] * _spherical_axis(phi)


def imag_phase(p: CDNumber, t: float, zeta: CDNumber | None = None) -> CDNumber:
    """M(p, t; zeta); purely imaginary by construction (Re = 0 exactly)."""
    p2, _ = _pair(p, zeta)
    return CDNumber(imag_phase_batch(p, [t], zeta)[0], p2.level)


def phase_batch(spec: KernelSpec, p: CDNumber, ts, zeta: CDNumber | None = None) -> np.ndarray:
    p, zeta = _pair(p, zeta)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if spec.variant == "linear":
        return np.outer(ts, p.coeffs) + zeta.coeffs[None, :]
    out = imag_phase_batch(p, ts, zeta)
    out[:, 0] = p.coeffs[0] * ts + zeta.coeffs[0]
    return out


def phase(spec: KernelSpec, p: CDNumber, t: float, zeta: CDNumber | None = None) -> CDNumber:
    """u(p, t; zeta) for the selected kernel; Re(u) = p0 t + z0 either way."""
    p2, _ = _pair(p, zeta)
    return CDNumber(phase_batch(spec, p, [t], zeta)[0], p2.level)


def exp_batch(x: np.ndarray) -> np.ndarray:
    """exp of each row of a coefficient array, vectorized."""
    x0 = x[:, 0]
    xp = np.array(x, copy=True)
    xp[:, 0] = 0.0
    theta = np.linalg.norm(xp, axis=1)
    out = np.sinc(theta / np.pi)[:, None] * xp
    out[:, 0] = np.cos(theta)
    return np.exp(x0)[:, None] * out


def kernel_weight_batch(spec: KernelSpec, p: CDNumber, ts, zeta: CDNumber | None = None) -> np.ndarray:
    return exp_batch(-phase_batch(spec, p, ts, zeta))


def kernel_weight(spec: KernelSpec, p: CDNumber, t: float, zeta: CDNumber | None = None) -> CDNumber:
    """exp(-u(p, t; zeta)); |result| = exp(-(p0 t + z0))."""
    p2, _ = _pair(p, zeta)
    return CDNumber(kernel_weight_batch(spec, p, [t], zeta)[0], p2.level)


def expand_exp_imag_phase(p: CDNumber, t: float, zeta: CDNumber | None = None) -> CDNumber:
    """exp(M(p, t; zeta)) by componentwise trigonometric expansion:

        cos(f1) + i1 sin(f1) cos(f2) + i2 sin(f1) sin(f2) cos(f3) + ...

    Independent of cd_exp; must agree with cd_exp(imag_phase(...)).
    """
    p, zeta = _pair(p, zeta)
    if p.level < 2:
        raise ContractViolationError("spherical phase needs level >= 2")
    phi = _angles(p, np.atleast_1d(float(t)), zeta)
    modulus = p.coeffs[1] * float(t) + zeta.coeffs[1]
    out = np.sin(modulus) * _spherical_axis(phi)[0]
    out[0] = np.cos(modulus)
    return CDNumber(out, p.level)


def osc_rate(spec: KernelSpec, p: CDNumber) -> float:
    """Dominant angular frequency of t -> exp(-u(p, t)): |p'| for the linear
    kernel, the conservative bound sum_j |p_j| for the spherical one."""
    if spec.variant == "linear":
        return float(np.linalg.norm(p.coeffs[1:]))
    return float(np.sum(np.abs(p.coeffs[1:])))
