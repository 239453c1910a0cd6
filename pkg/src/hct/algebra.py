"""Floating-point Cayley-Dickson algebras A_r (r=1 complex ... r=8, 256 components).

A number is stored as its 2^r real coordinates along the standard generators
i_0=1, i_1, ..., i_{2^r-1}.  Multiplication uses the doubling convention

    (a, b)(c, d) = (ac - d~ b,  da + b c~)

with i_{2^r} the doubling generator, which reproduces the quaternion table
i1*i2 = i3, i2*i3 = i1, i3*i1 = i2 and the relation i_j * i_{2^r} = i_{2^r+j};
a self-test at import time asserts both.

Scalars (int/float) mix freely with CDNumber; operands of different levels are
combined by embedding the lower level into the higher one.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BranchError, ContractViolationError, SingularityError

LEVEL_CAP = 8  # dimensions above 2^8 = 256 are rejected at construction

_EINSUM_DIM_CAP = 32  # dense structure tensor kept only for small dimensions


@lru_cache(maxsize=None)
def _basis_product(dim: int, i: int, j: int) -> tuple[int, float]:
    """(index, sign) with e_i e_j = sign * e_index, by the doubling recursion."""
    if dim == 1:
        return 0, 1.0
    h = dim // 2
    if i < h and j < h:
        return _basis_product(h, i, j)
    if i < h:  # (e_i, 0)(0, e_j') = (0, e_j' e_i)
        k, s = _basis_product(h, j - h, i)
        return k + h, s
    if j < h:  # (0, e_i')(e_j, 0) = (0, e_i' conj(e_j))
        cs = 1.0 if j == 0 else -1.0
        k, s = _basis_product(h, i - h, j)
        return k + h, s * cs
    # (0, e_i')(0, e_j') = (-conj(e_j') e_i', 0)
    cs = 1.0 if j == h else -1.0
    k, s = _basis_product(h, j - h, i - h)
    return k, -s * cs


@lru_cache(maxsize=None)
def _tables(dim: int):
    """Index and sign tables for basis products, shape (dim, dim)."""
    idx = np.empty((dim, dim), dtype=np.intp)
    sgn = np.empty((dim, dim))
    for i in range(dim):
        for j in range(dim):
            idx[i, j], sgn[i, j] = _basis_product(dim, i, j)
    idx.setflags(write=False)
    sgn.setflags(write=False)
    return idx, sgn


@lru_cache(maxsize=None)
def _struct_tensor(dim: int):
    """Dense tensor C with (xy)_k = sum_ij x_i y_j C[i,j,k]; small dims only."""
    idx, sgn = _tables(dim)
    c = np.zeros((dim, dim, dim))
    ii, jj = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    c[ii, jj, idx] = sgn
    c.setflags(write=False)
    return c


def coeff_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of coefficient arrays; batched over leading axes.

    ``a`` and ``b`` broadcast against each other except in the last axis,
    which must be the common dimension 2^r.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    dim = a.shape[-1]
    if b.shape[-1] != dim:
        raise ContractViolationError("coefficient arrays of different dimension")
    if dim <= _EINSUM_DIM_CAP:
        return np.einsum("...i,...j,ijk->...k", a, b, _struct_tensor(dim))
    idx, sgn = _tables(dim)
    a2 = np.broadcast_to(a, np.broadcast_shapes(a.shape, b.shape)).reshape(-1, dim)
    b2 = np.broadcast_to(b, np.broadcast_shapes(a.shape, b.shape)).reshape(-1, dim)
    out = np.zeros_like(a2)
    flat_idx = idx.ravel()
    for n in range(a2.shape[0]):
        outer = (a2[n, :, None] * b2[n, None, :] * sgn).ravel()
        out[n] = np.bincount(flat_idx, weights=outer, minlength=dim)
    return out.reshape(np.broadcast_shapes(a.shape, b.shape))


def coeff_conj(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] = -out[..., 1:]
    return out


def right_mul_matrix(x: "CDNumber") -> np.ndarray:
    """Matrix R with (q x) = q @ R.T for coefficient row-vectors q."""
    dim = x.dim
    basis = np.eye(dim)
    return coeff_mul(basis, x.coeffs[None, :]).T


def _doubling_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Reference product via the pair-doubling formula; independent of the
    basis-product tables.  Used by the self-test (and by tests as an oracle).
    """
    if a.shape[-1] == 1:
        return a * b
    h = a.shape[-1] // 2
    a1, a2 = a[..., :h], a[..., h:]
    b1, b2 = b[..., :h], b[..., h:]
    first = _doubling_mul(a1, b1) - _doubling_mul(coeff_conj(b2), a2)
    second = _doubling_mul(b2, a1) + _doubling_mul(a2, coeff_conj(b1))
    return np.concatenate([first, second], axis=-1)


class CDNumber:
    """Element of the Cayley-Dickson algebra A_r, immutable."""

    __slots__ = ("level", "coeffs")

    # keep numpy scalars from broadcasting over the coefficient sequence;
    # arithmetic with numpy scalars goes through __rmul__ etc. instead
    __array_ufunc__ = None

    def __init__(self, coeffs, level: int | None = None):
        arr = np.asarray(coeffs, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if arr.ndim != 1:
            raise ContractViolationError("coefficients must be one-dimensional")
        if level is None:
            n = len(arr)
            if n < 2 or (n & (n - 1)) != 0:
                raise ContractViolationError(
                    f"coefficient count {n} is not a power of two >= 2"
                )
            level = n.bit_length() - 1
        else:
            if len(arr) > 2**level:
                raise ContractViolationError(
                    f"{len(arr)} coefficients exceed dimension 2^{level}"
                )
            arr = np.concatenate([arr, np.zeros(2**level - len(arr))])
        if not 1 <= level <= LEVEL_CAP:
            raise ContractViolationError(f"level must be in [1, {LEVEL_CAP}], got {level}")
        if not np.all(np.isfinite(arr)):
            raise ContractViolationError("non-finite coefficient")
        arr = np.array(arr, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("CDNumber is immutable")

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, level: int) -> "CDNumber":
        return cls(np.zeros(2**level), level)

    @classmethod
    def one(cls, level: int) -> "CDNumber":
        return cls.basis(level, 0)

    @classmethod
    def basis(cls, level: int, j: int) -> "CDNumber":
        if not 0 <= j < 2**level:
            raise ContractViolationError(f"generator index {j} out of range for level {level}")
        c = np.zeros(2**level)
        c[j] = 1.0
        return cls(c, level)

    @classmethod
    def from_real(cls, x: float, level: int) -> "CDNumber":
        c = np.zeros(2**level)
        c[0] = float(x)
        return cls(c, level)

    @classmethod
    def from_complex(cls, z: complex, level: int = 1) -> "CDNumber":
        c = np.zeros(2**level)
        c[0], c[1] = z.real, z.imag
        return cls(c, level)

    # -- plumbing ----------------------------------------------------------
    @property
    def dim(self) -> int:
        return 2**self.level

    @property
    def re(self) -> float:
        return float(self.coeffs[0])

    def imag_vector(self) -> "CDNumber":
        """The purely imaginary part (real coordinate zeroed)."""
        c = np.array(self.coeffs, copy=True)
        c[0] = 0.0
        return CDNumber(c, self.level)

    def embed(self, level: int) -> "CDNumber":
        if level < self.level:
            raise ContractViolationError("cannot embed into a lower level")
        if level == self.level:
            return self
        c = np.zeros(2**level)
        c[: self.dim] = self.coeffs
        return CDNumber(c, level)

    def to_complex(self) -> complex:
        """Value as a complex number when it lies in the plane span{1, i1}."""
        if np.any(self.coeffs[2:] != 0.0):
            raise ContractViolationError("number does not lie in span{1, i1}")
        return complex(self.coeffs[0], self.coeffs[1])

    def __getitem__(self, j: int) -> float:
        return float(self.coeffs[j])

    def __len__(self) -> int:
        return self.dim

    def __repr__(self) -> str:
        return f"CDNumber({format_cd(self)!r}, level={self.level})"

    def __str__(self) -> str:
        return format_cd(self)

    def __hash__(self):
        return hash((self.level, self.coeffs.tobytes()))

    # -- arithmetic --------------------------------------------------------
    @staticmethod
    def _coerce(x, level: int) -> "CDNumber | None":
        if isinstance(x, CDNumber):
            return x
        if isinstance(x, (int, float, np.integer, np.floating)):
            return CDNumber.from_real(float(x), level)
        return None

    def _pair(self, other):
        o = self._coerce(other, self.level)
        if o is None:
            return None, None
        lvl = max(self.level, o.level)
        return self.embed(lvl), o.embed(lvl)

    def __add__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CDNumber(a.coeffs + b.coeffs, a.level)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CDNumber(a.coeffs - b.coeffs, a.level)

    def __rsub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CDNumber(b.coeffs - a.coeffs, a.level)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return CDNumber(self.coeffs * float(other), self.level)
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CDNumber(coeff_mul(a.coeffs, b.coeffs), a.level)

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return CDNumber(self.coeffs * float(other), self.level)
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CDNumber(coeff_mul(b.coeffs, a.coeffs), a.level)

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return CDNumber(self.coeffs / float(other), self.level)
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return a * cd_inverse(b)

    def __rtruediv__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return b * cd_inverse(a)

    def __neg__(self):
        return CDNumber(-self.coeffs, self.level)

    def __pos__(self):
        return self

    def __abs__(self) -> float:
        return cd_norm(self)

    def __eq__(self, other):
        o = self._coerce(other, self.level)
        if o is None:
            return NotImplemented
        a, b = self._pair(o)
        return bool(np.array_equal(a.coeffs, b.coeffs))

    def __ne__(self, other):
        r = self.__eq__(other)
        return NotImplemented if r is NotImplemented else not r


@dataclass(frozen=True)
class PolarForm:
    """Decomposition x = modulus * exp(axis_angle), axis_angle purely imaginary."""

    modulus: float
    axis_angle: CDNumber


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def cd_mul(a: CDNumber, b: CDNumber) -> CDNumber:
    """Product in A_r (bilinear, noncommutative for r >= 2)."""
    if a.level != b.level:
        raise ContractViolationError(f"level mismatch: {a.level} != {b.level}")
    return a * b


def cd_conj(a: CDNumber) -> CDNumber:
    """Conjugate: real coordinate kept, imaginary coordinates negated."""
    return CDNumber(coeff_conj(a.coeffs), a.level)


def cd_norm(a: CDNumber) -> float:
    """Euclidean norm; equals sqrt of the real part of a * conj(a)."""
    return float(np.linalg.norm(a.coeffs))


def cd_inverse(a: CDNumber) -> CDNumber:
    """Multiplicative inverse conj(a)/|a|^2; valid for all levels by power
    associativity (a and conj(a) generate a commutative plane)."""
    n2 = float(np.dot(a.coeffs, a.coeffs))
    if n2 == 0.0:
        raise SingularityError("zero has no inverse")
    return CDNumber(coeff_conj(a.coeffs) / n2, a.level)


def cd_exp(a: CDNumber) -> CDNumber:
    """exp(a) = e^{a0} (cos|a'| + sin|a'| a'/|a'|), a' the imaginary part."""
    a0 = a.coeffs[0]
    ap = np.array(a.coeffs, copy=True)
    ap[0] = 0.0
    theta = float(np.linalg.norm(ap))
    out = np.sinc(theta / np.pi) * ap  # sin(theta)/theta, stable at theta=0
    out[0] = np.cos(theta)
    return CDNumber(np.exp(a0) * out, a.level)


def _axis_and_angle(a: CDNumber):
    """(|a|, theta in [0, pi], unit imaginary axis or None if a is real)."""
    n = cd_norm(a)
    if n == 0.0:
        raise SingularityError("zero has no polar form / logarithm")
    ap = np.array(a.coeffs, copy=True)
    ap[0] = 0.0
    imnorm = float(np.linalg.norm(ap))
    theta = math.atan2(imnorm, float(a.coeffs[0]))
    if imnorm == 0.0:
        return n, theta, None
    return n, theta, CDNumber(ap / imnorm, a.level)


def cd_ln_principal(a: CDNumber) -> CDNumber:
    """Principal logarithm ln|a| + theta*S, theta in [0, pi].

    Raises BranchError for purely real negative input, where the axis S is
    not determined.
    """
    n, theta, axis = _axis_and_angle(a)
    if axis is None:
        if a.coeffs[0] < 0.0:
            raise BranchError("logarithm of a negative real number has no principal axis")
        return CDNumber.from_real(math.log(n), a.level)
    return math.log(n) + theta * axis


def cd_pow_real(a: CDNumber, s: float) -> CDNumber:
    """a**s: repeated multiplication for integer s, exp(s ln a) otherwise."""
    if float(s).is_integer():
        n = int(round(s))
        if n == 0:
            return CDNumber.one(a.level)
        if n < 0:
            return cd_pow_real(cd_inverse(a), -n)
        acc = None
        base = a
        while n:  # binary powering, consistent by power associativity
            if n & 1:
                acc = base if acc is None else acc * base
            base = base * base
            n >>= 1
        return acc
    return cd_exp(float(s) * cd_ln_principal(a))


def cd_polar(a: CDNumber) -> PolarForm:
    """Polar form; a purely real negative number gets the documented default
    axis i1 (axis_angle = pi * i1)."""
    n, theta, axis = _axis_and_angle(a)
    if axis is None:
        if a.coeffs[0] < 0.0:
            axis = CDNumber.basis(a.level, 1)
        else:
            return PolarForm(n, CDNumber.zero(a.level))
    return PolarForm(n, theta * axis)


def cd_component(h: CDNumber, j: int) -> float:
    """Coordinate h_j recovered by the algebraic extraction identity

        h_j = (-h i_j + i_j w)/2   (j >= 1),   h_0 = (h + w)/2,
        w   = (2^r - 2)^{-1} (-h + sum_k i_k (h i_k*)).

    Evaluates the identity literally (it must agree with coeffs[j]; the
    agreement is a test target, so no shortcut through the coordinates).
    """
    if h.level < 2:
        raise ContractViolationError("component extraction needs level >= 2")
    dim = h.dim
    if not 0 <= j < dim:
        raise ContractViolationError(f"component index {j} out of range")
    acc = -np.array(h.coeffs, copy=True)
    for k in range(1, dim):
        ik = np.zeros(dim)
        ik[k] = 1.0
        acc += coeff_mul(ik, coeff_mul(h.coeffs, -ik))
    w = acc / (dim - 2)
    if j == 0:
        return float((h.coeffs + w)[0] / 2.0)
    ij = np.zeros(dim)
    ij[j] = 1.0
    val = -coeff_mul(h.coeffs, ij) + coeff_mul(ij, w)
    return float(val[0] / 2.0)


# ---------------------------------------------------------------------------
# textual literals:  "1.5 + 2i1 - 0.25i7"
# ---------------------------------------------------------------------------

_TERM = re.compile(
    r"(?P<sign>[+-])?\s*"
    r"(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)\s*)?"
    r"(?:i(?P<unit>\d+))?"
)


def parse_cd_literal(text: str, level: int | None = None) -> CDNumber:
    """Parse the textual grammar: signed decimal coefficients attached to unit
    tokens ``i0..iN`` joined by +/-; a bare number is an i0 term.

    The level defaults to the smallest r >= 1 covering the highest unit index.
    """
    s = text.strip()
    if not s:
        raise ContractViolationError("empty literal")
    pos = 0
    terms: list[tuple[int, float]] = []
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos or (m.group("num") is None and m.group("unit") is None):
            raise ContractViolationError(f"malformed term at {s[pos:]!r}")
        sign = -1.0 if m.group("sign") == "-" else 1.0
        coeff = float(m.group("num")) if m.group("num") is not None else 1.0
        unit = int(m.group("unit")) if m.group("unit") is not None else 0
        terms.append((unit, sign * coeff))
        pos = m.end()
        while pos < len(s) and s[pos].isspace():
            pos += 1
        if pos < len(s) and s[pos] not in "+-":
            raise ContractViolationError(f"expected '+' or '-' at {s[pos:]!r}")
    top = max(u for u, _ in terms)
    needed = max(1, top.bit_length())  # smallest r with top < 2^r
    if level is None:
        level = needed
    elif top >= 2**level:
        raise ContractViolationError(f"unit index i{top} out of range for level {level}")
    c = np.zeros(2**level)
    for u, v in terms:
        c[u] += v
    return CDNumber(c, level)


def format_cd(x: CDNumber) -> str:
    parts = []
    for j, v in enumerate(x.coeffs):
        if v == 0.0:
            continue
        mag = repr(float(abs(v)))
        unit = "" if j == 0 else f"i{j}"
        if unit and abs(v) == 1.0:
            mag = ""
        body = f"{mag}{unit}" if (mag or unit) else "0"
        if not parts:
            parts.append(body if v > 0 else f"-{body}")
        else:
            parts.append(f"{'+' if v > 0 else '-'} {body}")
    return " ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------

def _convention_self_test():
    i1, i2, i3 = (CDNumber.basis(2, j) for j in (1, 2, 3))
    assert i1 * i2 == i3 and i2 * i3 == i1 and i3 * i1 == i2
    assert i2 * i1 == -i3 and i3 * i2 == -i1 and i1 * i3 == -i2
    for r in (1, 2, 3):
        dim = 2 ** (r + 1)
        for j in range(dim // 2):
            lhs = CDNumber.basis(r + 1, j) * CDNumber.basis(r + 1, dim // 2)
            assert lhs == CDNumber.basis(r + 1, dim // 2 + j), (r, j)


_convention_self_test()
