"""Laplace-domain kernel of the distributed-order viscoelastic rod.

The material response enters every transfer function through

    M(s) = sqrt( ln(b s)/ln(a s) * (a s - 1)/(b s - 1) ),

analytic on the cut plane C \\ (-inf, 0] with the principal branch of
both the logarithm and the outer square root.  The points s = 1/a and
s = 1/b are removable: each factor ln(z)/(z - 1) is regularized by its
power series near z = 1.  Boundary values on the cut are obtained by the
explicit substitution ln(a s) = ln(a q) +/- i*pi for s = q e^{+/- i pi},
which is exact on the two sides of the keyhole contour.

Displacement and stress propagate through the hyperbolic ratios

    P(x, s) = sinh(x s M(s)) / sinh(s M(s))
    T(x, s) = cosh(x s M(s)) / (M(s) sinh(s M(s)))

which are evaluated in a cancellation-safe form: the dominant exponential
is factored out so that |s M| of several hundred neither overflows nor
loses the ratio's bounded value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleProximityError

# Radius |z - 1| below which ln(z)/(z - 1) switches to its power series.
SERIES_RADIUS = 1e-4
# |w| below which sinh(x w)/sinh(w) style ratios use their w -> 0 series.
_TINY_W = 1e-8
# |w| above which the factored exponential form is used.
_BIG_W = 30.0
# Cap for the pole-proximity conditioning diagnostic.
COND_MAX = 1e15
# |sinh(s M)| below this (away from s M ~ 0) counts as "on a pole".
POLE_GUARD = 1e-8


@dataclass(frozen=True)
class MaterialParams:
    """Dimensionless weight bases of the constitutive law.

    The stress side of the law is weighted by a**alpha and the strain side
    by b**alpha over derivative orders alpha in (0, 1).  Thermodynamics
    requires 0 < a <= b; a == b is the degenerate Hooke limit (M == 1).
    """

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError("weight bases must be finite")
        if not 0.0 < a <= b:
            raise ValueError(f"need 0 < a <= b, got a={a}, b={b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def hooke(self) -> bool:
        return self.a == self.b


@dataclass(frozen=True)
class CutPlanePoint:
    """A point of the cut plane in polar form, with explicit cut-side flags.

    ``argument`` lives in (-pi, pi]; the flags select the upper/lower side
    of the branch cut and force |argument| = pi.  Keeping the argument
    explicit makes ln(a s) = ln(a * modulus) + i*argument exact on the cut.
    """

    modulus: float
    argument: float
    on_upper_cut: bool = False
    on_lower_cut: bool = False

    def __post_init__(self):
        if not (self.modulus > 0.0 and math.isfinite(self.modulus)):
            raise DomainError(f"modulus must be positive and finite, got {self.modulus}")
        on_cut = self.on_upper_cut or self.on_lower_cut
        low_ok = self.argument == -math.pi and self.on_lower_cut
        if not (-math.pi < self.argument <= math.pi or low_ok):
            raise DomainError(f"argument must lie in (-pi, pi], got {self.argument}")
        if self.on_upper_cut and self.on_lower_cut:
            raise DomainError("cut flags are mutually exclusive")
        if on_cut and abs(abs(self.argument) - math.pi) > 1e-15:
            raise DomainError("cut flags require |argument| = pi")
        if not on_cut and abs(self.argument) == math.pi:
            raise DomainError("negative real axis requires a cut-side flag")

    @classmethod
    def from_complex(cls, s: complex) -> "CutPlanePoint":
        s = complex(s)
        if s == 0:
            raise DomainError("s = 0 is the branch point")
        if s.imag == 0.0 and s.real < 0.0:
            raise DomainError(
                "unflagged negative-real s; use upper_cut()/lower_cut() to pick a side"
            )
        return cls(abs(s), math.atan2(s.imag, s.real))

    @classmethod
    def upper_cut(cls, q: float) -> "CutPlanePoint":
        """The point q e^{+i pi} approached from above the cut."""
        return cls(float(q), math.pi, on_upper_cut=True)

    @classmethod
    def lower_cut(cls, q: float) -> "CutPlanePoint":
        """The point q e^{-i pi} approached from below the cut."""
        return cls(float(q), -math.pi, on_lower_cut=True)

    def to_complex(self) -> complex:
        if self.on_upper_cut or self.on_lower_cut:
            return complex(-self.modulus, 0.0)
        return self.modulus * complex(math.cos(self.argument), math.sin(self.argument))

    def log(self) -> complex:
        return complex(math.log(self.modulus), self.argument)


@dataclass(frozen=True)
class TransferValue:
    """A transfer-function value plus a pole-proximity diagnostic.

    ``condition_estimate`` is 1/|sinh(s M(s))| clamped to ``COND_MAX``; it is
    large exactly where the hyperbolic ratio suffers catastrophic
    cancellation, and is used to reject quadrature nodes.
    """

    value: complex
    condition_estimate: float


def _split(s):
    """Normalize input to (value, principal log, was_scalar).

    Accepts a CutPlanePoint, a complex scalar, or an ndarray of complex off
    the closed negative real axis.
    """
    if isinstance(s, CutPlanePoint):
        return s.to_complex(), s.log(), True
    arr = np.asarray(s, dtype=complex)
    bad = (arr.imag == 0.0) & (arr.real <= 0.0)
    if np.any(bad):
        raise DomainError(
            "evaluation on the closed negative real axis requires CutPlanePoint cut flags"
        )
    return arr, np.log(arr), arr.ndim == 0


def _log_over_zm1(z, log_z):
    """ln(z)/(z - 1) with the removable point z = 1 evaluated by series."""
    z = np.asarray(z)
    w = z - 1.0
    near = np.abs(w) < SERIES_RADIUS
    wn = np.where(near, w, 0.0)
    series = 1.0 - wn / 2.0 + wn**2 / 3.0 - wn**3 / 4.0 + wn**4 / 5.0
    far = np.asarray(log_z) / np.where(near, 1.0, w)
    return np.where(near, series, far)


def _m_squared(s_val, log_s, params: MaterialParams):
    if params.hooke:
        # the two factors cancel algebraically; avoid the O(eps) imaginary
        # residue complex division would leave behind
        return np.ones_like(np.asarray(s_val, dtype=complex))
    ga = _log_over_zm1(params.a * s_val, math.log(params.a) + log_s)
    gb = _log_over_zm1(params.b * s_val, math.log(params.b) + log_s)
    return gb / ga


def eval_M(s, params: MaterialParams):
    """Evaluate the kernel M(s) on the cut plane.

    ``s`` may be a CutPlanePoint (required on the cut itself), a complex
    scalar, or an ndarray of complex.  Returns a complex scalar or ndarray.
    M -> 1 as s -> 0 and M -> sqrt(a/b) as |s| -> infinity, both limits
    approached logarithmically slowly through the ln(a s), ln(b s) factors.
    """
    v, ls, scalar = _split(s)
    m = np.sqrt(_m_squared(v, ls, params))
    return complex(m) if scalar else m


def eval_M_asymptotic(p: float, R: float, sign: int, params: MaterialParams) -> complex:
    """Large-|s| value of M at s = p + sign*i*R, for R >> 1/a.

    Modulus and phase come from the principal square root of
    ln(aR) ln(bR) -/+ i (pi/2) ln(b/a); the half-angle in the phase is what
    the square root produces.  Used only as a cross-check against eval_M.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    a, b = params.a, params.b
    la, lb = math.log(a * R), math.log(b * R)
    mod = math.sqrt(a / b) / la * ((la * lb) ** 2 + (math.pi / 2 * math.log(b / a)) ** 2) ** 0.25
    theta = 0.5 * math.atan2(math.pi / 2 * math.log(b / a), la * lb)
    return mod * complex(math.cos(theta), -sign * math.sin(theta))


def _masked(mask, f, w, fill=1.0):
    """Evaluate f on w where mask holds, with a safe fill value elsewhere."""
    return f(np.where(mask, w, fill))


def sinh_ratio(x: float, w):
    """sinh(x w)/sinh(w), even in w, safe for |w| up to overflow scale."""
    w = np.asarray(w, dtype=complex)
    if x == 1.0:  # numerator equals denominator; exact by construction
        return np.ones_like(w)
    if x == 0.0:
        return np.zeros_like(w)
    w = np.where(w.real < 0.0, -w, w)
    aw = np.abs(w)
    tiny = aw < _TINY_W
    big = aw > _BIG_W
    mid = ~(tiny | big)
    out = np.full(w.shape, x + 0.0j)
    out = np.where(mid, _masked(mid, lambda u: np.sinh(x * u) / np.sinh(u), w), out)
    def factored(u):
        return np.exp(-(1.0 - x) * u) * (1.0 - np.exp(-2.0 * x * u)) / (1.0 - np.exp(-2.0 * u))
    out = np.where(big, _masked(big, factored, w, fill=_BIG_W + 5.0), out)
    return out


def cosh_over_sinh(x: float, w):
    """cosh(x w)/sinh(w), odd in w, with the same safeguards as sinh_ratio."""
    w = np.asarray(w, dtype=complex)
    flip = w.real < 0.0
    w = np.where(flip, -w, w)
    sign = np.where(flip, -1.0, 1.0)
    aw = np.abs(w)
    tiny = aw < _TINY_W
    big = aw > _BIG_W
    mid = ~(tiny | big)
    wt = np.where(tiny, w, 1.0)
    out = np.where(tiny, (1.0 + (3.0 * x * x - 1.0) * wt * wt / 6.0) / wt, 0.0 + 0.0j)
    out = np.where(mid, _masked(mid, lambda u: np.cosh(x * u) / np.sinh(u), w), out)
    def factored(u):
        return np.exp(-(1.0 - x) * u) * (1.0 + np.exp(-2.0 * x * u)) / (1.0 - np.exp(-2.0 * u))
    out = np.where(big, _masked(big, factored, w, fill=_BIG_W + 5.0), out)
    return sign * out


def _abs_sinh(w):
    """|sinh(w)| without overflow (expects Re w >= 0 after folding)."""
    w = np.asarray(w, dtype=complex)
    w = np.where(w.real < 0.0, -w, w)
    big = w.real > 700.0
    safe = np.where(big, 0.0, w)
    val = np.abs(np.sinh(safe))
    return np.where(big, np.inf, val)


def _condition(w):
    s = _abs_sinh(w)
    with np.errstate(divide="ignore"):
        c = np.where(s > 0.0, 1.0 / s, COND_MAX)
    return np.minimum(c, COND_MAX)


def _check_x(x: float):
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")


def eval_P_tilde(x: float, s, params: MaterialParams) -> TransferValue:
    """Displacement transfer ratio sinh(x s M)/sinh(s M)."""
    _check_x(x)
    v, ls, scalar = _split(s)
    w = v * np.sqrt(_m_squared(v, ls, params))
    val = sinh_ratio(x, w)
    cond = _condition(w)
    if np.any((np.asarray(cond) >= 1.0 / POLE_GUARD) & (np.abs(np.asarray(w)) > 1e-3)):
        raise PoleProximityError(f"s M = {w} is too close to a zero of sinh")
    if scalar:
        return TransferValue(complex(val), float(cond))
    return TransferValue(val, cond)


def eval_T_tilde(x: float, s, params: MaterialParams) -> TransferValue:
    """Stress transfer ratio cosh(x s M)/(M sinh(s M))."""
    _check_x(x)
    v, ls, scalar = _split(s)
    m = np.sqrt(_m_squared(v, ls, params))
    w = v * m
    val = cosh_over_sinh(x, w) / m
    cond = _condition(w)
    if np.any((np.asarray(cond) >= 1.0 / POLE_GUARD) & (np.abs(np.asarray(w)) > 1e-3)):
        raise PoleProximityError(f"s M = {w} is too close to a zero of sinh")
    if scalar:
        return TransferValue(complex(val), float(cond))
    return TransferValue(val, cond)


def upper_cut_M(q, params: MaterialParams):
    """Vectorized M(q e^{i pi}) on the upper side of the cut, q > 0."""
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0.0):
        raise DomainError("cut evaluation needs q > 0")
    if params.hooke:
        return np.ones_like(q, dtype=complex)
    ga = (np.log(params.a * q) + 1j * math.pi) / (-(params.a * q) - 1.0)
    gb = (np.log(params.b * q) + 1j * math.pi) / (-(params.b * q) - 1.0)
    return np.sqrt(gb / ga)
