"""Independent numerical inverse Laplace transform for validation.

Both methods sample the transform only on a vertical line Re s = gamma in
the right half plane, which is safe here: every pole of the rod's
transforms has negative real part and the branch cut is the negative real
axis, so any positive abscissa works.  Neither method touches the pole
set or the branch-cut quadrature -- full implementation independence is
the point.

* ``rational_collocation``: the quotient-difference accelerated Fourier
  series of de Hoog, Knight and Stokes (1982) -- equally spaced samples on
  the line turned into a diagonal Pade approximant via a continued
  fraction, with the improved-remainder termination.
* ``bromwich_trapezoid``: plain trapezoid discretization of the Bromwich
  integral with iterated averaging of the oscillatory partial-sum tail
  (the tail correction; slowly decaying transforms converge after
  averaging, exponentially decaying ones before it).

Error estimates come from internal node doubling: the reported value uses
all nodes, the estimate is the change from half the nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

_ALIAS_TOL = 1e-12


@dataclass(frozen=True)
class OracleConfig:
    method: str = "rational_collocation"
    abscissa: float = 0.5
    nodes: int = 40
    precision: int | None = None  # mpmath working digits; None = float64

    def __post_init__(self):
        if self.method not in ("rational_collocation", "bromwich_trapezoid"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.abscissa > 0.0:
            raise ValueError("abscissa must be positive (right of all poles)")
        if self.nodes < 4:
            raise ValueError("need at least 4 nodes")


@dataclass(frozen=True)
class InversionResult:
    value: float
    error_estimate: float


def invert(F_hat, t: float, cfg: OracleConfig = OracleConfig()) -> InversionResult:
    """Invert F_hat at time t > 0 with an internal-consistency error bar."""
    if not t > 0.0:
        raise ValueError("inversion requires t > 0")
    if cfg.method == "rational_collocation":
        if cfg.precision is not None:
            full = _dehoog_mp(F_hat, t, cfg.abscissa, cfg.nodes, cfg.precision)
            half = _dehoog_mp(F_hat, t, cfg.abscissa, max(cfg.nodes // 2, 4), cfg.precision)
        else:
            full = _dehoog(F_hat, t, cfg.abscissa, cfg.nodes)
            half = _dehoog(F_hat, t, cfg.abscissa, max(cfg.nodes // 2, 4))
    else:
        full = _trapezoid(F_hat, t, cfg.abscissa, cfg.nodes)
        half = _trapezoid(F_hat, t, cfg.abscissa, max(cfg.nodes // 2, 4))
    if not (math.isfinite(full) and math.isfinite(half)):
        raise ConvergenceError("inversion produced non-finite values")
    return InversionResult(full, abs(full - half) + 1e-14 * (1.0 + abs(full)))


def _dehoog(F_hat, t: float, alpha: float, degree: int) -> float:
    T = 2.0 * max(t, 1e-3)
    gamma = alpha - math.log(_ALIAS_TOL) / (2.0 * T)
    M = degree
    p = gamma + 1j * math.pi * np.arange(2 * M + 1) / T
    fp = np.asarray(F_hat(p), dtype=complex)
    if not np.all(np.isfinite(fp)):
        raise ConvergenceError("transform evaluation failed on the Bromwich line")

    # quotient-difference table for the continued-fraction coefficients
    e = np.zeros((2 * M + 1, M + 1), dtype=complex)
    q = np.zeros((2 * M + 1, M), dtype=complex)
    q[0:2 * M, 0] = fp[1:2 * M + 1] / fp[0:2 * M]
    q[0, 0] = fp[1] / (fp[0] / 2.0)
    for r in range(1, M + 1):
        mr = 2 * (M - r)
        e[0:mr + 1, r] = q[1:mr + 2, r - 1] - q[0:mr + 1, r - 1] + e[1:mr + 2, r - 1]
        if r < M:
            q[0:mr, r] = q[1:mr + 1, r - 1] * e[1:mr + 1, r] / e[0:mr, r]
    d = np.zeros(2 * M + 1, dtype=complex)
    d[0] = fp[0] / 2.0
    d[1::2] = -q[0, :]
    d[2::2] = -e[0, 1:]

    z = complex(np.exp(1j * math.pi * t / T))
    A = np.zeros(2 * M + 2, dtype=complex)
    B = np.ones(2 * M + 2, dtype=complex)
    A[1] = d[0]
    for i in range(1, 2 * M):
        A[i + 1] = A[i] + d[i] * z * A[i - 1]
        B[i + 1] = B[i] + d[i] * z * B[i - 1]
    brem = (1.0 + (d[2 * M - 1] - d[2 * M]) * z) / 2.0
    rem = -brem * (1.0 - np.sqrt(1.0 + d[2 * M] * z / brem**2))
    A[2 * M + 1] = A[2 * M] + rem * A[2 * M - 1]
    B[2 * M + 1] = B[2 * M] + rem * B[2 * M - 1]
    return float(math.exp(gamma * t) / T * (A[2 * M + 1] / B[2 * M + 1]).real)


def _dehoog_mp(F_hat, t: float, alpha: float, degree: int, dps: int) -> float:
    """Same algorithm in mpmath arithmetic; F_hat must accept mpc scalars."""
    import mpmath as mp

    with mp.workdps(dps):
        T = 2 * mp.mpf(max(t, 1e-3))
        gamma = mp.mpf(alpha) - mp.log(mp.mpf(_ALIAS_TOL)) / (2 * T)
        M = degree
        fp = [mp.mpc(F_hat(gamma + 1j * mp.pi * k / T)) for k in range(2 * M + 1)]
        e = [[mp.mpc(0)] * (M + 1) for _ in range(2 * M + 1)]
        q = [[mp.mpc(0)] * M for _ in range(2 * M + 1)]
        for i in range(2 * M):
            q[i][0] = fp[i + 1] / fp[i]
        q[0][0] = fp[1] / (fp[0] / 2)
        for r in range(1, M + 1):
            mr = 2 * (M - r)
            for i in range(mr + 1):
                e[i][r] = q[i + 1][r - 1] - q[i][r - 1] + e[i + 1][r - 1]
            if r < M:
                for i in range(mr):
                    q[i][r] = q[i + 1][r - 1] * e[i + 1][r] / e[i][r]
        d = [mp.mpc(0)] * (2 * M + 1)
        d[0] = fp[0] / 2
        for r in range(1, M + 1):
            d[2 * r - 1] = -q[0][r - 1]
            d[2 * r] = -e[0][r]
        z = mp.e ** (1j * mp.pi * t / T)
        A = [mp.mpc(0)] * (2 * M + 2)
        B = [mp.mpc(1)] * (2 * M + 2)
        A[1] = d[0]
        for i in range(1, 2 * M):
            A[i + 1] = A[i] + d[i] * z * A[i - 1]
            B[i + 1] = B[i] + d[i] * z * B[i - 1]
        brem = (1 + (d[2 * M - 1] - d[2 * M]) * z) / 2
        rem = -brem * (1 - mp.sqrt(1 + d[2 * M] * z / brem**2))
        A[2 * M + 1] = A[2 * M] + rem * A[2 * M - 1]
        B[2 * M + 1] = B[2 * M] + rem * B[2 * M - 1]
        return float(mp.re(mp.e ** (gamma * t) / T * A[2 * M + 1] / B[2 * M + 1]))


def _trapezoid(F_hat, t: float, alpha: float, nodes: int) -> float:
    T = 2.0 * max(t, 1e-3)
    h = math.pi / T
    gamma = alpha - math.log(1e-10) / (2.0 * T)
    k = np.arange(1, nodes + 1)
    s = gamma + 1j * h * k
    fs = np.asarray(F_hat(s), dtype=complex)
    f0 = complex(np.asarray(F_hat(np.array([gamma + 0j]))).reshape(-1)[0])
    if not (np.all(np.isfinite(fs)) and math.isfinite(f0.real)):
        raise ConvergenceError("transform evaluation failed on the Bromwich line")
    terms = (fs * np.exp(1j * h * k * t)).real
    partials = 0.5 * f0.real + np.cumsum(terms)
    # iterated averaging of the trailing partial sums damps the oscillatory
    # truncation tail of slowly decaying transforms
    window = min(12, nodes // 3)
    tailbuf = partials[-window:].astype(float)
    while len(tailbuf) > 1:
        tailbuf = 0.5 * (tailbuf[1:] + tailbuf[:-1])
    return float(h / math.pi * math.exp(gamma * t) * tailbuf[0])
