"""Branch-cut integrals over q in (0, q_max].

The keyhole contour reduces the continuous-spectrum part of every field to
an integral of a real integrand against an exponentially decaying weight:

    P:  -(1/pi) Im[ sinh(x q M) / sinh(q M) ]           at M = M(q e^{i pi})
    T:  +(1/pi) Im[ cosh(x q M) / (M sinh(q M)) ]        at M = M(q e^{i pi})

Both integrands are smooth and non-oscillatory, but vary on a logarithmic
scale through ln(a q), ln(b q) and are peaked where those logs change
sign, so the initial panels are geometric below q = 1 with explicit edges
at 1/b and 1/a.  Panels are then refined adaptively by a Gauss-Kronrod
7/15 rule.

The stress integrand carries an integrable ~ 1/(q ln^2(b q)) tail into
q -> 0 whose mass below any practical floor is O(1/|ln q|) -- far too fat
to reach by subdivision.  ``stress_cut_small_q_mass`` supplies that mass
in closed form from the exact small-q limit of the integrand.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError
from .kernel import MaterialParams, cosh_over_sinh, sinh_ratio, upper_cut_M

#: default lower end of the numeric panels; mass below is either negligible
#: (P-type integrands vanish like q/ln^2 q) or handled in closed form (T).
Q_FLOOR = 1e-10

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])


@dataclass(frozen=True)
class QuadratureConfig:
    """Truncation and tolerance knobs for the cut integrals."""

    q_max: float = 1000.0
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 400

    def __post_init__(self):
        if not self.q_max > 0.0:
            raise ValueError("q_max must be positive")
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 0:
            raise ValueError("max_subdivisions must be >= 0")


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    evaluations: int
    truncation_estimate: float


def cut_integrand_P(x: float, q, params: MaterialParams):
    """Real cut integrand of the displacement response (vectorized in q)."""
    q = np.asarray(q, dtype=float)
    m = upper_cut_M(q, params)
    return -(1.0 / math.pi) * np.imag(sinh_ratio(x, q * m))


def cut_integrand_T(x: float, q, params: MaterialParams):
    """Real cut integrand of the stress response (vectorized in q)."""
    q = np.asarray(q, dtype=float)
    m = upper_cut_M(q, params)
    return (1.0 / math.pi) * np.imag(cosh_over_sinh(x, q * m) / m)


def stress_cut_small_q_mass(delta: float, params: MaterialParams) -> float:
    """Exact mass of the stress cut integrand over (0, delta].

    For q -> 0 the integrand reduces to
    (1/q) * ln(b/a) / (ln^2(b q) + pi^2) up to relative corrections
    O(q); substituting u = ln(b q) integrates this in closed form.  With
    delta ~ 1e-10 the neglected corrections are below delta * (t + b).
    """
    if params.hooke:
        return 0.0
    a, b = params.a, params.b
    return (math.log(b / a) / math.pi) * (
        math.atan(math.log(b * delta) / math.pi) + math.pi / 2.0
    )


_WEIGHTS = ("exp", "one_minus_exp_over_q", "exp_over_q", "one")


def _weight_fn(weight: str, t: float):
    if weight == "exp":
        if t < 0.0:
            raise ValueError("weight e^{-q t} requires t >= 0")
        return lambda q: np.exp(-q * t)
    if weight == "one_minus_exp_over_q":
        if t < 0.0:
            raise ValueError("weight (1 - e^{-q t})/q requires t >= 0")
        return lambda q: -np.expm1(-q * t) / q
    if weight == "exp_over_q":
        if t < 0.0:
            raise ValueError("weight e^{-q t}/q requires t >= 0")
        return lambda q: np.exp(-q * t) / q
    if weight == "one":
        return lambda q: np.ones_like(q)
    raise ValueError(f"unknown weight {weight!r}; expected one of {_WEIGHTS}")


def _gk_panel(g, lo: float, hi: float):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    y = g(mid + half * _XK)
    if not np.all(np.isfinite(y)):
        raise QuadratureError(f"integrand returned non-finite values in [{lo}, {hi}]")
    k = half * float(np.sum(_WK * y))
    gauss = half * float(np.sum(_WG * y[1::2]))
    return k, abs(k - gauss)


def _initial_edges(q_lo: float, q_max: float, markers=()):
    edges = [q_lo]
    q = q_lo
    top = min(1.0, q_max)
    while q < top:
        q = min(q * math.sqrt(10.0), top)
        edges.append(q)
    while q < q_max:
        q = min(q * 1.5, q_max)
        edges.append(q)
    for mk in markers:
        if q_lo < mk < q_max:
            edges.append(mk)
    return np.unique(np.asarray(edges, dtype=float))


def integrate_cut(f, weight: str, t: float, cfg: QuadratureConfig,
                  q_min: float = Q_FLOOR, edge_markers=(),
                  decay_hint: float = 0.0) -> IntegralResult:
    """Adaptively integrate f(q) * weight(q) over (q_min, q_max].

    ``f`` must accept ndarray q.  ``decay_hint`` is the integrand's own
    exponential decay rate (beyond the weight's e^{-q t}), used to bound
    the discarded tail past q_max in ``truncation_estimate``.
    """
    w = _weight_fn(weight, t)
    g = lambda q: np.asarray(f(q), dtype=float) * w(q)
    if not q_min > 0.0:
        raise ValueError("q_min must be positive (the origin is the branch point)")
    if q_min >= cfg.q_max:
        raise ValueError("q_min must be below q_max")

    edges = _initial_edges(q_min, cfg.q_max, edge_markers)
    evals = 0
    heap = []
    tie = 0
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = _gk_panel(g, lo, hi)
        evals += 15
        total += val
        err += e
        heapq.heappush(heap, (-e, tie, lo, hi, val, e))
        tie += 1

    stuck_err = 0.0
    for _ in range(cfg.max_subdivisions):
        if err <= max(cfg.abs_tol, cfg.rel_tol * abs(total)):
            break
        if not heap:
            break
        _, _, lo, hi, val, e = heapq.heappop(heap)
        if hi - lo < 1e-14 * (1.0 + hi):
            stuck_err += e
            err -= e
            continue
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk_panel(g, lo, mid)
        v2, e2 = _gk_panel(g, mid, hi)
        evals += 30
        total += v1 + v2 - val
        err += e1 + e2 - e
        heapq.heappush(heap, (-e1, tie, lo, mid, v1, e1)); tie += 1
        heapq.heappush(heap, (-e2, tie, mid, hi, v2, e2)); tie += 1
    err += stuck_err
    if err > max(cfg.abs_tol, cfg.rel_tol * abs(total)) and cfg.max_subdivisions > 0:
        raise QuadratureError(
            f"tolerance not met: error {err:.3e} on value {total:.6e} "
            f"after {cfg.max_subdivisions} subdivisions"
        )

    g_end = abs(float(np.asarray(g(np.array([cfg.q_max])))[0]))
    evals += 1
    rate = decay_hint + (t if weight != "one" else 0.0)
    if rate > 0.0:
        truncation = g_end / rate
    else:
        truncation = g_end * cfg.q_max
    return IntegralResult(total, err, evals, truncation)
