"""Poles of the rod's Laplace-domain response and their residues.

The transfer functions share complex-conjugate pole pairs at the zeros of
sinh(s M(s)), i.e. the solutions of s M(s) = +/- i n pi for n = 1, 2, ...
Only the upper-half-plane representative of each pair is stored; the
conjugate partner is implied by symmetry.

Roots are found by Newton iteration on g(s) = s M(s) - i n pi, whose
derivative has the closed form

    d/ds [s M(s)] = M(s) * (1 - ln(b/a) / (2 ln(as) ln(bs))
                              + (b - a) s / (2 (as - 1)(bs - 1))),

one root per branch index, instead of on sinh(s M(s)) itself, which has
spurious attraction basins toward neighbouring indices.  Large-n seeds
come from the asymptotic real/imaginary parts; small-n seeds fall back to
continuation from the previous root.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConvergenceError
from .kernel import MaterialParams

DEFAULT_ROOT_TOL = 1e-12
MAX_NEWTON_STEPS = 50
SIMPLICITY_FLOOR = 1e-6


@dataclass(frozen=True)
class Pole:
    """Upper-half-plane pole with residue metadata.

    ``bracket`` is the derivative factor D(s) such that
    d/ds[sinh(s M)] = cosh(s M) * M * D; residues of both transfer
    functions reduce to rational expressions in it.
    """

    index: int
    location: complex
    derivative_at_pole: complex
    bracket: complex
    residual: float
    simple: bool


class PoleSet:
    """Ordered pole family for fixed material parameters.

    Stores the data as flat arrays (cheap for large families, e.g. the
    Hooke limit where millions of exact poles are useful) and materializes
    :class:`Pole` views on demand.
    """

    def __init__(self, params: MaterialParams, indices, locations, brackets,
                 derivatives, residuals, simple, tol: float):
        self.params = params
        self.indices = np.asarray(indices, dtype=np.int64)
        self.locations = np.asarray(locations, dtype=complex)
        self.brackets = np.asarray(brackets, dtype=complex)
        self.derivatives = np.asarray(derivatives, dtype=complex)
        self.residuals = np.asarray(residuals, dtype=float)
        self.simple = np.asarray(simple, dtype=bool)
        self.tol = float(tol)
        self._signs = np.where(self.indices % 2 == 0, 1.0, -1.0)
        self._findex = self.indices.astype(float)
        self._validate()

    def _validate(self):
        if np.any(self.locations.imag <= 0.0):
            raise ConvergenceError("pole escaped the upper half plane")
        if np.any(np.diff(self.locations.imag) <= 0.0):
            raise ConvergenceError("pole imaginary parts are not strictly increasing")
        if np.any(self.residuals >= self.tol):
            worst = int(self.indices[np.argmax(self.residuals)])
            raise ConvergenceError(f"pole n={worst} residual exceeds tol={self.tol}")

    def __len__(self) -> int:
        return len(self.indices)

    def __getitem__(self, i: int) -> Pole:
        return Pole(
            index=int(self.indices[i]),
            location=complex(self.locations[i]),
            derivative_at_pole=complex(self.derivatives[i]),
            bracket=complex(self.brackets[i]),
            residual=float(self.residuals[i]),
            simple=bool(self.simple[i]),
        )

    def pole(self, n: int) -> Pole:
        """The pole with branch index n (1-based)."""
        i = int(np.searchsorted(self.indices, n))
        if i >= len(self) or self.indices[i] != n:
            raise KeyError(f"no pole with index {n}")
        return self[i]

    @property
    def signs(self):
        """(-1)**n for each stored index."""
        return self._signs

    @property
    def findex(self):
        """Indices as floats (cached for large families)."""
        return self._findex


def _sm_and_parts(s: complex, a: float, b: float):
    """Return (s*M(s), M(s), bracket D(s)) for scalar s off the cut."""
    la = cmath.log(a * s)
    lb = cmath.log(b * s)
    m = cmath.sqrt((lb / la) * ((a * s - 1.0) / (b * s - 1.0)))
    d = 1.0 - math.log(b / a) / (2.0 * la * lb) + s * (b - a) / (2.0 * (a * s - 1.0) * (b * s - 1.0))
    return s * m, m, d


def asymptotic_guess(n: int, params: MaterialParams) -> complex:
    """Large-n seed for the n-th upper pole.

    Real and imaginary parts follow the leading asymptotics; for a = b the
    poles are exactly i n pi.  The estimate is only asymptotic: for small n
    (or whenever sqrt(ab) n pi <= 1 makes the logs change sign) it can be
    badly off, which the refiner compensates by continuation seeding.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b = params.a, params.b
    if params.hooke:
        return complex(0.0, n * math.pi)
    big_r = math.sqrt(b / a) * n * math.pi
    re = -(math.pi / 4.0 * math.log(b / a) * big_r) / (
        math.log(math.sqrt(a * b) * n * math.pi) * math.log(b * math.sqrt(b / a) * n * math.pi)
    )
    return complex(re, big_r)


def refine_pole(guess: complex, n: int, params: MaterialParams,
                tol: float = DEFAULT_ROOT_TOL) -> Pole:
    """Newton-refine a seed to the n-th pole.

    Convergence is declared on |sinh(s M(s))| < tol, evaluated through the
    small quantity g = s M - i n pi so that no accuracy is lost to argument
    reduction.  The landing index is verified; a root that drifts to a
    neighbouring branch or to the lower half plane raises ConvergenceError.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b = params.a, params.b
    target = 1j * math.pi * n
    s = complex(guess)
    if s.imag <= 0.0:
        raise ConvergenceError(f"n={n}: seed must lie in the upper half plane")
    if params.hooke:
        s = complex(0.0, n * math.pi)
        g = 0.0j
        m, d = 1.0 + 0.0j, 1.0 + 0.0j
    else:
        g = None
        for _ in range(MAX_NEWTON_STEPS):
            sm, m, d = _sm_and_parts(s, a, b)
            g = sm - target
            step = g / (m * d)
            s_new = s - step
            while s_new.imag <= 0.0:
                step *= 0.5
                s_new = s - step
            s = s_new
            if abs(step) < 1e-16 * abs(s):
                break
        sm, m, d = _sm_and_parts(s, a, b)
        g = sm - target
        if round(sm.imag / math.pi) != n:
            raise ConvergenceError(f"n={n}: Newton drifted to branch {round(sm.imag / math.pi)}")
        if s.imag <= 0.0:
            raise ConvergenceError(f"n={n}: root escaped to the cut")
    residual = abs(cmath.sinh(g))
    if residual >= tol:
        s, g, m, d, residual = _polish_mp(s, n, params)
        if residual >= tol:
            raise ConvergenceError(f"n={n}: residual {residual} above tol {tol}")
    # cosh(s M) = (-1)^n cosh(g) with g small, exact to machine precision
    cosh_sm = (-1.0) ** n * cmath.cosh(g)
    derivative = cosh_sm * m * d
    return Pole(
        index=n,
        location=s,
        derivative_at_pole=derivative,
        bracket=d,
        residual=residual,
        simple=abs(derivative) > SIMPLICITY_FLOOR,
    )


def _polish_mp(s: complex, n: int, params: MaterialParams):
    """A few high-precision Newton steps when float64 stalls above tol."""
    import mpmath as mp

    with mp.workdps(30):
        a, b = mp.mpf(params.a), mp.mpf(params.b)
        z = mp.mpc(s)
        target = mp.mpc(0, mp.pi * n)
        for _ in range(4):
            la, lb = mp.log(a * z), mp.log(b * z)
            m = mp.sqrt((lb / la) * ((a * z - 1) / (b * z - 1)))
            d = 1 - mp.log(b / a) / (2 * la * lb) + z * (b - a) / (2 * (a * z - 1) * (b * z - 1))
            z = z - (z * m - target) / (m * d)
        sf = complex(z)
        la, lb = mp.log(a * sf), mp.log(b * sf)
        m = mp.sqrt((lb / la) * ((a * sf - 1) / (b * sf - 1)))
        d = 1 - mp.log(b / a) / (2 * la * lb) + sf * (b - a) / (2 * (a * sf - 1) * (b * sf - 1))
        g = sf * m - target
        residual = float(abs(mp.sinh(g)))
        return sf, complex(g), complex(m), complex(d), residual


def build_pole_set(N: int, params: MaterialParams,
                   tol: float = DEFAULT_ROOT_TOL) -> PoleSet:
    """Locate the first N upper poles.

    For a = b the family {i n pi} is filled in vectorized exact form.
    Otherwise each index is refined from its asymptotic seed, with
    continuation from the previous root (plus one asymptotic spacing) as
    fallback when the direct seed misconverges.  Failures propagate as
    ConvergenceError annotated with the offending index; suspicious roots
    are flagged via ``simple=False``, never dropped.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if params.hooke:
        n = np.arange(1, N + 1, dtype=np.int64)
        loc = 1j * math.pi * n.astype(float)
        residuals = np.abs(np.sin(math.pi * n.astype(float)))
        signs = np.where(n % 2 == 0, 1.0, -1.0)
        ones = np.ones(N, dtype=complex)
        return PoleSet(params, n, loc, ones, signs.astype(complex), residuals,
                       np.ones(N, dtype=bool), max(tol, float(residuals.max()) * 4.0 + 1e-300))

    spacing = 1j * math.sqrt(params.b / params.a) * math.pi
    poles: list[Pole] = []
    prev: Pole | None = None
    for n in range(1, N + 1):
        seeds = []
        direct = asymptotic_guess(n, params)
        if direct.real < 0.0:
            seeds.append(direct)
        if prev is not None:
            seeds.append(prev.location + spacing)
        seeds.append(complex(-max(1.0, 0.1 * n), 0.55 * math.sqrt(params.b / params.a) * n * math.pi))
        last_err: Exception | None = None
        pole = None
        for seed in seeds:
            try:
                pole = refine_pole(seed, n, params, tol)
                break
            except ConvergenceError as exc:
                last_err = exc
        if pole is None:
            raise ConvergenceError(f"n={n}: all seeds failed ({last_err})")
        if prev is not None and abs(pole.location - prev.location) < tol:
            raise ConvergenceError(f"n={n}: collided with n={prev.index}")
        poles.append(pole)
        prev = pole
    return PoleSet(
        params,
        [p.index for p in poles],
        [p.location for p in poles],
        [p.bracket for p in poles],
        [p.derivative_at_pole for p in poles],
        [p.residual for p in poles],
        [p.simple for p in poles],
        tol,
    )


def _require_simple(pole: Pole):
    if not pole.simple:
        raise ValueError(f"pole n={pole.index} is not simple; residue undefined")


def residue_P(x: float, pole: Pole, t: float) -> complex:
    """Residue of the displacement transfer times e^{st} at the upper pole.

    Uses the reduced form (-1)^n sin(n pi x)/(n pi) * s e^{st} / D(s); the
    direct quotient sinh(x s M) e^{st} / (d/ds sinh(s M)) agrees to roughly
    1e-8 relative and is kept as a test oracle only.
    """
    _require_simple(pole)
    n, s = pole.index, pole.location
    return ((-1.0) ** n) * math.sin(n * math.pi * x) / (n * math.pi) \
        * s * cmath.exp(s * t) / pole.bracket


def residue_T(x: float, pole: Pole, t: float) -> complex:
    """Residue of the stress transfer times e^{st} at the upper pole."""
    _require_simple(pole)
    n, s = pole.index, pole.location
    return ((-1.0) ** (n + 1)) * math.cos(n * math.pi * x) \
        * s * s * cmath.exp(s * t) / (n * n * math.pi * math.pi * pole.bracket)


def pair_sum(residue: complex) -> float:
    """Real contribution of a conjugate pole pair, 2 Re(upper residue)."""
    return 2.0 * complex(residue).real


def save_pole_set(ps: PoleSet, path) -> None:
    """Serialize to a JSON cache keyed by (a, b, N, tol); floats round-trip exactly."""
    doc = {
        "a": ps.params.a,
        "b": ps.params.b,
        "N": int(len(ps)),
        "tol": ps.tol,
        "poles": [
            {
                "n": int(n),
                "location": [float(s.real), float(s.imag)],
                "bracket": [float(d.real), float(d.imag)],
                "derivative": [float(dv.real), float(dv.imag)],
                "residual": float(r),
                "simple": bool(sp),
            }
            for n, s, d, dv, r, sp in zip(
                ps.indices, ps.locations, ps.brackets, ps.derivatives,
                ps.residuals, ps.simple)
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=1))


def load_pole_set(path, params: MaterialParams | None = None) -> PoleSet:
    doc = json.loads(Path(path).read_text())
    p = MaterialParams(doc["a"], doc["b"])
    if params is not None and (params.a != p.a or params.b != p.b):
        raise ValueError("pole cache was built for different material parameters")
    rows = doc["poles"]
    return PoleSet(
        p,
        [r["n"] for r in rows],
        [complex(*r["location"]) for r in rows],
        [complex(*r["bracket"]) for r in rows],
        [complex(*r["derivative"]) for r in rows],
        [r["residual"] for r in rows],
        [r["simple"] for r in rows],
        doc["tol"],
    )
