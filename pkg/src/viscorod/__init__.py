"""Displacement and stress fields of a distributed-order viscoelastic rod.

A finite rod with an exponential-family distributed-order constitutive law
is driven by a prescribed end displacement; the Laplace-domain solution is
inverted through a residue series over the complex-conjugate pole pairs of
sinh(s M(s)) plus a branch-cut integral, with an independent Bromwich-line
inversion oracle for validation.
"""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    DomainError,
    PoleProximityError,
    QuadratureError,
    ViscorodError,
)
from .fields import (
    FieldGrid,
    FieldSample,
    ForcingSpec,
    SolverConfig,
    compute_P,
    compute_sigma_F,
    compute_sigma_H,
    compute_T,
    compute_u_F,
    compute_u_H,
    nondimensionalize,
    redimensionalize,
)
from .kernel import (
    CutPlanePoint,
    MaterialParams,
    TransferValue,
    eval_M,
    eval_M_asymptotic,
    eval_P_tilde,
    eval_T_tilde,
)
from .oracle import InversionResult, OracleConfig, invert
from .poles import (
    Pole,
    PoleSet,
    asymptotic_guess,
    build_pole_set,
    load_pole_set,
    pair_sum,
    refine_pole,
    residue_P,
    residue_T,
    save_pole_set,
)
from .quadrature import (
    IntegralResult,
    QuadratureConfig,
    cut_integrand_P,
    cut_integrand_T,
    integrate_cut,
    stress_cut_small_q_mass,
)

__all__ = [
    "__version__",
    "ViscorodError", "DomainError", "PoleProximityError", "ConvergenceError",
    "QuadratureError",
    "MaterialParams", "CutPlanePoint", "TransferValue",
    "eval_M", "eval_M_asymptotic", "eval_P_tilde", "eval_T_tilde",
    "Pole", "PoleSet", "asymptotic_guess", "refine_pole", "build_pole_set",
    "residue_P", "residue_T", "pair_sum", "save_pole_set", "load_pole_set",
    "QuadratureConfig", "IntegralResult", "cut_integrand_P", "cut_integrand_T",
    "integrate_cut", "stress_cut_small_q_mass",
    "SolverConfig", "ForcingSpec", "FieldSample", "FieldGrid",
    "compute_P", "compute_u_H", "compute_T", "compute_sigma_H",
    "compute_u_F", "compute_sigma_F", "nondimensionalize", "redimensionalize",
    "OracleConfig", "InversionResult", "invert",
]
