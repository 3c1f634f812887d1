"""Pointwise verification of Chen-type inequalities for submanifolds of cosymplectic space forms."""

from .ambient import AmbientModel, ambient_curvature, ambient_sectional, check_almost_contact, make_standard_structure
from .delta import DeltaResult, curvature_operator_bound, delta_invariant, inf_sectional_bruteforce
from .immersion import ImmersionSpec, builtin_catalog, to_submanifold_point
from .inequality import (
    LemmaInstance,
    Verdict,
    chen_lemma_check,
    classify_submanifold,
    construct_equality_instance,
    delta_upper_bound,
    equality_shape_check,
    main_inequality,
    proof_step_audit,
    totally_geodesic_certificate,
)
from .io import InstanceDocument, SweepRow
from .numerics import make_rng
from .submanifold import InvalidPointError, PlaneSection, SubmanifoldPoint, random_point, scalar_curvature

__version__ = "0.1.0"

__all__ = [
    "AmbientModel",
    "DeltaResult",
    "ImmersionSpec",
    "InstanceDocument",
    "InvalidPointError",
    "LemmaInstance",
    "PlaneSection",
    "SubmanifoldPoint",
    "SweepRow",
    "Verdict",
    "ambient_curvature",
    "ambient_sectional",
    "builtin_catalog",
    "check_almost_contact",
    "chen_lemma_check",
    "classify_submanifold",
    "construct_equality_instance",
    "curvature_operator_bound",
    "delta_invariant",
    "delta_upper_bound",
    "equality_shape_check",
    "inf_sectional_bruteforce",
    "main_inequality",
    "make_rng",
    "make_standard_structure",
    "proof_step_audit",
    "random_point",
    "scalar_curvature",
    "to_submanifold_point",
    "totally_geodesic_certificate",
]
