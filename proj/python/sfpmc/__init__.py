"""Anisotropic prescribed mean curvature solver (Python bindings)."""

from ._sfpmc import (
    ConvergenceError,
    ConvexBody,
    Domain,
    DomainError,
    ParameterError,
    ValidationError,
    boundary_finsler_curvature,
    check_curvature_condition,
    dual_norm,
    finsler_distance,
    gauge,
    keps_dual_norm,
    pi_eps_h,
    project,
    run,
    solve,
)

__all__ = [
    "ConvergenceError",
    "ConvexBody",
    "Domain",
    "DomainError",
    "ParameterError",
    "ValidationError",
    "boundary_finsler_curvature",
    "check_curvature_condition",
    "dual_norm",
    "finsler_distance",
    "gauge",
    "keps_dual_norm",
    "pi_eps_h",
    "project",
    "run",
    "solve",
]
