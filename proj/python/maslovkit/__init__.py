"""Maslov index, pencils of quadrics, Morse folds, sub-Riemannian geodesics and Schubert cells."""

from ._maslovkit import (
    MaslovError,
    acceptance,
    change_chart,
    chart_from_frame,
    conjugate_times,
    crossings,
    exponential,
    frame_from_chart,
    gauss_loop_indices,
    inertia,
    intersection_dimension,
    is_lagrangian,
    maslov_count,
    maslov_indices,
    morse_folds,
    poincare_polynomial,
    restricted_hessian_min_eig,
    rotation_loop_indices,
    schubert_membership,
    stratify_pencil,
    symmetric_partitions,
)

__all__ = [
    "MaslovError",
    "acceptance",
    "change_chart",
    "chart_from_frame",
    "conjugate_times",
    "crossings",
    "exponential",
    "frame_from_chart",
    "gauss_loop_indices",
    "inertia",
    "intersection_dimension",
    "is_lagrangian",
    "maslov_count",
    "maslov_indices",
    "morse_folds",
    "poincare_polynomial",
    "restricted_hessian_min_eig",
    "rotation_loop_indices",
    "schubert_membership",
    "stratify_pencil",
    "symmetric_partitions",
]
