"""Numerical toolkit for encoder heads on SO(3).

The compiled core exposes the rotation-group primitives, the four encoder
heads with their condition reports, the metric projection, the topology
diagnostics, and the desk-scale auto-encoder trainer.
"""

from ._core import (
    __version__,
    HEAD_KINDS,
    basis_section,
    check_conditions,
    diagnose,
    distance_to,
    exp_so3,
    geodesic_distance,
    head_apply,
    head_input_dim,
    head_jacobian,
    log_so3,
    loop_holonomy,
    normalize,
    project,
    quat_from_rot,
    quat_to_rot,
    sample_rotations,
    train,
    verify,
)

__all__ = [
    "__version__",
    "HEAD_KINDS",
    "basis_section",
    "check_conditions",
    "diagnose",
    "distance_to",
    "exp_so3",
    "geodesic_distance",
    "head_apply",
    "head_input_dim",
    "head_jacobian",
    "log_so3",
    "loop_holonomy",
    "normalize",
    "project",
    "quat_from_rot",
    "quat_to_rot",
    "sample_rotations",
    "train",
    "verify",
]
