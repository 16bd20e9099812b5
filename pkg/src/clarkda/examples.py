"""Curated multiplier examples used across the test and report suites."""

from __future__ import annotations

import numpy as np

from .polynomials import MatPoly

__all__ = [
    "theta_row",
    "theta_square",
    "hat_degenerate_row",
    "hat_degenerate",
    "scalar_z",
    "scalar_z_sq",
    "scalar_half_z",
    "zero_b",
    "avg_coords",
    "b1_expected",
    "b2_expected",
    "EXAMPLES",
]


def theta_row() -> MatPoly:
    """The inner-sequence row (z1^3, z1^2 z2, sqrt(2) z1 z2, z2^2), d=2."""
    return MatPoly(2, 1, 4, {
        (3, 0): [[1, 0, 0, 0]],
        (2, 1): [[0, 1, 0, 0]],
        (1, 1): [[0, 0, np.sqrt(2), 0]],
        (0, 2): [[0, 0, 0, 1]],
    })


def theta_square() -> MatPoly:
    """4x4 square embedding of theta_row (row as first row, zeros below)."""
    from .truncation import embed_inner_sequence

    return embed_inner_sequence(theta_row())


def hat_degenerate_row() -> MatPoly:
    """The non-minimal row (z1, 0, z2), d=2."""
    return MatPoly(2, 1, 3, {
        (1, 0): [[1, 0, 0]],
        (0, 1): [[0, 0, 1]],
    })


def hat_degenerate() -> MatPoly:
    from .truncation import embed_inner_sequence

    return embed_inner_sequence(hat_degenerate_row())


def scalar_z() -> MatPoly:
    """b(z) = z, d=1."""
    return MatPoly.scalar(1, {(1,): 1.0})


def scalar_z_sq() -> MatPoly:
    return MatPoly.scalar(1, {(2,): 1.0})


def scalar_half_z() -> MatPoly:
    return MatPoly.scalar(1, {(1,): 0.5})


def zero_b(d: int = 2, n: int = 1) -> MatPoly:
    return MatPoly.zero(d, n, n)


def avg_coords() -> MatPoly:
    """b(z) = (z1 + z2)/2, d=2, scalar."""
    return MatPoly.scalar(2, {(1, 0): 0.5, (0, 1): 0.5})


def b1_expected() -> MatPoly:
    """First minimal Gleason component for theta_square: first row
    (z1^2, 0, z2/sqrt(2), 0), rows 2-4 zero."""
    return MatPoly(2, 4, 4, {
        (2, 0): np.outer([1, 0, 0, 0], [1, 0, 0, 0]),
        (0, 1): np.outer([1, 0, 0, 0], [0, 0, 1 / np.sqrt(2), 0]),
    })


def b2_expected() -> MatPoly:
    """Second minimal Gleason component: first row (0, z1^2, z1/sqrt(2), z2)."""
    return MatPoly(2, 4, 4, {
        (2, 0): np.outer([1, 0, 0, 0], [0, 1, 0, 0]),
        (1, 0): np.outer([1, 0, 0, 0], [0, 0, 1 / np.sqrt(2), 0]),
        (0, 1): np.outer([1, 0, 0, 0], [0, 0, 0, 1]),
    })


def EXAMPLES() -> dict[str, MatPoly]:
    """The curated multiplier set exercised by the acceptance checks."""
    return {
        "zero": zero_b(2, 1),
        "z_d1": scalar_z(),
        "half_z_d1": scalar_half_z(),
        "theta": theta_square(),
        "hat_degenerate": hat_degenerate(),
        "avg_coords": avg_coords(),
    }
