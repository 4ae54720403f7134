"""Reference controllers for the inverted pendulum comparison.

Both inputs (error and its derivative) are saturated to +/- pi/4 and
carry a symmetric N/Z/P triangle partition over that range.  Variable
universes are padded by the default blur so that widening the upper
bounds by pi/16 never clips; the saturation keeps live inputs inside
the partition span regardless.

The force partition uses a half-span Z term.  With a Z triangle covering
the whole output universe, max-aggregation buries the clipped N/P
contributions under the Z mass and the control surface loses its linear
term at the origin, which cannot hold the pole against gravity.  The
+/- 60 N span gives both controllers a comfortable stability margin at
the chosen saturation.
"""
from __future__ import annotations

import math

from .core import LinguisticVariable, RuleBase, T1System, make_triangle
from .decomposed import DecomposedSystem, blur_variable, decompose

__all__ = [
    "INPUT_SATURATION",
    "BLUR_DELTA",
    "FORCE_LIMIT",
    "GRID_SIZE",
    "error_variable",
    "error_rate_variable",
    "force_variable",
    "control_rulebase",
    "pendulum_t1_system",
    "pendulum_it2_system",
]

INPUT_SATURATION = math.pi / 4
BLUR_DELTA = math.pi / 16
FORCE_LIMIT = 60.0
GRID_SIZE = 1001


def _three_term_partition(
    name: str, span: float, zero_half_width: float, pad: float = 0.0
) -> LinguisticVariable:
    """Symmetric N/Z/P partition over [-span, span], universe padded by pad."""
    bound = span + pad
    return LinguisticVariable(
        name,
        (-bound, bound),
        (
            ("N", make_triangle(-span, -span, 0.0)),
            ("Z", make_triangle(-zero_half_width, 0.0, zero_half_width)),
            ("P", make_triangle(0.0, span, span)),
        ),
    )


def error_variable() -> LinguisticVariable:
    return _three_term_partition(
        "error", INPUT_SATURATION, INPUT_SATURATION, pad=BLUR_DELTA
    )


def error_rate_variable() -> LinguisticVariable:
    return _three_term_partition(
        "error_rate", INPUT_SATURATION, INPUT_SATURATION, pad=BLUR_DELTA
    )


def force_variable() -> LinguisticVariable:
    return _three_term_partition("force", FORCE_LIMIT, FORCE_LIMIT / 2.0)


def control_rulebase() -> RuleBase:
    """Rows are error N/Z/P, columns error-rate N/Z/P."""
    return RuleBase.from_table(
        ("N", "Z", "P"),
        ("N", "Z", "P"),
        (
            ("P", "P", "Z"),
            ("P", "Z", "N"),
            ("Z", "N", "N"),
        ),
    )


def pendulum_t1_system(grid_size: int = GRID_SIZE) -> T1System:
    """Type-1 balance controller: error and error rate in, cart force out."""
    return T1System(
        inputs=(error_variable(), error_rate_variable()),
        output=force_variable(),
        rulebase=control_rulebase(),
        grid_size=grid_size,
    )


def pendulum_it2_system(delta: float = BLUR_DELTA, grid_size: int = GRID_SIZE) -> DecomposedSystem:
    """Decomposed interval type-2 controller: the type-1 inputs blurred by
    delta in each direction, output terms kept type-1."""
    return decompose(
        inputs=(
            blur_variable(error_variable(), delta),
            blur_variable(error_rate_variable(), delta),
        ),
        output=force_variable(),
        rulebase=control_rulebase(),
        grid_size=grid_size,
    )
