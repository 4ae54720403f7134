"""Decomposed interval type-2 fuzzy systems.

An interval type-2 variable is a pair of type-1 bounds per term; the gap
between them is the footprint of uncertainty (FOU).  Instead of iterative
type-reduction, the system here runs two ordinary type-1 Mamdani paths
(one fuzzifying with the upper bounds, one with the lower bounds) and
defuzzifies the combined output FOU with a closed-form centroid: the area
under the lower aggregate counts as negative area,

    y = (c_upper * area_upper - c_lower * area_lower) / (area_upper - area_lower)

which is exactly the x coordinate of the centroid of the planar region
between the two aggregated membership functions.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .core import (
    LinguisticVariable,
    PiecewiseLinearMF,
    RuleBase,
    SampledMF,
    T1System,
    UndefinedCentroid,
    centroid,
    infer,
    make_triangle,
    zero_mf,
)

__all__ = [
    "UndefinedOutput",
    "IT2Set",
    "IT2Variable",
    "DecomposedSystem",
    "CombinerResult",
    "blur_variable",
    "decompose",
    "evaluate_paths",
    "combine_centroid",
    "it2_output",
]

# Relative slack on the closed-form combiner denominator; below this the
# two aggregates are treated as identical and the output falls back to the
# upper-path centroid.
_DEGENERATE_FOU_EPS = 1e-12

_ORDER_CHECK_POINTS = 1001


def _check_fou_ordering(lower: PiecewiseLinearMF, upper: PiecewiseLinearMF, what: str) -> None:
    """Require lower(x) <= upper(x), sampled densely plus at every vertex."""
    lo = min(lower.support[0], upper.support[0])
    hi = max(lower.support[1], upper.support[1])
    xs = np.linspace(lo, hi, _ORDER_CHECK_POINTS)
    xs = np.concatenate([xs, lower._xs, upper._xs])
    if np.any(lower.sample(xs) > upper.sample(xs) + 1e-12):
        raise ValueError(f"lower membership exceeds upper membership for {what}")


@dataclass(frozen=True)
class IT2Set:
    """Interval type-2 set: a lower/upper pair of type-1 bounds."""

    label: str
    lower: PiecewiseLinearMF
    upper: PiecewiseLinearMF

    def __post_init__(self) -> None:
        _check_fou_ordering(self.lower, self.upper, f"term {self.label!r}")


@dataclass(frozen=True)
class IT2Variable:
    """Linguistic variable whose terms are interval type-2 sets."""

    name: str
    universe: tuple[float, float]
    terms: tuple[IT2Set, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "universe", tuple(float(v) for v in self.universe))
        object.__setattr__(self, "terms", tuple(self.terms))
        # reuse the T1 variable validation for both bounding families
        self.upper_variable  # noqa: B018
        self.lower_variable  # noqa: B018

    @cached_property
    def upper_variable(self) -> LinguisticVariable:
        return LinguisticVariable(
            self.name, self.universe, tuple((t.label, t.upper) for t in self.terms)
        )

    @cached_property
    def lower_variable(self) -> LinguisticVariable:
        return LinguisticVariable(
            self.name, self.universe, tuple((t.label, t.lower) for t in self.terms)
        )


def _triangle_breakpoints(mf: PiecewiseLinearMF) -> tuple[float, float, float]:
    """Recover (foot, apex, foot) from a triangle or a collapsed shoulder."""
    verts = mf.vertices
    if len(verts) == 3 and verts[0][1] == 0.0 and verts[1][1] == 1.0 and verts[2][1] == 0.0:
        return verts[0][0], verts[1][0], verts[2][0]
    if len(verts) == 2:
        (xa, ma), (xb, mb) = verts
        if ma == 1.0 and mb == 0.0:  # left shoulder
            return xa, xa, xb
        if ma == 0.0 and mb == 1.0:  # right shoulder
            return xa, xb, xb
    raise ValueError("blurring is defined for triangular terms (including shoulders) only")


def blur_variable(var: LinguisticVariable, delta: float) -> IT2Variable:
    """Turn a type-1 variable into an interval type-2 one by width uncertainty.

    Each triangular term keeps its apex and gains uncertainty delta on each
    side of its support: the upper bound widens both feet outward (clipped
    to the universe), the lower bound narrows them inward.  A foot that
    coincides with the apex (a shoulder against the universe edge) stays
    pinned.  If narrowing leaves no support the lower bound degenerates to
    the all-zero membership function.
    """
    if delta < 0:
        raise ValueError("blur delta must be nonnegative")
    lo, hi = var.universe
    sets = []
    for label, mf in var.terms:
        if delta == 0.0:
            sets.append(IT2Set(label, lower=mf, upper=mf))
            continue
        a, b, c = _triangle_breakpoints(mf)
        upper_a = max(lo, a - delta) if a < b else a
        upper_c = min(hi, c + delta) if c > b else c
        lower_a = min(a + delta, b) if a < b else a
        lower_c = max(c - delta, b) if c > b else c
        upper = make_triangle(upper_a, b, upper_c)
        if lower_a < lower_c:
            lower = make_triangle(lower_a, b, lower_c)
        else:
            lower = zero_mf(lo, hi)
        sets.append(IT2Set(label, lower=lower, upper=upper))
    return IT2Variable(var.name, var.universe, tuple(sets))


@dataclass(frozen=True, eq=False)
class DecomposedSystem:
    """Two parallel type-1 paths sharing one rule base and output grid."""

    upper_path: T1System
    lower_path: T1System

    def __post_init__(self) -> None:
        up, low = self.upper_path, self.lower_path
        if up.rulebase != low.rulebase:
            raise ValueError("both paths must share the rule base")
        if up.grid_size != low.grid_size:
            raise ValueError("both paths must share the output grid size")
        if up.output.universe != low.output.universe:
            raise ValueError("both paths must share the output universe")
        if len(up.inputs) != len(low.inputs):
            raise ValueError("both paths must have the same input arity")
        for uvar, lvar in zip(up.inputs, low.inputs):
            if uvar.universe != lvar.universe or uvar.labels != lvar.labels:
                raise ValueError(
                    f"input variable {uvar.name!r} differs in universe or labels between paths"
                )
            for label in uvar.labels:
                _check_fou_ordering(
                    lvar.term(label), uvar.term(label), f"input term {uvar.name}.{label}"
                )
        for label in up.output.labels:
            _check_fou_ordering(
                low.output.term(label), up.output.term(label), f"output term {label}"
            )

    @property
    def output_universe(self) -> tuple[float, float]:
        return self.upper_path.output.universe


def decompose(
    inputs: Sequence[IT2Variable],
    output: Union[LinguisticVariable, IT2Variable],
    rulebase: RuleBase,
    grid_size: int = 1001,
) -> DecomposedSystem:
    """Assemble the two type-1 paths of a decomposed interval type-2 system.

    The upper path fuzzifies with every term's upper bound, the lower path
    with the lower bound.  The output is usually a plain type-1 variable
    (both paths share it); an IT2Variable output is accepted for
    generality, in which case each path takes its matching bound.
    """
    upper_inputs = tuple(v.upper_variable for v in inputs)
    lower_inputs = tuple(v.lower_variable for v in inputs)
    if isinstance(output, IT2Variable):
        upper_out, lower_out = output.upper_variable, output.lower_variable
    else:
        upper_out = lower_out = output
    return DecomposedSystem(
        upper_path=T1System(upper_inputs, upper_out, rulebase, grid_size),
        lower_path=T1System(lower_inputs, lower_out, rulebase, grid_size),
    )


def evaluate_paths(d: DecomposedSystem, inputs: Sequence[float]) -> tuple[SampledMF, SampledMF]:
    """Run both type-1 paths; returns (upper, lower) aggregated sets."""
    upper = infer(d.upper_path, inputs)
    lower = infer(d.lower_path, inputs)
    # min/max inference is monotone in the input grades, so FOU ordering
    # must survive aggregation
    assert np.all(lower.mu <= upper.mu), "FOU ordering violated by inference"
    return upper, lower


class UndefinedOutput(ArithmeticError):
    """No rule fired on either path, so the combined output is undefined."""


@dataclass(frozen=True)
class CombinerResult:
    """Closed-form combination of the two path outputs.

    lower_centroid is None when the lower aggregate has zero area (the
    formula then reduces to the upper-path centroid).
    """

    upper_centroid: float
    lower_centroid: float | None
    upper_area: float
    lower_area: float
    crisp: float


def combine_centroid(upper: SampledMF, lower: SampledMF) -> CombinerResult:
    """Centroid of the region between the two aggregates, in closed form.

    Treats the area under the lower aggregate as negative area.  When the
    two aggregates coincide (area difference below 1e-12 of the universe
    span) the result is the upper-path centroid, matching the type-1
    equivalence of a zero-width FOU.
    """
    if (upper.lo, upper.hi, upper.grid_size) != (lower.lo, lower.hi, lower.grid_size):
        raise ValueError("aggregates must share universe and grid")
    span = upper.hi - upper.lo
    try:
        c_u, a_u = centroid(upper)
    except UndefinedCentroid:
        raise UndefinedOutput("no rule fired on either path") from None
    try:
        c_l, a_l = centroid(lower)
    except UndefinedCentroid:
        return CombinerResult(c_u, None, a_u, 0.0, c_u)
    assert a_u - a_l >= -_DEGENERATE_FOU_EPS * span, "lower area exceeds upper area"
    if a_u - a_l < _DEGENERATE_FOU_EPS * span:
        crisp = c_u
    else:
        crisp = (c_u * a_u - c_l * a_l) / (a_u - a_l)
    return CombinerResult(c_u, c_l, a_u, a_l, crisp)


def it2_output(d: DecomposedSystem, inputs: Sequence[float]) -> float:
    """Crisp output of the decomposed system for crisp inputs."""
    upper, lower = evaluate_paths(d, inputs)
    return combine_centroid(upper, lower).crisp
