"""Type-1 fuzzy machinery.

Piecewise-linear membership functions, linguistic variables, rule bases,
Mamdani inference (min for AND and implication, max for aggregation) and
centroid defuzzification on a uniform sample grid.

Everything here is immutable after construction and free of interior
mutation, so values can be shared freely across threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

__all__ = [
    "UndefinedCentroid",
    "PiecewiseLinearMF",
    "LinguisticVariable",
    "Rule",
    "RuleBase",
    "SampledMF",
    "T1System",
    "make_triangle",
    "zero_mf",
    "mf_eval",
    "sample_mf",
    "fuzzify",
    "fire_strengths",
    "aggregate",
    "infer",
    "centroid",
    "t1_output",
]


class UndefinedCentroid(ArithmeticError):
    """A zero-area fuzzy set has no centroid."""


def _trapezoid(values: np.ndarray, step: float) -> float:
    """Trapezoid rule on a uniform grid."""
    return step * (float(values.sum()) - 0.5 * float(values[0] + values[-1]))


@dataclass(frozen=True)
class PiecewiseLinearMF:
    """Membership function given as an ordered list of (x, mu) vertices.

    Between vertices the grade is linearly interpolated.  Outside the
    first/last vertex the grade is 0; the boundary vertex value applies
    only at the exact endpoint.
    """

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        verts = tuple((float(x), float(m)) for x, m in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 2:
            raise ValueError("membership function needs at least 2 vertices")
        xs = [x for x, _ in verts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("vertex x coordinates must be strictly increasing")
        if any(not 0.0 <= m <= 1.0 for _, m in verts):
            raise ValueError("membership grades must lie in [0, 1]")

    @cached_property
    def _xs(self) -> np.ndarray:
        return np.array([x for x, _ in self.vertices])

    @cached_property
    def _mus(self) -> np.ndarray:
        return np.array([m for _, m in self.vertices])

    @property
    def support(self) -> tuple[float, float]:
        """x range of the vertex list (grades vanish strictly outside it)."""
        return self.vertices[0][0], self.vertices[-1][0]

    def sample(self, xs: np.ndarray) -> np.ndarray:
        """Evaluate on an array of points."""
        return np.interp(xs, self._xs, self._mus, left=0.0, right=0.0)

    def __call__(self, x: float) -> float:
        return mf_eval(self, x)


def make_triangle(a: float, b: float, c: float) -> PiecewiseLinearMF:
    """Triangular membership function with feet a, c and apex b at grade 1.

    Degenerate shoulders collapse duplicated vertices: a == b yields a left
    shoulder at grade 1, b == c a right shoulder.  A zero-width triangle
    (a == b == c) is rejected.
    """
    if not a <= b <= c:
        raise ValueError(f"triangle breakpoints must satisfy a <= b <= c, got ({a}, {b}, {c})")
    if a == c:
        raise ValueError("zero-width triangle has no support")
    verts: list[tuple[float, float]] = []
    for x, m in ((float(a), 0.0), (float(b), 1.0), (float(c), 0.0)):
        if verts and verts[-1][0] == x:
            verts[-1] = (x, max(verts[-1][1], m))
        else:
            verts.append((x, m))
    return PiecewiseLinearMF(tuple(verts))


def zero_mf(lo: float, hi: float) -> PiecewiseLinearMF:
    """Membership function that is 0 everywhere on [lo, hi]."""
    return PiecewiseLinearMF(((float(lo), 0.0), (float(hi), 0.0)))


def mf_eval(mf: PiecewiseLinearMF, x: float) -> float:
    """Membership grade at x: linear interpolation, 0 strictly outside support."""
    return float(np.interp(x, mf._xs, mf._mus, left=0.0, right=0.0))


@dataclass(frozen=True)
class LinguisticVariable:
    """Named variable over a closed real interval with labelled terms."""

    name: str
    universe: tuple[float, float]
    terms: tuple[tuple[str, PiecewiseLinearMF], ...]

    def __post_init__(self) -> None:
        lo, hi = (float(v) for v in self.universe)
        object.__setattr__(self, "universe", (lo, hi))
        object.__setattr__(self, "terms", tuple(self.terms))
        if not lo < hi:
            raise ValueError(f"universe of {self.name!r} must satisfy lo < hi, got [{lo}, {hi}]")
        labels = [label for label, _ in self.terms]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate term labels in variable {self.name!r}")
        if not labels:
            raise ValueError(f"variable {self.name!r} has no terms")
        slack = 1e-12 * (hi - lo)
        for label, mf in self.terms:
            first, last = mf.support
            if first < lo - slack or last > hi + slack:
                raise ValueError(
                    f"term {label!r} of {self.name!r} has vertices outside the universe"
                )

    @cached_property
    def _by_label(self) -> dict[str, PiecewiseLinearMF]:
        return {label: mf for label, mf in self.terms}

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.terms)

    def term(self, label: str) -> PiecewiseLinearMF:
        try:
            return self._by_label[label]
        except KeyError:
            raise KeyError(f"variable {self.name!r} has no term {label!r}") from None


def fuzzify(var: LinguisticVariable, x: float) -> dict[str, float]:
    """Membership grade of x for every term of the variable."""
    return {label: mf_eval(mf, x) for label, mf in var.terms}


@dataclass(frozen=True)
class Rule:
    """One antecedent label per input variable mapped to an output label."""

    antecedent: tuple[str, ...]
    consequent: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "antecedent", tuple(self.antecedent))
        if not self.antecedent:
            raise ValueError("rule needs at least one antecedent label")


@dataclass(frozen=True)
class RuleBase:
    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.rules:
            raise ValueError("rule base is empty")
        arities = {len(rule.antecedent) for rule in self.rules}
        if len(arities) != 1:
            raise ValueError("all rules must share the same antecedent arity")
        seen = set()
        for rule in self.rules:
            if rule.antecedent in seen:
                raise ValueError(f"duplicate antecedent {rule.antecedent}")
            seen.add(rule.antecedent)

    @property
    def arity(self) -> int:
        return len(self.rules[0].antecedent)

    @classmethod
    def from_table(
        cls,
        row_labels: Sequence[str],
        col_labels: Sequence[str],
        table: Sequence[Sequence[str]],
    ) -> "RuleBase":
        """Build a two-input rule base from a rows x cols consequent grid."""
        if len(table) != len(row_labels):
            raise ValueError(f"rule table has {len(table)} rows, expected {len(row_labels)}")
        rules = []
        for r, row in enumerate(table):
            if len(row) != len(col_labels):
                raise ValueError(
                    f"rule table row {r} has {len(row)} entries, expected {len(col_labels)}"
                )
            for c, consequent in enumerate(row):
                rules.append(Rule((row_labels[r], col_labels[c]), consequent))
        return cls(tuple(rules))


@dataclass(frozen=True, eq=False)
class SampledMF:
    """Membership function sampled on a uniform grid over [lo, hi]."""

    lo: float
    hi: float
    mu: np.ndarray

    def __post_init__(self) -> None:
        mu = np.asarray(self.mu, dtype=np.float64)
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if mu.ndim != 1 or mu.size < 2:
            raise ValueError("sampled membership needs a 1-D grid of at least 2 points")
        if not self.lo < self.hi:
            raise ValueError("sampled membership needs lo < hi")
        if float(mu.min()) < 0.0 or float(mu.max()) > 1.0:
            raise ValueError("sampled membership grades must lie in [0, 1]")

    @property
    def grid_size(self) -> int:
        return int(self.mu.size)

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.grid_size - 1)

    @cached_property
    def xs(self) -> np.ndarray:
        xs = np.linspace(self.lo, self.hi, self.grid_size)
        xs.setflags(write=False)
        return xs


def sample_mf(mf: PiecewiseLinearMF, lo: float, hi: float, grid_size: int) -> SampledMF:
    """Sample a piecewise-linear membership function on a uniform grid."""
    xs = np.linspace(lo, hi, grid_size)
    return SampledMF(lo, hi, mf.sample(xs))


@dataclass(frozen=True, eq=False)
class T1System:
    """Mamdani system: fuzzify -> min-AND -> min-implication -> max-aggregation."""

    inputs: tuple[LinguisticVariable, ...]
    output: LinguisticVariable
    rulebase: RuleBase
    grid_size: int = 1001

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if not self.inputs:
            raise ValueError("system needs at least one input variable")
        if self.grid_size < 2:
            raise ValueError("grid_size must be at least 2")
        if self.rulebase.arity != len(self.inputs):
            raise ValueError(
                f"rule arity {self.rulebase.arity} does not match {len(self.inputs)} inputs"
            )
        for rule in self.rulebase.rules:
            for label, var in zip(rule.antecedent, self.inputs):
                if label not in var.labels:
                    raise ValueError(
                        f"rule antecedent label {label!r} missing from variable {var.name!r}"
                    )
            if rule.consequent not in self.output.labels:
                raise ValueError(
                    f"rule consequent label {rule.consequent!r} missing from "
                    f"output variable {self.output.name!r}"
                )

    @cached_property
    def grid(self) -> np.ndarray:
        lo, hi = self.output.universe
        xs = np.linspace(lo, hi, self.grid_size)
        xs.setflags(write=False)
        return xs

    @cached_property
    def _consequent_matrix(self) -> np.ndarray:
        """Row per rule: the consequent term sampled on the output grid."""
        rows = [self.output.term(rule.consequent).sample(self.grid) for rule in self.rulebase.rules]
        mat = np.vstack(rows)
        mat.setflags(write=False)
        return mat


def fire_strengths(sys: T1System, inputs: Sequence[float]) -> list[tuple[int, float]]:
    """Firing strength of every rule: min over its antecedent grades."""
    if len(inputs) != len(sys.inputs):
        raise ValueError(f"expected {len(sys.inputs)} inputs, got {len(inputs)}")
    degrees = [fuzzify(var, x) for var, x in zip(sys.inputs, inputs)]
    out = []
    for index, rule in enumerate(sys.rulebase.rules):
        strength = min(deg[label] for deg, label in zip(degrees, rule.antecedent))
        out.append((index, strength))
    return out


def aggregate(sys: T1System, strengths: Sequence[float]) -> SampledMF:
    """Max-aggregate the min-clipped consequents for the given rule strengths."""
    if len(strengths) != len(sys.rulebase.rules):
        raise ValueError("one strength per rule required")
    clip = np.minimum(sys._consequent_matrix, np.asarray(strengths, dtype=np.float64)[:, None])
    lo, hi = sys.output.universe
    return SampledMF(lo, hi, clip.max(axis=0))


def infer(sys: T1System, inputs: Sequence[float]) -> SampledMF:
    """Aggregated output set for crisp inputs."""
    return aggregate(sys, [s for _, s in fire_strengths(sys, inputs)])


def centroid(s: SampledMF) -> tuple[float, float]:
    """(centroid, area) of a sampled set by the trapezoid rule.

    Raises UndefinedCentroid for a zero-area set; callers decide how to
    handle that (the closed-loop controller substitutes zero force).
    """
    area = _trapezoid(s.mu, s.step)
    if area <= 0.0:
        raise UndefinedCentroid("zero-area fuzzy set has no centroid")
    moment = _trapezoid(s.xs * s.mu, s.step)
    return moment / area, area


def t1_output(sys: T1System, inputs: Sequence[float]) -> float:
    """Crisp Mamdani output: infer then centroid-defuzzify."""
    value, _ = centroid(infer(sys, inputs))
    return value
