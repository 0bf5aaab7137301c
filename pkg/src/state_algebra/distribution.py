"""Gibbs distributions in base-offset form and exact queries on them.

A :class:`Distribution` is ``1|base + s_1|psi_1 + ... + s_m|psi_m``: the
unnormalized mass of a state is ``base`` times the factors of every
component containing it. Components may overlap and need not cover the
space. Queries orthogonalize on demand and evaluate the closed-form
partition function; nothing here enumerates ``2**N`` states.

Masses are reported as :class:`PartitionValue` (mantissa and binary
exponent), so the ``2**N`` volume factors never overflow a double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .algebra import (
    BinaryStateVector,
    Row,
    VariableSet,
    _popcount,
    _select_bits,
    _subtract,
    support,
    vector_difference,
    vector_product,
    vector_union,
)
from .errors import InconsistentEvidenceError, ResourceLimitError, UsageError

MARGINAL_ROW_BUDGET = 1 << 22

EvidenceRow = Row


@dataclass(frozen=True)
class Factor:
    """Exponential factor ``psi = exp(-p)`` of a coordinate ``p``."""

    psi: float

    def __post_init__(self):
        if not (self.psi > 0 and math.isfinite(self.psi)):
            raise UsageError(f"factor must be positive and finite, got {self.psi!r}")

    @property
    def p(self) -> float:
        return -math.log(self.psi)

    @classmethod
    def from_coordinate(cls, p: float) -> "Factor":
        return cls(math.exp(-p))


@dataclass(frozen=True)
class WeightedComponent:
    states: BinaryStateVector
    factor: Factor


@dataclass(frozen=True)
class PartitionValue:
    """Nonnegative mass ``value * 2**scale_exponent``.

    Stored normalized: ``value`` in ``[0.5, 1)`` unless the mass is zero.
    """

    value: float
    scale_exponent: int = 0

    def __post_init__(self):
        if not self.value >= 0:
            raise UsageError(f"mass must be nonnegative, got {self.value!r}")
        if self.value == 0:
            object.__setattr__(self, "scale_exponent", 0)
            return
        m, e = math.frexp(self.value)
        object.__setattr__(self, "value", m)
        object.__setattr__(self, "scale_exponent", self.scale_exponent + e)

    @classmethod
    def zero(cls) -> "PartitionValue":
        return cls(0.0)

    def to_float(self) -> float:
        """Plain float; ``inf`` if the mass exceeds the double range."""
        try:
            return math.ldexp(self.value, self.scale_exponent)
        except OverflowError:
            return math.inf

    def log(self) -> float:
        if self.value == 0:
            return -math.inf
        return math.log(self.value) + self.scale_exponent * math.log(2)

    def scaled(self, exponent: int) -> "PartitionValue":
        """Multiply by ``2**exponent``."""
        return PartitionValue(self.value, self.scale_exponent + exponent)

    def __add__(self, other: "PartitionValue") -> "PartitionValue":
        if self.value == 0:
            return other
        if other.value == 0:
            return self
        e = max(self.scale_exponent, other.scale_exponent)
        total = math.ldexp(self.value, self.scale_exponent - e) + math.ldexp(
            other.value, other.scale_exponent - e
        )
        return PartitionValue(total, e)

    def __mul__(self, other: "PartitionValue | float") -> "PartitionValue":
        if isinstance(other, PartitionValue):
            return PartitionValue(self.value * other.value, self.scale_exponent + other.scale_exponent)
        return PartitionValue(self.value * other, self.scale_exponent)

    __rmul__ = __mul__

    def ratio(self, other: "PartitionValue") -> float:
        """``self / other`` as a float."""
        if other.value == 0:
            raise ZeroDivisionError("ratio by a zero mass")
        return math.ldexp(self.value / other.value, self.scale_exponent - other.scale_exponent)

    def isclose(self, other: "PartitionValue", rel_tol: float = 1e-9) -> bool:
        if self.value == 0 or other.value == 0:
            return self.value == other.value
        return abs(self.ratio(other) - 1.0) <= rel_tol

    def as_dict(self) -> dict:
        return {"mantissa": self.value, "exponent": self.scale_exponent}

    def __str__(self) -> str:
        return f"{self.value!r} * 2^{self.scale_exponent}"


def sum_masses(values: Iterable[PartitionValue]) -> PartitionValue:
    total = PartitionValue.zero()
    for v in values:
        total = total + v
    return total


@dataclass(frozen=True)
class Distribution:
    """``1|base + sum_i s_i|psi_i`` over ``width`` variables.

    ``log2_scale`` is an extra exact multiplier ``2**log2_scale`` on every
    mass; marginalization uses it to keep eliminated-volume factors out of
    the floats.
    """

    width: int
    base: Factor = Factor(1.0)
    components: tuple = ()
    log2_scale: int = 0

    def __post_init__(self):
        comps = []
        for c in self.components:
            if not isinstance(c, WeightedComponent):
                states, psi = c
                c = WeightedComponent(states, psi if isinstance(psi, Factor) else Factor(psi))
            if c.states.width != self.width:
                raise UsageError(
                    f"component width {c.states.width} does not match distribution width {self.width}"
                )
            if c.states:
                comps.append(c)
        object.__setattr__(self, "components", tuple(comps))
        if not isinstance(self.base, Factor):
            object.__setattr__(self, "base", Factor(self.base))

    @classmethod
    def uniform(cls, width: int, psi: float = 1.0) -> "Distribution":
        return cls(width, Factor(psi))

    @classmethod
    def from_rows(cls, terms: Sequence[tuple[str, float]], base: float = 1.0) -> "Distribution":
        """Hybrid-notation shorthand: ``[("0 0 -", psi1), ("- 1 1", psi2)]``."""
        if not terms:
            raise UsageError("from_rows needs at least one term")
        width = Row.parse(terms[0][0]).width
        return cls(width, Factor(base), tuple((BinaryStateVector.of(r), psi) for r, psi in terms))

    def support(self) -> VariableSet:
        out: frozenset = frozenset()
        for c in self.components:
            out |= support(c.states)
        return out

    def __str__(self) -> str:
        lines = []
        if self.base.psi != 1.0 or self.log2_scale:
            scale = f" * 2^{self.log2_scale}" if self.log2_scale else ""
            lines.append(f"{' '.join('-' * self.width)} | {self.base.psi!r}{scale}  (base)")
        for c in self.components:
            for r in c.states.rows:
                lines.append(f"{r} | {c.factor.psi!r}")
        return "\n".join(lines)


def _check_same_width(a: int, b: int) -> None:
    if a != b:
        raise UsageError(f"width mismatch: {a} vs {b}")


def state_mass(d: Distribution, x: Row) -> Factor:
    """Unnormalized mass of one fully specified state."""
    _check_same_width(d.width, x.width)
    if not x.is_state():
        raise UsageError(f"state_mass needs a wildcard-free row, got {x}")
    psi = d.base.psi
    for c in d.components:
        if x in c.states:
            psi *= c.factor.psi
    return Factor(math.ldexp(psi, d.log2_scale))


def add(d1: Distribution, d2: Distribution) -> Distribution:
    """Coordinate-space sum: masses multiply pointwise."""
    _check_same_width(d1.width, d2.width)
    return Distribution(
        d1.width,
        Factor(d1.base.psi * d2.base.psi),
        d1.components + d2.components,
        d1.log2_scale + d2.log2_scale,
    )


def _fold(
    components: Iterable[tuple[BinaryStateVector, float]],
    width: int,
    combine,
    budget: int | None = None,
) -> list[tuple[BinaryStateVector, float]]:
    """Fold weighted vectors into a list of disjoint cells.

    A cell met by ``s`` splits into ``cell \\ s`` (weight unchanged) and
    ``cell s`` (weights combined); the part of ``s`` outside every cell
    enters with its own weight.
    """
    cells: list[tuple[BinaryStateVector, float]] = []
    covered = BinaryStateVector.zero(width)
    for s, w in components:
        nxt = []
        for cell, cw in cells:
            inter = vector_product(cell, s)
            if not inter:
                nxt.append((cell, cw))
                continue
            rest = vector_difference(cell, s)
            if rest:
                nxt.append((rest, cw))
            nxt.append((inter, combine(cw, w)))
        fresh = vector_difference(s, covered)
        if fresh:
            nxt.append((fresh, w))
        covered = vector_union(covered, s)
        cells = nxt
        if budget is not None and sum(len(c) for c, _ in cells) > budget:
            raise ResourceLimitError(f"intermediate row count exceeds the budget of {budget}")
    return cells


def orthogonalize(d: Distribution) -> Distribution:
    """Equivalent distribution whose components are pairwise disjoint.

    Components are folded smallest support first (stable on ties).
    """
    order = sorted(
        range(len(d.components)), key=lambda i: (len(support(d.components[i].states)), i)
    )
    cells = _fold(
        ((d.components[i].states, d.components[i].factor.psi) for i in order),
        d.width,
        lambda a, b: a * b,
    )
    cells.sort(key=lambda cw: cw[0])
    return Distribution(d.width, d.base, tuple(WeightedComponent(s, Factor(w)) for s, w in cells), d.log2_scale)


def _disjoint_cells(d: Distribution) -> list[tuple[list, float]]:
    """Disjoint cube lists with their combined factors, in a fixed order.

    Same fold as :func:`orthogonalize` on raw cubes: only cardinalities are
    needed, so the intermediate cells are never canonicalized.
    """
    comps = sorted(d.components, key=lambda c: (len(support(c.states)), c.states))
    cells: list[tuple[list, float]] = []
    seen: list = []
    for comp in comps:
        s = list(comp.states._pairs)
        w = comp.factor.psi
        nxt = []
        for cell, cw in cells:
            inter = [
                (ca | cb, va | vb)
                for ca, va in cell
                for cb, vb in s
                if not (va ^ vb) & ca & cb
            ]
            if not inter:
                nxt.append((cell, cw))
                continue
            rest = _subtract(cell, s)
            if rest:
                nxt.append((rest, cw))
            nxt.append((inter, cw * w))
        fresh = _subtract(s, seen)
        if fresh:
            nxt.append((fresh, w))
        seen.extend(s)
        cells = nxt
    return cells


def partition(d: Distribution) -> PartitionValue:
    """Exact ``Z = base * [2**N + sum_i (psi_i - 1)|s_i|]`` after orthogonalizing.

    Evaluated as ``base * [|s_0| + sum_i psi_i |s_i|]`` with ``s_0`` the
    uncovered remainder, so every term is nonnegative; cardinalities are
    exact integers divided by ``2**N`` before they meet the floats.
    """
    n = d.width
    full = 1 << n
    terms = []
    covered = 0
    for cubes, psi in _disjoint_cells(d):
        k = sum(1 << (n - _popcount(c)) for c, _ in cubes)
        covered += k
        terms.append(psi * (k / full))
    terms.append((full - covered) / full)
    total = d.base.psi * math.fsum(terms)
    return PartitionValue(total, n + d.log2_scale)


def project(d: Distribution, e: EvidenceRow) -> Distribution:
    """Induced conditional distribution ``e ^ d`` over the free columns of ``e``."""
    _check_same_width(d.width, e.width)
    if e.care == 0:
        return d
    cols = [i for i in range(d.width) if not (e.care >> i) & 1]
    comps = []
    for c in d.components:
        pairs = []
        for cc, cv in c.states._pairs:
            if (cv ^ e.value) & cc & e.care:
                continue
            pairs.append((_select_bits(cc, cols), _select_bits(cv, cols)))
        if pairs:
            comps.append(WeightedComponent(BinaryStateVector._from_pairs(len(cols), pairs), c.factor))
    return Distribution(len(cols), d.base, tuple(comps), d.log2_scale)


def free_columns(e: EvidenceRow) -> list[int]:
    return [i for i in range(e.width) if not (e.care >> i) & 1]


def vector_mass(d: Distribution, s: BinaryStateVector) -> PartitionValue:
    """Unnormalized mass of ``s``: one projected partition per row of ``s``."""
    _check_same_width(d.width, s.width)
    return sum_masses(partition(project(d, r)) for r in s.rows)


def marginalize(d: Distribution, keep: Iterable[int], budget: int = MARGINAL_ROW_BUDGET) -> Distribution:
    """Induced marginal distribution on the variables ``keep``.

    Masses of eliminated configurations add up. The result covers the kept
    space with disjoint components and has the same partition function.
    """
    kept = sorted(set(keep))
    if any(not 0 <= i < d.width for i in kept):
        raise UsageError(f"marginal variables {kept} not a subset of 0..{d.width - 1}")
    if len(kept) == d.width:
        return d
    n = d.width
    keep_mask = 0
    for i in kept:
        keep_mask |= 1 << i
    elim_mask = ((1 << n) - 1) & ~keep_mask
    n_elim = n - len(kept)

    orth = orthogonalize(d) if len(d.components) > 1 else d
    cells = [(c.states, c.factor.psi) for c in orth.components]
    covered = BinaryStateVector.zero(n)
    for s, _ in cells:
        covered = vector_union(covered, s)
    rest = vector_difference(BinaryStateVector.one(n), covered)
    if rest:
        cells.append((rest, 1.0))

    # each row contributes psi * 2**(wildcards among eliminated columns);
    # for wide eliminations 2**n_elim moves into log2_scale
    shift = 0 if n_elim <= 256 else n_elim
    grouped: dict[tuple[int, int], list[float]] = {}
    for s, psi in cells:
        for c, v in s._pairs:
            w = psi * d.base.psi * math.ldexp(1.0, n_elim - shift - _popcount(c & elim_mask))
            key = (_select_bits(c, kept), _select_bits(v, kept))
            grouped.setdefault(key, []).append(w)
            if len(grouped) > budget:
                raise ResourceLimitError(f"marginal row count exceeds the budget of {budget}")

    width = len(kept)
    terms = [
        (BinaryStateVector._from_canonical(width, (key,)), math.fsum(ws))
        for key, ws in sorted(grouped.items())
    ]
    atoms = _fold(terms, width, lambda a, b: a + b, budget=budget)

    by_weight: dict[float, list] = {}
    for s, w in atoms:
        by_weight.setdefault(w, []).extend(s._pairs)
    comps = tuple(
        WeightedComponent(BinaryStateVector._from_pairs(width, pairs), Factor(w))
        for w, pairs in sorted(by_weight.items())
    )
    return Distribution(width, Factor(1.0), comps, d.log2_scale + shift)


@dataclass
class QueryResult:
    """Outcome of a conditional query, with enough detail to audit it."""

    probability: float
    mass_true: PartitionValue
    mass_false: PartitionValue
    strategy: str = "direct"
    free_width: int = 0
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "probability": self.probability,
            "mass_true": self.mass_true.as_dict(),
            "mass_false": self.mass_false.as_dict(),
            "strategy": self.strategy,
            "free_width": self.free_width,
            "diagnostics": self.diagnostics,
        }


def normalized(mass_true: PartitionValue, mass_false: PartitionValue) -> float:
    total = mass_true + mass_false
    if total.value == 0:
        raise InconsistentEvidenceError("evidence has zero probability: both target masses vanish")
    return mass_true.ratio(total)


def target_column(e: EvidenceRow, target: int) -> int:
    """Index of ``target`` inside the free space of ``e``."""
    if not 0 <= target < e.width:
        raise UsageError(f"target index {target} out of range for width {e.width}")
    if (e.care >> target) & 1:
        raise UsageError(f"target X{target + 1} is already evidenced")
    return sum(1 for i in range(target) if not (e.care >> i) & 1)


def delta(width: int, column: int, bit: int) -> EvidenceRow:
    return Row.from_assignment(width, {column: bit})


def conditional_probability(d: Distribution, e: EvidenceRow, target: int) -> QueryResult:
    """``P(target = 1 | e)`` from the projected distribution ``e ^ d``."""
    _check_same_width(d.width, e.width)
    col = target_column(e, target)
    eta = project(d, e)
    m1 = partition(project(eta, delta(eta.width, col, 1)))
    m0 = partition(project(eta, delta(eta.width, col, 0)))
    return QueryResult(normalized(m1, m0), m1, m0, "direct", eta.width)
