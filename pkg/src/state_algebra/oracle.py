"""Exhaustive ground truth over all ``2**N`` assignments.

Rules are evaluated straight from their syntax trees on numpy bit columns,
so nothing here touches the row algebra; agreement with the algebraic
engine is independent evidence. States are indexed with ``X1`` as the most
significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .algebra import Row
from .errors import InconsistentEvidenceError, ResourceLimitError, UsageError
from .rules import DEFAULT_EPSILON, And, Formula, Implies, Not, Or, RuleSystem, Var

MAX_ORACLE_WIDTH = 24
MAX_DENSE_WIDTH = 20


@dataclass
class OracleResult:
    partition: float
    masses: np.ndarray | None = None


class _Columns:
    """Lazy per-variable bit columns over all assignments."""

    def __init__(self, width: int):
        self.width = width
        self.index = np.arange(1 << width, dtype=np.int64)
        self._cache: dict[int, np.ndarray] = {}

    def __getitem__(self, i: int) -> np.ndarray:
        col = self._cache.get(i)
        if col is None:
            col = ((self.index >> (self.width - 1 - i)) & 1).astype(bool)
            self._cache[i] = col
        return col


def _columns(width: int) -> _Columns:
    return _Columns(width)


def _truth(f: Formula, cols: _Columns) -> np.ndarray:
    if isinstance(f, Var):
        return cols[f.index]
    if isinstance(f, Not):
        return ~_truth(f.operand, cols)
    if isinstance(f, And):
        return _truth(f.left, cols) & _truth(f.right, cols)
    if isinstance(f, Or):
        return _truth(f.left, cols) | _truth(f.right, cols)
    if isinstance(f, Implies):
        return ~_truth(f.left, cols) | _truth(f.right, cols)
    raise TypeError(f"not a formula node: {f!r}")


def _guard(rs: RuleSystem) -> None:
    if rs.width > MAX_ORACLE_WIDTH:
        raise ResourceLimitError(f"oracle refuses N = {rs.width} > {MAX_ORACLE_WIDTH}")


def state_masses(rs: RuleSystem, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Unnormalized mass of every assignment: product of psi or 1 - psi per rule."""
    _guard(rs)
    cols = _columns(rs.width)
    masses = np.ones(1 << rs.width)
    for r in rs.rules:
        psi = 1.0 - epsilon if r.deterministic else float(r.weight)
        minus = epsilon if r.deterministic else 1.0 - psi
        masses *= np.where(_truth(r.formula, cols), psi, minus)
    return masses


def satisfying_mask(rs: RuleSystem, deterministic_only: bool = False) -> np.ndarray:
    """Boolean mask of assignments satisfying every (deterministic) rule."""
    _guard(rs)
    cols = _columns(rs.width)
    ok = np.ones(1 << rs.width, dtype=bool)
    for r in rs.rules:
        if deterministic_only and not r.deterministic:
            continue
        ok &= _truth(r.formula, cols)
    return ok


def oracle_partition(rs: RuleSystem, epsilon: float = DEFAULT_EPSILON) -> OracleResult:
    masses = state_masses(rs, epsilon)
    dense = masses if rs.width <= MAX_DENSE_WIDTH else None
    return OracleResult(float(np.sum(masses)), dense)


Evidence = Union[dict, Row]


def _as_dict(evidence: Evidence) -> dict[int, int]:
    if isinstance(evidence, Row):
        return {i: (evidence.value >> i) & 1 for i in range(evidence.width) if (evidence.care >> i) & 1}
    return dict(evidence)


def _evidence_mask(width: int, evidence: Evidence) -> np.ndarray:
    evidence = _as_dict(evidence)
    cols = _columns(width)
    keep = np.ones(1 << width, dtype=bool)
    for i, bit in evidence.items():
        if not 0 <= i < width:
            raise UsageError(f"evidence index {i} out of range")
        keep &= cols[i] if bit else ~cols[i]
    return keep


def oracle_mass(rs: RuleSystem, evidence: Evidence, epsilon: float = DEFAULT_EPSILON) -> float:
    """Unnormalized mass of all assignments consistent with ``evidence``."""
    masses = state_masses(rs, epsilon)
    return float(np.sum(masses[_evidence_mask(rs.width, evidence)]))


def oracle_conditional(
    rs: RuleSystem, evidence: Evidence, target: int, epsilon: float = DEFAULT_EPSILON
) -> float:
    """``P(X_target = 1 | evidence)`` by filtering assignments."""
    evidence = _as_dict(evidence)
    if target in evidence:
        raise UsageError(f"target X{target + 1} is already evidenced")
    masses = state_masses(rs, epsilon)
    cols = _columns(rs.width)
    keep = _evidence_mask(rs.width, evidence)
    m1 = float(np.sum(masses[keep & cols[target]]))
    m0 = float(np.sum(masses[keep & ~cols[target]]))
    if m1 + m0 == 0:
        raise InconsistentEvidenceError("evidence has zero probability")
    return m1 / (m1 + m0)


def oracle_marginal(rs: RuleSystem, keep: list[int], epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Masses of the ``2**|keep|`` kept assignments (first kept variable most significant)."""
    kept = sorted(keep)
    masses = state_masses(rs, epsilon)
    cols = _columns(rs.width)
    index = np.zeros(1 << rs.width, dtype=np.int64)
    for i in kept:
        index = (index << 1) | cols[i]
    return np.bincount(index, weights=masses, minlength=1 << len(kept))
