"""Weighted Boolean rules: model files, formulas, and their compilation.

Model file format (UTF-8, line oriented, ``#`` starts a comment)::

    vars X1 X2 X3 X4 X5
    rule 0.9 : X1 | X2 -> X3
    rule det : !(X3 & X4)

``vars`` must be the first non-comment line. A weight is a decimal strictly
inside (0, 1) or the keyword ``det`` for a deterministic rule. Formula
operators by decreasing precedence: ``!``, ``&``, ``|``, ``->`` (right
associative); parentheses group.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

from .algebra import (
    BinaryStateVector,
    Row,
    cardinality,
    complement,
    vector_product,
    vector_union,
)
from .distribution import Distribution, Factor, WeightedComponent
from .errors import (
    DuplicateVariableError,
    InconsistentModelError,
    ModelSyntaxError,
    ResourceLimitError,
    UndeclaredVariableError,
    UsageError,
    WeightRangeError,
)

DEFAULT_EPSILON = 1e-9
FORMULA_ROW_BUDGET = 1 << 20


# -- formulas ----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    index: int

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not:
    operand: "Formula"

    def __str__(self):
        return f"!{_wrap(self.operand, Not)}"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"{_wrap(self.left, And)} & {_wrap(self.right, And)}"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"{_wrap(self.left, Or)} | {_wrap(self.right, Or)}"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"{_wrap(self.left, Or)} -> {_wrap(self.right, Implies)}"


Formula = Union[Var, Not, And, Or, Implies]

_PRECEDENCE = {Implies: 0, Or: 1, And: 2, Not: 3, Var: 4}


def _wrap(f: Formula, parent: type) -> str:
    return f"({f})" if _PRECEDENCE[type(f)] < _PRECEDENCE[parent] else str(f)


def formula_variables(f: Formula) -> frozenset[int]:
    if isinstance(f, Var):
        return frozenset([f.index])
    if isinstance(f, Not):
        return formula_variables(f.operand)
    return formula_variables(f.left) | formula_variables(f.right)


def evaluate(f: Formula, assignment: Sequence[int]) -> bool:
    """Truth value of ``f`` under a full assignment (index -> bit)."""
    if isinstance(f, Var):
        return bool(assignment[f.index])
    if isinstance(f, Not):
        return not evaluate(f.operand, assignment)
    if isinstance(f, And):
        return evaluate(f.left, assignment) and evaluate(f.right, assignment)
    if isinstance(f, Or):
        return evaluate(f.left, assignment) or evaluate(f.right, assignment)
    return (not evaluate(f.left, assignment)) or evaluate(f.right, assignment)


class Deterministic(enum.Enum):
    DET = "det"

    def __repr__(self):
        return "DETERMINISTIC"


DETERMINISTIC = Deterministic.DET


@dataclass(frozen=True)
class Rule:
    formula: Formula
    weight: Union[float, Deterministic]

    def __post_init__(self):
        if self.weight is not DETERMINISTIC:
            w = self.weight
            if not (isinstance(w, (int, float)) and 0 < w < 1):
                raise WeightRangeError(f"rule weight must lie strictly inside (0, 1), got {w!r}")

    @property
    def deterministic(self) -> bool:
        return self.weight is DETERMINISTIC

    def psi(self, epsilon: float = DEFAULT_EPSILON) -> float:
        return 1.0 - epsilon if self.deterministic else float(self.weight)


@dataclass(frozen=True)
class RuleSystem:
    variables: tuple[str, ...]
    rules: tuple[Rule, ...] = ()

    def __post_init__(self):
        if not self.variables:
            raise UsageError("a rule system needs at least one variable")
        seen = set()
        for name in self.variables:
            if name in seen:
                raise DuplicateVariableError(f"variable {name!r} declared twice")
            seen.add(name)
        for r in self.rules:
            for i in formula_variables(r.formula):
                if i >= len(self.variables):
                    raise UndeclaredVariableError(f"rule refers to variable index {i}")

    @property
    def width(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise UsageError(f"unknown variable {name!r}") from None

    def evidence(self, assignment: dict[str, int]) -> Row:
        """Evidence row from ``{name: bit}``."""
        return Row.from_assignment(self.width, {self.index(k): v for k, v in assignment.items()})

    def to_text(self) -> str:
        lines = ["vars " + " ".join(self.variables)]
        for r in self.rules:
            w = "det" if r.deterministic else repr(float(r.weight))
            lines.append(f"rule {w} : {r.formula}")
        return "\n".join(lines) + "\n"


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>->|[!&|()]))")
_WEIGHT = re.compile(r"^(det|[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)$")


class _FormulaParser:
    def __init__(self, text: str, names: dict[str, int], line: int, offset: int):
        self.line = line
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                col = offset + pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
                raise ModelSyntaxError(f"unexpected character {text[pos:].lstrip()[0]!r}", line, col)
            kind = "name" if m.group("name") else "op"
            tok = m.group(kind)
            self.tokens.append((kind, tok, offset + m.start(kind) + 1))
            pos = m.end()
        self.pos = 0
        self.names = names
        self.end_col = offset + len(text) + 1

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, self.end_col)

    def take(self, op=None):
        tok = self.peek()
        if op is not None and tok[1] != op:
            found = "end of line" if tok[0] is None else repr(tok[1])
            raise ModelSyntaxError(f"expected {op!r}, found {found}", self.line, tok[2])
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        if not self.tokens:
            raise ModelSyntaxError("empty formula", self.line, self.end_col)
        f = self.implication()
        kind, tok, col = self.peek()
        if kind is not None:
            raise ModelSyntaxError(f"unexpected {tok!r}", self.line, col)
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[1] == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek()[1] == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, tok, col = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            f = self.implication()
            self.take(")")
            return f
        if kind == "name":
            self.take()
            if tok not in self.names:
                raise UndeclaredVariableError(f"undeclared variable {tok!r}", self.line, col)
            return Var(tok, self.names[tok])
        found = "end of line" if kind is None else repr(tok)
        raise ModelSyntaxError(f"expected a variable, '!' or '(', found {found}", self.line, col)


def parse_formula(text: str, variables: Sequence[str]) -> Formula:
    names = {n: i for i, n in enumerate(variables)}
    return _FormulaParser(text, names, 1, 0).parse()


def parse_model(text: str) -> RuleSystem:
    """Parse a rule-model document; errors carry line and column."""
    variables: list[str] | None = None
    names: dict[str, int] = {}
    rules: list[Rule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        stripped = line.strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip())
        keyword = stripped.split(None, 1)[0]
        if keyword == "vars":
            if variables is not None:
                raise ModelSyntaxError("second 'vars' declaration", lineno, indent + 1)
            if rules:
                raise ModelSyntaxError("'vars' must come before any rule", lineno, indent + 1)
            variables = []
            for m in re.finditer(r"\S+", line[indent + 4 :]):
                name, col = m.group(), indent + 4 + m.start() + 1
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                    raise ModelSyntaxError(f"invalid variable name {name!r}", lineno, col)
                if name in names:
                    raise DuplicateVariableError(f"variable {name!r} declared twice", lineno, col)
                names[name] = len(variables)
                variables.append(name)
            if not variables:
                raise ModelSyntaxError("'vars' declares no variables", lineno, indent + 5)
        elif keyword == "rule":
            body = line[indent + 4 :]
            if ":" not in body:
                raise ModelSyntaxError("expected 'rule <weight> : <formula>'", lineno, indent + 1)
            head, formula_text = body.split(":", 1)
            weight_text = head.strip()
            weight_col = indent + 4 + len(head) - len(head.lstrip()) + 1
            if not _WEIGHT.match(weight_text):
                raise ModelSyntaxError(f"invalid weight {weight_text!r}", lineno, weight_col)
            if weight_text == "det":
                weight: float | Deterministic = DETERMINISTIC
            else:
                weight = float(weight_text)
                if not 0 < weight < 1:
                    raise WeightRangeError(
                        f"weight {weight_text} outside the open interval (0, 1)", lineno, weight_col
                    )
            if variables is None:
                raise ModelSyntaxError("'vars' must be the first declaration", lineno, indent + 1)
            offset = indent + 4 + len(head) + 1
            formula = _FormulaParser(formula_text, names, lineno, offset).parse()
            rules.append(Rule(formula, weight))
        else:
            raise ModelSyntaxError(f"unknown statement {keyword!r}", lineno, indent + 1)
    if variables is None:
        raise ModelSyntaxError("missing 'vars' declaration", 1, 1)
    return RuleSystem(tuple(variables), tuple(rules))


def load_model(path) -> RuleSystem:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


# -- compilation -------------------------------------------------------------


def compile_formula(f: Formula, width: int, budget: int = FORMULA_ROW_BUDGET) -> BinaryStateVector:
    """Exact satisfying set of ``f`` as a binary state vector."""

    def go(node: Formula) -> BinaryStateVector:
        if isinstance(node, Var):
            if not 0 <= node.index < width:
                raise UndeclaredVariableError(f"variable {node.name!r} has no column in width {width}")
            out = BinaryStateVector._from_canonical(width, ((1 << node.index, 1 << node.index),))
        elif isinstance(node, Not):
            out = complement(go(node.operand))
        elif isinstance(node, And):
            out = vector_product(go(node.left), go(node.right))
        elif isinstance(node, Or):
            out = vector_union(go(node.left), go(node.right))
        else:
            out = vector_union(complement(go(node.left)), go(node.right))
        if len(out) > budget:
            raise ResourceLimitError(f"formula compiles to more than {budget} rows")
        return out

    return go(f)


def rule_distribution(r: Rule, width: int) -> Distribution:
    """``s|psi + (1 - s)|(1 - psi)`` for a single weighted rule."""
    if r.deterministic:
        raise UsageError("deterministic rules have no finite two-term distribution; use compile_system")
    s = compile_formula(r.formula, width)
    psi = float(r.weight)
    return Distribution(
        width,
        Factor(1.0),
        (WeightedComponent(s, Factor(psi)), WeightedComponent(complement(s), Factor(1.0 - psi))),
    )


def check_consistency(rs: RuleSystem, deterministic_only: bool = False) -> tuple[bool, int]:
    """``(c0 > 0, c0)`` with ``c0`` the number of states satisfying every rule.

    With ``deterministic_only`` only the ``det`` rules are intersected, which
    is the condition for the deterministic limit to be well defined.
    """
    valid = BinaryStateVector.one(rs.width)
    for r in rs.rules:
        if deterministic_only and not r.deterministic:
            continue
        valid = vector_product(valid, compile_formula(r.formula, rs.width))
        if not valid:
            break
    c0 = cardinality(valid)
    return c0 > 0, c0


def compile_system(rs: RuleSystem, epsilon: float = DEFAULT_EPSILON) -> Distribution:
    """Base-offset form ``1|prod(1 - psi_i) + sum_i s_i|psi_i / (1 - psi_i)``.

    Deterministic rules enter with ``psi = 1 - epsilon`` once the
    deterministic rules are known to be jointly satisfiable.
    """
    if not 0 < epsilon < 1:
        raise UsageError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if not math.isfinite((1.0 - epsilon) / epsilon):
        raise UsageError(f"epsilon {epsilon!r} is too small: (1 - eps) / eps overflows")
    if any(r.deterministic for r in rs.rules):
        ok, _ = check_consistency(rs, deterministic_only=True)
        if not ok:
            raise InconsistentModelError("deterministic rules are jointly unsatisfiable (c0 = 0)")
    # base factor kept as mantissa in [0.5, 1) plus a binary exponent
    base, exponent = 1.0, 0
    comps = []
    for r in rs.rules:
        psi = r.psi(epsilon)
        minus = epsilon if r.deterministic else 1.0 - psi
        base, e = math.frexp(base * minus)
        exponent += e
        comps.append(WeightedComponent(compile_formula(r.formula, rs.width), Factor(psi / minus)))
    return Distribution(rs.width, Factor(base), tuple(comps), exponent)


def system_rule_distributions(rs: RuleSystem) -> Distribution:
    """The ``2m``-component sum of per-rule distributions (probabilistic rules only)."""
    d = Distribution.uniform(rs.width)
    for r in rs.rules:
        rd = rule_distribution(r, rs.width)
        d = Distribution(d.width, d.base, d.components + rd.components, d.log2_scale)
    return d


def iter_assignments(width: int) -> Iterator[tuple[int, ...]]:
    """All assignments, ``X1`` most significant (``00, 01, 10, 11``)."""
    for j in range(1 << width):
        yield tuple((j >> (width - 1 - i)) & 1 for i in range(width))
