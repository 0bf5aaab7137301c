"""Random model families for differential testing and benchmarks."""

from __future__ import annotations

import random

from .rules import And, Formula, Implies, Not, Or, Rule, RuleSystem, Var

PSI_RANGE = (0.05, 0.95)


def _names(width: int) -> tuple[str, ...]:
    return tuple(f"X{i + 1}" for i in range(width))


def _literal(rng: random.Random, index: int, names) -> Formula:
    v = Var(names[index], index)
    return Not(v) if rng.random() < 0.3 else v


def random_formula(rng: random.Random, indices: list[int], names) -> Formula:
    """Random formula mentioning every variable in ``indices`` once."""
    order = list(indices)
    rng.shuffle(order)
    nodes: list[Formula] = [_literal(rng, i, names) for i in order]
    while len(nodes) > 1:
        k = rng.randrange(len(nodes) - 1)
        op = rng.choice((And, Or, Implies))
        merged = op(nodes[k], nodes[k + 1])
        if rng.random() < 0.1:
            merged = Not(merged)
        nodes[k : k + 2] = [merged]
    return nodes[0]


def random_psi(rng: random.Random) -> float:
    lo, hi = PSI_RANGE
    while True:
        psi = rng.uniform(lo, hi)
        if lo < psi < hi:
            return psi


def random_system(
    rng: random.Random,
    max_width: int = 12,
    max_rules: int = 8,
    max_support: int = 4,
    min_width: int = 1,
) -> RuleSystem:
    """Rule system with random supports of size at most ``max_support``."""
    width = rng.randint(min_width, max_width)
    names = _names(width)
    rules = []
    for _ in range(rng.randint(0, max_rules)):
        size = rng.randint(1, min(max_support, width))
        support = rng.sample(range(width), size)
        rules.append(Rule(random_formula(rng, support, names), random_psi(rng)))
    return RuleSystem(names, tuple(rules))


def chain_system(rng: random.Random, rules: int, max_width: int = 30) -> RuleSystem:
    """Treelike chain: consecutive rules share exactly one bridging variable.

    Rule ``i`` mentions bridge ``b_{i-1}``, bridge ``b_i`` and one or two
    private variables, so the interaction graph is a chain of cliques whose
    cut vertices are the bridges.
    """
    if rules < 1:
        raise ValueError("a chain needs at least one rule")
    if 2 * rules + 1 > max_width:
        raise ValueError(f"{rules} rules do not fit in {max_width} variables")
    spare = max_width - (2 * rules + 1)
    privates = []
    for _ in range(rules):
        extra = 1 if spare > 0 and rng.random() < 0.5 else 0
        spare -= extra
        privates.append(1 + extra)
    width = 1 + sum(p + 1 for p in privates)
    names = _names(width)
    out = []
    left = 0
    cursor = 1
    for p in privates:
        private = list(range(cursor, cursor + p))
        right = cursor + p
        cursor = right + 1
        body = random_formula(rng, [left] + private, names)
        head = _literal(rng, right, names)
        formula = Implies(body, head) if rng.random() < 0.7 else random_formula(rng, [left, right] + private, names)
        out.append(Rule(formula, random_psi(rng)))
        left = right
    return RuleSystem(names, tuple(out))


def two_rule_system(psi1: float = 0.9, psi2: float = 0.9) -> RuleSystem:
    """``X1 | X2 -> X3`` and ``X3 | X4 -> X5``."""
    names = _names(5)
    x = [Var(n, i) for i, n in enumerate(names)]
    return RuleSystem(
        names,
        (
            Rule(Implies(Or(x[0], x[1]), x[2]), psi1),
            Rule(Implies(Or(x[2], x[3]), x[4]), psi2),
        ),
    )
