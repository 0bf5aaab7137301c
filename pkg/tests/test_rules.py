import random

import numpy as np
import pytest

from conftest import dense_masses, state_set
from state_algebra.distribution import partition
from state_algebra.errors import (
    DuplicateVariableError,
    InconsistentModelError,
    ModelSyntaxError,
    UndeclaredVariableError,
    WeightRangeError,
)
from state_algebra.generators import random_formula, random_system
from state_algebra.oracle import satisfying_mask, state_masses
from state_algebra.rules import (
    DETERMINISTIC,
    Implies,
    Or,
    Rule,
    RuleSystem,
    Var,
    check_consistency,
    compile_formula,
    compile_system,
    evaluate,
    parse_formula,
    parse_model,
    rule_distribution,
    system_rule_distributions,
)

TWO_RULES = "vars X1 X2 X3 X4 X5\nrule 0.7 : X1 | X2 -> X3\nrule 0.9 : X3 | X4 -> X5\n"


def to_oracle_order(values, width):
    """Reorder engine state masses (bit i = X_{i+1}) to X1-most-significant."""
    out = np.empty(1 << width)
    for x, v in enumerate(values):
        j = int(format(x, f"0{width}b")[::-1], 2) if width else 0
        out[j] = v
    return out


class TestParser:
    def test_model(self):
        rs = parse_model(TWO_RULES)
        assert rs.variables == ("X1", "X2", "X3", "X4", "X5")
        assert [r.weight for r in rs.rules] == [0.7, 0.9]
        assert str(rs.rules[0].formula) == "X1 | X2 -> X3"

    def test_precedence(self):
        names = ["A", "B", "C"]
        assert parse_formula("A | B -> C", names) == Implies(Or(Var("A", 0), Var("B", 1)), Var("C", 2))
        f = parse_formula("!A & B | C", names)
        assert str(f) == "!A & B | C"
        # implication is right-associative
        g = parse_formula("A -> B -> C", names)
        assert isinstance(g.right, Implies)

    def test_round_trip(self):
        rs = parse_model(TWO_RULES + "rule det : !(X1 & X5)\n")
        again = parse_model(rs.to_text())
        assert again == rs

    def test_comments_and_blank_lines(self):
        rs = parse_model("# header\n\nvars A B   # two\nrule 0.5 : A\n")
        assert rs.width == 2 and len(rs.rules) == 1

    @pytest.mark.parametrize(
        "text, error, where",
        [
            ("vars X1\nrule 0.5 : X2\n", UndeclaredVariableError, "line 2, column 12"),
            ("vars X1 X1\n", DuplicateVariableError, "line 1, column 9"),
            ("vars X1\nrule 1.5 : X1\n", WeightRangeError, "line 2, column 6"),
            ("vars X1\nrule 0 : X1\n", WeightRangeError, "line 2"),
            ("vars X1\nrule 0.5 : X1 &\n", ModelSyntaxError, "line 2"),
            ("vars X1\nrule 0.5 : (X1\n", ModelSyntaxError, "line 2"),
            ("rule 0.5 : X1\n", ModelSyntaxError, "line 1"),
            ("", ModelSyntaxError, "line 1"),
            ("vars X1\nfoo\n", ModelSyntaxError, "line 2, column 1"),
        ],
    )
    def test_errors(self, text, error, where):
        with pytest.raises(error) as info:
            parse_model(text)
        assert str(info.value).startswith(where)

    def test_weight_must_be_open_interval(self):
        with pytest.raises(WeightRangeError):
            Rule(Var("A", 0), 1.0)


def test_compiled_formula_matches_truth_table():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(1, 8)
        names = [f"X{i + 1}" for i in range(n)]
        f = random_formula(rng, rng.sample(range(n), rng.randint(1, min(5, n))), names)
        got = state_set(compile_formula(f, n))
        expected = {x for x in range(1 << n) if evaluate(f, [(x >> i) & 1 for i in range(n)])}
        assert got == expected


def test_compiled_system_masses_match_oracle():
    rng = random.Random(5)
    for _ in range(100):
        rs = random_system(rng, max_width=8)
        engine = to_oracle_order(dense_masses(compile_system(rs)), rs.width)
        np.testing.assert_allclose(engine, state_masses(rs), rtol=1e-12)


def test_two_forms_agree():
    rng = random.Random(9)
    for _ in range(50):
        rs = random_system(rng, max_width=7)
        pairwise = dense_masses(system_rule_distributions(rs))
        assert pairwise == pytest.approx(dense_masses(compile_system(rs)), rel=1e-12)


def test_single_rule_distribution():
    rs = parse_model("vars A B\nrule 0.5 : A\n")
    d = rule_distribution(rs.rules[0], 2)
    assert partition(d).to_float() == pytest.approx(2.0)
    assert partition(compile_system(rs)).to_float() == pytest.approx(2.0)


class TestConsistency:
    def test_contradiction(self):
        rs = parse_model("vars X1\nrule det : X1\nrule det : !X1\n")
        assert check_consistency(rs) == (False, 0)
        with pytest.raises(InconsistentModelError):
            compile_system(rs)

    def test_two_rules_and_empty(self):
        ok, c0 = check_consistency(parse_model(TWO_RULES))
        assert ok and c0 == int(satisfying_mask(parse_model(TWO_RULES)).sum())
        assert check_consistency(parse_model("vars A B C\n")) == (True, 8)

    def test_soft_conflict_still_compiles(self):
        rs = parse_model("vars X1\nrule 0.6 : X1\nrule 0.6 : !X1\n")
        assert check_consistency(rs) == (False, 0)
        assert check_consistency(rs, deterministic_only=True) == (True, 2)
        assert partition(compile_system(rs)).to_float() == pytest.approx(0.48)

    def test_deterministic_concentration_bound(self):
        # the violating mass is at most (2**N - c0) * eps / c0 up to (1-eps)**m;
        # twelve unit clauses (c0 = 1) sit right at that worst case
        names = tuple(f"X{i + 1}" for i in range(12))
        rs = RuleSystem(names, tuple(Rule(Var(n, i), DETERMINISTIC) for i, n in enumerate(names)))
        eps = 1e-9
        m = state_masses(rs, eps)
        violating = 1 - m[satisfying_mask(rs, True)].sum() / m.sum()
        assert violating <= (2**12 - 1) * eps / (1 - eps) ** 12
