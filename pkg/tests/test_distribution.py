import math

import pytest

from conftest import dense_masses, random_distribution, rel_close
from state_algebra.algebra import BinaryStateVector, Row
from state_algebra.distribution import (
    Distribution,
    Factor,
    PartitionValue,
    add,
    conditional_probability,
    marginalize,
    orthogonalize,
    partition,
    project,
    state_mass,
    vector_mass,
)
from state_algebra.errors import InconsistentEvidenceError, UsageError

FIVE_ROWS = ("00-", "-11", "1-0", "010", "101")


def five_row(psi):
    return Distribution.from_rows(list(zip(FIVE_ROWS, psi)))


def state(text: str) -> Row:
    return Row.parse(text)


class TestPartitionValue:
    def test_normalized_storage(self):
        z = PartitionValue(10.08)
        assert 0.5 <= z.value < 1 and z.to_float() == pytest.approx(10.08)

    def test_arithmetic(self):
        a, b = PartitionValue(3.0, 100), PartitionValue(1.0, 100)
        assert (a + b).ratio(PartitionValue(1.0, 102)) == pytest.approx(1.0)
        assert (a * b).log() == pytest.approx(math.log(3) + 200 * math.log(2))
        assert PartitionValue(1.0, 5000).to_float() == math.inf

    def test_zero(self):
        assert PartitionValue.zero() + PartitionValue(2.0) == PartitionValue(2.0)


class TestGoldenExamples:
    def test_five_row_partition(self):
        psi = (0.3, 1.7, 0.2, 2.5, 0.9)
        z = partition(five_row(psi)).to_float()
        assert z == pytest.approx(2 * psi[0] + 2 * psi[1] + 2 * psi[2] + psi[3] + psi[4], rel=1e-12)

    def test_vector_mass(self):
        psi = (0.3, 1.7, 0.2, 2.5, 0.9)
        s = BinaryStateVector.of("1-0", "-01")
        assert vector_mass(five_row(psi), s).to_float() == pytest.approx(2 * psi[2] + psi[0] + psi[4])

    def test_marginal_factors(self):
        psi = (0.3, 1.7, 0.2, 2.5, 0.9)
        m = marginalize(five_row(psi), [1, 2])
        expected = {"00": psi[0] + psi[2], "01": psi[0] + psi[4], "10": psi[2] + psi[3], "11": 2 * psi[1]}
        for text, value in expected.items():
            assert state_mass(m, state(text)).psi == pytest.approx(value, rel=1e-12)
        assert partition(m).isclose(partition(five_row(psi)), 1e-12)

    def test_marginal_over_free_variables(self):
        d = Distribution.from_rows([("00--", 0.1), ("01--", 0.2), ("10--", 0.3), ("11--", 0.4)])
        m = marginalize(d, [0, 1])
        for text, value in zip(("00", "01", "10", "11"), (0.1, 0.2, 0.3, 0.4)):
            assert state_mass(m, state(text)).psi == pytest.approx(4 * value)

    def test_projection(self):
        psi = [0.1 * (k + 1) for k in range(8)]
        rows = [format(j, "03b") for j in range(8)]
        d = Distribution.from_rows(list(zip(rows, psi)))
        eta = project(d, state("1--"))
        assert eta.width == 2
        for j, text in enumerate(("00", "01", "10", "11")):
            assert state_mass(eta, state(text)).psi == pytest.approx(psi[4 + j])
        assert partition(eta).to_float() == pytest.approx(sum(psi[4:]))

    def test_uniform(self):
        assert partition(Distribution.uniform(3)).to_float() == 8
        assert partition(Distribution.uniform(200)).scale_exponent == 201


class TestAgainstDenseMasses:
    def test_partition_and_orthogonalize(self, rng):
        for _ in range(60):
            d = random_distribution(rng, rng.randint(1, 7))
            dense = dense_masses(d)
            assert rel_close(partition(d).to_float(), math.fsum(dense), 1e-12)
            assert dense_masses(orthogonalize(d)) == pytest.approx(dense, rel=1e-12)

    def test_marginals(self, rng):
        for _ in range(60):
            n = rng.randint(1, 7)
            d = random_distribution(rng, n)
            keep = sorted(rng.sample(range(n), rng.randint(1, n)))
            dense = dense_masses(d)
            expected = [0.0] * (1 << len(keep))
            for x, w in enumerate(dense):
                y = sum(((x >> c) & 1) << j for j, c in enumerate(keep))
                expected[y] += w
            got = dense_masses(marginalize(d, keep))
            assert got == pytest.approx(expected, rel=1e-12)

    def test_conditionals(self, rng):
        for _ in range(60):
            n = rng.randint(2, 7)
            d = random_distribution(rng, n)
            target = rng.randrange(n)
            others = [i for i in range(n) if i != target]
            ev = {i: rng.randint(0, 1) for i in rng.sample(others, rng.randint(0, len(others)))}
            e = Row.from_assignment(n, ev)
            dense = dense_masses(d)
            keep = [x for x in range(1 << n) if all(((x >> i) & 1) == b for i, b in ev.items())]
            m1 = math.fsum(dense[x] for x in keep if (x >> target) & 1)
            m0 = math.fsum(dense[x] for x in keep if not (x >> target) & 1)
            got = conditional_probability(d, e, target).probability
            assert rel_close(got, m1 / (m1 + m0), 1e-12)

    def test_add_multiplies_masses(self, rng):
        for _ in range(30):
            n = rng.randint(1, 6)
            d1, d2 = random_distribution(rng, n), random_distribution(rng, n)
            got = dense_masses(add(d1, d2))
            expected = [a * b for a, b in zip(dense_masses(d1), dense_masses(d2))]
            assert got == pytest.approx(expected, rel=1e-12)


def test_target_in_evidence_is_usage_error():
    d = Distribution.uniform(3)
    with pytest.raises(UsageError):
        conditional_probability(d, Row.parse("1--"), 0)


def test_factor_must_be_positive():
    with pytest.raises(UsageError):
        Factor(0.0)
    assert Factor.from_coordinate(0.0).psi == 1.0


def test_zero_mass_evidence():
    from state_algebra.distribution import normalized

    with pytest.raises(InconsistentEvidenceError):
        normalized(PartitionValue.zero(), PartitionValue.zero())
