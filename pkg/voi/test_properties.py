"""
Property-based tests for the VoI identities on random decision problems
Run with: pytest test_properties.py -v
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schemas import DecisionProblem, MeasurementModel, ProbVector
from services import create_bayes_service, create_model_service, create_voi_service

models = create_model_service()
bayes = create_bayes_service()
voi = create_voi_service(bayes, models)

PROPERTY_SETTINGS = settings(max_examples=200, deadline=None)


def normalized(weights):
    total = math.fsum(weights)
    return tuple(w / total for w in weights)


@st.composite
def distributions(draw, size):
    """Weights normalized to sum to 1; some entries may be exactly zero, never all."""
    weight = st.one_of(st.just(0.0), st.floats(min_value=0.01, max_value=1.0))
    weights = draw(st.lists(weight, min_size=size, max_size=size))
    if not any(weights):
        weights[draw(st.integers(min_value=0, max_value=size - 1))] = 1.0
    return normalized(weights)


@st.composite
def decision_problems(draw, max_states=6, max_actions=6):
    n_states = draw(st.integers(min_value=1, max_value=max_states))
    n_actions = draw(st.integers(min_value=1, max_value=max_actions))
    prior = draw(distributions(n_states))
    values = draw(st.lists(
        st.lists(st.floats(min_value=-10.0, max_value=10.0), min_size=n_states, max_size=n_states),
        min_size=n_actions, max_size=n_actions,
    ))
    return DecisionProblem(
        name="random",
        states=ProbVector(labels=tuple(f"s{i}" for i in range(n_states)), probabilities=prior),
        actions=tuple(f"a{i}" for i in range(n_actions)),
        values=tuple(tuple(row) for row in values),
    )


@st.composite
def problems_with_measurement(draw, max_outcomes=6):
    problem = draw(decision_problems())
    n_outcomes = draw(st.integers(min_value=1, max_value=max_outcomes))
    rows = tuple(draw(distributions(n_outcomes)) for _ in problem.state_labels)
    measurement = MeasurementModel(
        name="random-measurement",
        outcomes=tuple(str(x) for x in range(n_outcomes)),
        likelihood=rows,
    )
    return problem, measurement


@pytest.mark.property
class TestVoiIdentities:
    """Identities that hold for every discrete problem and measurement."""

    @PROPERTY_SETTINGS
    @given(problems_with_measurement())
    def test_expected_delta_ev_and_vsi_equal_evsi(self, case):
        """Property: E_x[ΔEV_x] = E_x[VSI_x] = EVSI"""
        problem, measurement = case
        report = voi.analyze(problem, measurement)

        expected_delta = math.fsum(r.probability * r.delta_ev for r in report.rows)
        expected_vsi = math.fsum(r.probability * r.vsi for r in report.rows)

        assert expected_delta == pytest.approx(report.evsi, abs=1e-12)
        assert expected_vsi == pytest.approx(report.evsi, abs=1e-12)

    @PROPERTY_SETTINGS
    @given(problems_with_measurement())
    def test_evsi_bounded_by_evpi(self, case):
        """Property: 0 <= EVSI <= EVPI and every VSI_x >= 0"""
        problem, measurement = case
        report = voi.analyze(problem, measurement)

        assert report.evsi >= -1e-12
        assert report.evsi <= report.evpi + 1e-12
        assert all(row.vsi >= 0.0 for row in report.rows)

    @PROPERTY_SETTINGS
    @given(decision_problems())
    def test_perfect_measurement_evsi_is_evpi(self, problem):
        """Property: substituting the state for the outcome turns EVSI into EVPI"""
        report = voi.perfect_info_report(problem)
        assert report.evsi == pytest.approx(voi.evpi(problem), abs=1e-12)

    @PROPERTY_SETTINGS
    @given(problems_with_measurement())
    def test_variance_decomposition(self, case):
        """Property: σVSI² = E_x[VSI_x²] - EVSI²"""
        problem, measurement = case
        report = voi.analyze(problem, measurement)

        second_moment = math.fsum(r.probability * r.vsi ** 2 for r in report.rows)
        assert report.sigma_vsi ** 2 == pytest.approx(second_moment - report.evsi ** 2, abs=1e-9)

    @PROPERTY_SETTINGS
    @given(problems_with_measurement())
    def test_posteriors_marginalize_to_prior(self, case):
        """Property: sum_x p(x) p(s|x) = p(s)"""
        problem, measurement = case
        table = bayes.posterior_table(problem, measurement)

        recovered = np.zeros(len(problem.state_labels))
        for p_x, posterior in zip(table.predictive, table.posteriors):
            if posterior is not None:
                recovered += p_x * posterior.as_array()

        assert recovered == pytest.approx(problem.prior(), abs=1e-12)

    @PROPERTY_SETTINGS
    @given(problems_with_measurement())
    def test_zero_predictive_outcomes_carry_no_mass(self, case):
        """Property: reported rows and skipped outcomes partition the outcomes; rows hold all of p(x)"""
        problem, measurement = case
        report = voi.analyze(problem, measurement)

        reported = [row.outcome for row in report.rows]
        assert sorted(reported + list(report.zero_outcomes)) == sorted(measurement.outcomes)
        assert all(row.probability > 0.0 for row in report.rows)
        assert math.fsum(row.probability for row in report.rows) == pytest.approx(1.0, abs=1e-12)

    @PROPERTY_SETTINGS
    @given(problems_with_measurement(), st.data())
    def test_state_permutation_invariance(self, case, data):
        """Property: reordering states leaves p(x) and EVSI alone and permutes each posterior"""
        problem, measurement = case
        order = data.draw(st.permutations(range(len(problem.state_labels))))

        permuted_problem = DecisionProblem(
            name=problem.name,
            states=ProbVector(
                labels=tuple(problem.state_labels[i] for i in order),
                probabilities=tuple(problem.states.probabilities[i] for i in order),
            ),
            actions=problem.actions,
            values=tuple(tuple(row[i] for i in order) for row in problem.values),
        )
        permuted_measurement = measurement.model_copy(update={
            "likelihood": tuple(measurement.likelihood[i] for i in order)
        })

        table = bayes.posterior_table(problem, measurement)
        other = bayes.posterior_table(permuted_problem, permuted_measurement)

        assert other.predictive == pytest.approx(table.predictive, abs=1e-12)
        assert other.zero_outcomes == table.zero_outcomes
        for posterior, permuted in zip(table.posteriors, other.posteriors):
            if posterior is None:
                assert permuted is None
                continue
            expected = [posterior.probabilities[i] for i in order]
            assert permuted.probabilities == pytest.approx(expected, abs=1e-12)

        assert voi.analyze(permuted_problem, permuted_measurement).evsi == pytest.approx(
            voi.analyze(problem, measurement).evsi, abs=1e-12
        )

    @PROPERTY_SETTINGS
    @given(problems_with_measurement(), st.lists(st.floats(min_value=0.0, max_value=50.0), min_size=1, max_size=8))
    def test_rvsi_is_nondecreasing_in_delta(self, case, deltas):
        """Property: rVSI_δ is a CDF of VSI_x, so it grows with δ and reaches 1"""
        problem, measurement = case
        ordered = sorted(deltas) + [1e6]
        report = voi.analyze(problem, measurement, deltas=ordered)
        risks = [entry.probability for entry in report.rvsi]

        assert all(a <= b for a, b in zip(risks, risks[1:]))
        assert risks[-1] == pytest.approx(1.0, abs=1e-12)


# ============================================
# Monte Carlo oracle
# ============================================

MONTE_CARLO_DRAWS = 400_000


def random_instance(rng):
    """Up to 6 states, 6 actions and 10 outcomes, with Dirichlet prior and likelihood rows."""
    n_states = int(rng.integers(2, 7))
    n_actions = int(rng.integers(2, 7))
    n_outcomes = int(rng.integers(2, 11))

    prior = rng.dirichlet(np.ones(n_states))
    values = rng.uniform(-10.0, 10.0, size=(n_actions, n_states))
    likelihood = rng.dirichlet(np.ones(n_outcomes), size=n_states)

    problem = DecisionProblem(
        name="simulated",
        states=ProbVector(
            labels=tuple(f"s{i}" for i in range(n_states)),
            probabilities=tuple(float(p) for p in prior),
        ),
        actions=tuple(f"a{i}" for i in range(n_actions)),
        values=tuple(tuple(float(v) for v in row) for row in values),
    )
    measurement = MeasurementModel(
        name="simulated",
        outcomes=tuple(str(x) for x in range(n_outcomes)),
        likelihood=tuple(tuple(float(p) for p in row) for row in likelihood),
    )
    return problem, measurement, prior, values, likelihood


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_monte_carlo_evsi(seed):
    """Simulated s ~ p(s), x ~ p(x|s), VSI_x worked out by hand: the mean lands within 3 standard errors of EVSI"""
    rng = np.random.default_rng(seed)
    problem, measurement, prior, values, likelihood = random_instance(rng)

    # Value of each outcome straight from Bayes' rule, independent of the services
    joint = prior[:, np.newaxis] * likelihood
    posterior = joint / joint.sum(axis=0)
    posterior_values = values @ posterior
    a_star = int(np.argmax(values @ prior))
    vsi_by_outcome = posterior_values.max(axis=0) - posterior_values[a_star]

    states = rng.choice(len(prior), size=MONTE_CARLO_DRAWS, p=prior)
    outcomes = np.empty(MONTE_CARLO_DRAWS, dtype=int)
    for s in range(len(prior)):
        drawn = states == s
        outcomes[drawn] = rng.choice(likelihood.shape[1], size=int(drawn.sum()), p=likelihood[s])

    sample = vsi_by_outcome[outcomes]
    standard_error = sample.std(ddof=1) / math.sqrt(MONTE_CARLO_DRAWS)
    evsi = voi.analyze(problem, measurement).evsi

    assert abs(sample.mean() - evsi) <= 3 * standard_error + 1e-12


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
