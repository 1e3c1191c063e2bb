import numpy as np
import pytest

from ipd_learning import (
    DegenerateStrategyPair,
    JointStrategy,
    NoConvergence,
    OrderingViolation,
    PayoffMatrix,
    RepeatedGameViolation,
    ValidationError,
    equilibrium,
    markov_matrix,
    response,
    stationary_distribution,
    validate_payoff,
)


def test_validate_payoff_accepts_standard(standard):
    assert standard.as_tuple() == (5.0, 3.0, 1.0, 0.0)
    assert standard.submodular


def test_validate_payoff_rejects_bad_ordering():
    with pytest.raises(OrderingViolation):
        validate_payoff(3, 5, 1, 0)
    with pytest.raises(OrderingViolation):
        validate_payoff(5, 3, 3, 0)
    with pytest.raises(OrderingViolation):
        validate_payoff(5, 3, 0, 1)


def test_validate_payoff_rejects_alternation_beating_cooperation():
    with pytest.raises(RepeatedGameViolation):
        validate_payoff(5, 2, 1, 0)
    # the boundary 2R == T + S is rejected as well
    with pytest.raises(RepeatedGameViolation):
        validate_payoff(5, 2.5, 1, 0)


def test_submodular_threshold():
    assert validate_payoff(5, 3, 1, 0).submodular
    assert not validate_payoff(5, 4.5, 1, 0).submodular
    # t - r - p + s == 0 exactly: not submodular
    assert not validate_payoff(5, 4, 1, 0).submodular


def test_direct_construction_skips_validation():
    # boundary studies legitimately use t == r
    pay = PayoffMatrix(5.0, 5.0, 1.0, 0.0)
    assert not pay.submodular


def test_player_payoff_vectors(standard):
    np.testing.assert_array_equal(standard.player1_payoffs(), [3, 0, 5, 1])
    np.testing.assert_array_equal(standard.player2_payoffs(), [3, 5, 0, 1])


def test_strategy_box_is_validated():
    with pytest.raises(ValidationError):
        JointStrategy(1.2, 0.5, 0.5, 0.5)
    with pytest.raises(ValidationError):
        JointStrategy(0.5, -0.1, 0.5, 0.5)
    corner = JointStrategy(1.0, 0.0, 1.0, 0.0)
    assert not corner.interior
    assert JointStrategy(0.5, 0.2, 0.7, 0.1).interior


def test_swapped_exchanges_roles():
    s = JointStrategy(0.1, 0.2, 0.3, 0.4)
    assert s.swapped() == JointStrategy(0.3, 0.4, 0.1, 0.2)
    assert s.swapped().swapped() == s


def test_markov_matrix_entries():
    m = markov_matrix(JointStrategy(0.9, 0.1, 0.9, 0.1))
    # previous outcome CC: both saw cooperation, so both cooperate w.p. 0.9
    assert m[0, 0] == pytest.approx(0.81, abs=1e-15)
    assert m[1, 0] == pytest.approx(0.09, abs=1e-15)
    assert m[2, 0] == pytest.approx(0.09, abs=1e-15)
    assert m[3, 0] == pytest.approx(0.01, abs=1e-15)
    # previous outcome CD: player 1 saw D (rate 0.1), player 2 saw C (0.9)
    assert m[0, 1] == pytest.approx(0.09, abs=1e-15)
    assert m[3, 1] == pytest.approx(0.09, abs=1e-15)


def test_markov_matrix_columns_stochastic():
    rng = np.random.default_rng(7)
    for _ in range(50):
        m = markov_matrix(JointStrategy(*rng.uniform(0.0, 1.0, size=4)))
        assert np.all(m >= 0.0)
        np.testing.assert_allclose(m.sum(axis=0), 1.0, atol=1e-15)


def test_equilibrium_symmetric_pair(standard):
    eq = equilibrium(standard, JointStrategy(0.9, 0.1, 0.9, 0.1))
    assert eq.x_e == pytest.approx(0.5, abs=1e-15)
    assert eq.y_e == pytest.approx(0.5, abs=1e-15)
    assert eq.u_e == pytest.approx(2.25, abs=1e-14)
    assert eq.v_e == pytest.approx(2.25, abs=1e-14)


def test_equilibrium_flat_player(standard):
    # player 1 ignores the opponent, so x_e == 0.3 and y responds to 0.3
    eq = equilibrium(standard, JointStrategy(0.3, 0.3, 0.9, 0.1))
    assert eq.x_e == pytest.approx(0.3, abs=1e-15)
    assert eq.y_e == pytest.approx(0.34, abs=1e-15)


def test_tit_for_tat_against_itself_is_degenerate(standard):
    with pytest.raises(DegenerateStrategyPair):
        equilibrium(standard, JointStrategy(1.0, 0.0, 1.0, 0.0))


def test_closed_form_matches_power_iteration(standard):
    rng = np.random.default_rng(11)
    for _ in range(100):
        s = JointStrategy(*rng.uniform(0.05, 0.95, size=4))
        eq = equilibrium(standard, s)
        p_star = stationary_distribution(s)
        assert eq.x_e == pytest.approx(p_star[0] + p_star[1], abs=1e-11)
        assert eq.y_e == pytest.approx(p_star[0] + p_star[2], abs=1e-11)
        np.testing.assert_allclose(eq.p_e, p_star, atol=1e-11)


def test_stationary_distribution_is_a_distribution(standard):
    rng = np.random.default_rng(23)
    for _ in range(100):
        eq = equilibrium(standard, JointStrategy(*rng.uniform(0, 1, size=4)))
        assert np.all(eq.p_e >= -1e-12)
        assert eq.p_e.sum() == pytest.approx(1.0, abs=1e-12)


def test_payoffs_bounded_by_extremes(standard):
    # stationary payoffs are convex combinations of the one-shot payoffs
    rng = np.random.default_rng(59)
    for _ in range(100):
        eq = equilibrium(standard, JointStrategy(*rng.uniform(0, 1, size=4)))
        assert standard.s - 1e-12 <= eq.u_e <= standard.t + 1e-12
        assert standard.s - 1e-12 <= eq.v_e <= standard.t + 1e-12


def test_power_iteration_requires_interior():
    with pytest.raises(ValidationError):
        stationary_distribution(JointStrategy(1.0, 0.5, 0.5, 0.5))


def test_power_iteration_budget_exhaustion():
    with pytest.raises(NoConvergence):
        stationary_distribution(JointStrategy(0.9, 0.2, 0.8, 0.3), max_iter=1)


def test_response_line():
    assert response(0.9, 0.1, 0.0) == pytest.approx(0.1)
    assert response(0.9, 0.1, 1.0) == pytest.approx(0.9)
    assert response(0.9, 0.1, 0.5) == pytest.approx(0.5)


def test_stationary_rates_are_the_response_crossing(standard):
    rng = np.random.default_rng(31)
    for _ in range(100):
        s = JointStrategy(*rng.uniform(0.05, 0.95, size=4))
        eq = equilibrium(standard, s)
        assert eq.x_e == pytest.approx(response(s.x_c, s.x_d, eq.y_e), abs=1e-12)
        assert eq.y_e == pytest.approx(response(s.y_c, s.y_d, eq.x_e), abs=1e-12)


def test_role_swap_is_exact(standard):
    # the two players' formulas are mirrored term by term, so swapping
    # roles exchanges the stationary values bitwise, not just approximately
    rng = np.random.default_rng(43)
    for _ in range(100):
        s = JointStrategy(*rng.uniform(0.0, 1.0, size=4))
        eq = equilibrium(standard, s)
        sw = equilibrium(standard, s.swapped())
        assert sw.x_e == eq.y_e
        assert sw.y_e == eq.x_e
        assert sw.u_e == eq.v_e
        assert sw.v_e == eq.u_e
