"""End-to-end smoke tests for the compiled extension module."""

import math

import pytest

import aoitail as at


EXP1 = at.ServiceDistribution.exponential(1.0)


def test_distribution_construction_and_parse():
    geo = at.ServiceDistribution.geometric(0.85)
    assert geo.kind == at.DistKind.geometric
    assert geo.mean_rate() == pytest.approx(0.85, rel=1e-12)
    parsed = at.ServiceDistribution.parse("geometric(p=0.85,slot=1)")
    assert parsed == geo
    assert "geometric" in repr(parsed)

    erl = at.ServiceDistribution.erlang(3, 3.0)
    assert erl.mean_rate() == pytest.approx(1.0, rel=1e-12)
    assert erl.support_min() == 0.0
    assert math.isinf(erl.support_max())

    det = at.ServiceDistribution.deterministic(2.0)
    assert det.support_min() == det.support_max() == 2.0


def test_distribution_validation_errors():
    with pytest.raises(ValueError):
        at.ServiceDistribution.exponential(-1.0)
    with pytest.raises(ValueError):
        at.ServiceDistribution.geometric(1.5)
    with pytest.raises(at.ConfigError):
        at.ServiceDistribution.parse("cauchy(gamma=1)")
    with pytest.raises(at.ConfigError):
        at.ServiceDistribution.parse("exponential(mu=banana)")


def test_mgf_and_tail_sums():
    # Exponential MGF 1/(1 - s) below the pole at s = 1.
    assert EXP1.mgf(0.3) == pytest.approx(1.0 / 0.7, rel=1e-12)
    assert EXP1.mgf_domain_sup() == pytest.approx(1.0, rel=1e-12)
    # Sum of two unit exponentials is Gamma(2, 1).
    assert EXP1.sum_tail(2, 8.0) == pytest.approx(9.0 * math.exp(-8.0), rel=1e-10)
    erl = at.ServiceDistribution.erlang(2, 2.0)
    assert at.cross_sum_tail(EXP1, 1, erl, 1, 0.0) == 1.0
    # Hyperexponential sums expand binomially; long sums exceed the budget.
    hyper = at.ServiceDistribution.hyperexponential(0.4, 2.0, 0.5)
    assert 0.0 < hyper.sum_tail(2, 3.0) < 1.0
    with pytest.raises(at.BudgetError):
        hyper.sum_tail(9, 3.0)


def test_bounds_and_closed_forms():
    cfg = at.SystemConfig(hops=[EXP1], rate=0.5, age_limit=10.0)
    assert cfg.feasible()
    assert cfg.bottleneck_rate() == pytest.approx(1.0, rel=1e-12)

    win = at.stability_window(cfg)
    assert not win.empty
    assert win.contains(0.5 * win.s_high)
    b = at.beta(EXP1, 0.3, 0.5)
    assert b == pytest.approx(math.exp(-0.6) / 0.7, rel=1e-12)

    assert at.psi_chernoff(cfg, 0.3) == pytest.approx(0.6000326410426097, rel=1e-12)
    best = at.minimize_psi_over_s(cfg)
    assert best.kind == at.BoundKind.chernoff
    assert best.value == pytest.approx(0.06846728286937642, rel=1e-9)
    assert win.contains(best.s_star)

    # First union term: both services of the freshest packet inside d - 2/R.
    assert at.phi_two(EXP1, EXP1, 0, 0, 0.5, 10.0) == pytest.approx(
        9.0 * math.exp(-8.0), rel=1e-10
    )

    alpha_cfg = at.SystemConfig(hops=[EXP1], rate=0.425, age_limit=5.0)
    alpha = at.alpha_relaxed_single(alpha_cfg, terms=30)
    assert alpha.kind == at.BoundKind.alpha_relaxed
    assert alpha.value == pytest.approx(0.1640324567314935, rel=1e-12)
    assert alpha.terms == 30

    two = at.SystemConfig(hops=[EXP1, EXP1], rate=0.5, age_limit=10.0)
    assert at.alpha_relaxed_two(two, terms=30).value <= at.minimize_psi_over_s(two).value

    assert at.phi_closed_form(0.5, 0.5) == pytest.approx(4.0, rel=1e-12)
    assert at.alpha_tail_factor(0.5, 0.5, 1) == pytest.approx(3.0, rel=1e-12)

    # An unstable system has an empty transform window.
    assert at.stability_window(at.SystemConfig(hops=[EXP1], rate=1.2, age_limit=10.0)).empty


def test_rate_solvers():
    sol = at.solve_chernoff_ubmp([EXP1], 5.0)
    assert sol.method == at.SolveMethod.chernoff_ubmp
    assert sol.rate == pytest.approx(0.3728009597131241, abs=1e-4)
    assert sol.objective == pytest.approx(1.2446767091965987, rel=1e-9)

    grid = at.solve_alpha_ubmp([EXP1], 5.0, terms=30, grid_step=0.025)
    assert grid.method == at.SolveMethod.alpha_ubmp
    assert grid.rate == pytest.approx(0.425, abs=1e-12)
    assert grid.grid_step == 0.025

    with pytest.raises(at.InfeasibleError):
        at.solve_chernoff_ubmp([EXP1], 0.9)
    with pytest.raises(ValueError):
        at.solve_chernoff_ubmp([], 5.0)


def test_simulation_estimators():
    cfg = at.SystemConfig(hops=[EXP1], rate=0.5, age_limit=10.0)
    est = at.simulate_violation(cfg, at.Policy.fcfs_infinite, 20000.0, 1000.0, seed=7)
    again = at.simulate_violation(cfg, at.Policy.fcfs_infinite, 20000.0, 1000.0, seed=7)
    assert 0.0 < est.violation_prob < 1.0
    assert est.violation_prob == again.violation_prob
    assert est.half_width == again.half_width
    assert not est.unstable
    assert est.policy == at.Policy.fcfs_infinite

    # Sparse arrivals: between a generation's expiry and the next generation
    # the age exceeds the limit surely; right after a generation it cannot.
    sparse = at.SystemConfig(hops=[EXP1], rate=0.1, age_limit=5.0)
    assert at.transient_violation(sparse, 7.5, 2000, seed=3) == 1.0
    assert at.transient_violation(sparse, 3.0, 2000, seed=3) == 0.0

    # The tagged-departure estimator walks the same sample paths.
    t = 12.0
    assert at.tagged_departure_violation(sparse, t, 500, seed=11) == at.transient_violation(
        sparse, t, 500, seed=11
    )

    rows = at.compare_policies(cfg, [0.4, 0.5], 5000.0, 500.0, seed=5)
    assert len(rows) == 6
    policies = [r.policy for r in rows[:3]]
    assert policies == [
        at.Policy.fcfs_infinite,
        at.Policy.fcfs_unit_buffer,
        at.Policy.lgfs_unit_buffer,
    ]
    assert all(0.0 <= r.violation_prob <= 1.0 for r in rows)

    assert at.mix_seed(1, 2) == at.mix_seed(1, 2)
    assert at.mix_seed(1, 2) != at.mix_seed(1, 3)
