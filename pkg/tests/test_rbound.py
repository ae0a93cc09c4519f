"""Head-sum bounds: general kernel-budget route and count-dichotomy route."""

from __future__ import annotations

from dataclasses import replace

import pytest

from zeroledger import (
    DomainError,
    HeadScenario,
    InfeasibleParametersError,
    optimize_r,
    r_bound_general,
    r_bound_restricted,
)


def test_scenario_validation():
    with pytest.raises(DomainError):
        HeadScenario(1.348, 0.0, 0.6, 0.702)
    with pytest.raises(DomainError):
        HeadScenario(1.348, 0.7, 0.6, 0.702)
    with pytest.raises(DomainError):
        HeadScenario(1.348, 0.6, 1.5, 0.702)
    with pytest.raises(DomainError):
        HeadScenario(1.348, 0.6, 0.6, 1.5)
    with pytest.raises(DomainError):
        HeadScenario(1.348, 0.6, 0.6, 0.702, N0=5)
    with pytest.raises(DomainError):
        HeadScenario(1.348, 0.6, 0.6, 0.702, N0=7, restricted=True)
    assert HeadScenario(1.348, 0.6, 0.6, 0.702).lambda0 == 0.6


def test_general_route_reference():
    sc = HeadScenario(1.348, 0.6, 0.6, 0.702)
    r = optimize_r(0.291, sc)
    assert r.branch == "main"
    assert r.bound == pytest.approx(0.6705, abs=2e-3)
    assert r.bound <= 0.6720 + 5e-4
    assert all(s >= 0.0 for _, s in r.slacks)


def test_general_route_rejects_wide_kernel():
    sc = HeadScenario(1.348, 0.6, 0.6, 0.702)
    with pytest.raises(InfeasibleParametersError):
        r_bound_general(0.291, sc, 10.0)
    with pytest.raises(InfeasibleParametersError):
        r_bound_general(0.291, sc, 0.1)


def test_restricted_route_needs_flags():
    sc = HeadScenario(1.348, 0.6, 0.6, 0.702)
    with pytest.raises(DomainError):
        r_bound_restricted(0.291, sc, 1.0)
    with pytest.raises(DomainError):
        r_bound_restricted(0.291, replace(sc, restricted=True), 1.0)


def test_restricted_dichotomy_takes_branch_max():
    sc = HeadScenario(1.348, 0.6, 0.6, 0.702, N0=5, restricted=True)
    r = r_bound_restricted(0.291, sc, 1.0)
    assert r.fallback_bound is not None
    assert r.bound >= r.fallback_bound
    assert r.branch in ("main", "count_fallback")
    assert r.n0_used == 5


def test_restricted_route_reference_values():
    tight = optimize_r(
        0.291, HeadScenario(1.273, 1.08, 1.08, 1.08, restricted=True)
    )
    assert tight.bound == pytest.approx(0.047405, abs=5e-5)
    assert tight.bound <= 0.0475 + 5e-4
    assert tight.n0_used in (4, 5, 6)
    loose = optimize_r(
        0.291, HeadScenario(1.348, 0.6, 0.6, 0.702, restricted=True)
    )
    assert loose.bound <= 0.3148 + 5e-4
    assert all(s >= 0.0 for _, s in loose.slacks)


def test_general_route_survives_narrow_feasible_window():
    # at smaller delta the feasible x window shrinks to a sliver that a
    # coarse scan of the full box can straddle
    sc = HeadScenario(1.348, 0.6, 0.6, 0.702)
    r = optimize_r(0.25, sc)
    assert r.branch == "main"
    assert 0.0 < r.bound < 1.0
