"""Case certificates, assemblies, the delta frontier, and the adversary."""

from __future__ import annotations

import math
from types import SimpleNamespace

import pytest
from hypothesis import given
from hypothesis import strategies as st

import zeroledger.ledger as ledger_mod
from zeroledger import (
    DomainError,
    adversary_audit,
    case1_audit,
    case_assemble_head,
    case_assemble_single,
    case_profile,
    delta_search,
    split_s,
    verify_all,
    verify_case,
)

DELTA = 0.291


def test_split_s_examples():
    assert split_s([], DELTA, 1.0) == (0.0, 0.0, 0.0)
    t, r, s = split_s([1.348], DELTA, 1.348)
    assert t == pytest.approx(math.exp(-1.348 / DELTA), rel=1e-15)
    assert r == 0.0
    t, r, s = split_s([0.4, 1.5], DELTA, 1.273)
    assert r == pytest.approx(0.240355, rel=1e-5)
    assert t == pytest.approx(
        math.exp(-1.273 / DELTA) + math.exp(-1.5 / DELTA), rel=1e-15
    )


def test_split_s_validation():
    with pytest.raises(DomainError):
        split_s([0.5], 1.5, 1.0)
    with pytest.raises(DomainError):
        split_s([0.5], DELTA, 0.0)
    with pytest.raises(DomainError):
        split_s([-0.1], DELTA, 1.0)


@given(
    lambdas=st.lists(
        st.floats(min_value=0.0, max_value=10.0, allow_nan=False), max_size=12
    ),
    delta=st.floats(min_value=0.05, max_value=0.95),
    Lambda=st.floats(min_value=0.1, max_value=5.0),
)
def test_split_s_partition(lambdas, delta, Lambda):
    t, r, s = split_s(lambdas, delta, Lambda)
    assert t + r == pytest.approx(s, rel=1e-15)
    assert t >= 0.0
    assert r >= 0.0
    assert t <= s


def test_assemble_single():
    assert case_assemble_single(DELTA, 0.0, 0.0, 0.0, 0.0) == 0.0
    T1, maxT, sumT = 0.0575, 0.0380, 5.899
    R1 = math.exp(-0.08 / DELTA) - math.exp(-1.58 / DELTA)
    value = case_assemble_single(DELTA, T1, maxT, sumT, R1)
    assert value == (R1 + T1) ** 2 + maxT * sumT
    assert value <= 0.8919
    T1, maxT, sumT = 0.1061, 0.0837, 8.211
    R1 = math.exp(-0.3 / DELTA) - math.exp(-1.29 / DELTA)
    assert case_assemble_single(DELTA, T1, maxT, sumT, R1) <= 0.9015
    with pytest.raises(DomainError):
        case_assemble_single(DELTA, -0.1, 0.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        case_assemble_single(1.5, 0.0, 0.0, 0.0, 0.0)


def test_assemble_head():
    assert case_assemble_head(DELTA, [], 0.0, 0.0, 0.0, 0.0, 0.0) == 0.0
    head = [(0.3613, 0.0956)]
    value = case_assemble_head(DELTA, head, 0.0985, 0.3174, 0.0843, 8.030, 0.0956)
    expected = (
        (0.3613 + 0.0956) ** 2
        + 0.0843 * (8.030 + 2.0 * 0.3174)
        + 0.0985 * 0.3174
        - 0.0843 * 0.0956
    )
    assert value == pytest.approx(expected, rel=1e-15)
    assert value <= 0.9737
    two = [(0.2422, 0.0956), (0.2422, 0.0956)]
    assert (
        case_assemble_head(DELTA, two, 0.0985, 0.3174, 0.0843, 8.030, 0.0956) <= 0.9950
    )
    pooled = case_assemble_head(DELTA, [], 0.3149, 0.6720, 0.0855, 7.715, 0.0)
    assert pooled == pytest.approx(
        0.3149 * 0.6720 + 0.0855 * (7.715 + 2.0 * 0.6720), rel=1e-15
    )
    assert pooled <= 0.9862
    with pytest.raises(DomainError):
        case_assemble_head(DELTA, [(math.inf, 0.0)], 0.0, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        case_assemble_head(DELTA, [], -1.0, 0.0, 0.0, 0.0, 0.0)


def test_case_profiles_partition_the_line():
    profiles = [case_profile(i) for i in range(1, 7)]
    assert profiles[0].lambda11_range[0] == 0.01
    for left, right in zip(profiles, profiles[1:]):
        assert left.lambda11_range[1] == right.lambda11_range[0]
    assert profiles[5].lambda11_range[1] == math.inf
    assert case_profile(1, c0=0.05).lambda11_range[0] == 0.05
    with pytest.raises(DomainError):
        case_profile(0)
    with pytest.raises(DomainError):
        case_profile(7)
    with pytest.raises(DomainError):
        case_profile(2, c0=0.0)
    with pytest.raises(DomainError):
        case_profile(2, c0=0.09)


def test_case1_audit_shape():
    cert = case1_audit(DELTA)
    assert cert.case_id == 1 and cert.subcase == "audit"
    assert cert.paper_value == 0.951
    kink = math.exp(-3.08)
    tail_const = 134.0 * math.exp(-2.0 * 3.08)

    def h(lam):
        if lam >= kink:
            return math.exp(-2.0 * lam / DELTA) + tail_const
        return math.exp(-2.0 * lam / DELTA) + 134.0 * lam * lam

    assert cert.components["h_at_c0"] == pytest.approx(h(0.01), rel=1e-12)
    assert cert.components["h_at_kink"] == pytest.approx(h(kink), rel=1e-12)
    assert cert.components["h_at_0.08"] == pytest.approx(h(0.08), rel=1e-12)
    assert cert.components["kink"] == kink
    assert cert.components["convexity_ok"] == 1.0
    assert cert.components["decreasing_ok"] == 1.0
    assert cert.sum_bound == max(h(0.01), h(kink))
    # the recomputed kink value sits far from the quoted endpoint, so the
    # audit must flag the discrepancy rather than hide it
    assert cert.discrepancy is not None
    assert not cert.passed


def test_case1_audit_c0_above_kink():
    cert = case1_audit(DELTA, c0=0.05)
    assert 0.05 > cert.components["kink"]
    assert cert.sum_bound == cert.components["h_at_c0"]
    with pytest.raises(DomainError):
        case1_audit(1.5)
    with pytest.raises(DomainError):
        case1_audit(DELTA, c0=0.2)


def test_verify_case_structure(book291):
    expected = {
        1: ["audit"],
        2: ["one isolated term"],
        3: ["one isolated term"],
        4: [
            "one isolated term",
            "two terms, distinct classes",
            "two terms, common class",
        ],
        5: [
            "one isolated term",
            "two terms, common class",
            "two terms, distinct classes",
        ],
        6: ["pooled classes"],
    }
    for case_id, subcases in expected.items():
        certs = verify_case(case_id, DELTA, book=book291)
        assert [c.subcase for c in certs] == subcases
        for cert in certs:
            assert cert.case_id == case_id
            if case_id >= 2:
                assert cert.passed
                assert cert.paper_value is not None
                assert cert.sum_bound <= cert.paper_value + 5e-4
                assert math.isfinite(cert.sum_bound)


def test_verify_case_reference_values(book291):
    assert verify_case(2, DELTA, book=book291)[0].sum_bound == pytest.approx(
        0.8906244701, rel=1e-6
    )
    assert verify_case(6, DELTA, book=book291)[0].sum_bound == pytest.approx(
        0.97364504, rel=1e-6
    )
    i0s = {
        (c.case_id, c.subcase): c.components["i0"]
        for case_id in (4, 5, 6)
        for c in verify_case(case_id, DELTA, book=book291)
    }
    assert i0s[(4, "two terms, distinct classes")] == 2
    assert i0s[(4, "two terms, common class")] == 1
    assert i0s[(5, "two terms, distinct classes")] == 2
    assert i0s[(6, "pooled classes")] == 0


def test_verify_case_is_deterministic(book291):
    first = verify_case(5, DELTA, book=book291)
    second = verify_case(5, DELTA, book=book291)
    assert [c.sum_bound for c in first] == [c.sum_bound for c in second]


def test_verify_case_rejects_mismatched_book(book291):
    with pytest.raises(DomainError):
        verify_case(2, 0.28, book=book291)


def test_verify_all_validation():
    with pytest.raises(DomainError):
        verify_all(1.5)
    with pytest.raises(DomainError):
        verify_all(DELTA, c0=0.0)


def test_verify_all_fails_at_large_delta():
    report = verify_all(0.5, include_tables=False)
    assert report.delta == 0.5
    assert report.overall_pass is False
    assert report.table_reproductions == ()


def _stub_search(monkeypatch, threshold):
    probes = []

    def fake_verify_all(d, c0=0.01, **kwargs):
        probes.append(d)
        return SimpleNamespace(overall_pass=d <= threshold)

    monkeypatch.setattr(ledger_mod, "verify_all", fake_verify_all)
    return probes


def test_delta_search_brackets_the_frontier(monkeypatch):
    _stub_search(monkeypatch, 0.3)
    delta_min, trace = delta_search(0.25, 0.35, 1e-3)
    assert delta_min == 0.25
    assert trace["status"] == "bracketed"
    assert trace["monotone"] is True
    assert len(trace["probes"]) <= 15
    assert trace["feasible_max"] is not None
    assert trace["infeasible_min"] is not None
    assert 0.0 < trace["infeasible_min"] - trace["feasible_max"] <= 1e-3
    assert all(ok == (d <= 0.3) for d, ok in trace["probes"])


def test_delta_search_all_pass(monkeypatch):
    _stub_search(monkeypatch, 0.3)
    delta_min, trace = delta_search(0.25, 0.29, 1e-3)
    assert delta_min == 0.25
    assert trace["status"] == "all-pass"
    assert len(trace["probes"]) == 7
    assert trace["infeasible_min"] is None


def test_delta_search_all_fail(monkeypatch):
    _stub_search(monkeypatch, 0.1)
    delta_min, trace = delta_search(0.25, 0.35, 1e-3)
    assert math.isnan(delta_min)
    assert trace["status"] == "all-fail"
    assert trace["feasible_max"] is None


def test_delta_search_degenerate_interval(monkeypatch):
    probes = _stub_search(monkeypatch, 0.3)
    delta_min, trace = delta_search(0.291, 0.2915, 1e-3)
    assert delta_min == 0.291
    assert trace["status"] == "degenerate-interval"
    assert probes == [0.291]


def test_delta_search_validation():
    with pytest.raises(DomainError):
        delta_search(0.3, 0.25, 1e-3)
    with pytest.raises(DomainError):
        delta_search(0.25, 0.35, 0.0)


def test_adversary_nominal_configurations(book291):
    config, value = adversary_audit(2, DELTA, budget=0, book=book291)
    assert config == ((0.08,),)
    assert value == pytest.approx(math.exp(-0.16 / DELTA), rel=1e-12)
    config, value = adversary_audit(6, DELTA, budget=0, book=book291)
    assert config == ((0.6, 0.6),)
    assert value == pytest.approx((2.0 * math.exp(-0.6 / DELTA)) ** 2, rel=1e-12)


def test_adversary_is_deterministic(book291):
    first = adversary_audit(4, DELTA, budget=100, seed=7, book=book291)
    second = adversary_audit(4, DELTA, budget=100, seed=7, book=book291)
    assert first == second


def test_adversary_respects_certificates(book291):
    for case_id in range(1, 7):
        certs = verify_case(case_id, DELTA, book=book291)
        cap = max(c.sum_bound for c in certs)
        config, value = adversary_audit(
            case_id, DELTA, budget=60, seed=1, book=book291
        )
        assert value <= cap + 1e-9
        assert config
        assert all(cls for cls in config)
