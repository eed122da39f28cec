"""Mapping verdicts: criteria, directions, vacuous and conditional paths."""

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentgate import (
    Example38Spec,
    ExplicitSpec,
    GevreySpec,
    MapStatus,
    QGevreySpec,
    classify,
    default_admissible,
    injectivity_verdict,
    make_sequence,
    origin_verdicts,
    surjectivity_verdict,
)


def test_small_gevrey_is_injective_not_surjective():
    rep = classify(GevreySpec(s=0.5))
    assert rep.injective.status is MapStatus.HOLDS
    assert rep.surjective.status is MapStatus.FAILS
    assert rep.origin_injective.status is MapStatus.HOLDS
    assert rep.origin_surjective.status is MapStatus.FAILS
    assert rep.any_definite


def test_large_gevrey_is_surjective_not_injective():
    rep = classify(GevreySpec(s=2.0))
    assert rep.injective.status is MapStatus.FAILS
    assert rep.surjective.status is MapStatus.HOLDS
    assert rep.surjective.direction == "equivalence"
    assert rep.origin_surjective.status is MapStatus.HOLDS


def test_gevrey_boundary_case():
    # s = 1 sits on the divergence side of the injectivity series
    rep = classify(GevreySpec(s=1.0))
    assert rep.injective.status is MapStatus.HOLDS
    assert rep.surjective.status is MapStatus.FAILS


def test_q_gevrey_surjective_without_mg():
    rep = classify(QGevreySpec(q=2.0))
    assert rep.hypotheses["mg"].status.value == "fails"
    assert rep.surjective.status is MapStatus.HOLDS
    assert rep.surjective.direction == "equivalence"
    # without (mg) the equivalence leans on the constructor certificate
    assert "Rem 4.9" in rep.surjective.citations
    assert math.isinf(rep.gamma.upper)


def test_example38_half_power_neither():
    spec = {"kind": "derived", "op": "power", "s": 0.5, "base": {"kind": "example38"}}
    from momentgate import spec_from_json

    rep = classify(spec_from_json(spec), horizon=100_000)
    assert rep.injective.status is MapStatus.FAILS
    assert rep.surjective.status is MapStatus.FAILS
    assert rep.gamma.lower <= 1.0 <= rep.gamma.upper + 1e-12


def test_constant_sequence_vacuous_origin_pair():
    # M = 1 keeps (lc) but loses (nq): the origin classes collapse to {0}
    rep = classify(ExplicitSpec(log_m=(0.0,), tail_rule="arithmetic", tail_value=0.0))
    assert rep.origin_injective.status is MapStatus.VACUOUS
    assert rep.origin_surjective.status is MapStatus.VACUOUS
    assert "Rem 4.5" in rep.origin_injective.citations
    assert rep.any_definite


def test_non_convex_all_conditional():
    log_m = tuple(0.5 + 0.45 * math.sin(2.2 * p) for p in range(40))
    rep = classify(ExplicitSpec(log_m=log_m, tail_rule="power", tail_value=0.0))
    for v in rep.verdicts:
        assert v.status is MapStatus.CONDITIONAL
    assert not rep.any_definite
    assert any("lc" in note for note in rep.injective.notes)


def test_standalone_verdict_helpers_agree_with_classify():
    M = make_sequence(GevreySpec(s=2.0))
    A = default_admissible()
    inj = injectivity_verdict(M, A=A)
    sur = surjectivity_verdict(M, A=A)
    oin, osur = origin_verdicts(M, A=A)
    rep = classify(GevreySpec(s=2.0))
    assert inj.status is rep.injective.status
    assert sur.status is rep.surjective.status
    assert oin.status is rep.origin_injective.status
    assert osur.status is rep.origin_surjective.status


def test_report_json_shape_and_determinism():
    rep = classify(GevreySpec(s=1.5))
    data = rep.to_json()
    assert data["schema"] == 1
    assert set(data["verdicts"]) == {
        "injective",
        "surjective",
        "origin_injective",
        "origin_surjective",
    }
    assert set(data["indices"]) == {"gamma", "omega"}
    # canonical dumps of two fresh runs must agree byte for byte
    a = json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)
    b = json.dumps(
        classify(GevreySpec(s=1.5)).to_json(),
        sort_keys=True,
        separators=(",", ":"),
        allow_nan=False,
    )
    assert a == b


def test_never_bijective_on_stock_families():
    for spec in (
        GevreySpec(s=0.5),
        GevreySpec(s=1.0),
        GevreySpec(s=3.0),
        QGevreySpec(q=2.0),
        Example38Spec(),
    ):
        rep = classify(spec)
        assert not (
            rep.injective.status is MapStatus.HOLDS
            and rep.surjective.status is MapStatus.HOLDS
        )
        assert not (
            rep.origin_injective.status is MapStatus.HOLDS
            and rep.origin_surjective.status is MapStatus.HOLDS
        )


@given(
    st.floats(min_value=0.05, max_value=1.2),
    st.floats(min_value=0.0, max_value=2.0),
)
@settings(max_examples=10, deadline=None)
def test_never_bijective_random_two_slope(e1, de):
    # convex quotient profile: slope e1 then e1 + de, power tail
    e2 = e1 + de
    k = 10
    head = [e1 * math.log(p + 1) for p in range(k)]
    head += [head[k - 1] + e2 * (math.log(p + 1) - math.log(k)) for p in range(k, 24)]
    rep = classify(
        ExplicitSpec(log_m=tuple(head), tail_rule="power", tail_value=e2),
        horizon=2048,
    )
    assert not (
        rep.injective.status is MapStatus.HOLDS
        and rep.surjective.status is MapStatus.HOLDS
    )
