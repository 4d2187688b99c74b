import json
from fractions import Fraction

import pytest

from crgc.cluster_sim import (
    Scenario,
    ScenarioError,
    inject_failures,
    new_cluster,
    parse_scenario,
    random_payload,
    result_csv,
    result_dict,
    result_json,
    run_scenario,
    run_strategy,
    verify_cluster,
)
from crgc.galois import FieldSpec
from crgc.mscr import NodeShare, ParameterError, make_params, share_to_bytes


def small_cluster(seed=1):
    params = make_params(4, 2, 2, field=FieldSpec(5))
    payload = random_payload(params, 8, seed)
    return params, new_cluster(params, payload, seed)


def cluster_84(seed=1):
    params = make_params(7, 4, 3)
    payload = random_payload(params, 84, seed)
    return params, new_cluster(params, payload, seed)


# -- failure injection --------------------------------------------------------

def test_inject_explicit_set():
    _, state = small_cluster()
    failed = inject_failures(state, nodes={2, 4})
    assert failed.failed == (2, 4)
    assert failed.alive == (1, 3)


def test_inject_count_zero_is_identity():
    _, state = small_cluster()
    assert inject_failures(state, count=0) is state


def test_inject_seeded_deterministic():
    _, state = small_cluster(seed=9)
    a = inject_failures(state, count=2)
    b = inject_failures(state, count=2)
    assert a.failed == b.failed
    c = inject_failures(state, count=2, seed=10)
    d = inject_failures(state, count=2, seed=10)
    assert c.failed == d.failed


def test_inject_guards():
    _, state = small_cluster()
    with pytest.raises(ParameterError):
        inject_failures(state, count=3)  # would leave fewer than k alive
    with pytest.raises(ParameterError):
        inject_failures(state, nodes={9})
    with pytest.raises(ParameterError):
        inject_failures(state)
    with pytest.raises(ParameterError):
        inject_failures(state, count=1, nodes={1})


# -- strategies ---------------------------------------------------------------

def test_individual_strategy_84():
    params, state = cluster_84()
    failed = inject_failures(state, nodes={1, 2, 3})
    repaired, report = run_strategy(failed, "individual")
    assert report.per_newcomer == (84, 84, 84)
    assert report.average == 84 == report.formula_per_newcomer
    assert repaired.failed == ()
    for f in (1, 2, 3):
        assert share_to_bytes(repaired.shares[f], params) == share_to_bytes(state.shares[f], params)


def test_sequential_strategy_84_accounting():
    _, state = cluster_84()
    failed = inject_failures(state, nodes={1, 2, 3})
    repaired, report = run_strategy(failed, "sequential_with_helpers")
    assert report.per_newcomer == (Fraction(84), Fraction(42), Fraction(28))
    assert report.average == Fraction(154, 3)
    assert not report.measured
    assert repaired.failed == ()


def test_cooperative_strategy_84():
    _, state = cluster_84()
    failed = inject_failures(state, nodes={1, 2, 3})
    repaired, report = run_strategy(failed, "cooperative")
    assert report.per_newcomer == (42, 42, 42)
    assert report.per_newcomer_phase1 == (28, 28, 28)
    assert report.per_newcomer_phase2 == (14, 14, 14)
    assert report.average == 42 == report.formula_per_newcomer
    assert verify_cluster(repaired).ok


def test_cooperative_requires_full_batch():
    _, state = cluster_84()
    failed = inject_failures(state, nodes={1, 2})
    with pytest.raises(ParameterError):
        run_strategy(failed, "cooperative")
    repaired, report = run_strategy(failed, "individual")
    assert repaired.failed == ()


def test_ledger_matches_formula_at_minimum_storage():
    params, state = cluster_84()
    stripes = state.shares[1].stripe_count
    failed = inject_failures(state, nodes={5, 6, 7})
    _, report = run_strategy(failed, "cooperative")
    B = stripes * params.k * params.r
    assert all(x == stripes * (params.d + params.r - 1) for x in report.per_newcomer)
    assert report.formula_per_newcomer == Fraction(
        B * (params.d + params.r - 1), params.k * (params.d + params.r - params.k)
    )
    assert report.per_newcomer[0] == report.formula_per_newcomer


def test_strategy_reports_are_reproducible():
    sc = Scenario(n=7, k=4, r=3, B_symbols=84, seed=5, epochs=2)
    a = result_csv(run_scenario(sc))
    b = result_csv(run_scenario(sc))
    assert a == b


# -- verification -------------------------------------------------------------

def test_verify_fresh_cluster():
    _, state = small_cluster()
    check = verify_cluster(state)
    assert check.ok and check.subsets_checked == 6 and not check.failing_subsets


def test_verify_post_repair():
    _, state = cluster_84()
    failed = inject_failures(state, nodes={2, 4, 6})
    repaired, _ = run_strategy(failed, "cooperative")
    assert verify_cluster(repaired).ok


def test_verify_detects_corruption():
    params, state = small_cluster()
    share = state.shares[2]
    spec = params.spec
    bad_col = (spec.element((share.columns[0][0].value + 1) % spec.order),) + share.columns[0][1:]
    state.shares[2] = NodeShare(2, (bad_col,) + share.columns[1:], share.original_length)
    check = verify_cluster(state)
    assert not check.ok
    assert check.failing_subsets
    assert all(2 in subset for subset in check.failing_subsets)


def test_verify_samples_large_clusters():
    params = make_params(9, 2, 2)
    payload = random_payload(params, 8, 3)
    state = new_cluster(params, payload, 3)
    check = verify_cluster(state, sample_limit=10)
    assert check.ok and check.subsets_checked == 10
    again = verify_cluster(state, sample_limit=10)
    assert check == again  # sampling is seeded


def test_twenty_epochs_never_violate_verification():
    sc = Scenario(n=6, k=3, r=2, B_symbols=12, seed=77, epochs=20,
                  strategies=("cooperative",))
    res = run_scenario(sc)
    assert len(res.epochs) == 20
    assert res.ok
    # Different batches actually get hit across epochs.
    assert len({er.failed for er in res.epochs}) > 1


# -- scenario parsing ---------------------------------------------------------

SCENARIO_TEXT = """\
# three-way comparison
n=7
k=4
r=3
B_symbols=84
field=auto
seed=42
epochs=1
strategy=all
"""


def test_parse_scenario_full():
    sc = parse_scenario(SCENARIO_TEXT)
    assert sc == Scenario(n=7, k=4, r=3, B_symbols=84, field="auto", seed=42, epochs=1)


def test_parse_scenario_defaults_and_lists():
    sc = parse_scenario("n=6\nk=3\nr=2\nB_symbols=12\nstrategy=individual,cooperative\n")
    assert sc.seed == 0 and sc.epochs == 1 and sc.field == "auto"
    assert sc.strategies == ("individual", "cooperative")


@pytest.mark.parametrize("text,line", [
    ("n=7\nbogus\n", 2),
    ("n=x\n", 1),
    ("n=7\nk=4\nr=3\nB_symbols=84\nwhatever=1\n", 5),
    ("n=7\nk=4\nr=3\nB_symbols=84\nstrategy=warp\n", 5),
    ("n=7\nk=4\nr=3\nB_symbols=84\nfield=gf9\n", 5),
])
def test_parse_scenario_errors_carry_line_numbers(text, line):
    with pytest.raises(ScenarioError) as err:
        parse_scenario(text)
    assert err.value.line == line


def test_parse_scenario_missing_keys():
    with pytest.raises(ScenarioError) as err:
        parse_scenario("n=7\nk=4\n")
    assert "missing" in str(err.value)


# -- scenario execution and reports -------------------------------------------

def test_run_scenario_three_way_comparison():
    res = run_scenario(parse_scenario(SCENARIO_TEXT))
    assert res.ok
    by_name = {rep.strategy: rep for rep in res.epochs[0].reports}
    assert by_name["individual"].per_newcomer == (84, 84, 84)
    assert by_name["sequential_with_helpers"].average == Fraction(154, 3)
    assert by_name["cooperative"].per_newcomer == (42, 42, 42)


def test_zero_epoch_scenario_gives_empty_report():
    sc = Scenario(n=6, k=3, r=2, B_symbols=12, epochs=0)
    res = run_scenario(sc)
    assert res.epochs == () and res.ok
    assert result_csv(res) == "epoch,strategy,newcomer,phase1_symbols,phase2_symbols,total_bytes\n"


def test_result_csv_rows():
    sc = Scenario(n=7, k=4, r=3, B_symbols=84, seed=3, epochs=1)
    res = run_scenario(sc)
    lines = result_csv(res).strip().split("\n")
    assert lines[0] == "epoch,strategy,newcomer,phase1_symbols,phase2_symbols,total_bytes"
    assert len(lines) == 1 + 3 * 3
    failed = res.epochs[0].failed
    assert f"0,individual,{failed[0]},84,0,84" in lines
    assert f"0,cooperative,{failed[0]},28,14,42" in lines
    assert f"0,sequential_with_helpers,{failed[0]},84,0,84" in lines
    assert f"0,sequential_with_helpers,{failed[2]},28,0,28" in lines


def test_result_json_structure():
    sc = Scenario(n=7, k=4, r=3, B_symbols=84, seed=3, epochs=1)
    res = run_scenario(sc)
    doc = json.loads(result_json(res))
    assert doc["ok"] is True
    strategies = {d["strategy"]: d for d in doc["epochs"][0]["strategies"]}
    assert strategies["sequential_with_helpers"]["per_newcomer_average"] == "154/3"
    assert abs(strategies["sequential_with_helpers"]["per_newcomer_average_float"] - 51.3333) < 1e-3
    assert strategies["cooperative"]["per_newcomer_symbols"] == ["42", "42", "42"]
    assert result_dict(res)["scenario"]["n"] == 7
