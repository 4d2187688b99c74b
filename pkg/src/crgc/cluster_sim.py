"""Deterministic storage-cluster simulator.

Runs fail/repair epochs over a real encoded payload and meters each
repair strategy: `individual` repairs every newcomer on its own
(k*r symbols per stripe each), `cooperative` runs the two-phase batch
protocol (k+r-1 per stripe each), and `sequential_with_helpers` is the
one-by-one schedule where each regenerated node helps the next; the last
is accounting only (the t-th newcomer is charged
B*d / (k*(d+t-k+1)) symbols), and the cluster is restored through the
exact-repair machinery without metering that traffic.

All randomness comes from SplitMix64 streams derived from the scenario
seed, so a scenario replays bit-identically anywhere.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from . import coop_repair
from .coop_repair import BandwidthLedger
from .mscr import (
    CodeParams,
    NodeShare,
    ParameterError,
    decode_payload,
    encode_payload,
    make_params,
    symbols_to_bytes,
)
from .rng import derive_stream

STRATEGIES = ("individual", "sequential_with_helpers", "cooperative")

# Stream labels for deriving independent RNGs from one scenario seed.
_PAYLOAD_STREAM = 0
_FAILURE_STREAM = 1
_VERIFY_STREAM = 2


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


@dataclass(eq=False)
class ClusterState:
    params: CodeParams
    payload: bytes
    shares: dict[int, NodeShare]
    epoch: int
    seed: int

    @property
    def alive(self) -> tuple[int, ...]:
        return tuple(sorted(self.shares))

    @property
    def failed(self) -> tuple[int, ...]:
        return tuple(v for v in range(1, self.params.n + 1) if v not in self.shares)


def random_payload(params: CodeParams, symbol_count: int, seed: int) -> bytes:
    """symbol_count uniform field symbols, packed to bytes."""
    rng = derive_stream(seed, _PAYLOAD_STREAM)
    spec = params.spec
    symbols = [spec.element(rng.randbelow(spec.order)) for _ in range(symbol_count)]
    return symbols_to_bytes(symbols)


def new_cluster(params: CodeParams, payload: bytes, seed: int) -> ClusterState:
    shares = {s.node_index: s for s in encode_payload(payload, params)}
    return ClusterState(params, payload, shares, epoch=0, seed=seed)


def inject_failures(state: ClusterState, count: int | None = None,
                    nodes=None, seed: int | None = None) -> ClusterState:
    """Remove shares of failed nodes; deterministic under (seed, epoch)."""
    if (count is None) == (nodes is None):
        raise ParameterError("give either a failure count or an explicit node set")
    if nodes is None:
        if count == 0:
            return state
        rng = derive_stream(
            (state.seed if seed is None else seed) ^ (_FAILURE_STREAM << 56),
            state.epoch,
        )
        nodes = rng.sample(state.alive, count)
    nodes = set(nodes)
    unknown = nodes - set(state.shares)
    if unknown:
        raise ParameterError(f"nodes {sorted(unknown)} are not alive")
    if len(state.shares) - len(nodes) < state.params.k:
        raise ParameterError(
            f"failing {len(nodes)} nodes would leave fewer than k={state.params.k} alive"
        )
    remaining = {i: s for i, s in state.shares.items() if i not in nodes}
    return replace(state, shares=remaining)


@dataclass(frozen=True)
class StrategyReport:
    strategy: str
    newcomers: tuple[int, ...]
    per_newcomer: tuple  # measured symbol counts (ints) or exact Fractions
    per_newcomer_phase1: tuple | None
    per_newcomer_phase2: tuple | None
    average: Fraction
    total: Fraction
    formula_per_newcomer: Fraction
    symbol_bytes: int

    @property
    def measured(self) -> bool:
        return self.per_newcomer_phase1 is not None


def _sequential_terms(B: Fraction, k: int, d: int, count: int) -> list[Fraction]:
    # t-th newcomer sees d + t connections; the schedule is charged
    # B*d / (k*(d+t-k+1)) symbols for it.
    return [Fraction(B * d, k * (d + t - k + 1)) for t in range(count)]


def run_strategy(state: ClusterState, strategy: str) -> tuple[ClusterState, StrategyReport]:
    """Repair the currently failed nodes under one strategy."""
    params = state.params
    failed = state.failed
    if not failed:
        raise ParameterError("no failed nodes to repair")
    if strategy not in STRATEGIES:
        raise ParameterError(f"unknown strategy {strategy!r}")
    if strategy in ("cooperative", "sequential_with_helpers") and len(failed) != params.r:
        raise ParameterError(
            f"{strategy} repairs batches of exactly r={params.r}, got {len(failed)}"
        )
    stripes = next(iter(state.shares.values())).stripe_count
    B = Fraction(stripes * params.k * params.r)
    width = params.symbol_width

    if strategy == "individual":
        ledger = BandwidthLedger()
        regenerated = {}
        for f in failed:
            share, led = coop_repair.individual_repair(f, state.shares, params)
            regenerated[f] = share
            ledger.merge(led)
        formula = Fraction(B * params.d, params.k * (params.d - params.k + 1))
    elif strategy == "cooperative":
        regenerated, ledger = coop_repair.cooperative_repair(state.shares, failed, params)
        rr = len(failed)
        formula = Fraction(B * (params.d + rr - 1), params.k * (params.d + rr - params.k))
    else:  # sequential_with_helpers: accounting only, repair out of band
        regenerated, _ = coop_repair.cooperative_repair(state.shares, failed, params)
        terms = _sequential_terms(B, params.k, params.d, len(failed))
        total = sum(terms, Fraction(0))
        avg = total / len(failed)
        report = StrategyReport(
            strategy=strategy,
            newcomers=failed,
            per_newcomer=tuple(terms),
            per_newcomer_phase1=None,
            per_newcomer_phase2=None,
            average=avg,
            total=total,
            formula_per_newcomer=avg,
            symbol_bytes=width,
        )
        shares = dict(state.shares)
        shares.update(regenerated)
        return replace(state, shares=shares), report

    per = tuple(ledger.symbols_to(f) for f in failed)
    report = StrategyReport(
        strategy=strategy,
        newcomers=failed,
        per_newcomer=per,
        per_newcomer_phase1=tuple(ledger.symbols_to(f, phase=1) for f in failed),
        per_newcomer_phase2=tuple(ledger.symbols_to(f, phase=2) for f in failed),
        average=Fraction(sum(per), len(failed)),
        total=Fraction(sum(per)),
        formula_per_newcomer=formula,
        symbol_bytes=width,
    )
    shares = dict(state.shares)
    shares.update(regenerated)
    return replace(state, shares=shares), report


@dataclass(frozen=True)
class ClusterCheck:
    ok: bool
    subsets_checked: int
    failing_subsets: tuple[tuple[int, ...], ...]


def verify_cluster(state: ClusterState, sample_limit: int = 200) -> ClusterCheck:
    """Reconstruct from k-subsets of alive nodes and compare payloads.

    Exhaustive when the cluster has at most 8 nodes, otherwise a seeded
    sample of subsets.  Failing subsets are reported, not raised.
    """
    alive = state.alive
    k = state.params.k
    subsets = list(itertools.combinations(alive, k))
    if state.params.n > 8 and len(subsets) > sample_limit:
        rng = derive_stream(state.seed ^ (_VERIFY_STREAM << 56), state.epoch)
        subsets = rng.sample(subsets, sample_limit)
    failing = []
    for subset in subsets:
        try:
            got = decode_payload([state.shares[i] for i in subset], state.params)
        except Exception:
            got = None
        if got != state.payload:
            failing.append(subset)
    return ClusterCheck(not failing, len(subsets), tuple(failing))


# -- scenario files -----------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    n: int
    k: int
    r: int
    B_symbols: int
    field: str = "auto"
    seed: int = 0
    epochs: int = 1
    strategies: tuple[str, ...] = STRATEGIES


_REQUIRED_KEYS = ("n", "k", "r", "B_symbols")
_INT_KEYS = ("n", "k", "r", "B_symbols", "seed", "epochs")


def parse_scenario(text: str) -> Scenario:
    """Parse the line-oriented key=value scenario format."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ScenarioError("expected key=value", lineno)
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in _INT_KEYS:
            try:
                values[key] = int(val)
            except ValueError:
                raise ScenarioError(f"{key} must be an integer, got {val!r}", lineno) from None
        elif key == "field":
            if val not in ("auto", "gf256", "gf65536"):
                raise ScenarioError(f"unknown field mode {val!r}", lineno)
            values[key] = val
        elif key == "strategy":
            names = STRATEGIES if val == "all" else tuple(s.strip() for s in val.split(","))
            for s in names:
                if s not in STRATEGIES:
                    raise ScenarioError(f"unknown strategy {s!r}", lineno)
            values["strategies"] = names
        else:
            raise ScenarioError(f"unknown key {key!r}", lineno)
    missing = [key for key in _REQUIRED_KEYS if key not in values]
    if missing:
        raise ScenarioError(f"missing required keys: {', '.join(missing)}")
    return Scenario(**values)  # type: ignore[arg-type]


def load_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text())


@dataclass(frozen=True)
class EpochResult:
    epoch: int
    failed: tuple[int, ...]
    reports: tuple[StrategyReport, ...]
    check: ClusterCheck


@dataclass(frozen=True)
class SimulationResult:
    scenario: Scenario
    epochs: tuple[EpochResult, ...]

    @property
    def ok(self) -> bool:
        return all(e.check.ok for e in self.epochs)


def run_scenario(sc: Scenario) -> SimulationResult:
    params = make_params(sc.n, sc.k, sc.r, field=sc.field)
    payload = random_payload(params, sc.B_symbols, sc.seed)
    state = new_cluster(params, payload, sc.seed)
    results = []
    for epoch in range(sc.epochs):
        state = replace(state, epoch=epoch)
        failed_state = inject_failures(state, count=sc.r)
        reports = []
        next_state = None
        for strategy in sc.strategies:
            repaired, report = run_strategy(failed_state, strategy)
            reports.append(report)
            if next_state is None:
                next_state = repaired
        state = next_state if next_state is not None else state
        check = verify_cluster(state)
        results.append(EpochResult(epoch, failed_state.failed, tuple(reports), check))
    return SimulationResult(sc, tuple(results))


def _num(x) -> str:
    if isinstance(x, Fraction) and x.denominator != 1:
        return f"{x.numerator}/{x.denominator}"
    return str(int(x))


def result_csv(res: SimulationResult) -> str:
    lines = ["epoch,strategy,newcomer,phase1_symbols,phase2_symbols,total_bytes"]
    for er in res.epochs:
        for rep in er.reports:
            for i, node in enumerate(rep.newcomers):
                if rep.measured:
                    p1 = rep.per_newcomer_phase1[i]
                    p2 = rep.per_newcomer_phase2[i]
                    total_bytes = (p1 + p2) * rep.symbol_bytes
                else:
                    p1 = rep.per_newcomer[i]
                    p2 = 0
                    total_bytes = p1 * rep.symbol_bytes
                lines.append(
                    f"{er.epoch},{rep.strategy},{node},{_num(p1)},{_num(p2)},{_num(total_bytes)}"
                )
    return "\n".join(lines) + "\n"


def result_dict(res: SimulationResult) -> dict:
    sc = res.scenario
    return {
        "scenario": {
            "n": sc.n, "k": sc.k, "r": sc.r, "B_symbols": sc.B_symbols,
            "field": sc.field, "seed": sc.seed, "epochs": sc.epochs,
            "strategies": list(sc.strategies),
        },
        "ok": res.ok,
        "epochs": [
            {
                "epoch": er.epoch,
                "failed": list(er.failed),
                "verify": {
                    "ok": er.check.ok,
                    "subsets_checked": er.check.subsets_checked,
                    "failing_subsets": [list(s) for s in er.check.failing_subsets],
                },
                "strategies": [
                    {
                        "strategy": rep.strategy,
                        "measured": rep.measured,
                        "newcomers": list(rep.newcomers),
                        "per_newcomer_symbols": [_num(x) for x in rep.per_newcomer],
                        "per_newcomer_average": _num(rep.average),
                        "per_newcomer_average_float": float(rep.average),
                        "formula_per_newcomer": _num(rep.formula_per_newcomer),
                        "total_symbols": _num(rep.total),
                        "symbol_bytes": rep.symbol_bytes,
                    }
                    for rep in er.reports
                ],
            }
            for er in res.epochs
        ],
    }


def result_json(res: SimulationResult) -> str:
    return json.dumps(result_dict(res), indent=2) + "\n"
