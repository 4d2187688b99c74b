"""Two-phase cooperative exact repair, plus the one-by-one baseline.

When r nodes fail, the r newcomers order themselves by node index.  In
phase 1, newcomer number j downloads from each of its k helpers the
single stored symbol of message row j, verbatim (helpers perform no
arithmetic), and inverts the helper Vandermonde submatrix to recover the
row.  In phase 2 each newcomer computes its row's contribution to every
failed column and sends one symbol to each other newcomer.  Every
transfer is metered in a BandwidthLedger; with a full batch of r
failures the cost is k + r - 1 symbols per stripe per newcomer.

Repairing fewer failures than the code's batch size r is supported as an
extension: with r' < r newcomers, newcomer j additionally downloads rows
r'+1..r from its helpers and fills those column entries itself, so phase
1 grows to k*(1 + r - r') symbols per stripe and phase 2 shrinks to
r' - 1.  With r' = 1 this degenerates to download-k-columns-and-project.

The individual (non-cooperative) baseline downloads k full columns per
newcomer, rebuilds the message matrix, and re-encodes the lost column:
k*r symbols per stripe per newcomer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rng import SplitMix64
from .galois import FieldElement
from .matrix import Matrix, mat_mul
from .mscr import CodeParams, NodeShare, ParameterError, dot, generator_column, subset_inverse


@dataclass(frozen=True)
class RepairPlan:
    failed: tuple[int, ...]                 # ascending newcomer order
    helpers: tuple[tuple[int, ...], ...]    # helpers[j-1] for newcomer ordinal j
    policy: str
    ordering: str = "ascending-index"       # how newcomer ordinals were assigned

    def __post_init__(self) -> None:
        fs = set(self.failed)
        for hs in self.helpers:
            if len(set(hs)) != len(hs):
                raise ParameterError("duplicate helper for one newcomer")
            if fs & set(hs):
                raise ParameterError("helper list overlaps the failed set")


@dataclass(frozen=True)
class TransferRecord:
    phase: int            # 1: helper -> newcomer, 2: newcomer -> newcomer
    from_node: int
    to_node: int
    stripe: int
    symbols: int
    payload: tuple[FieldElement, ...]

    def __post_init__(self) -> None:
        if self.symbols < 1 or self.symbols != len(self.payload):
            raise ValueError("record must carry at least one symbol")


@dataclass
class BandwidthLedger:
    """Per-transfer symbol counts, aggregable per newcomer and per phase."""

    records: list[TransferRecord] = field(default_factory=list)

    def add(self, phase, from_node, to_node, stripe, payload) -> None:
        payload = tuple(payload)
        self.records.append(
            TransferRecord(phase, from_node, to_node, stripe, len(payload), payload)
        )

    def merge(self, other: "BandwidthLedger") -> None:
        self.records.extend(other.records)

    def total_symbols(self) -> int:
        return sum(rec.symbols for rec in self.records)

    def symbols_to(self, node: int, phase: int | None = None) -> int:
        return sum(
            rec.symbols
            for rec in self.records
            if rec.to_node == node and (phase is None or rec.phase == phase)
        )

    def per_newcomer(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for rec in self.records:
            out[rec.to_node] = out.get(rec.to_node, 0) + rec.symbols
        return out

    def phase_totals(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for rec in self.records:
            out[rec.phase] = out.get(rec.phase, 0) + rec.symbols
        return out

    def transcript_lines(self) -> list[str]:
        """Audit lines, one per transferred symbol: phase,from,to,stripe,symbol_hex."""
        lines = []
        for rec in self.records:
            for sym in rec.payload:
                lines.append(
                    f"{rec.phase},{rec.from_node},{rec.to_node},{rec.stripe},{sym.to_bytes().hex()}"
                )
        return lines


def _pick_lowest(alive: list[int], ordinal: int, k: int, rng) -> tuple[int, ...]:
    return tuple(alive[:k])


def _pick_round_robin(alive: list[int], ordinal: int, k: int, rng) -> tuple[int, ...]:
    start = ((ordinal - 1) * k) % len(alive)
    return tuple(alive[(start + i) % len(alive)] for i in range(k))


def _pick_random(alive: list[int], ordinal: int, k: int, rng) -> tuple[int, ...]:
    return tuple(sorted(rng.sample(alive, k)))


HELPER_POLICIES = {
    "lowest_index": _pick_lowest,
    "round_robin": _pick_round_robin,
    "random": _pick_random,
}


def plan_repair(alive, failed, params: CodeParams, policy: str = "lowest_index",
                seed: int = 0) -> RepairPlan:
    """Assign k helpers to each newcomer; newcomers are ordered ascending."""
    failed = tuple(sorted(failed))
    alive = sorted(set(alive) - set(failed))
    if not failed or len(failed) > params.r:
        raise ParameterError(f"can repair 1..r={params.r} newcomers, got {len(failed)}")
    if len(set(failed)) != len(failed):
        raise ParameterError("duplicate failed node")
    if len(alive) < params.k:
        raise ParameterError(f"need at least k={params.k} alive helpers, have {len(alive)}")
    try:
        pick = HELPER_POLICIES[policy]
    except KeyError:
        raise ParameterError(f"unknown helper policy {policy!r}") from None
    rng = SplitMix64(seed)
    helpers = tuple(pick(alive, j, params.k, rng) for j in range(1, len(failed) + 1))
    return RepairPlan(failed, helpers, policy)


def phase1_serve(share: NodeShare, ordinal: int) -> tuple[FieldElement, ...]:
    """The helper's stored row-`ordinal` symbol of every stripe, verbatim.

    This is a pure copy of stored data; no field operation is applied,
    which is the uncoded-repair property.
    """
    if ordinal < 1 or (share.columns and ordinal > len(share.columns[0])):
        raise ParameterError(f"row ordinal {ordinal} out of range")
    return tuple(column[ordinal - 1] for column in share.columns)


def phase1_recover_row(received, helper_indices, params: CodeParams,
                       ordinal: int) -> tuple[FieldElement, ...]:
    """Recover message row `ordinal` of one stripe from k helper symbols."""
    received = tuple(received)
    helper_indices = tuple(helper_indices)
    if len(received) != params.k or len(set(helper_indices)) != params.k:
        raise ParameterError(f"need symbols from k={params.k} distinct helpers")
    if not 1 <= ordinal <= params.r:
        raise ParameterError(f"row ordinal {ordinal} out of range")
    inv = subset_inverse(params, helper_indices)
    vec = Matrix(params.spec, 1, params.k, received)
    return mat_mul(vec, inv).row(0)


def phase2_exchange(rows, failed, params: CodeParams):
    """All phase-2 symbols of one stripe.

    rows[i] is newcomer i+1's recovered message row; the result grid has
    grid[i][j] = rows[i] . g_{failed[j]}.  Newcomer i+1 keeps grid[i][i]
    and sends grid[i][j] to newcomer j+1 for j != i.
    """
    rows = [tuple(row) for row in rows]
    failed = tuple(sorted(failed))
    if len(rows) != len(failed):
        raise ParameterError("one recovered row per newcomer is required")
    cols = [generator_column(params, f) for f in failed]
    return tuple(tuple(dot(row, col) for col in cols) for row in rows)


def assemble_share(node_index: int, stripe_columns, original_length: int) -> NodeShare:
    """Build the regenerated share once all r symbols per stripe are present."""
    columns = tuple(tuple(col) for col in stripe_columns)
    if any(sym is None for col in columns for sym in col):
        raise ParameterError("missing symbol in regenerated column")
    widths = {len(col) for col in columns}
    if columns and len(widths) != 1:
        raise ParameterError("stripes disagree on column length")
    return NodeShare(node_index, columns, original_length)


def cooperative_repair(shares, failed, params: CodeParams,
                       policy: str = "lowest_index", seed: int = 0,
                       ) -> tuple[dict[int, NodeShare], BandwidthLedger]:
    """Regenerate the failed nodes from the surviving shares.

    shares maps alive node index -> NodeShare.  Returns the regenerated
    shares plus the ledger of every transfer.
    """
    plan = plan_repair(shares.keys(), failed, params, policy=policy, seed=seed)
    failed = plan.failed
    rprime = len(failed)
    sample = shares[plan.helpers[0][0]]
    stripes = sample.stripe_count
    original_length = sample.original_length
    ledger = BandwidthLedger()

    # Rows each newcomer must fetch itself: its own ordinal's row, plus any
    # row no newcomer is assigned when fewer than r nodes failed.
    extra_rows = tuple(range(rprime + 1, params.r + 1))

    # Phase 1: download, then invert per stripe.
    recovered: list[dict[int, tuple[FieldElement, ...]]] = []  # [ordinal-1][row] -> per-stripe rows
    for j, f in enumerate(failed, start=1):
        helper_ids = plan.helpers[j - 1]
        rows_for_j: dict[int, tuple[tuple[FieldElement, ...], ...]] = {}
        for row in (j,) + extra_rows:
            served = []
            for h in helper_ids:
                symbols = phase1_serve(shares[h], row)
                for s_i, sym in enumerate(symbols):
                    ledger.add(1, h, f, s_i, (sym,))
                served.append(symbols)
            rows_for_j[row] = tuple(
                phase1_recover_row([col[s_i] for col in served], helper_ids, params, row)
                for s_i in range(stripes)
            )
        recovered.append(rows_for_j)

    # Phase 2: exchange own-row contributions, fill self-computed rows.
    columns: list[list[list[FieldElement]]] = [
        [[None] * params.r for _ in range(stripes)] for _ in failed  # type: ignore[list-item]
    ]
    for s_i in range(stripes):
        grid = phase2_exchange(
            [recovered[j - 1][j][s_i] for j in range(1, rprime + 1)], failed, params
        )
        for i in range(rprime):
            for j in range(rprime):
                columns[j][s_i][i] = grid[i][j]
                if i != j:
                    ledger.add(2, failed[i], failed[j], s_i, (grid[i][j],))
        for j, f in enumerate(failed, start=1):
            g_f = generator_column(params, f)
            for row in extra_rows:
                columns[j - 1][s_i][row - 1] = dot(recovered[j - 1][row][s_i], g_f)

    regenerated = {
        f: assemble_share(f, columns[j], original_length)
        for j, f in enumerate(failed)
    }
    return regenerated, ledger


def individual_repair(failed_node: int, shares, params: CodeParams,
                      policy: str = "lowest_index", seed: int = 0,
                      ) -> tuple[NodeShare, BandwidthLedger]:
    """One-by-one repair: download k full columns, rebuild, re-encode."""
    plan = plan_repair(shares.keys(), [failed_node], params, policy=policy, seed=seed)
    helper_ids = plan.helpers[0]
    sample = shares[helper_ids[0]]
    ledger = BandwidthLedger()
    inv = subset_inverse(params, helper_ids)
    g_f = generator_column(params, failed_node)
    columns = []
    for s_i in range(sample.stripe_count):
        received = []
        for h in helper_ids:
            col = shares[h].columns[s_i]
            ledger.add(1, h, failed_node, s_i, col)
            received.append(col)
        grid = Matrix.from_rows(
            params.spec,
            [[received[c][row] for c in range(params.k)] for row in range(params.r)],
        )
        message = mat_mul(grid, inv)
        columns.append(tuple(dot(message.row(i), g_f) for i in range(params.r)))
    return NodeShare(failed_node, tuple(columns), sample.original_length), ledger
