"""Repair-bandwidth lower bound from staged min-cuts, as an exact LP.

For a data collector reading k nodes, a cut type is a k-tuple
(l_1, ..., l_k) with sum k and 0 <= l_i <= r, grouping the k nodes by
the repair batch that last regenerated them.  The cut capacity is

    sum_i  l_i * min(alpha, (d - sum_{j<i} l_j) * beta1 + (r - l_i) * beta2)

and every cut type caps the file size B.  Minimizing the per-newcomer
repair bandwidth gamma = d*beta1 + (r-1)*beta2 subject to those caps is
a two-variable linear program once each min is expanded over the subset
of positions where the download term (rather than alpha) is picked: the
sum of mins equals the minimum of the 2^k mixed sums, so requiring every
mixed sum to reach B is exactly the capacity constraint.

Everything is computed in exact rationals; the LP is solved by
enumerating vertices of the constraint arrangement, which is sound in
two variables.  Zero entries contribute nothing to a cut's value and do
not shift the partial sums, so tuples differing only in the placement of
zeros are interchangeable; the canonical enumeration keeps the
representative with all zeros trailing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction


class InfeasibleAlphaError(ValueError):
    """Storage per node too small to ever deliver the file (alpha < B/k)."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class BoundParams:
    """Dimensions and operating point for the bound computation.

    beta1/beta2 are only needed by cut_value; gamma_star treats them as
    the LP unknowns.  n is only needed by flow-graph construction.
    """

    k: int
    d: int
    r: int
    B: Fraction
    alpha: Fraction
    beta1: Fraction | None = None
    beta2: Fraction | None = None
    n: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "B", _frac(self.B))
        object.__setattr__(self, "alpha", _frac(self.alpha))
        if self.beta1 is not None:
            object.__setattr__(self, "beta1", _frac(self.beta1))
        if self.beta2 is not None:
            object.__setattr__(self, "beta2", _frac(self.beta2))
        if self.k < 1 or self.r < 1:
            raise ValueError("k and r must be positive")
        if self.d < self.k:
            raise ValueError("bound requires d >= k")
        if self.B < 0 or self.alpha < 0:
            raise ValueError("B and alpha must be non-negative")
        for b in (self.beta1, self.beta2):
            if b is not None and b < 0:
                raise ValueError("beta values must be non-negative")
        if self.n is not None and self.n < self.k + self.r:
            raise ValueError("need n >= k + r nodes")


@dataclass(frozen=True)
class TradeoffPoint:
    alpha: Fraction
    gamma_star: Fraction
    beta1: Fraction
    beta2: Fraction


def enumerate_cut_types(k: int, r: int, canonical: bool = False) -> list[tuple[int, ...]]:
    """All k-tuples summing to k with entries in [0, r], lexicographic.

    With canonical=True, tuples with a zero before a nonzero entry are
    dropped: their value always equals that of the representative with
    the same nonzero entries shifted left (zeros are inert in the cut
    expression), so only tuples with all zeros trailing remain.
    """
    if k < 1 or r < 1:
        raise ValueError("k and r must be positive")
    out = []
    for t in itertools.product(range(min(k, r) + 1), repeat=k):
        if sum(t) != k:
            continue
        if canonical:
            seen_zero = False
            ok = True
            for x in t:
                if x == 0:
                    seen_zero = True
                elif seen_zero:
                    ok = False
                    break
            if not ok:
                continue
        out.append(t)
    return out


def _validate_tuple(t, k: int, r: int) -> None:
    if sum(t) != k or any(not (0 <= x <= r) for x in t):
        raise ValueError(f"{t} is not a cut type for k={k}, r={r}")


def cut_value(t, p: BoundParams) -> Fraction:
    """Exact capacity of a cut of type t at the given operating point."""
    if p.beta1 is None or p.beta2 is None:
        raise ValueError("cut_value needs beta1 and beta2")
    _validate_tuple(t, p.k, p.r)
    total = Fraction(0)
    prior = 0
    for li in t:
        if li:
            c = (p.d - prior) * p.beta1 + (p.r - li) * p.beta2
            total += li * min(p.alpha, c)
        prior += li
    return total


def _lp_constraints(p: BoundParams) -> list[tuple[Fraction, Fraction, Fraction]]:
    """Half-planes A*beta1 + C*beta2 >= rhs from every (tuple, subset).

    Positions with l_i = 0 are skipped: including them in either side of
    the expansion adds zero.  Constraints with rhs <= 0 hold for all
    non-negative beta and are dropped; for equal (A, C) only the largest
    rhs is kept.
    """
    best: dict[tuple[Fraction, Fraction], Fraction] = {}
    for t in enumerate_cut_types(p.k, p.r, canonical=True):
        terms = []
        prior = 0
        for li in t:
            if li:
                terms.append(
                    (Fraction(li * (p.d - prior)), Fraction(li * (p.r - li)), li * p.alpha)
                )
            prior += li
        for picks in itertools.product((False, True), repeat=len(terms)):
            a = Fraction(0)
            c = Fraction(0)
            rhs = p.B
            for (ai, ci, stored), pick in zip(terms, picks):
                if pick:
                    a += ai
                    c += ci
                else:
                    rhs -= stored
            if rhs <= 0:
                continue
            key = (a, c)
            if key not in best or best[key] < rhs:
                best[key] = rhs
    return [(a, c, rhs) for (a, c), rhs in best.items()]


def gamma_star(p: BoundParams) -> TradeoffPoint:
    """Minimum gamma = d*beta1 + (r-1)*beta2 subject to every cut cap.

    Solved by exact vertex enumeration over the two-variable constraint
    arrangement (pairwise intersections plus axis intersections).  Ties
    are broken toward the smallest (beta1, beta2).
    """
    if p.k * p.alpha < p.B:
        raise InfeasibleAlphaError(
            f"alpha={p.alpha} cannot deliver B={p.B} through k={p.k} nodes"
        )
    cons = _lp_constraints(p)
    zero = Fraction(0)
    candidates = {(zero, zero)}
    for a, c, rhs in cons:
        if a:
            candidates.add((rhs / a, zero))
        if c:
            candidates.add((zero, rhs / c))
    for (a1, c1, r1), (a2, c2, r2) in itertools.combinations(cons, 2):
        det = a1 * c2 - a2 * c1
        if det == 0:
            continue
        x = (r1 * c2 - r2 * c1) / det
        y = (a1 * r2 - a2 * r1) / det
        if x >= 0 and y >= 0:
            candidates.add((x, y))
    feasible = [
        (x, y)
        for x, y in candidates
        if x >= 0 and y >= 0 and all(a * x + c * y >= rhs for a, c, rhs in cons)
    ]
    if not feasible:
        raise AssertionError("LP unexpectedly infeasible for alpha >= B/k")
    obj = lambda v: p.d * v[0] + (p.r - 1) * v[1]
    b1, b2 = min(feasible, key=lambda v: (obj(v), v[0], v[1]))
    return TradeoffPoint(p.alpha, obj((b1, b2)), b1, b2)


def msr_closed_form(p: BoundParams) -> Fraction:
    """Cooperative bandwidth at minimum storage: B(d+r-1) / (k(d+r-k))."""
    return p.B * (p.d + p.r - 1) / (p.k * (p.d + p.r - p.k))


def non_coop_msr(p: BoundParams) -> Fraction:
    """One-by-one minimum-storage bandwidth: B*d / (k(d-k+1))."""
    return p.B * p.d / (p.k * (p.d - p.k + 1))


def tradeoff_curve(p: BoundParams, alphas) -> list[TradeoffPoint]:
    alphas = [_frac(a) for a in alphas]
    floor = p.B / p.k
    bad = [a for a in alphas if a < floor]
    if bad:
        raise InfeasibleAlphaError(f"grid entries below B/k={floor}: {bad}")
    return [
        gamma_star(BoundParams(k=p.k, d=p.d, r=p.r, B=p.B, alpha=a, n=p.n))
        for a in alphas
    ]


def curve_csv(points) -> str:
    """CSV with exact rationals plus a float rendering for plotting."""
    lines = ["alpha,gamma_star,beta1,beta2,gamma_star_float"]
    for tp in points:
        lines.append(
            f"{tp.alpha},{tp.gamma_star},{tp.beta1},{tp.beta2},{float(tp.gamma_star):.6f}"
        )
    return "\n".join(lines) + "\n"
