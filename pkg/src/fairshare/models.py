"""Single crowd-sourced-system value models and their closed-form allocations.

All three models put one founder (player 0) alongside n crowd members
(players 1..n). Coalitions without the founder are worth nothing; with it,
value grows as a power of the crowd present: revenue `rho * m^k`, optionally
work-weighted, optionally net of per-member costs.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import cycle, islice
from typing import Iterable, Sequence

from fairshare.core import (
    Allocation,
    Coalition,
    CoalitionGame,
    Method,
    PlayerId,
    PlayerTag,
)

FOUNDER_INDEX = 0


def founder_present(s: Coalition) -> bool:
    return int(s) & 1 == 1


def crowd_count(s: Coalition) -> int:
    """Number of crowd members in a coalition (the founder bit excluded)."""
    return (int(s) >> 1).bit_count()


def power_sum(n: int, k: int) -> int:
    """Sum of s^k for s = 0..n, accumulated in exact integer arithmetic."""
    return sum(s ** k for s in range(n + 1))


def _css_players(n: int) -> tuple[PlayerId, ...]:
    return (PlayerId(0, PlayerTag.FOUNDER, "g"),) + tuple(
        PlayerId(i, PlayerTag.CROWD, f"u{i}") for i in range(1, n + 1))


@dataclass(frozen=True)
class SingleCssParams:
    """Identical-crowd revenue model: a founder-gated coalition of m crowd
    members is worth rho * m^k (k=2 is the Metcalfe case)."""

    n: int
    k: int
    rho: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"crowd size must be >= 1, got {self.n}")
        if self.k < 1 or not isinstance(self.k, int):
            raise ValueError(f"exponent must be an integer >= 1, got {self.k}")
        if self.rho <= 0:
            raise ValueError(f"value scale must be positive, got {self.rho}")


@dataclass(frozen=True)
class WeightedCssParams:
    """Work-weighted revenue model: coalition worth rho * (sum of member
    weight^alpha)^k. The closed form is only available for k=2."""

    weights: tuple[float, ...]
    alpha: float = 1.0
    rho: float = 1.0
    k: int = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.weights) < 1:
            raise ValueError("need at least one crowd member weight")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if not any(w > 0 for w in self.weights):
            raise ValueError("at least one weight must be positive")
        if self.alpha <= 0:
            raise ValueError(f"work exponent must be positive, got {self.alpha}")
        if self.rho <= 0:
            raise ValueError(f"value scale must be positive, got {self.rho}")
        if self.k < 1 or not isinstance(self.k, int):
            raise ValueError(f"exponent must be an integer >= 1, got {self.k}")

    @property
    def n(self) -> int:
        return len(self.weights)

    def work_units(self) -> tuple[float, ...]:
        """Per-member weight^alpha terms entering the coalition sum."""
        return tuple(w ** self.alpha for w in self.weights)

    def work_shares(self) -> tuple[float, ...]:
        units = self.work_units()
        total = math.fsum(units)
        return tuple(u / total for u in units)


@dataclass(frozen=True)
class ProfitCssParams:
    """Profit model: revenue rho * m^k minus per-member costs, where the
    founder pays founder_cost and each member pays member_cost per head.
    The grand-coalition profit may be negative; reports flag that case."""

    n: int
    k: int
    rho: float = 1.0
    founder_cost: float = 0.0
    member_cost: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"crowd size must be >= 1, got {self.n}")
        if self.k < 1 or not isinstance(self.k, int):
            raise ValueError(f"exponent must be an integer >= 1, got {self.k}")
        if self.rho <= 0:
            raise ValueError(f"value scale must be positive, got {self.rho}")
        if self.founder_cost < 0 or self.member_cost < 0:
            raise ValueError("costs must be nonnegative")


@dataclass(frozen=True)
class ShareReport:
    """Founder/crowd division of a single-CSS game, with share diagnostics.

    Shares and the founder-to-crowd ratio are suppressed (None, degenerate
    flag set) when the grand value is not positive, where fractions of the
    total would mislead. `asymptotic_founder_share` carries the model's
    limiting share diagnostic.
    """

    founder_payoff: float
    member_payoffs: tuple[float, ...]
    grand_value: float
    degenerate: bool
    founder_share: float | None
    crowd_share: float | None
    founder_to_crowd_ratio: float | None
    asymptotic_founder_share: float | None

    @property
    def n(self) -> int:
        return len(self.member_payoffs)

    @property
    def crowd_payoff(self) -> float:
        return math.fsum(self.member_payoffs)

    def as_allocation(self) -> Allocation:
        return Allocation((self.founder_payoff,) + self.member_payoffs,
                          self.grand_value, Method.CLOSED_FORM)


def _share_report(founder_payoff: float, member_payoffs: Sequence[float],
                  grand_value: float, asymptote: float | None) -> ShareReport:
    degenerate = grand_value <= 0.0
    if degenerate:
        founder_share = crowd_share = None
    else:
        founder_share = founder_payoff / grand_value
        crowd_share = 1.0 - founder_share
    crowd_total = math.fsum(member_payoffs)
    ratio = founder_payoff / crowd_total if crowd_total != 0.0 else None
    return ShareReport(founder_payoff, tuple(member_payoffs), grand_value,
                       degenerate, founder_share, crowd_share, ratio, asymptote)


# --- identical-crowd revenue model -----------------------------------------

def value_single(params: SingleCssParams, s: Coalition) -> float:
    if not founder_present(s):
        return 0.0
    return params.rho * crowd_count(s) ** params.k


def single_game(params: SingleCssParams) -> CoalitionGame:
    return CoalitionGame(
        params.n + 1, lambda s: value_single(params, s),
        f"single CSS (n={params.n}, k={params.k}, rho={params.rho})",
        _css_players(params.n))


def closed_single(params: SingleCssParams) -> ShareReport:
    """Exact founder/member payoffs of the identical-crowd revenue game.

    The founder averages rho * s^k over crowd counts s = 0..n; members split
    the remainder equally. The limiting founder share is 1/(k+1).
    """
    n, k, rho = params.n, params.k, params.rho
    founder = rho * (power_sum(n, k) / (n + 1))
    grand = rho * float(n ** k)
    member = (grand - founder) / n
    return _share_report(founder, (member,) * n, grand, 1.0 / (k + 1))


# --- work-weighted revenue model --------------------------------------------

def value_weighted(params: WeightedCssParams, s: Coalition) -> float:
    if not founder_present(s):
        return 0.0
    units = params.work_units()
    total = math.fsum(units[i - 1] for i in s.members() if i > 0)
    return params.rho * total ** params.k


def weighted_game(params: WeightedCssParams) -> CoalitionGame:
    return CoalitionGame(
        params.n + 1, lambda s: value_weighted(params, s),
        f"weighted CSS (n={params.n}, alpha={params.alpha}, rho={params.rho})",
        _css_players(params.n))


def cross_term_weight(n: int) -> Fraction:
    """Exact pair coupling sum(s(s-1), s=2..n) / ((n+1) n (n-1)) for n >= 2.

    Evaluates to exactly 1/3 for every n, which is what makes the quadratic
    closed form below exact at finite n rather than only in the limit.
    """
    if n < 2:
        raise ValueError("pair coupling needs at least two crowd members")
    return Fraction(sum(s * (s - 1) for s in range(2, n + 1)),
                    (n + 1) * n * (n - 1))


def closed_weighted(params: WeightedCssParams) -> ShareReport:
    """Exact per-member payoffs of the quadratic work-weighted game.

    Member i earns rho * (u_i^2 / 2 + 2c * u_i * (T - u_i)) where u_i is its
    work unit, T the total, and c the exact pair coupling (identically 1/3).
    The founder keeps the remainder of rho * T^2. Limiting founder share is
    1/3 + sum(f_i^2)/6 over work shares f_i.
    """
    if params.k != 2:
        raise ValueError(
            f"closed form requires k=2, got k={params.k}; use the exact engine")
    units = params.work_units()
    n = len(units)
    total = math.fsum(units)
    coupling = float(2 * cross_term_weight(n)) if n >= 2 else 0.0
    members = tuple(
        params.rho * (u * u / 2.0 + coupling * u * (total - u)) for u in units)
    grand = params.rho * total * total
    founder = grand - math.fsum(members)
    shares = params.work_shares()
    asymptote = 1.0 / 3.0 + math.fsum(f * f for f in shares) / 6.0
    return _share_report(founder, members, grand, asymptote)


# --- profit model ------------------------------------------------------------

def value_profit(params: ProfitCssParams, s: Coalition) -> float:
    if not founder_present(s):
        return 0.0
    m = crowd_count(s)
    return (params.rho * m ** params.k
            - (params.founder_cost + params.member_cost) * m)


def profit_game(params: ProfitCssParams) -> CoalitionGame:
    return CoalitionGame(
        params.n + 1, lambda s: value_profit(params, s),
        f"profit CSS (n={params.n}, k={params.k})",
        _css_players(params.n))


def closed_profit(params: ProfitCssParams) -> ShareReport:
    """Exact founder/member payoffs of the profit game.

    Linearity splits the game into the revenue part and a linear cost part,
    so the founder gets rho * powersum/(n+1) minus half the total cost.
    The asymptote diagnostic is the large-n share approximation
    (rho n^k/(k+1) - cost n/2) / (rho n^k - cost n), undefined when the
    denominator is not positive.
    """
    n, k, rho = params.n, params.k, params.rho
    cost = params.founder_cost + params.member_cost
    founder = (rho * power_sum(n, k) - cost * (n * (n + 1) / 2)) / (n + 1)
    grand = rho * float(n ** k) - cost * n
    member = (grand - founder) / n
    approx_denom = rho * float(n ** k) - cost * n
    if approx_denom > 0:
        asymptote = (rho * float(n ** k) / (k + 1) - cost * n / 2) / approx_denom
    else:
        asymptote = None
    return _share_report(founder, (member,) * n, grand, asymptote)


# --- convergence sweeps -------------------------------------------------------

CssParams = SingleCssParams | WeightedCssParams | ProfitCssParams


@dataclass(frozen=True)
class SweepRow:
    n: int
    report: ShareReport

    @property
    def asymptote_gap(self) -> float | None:
        if self.report.founder_share is None or \
                self.report.asymptotic_founder_share is None:
            return None
        return abs(self.report.founder_share - self.report.asymptotic_founder_share)


@dataclass(frozen=True)
class SweepTable:
    label: str
    rows: tuple[SweepRow, ...]

    def gaps_monotone(self) -> bool | None:
        """Whether the distance to the asymptote is nonincreasing in n.

        Reported, never assumed; None when any row lacks a defined gap.
        """
        gaps = [row.asymptote_gap for row in self.rows]
        if any(g is None for g in gaps):
            return None
        return all(a >= b - 1e-12 for a, b in zip(gaps, gaps[1:]))


def _resize(params: CssParams, n: int) -> CssParams:
    if isinstance(params, (SingleCssParams, ProfitCssParams)):
        return dataclasses.replace(params, n=n)
    # weighted: repeat the weight pattern cyclically up to the requested size,
    # so a uniform base stays uniform at every n
    return dataclasses.replace(params, weights=tuple(islice(cycle(params.weights), n)))


def _closed(params: CssParams) -> ShareReport:
    if isinstance(params, SingleCssParams):
        return closed_single(params)
    if isinstance(params, WeightedCssParams):
        return closed_weighted(params)
    return closed_profit(params)


def share_sweep(params: CssParams, n_values: Iterable[int]) -> SweepTable:
    """Closed-form share reports across crowd sizes, for limit diagnostics."""
    sizes = list(n_values)
    if not sizes:
        raise ValueError("n_values must be nonempty")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("n_values must be strictly ascending")
    if any(n < 1 for n in sizes):
        raise ValueError("crowd sizes must be >= 1")
    rows = tuple(SweepRow(n, _closed(_resize(params, n))) for n in sizes)
    return SweepTable(type(params).__name__, rows)
