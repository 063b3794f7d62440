"""Geographically spread crowd-sourced systems over overlapping coverage regions.

Agents 1..m each cover a region ("disk", of arbitrary shape); users may sit
in several disks at once. The census records, for every nonempty agent
subset S, how many users are covered by exactly the disks in S. Each agent's
effective size is its equal-split user mass: every user contributes 1/|S| to
each of the |S| disks covering it.

Two value functions are defined on agent coalitions: linear (rho times the
coalition's effective mass) and quadratic (rho times its square), plus
founder-gated variants where an infrastructure provider must be present for
any value to exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping

from fairshare.core import (
    Allocation,
    Coalition,
    CoalitionGame,
    Method,
    PlayerId,
    PlayerTag,
)

GeoVariant = Literal["lin", "met"]

# one user's placement: the ids of every disk covering it (empty = uncovered)
UserPlacement = Iterable[int]

_VARIANTS = ("lin", "met")


def _check_variant(variant: str) -> None:
    if variant not in _VARIANTS:
        raise ValueError(f"variant must be one of {_VARIANTS}, got {variant!r}")


@dataclass(frozen=True)
class DiskCensus:
    """Exclusive-overlap user counts: counts[S] users sit in exactly disks S.

    Sparse: absent subsets mean zero users. Keys are frozensets of 1-based
    agent ids. Users covered by no disk are excluded from the counts but
    tallied in `uncovered_users`.
    """

    num_agents: int
    counts: Mapping[frozenset[int], int] = field(default_factory=dict)
    uncovered_users: int = 0

    def __post_init__(self) -> None:
        if self.num_agents < 1:
            raise ValueError(f"need at least one agent, got {self.num_agents}")
        if self.uncovered_users < 0:
            raise ValueError("uncovered user count cannot be negative")
        clean: dict[frozenset[int], int] = {}
        for key, count in self.counts.items():
            subset = frozenset(int(i) for i in key)
            if not subset:
                raise ValueError("census keys must be nonempty agent subsets")
            for i in subset:
                if not 1 <= i <= self.num_agents:
                    raise ValueError(
                        f"agent id {i} outside 1..{self.num_agents} in census key")
            if count < 0:
                raise ValueError(f"negative user count for {sorted(subset)}")
            if count:
                clean[subset] = clean.get(subset, 0) + int(count)
        object.__setattr__(self, "counts", clean)

    @property
    def total_users(self) -> int:
        return sum(self.counts.values())


def region_census(placements: Iterable[UserPlacement], num_agents: int) -> DiskCensus:
    """Tally users by the exact set of disks covering them.

    Users covered by no disk are dropped from the counts and reported via
    `uncovered_users`.
    """
    counts: dict[frozenset[int], int] = {}
    uncovered = 0
    for placement in placements:
        subset = frozenset(int(i) for i in placement)
        for i in subset:
            if not 1 <= i <= num_agents:
                raise ValueError(f"disk id {i} outside 1..{num_agents}")
        if not subset:
            uncovered += 1
            continue
        counts[subset] = counts.get(subset, 0) + 1
    return DiskCensus(num_agents, counts, uncovered)


def effective_size(census: DiskCensus, agent: int) -> float:
    """Equal-split user mass of one agent: sum of d_S / |S| over S containing it."""
    if not 1 <= agent <= census.num_agents:
        raise ValueError(f"agent id {agent} outside 1..{census.num_agents}")
    return math.fsum(count / len(subset)
                     for subset, count in census.counts.items() if agent in subset)


def effective_sizes(census: DiskCensus) -> tuple[float, ...]:
    return tuple(effective_size(census, i) for i in range(1, census.num_agents + 1))


def _agent_set(census: DiskCensus, agents: Iterable[int]) -> tuple[int, ...]:
    out = []
    for i in agents:
        i = int(i)
        if not 1 <= i <= census.num_agents:
            raise ValueError(f"agent id {i} outside 1..{census.num_agents}")
        out.append(i)
    if len(set(out)) != len(out):
        raise ValueError("duplicate agent ids in coalition")
    return tuple(out)


def nu_lin(census: DiskCensus, agents: Iterable[int], rho: float) -> float:
    """Linear coalition value: rho times the coalition's effective user mass."""
    members = _agent_set(census, agents)
    return rho * math.fsum(effective_size(census, i) for i in members)


def nu_met(census: DiskCensus, agents: Iterable[int], rho: float) -> float:
    """Quadratic coalition value: rho times the squared effective user mass."""
    if rho <= 0:
        raise ValueError(f"value scale must be positive, got {rho}")
    members = _agent_set(census, agents)
    mass = math.fsum(effective_size(census, i) for i in members)
    return rho * mass * mass


def _agent_players(census: DiskCensus, offset: int = 0) -> list[PlayerId]:
    return [PlayerId(i - 1 + offset, PlayerTag.CSS_VERTEX, str(i))
            for i in range(1, census.num_agents + 1)]


def geo_game(census: DiskCensus, rho: float, variant: GeoVariant) -> CoalitionGame:
    """Agent-only game (player i-1 is agent i) for the exact engine."""
    _check_variant(variant)
    if variant == "met" and rho <= 0:
        raise ValueError(f"value scale must be positive, got {rho}")
    sizes = effective_sizes(census)

    def value(s: Coalition) -> float:
        mass = math.fsum(sizes[i] for i in s.members())
        return rho * mass * mass if variant == "met" else rho * mass

    return CoalitionGame(census.num_agents, value, f"geo {variant}",
                         tuple(_agent_players(census)))


def geo_shapley(census: DiskCensus, rho: float, variant: GeoVariant) -> Allocation:
    """Closed-form agent payoffs: rho * n_i (linear), rho * n_i * total (quadratic).

    The quadratic case is the complete-agreement-graph network game over the
    effective sizes, hence each agent earns its size times the total mass.
    """
    _check_variant(variant)
    sizes = effective_sizes(census)
    total = math.fsum(sizes)
    if variant == "lin":
        payoffs = tuple(rho * n for n in sizes)
        grand = rho * total
    else:
        if rho <= 0:
            raise ValueError(f"value scale must be positive, got {rho}")
        payoffs = tuple(rho * n * total for n in sizes)
        grand = rho * total * total
    return Allocation(payoffs, grand, Method.CLOSED_FORM)


# --- founder-augmented variants ----------------------------------------------

def geo_founder_value(census: DiskCensus, rho: float, variant: GeoVariant,
                      s: Coalition) -> float:
    """Founder-gated value: zero without player 0, else the agent-only value.

    Player 0 is the founder; player i >= 1 is agent i.
    """
    _check_variant(variant)
    if int(s) >> (census.num_agents + 1):
        raise ValueError("coalition contains players outside the founder roster")
    if 0 not in s:
        return 0.0
    agents = [p for p in s.members() if p > 0]
    return (nu_met if variant == "met" else nu_lin)(census, agents, rho)


def geo_founder_game(census: DiskCensus, rho: float,
                     variant: GeoVariant) -> CoalitionGame:
    _check_variant(variant)
    if variant == "met" and rho <= 0:
        raise ValueError(f"value scale must be positive, got {rho}")
    players = (PlayerId(0, PlayerTag.FOUNDER, "g"),) + tuple(_agent_players(census, 1))
    return CoalitionGame(census.num_agents + 1,
                         lambda s: geo_founder_value(census, rho, variant, s),
                         f"geo founder {variant}", players)


def geo_founder_shapley(census: DiskCensus, rho: float,
                        variant: GeoVariant) -> Allocation:
    """Closed-form founder-augmented payoffs (founder first, then agents).

    Linear: the founder takes half the total mass, each agent half its own.
    Quadratic: the founder takes rho * (total^2/3 + sum n_i^2 / 6) and agent
    i takes rho * (2 total n_i / 3 - n_i^2 / 6); exactly the work-weighted
    closed form with the effective sizes as work units.
    """
    _check_variant(variant)
    sizes = effective_sizes(census)
    total = math.fsum(sizes)
    if variant == "lin":
        founder = rho * total / 2
        agents = tuple(rho * n / 2 for n in sizes)
        grand = rho * total
    else:
        if rho <= 0:
            raise ValueError(f"value scale must be positive, got {rho}")
        sq = math.fsum(n * n for n in sizes)
        founder = rho * (total * total / 3 + sq / 6)
        agents = tuple(rho * (2 * total * n / 3 - n * n / 6) for n in sizes)
        grand = rho * total * total
    return Allocation((founder,) + agents, grand, Method.CLOSED_FORM)
