"""Coalition games, the exact Shapley engine, and fairness-axiom checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable

import numpy as np

DEFAULT_EXACT_CAP = 22      # 2^22 coalition evaluations, seconds-scale
DEFAULT_STRUCTURE_CAP = 14  # exhaustive pair scans are O(n^2 * 2^n)
MAX_PLAYERS = 64            # coalitions are fixed-width bit masks

ORACLE_CAP = 9              # n! join orders; anything larger is impractical


class RosterTooLargeError(ValueError):
    """A roster exceeds the cap of an exhaustive computation."""


class DegenerateCrowdError(ValueError):
    """Founder-only game: a per-crowd-member payoff is undefined."""


class PlayerTag(Enum):
    FOUNDER = "founder"
    CROWD = "crowd"
    CSS_VERTEX = "css_vertex"


@dataclass(frozen=True)
class PlayerId:
    """A player's dense index plus a tag and display name for reporting."""

    index: int
    tag: PlayerTag = PlayerTag.CROWD
    name: str = ""

    def display_name(self) -> str:
        return self.name or str(self.index)


class Coalition(int):
    """A set of player indices packed into an int: player i <-> bit i."""

    __slots__ = ()

    @classmethod
    def from_members(cls, members: Iterable[int]) -> "Coalition":
        mask = 0
        for i in members:
            i = int(i)
            if not 0 <= i < MAX_PLAYERS:
                raise ValueError(f"player index out of range [0, {MAX_PLAYERS}): {i}")
            mask |= 1 << i
        return cls(mask)

    @property
    def size(self) -> int:
        return int(self).bit_count()

    def members(self) -> tuple[int, ...]:
        mask = int(self)
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return tuple(out)

    def __contains__(self, player: int) -> bool:
        return (self >> player) & 1 == 1

    def add(self, player: int) -> "Coalition":
        return Coalition(self | (1 << player))

    def remove(self, player: int) -> "Coalition":
        return Coalition(self & ~(1 << player))

    def __repr__(self) -> str:
        return f"Coalition({{{', '.join(map(str, self.members()))}}})"


EMPTY_COALITION = Coalition(0)


@dataclass(frozen=True)
class CoalitionGame:
    """A roster plus a characteristic function mapping coalitions to value.

    The characteristic function must be pure: the same coalition always maps
    to the same value, independent of evaluation order, so results never
    depend on how the engine happens to enumerate coalitions.
    """

    n_players: int
    value: Callable[[Coalition], float]
    label: str = ""
    players: tuple[PlayerId, ...] = ()

    def __post_init__(self) -> None:
        if self.n_players < 1:
            raise ValueError(f"a game needs at least one player, got {self.n_players}")
        if self.n_players > MAX_PLAYERS:
            raise ValueError(
                f"at most {MAX_PLAYERS} players are supported, got {self.n_players}")
        if self.players:
            if len(self.players) != self.n_players:
                raise ValueError("player roster length does not match n_players")
            if sorted(p.index for p in self.players) != list(range(self.n_players)):
                raise ValueError("player indices must be dense and unique")
        else:
            object.__setattr__(
                self, "players",
                tuple(PlayerId(i) for i in range(self.n_players)))

    @property
    def grand_coalition(self) -> Coalition:
        return Coalition((1 << self.n_players) - 1)


class Method(Enum):
    EXACT = "exact"
    ANONYMOUS = "anonymous"
    CLOSED_FORM = "closed_form"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class Allocation:
    """Per-player payoffs plus the grand-coalition value they divide.

    Every allocator in this package distributes the grand value exactly
    (up to float noise); that efficiency property is asserted by tests and
    `check_axioms` rather than at construction, so deliberately broken
    allocations can still be built and examined.
    """

    payoffs: tuple[float, ...]
    grand_value: float
    method: Method
    stderr: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.method is Method.SAMPLED:
            if self.stderr is None or len(self.stderr) != len(self.payoffs):
                raise ValueError("sampled allocations need one stderr per player")
        elif self.stderr is not None:
            raise ValueError(f"stderr only applies to sampled allocations, not {self.method}")

    @property
    def n_players(self) -> int:
        return len(self.payoffs)

    def total(self) -> float:
        return math.fsum(self.payoffs)

    def shares(self) -> tuple[float, ...] | None:
        """Payoffs as fractions of the grand value; None when it is not positive."""
        if self.grand_value <= 0.0:
            return None
        return tuple(p / self.grand_value for p in self.payoffs)


def marginal_value(game: CoalitionGame, coalition: Coalition, player: int) -> float:
    """Value added by `player` when joining `coalition`."""
    if not 0 <= player < game.n_players:
        raise ValueError(f"player {player} outside roster of {game.n_players}")
    if int(coalition) & ~int(game.grand_coalition):
        raise ValueError("coalition contains players outside the roster")
    if player in coalition:
        raise ValueError(f"player {player} is already in the coalition")
    return game.value(coalition.add(player)) - game.value(Coalition(coalition))


def coalition_value_table(game: CoalitionGame, *, cap: int = DEFAULT_EXACT_CAP) -> np.ndarray:
    """Characteristic function evaluated on all 2^n coalitions, indexed by mask."""
    n = game.n_players
    if n > cap:
        raise RosterTooLargeError(
            f"full coalition table needs 2^{n} evaluations, above the cap of {cap} players")
    size = 1 << n
    value = game.value
    return np.fromiter((value(Coalition(m)) for m in range(size)),
                       dtype=np.float64, count=size)


def shapley_exact(game: CoalitionGame, *, cap: int | None = None) -> Allocation:
    """Exact Shapley payoffs via the subset-weighted sum.

    Player i receives sum over coalitions S not containing i of
    |S|! (n-|S|-1)! / n! times the marginal value of joining S.
    """
    cap = DEFAULT_EXACT_CAP if cap is None else cap
    n = game.n_players
    if n > cap:
        raise RosterTooLargeError(
            f"exact engine capped at {cap} players, got {n}; "
            "use shapley_sample for larger rosters")
    values = coalition_value_table(game, cap=cap)
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = np.bitwise_count(masks).astype(np.intp)
    # 1 / (n * C(n-1, s)) equals s! (n-s-1)! / n!
    weights = np.array([1.0 / (n * math.comb(n - 1, s)) for s in range(n)])
    payoffs = []
    for i in range(n):
        bit = np.int64(1 << i)
        without = masks[(masks & bit) == 0]
        gains = values[without | bit] - values[without]
        payoffs.append(float(np.sum(weights[sizes[without]] * gains)))
    return Allocation(tuple(payoffs), float(values[-1]), Method.EXACT)


def shapley_permutation_average(game: CoalitionGame, *, cap: int = ORACLE_CAP) -> Allocation:
    """Exact Shapley payoffs by enumerating all n! join orders.

    Independent cross-check for `shapley_exact`; factorially slower, so the
    cap is tight.
    """
    n = game.n_players
    if n > cap:
        raise RosterTooLargeError(
            f"permutation average enumerates {n}! orders, capped at {cap} players")
    values = coalition_value_table(game, cap=max(cap, n))
    totals = [0.0] * n
    for perm in itertools.permutations(range(n)):
        mask = 0
        prev = values[0]
        for p in perm:
            mask |= 1 << p
            cur = values[mask]
            totals[p] += cur - prev
            prev = cur
    n_orders = math.factorial(n)
    payoffs = tuple(t / n_orders for t in totals)
    return Allocation(payoffs, float(values[-1]), Method.EXACT)


def anonymous_game(crowd_value: Callable[[int], float], n: int,
                   label: str = "") -> CoalitionGame:
    """Founder-gated game whose value depends only on the crowd head count.

    Player 0 is the founder; a coalition without it is worth zero, one with
    it and s crowd members is worth crowd_value(s).
    """
    if n < 1:
        raise DegenerateCrowdError(f"need at least one crowd member, got n={n}")
    players = (PlayerId(0, PlayerTag.FOUNDER, "g"),) + tuple(
        PlayerId(i, PlayerTag.CROWD, f"u{i}") for i in range(1, n + 1))

    def value(s: Coalition) -> float:
        if 0 not in s:
            return 0.0
        return float(crowd_value(s.size - 1))

    return CoalitionGame(n + 1, value, label or "anonymous crowd game", players)


def shapley_anonymous(crowd_value: Callable[[int], float], n: int) -> tuple[float, float]:
    """Closed-form (founder, per-member) payoffs for crowd-count games.

    founder = average of crowd_value(s) over s = 0..n,
    member  = (crowd_value(n) - founder) / n.
    Matches `shapley_exact` on the induced (n+1)-player game.
    """
    if n < 0:
        raise ValueError(f"crowd size must be nonnegative, got {n}")
    if n == 0:
        raise DegenerateCrowdError(
            "no crowd members: the founder takes crowd_value(0) and the "
            "per-member payoff is undefined")
    levels = [float(crowd_value(s)) for s in range(n + 1)]
    if not all(math.isfinite(v) for v in levels):
        raise ValueError("crowd_value must be finite on 0..n")
    founder = math.fsum(levels) / (n + 1)
    member = (levels[n] - founder) / n
    return founder, member


def shapley_sample(game: CoalitionGame, n_permutations: int, seed: int = 0) -> Allocation:
    """Monte Carlo Shapley estimate from uniform random join orders.

    Unbiased and deterministic for a fixed seed. Standard errors are the
    sample standard deviation of each player's observed marginals divided
    by sqrt(n_permutations) (zero when only one permutation is drawn).
    """
    if n_permutations < 1:
        raise ValueError(f"need at least one permutation, got {n_permutations}")
    n = game.n_players
    value = game.value
    rng = np.random.default_rng(seed)
    sums = [0.0] * n
    sumsq = [0.0] * n
    empty = value(EMPTY_COALITION)
    for _ in range(n_permutations):
        mask = 0
        prev = empty
        for p in rng.permutation(n).tolist():
            mask |= 1 << p
            cur = value(Coalition(mask))
            gain = cur - prev
            sums[p] += gain
            sumsq[p] += gain * gain
            prev = cur
    payoffs = tuple(s / n_permutations for s in sums)
    if n_permutations == 1:
        stderr = (0.0,) * n
    else:
        stderr = tuple(
            math.sqrt(max(0.0, (sq - n_permutations * m * m) / (n_permutations - 1))
                      / n_permutations)
            for sq, m in zip(sumsq, payoffs))
    grand = value(game.grand_coalition)
    return Allocation(payoffs, grand, Method.SAMPLED, stderr)


@dataclass(frozen=True)
class AxiomReport:
    """Pass/fail record for the efficiency, null-player, and symmetry axioms."""

    efficiency_ok: bool
    efficiency_gap: float
    null_players: tuple[int, ...]
    null_ok: bool
    symmetric_pairs: tuple[tuple[int, int], ...]
    symmetry_ok: bool
    exhaustive: bool

    @property
    def all_ok(self) -> bool:
        return self.efficiency_ok and self.null_ok and self.symmetry_ok


def check_axioms(game: CoalitionGame, allocation: Allocation, *,
                 tol: float = 1e-9, detect_cap: int | None = None) -> AxiomReport:
    """Report-only audit of an allocation against the fairness axioms.

    Null players and interchangeable pairs are detected by exhaustive scan
    of the coalition table when the roster is within `detect_cap`; above it
    only efficiency is checked and the report is marked non-exhaustive.
    Sampled allocations get a 3-stderr slack on every payoff comparison.
    """
    n = game.n_players
    if allocation.n_players != n:
        raise ValueError("allocation does not match the game roster")
    detect_cap = DEFAULT_STRUCTURE_CAP if detect_cap is None else detect_cap
    grand = allocation.grand_value
    sampled = allocation.method is Method.SAMPLED
    stderr = allocation.stderr if sampled else (0.0,) * n

    eff_tol = tol * max(1.0, abs(grand)) + 3.0 * math.fsum(stderr)
    efficiency_gap = abs(allocation.total() - grand)
    efficiency_ok = efficiency_gap <= eff_tol

    nulls: tuple[int, ...] = ()
    pairs: tuple[tuple[int, int], ...] = ()
    exhaustive = n <= detect_cap
    if exhaustive:
        values = coalition_value_table(game, cap=detect_cap)
        masks = np.arange(1 << n, dtype=np.int64)
        detect_tol = 1e-12 * max(1.0, abs(grand))
        found_nulls = []
        for i in range(n):
            bit = np.int64(1 << i)
            without = masks[(masks & bit) == 0]
            if np.max(np.abs(values[without | bit] - values[without])) <= detect_tol:
                found_nulls.append(i)
        nulls = tuple(found_nulls)
        found_pairs = []
        for i in range(n):
            for j in range(i + 1, n):
                both = np.int64((1 << i) | (1 << j))
                free = masks[(masks & both) == 0]
                gap = np.abs(values[free | np.int64(1 << i)]
                             - values[free | np.int64(1 << j)])
                if np.max(gap) <= detect_tol:
                    found_pairs.append((i, j))
        pairs = tuple(found_pairs)

    payoffs = allocation.payoffs
    null_ok = all(abs(payoffs[i]) <= tol + 3.0 * stderr[i] for i in nulls)
    symmetry_ok = all(
        abs(payoffs[i] - payoffs[j]) <= tol + 3.0 * (stderr[i] + stderr[j])
        for i, j in pairs)
    return AxiomReport(efficiency_ok, efficiency_gap, nulls, null_ok,
                       pairs, symmetry_ok, exhaustive)


def add_games(game_a: CoalitionGame, game_b: CoalitionGame,
              label: str = "") -> CoalitionGame:
    """Pointwise sum of two characteristic functions over a shared roster."""
    if game_a.n_players != game_b.n_players:
        raise ValueError(
            f"roster mismatch: {game_a.n_players} vs {game_b.n_players} players")
    value_a, value_b = game_a.value, game_b.value

    def value(s: Coalition) -> float:
        return value_a(s) + value_b(s)

    return CoalitionGame(game_a.n_players, value,
                         label or f"{game_a.label} + {game_b.label}", game_a.players)


@dataclass(frozen=True)
class LinearityReport:
    max_gap: float
    ok: bool


def check_linearity(game_a: CoalitionGame, game_b: CoalitionGame, *,
                    tol: float = 1e-9, cap: int | None = None) -> LinearityReport:
    """Verify that Shapley payoffs of a game sum equal the per-game sums."""
    alloc_a = shapley_exact(game_a, cap=cap)
    alloc_b = shapley_exact(game_b, cap=cap)
    alloc_sum = shapley_exact(add_games(game_a, game_b), cap=cap)
    max_gap = max(
        abs(s - (a + b))
        for s, a, b in zip(alloc_sum.payoffs, alloc_a.payoffs, alloc_b.payoffs))
    return LinearityReport(max_gap, max_gap <= tol)


def is_supermodular(game: CoalitionGame, *, cap: int | None = None,
                    tol: float = 1e-9) -> bool:
    """True iff marginal contributions never shrink as coalitions grow.

    Uses the pairwise form: for every i != j and every S avoiding both,
    v(S+i+j) - v(S+j) >= v(S+i) - v(S), within tol.
    """
    cap = DEFAULT_STRUCTURE_CAP if cap is None else cap
    n = game.n_players
    if n > cap:
        raise RosterTooLargeError(
            f"supermodularity scan capped at {cap} players, got {n}")
    values = coalition_value_table(game, cap=cap)
    masks = np.arange(1 << n, dtype=np.int64)
    for i in range(n):
        bit_i = np.int64(1 << i)
        for j in range(i + 1, n):
            bit_j = np.int64(1 << j)
            free = masks[(masks & (bit_i | bit_j)) == 0]
            grown = values[free | bit_i | bit_j] - values[free | bit_j]
            base = values[free | bit_i] - values[free]
            if np.any(grown - base < -tol):
                return False
    return True
