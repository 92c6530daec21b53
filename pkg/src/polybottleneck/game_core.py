"""Polynomial bottleneck congestion games: core types and cost calculus.

A game consists of players that each pick one pure strategy (a set of
resources).  A resource's delay is ``congestion ** degree`` and a player's
cost is the sum of delays over its chosen resources.  The social cost of a
state is the bottleneck: the maximum congestion on any resource.  All cost
arithmetic is exact Python integer arithmetic; comparisons are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Any, Iterable, Sequence

import numpy as np

from .errors import GameFormatError, InvalidProfileError

# A profile assigns each player an index into its strategy list.
Profile = tuple[int, ...]

# Per-resource player counts for one profile (always fits int64).
CongestionVector = np.ndarray


def _normalize_strategy(raw: Iterable[int], num_resources: int, where: str) -> tuple[int, ...]:
    resources = list(raw)
    if not resources:
        raise GameFormatError(f"{where}: empty strategy")
    for r in resources:
        if not isinstance(r, (int, np.integer)) or isinstance(r, bool):
            raise GameFormatError(f"{where}: resource id {r!r} is not an integer")
        if r < 0 or r >= num_resources:
            raise GameFormatError(
                f"{where}: resource id {r} out of range [0, {num_resources})"
            )
    if len(set(resources)) != len(resources):
        raise GameFormatError(f"{where}: duplicate resource in strategy {sorted(resources)}")
    return tuple(sorted(int(r) for r in resources))


@dataclass(frozen=True)
class Game:
    """Immutable game: ``strategies[i][s]`` is the s-th strategy of player i,
    stored as a sorted tuple of resource ids."""

    num_resources: int
    degree: int
    strategies: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self) -> None:
        if self.num_resources < 1:
            raise GameFormatError(f"num_resources must be >= 1, got {self.num_resources}")
        if self.degree < 1:
            raise GameFormatError(f"degree must be >= 1, got {self.degree}")
        if not self.strategies:
            raise GameFormatError("a game needs at least one player")
        for i, strat_set in enumerate(self.strategies):
            if not strat_set:
                raise GameFormatError(f"player {i}: empty strategy set")

    @classmethod
    def build(
        cls,
        num_resources: int,
        degree: int,
        players: Sequence[Sequence[Iterable[int]]],
    ) -> "Game":
        """Validate and normalize raw nested lists into a Game."""
        normalized = tuple(
            tuple(
                _normalize_strategy(strategy, num_resources, f"player {i} strategy {s}")
                for s, strategy in enumerate(strat_set)
            )
            for i, strat_set in enumerate(players)
        )
        return cls(num_resources=num_resources, degree=degree, strategies=normalized)

    @property
    def num_players(self) -> int:
        return len(self.strategies)

    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.strategies)

    def num_states(self) -> int:
        n = 1
        for s in self.strategies:
            n *= len(s)
        return n

    def chosen(self, profile: Profile, player: int) -> tuple[int, ...]:
        return self.strategies[player][profile[player]]


def validate_profile(game: Game, profile: Sequence[int]) -> Profile:
    if len(profile) != game.num_players:
        raise InvalidProfileError(
            f"profile has {len(profile)} entries for {game.num_players} players"
        )
    for i, choice in enumerate(profile):
        if not 0 <= choice < len(game.strategies[i]):
            raise InvalidProfileError(
                f"player {i}: choice {choice} out of range "
                f"[0, {len(game.strategies[i])})"
            )
    return tuple(int(c) for c in profile)


def congestion_of(game: Game, profile: Sequence[int]) -> CongestionVector:
    """Number of players using each resource in the given state."""
    profile = validate_profile(game, profile)
    counts = np.zeros(game.num_resources, dtype=np.int64)
    for player, choice in enumerate(profile):
        for r in game.strategies[player][choice]:
            counts[r] += 1
    return counts


def bottleneck(cv: CongestionVector) -> int:
    """Maximum congestion over all resources; 0 for an all-zero vector."""
    if len(cv) == 0:
        return 0
    return int(cv.max())


def delay(congestion: int, degree: int) -> int:
    """Delay of a resource at the given congestion: congestion ** degree.

    Exact integer arithmetic; Python integers are unbounded so the result
    never wraps.  (The accelerated scan kernels use fixed-width integers but
    are guarded by a precomputed bound and fall back to the exact path.)
    """
    if congestion < 0:
        raise ValueError(f"congestion must be >= 0, got {congestion}")
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    return int(congestion) ** int(degree)


def player_cost(game: Game, profile: Sequence[int], player: int) -> int:
    """Sum of delays over the player's chosen resources."""
    profile = validate_profile(game, profile)
    if not 0 <= player < game.num_players:
        raise InvalidProfileError(f"no player {player} in a {game.num_players}-player game")
    counts = congestion_of(game, profile)
    return sum(delay(int(counts[r]), game.degree) for r in game.chosen(profile, player))


def profile_length(game: Game, profile: Sequence[int]) -> int:
    """Maximum number of resources used by any single player."""
    profile = validate_profile(game, profile)
    return max(len(game.chosen(profile, i)) for i in range(game.num_players))


# ---------------------------------------------------------------------------
# Game file format (JSON):
#   {"degree": M, "num_resources": z, "players": [[[r, ...], [r, ...]], ...]}
# ---------------------------------------------------------------------------

def game_to_dict(game: Game) -> dict[str, Any]:
    return {
        "degree": game.degree,
        "num_resources": game.num_resources,
        "players": [[list(s) for s in strat_set] for strat_set in game.strategies],
    }


def game_from_dict(data: Any) -> Game:
    if not isinstance(data, dict):
        raise GameFormatError(f"game document must be an object, got {type(data).__name__}")
    for key in ("degree", "num_resources", "players"):
        if key not in data:
            raise GameFormatError(f"missing required field {key!r}")
    degree = data["degree"]
    num_resources = data["num_resources"]
    players = data["players"]
    if not isinstance(degree, int) or isinstance(degree, bool) or degree < 1:
        raise GameFormatError(f"field 'degree' must be an integer >= 1, got {degree!r}")
    if not isinstance(num_resources, int) or isinstance(num_resources, bool) or num_resources < 1:
        raise GameFormatError(
            f"field 'num_resources' must be an integer >= 1, got {num_resources!r}"
        )
    if not isinstance(players, list) or not players:
        raise GameFormatError("field 'players' must be a non-empty list")
    for i, strat_set in enumerate(players):
        if not isinstance(strat_set, list) or not strat_set:
            raise GameFormatError(f"player {i}: strategy set must be a non-empty list")
        for s, strategy in enumerate(strat_set):
            if not isinstance(strategy, list):
                raise GameFormatError(f"player {i} strategy {s}: must be a list of resource ids")
    return Game.build(num_resources=num_resources, degree=degree, players=players)


def load_game(source: str | IO[str]) -> Game:
    """Load a game from a JSON file path or open text stream."""
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"invalid JSON: {exc}") from exc
    return game_from_dict(data)


def save_game(game: Game, destination: str | IO[str]) -> None:
    text = json.dumps(game_to_dict(game), indent=2, sort_keys=True)
    if isinstance(destination, str):
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        destination.write(text + "\n")
