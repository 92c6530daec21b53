"""State-space scan kernels.

Exhaustive enumeration over the product strategy space dominates runtime for
the equilibrium and price-of-anarchy searches, so the per-state work (decode
profile, accumulate congestion, check deviations) lives here in two
interchangeable implementations:

* a numba ``@njit`` loop kernel (default when numba is importable), and
* a vectorized pure-numpy kernel processing index chunks.

Set ``POLYBOTTLENECK_BACKEND=numpy`` to force the numpy path (numba is then
never imported).  Both fixed-width paths are guarded: cost sums are computed
in int64 only when a precomputed bound proves they fit, otherwise the numpy
kernel runs on object-dtype delay tables (exact unbounded integers).

Profiles are indexed lexicographically: player 0 varies slowest.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .game_core import Game, Profile

_ENV_BACKEND = os.environ.get("POLYBOTTLENECK_BACKEND", "").strip().lower()
if _ENV_BACKEND not in ("", "numba", "numpy"):
    raise ValueError(
        f"POLYBOTTLENECK_BACKEND must be 'numba' or 'numpy', got {_ENV_BACKEND!r}"
    )

if _ENV_BACKEND == "numpy":
    _HAVE_NUMBA = False
else:
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        _HAVE_NUMBA = False

# int64 margin: leaves headroom for the accumulating dot products.
_INT64_SAFE_LIMIT = 2**62

CHUNK = 8192


def default_backend() -> str:
    """Backend used when none is requested explicitly."""
    if _ENV_BACKEND:
        return _ENV_BACKEND
    return "numba" if _HAVE_NUMBA else "numpy"


def numba_available() -> bool:
    return _HAVE_NUMBA


@dataclass
class GameArrays:
    """Flat array encoding of a game for the scan kernels."""

    num_players: int
    num_resources: int
    degree: int
    counts: np.ndarray      # (n,) strategies per player
    weights: np.ndarray     # (n,) lexicographic decode weights
    player_ptr: np.ndarray  # (n+1,) player -> first strategy row
    strat_ptr: np.ndarray   # (total_strats+1,) strategy row -> resource span
    strat_res: np.ndarray   # concatenated resource ids
    num_states: int
    int64_safe: bool
    pow_int: np.ndarray | None   # delay table c**M, int64 (only if safe)
    pow_obj: np.ndarray          # delay table, object dtype (always exact)
    incidence: list[np.ndarray] = field(default_factory=list)  # per player (counts_i, z)


def encode_game(game: Game) -> GameArrays:
    n = game.num_players
    z = game.num_resources
    counts = np.array([len(s) for s in game.strategies], dtype=np.int64)

    weights = np.ones(n, dtype=np.int64)
    num_states = 1
    for i in range(n - 1, -1, -1):
        weights[i] = num_states
        num_states *= int(counts[i])

    player_ptr = np.zeros(n + 1, dtype=np.int64)
    flat: list[tuple[int, ...]] = []
    for i, strat_set in enumerate(game.strategies):
        player_ptr[i + 1] = player_ptr[i] + len(strat_set)
        flat.extend(strat_set)
    strat_ptr = np.zeros(len(flat) + 1, dtype=np.int64)
    for s, strategy in enumerate(flat):
        strat_ptr[s + 1] = strat_ptr[s] + len(strategy)
    strat_res = np.array(
        [r for strategy in flat for r in strategy], dtype=np.int64
    ) if flat else np.zeros(0, dtype=np.int64)

    # Exact delay table over all reachable congestions (<= n players on a
    # resource, +1 headroom for deviation lookups).
    pow_exact = [c**game.degree for c in range(n + 2)]
    max_len = max(len(strategy) for strategy in flat)
    int64_safe = max_len * pow_exact[-1] < _INT64_SAFE_LIMIT
    pow_obj = np.array(pow_exact, dtype=object)
    pow_int = np.array(pow_exact, dtype=np.int64) if int64_safe else None

    incidence = []
    for i, strat_set in enumerate(game.strategies):
        inc = np.zeros((len(strat_set), z), dtype=np.int64)
        for s, strategy in enumerate(strat_set):
            inc[s, list(strategy)] = 1
        incidence.append(inc)

    return GameArrays(
        num_players=n,
        num_resources=z,
        degree=game.degree,
        counts=counts,
        weights=weights,
        player_ptr=player_ptr,
        strat_ptr=strat_ptr,
        strat_res=strat_res,
        num_states=num_states,
        int64_safe=int64_safe,
        pow_int=pow_int,
        pow_obj=pow_obj,
        incidence=incidence,
    )


def profile_from_index(enc: GameArrays, idx: int) -> Profile:
    out = []
    for i in range(enc.num_players):
        out.append(int((idx // int(enc.weights[i])) % int(enc.counts[i])))
    return tuple(out)


def index_of_profile(enc: GameArrays, profile: Profile) -> int:
    return int(sum(int(w) * c for w, c in zip(enc.weights, profile)))


# ---------------------------------------------------------------------------
# numpy kernels (vectorized over an index chunk)
# ---------------------------------------------------------------------------

def _decode_chunk(enc: GameArrays, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    return (idx[:, None] // enc.weights[None, :]) % enc.counts[None, :]


def _congestion_chunk(enc: GameArrays, choices: np.ndarray) -> np.ndarray:
    cong = np.zeros((choices.shape[0], enc.num_resources), dtype=np.int64)
    for i in range(enc.num_players):
        cong += enc.incidence[i][choices[:, i]]
    return cong


def _bottlenecks_np(enc: GameArrays, start: int, stop: int) -> np.ndarray:
    cong = _congestion_chunk(enc, _decode_chunk(enc, start, stop))
    return cong.max(axis=1)


def _nash_mask_np(enc: GameArrays, start: int, stop: int, pow_table: np.ndarray) -> np.ndarray:
    choices = _decode_chunk(enc, start, stop)
    cong = _congestion_chunk(enc, choices)
    mask = np.ones(choices.shape[0], dtype=bool)
    for i in range(enc.num_players):
        inc = enc.incidence[i]
        sel = inc[choices[:, i]]
        # tmp[r] = delay r would have if this player used it after deviating;
        # for currently used resources this equals the current delay.
        tmp = pow_table[cong - sel + 1]
        dev_all = tmp.dot(inc.T)  # (chunk, num_strategies_i)
        cur = np.take_along_axis(dev_all, choices[:, i][:, None], axis=1)
        mask &= np.asarray(dev_all >= cur, dtype=bool).all(axis=1)
    return mask


# ---------------------------------------------------------------------------
# numba kernels (scalar loops over indices)
# ---------------------------------------------------------------------------

def _bottlenecks_loop(counts, weights, player_ptr, strat_ptr, strat_res, z, start, stop):
    n = counts.shape[0]
    out = np.zeros(stop - start, dtype=np.int64)
    cong = np.zeros(z, dtype=np.int64)
    for k in range(stop - start):
        idx = start + k
        for r in range(z):
            cong[r] = 0
        for i in range(n):
            c = (idx // weights[i]) % counts[i]
            row = player_ptr[i] + c
            for e in range(strat_ptr[row], strat_ptr[row + 1]):
                cong[strat_res[e]] += 1
        best = 0
        for r in range(z):
            if cong[r] > best:
                best = cong[r]
        out[k] = best
    return out


def _nash_mask_loop(counts, weights, player_ptr, strat_ptr, strat_res, pow_table, z, start, stop):
    n = counts.shape[0]
    out = np.ones(stop - start, dtype=np.bool_)
    cong = np.zeros(z, dtype=np.int64)
    used = np.zeros(z, dtype=np.bool_)
    for k in range(stop - start):
        idx = start + k
        for r in range(z):
            cong[r] = 0
        for i in range(n):
            c = (idx // weights[i]) % counts[i]
            row = player_ptr[i] + c
            for e in range(strat_ptr[row], strat_ptr[row + 1]):
                cong[strat_res[e]] += 1
        ok = True
        for i in range(n):
            c = (idx // weights[i]) % counts[i]
            row = player_ptr[i] + c
            cur = np.int64(0)
            for e in range(strat_ptr[row], strat_ptr[row + 1]):
                r = strat_res[e]
                used[r] = True
                cur += pow_table[cong[r]]
            for s in range(counts[i]):
                if s == c:
                    continue
                alt = player_ptr[i] + s
                dev = np.int64(0)
                for e in range(strat_ptr[alt], strat_ptr[alt + 1]):
                    r = strat_res[e]
                    if used[r]:
                        dev += pow_table[cong[r]]
                    else:
                        dev += pow_table[cong[r] + 1]
                if dev < cur:
                    ok = False
                    break
            for e in range(strat_ptr[row], strat_ptr[row + 1]):
                used[strat_res[e]] = False
            if not ok:
                break
        out[k] = ok
    return out


if _HAVE_NUMBA:
    _bottlenecks_nb = njit(cache=True)(_bottlenecks_loop)
    _nash_mask_nb = njit(cache=True)(_nash_mask_loop)


def _resolve(backend: str | None, enc: GameArrays) -> str:
    chosen = backend or default_backend()
    if chosen == "numba" and not _HAVE_NUMBA:
        raise ValueError("numba backend requested but numba is not available")
    if chosen == "numba" and not enc.int64_safe:
        # Costs may exceed int64: route through the exact object-dtype path.
        return "numpy"
    return chosen


def bottlenecks_range(
    enc: GameArrays, start: int, stop: int, backend: str | None = None
) -> np.ndarray:
    """Bottleneck congestion per profile index in [start, stop)."""
    chosen = _resolve(backend, enc)
    if chosen == "numba":
        return _bottlenecks_nb(
            enc.counts, enc.weights, enc.player_ptr, enc.strat_ptr,
            enc.strat_res, enc.num_resources, start, stop,
        )
    return _bottlenecks_np(enc, start, stop)


def nash_mask_range(
    enc: GameArrays, start: int, stop: int, backend: str | None = None
) -> np.ndarray:
    """Weak-Nash flag per profile index in [start, stop).

    A profile is flagged when no player has a strictly cheaper alternative
    strategy (equal-cost deviations do not break equilibrium).
    """
    chosen = _resolve(backend, enc)
    if chosen == "numba":
        return _nash_mask_nb(
            enc.counts, enc.weights, enc.player_ptr, enc.strat_ptr,
            enc.strat_res, enc.pow_int, enc.num_resources, start, stop,
        )
    table = enc.pow_int if enc.int64_safe else enc.pow_obj
    return _nash_mask_np(enc, start, stop, table)
