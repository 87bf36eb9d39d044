"""Random and exhaustive game generation.

Replay contract
---------------
Game ``g`` of size ``n`` under master seed ``s`` is drawn from its own
stream::

    numpy.random.Generator(PCG64(SeedSequence(entropy=s, spawn_key=(n, g))))

``SeedSequence`` hashes (entropy, spawn_key) into the 128-bit PCG64 state,
so streams for different ``(n, g)`` are independent and the result does not
depend on which worker solves which game.

Each row takes exactly ``m - 1`` doubles (``m = 2**(n-1)``), drawn for all
rows at once as ``stream.random((n, m - 1))``. Row ``r`` starts as
``1..m`` and is Fisher-Yates shuffled: draw ``t`` (t = 0..m-2) swaps
position ``k = m - 1 - t`` with position ``floor(u * (k + 1))``.
"""

from __future__ import annotations

import itertools
from typing import Iterator

import numba
import numpy as np

from .errors import InfeasibleEnumerationError, OutOfRangeError
from .game import PreferenceMatrix, check_players, count_games

MAX_ENUMERABLE = 3
SEED_LIMIT = 1 << 64


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise OutOfRangeError(f"seed must be an integer, got {seed!r}")
    if not 0 <= seed < SEED_LIMIT:
        raise OutOfRangeError(f"seed {seed} is not a 64-bit unsigned integer")
    return int(seed)


def parse_seed(text: str) -> int:
    """Accept decimal or ``0x``-prefixed hexadecimal."""
    text = text.strip().lower()
    try:
        value = int(text, 16) if text.startswith("0x") else int(text, 10)
    except ValueError:
        raise OutOfRangeError(f"cannot parse seed {text!r}") from None
    return check_seed(value)


def derive_game_stream(seed: int, n: int, game_index: int) -> np.random.Generator:
    seed = check_seed(seed)
    n = check_players(n)
    if game_index < 0:
        raise OutOfRangeError(f"game index must be non-negative, got {game_index}")
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(n, int(game_index)))
    return np.random.Generator(np.random.PCG64(seq))


@numba.njit(cache=True)
def _shuffle_rows(draws, out):
    n, m = out.shape
    for r in range(n):
        for c in range(m):
            out[r, c] = c + 1
        for t in range(m - 1):
            k = m - 1 - t
            j = int(draws[r, t] * (k + 1))
            tmp = out[r, k]
            out[r, k] = out[r, j]
            out[r, j] = tmp


def _random_ranks(n: int, stream: np.random.Generator) -> np.ndarray:
    m = 1 << (n - 1)
    draws = stream.random((n, m - 1))
    out = np.empty((n, m), dtype=np.uint16)
    _shuffle_rows(draws, out)
    return out


def random_matrix(n: int, stream: np.random.Generator) -> PreferenceMatrix:
    n = check_players(n)
    return PreferenceMatrix(_random_ranks(n, stream))


def random_game(seed: int, n: int, game_index: int) -> PreferenceMatrix:
    return random_matrix(n, derive_game_stream(seed, n, game_index))


def random_batch(seed: int, n: int, start: int, stop: int) -> np.ndarray:
    """Rank arrays for games ``start..stop-1``, shape ``(stop - start, n, 2**(n-1))``."""
    n = check_players(n)
    seed = check_seed(seed)
    m = 1 << (n - 1)
    out = np.empty((max(stop - start, 0), n, m), dtype=np.uint16)
    for k, g in enumerate(range(start, stop)):
        stream = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(n, g)))
        )
        _shuffle_rows(stream.random((n, m - 1)), out[k])
    return out


def _check_enumerable(n: int) -> int:
    n = check_players(n)
    if n > MAX_ENUMERABLE:
        raise InfeasibleEnumerationError(
            f"{count_games(n):.3e} games for n={n}; exhaustive enumeration stops at n={MAX_ENUMERABLE}"
        )
    return n


def enumerate_all_games(n: int) -> Iterator[PreferenceMatrix]:
    """Every distinct valid matrix for ``n <= 3``, rows varying fastest last."""
    n = _check_enumerable(n)
    rows = list(itertools.permutations(range(1, (1 << (n - 1)) + 1)))
    for combo in itertools.product(rows, repeat=n):
        yield PreferenceMatrix(np.array(combo))


def all_games_array(n: int) -> np.ndarray:
    """Same games as :func:`enumerate_all_games`, stacked into one array."""
    n = _check_enumerable(n)
    rows = np.array(list(itertools.permutations(range(1, (1 << (n - 1)) + 1))), dtype=np.uint16)
    idx = np.array(list(itertools.product(range(len(rows)), repeat=n)), dtype=np.int64)
    return rows[idx]
