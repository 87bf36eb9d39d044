"""Brute-force core computation.

Every partition is tested against every nonempty coalition; a coalition
blocks a partition when each of its members ranks it strictly above the
coalition that member currently sits in. The unblocked partitions form
the core.

The search walks partitions in restricted-growth order and, for each one,
tries the n singleton coalitions first, then the remaining masks in
ascending order, stopping at the first blocking coalition. The loop is
compiled with numba; :func:`verify_core` is an independent pure-Python
re-check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List

import numba
import numpy as np

from .errors import InvalidPartitionError, ValidationError
from .game import PreferenceMatrix, coalition_index, validate_matrix
from .partitions import (
    advance_code,
    code_to_coalitions,
    coalition_of,
    format_code,
    parse_code,
)

MODES = ("full", "first_only")

_advance = numba.njit(cache=True, nogil=True)(advance_code)


@dataclass(frozen=True)
class CoreResult:
    core: List[tuple] = field(default_factory=list)
    partitions_checked: int = 0
    blocks_tested: int = 0

    @property
    def core_size(self) -> int:
        return len(self.core)

    def to_dict(self) -> dict:
        return {
            "core_size": self.core_size,
            "core": [format_code(c) for c in self.core],
            "partitions_checked": self.partitions_checked,
            "blocks_tested": self.blocks_tested,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CoreResult":
        return cls(
            core=[parse_code(c) for c in data["core"]],
            partitions_checked=int(data.get("partitions_checked", 0)),
            blocks_tested=int(data.get("blocks_tested", 0)),
        )


@lru_cache(maxsize=None)
def solver_tables(n: int):
    """(column index table, coalition test order) for ``n`` players.

    ``cols[S, p]`` is the 0-based column of coalition ``S`` in row ``p``
    (player ``p + 1``), or -1 when that player is not in ``S``.
    """
    size = 1 << n
    cols = np.full((size, n), -1, dtype=np.int32)
    for s in range(1, size):
        for p in range(n):
            if (s >> (n - 1 - p)) & 1:
                cols[s, p] = coalition_index(n, p + 1, s) - 1
    singletons = [1 << (n - 1 - p) for p in range(n)]
    rest = [s for s in range(1, size) if s & (s - 1)]
    order = np.array(singletons + rest, dtype=np.int64)
    cols.flags.writeable = False
    order.flags.writeable = False
    return cols, order


@numba.njit(cache=True, nogil=True)
def _solve(ranks, cols, order, first_only, core_out):
    n = ranks.shape[0]
    code = np.ones(n, dtype=np.int64)
    prefix_max = np.ones(n, dtype=np.int64)
    blocks = np.zeros(n + 1, dtype=np.int64)
    current = np.empty(n, dtype=np.int64)
    found = 0
    checked = 0
    tested = 0
    while True:
        checked += 1
        blocks[:] = 0
        for p in range(n):
            blocks[code[p]] |= 1 << (n - 1 - p)
        for p in range(n):
            current[p] = ranks[p, cols[blocks[code[p]], p]]
        blocked = False
        for s in order:
            tested += 1
            improves = True
            for p in range(n):
                if (s >> (n - 1 - p)) & 1:
                    if ranks[p, cols[s, p]] <= current[p]:
                        improves = False
                        break
            if improves:
                blocked = True
                break
        if not blocked:
            if found < core_out.shape[0]:
                for p in range(n):
                    core_out[found, p] = code[p]
            found += 1
            if first_only:
                break
        if not _advance(code, prefix_max):
            break
    return found, checked, tested


@numba.njit(cache=True, nogil=True)
def _core_sizes(batch, cols, order, first_only):
    out = np.empty(batch.shape[0], dtype=np.int64)
    scratch = np.empty((0, batch.shape[1]), dtype=np.int8)
    for g in range(batch.shape[0]):
        out[g] = _solve(batch[g], cols, order, first_only, scratch)[0]
    return out


def _check_mode(mode: str) -> bool:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode == "first_only"


def find_core(game: PreferenceMatrix, mode: str = "full") -> CoreResult:
    first_only = _check_mode(mode)
    report = validate_matrix(game)
    if not report:
        raise ValidationError(f"invalid preference matrix: row {report.row}: {report.reason}")
    cols, order = solver_tables(game.n)
    ranks = np.ascontiguousarray(game.ranks)
    cap = 32
    while True:
        out = np.zeros((cap, game.n), dtype=np.int8)
        found, checked, tested = _solve(ranks, cols, order, first_only, out)
        if found <= cap:
            break
        cap = found
    core = [tuple(int(c) for c in row) for row in out[:found]]
    return CoreResult(core=core, partitions_checked=int(checked), blocks_tested=int(tested))


def core_sizes(batch: np.ndarray, mode: str = "full") -> np.ndarray:
    """Core sizes for a stack of valid rank matrices, shape ``(games, n, 2**(n-1))``.

    No validation is done here; callers pass generator output.
    """
    first_only = _check_mode(mode)
    batch = np.ascontiguousarray(batch, dtype=np.uint16)
    if batch.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    cols, order = solver_tables(batch.shape[1])
    return _core_sizes(batch, cols, order, first_only)


def is_blocked_by(game: PreferenceMatrix, code, s: int) -> bool:
    """True iff every member of coalition ``s`` strictly prefers it to its block in ``code``."""
    n = game.n
    if not 0 < s < (1 << n):
        raise ValueError(f"coalition mask {s} must be nonempty and below 2**{n}")
    members = [i for i in range(1, n + 1) if (s >> (n - i)) & 1]
    return all(game.rank(i, s) > game.rank(i, coalition_of(n, code, i)) for i in members)


def verify_core(game: PreferenceMatrix, result: CoreResult) -> bool:
    """Re-scan every reported core partition against all 2**n - 1 coalitions.

    Ranks are read through :meth:`PreferenceMatrix.rank`, not through the
    compiled tables, and coalitions are visited in plain ascending order.
    """
    n = game.n
    players = range(1, n + 1)
    for code in result.core:
        try:
            blocks = code_to_coalitions(n, code)
        except InvalidPartitionError:
            return False
        home = {}
        for b in blocks:
            for i in players:
                if b >> (n - i) & 1:
                    home[i] = b
        for s in range(1, 1 << n):
            members = [i for i in players if s >> (n - i) & 1]
            if all(game.rank(i, s) > game.rank(i, home[i]) for i in members):
                return False
    return len(set(result.core)) == len(result.core)
