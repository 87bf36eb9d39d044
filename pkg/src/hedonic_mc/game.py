"""Matrix encoding of hedonic games with strict preferences.

Coalitions are n-bit masks with player 1 in the most significant bit, so
for three players ``{1, 2}`` is ``0b110 == 6``. Every player belongs to
2**(n-1) coalitions; those are numbered 1..2**(n-1) by deleting the
player's own bit and reading what remains as a binary number, plus one.

A game is an ``n x 2**(n-1)`` rank matrix: ``ranks[i-1, j-1]`` is the rank
player ``i`` gives the ``j``-th coalition containing it, larger meaning more
preferred. A valid matrix has every row a permutation of 1..2**(n-1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import (
    CoalitionIndexError,
    InvalidPlayerError,
    NotAMemberError,
    OutOfRangeError,
    ValidationError,
)

MAX_PLAYERS = 16


def check_players(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise InvalidPlayerError(f"player count must be an integer, got {n!r}")
    if not 1 <= n <= MAX_PLAYERS:
        raise InvalidPlayerError(f"player count {n} outside 1..{MAX_PLAYERS}")
    return int(n)


def _check_player_id(n: int, i: int) -> None:
    if not 1 <= i <= n:
        raise InvalidPlayerError(f"player {i} outside 1..{n}")


def player_bit(n: int, i: int) -> int:
    return 1 << (n - i)


def encode_coalition(n: int, members: Iterable[int]) -> int:
    n = check_players(n)
    mask = 0
    for i in members:
        _check_player_id(n, i)
        mask |= player_bit(n, i)
    return mask


def decode_coalition(n: int, mask: int) -> frozenset:
    n = check_players(n)
    if not 0 <= mask < (1 << n):
        raise OutOfRangeError(f"mask {mask} outside 0..{(1 << n) - 1}")
    return frozenset(i for i in range(1, n + 1) if mask & player_bit(n, i))


def coalition_index(n: int, i: int, mask: int) -> int:
    """Position (1-based) of ``mask`` among the coalitions containing ``i``."""
    _check_player_id(n, i)
    pos = n - i
    if not (mask >> pos) & 1:
        raise NotAMemberError(f"player {i} is not in coalition {mask}")
    low = mask & ((1 << pos) - 1)
    return ((mask >> (pos + 1)) << pos | low) + 1


def coalition_from_index(n: int, i: int, j: int) -> int:
    _check_player_id(n, i)
    if not 1 <= j <= 1 << (n - 1):
        raise CoalitionIndexError(f"index {j} outside 1..{1 << (n - 1)}")
    pos = n - i
    rest = j - 1
    return (rest >> pos) << (pos + 1) | (1 << pos) | (rest & ((1 << pos) - 1))


def count_games(n: int) -> int:
    """Exact number of strict-preference games on ``n`` labelled players."""
    n = check_players(n)
    return math.factorial(1 << (n - 1)) ** n


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    row: Optional[int] = None
    value: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True, eq=False)
class PreferenceMatrix:
    """Rank matrix of one game.

    Construction only checks the shape; use :func:`validate_matrix` (or
    :meth:`validate`) to check that each row is a permutation.
    """

    ranks: np.ndarray

    def __post_init__(self):
        arr = np.array(self.ranks, dtype=np.int64, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValidationError("rank matrix must be two-dimensional with at least one row")
        n = check_players(arr.shape[0])
        if arr.shape[1] != 1 << (n - 1):
            raise ValidationError(
                f"{n}-player matrix needs {1 << (n - 1)} columns, got {arr.shape[1]}"
            )
        if arr.min() < 0 or arr.max() > np.iinfo(np.uint16).max:
            raise ValidationError("ranks must fit in an unsigned 16-bit integer")
        arr = arr.astype(np.uint16)
        arr.flags.writeable = False
        object.__setattr__(self, "ranks", arr)

    @property
    def n(self) -> int:
        return self.ranks.shape[0]

    @property
    def width(self) -> int:
        return self.ranks.shape[1]

    def rank(self, i: int, mask: int) -> int:
        """Player ``i``'s rank for coalition ``mask`` (which must contain ``i``)."""
        _check_player_id(self.n, i)
        return int(self.ranks[i - 1, coalition_index(self.n, i, mask) - 1])

    def validate(self) -> ValidationReport:
        return validate_matrix(self)

    def __eq__(self, other):
        if not isinstance(other, PreferenceMatrix):
            return NotImplemented
        return np.array_equal(self.ranks, other.ranks)

    def __hash__(self):
        return hash((self.ranks.shape, self.ranks.tobytes()))

    def __repr__(self):
        return f"PreferenceMatrix({self.ranks.tolist()})"

    # -- serialisation -------------------------------------------------

    def to_dict(self) -> dict:
        return {"players": self.n, "ranks": self.ranks.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PreferenceMatrix":
        try:
            players = data["players"]
            ranks = data["ranks"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"game object lacks field {exc}") from None
        try:
            game = cls(np.asarray(ranks, dtype=np.int64))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed rank matrix: {exc}") from None
        if game.n != players:
            raise ValidationError(f"'players' is {players} but matrix has {game.n} rows")
        return game

    @classmethod
    def from_json(cls, text: str) -> "PreferenceMatrix":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed game JSON: {exc}") from None
        return cls.from_dict(data)

    def to_text(self) -> str:
        """Compact one-line form ``n;row1;row2;...``."""
        rows = (",".join(str(v) for v in row) for row in self.ranks.tolist())
        return ";".join([str(self.n), *rows])

    @classmethod
    def from_text(cls, text: str) -> "PreferenceMatrix":
        parts = text.strip().split(";")
        try:
            players = int(parts[0])
            rows = [[int(v) for v in p.split(",")] for p in parts[1:]]
        except ValueError as exc:
            raise ValidationError(f"malformed compact game: {exc}") from None
        return cls.from_dict({"players": players, "ranks": rows})


def validate_matrix(game: PreferenceMatrix) -> ValidationReport:
    width = game.width
    expected = np.arange(1, width + 1)
    for r, row in enumerate(game.ranks, start=1):
        if np.array_equal(np.sort(row), expected):
            continue
        seen = set()
        for v in row.tolist():
            if not 1 <= v <= width:
                return ValidationReport(False, r, v, f"rank {v} outside 1..{width}")
            if v in seen:
                return ValidationReport(False, r, v, f"rank {v} repeated")
            seen.add(v)
    return ValidationReport(True)


def prefers(game: PreferenceMatrix, i: int, s: int, t: int) -> bool:
    """True iff player ``i`` strictly prefers coalition ``s`` to ``t``."""
    return game.rank(i, s) > game.rank(i, t)


# Example game used throughout the tests and docs: players A, B, C.
EXAMPLE_RANKS = ((4, 1, 3, 2), (1, 2, 3, 4), (2, 1, 4, 3))


def example_game() -> PreferenceMatrix:
    return PreferenceMatrix(np.array(EXAMPLE_RANKS))
