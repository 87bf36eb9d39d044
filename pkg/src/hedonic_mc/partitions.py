"""Set partitions as restricted-growth strings.

A partition of players 1..n is written as labels ``c_1..c_n`` with
``c_1 == 1`` and ``c_{k+1} <= 1 + max(c_1..c_k)``; players sharing a label
share a coalition. ``(1, 2, 1, 2, 3)`` is ``{1,3} {2,4} {5}``.

Codes are generated in ascending lexicographic order, from the grand
coalition ``(1, ..., 1)`` to all singletons ``(1, 2, ..., n)``, one step at
a time without holding the whole space in memory.
"""

from __future__ import annotations

from math import comb
from typing import Iterator, Sequence

from .errors import InvalidPartitionError, InvalidPlayerError
from .game import check_players, player_bit


def bell_number(n: int) -> int:
    """Exact Bell number via the Bell triangle."""
    n = check_players(n)
    row = [1]
    for _ in range(n - 1):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[-1]


def bell_numbers_by_binomial(n_max: int) -> list:
    """B_0..B_n_max from B_{k+1} = sum C(k, j) B_j (independent of the triangle)."""
    b = [1]
    for k in range(n_max):
        b.append(sum(comb(k, j) * b[j] for j in range(k + 1)))
    return b


def advance_code(code, prefix_max) -> bool:
    """Step ``code`` to its lexicographic successor in place.

    ``prefix_max[k]`` must hold ``max(code[:k+1])`` and is kept up to date.
    Returns False (leaving the arrays untouched) when ``code`` is the last
    string, all singletons.  Works on lists and on integer numpy arrays, and
    is compiled as-is by the solver kernel.
    """
    n = len(code)
    k = n - 1
    while k > 0 and code[k] > prefix_max[k - 1]:
        k -= 1
    if k == 0:
        return False
    code[k] += 1
    top = prefix_max[k - 1]
    if code[k] > top:
        top = code[k]
    prefix_max[k] = top
    for j in range(k + 1, n):
        code[j] = 1
        prefix_max[j] = top
    return True


def partitions_iter(n: int) -> Iterator[tuple]:
    n = check_players(n)
    code = [1] * n
    prefix_max = [1] * n
    yield tuple(code)
    while advance_code(code, prefix_max):
        yield tuple(code)


def is_canonical(code: Sequence[int]) -> bool:
    if len(code) == 0 or code[0] != 1:
        return False
    top = 0
    for c in code:
        if not 1 <= c <= top + 1:
            return False
        top = max(top, c)
    return True


def _check_code(n: int, code: Sequence[int]) -> None:
    if len(code) != n:
        raise InvalidPartitionError(f"code {tuple(code)} has length {len(code)}, expected {n}")
    if not is_canonical(code):
        raise InvalidPartitionError(f"code {tuple(code)} is not a restricted-growth string")


def code_to_coalitions(n: int, code: Sequence[int]) -> list:
    """Coalition masks of the blocks, ordered by block label."""
    n = check_players(n)
    _check_code(n, code)
    masks = [0] * max(code)
    for i, c in enumerate(code, start=1):
        masks[c - 1] |= player_bit(n, i)
    return masks


def coalition_of(n: int, code: Sequence[int], i: int) -> int:
    n = check_players(n)
    _check_code(n, code)
    if not 1 <= i <= n:
        raise InvalidPlayerError(f"player {i} outside 1..{n}")
    label = code[i - 1]
    mask = 0
    for j, c in enumerate(code, start=1):
        if c == label:
            mask |= player_bit(n, j)
    return mask


def format_code(code: Sequence[int]) -> str:
    """``"12123"`` for n <= 9, comma-separated above that."""
    if len(code) <= 9:
        return "".join(str(c) for c in code)
    return ",".join(str(c) for c in code)


def parse_code(text: str) -> tuple:
    text = text.strip()
    try:
        if "," in text:
            code = tuple(int(t) for t in text.split(","))
        else:
            code = tuple(int(ch) for ch in text)
    except ValueError:
        raise InvalidPartitionError(f"cannot parse partition code {text!r}") from None
    if not is_canonical(code):
        raise InvalidPartitionError(f"code {text!r} is not a restricted-growth string")
    return code
