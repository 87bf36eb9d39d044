"""Slow, independently written reference implementations.

Nothing here shares code with the package: partitions are built
recursively as lists of frozensets and preferences are looked up through a
dictionary keyed by (player, frozenset).
"""

import itertools
from fractions import Fraction
from math import factorial

import mpmath


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in set_partitions(rest):
        for k in range(len(p)):
            yield p[:k] + [p[k] | {first}] + p[k + 1:]
        yield [frozenset([first])] + p


def preference_table(ranks):
    """{(player, coalition): rank} with players numbered 1..n."""
    n = len(ranks)
    table = {}
    for i in range(1, n + 1):
        others = [p for p in range(1, n + 1) if p != i]
        for j in range(1, 2 ** (n - 1) + 1):
            bits = format(j - 1, f"0{n - 1}b") if n > 1 else ""
            members = frozenset([i] + [o for o, b in zip(others, bits) if b == "1"])
            table[i, members] = int(ranks[i - 1][j - 1])
    return table


def canonical(partition, n):
    """Restricted-growth code of a partition given as a list of sets."""
    label, code = {}, []
    for player in range(1, n + 1):
        block = next(b for b in partition if player in b)
        label.setdefault(block, len(label) + 1)
        code.append(label[block])
    return tuple(code)


def brute_force_core(ranks):
    """Sorted canonical codes of every core partition."""
    n = len(ranks)
    players = list(range(1, n + 1))
    pref = preference_table(ranks)
    coalitions = [frozenset(c) for r in range(n, 0, -1) for c in itertools.combinations(players, r)]
    core = []
    for part in set_partitions(players):
        home = {i: b for b in part for i in b}
        blocked = any(all(pref[i, s] > pref[i, home[i]] for i in s) for s in coalitions)
        if not blocked:
            core.append(canonical(part, n))
    return sorted(core)


def bell_dobinski(n):
    """Dobinski's series evaluated at high precision and rounded."""
    with mpmath.workdps(60):
        return int(mpmath.nint(mpmath.nsum(lambda k: k**n / mpmath.factorial(k), [0, mpmath.inf]) / mpmath.e))


def bell_by_counting(n):
    return sum(1 for _ in set_partitions(list(range(n))))


def game_count(n):
    return factorial(2 ** (n - 1)) ** n


def exact_moments(values_weights):
    """(mean, unbiased variance, skewness^2, kurtosis) from {value: weight}."""
    total = sum(values_weights.values())
    mean = Fraction(sum(v * w for v, w in values_weights.items()), total)
    cm = {p: sum(w * (v - mean) ** p for v, w in values_weights.items()) / total for p in (2, 3, 4)}
    return mean, cm[2] * total / (total - 1), cm[3] ** 2 / cm[2] ** 3, cm[4] / cm[2] ** 2
