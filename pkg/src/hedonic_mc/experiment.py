"""Monte Carlo core-size experiments.

For each game size ``n`` and each index ``g`` in ``0..games_per_size-1`` the
game is ``random_game(seed, n, g)``; its core size is tallied into an
integer histogram. Work is cut into chunks of consecutive indices, so the
histogram is the same whatever the worker count or the chunk schedule, and
an interrupted run resumed from its checkpoint ends bit-identical to an
uninterrupted one.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional

from .errors import ResumeError
from .game import check_players
from .generator import all_games_array, check_seed, random_batch
from .solver import MODES, core_sizes

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
CSV_HEADER = ("players", "core_size", "count")


@dataclass(frozen=True)
class ExperimentConfig:
    sizes: tuple = (2, 3, 4, 5, 6, 7)
    games_per_size: int = 100_000
    seed: int = 0
    mode: str = "full"
    worker_count: int = 1
    checkpoint_interval: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        for n in self.sizes:
            check_players(n)
            if n < 2:
                raise ValueError(f"experiment sizes must be within 2..16, got {n}")
        if len(set(self.sizes)) != len(self.sizes):
            raise ValueError(f"duplicate sizes in {self.sizes}")
        if self.games_per_size < 1:
            raise ValueError("games_per_size must be at least 1")
        check_seed(self.seed)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.worker_count < 1 or self.checkpoint_interval < 1:
            raise ValueError("worker_count and checkpoint_interval must be positive")

    def fingerprint(self) -> str:
        """Hash of everything that determines the output.

        Worker count and checkpoint interval only affect scheduling, so they
        are left out and a run may be resumed with different values.
        """
        key = {
            "sizes": list(self.sizes),
            "games_per_size": self.games_per_size,
            "seed": self.seed,
            "mode": self.mode,
        }
        return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()


@dataclass
class CoreSizeHistogram:
    """Per-size counts of games by core size."""

    counts: Dict[int, Counter] = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, data: Mapping[int, Mapping[int, int]]) -> "CoreSizeHistogram":
        return cls({int(n): Counter({int(k): int(v) for k, v in row.items() if v}) for n, row in data.items()})

    def add(self, n: int, sizes: Iterable[int]) -> None:
        row = self.counts.setdefault(int(n), Counter())
        row.update(int(s) for s in sizes)

    def add_counts(self, n: int, counts: Mapping[int, int]) -> None:
        row = self.counts.setdefault(int(n), Counter())
        for k, v in counts.items():
            if v:
                row[int(k)] += int(v)

    def sizes(self) -> List[int]:
        return sorted(self.counts)

    def total(self, n: int) -> int:
        return sum(self.counts.get(n, Counter()).values())

    def max_core_size(self, n: Optional[int] = None) -> Optional[int]:
        rows = [self.counts[n]] if n is not None else list(self.counts.values())
        keys = [k for row in rows for k, v in row.items() if v]
        return max(keys) if keys else None

    def row(self, n: int) -> Dict[int, int]:
        return dict(sorted(self.counts.get(n, Counter()).items()))

    def frequencies(self, n: int) -> Dict[int, float]:
        total = self.total(n)
        return {k: v / total for k, v in self.row(n).items()} if total else {}

    def to_dict(self) -> dict:
        return {str(n): {str(k): v for k, v in self.row(n).items()} for n in self.sizes()}

    def __eq__(self, other):
        if not isinstance(other, CoreSizeHistogram):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    # -- CSV -------------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for n in self.sizes():
            for k, v in self.row(n).items():
                if v:
                    w.writerow((n, k, v))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CoreSizeHistogram":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise ValueError(f"results CSV must start with header {','.join(CSV_HEADER)}")
        hist = cls()
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                n, k, v = (int(x) for x in row)
            except ValueError:
                raise ValueError(f"line {line}: expected three integers, got {row}") from None
            if k < 0 or v < 0:
                raise ValueError(f"line {line}: negative value")
            hist.add_counts(n, {k: v})
        return hist


def merge_histograms(a: CoreSizeHistogram, b: CoreSizeHistogram) -> CoreSizeHistogram:
    out = CoreSizeHistogram()
    for h in (a, b):
        for n, row in h.counts.items():
            out.add_counts(n, row)
    return out


# -- running -------------------------------------------------------------


def _solve_chunk(task):
    seed, n, start, stop, mode = task
    sizes = core_sizes(random_batch(seed, n, start, stop), mode)
    return n, start, stop, dict(Counter(sizes.tolist()))


def checkpoint_save(path, config: ExperimentConfig, progress: Mapping[int, int], histogram: CoreSizeHistogram) -> None:
    """Atomically write the checkpoint JSON (version, config, progress, partial counts)."""
    path = Path(path)
    blob = {
        "version": CHECKPOINT_VERSION,
        "config_hash": config.fingerprint(),
        "config": asdict(config),
        "progress": {str(n): int(done) for n, done in progress.items()},
        "counts": histogram.to_dict(),
    }
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(blob, indent=1, sort_keys=True))
    os.replace(tmp, path)


def checkpoint_resume(path, config: ExperimentConfig):
    """Load a checkpoint for ``config``; returns ``(progress, histogram)``.

    Raises :class:`ResumeError` on a missing, unreadable or mismatched file.
    """
    path = Path(path)
    try:
        blob = json.loads(path.read_text())
    except FileNotFoundError:
        raise ResumeError(f"checkpoint {path} does not exist") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise ResumeError(f"checkpoint {path} is unreadable: {exc}") from None
    if not isinstance(blob, dict) or blob.get("version") != CHECKPOINT_VERSION:
        raise ResumeError(f"checkpoint {path} has unsupported version {blob.get('version') if isinstance(blob, dict) else None!r}")
    if blob.get("config_hash") != config.fingerprint():
        raise ResumeError(f"checkpoint {path} was written for a different configuration")
    try:
        progress = {int(n): int(v) for n, v in blob["progress"].items()}
        hist = CoreSizeHistogram.from_mapping(
            {int(n): {int(k): int(v) for k, v in row.items()} for n, row in blob["counts"].items()}
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ResumeError(f"checkpoint {path} is corrupt: {exc}") from None
    for n, done in progress.items():
        if n not in config.sizes or not 0 <= done <= config.games_per_size or hist.total(n) != done:
            raise ResumeError(f"checkpoint {path} is corrupt: inconsistent progress for n={n}")
    return progress, hist


def run_experiment(
    config: ExperimentConfig,
    checkpoint: Optional[os.PathLike] = None,
    resume: bool = False,
    stop_after: Optional[int] = None,
) -> CoreSizeHistogram:
    """Run (or continue) an experiment and return the histogram of completed games.

    With ``checkpoint`` set, progress is written after every
    ``checkpoint_interval`` games and once more on exit, including exits by
    exception. ``resume=True`` continues from that file. ``stop_after`` ends
    the run early after roughly that many new games (a whole number of
    chunks), leaving a resumable checkpoint.
    """
    if resume:
        if checkpoint is None:
            raise ResumeError("resume requested without a checkpoint path")
        progress, hist = checkpoint_resume(checkpoint, config)
    else:
        progress, hist = {}, CoreSizeHistogram()
    for n in config.sizes:
        progress.setdefault(n, 0)
        hist.counts.setdefault(n, Counter())

    step = config.checkpoint_interval
    tasks = [
        (config.seed, n, start, min(start + step, config.games_per_size), config.mode)
        for n in config.sizes
        for start in range(progress[n], config.games_per_size, step)
    ]
    if stop_after is not None:
        budget, kept = stop_after, []
        for t in tasks:
            if budget <= 0:
                break
            kept.append(t)
            budget -= t[3] - t[2]
        tasks = kept

    def record(result):
        n, start, stop, counts = result
        assert progress[n] == start, "chunks must complete in index order"
        hist.add_counts(n, counts)
        progress[n] = stop
        if checkpoint is not None:
            checkpoint_save(checkpoint, config, progress, hist)
        log.debug("n=%d: %d/%d games", n, stop, config.games_per_size)

    try:
        if config.worker_count == 1:
            for t in tasks:
                record(_solve_chunk(t))
        else:
            with ProcessPoolExecutor(max_workers=config.worker_count) as pool:
                for result in pool.map(_solve_chunk, tasks):
                    record(result)
    finally:
        if checkpoint is not None:
            checkpoint_save(checkpoint, config, progress, hist)
    return hist


def census(n: int, mode: str = "full") -> CoreSizeHistogram:
    """Exact core-size distribution over every game of size ``n <= 3``."""
    sizes = core_sizes(all_games_array(n), mode)
    hist = CoreSizeHistogram()
    hist.add(n, sizes.tolist())
    return hist
