"""Meta-games: average fitness of player types over a class of games.

Two builders produce the same matrix: an exact one that averages over the
full enumeration of games with uniform weights, and a Monte-Carlo one that
plays every ordered pair of types on the same sampled games.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .choice import ALL_TYPES, EpistemicType, PlayerType, choose, mixed_choice
from .games import (
    Game,
    GameClassConfig,
    enumerate_payoffs,
    game_count,
    make_rng,
    sample_payoffs,
    worker_seed,
)
from .preferences import PreferenceType

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1 << 15
PREF_LABELS = tuple(pref.value for pref in PreferenceType)


@dataclass
class MetaGame:
    """Square matrix of average fitness of row type against column type.

    ``stderr`` holds per-entry Monte-Carlo standard errors when the matrix
    was estimated by sampling; ``info`` records how it was built.
    """

    labels: tuple[str, ...]
    fitness: np.ndarray
    stderr: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self.fitness = np.asarray(self.fitness, dtype=float)
        n = len(self.labels)
        if self.fitness.shape != (n, n):
            raise ValueError(f"fitness must be {n}x{n}, got shape {self.fitness.shape}")
        if len(set(self.labels)) != n:
            raise ValueError("labels must be distinct")
        if not np.all(np.isfinite(self.fitness)):
            raise ValueError("fitness entries must be finite")
        if self.stderr is not None:
            self.stderr = np.asarray(self.stderr, dtype=float)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise KeyError(f"no type {label!r} in meta-game {self.labels}") from None

    def entry(self, row, col) -> float:
        return float(self.fitness[self.index(row), self.index(col)])

    def submatrix(self, labels: Sequence) -> "MetaGame":
        idx = [self.index(label) for label in labels]
        stderr = None if self.stderr is None else self.stderr[np.ix_(idx, idx)]
        return MetaGame(
            tuple(self.labels[i] for i in idx),
            self.fitness[np.ix_(idx, idx)],
            stderr,
            dict(self.info),
        )

    # serialization

    def to_dict(self) -> dict:
        data = {"labels": list(self.labels), "fitness": self.fitness.tolist()}
        if self.stderr is not None:
            data["stderr"] = self.stderr.tolist()
        if self.info:
            data["info"] = self.info
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "MetaGame":
        stderr = data.get("stderr")
        return cls(data["labels"], np.array(data["fitness"], dtype=float),
                   None if stderr is None else np.array(stderr, dtype=float),
                   data.get("info", {}))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["type", *self.labels])
        for label, row in zip(self.labels, self.fitness):
            writer.writerow([label, *(f"{v:.6f}" for v in row)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "MetaGame":
        rows = [row for row in csv.reader(io.StringIO(text)) if row]
        header, body = rows[0], rows[1:]
        labels = header[1:]
        if [row[0] for row in body] != labels:
            raise ValueError("CSV row labels must match the header")
        return cls(labels, np.array([[float(v) for v in row[1:]] for row in body]))

    @classmethod
    def read(cls, path) -> "MetaGame":
        """Load a meta-game from a JSON or CSV file (sniffed by content)."""
        text = Path(path).read_text()
        if text.lstrip().startswith("{"):
            return cls.from_dict(json.loads(text))
        return cls.from_csv(text)


def match_fitness(game: Game, row: PlayerType, col: PlayerType) -> float:
    """Expected fitness of ``row`` against ``col`` with uniform tie-breaking."""
    row_actions = sorted(choose(game, row))
    col_actions = sorted(choose(game, col))
    total = sum(game.payoff[a][b] for a in row_actions for b in col_actions)
    return total / (len(row_actions) * len(col_actions))


def _pair_fitness(payoffs: np.ndarray, types: Sequence[PlayerType]) -> np.ndarray:
    """Per-game fitness of every ordered type pair, shape (n, T, T)."""
    p = np.asarray(payoffs, dtype=float)
    mixes = np.stack([mixed_choice(p, t) for t in types])  # (T, n, 2)
    against = np.einsum("rgi,gij->rgj", mixes, p)
    return np.einsum("rgj,cgj->grc", against, mixes)


def _check_types(types: Sequence[PlayerType]) -> tuple[PlayerType, ...]:
    types = tuple(types)
    if not types:
        raise ValueError("need at least one player type")
    if len(set(types)) != len(types):
        raise ValueError("player types must be distinct")
    return types


def _split(total: int, parts: int) -> list[tuple[int, int]]:
    bounds = np.linspace(0, total, parts + 1).round().astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]


def _run_workers(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(*task) for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda task: fn(*task), tasks))


def build_metagame_exact(types: Sequence[PlayerType], N: int, workers: int = 1) -> MetaGame:
    """Average fitness over all (N+1)^4 games, each with weight (N+1)^-4.

    The enumeration is split into ``workers`` contiguous ranges; partial
    sums are reduced in range order, so output is bit-reproducible for a
    fixed worker count.
    """
    types = _check_types(types)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    total = game_count(N)

    def partial(start: int, stop: int) -> np.ndarray:
        acc = np.zeros((len(types), len(types)))
        for lo in range(start, stop, CHUNK_SIZE):
            chunk = enumerate_payoffs(N, lo, min(lo + CHUNK_SIZE, stop))
            acc += _pair_fitness(chunk, types).sum(axis=0)
        return acc

    sums = np.zeros((len(types), len(types)))
    for part in _run_workers(partial, _split(total, workers), workers):
        sums += part
    info = {"mode": "exact", "N": N, "workers": workers, "games": total}
    return MetaGame(tuple(t.label for t in types), sums / total, info=info)


def build_metagame_mc(types: Sequence[PlayerType], cfg: GameClassConfig,
                      workers: int = 1) -> MetaGame:
    """Sample-mean fitness over ``cfg.sample_count`` sampled games.

    Every ordered pair is evaluated on the same games. Worker ``w`` draws
    its share of the games from its own stream seeded ``seed ^ w``; with a
    single worker the stream is the one ``sample_game`` would consume.
    """
    types = _check_types(types)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    n_types = len(types)

    def partial(worker: int, count: int):
        rng = make_rng(worker_seed(cfg.seed, worker))
        total = np.zeros((n_types, n_types))
        squares = np.zeros((n_types, n_types))
        done = 0
        while done < count:
            size = min(CHUNK_SIZE, count - done)
            values = _pair_fitness(sample_payoffs(rng, cfg.max_payoff, size), types)
            total += values.sum(axis=0)
            squares += (values ** 2).sum(axis=0)
            done += size
        return total, squares

    shares = [b - a for a, b in _split(cfg.sample_count, workers)]
    total = np.zeros((n_types, n_types))
    squares = np.zeros((n_types, n_types))
    for part_total, part_squares in _run_workers(partial, list(enumerate(shares)), workers):
        total += part_total
        squares += part_squares

    n = cfg.sample_count
    mean = total / n
    if n > 1:
        variance = np.maximum(squares - n * mean ** 2, 0.0) / (n - 1)
        stderr = np.sqrt(variance / n)
    else:
        stderr = np.full_like(mean, np.nan)
    info = {"mode": "mc", "N": cfg.max_payoff, "samples": n, "seed": cfg.seed,
            "workers": workers}
    return MetaGame(tuple(t.label for t in types), mean, stderr, info)


def _block_lookup(full: MetaGame):
    try:
        return {
            (pref, epi): full.index(PlayerType(pref, epi).label)
            for pref in PreferenceType for epi in EpistemicType
        }
    except KeyError as exc:
        raise ValueError(f"meta-game lacks one of the 8 player types: {exc}") from None


def _check_probability(name: str, value: float):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def correlated_pref_metagame(full: MetaGame, q: float) -> MetaGame:
    """Preference-type meta-game when co-players always share an epistemic type.

    ``q`` is the probability that both players hold the full belief simplex.
    """
    _check_probability("q", q)
    pos = _block_lookup(full)
    prefs = list(PreferenceType)
    m = np.zeros((4, 4))
    for r, tau in enumerate(prefs):
        for c, sigma in enumerate(prefs):
            simplex = full.fitness[pos[tau, EpistemicType.SIMPLEX], pos[sigma, EpistemicType.SIMPLEX]]
            flat = full.fitness[pos[tau, EpistemicType.FLAT], pos[sigma, EpistemicType.FLAT]]
            m[r, c] = q * simplex + (1 - q) * flat
    info = {"derived": "correlated", "q": q, "source": full.info}
    return MetaGame(PREF_LABELS, m, info=info)


def uncorrelated_pref_metagame(full: MetaGame, p: float) -> MetaGame:
    """Preference-type meta-game when each player independently holds the
    full belief simplex with probability ``p`` (flat belief otherwise)."""
    _check_probability("p", p)
    pos = _block_lookup(full)
    weight = {EpistemicType.SIMPLEX: p, EpistemicType.FLAT: 1 - p}
    prefs = list(PreferenceType)
    m = np.zeros((4, 4))
    for r, tau in enumerate(prefs):
        for c, sigma in enumerate(prefs):
            m[r, c] = sum(
                weight[e] * weight[f] * full.fitness[pos[tau, e], pos[sigma, f]]
                for e in EpistemicType for f in EpistemicType
            )
    info = {"derived": "uncorrelated", "p": p, "source": full.info}
    return MetaGame(PREF_LABELS, m, info=info)


def probability_grid(grid_step: float) -> np.ndarray:
    """The grid {0, step, 2*step, ..., 1}."""
    if not 0.0 < grid_step <= 0.01:
        raise ValueError(f"grid_step must lie in (0, 0.01], got {grid_step}")
    steps = int(np.floor(1.0 / grid_step + 1e-9))
    grid = np.arange(steps + 1) * grid_step
    if grid[-1] < 1.0 - 1e-12:
        grid = np.append(grid, 1.0)
    return np.minimum(grid, 1.0)


def find_regret_threshold(full: MetaGame, grid_step: float, eta: float = 1e-9) -> float:
    """Smallest grid ``p`` from which on Regret is the unique ESS of the
    uncorrelated preference meta-game.

    Returns ``1 + grid_step`` when Regret is not the unique ESS at p = 1.
    """
    from .stability import ess_set

    grid = probability_grid(grid_step)
    _block_lookup(full)
    regret = PREF_LABELS.index(PreferenceType.REGRET.value)
    threshold = 1.0 + grid_step
    for p in grid[::-1]:
        if ess_set(uncorrelated_pref_metagame(full, float(p)), eta=eta) != [regret]:
            break
        threshold = float(p)
    return threshold


def full_metagame(N: int = 10, mode: str = "exact", sample_count: int = 50000,
                   seed: int = 0, workers: int = 1) -> MetaGame:
    """Full 8-type meta-game over the canonical type order."""
    if mode == "exact":
        return build_metagame_exact(ALL_TYPES, N, workers)
    if mode == "mc":
        return build_metagame_mc(ALL_TYPES, GameClassConfig(N, sample_count, seed), workers)
    raise ValueError(f"unknown mode {mode!r}")
