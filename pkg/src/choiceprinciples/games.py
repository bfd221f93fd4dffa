"""Symmetric 2x2 fitness games with integer payoffs in {0, ..., N}.

A game stores only the row player's fitness table ``payoff[i][j]``; the
column player's fitness at profile ``(i, j)`` is ``payoff[j][i]``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator

import numpy as np

# Upper bound for the number of enumerated games (signed 64-bit counter).
MAX_GAME_COUNT = np.iinfo(np.int64).max


@dataclass(frozen=True)
class Game:
    """One symmetric 2x2 fitness game.

    ``payoff[i][j]`` is the fitness of a player choosing action ``i``
    against a co-player choosing action ``j``.
    """

    payoff: tuple[tuple[float, float], tuple[float, float]]

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.payoff)
        if len(rows) != 2 or any(len(row) != 2 for row in rows):
            raise ValueError("a game needs exactly 2x2 payoffs")
        if not all(np.isfinite(v) for row in rows for v in row):
            raise ValueError("payoffs must be finite")
        object.__setattr__(self, "payoff", rows)

    @classmethod
    def from_flat(cls, p00, p01, p10, p11) -> "Game":
        return cls(((p00, p01), (p10, p11)))

    def as_array(self) -> np.ndarray:
        return np.array(self.payoff, dtype=float)

    def to_dict(self) -> dict:
        return {"payoffs": [list(row) for row in self.payoff]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Game":
        return cls(tuple(tuple(row) for row in data["payoffs"]))


@dataclass(frozen=True)
class GameClassConfig:
    """Parameters of a sampled game class.

    max_payoff : payoffs are drawn uniformly from {0, ..., max_payoff}
    sample_count : number of games to sample
    seed : seed of the random stream (unsigned 64-bit)
    """

    max_payoff: int = 10
    sample_count: int = 50000
    seed: int = 0

    def __post_init__(self):
        if self.max_payoff < 0:
            raise ValueError(f"max_payoff must be >= 0, got {self.max_payoff}")
        if self.sample_count < 1:
            raise ValueError(f"sample_count must be >= 1, got {self.sample_count}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def make_rng(seed: int) -> np.random.Generator:
    """The random stream used throughout the package (PCG64)."""
    return np.random.default_rng(seed)


def worker_seed(seed: int, worker: int) -> int:
    """Seed of worker ``worker``'s independent stream."""
    return seed ^ worker


def sample_game(rng: np.random.Generator, N: int) -> Game:
    """Draw one game with i.i.d. uniform payoffs in {0, ..., N}.

    Exactly four draws are consumed, in the order
    payoff[0][0], payoff[0][1], payoff[1][0], payoff[1][1].
    """
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    draws = rng.integers(0, N + 1, size=4)
    return Game.from_flat(*(int(v) for v in draws))


def sample_payoffs(rng: np.random.Generator, N: int, count: int) -> np.ndarray:
    """Vectorized ``sample_game``: array of shape (count, 2, 2).

    Consumes the stream exactly like ``count`` successive calls to
    ``sample_game``.
    """
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    return rng.integers(0, N + 1, size=(count, 4)).reshape(count, 2, 2)


def game_count(N: int) -> int:
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    count = (N + 1) ** 4
    if count > MAX_GAME_COUNT:
        raise OverflowError(f"(N+1)^4 = {count} games exceeds the 64-bit counter")
    return count


def enumerate_games(N: int) -> Iterator[Game]:
    """Yield all (N+1)^4 games in lexicographic order of the flat payoffs."""
    game_count(N)
    for flat in itertools.product(range(N + 1), repeat=4):
        yield Game.from_flat(*flat)


def enumerate_payoffs(N: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Games ``start`` to ``stop`` of the enumeration as a (n, 2, 2) int array."""
    total = game_count(N)
    stop = total if stop is None else min(stop, total)
    index = np.arange(start, stop, dtype=np.int64)
    base = N + 1
    digits = np.empty((index.size, 4), dtype=np.int64)
    for k in range(3, -1, -1):
        index, digits[:, k] = np.divmod(index, base)
    return digits.reshape(-1, 2, 2)
