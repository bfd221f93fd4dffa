"""Choice principles: maximin expected utility per player type.

A flat belief reduces maximin expected utility to expected-utility
maximization against the uniform mix; the full belief simplex reduces it
to plain maximin, since the minimum of a linear function over the simplex
sits at a vertex.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .games import Game
from .preferences import PreferenceType, SubjectiveMatrix, transform, transform_payoffs


class EpistemicType(enum.Enum):
    FLAT = "flat"
    SIMPLEX = "simplex"

    @property
    def index(self) -> int:
        return 0 if self is EpistemicType.FLAT else 1

    @property
    def tag(self) -> str:
        return "FlatBelief" if self is EpistemicType.FLAT else "FullSimplex"


@dataclass(frozen=True, order=False)
class PlayerType:
    """A pair (preference type, epistemic type)."""

    pref: PreferenceType
    epistemic: EpistemicType

    @property
    def index(self) -> int:
        return 4 * self.epistemic.index + self.pref.index

    @property
    def label(self) -> str:
        return f"{self.pref.value}-{self.epistemic.value}"

    def __str__(self) -> str:
        return self.label

    @classmethod
    def parse(cls, label: str) -> "PlayerType":
        try:
            pref, epistemic = label.strip().split("-")
            return cls(PreferenceType(pref), EpistemicType(epistemic))
        except ValueError:
            raise ValueError(f"unknown player type {label!r}") from None


# Canonical order: index = 4 * epistemic index + preference index.
ALL_TYPES: tuple[PlayerType, ...] = tuple(
    PlayerType(pref, epi) for epi in EpistemicType for pref in PreferenceType
)
SIMPLEX_TYPES = ALL_TYPES[4:]
FLAT_TYPES = ALL_TYPES[:4]


@dataclass(frozen=True)
class Belief:
    """Probability ``p`` that the co-player plays action 0.

    A ``fractions.Fraction`` keeps expected-utility ties exact.
    """

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"belief must lie in [0, 1], got {self.p}")


def action_values(u: SubjectiveMatrix | np.ndarray, epistemic: EpistemicType) -> np.ndarray:
    """Value of each own action under the epistemic type's belief set.

    Works on a single 2x2 table or on a stack of shape (..., 2, 2).
    """
    table = u.as_array() if isinstance(u, SubjectiveMatrix) else np.asarray(u, dtype=float)
    if epistemic is EpistemicType.FLAT:
        return (table[..., 0] + table[..., 1]) / 2
    return np.minimum(table[..., 0], table[..., 1])


def _argmax_set(values) -> frozenset[int]:
    best = max(values)
    return frozenset(i for i, v in enumerate(values) if v == best)


def choose(game: Game, t: PlayerType) -> frozenset[int]:
    """Set of actions maximizing ``action_values``; both on exact ties."""
    values = action_values(transform(game, t.pref), t.epistemic)
    return _argmax_set(values.tolist())


def choose_with_belief(game: Game, pref: PreferenceType, b: Belief) -> frozenset[int]:
    """Expected-utility maximizers of ``pref``'s table under belief ``b``."""
    u = transform(game, pref).u
    # Compare through the per-column action gaps: for integer payoffs these
    # are exact, so transforms that shift columns tie in exactly the same games.
    gap = b.p * (u[0][0] - u[1][0]) + (1 - b.p) * (u[0][1] - u[1][1])
    if gap > 0:
        return frozenset({0})
    if gap < 0:
        return frozenset({1})
    return frozenset({0, 1})


def mixed_choice(payoffs: np.ndarray, t: PlayerType) -> np.ndarray:
    """Uniform mix over the choice set for each game in a (n, 2, 2) stack.

    Returns an (n, 2) array whose rows are (1, 0), (0, 1) or (0.5, 0.5).
    """
    values = action_values(transform_payoffs(payoffs, t.pref), t.epistemic)
    best = values == values.max(axis=-1, keepdims=True)
    return best / best.sum(axis=-1, keepdims=True)
