"""Subjective preference types: transformations of a game's fitness table."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .games import Game


class PreferenceType(enum.Enum):
    """The four preference types, in canonical index order."""

    ACTUAL = "pi"
    ALTRUISTIC = "alt"
    COMPETITIVE = "com"
    REGRET = "reg"

    @property
    def index(self) -> int:
        return _PREF_ORDER.index(self)

    @property
    def tag(self) -> str:
        return self.name.capitalize()

    @classmethod
    def parse(cls, text: str) -> "PreferenceType":
        for pref in cls:
            if text in (pref.value, pref.name.lower(), pref.tag):
                return pref
        raise ValueError(f"unknown preference type {text!r}")


_PREF_ORDER = list(PreferenceType)


@dataclass(frozen=True)
class SubjectiveMatrix:
    """Transformed utilities ``u[i][j]`` of own action i against co-player action j."""

    pref: PreferenceType
    u: tuple[tuple[float, float], tuple[float, float]]

    def as_array(self) -> np.ndarray:
        return np.array(self.u, dtype=float)

    def to_dict(self) -> dict:
        return {"pref": self.pref.tag, "u": [list(row) for row in self.u]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def transform_payoffs(payoffs: np.ndarray, pref: PreferenceType) -> np.ndarray:
    """Apply ``pref`` to a stack of fitness tables of shape (..., 2, 2).

    The regret transform returns negative regret, so every entry is <= 0
    and each column has a 0 at the best reply.
    """
    p = np.asarray(payoffs)
    if pref is PreferenceType.ACTUAL:
        return p.copy()
    co_player = np.swapaxes(p, -1, -2)
    if pref is PreferenceType.ALTRUISTIC:
        return p + co_player
    if pref is PreferenceType.COMPETITIVE:
        return p - co_player
    if pref is PreferenceType.REGRET:
        return p - p.max(axis=-2, keepdims=True)
    raise ValueError(f"unknown preference type {pref!r}")


def transform(game: Game, pref: PreferenceType) -> SubjectiveMatrix:
    u = transform_payoffs(np.array(game.payoff), pref)
    return SubjectiveMatrix(pref, tuple(tuple(row) for row in u.tolist()))
