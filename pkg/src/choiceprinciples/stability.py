"""Evolutionary and neutral stability of pure types in a meta-game."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

STRICT = "strict"
NEUTRAL_SECOND = "neutral-with-strict-second"
DEFAULT_ETA = 1e-9


def _matrix(m) -> np.ndarray:
    a = np.asarray(getattr(m, "fitness", m), dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"meta-game must be square, got shape {a.shape}")
    return a


@dataclass
class StabilityReport:
    """Outcome of the ESS test for one pure type.

    ``violating_invaders`` lists ``(j, condition)`` for every mutant ``j``
    that breaks the ESS conditions: ``"strict"`` when ``j`` does strictly
    better against the incumbent, ``"neutral-with-strict-second"`` when it
    ties against the incumbent and does at least as well against itself.
    """

    index: int
    is_ess: bool
    is_neutrally_stable: bool
    violating_invaders: list[tuple[int, str]] = field(default_factory=list)

    def to_dict(self, labels=None) -> dict:
        name = (lambda k: labels[k]) if labels is not None else (lambda k: k)
        return {
            "type": name(self.index),
            "is_ess": self.is_ess,
            "is_neutrally_stable": self.is_neutrally_stable,
            "violating_invaders": [
                {"invader": name(j), "condition": cond} for j, cond in self.violating_invaders
            ],
        }

    def to_json(self, labels=None) -> str:
        return json.dumps(self.to_dict(labels))


def is_ess(m, i: int, eta: float = DEFAULT_ETA) -> StabilityReport:
    """Test pure type ``i`` against every pure mutant.

    ``i`` is an ESS iff for all ``j != i`` either ``m[i][i] > m[j][i]``, or
    the two tie and ``m[i][j] > m[j][j]``. Entries closer than ``eta`` are
    treated as equal. Exact meta-games are fine with the default; pass a
    noise-sized ``eta`` for sampled matrices.
    """
    a = _matrix(m)
    n = a.shape[0]
    if not 0 <= i < n:
        raise IndexError(f"type index {i} out of range for {n} types")
    violations = []
    neutral = True
    for j in range(n):
        if j == i:
            continue
        first = a[i, i] - a[j, i]
        if first > eta:
            continue
        if first < -eta:
            violations.append((j, STRICT))
            neutral = False
            continue
        second = a[i, j] - a[j, j]
        if second > eta:
            continue
        violations.append((j, NEUTRAL_SECOND))
        if second < -eta:
            neutral = False
    return StabilityReport(i, not violations, neutral, violations)


def is_neutrally_stable(m, i: int, eta: float = DEFAULT_ETA) -> bool:
    return is_ess(m, i, eta).is_neutrally_stable


def ess_set(m, eta: float = DEFAULT_ETA) -> list[int]:
    """Indices of all pure ESSs, ascending."""
    a = _matrix(m)
    return [i for i in range(a.shape[0]) if is_ess(a, i, eta).is_ess]


def stability_reports(m, eta: float = DEFAULT_ETA) -> list[StabilityReport]:
    a = _matrix(m)
    return [is_ess(a, i, eta) for i in range(a.shape[0])]


def can_invade(m, residents, invader: int, eta: float = DEFAULT_ETA) -> bool:
    """Whether mutant ``invader`` is not repelled by the resident mix.

    ``residents`` maps type index to population share (or is a full
    distribution vector). The mix ``x`` repels ``y`` only if ``y`` earns
    strictly less against ``x``, or ties and earns strictly less against
    itself; anything else means ``y`` can enter (at least by drift).
    """
    a = _matrix(m)
    n = a.shape[0]
    if isinstance(residents, dict):
        x = np.zeros(n)
        for k, share in residents.items():
            x[k] = share
    else:
        x = np.asarray(residents, dtype=float)
    if x.shape != (n,) or np.any(x < 0) or abs(x.sum() - 1) > 1e-12:
        raise ValueError("residents must be a distribution over the meta-game's types")
    y = np.zeros(n)
    y[invader] = 1.0
    against_residents = y @ a @ x - x @ a @ x
    if against_residents > eta:
        return True
    if against_residents < -eta:
        return False
    return y @ a @ y - x @ a @ y >= -eta
