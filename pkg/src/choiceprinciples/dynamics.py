"""Discrete-time replicator and replicator-mutator dynamics on the type simplex."""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .choice import ALL_TYPES, PlayerType
from .preferences import PreferenceType

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10**6
KERNEL_SCHEMES = ("per-target", "uniform")


class NonPositiveFitnessError(ValueError):
    """Mean population fitness is not positive, so the step map is undefined."""


@dataclass(frozen=True)
class MutationKernel:
    """Row-stochastic matrix: ``q[j][i]`` = P(offspring of type j is of type i)."""

    labels: tuple[str, ...]
    q: np.ndarray
    eps: float
    scheme: str


def _as_type(t) -> PlayerType:
    return t if isinstance(t, PlayerType) else PlayerType.parse(str(t))


def mutation_kernel(types: Sequence = ALL_TYPES, eps: float = 0.001,
                    scheme: str = "per-target") -> MutationKernel:
    """Local mutation kernel over the 4 preference x 2 epistemic types.

    Preference and epistemic type mutate independently; each epistemic
    mutation flips to the other epistemic type with probability ``eps``.
    ``scheme`` sets how a preference mutates:

    per-target
        each of the 3 other preference types is reached with probability
        ``eps`` (so a specific type differing in both components has
        probability ``eps**2``); requires ``eps <= 1/3``.
    uniform
        with probability ``eps`` the preference is redrawn uniformly from
        the 3 other types (``eps/3`` each); valid for all ``eps`` in [0, 1].
    """
    types = [_as_type(t) for t in types]
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    if scheme not in KERNEL_SCHEMES:
        raise ValueError(f"unknown kernel scheme {scheme!r}; choose from {KERNEL_SCHEMES}")
    if len(types) != len(ALL_TYPES) or set(types) != set(ALL_TYPES):
        raise ValueError("the mutation kernel needs exactly the 8 player types")
    n_other = len(PreferenceType) - 1
    if scheme == "per-target":
        if eps > 1.0 / n_other:
            raise ValueError(f"per-target kernel needs eps <= 1/{n_other}, got {eps}")
        pref_stay, pref_move = 1.0 - n_other * eps, eps
    else:
        pref_stay, pref_move = 1.0 - eps, eps / n_other
    q = np.empty((len(types), len(types)))
    for j, src in enumerate(types):
        for i, dst in enumerate(types):
            p_pref = pref_stay if src.pref is dst.pref else pref_move
            p_epi = 1.0 - eps if src.epistemic is dst.epistemic else eps
            q[j, i] = p_pref * p_epi
    return MutationKernel(tuple(t.label for t in types), q, eps, scheme)


def _matrix(m) -> np.ndarray:
    return np.asarray(getattr(m, "fitness", m), dtype=float)


def _kernel_matrix(k, n: int) -> np.ndarray:
    q = np.asarray(getattr(k, "q", k), dtype=float)
    if q.shape != (n, n):
        raise ValueError(f"kernel shape {q.shape} does not match {n} types")
    return q


def _selection(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """x_i f_i / mean fitness, for a single state or a stack of states."""
    f = x @ a.T
    mean = np.sum(x * f, axis=-1, keepdims=True)
    if np.any(mean <= 0):
        raise NonPositiveFitnessError("mean fitness must be positive")
    return x * f / mean


def replicator_step(m, x) -> np.ndarray:
    """One step of x_i' = x_i f_i / fbar with f = m x."""
    a = _matrix(m)
    y = _selection(a, np.asarray(x, dtype=float))
    return y / y.sum(axis=-1, keepdims=True)


def replicator_mutator_step(m, k, x) -> np.ndarray:
    """Selection followed by mutation: x' = q^T (x * f) / fbar."""
    a = _matrix(m)
    q = _kernel_matrix(k, a.shape[0])
    y = _selection(a, np.asarray(x, dtype=float)) @ q
    return y / y.sum(axis=-1, keepdims=True)


@dataclass
class Trajectory:
    """Recorded states of one run.

    ``steps[r]`` is the iteration at which ``states[r]`` was reached. When
    ``converged`` is set, one more step from the last state moves it by
    less than the tolerance in L1.
    """

    states: np.ndarray
    steps: list[int]
    converged: bool
    iterations: int
    labels: tuple[str, ...] | None = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, run: int | None = None) -> str:
        buf = io.StringIO()
        write_trajectory_csv(buf, [self], self.labels, first_run=0 if run is None else run)
        return buf.getvalue()


def _step_fn(m, k):
    if k is None:
        return lambda x: replicator_step(m, x)
    return lambda x: replicator_mutator_step(m, k, x)


def run_dynamics(m, x0, k=None, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 record_every: int = 1) -> Trajectory:
    """Iterate the (mutator-)replicator map until the L1 step is below ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    step = _step_fn(m, k)
    x = np.asarray(x0, dtype=float)
    x = x / x.sum()
    states, steps = [x], [0]
    converged = False
    t = 0
    for t in range(1, max_iter + 1):
        y = step(x)
        if np.abs(y - x).sum() < tol:
            converged = True
            break
        x = y
        if t % record_every == 0:
            states.append(x)
            steps.append(t)
    last = t - 1 if converged else t
    if steps[-1] != last:
        states.append(x)
        steps.append(last)
    return Trajectory(np.array(states), steps, converged, t, getattr(m, "labels", None))


@dataclass
class BatchResult:
    """Final states of many independent runs, indexed like the initial states."""

    initial: np.ndarray
    final: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray
    labels: tuple[str, ...] | None = None
    info: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        groups = attractors(self.final[self.converged]) if self.converged.any() else []
        return {
            "labels": None if self.labels is None else list(self.labels),
            "info": self.info,
            "runs": [
                {"index": r, "converged": bool(c), "iterations": int(n),
                 "initial": x0.tolist(), "final": x.tolist()}
                for r, (x0, x, c, n) in enumerate(
                    zip(self.initial, self.final, self.converged, self.iterations))
            ],
            "attractors": [
                {"state": state.tolist(), "count": count} for state, count in groups
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def run_batch(m, initial, k=None, tol: float = DEFAULT_TOL,
              max_iter: int = DEFAULT_MAX_ITER, workers: int = 1) -> BatchResult:
    """Run the dynamics from every row of ``initial``, vectorized over runs.

    Each run stops once its own L1 step falls below ``tol``; the reported
    final state is the last state before that step, as in ``run_dynamics``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    x0 = np.atleast_2d(np.asarray(initial, dtype=float))
    x0 = x0 / x0.sum(axis=1, keepdims=True)
    step = _step_fn(m, k)

    def run(lo: int, hi: int):
        x = x0[lo:hi].copy()
        iterations = np.full(hi - lo, max_iter)
        done = np.zeros(hi - lo, dtype=bool)
        active = np.arange(hi - lo)
        for t in range(1, max_iter + 1):
            y = step(x[active])
            small = np.abs(y - x[active]).sum(axis=1) < tol
            finished = active[small]
            done[finished] = True
            iterations[finished] = t
            keep = ~small
            x[active[keep]] = y[keep]
            active = active[keep]
            if active.size == 0:
                break
        return x, done, iterations

    bounds = np.linspace(0, len(x0), max(workers, 1) + 1).round().astype(int)
    tasks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda task: run(*task), tasks))
    else:
        parts = [run(*task) for task in tasks]
    final = np.concatenate([p[0] for p in parts])
    converged = np.concatenate([p[1] for p in parts])
    iterations = np.concatenate([p[2] for p in parts])
    return BatchResult(x0, final, converged, iterations, getattr(m, "labels", None))


def sample_initial_states(count: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draws from the simplex via normalized exponentials."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if dim < 2:
        raise ValueError("dim must be >= 2")
    e = rng.standard_exponential((count, dim))
    return e / e.sum(axis=1, keepdims=True)


def attractors(states, tol: float = 1e-6) -> list[tuple[np.ndarray, int]]:
    """Group final states lying within ``tol`` (L1) of a group's first member.

    Groups are sorted by size, largest first.
    """
    groups: list[list] = []
    for x in np.atleast_2d(states):
        for group in groups:
            if np.abs(group[0] - x).sum() < tol:
                group[1] += 1
                break
        else:
            groups.append([x, 1])
    groups.sort(key=lambda g: -g[1])
    return [(g[0], g[1]) for g in groups]


def write_trajectory_csv(stream, trajectories: Sequence[Trajectory], labels=None,
                         first_run: int = 0):
    """One row per recorded state: run, iteration, then one column per type."""
    writer = csv.writer(stream, lineterminator="\n")
    if labels is None:
        labels = trajectories[0].labels or [f"x{i}" for i in range(trajectories[0].states.shape[1])]
    writer.writerow(["run", "iteration", *labels])
    for r, traj in enumerate(trajectories, start=first_run):
        for it, x in zip(traj.steps, traj.states):
            writer.writerow([r, it, *(f"{v:.6f}" for v in x)])
