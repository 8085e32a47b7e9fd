"""Recursive relative-band clamping of noisy time series.

A clamped series may move by at most a fraction ``epsilon`` of its previous
clamped level per step: the raw value is clipped to the closed interval
between ``previous * (1 - epsilon)`` and ``previous * (1 + epsilon)``. For a
positive previous level this is exactly

    raw >= previous :  min(raw, (1 + epsilon) * previous)
    raw <  previous :  max(raw, (1 - epsilon) * previous)

and the interval form extends the same one-step band to negative levels
without losing the betweenness property (the output always lies between the
previous level and the raw value). A zero previous level passes the raw
value through and re-seeds the recursion.

The same primitive serves two roles: clamping the smallest singular
value(s) of the per-date pricing matrix, and secondary smoothing of the
solved rate and volatility components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

MODES = ("min-only", "all")


@dataclass(frozen=True)
class ClampState:
    """Carries the previous clamped level between steps of one series."""

    epsilon: float
    previous: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValueError(f"epsilon must be positive and finite, "
                             f"got {self.epsilon!r}")
        if self.previous is not None and not math.isfinite(self.previous):
            raise ValueError(f"previous level must be finite, got {self.previous!r}")

    @property
    def initialized(self) -> bool:
        return self.previous is not None


def clamp(state: ClampState, raw: float) -> tuple[float, ClampState]:
    """One recursion step; returns (clamped value, advanced state)."""
    raw = float(raw)
    if not math.isfinite(raw):
        raise ValueError(f"raw value must be finite, got {raw!r}")
    previous = state.previous
    if previous is None or previous == 0.0:
        return raw, replace(state, previous=raw)
    lo = previous * (1.0 - state.epsilon)
    hi = previous * (1.0 + state.epsilon)
    if lo > hi:  # negative previous level flips the edges
        lo, hi = hi, lo
    clamped = min(max(raw, lo), hi)
    return clamped, replace(state, previous=clamped)


@dataclass(frozen=True)
class RegularizedSvd:
    """Clamped singular spectrum and the mode that produced it."""

    d_bar: np.ndarray
    mode: str


def regularize_singulars(
    d: np.ndarray,
    states: tuple[ClampState, ...],
    mode: str = "min-only",
) -> tuple[RegularizedSvd, tuple[ClampState, ...]]:
    """Clamp a singular spectrum against its per-index history.

    ``min-only`` clamps just the smallest (last) singular value, leaving the
    rest untouched; ``all`` clamps every index independently.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 1 or d.size == 0:
        raise ValueError(f"expected a non-empty 1-d spectrum, got shape {d.shape}")
    if len(states) != d.size:
        raise ValueError(f"{len(states)} clamp states for a spectrum of "
                         f"{d.size} values")
    d_bar = d.copy()
    new_states = list(states)
    indices = range(d.size) if mode == "all" else (d.size - 1,)
    for i in indices:
        d_bar[i], new_states[i] = clamp(states[i], float(d[i]))
    return RegularizedSvd(d_bar, mode), tuple(new_states)


def secondary_regularize(series, delta: float) -> list[float]:
    """Fold the clamp over a finite series, seeding on its first element."""
    state = ClampState(epsilon=delta)
    out: list[float] = []
    for value in series:
        clamped, state = clamp(state, float(value))
        out.append(clamped)
    return out
