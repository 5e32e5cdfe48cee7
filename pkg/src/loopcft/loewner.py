"""Chordal Loewner evolution: forward maps, zipper traces, driving samplers.

The forward map integrates the half-plane Loewner equation with classic
fourth-order Runge-Kutta steps and step-doubling error control, halving the
step near the moving singularity.  The trace is reconstructed by the zipper
scheme: backward composition of elementary vertical-slit maps, vectorized so
the whole K-point trace costs O(K^2) array operations.

Randomness policy: SLE driving functions come from numpy's PCG64 stream via
``Generator.standard_normal``, so a seed fixes the output byte for byte.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "DrivingFunction",
    "Trace",
    "SwallowedError",
    "forward_map",
    "trace",
    "trace_tip",
    "sample_sle_driving",
    "write_trace_csv",
    "write_driving_csv",
]


@dataclass(frozen=True)
class DrivingFunction:
    """Real driver sampled on a uniform time grid, starting from 0."""

    dt: float
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("grid step must be positive")
        if not self.values:
            raise ValueError("driver needs at least the initial sample")
        if self.values[0] != 0.0:
            raise ValueError("drivers start at W_0 = 0")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("driver samples must be finite")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def zero(cls, total_time: float, dt: float) -> "DrivingFunction":
        steps = max(1, round(total_time / dt))
        return cls(dt=dt, values=(0.0,) * (steps + 1))

    @property
    def steps(self) -> int:
        return len(self.values) - 1

    @property
    def total_time(self) -> float:
        return self.steps * self.dt

    def at(self, t: float) -> float:
        """Linear interpolation between grid samples."""
        if t <= 0:
            return self.values[0]
        position = t / self.dt
        index = int(position)
        if index >= self.steps:
            return self.values[-1]
        frac = position - index
        return self.values[index] * (1 - frac) + self.values[index + 1] * frac

    def scaled(self, factor: float) -> "DrivingFunction":
        """Brownian rescaling t -> factor * W(t / factor^2)."""
        return DrivingFunction(
            dt=self.dt * factor * factor,
            values=tuple(factor * v for v in self.values),
        )


@dataclass(frozen=True)
class Trace:
    """Approximate Loewner trace; points live in the closed upper half-plane."""

    dt: float
    points: tuple[complex, ...]

    def __post_init__(self):
        if self.points[0] != 0:
            raise ValueError("traces start at the origin")
        if any(p.imag < 0 for p in self.points):
            raise ValueError("trace points must stay in the closed upper half-plane")

    @property
    def tip(self) -> complex:
        return self.points[-1]


class SwallowedError(ArithmeticError):
    """The tracked point was absorbed by the hull before the target time."""

    def __init__(self, time: float, point: complex):
        super().__init__(f"point swallowed near t = {time:.6g} (last position {point:.6g})")
        self.time = time
        self.point = point


# ---------------------------------------------------------------------------
# forward Loewner map
# ---------------------------------------------------------------------------


def _rk4_step(w: DrivingFunction, t: float, z: complex, h: float) -> complex:
    def f(s: float, y: complex) -> complex:
        return 2.0 / (y - w.at(s))

    k1 = f(t, z)
    k2 = f(t + h / 2, z + h / 2 * k1)
    k3 = f(t + h / 2, z + h / 2 * k2)
    k4 = f(t + h, z + h * k3)
    return z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def forward_map(w: DrivingFunction, z: complex, T: float) -> complex:
    """Solve dg/dt = 2/(g - W_t), g(0) = z, up to time T.

    Steps are halved whenever one full step and two half steps disagree by
    more than the error budget, which concentrates effort near the moving
    singularity.  A point coming within 10*sqrt(dt) of the driving value is
    reported as swallowed, with the time at which that happened.
    """
    if T < 0:
        raise ValueError("target time must be nonnegative")
    if T > w.total_time + 1e-12:
        raise ValueError("driver not defined up to the requested time")
    if T == 0:
        return z
    swallow_radius = 10.0 * math.sqrt(w.dt)
    tol = 1e-10
    t = 0.0
    g = complex(z)
    h = w.dt
    while t < T:
        if abs(g - w.at(t)) < swallow_radius:
            raise SwallowedError(t, g)
        h = min(h, T - t)
        coarse = _rk4_step(w, t, g, h)
        half = _rk4_step(w, t, g, h / 2)
        fine = _rk4_step(w, t + h / 2, half, h / 2)
        if abs(fine - coarse) > tol and h > 1e-12:
            h /= 2
            continue
        g = fine
        t += h
        if h < w.dt:
            h *= 2  # relax the step back toward the grid scale
    if abs(g - w.at(T)) < swallow_radius:
        raise SwallowedError(T, g)
    return g


# ---------------------------------------------------------------------------
# zipper trace
# ---------------------------------------------------------------------------


def _upper_sqrt(values: np.ndarray) -> np.ndarray:
    roots = np.sqrt(values.astype(complex))
    return np.where(roots.imag < 0, -roots, roots)


def trace(w: DrivingFunction) -> Trace:
    """All K trace points by the vectorized backward zipper, plus the origin.

    The k-th point applies the elementary slit maps for steps k, k-1, ..., 1
    to the origin; running every k in one sliced array pass keeps the whole
    reconstruction at O(K^2) numpy operations.
    """
    K = w.steps
    dt = w.dt
    increments = np.diff(np.asarray(w.values))
    ys = np.zeros(K + 1, dtype=complex)
    for j in range(K, 0, -1):
        ys[j:] = _upper_sqrt(ys[j:] ** 2 - 4.0 * dt) + increments[j - 1]
    ys.imag[ys.imag < 0] = 0.0  # roundoff guard; the branch choice is above
    return Trace(dt=dt, points=tuple(complex(v) for v in ys))


def trace_tip(w: DrivingFunction) -> complex:
    """Only the final trace point, in O(K) scalar steps."""
    increments = np.diff(np.asarray(w.values))
    y = 0j
    for j in range(w.steps, 0, -1):
        root = cmath.sqrt(y * y - 4.0 * w.dt)
        if root.imag < 0:
            root = -root
        y = root + increments[j - 1]
    return y


# ---------------------------------------------------------------------------
# SLE driving sampler
# ---------------------------------------------------------------------------


def sample_sle_driving(
    kappa: float, T: float, dt: float, seed: int
) -> DrivingFunction:
    """Discrete Brownian driver with speed kappa from a seeded PCG64 stream."""
    if not 0 < kappa <= 4:
        raise ValueError(f"kappa must lie in (0, 4], got {kappa}")
    if dt <= 0 or T <= 0:
        raise ValueError("time step and horizon must be positive")
    steps = max(1, round(T / dt))
    rng = np.random.Generator(np.random.PCG64(seed))
    jumps = math.sqrt(kappa * dt) * rng.standard_normal(steps)
    walk = np.concatenate(([0.0], np.cumsum(jumps)))
    return DrivingFunction(dt=dt, values=tuple(float(v) for v in walk))


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------


def write_trace_csv(path: str | Path, tr: Trace) -> int:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "re", "im"])
        for k, point in enumerate(tr.points):
            writer.writerow([repr(k * tr.dt), repr(point.real), repr(point.imag)])
    return len(tr.points)


def write_driving_csv(path: str | Path, w: DrivingFunction) -> int:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "W"])
        for k, value in enumerate(w.values):
            writer.writerow([repr(k * w.dt), repr(value)])
    return len(w.values)
