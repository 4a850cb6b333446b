"""Detection and refinement of the two trajectory events the bounds govern:
first orthogonality (overlap reaches 0, distance sqrt(2)) and first antipodal
reach (distance 2 under the zero reference phase).

Both events minimize a nonnegative functional of the overlap, so detection is
a grid scan for local minima below a coarse threshold followed by
golden-section refinement. Refinement re-integrates locally: the state at an
off-grid time is one short unitary step away from the nearest recorded grid
state, which keeps the evaluation error at the single-step level regardless
of how far into the run the event sits.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .propagate import Trajectory, _step_midpoint

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

KINDS = ("orthogonal", "antipodal")

NEAR_MISS_CEILING = 1e-3


@dataclass(frozen=True)
class EventQuery:
    kind: str
    tolerance: float = 1e-6
    refine_iterations: int = 60
    coarse_threshold: float = 0.05

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.refine_iterations < 1:
            raise ValueError("refine_iterations must be at least 1")


@dataclass(frozen=True)
class EventResult:
    triggered: bool
    time: float | None
    bracket_width: float | None
    functional_value: float
    kind: str
    note: str | None = None


def _golden_min(f, a, b, max_iter, width_goal):
    """Golden-section minimization on [a, b]; returns (x, f(x), final width,
    per-iteration widths). Widths shrink by the golden ratio each step."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    widths = []
    for _ in range(max_iter):
        if b - a <= width_goal:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        widths.append(b - a)
    if fc < fd:
        return c, fc, b - a, widths
    return d, fd, b - a, widths


def _state_at(traj: Trajectory, h, t: float) -> np.ndarray:
    """State at an off-grid time: one midpoint-exponential step from the
    nearest earlier recorded state (unitary, so safe whatever produced the
    trajectory)."""
    k = min(int(t / traj.dt), len(traj.times) - 1)
    tk = traj.times[k]
    psi = traj.states[k]
    if t > tk + 1e-15:
        psi = _step_midpoint(h, psi, tk, t - tk, traj.hbar, None)
    return psi


def _scan_and_refine(traj: Trajectory, h, q: EventQuery, functional):
    if traj.states is None:
        raise ValueError("event detection needs a trajectory with recorded states")
    phi0 = traj.initial_state.amplitudes

    samples = functional(traj.overlaps)
    n = len(samples) - 1

    def f_at(t):
        return float(functional(np.vdot(_state_at(traj, h, t), phi0)))

    threshold = max(q.coarse_threshold, q.tolerance)
    width_goal = traj.horizon * 1e-9
    best = float(np.min(samples))
    for k in range(1, n + 1):
        if samples[k] > threshold:
            continue
        left_ok = samples[k] <= samples[k - 1]
        right_ok = k == n or samples[k] <= samples[k + 1]
        if not (left_ok and right_ok):
            continue
        a = traj.times[k - 1]
        b = traj.times[min(k + 1, n)]
        t_min, f_min, width, _ = _golden_min(f_at, a, b, q.refine_iterations, width_goal)
        best = min(best, f_min)
        if f_min <= q.tolerance:
            return EventResult(
                triggered=True,
                time=float(t_min),
                bracket_width=float(width),
                functional_value=float(f_min),
                kind=q.kind,
            )

    note = None
    if q.kind == "orthogonal" and q.tolerance < best <= NEAR_MISS_CEILING:
        note = (
            f"minimum overlap {best:.3g} sits between the tolerance and "
            f"{NEAR_MISS_CEILING:g}; the step grid may have missed a narrower crossing"
        )
        warnings.warn(note, stacklevel=3)
    return EventResult(
        triggered=False,
        time=None,
        bracket_width=None,
        functional_value=float(best),
        kind=q.kind,
        note=note,
    )


def first_orthogonal(traj: Trajectory, h, q: EventQuery | None = None) -> EventResult:
    """First time |<psi(t)|phi0>| falls to the tolerance, or the achieved
    minimum if it never does. Phase-invariant, so no beta policy enters."""
    q = q if q is not None else EventQuery(kind="orthogonal")
    if q.kind != "orthogonal":
        raise ValueError(f"query kind {q.kind!r} does not match first_orthogonal")
    return _scan_and_refine(traj, h, q, np.abs)


def first_antipodal(traj: Trajectory, h, q: EventQuery | None = None) -> EventResult:
    """First time the zero-phase distance d(t, 0) reaches 2 (functional
    2 - d), or the supremum-distance record if it never does."""
    q = q if q is not None else EventQuery(kind="antipodal")
    if q.kind != "antipodal":
        raise ValueError(f"query kind {q.kind!r} does not match first_antipodal")
    if "zero" not in traj.distances:
        raise ValueError("antipodal detection needs the trajectory to carry the zero beta policy")

    def functional(o):
        return 2.0 - np.sqrt(np.clip(2.0 - 2.0 * np.real(o), 0.0, 4.0))

    return _scan_and_refine(traj, h, q, functional)
