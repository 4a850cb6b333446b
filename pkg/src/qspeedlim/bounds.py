"""Characteristic times, survival lower bounds, and inequality margin checks.

Every inequality here is a necessary condition: it forbids an event (reaching
orthogonality, reaching the antipodal state, decaying below a survival floor)
before a moment-determined time, but never guarantees the event happens. An
event that does not occur within the simulated horizon is therefore recorded
as consistent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .algebra import HermitianOperator, StateVector, expectation, variance_sqrt
from .propagate import Trajectory
from .schedules import Schedule, schedule_integral

CONTEXTS = ("time-independent", "qac")

# sqrt(2 - 2 Re o) turns eps-level rounding into ~1e-8 noise on the distance
# even when the dynamics are exact, so margin checks keep this additive floor
FLOAT_FLOOR = 1e-7


@dataclass(frozen=True)
class MomentPair:
    """Mean and spread of a Hamiltonian in a fixed state."""

    energy: float
    spread: float

    def __post_init__(self):
        if self.spread < 0:
            raise ValueError(f"spread must be nonnegative, got {self.spread}")


def state_moments(op: HermitianOperator, s: StateVector) -> MomentPair:
    return MomentPair(energy=expectation(op, s), spread=variance_sqrt(op, s))


@dataclass(frozen=True)
class CharacteristicTimes:
    """Earliest times the two events are allowed at; inf when unreachable."""

    t_any: float
    t_orth: float


def char_times_ti(m: MomentPair, hbar: float) -> CharacteristicTimes:
    """Fixed-Hamiltonian characteristic times 2 hbar / sqrt(spread^2 +
    energy^2) and hbar sqrt(2) / spread."""
    denom_any = math.hypot(m.spread, m.energy)
    t_any = 2.0 * hbar / denom_any if denom_any > 0 else math.inf
    t_orth = hbar * math.sqrt(2.0) / m.spread if m.spread > 0 else math.inf
    return CharacteristicTimes(t_any=t_any, t_orth=t_orth)


def char_times_qac(m: MomentPair, g_integral: float, hbar: float) -> CharacteristicTimes:
    """Annealing characteristic times; the unit-interval integral of g
    rescales both (consistently with the inequalities both times come from)."""
    if not g_integral > 0:
        raise ValueError(f"g_integral must be positive, got {g_integral}")
    denom_any = g_integral * math.hypot(m.spread, m.energy)
    t_any = 2.0 * hbar / denom_any if denom_any > 0 else math.inf
    denom_orth = g_integral * m.spread
    t_orth = hbar * math.sqrt(2.0) / denom_orth if denom_orth > 0 else math.inf
    return CharacteristicTimes(t_any=t_any, t_orth=t_orth)


class SurvivalBound(NamedTuple):
    value: float
    vacuous: bool


def survival_lower_bound_ti(t: float, spread: float, hbar: float) -> SurvivalBound:
    """(1 - spread^2 t^2 / (2 hbar^2))^2, clamped to 0 and flagged vacuous
    once the parenthesis goes negative."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    x = (spread * t) ** 2 / (2.0 * hbar**2)
    return _clamped_square_bound(x)


def survival_lower_bound_qac(t: float, spread_P: float, sched: Schedule, T: float,
                             hbar: float) -> SurvivalBound:
    """Annealing form: the schedule integral int_0^t g(tau/T) dtau replaces t."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if t > T * (1.0 + 1e-12):
        raise ValueError(f"time {t} exceeds the interpolation window {T}")
    G = T * schedule_integral(sched, upto=min(t / T, 1.0))
    x = (spread_P * G) ** 2 / (2.0 * hbar**2)
    return _clamped_square_bound(x)


def _clamped_square_bound(x: float) -> SurvivalBound:
    # the eps pad keeps an exact touch of zero (x = 1 up to rounding) from
    # being misreported as vacuous
    if x > 1.0 + 1e-12:
        return SurvivalBound(value=0.0, vacuous=True)
    return SurvivalBound(value=max(1.0 - x, 0.0) ** 2, vacuous=False)


class DecayDiagnostic(NamedTuple):
    value: float
    regime_ok: bool


def exp_decay_diagnostic(t: float, spread: float, energy: float, hbar: float) -> DecayDiagnostic:
    """exp(-spread^2 t^2 / hbar^2) with a short-time regime flag. Diagnostic
    only: the underlying relation has no sharp constant, so this is never
    asserted as a hard bound."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    value = math.exp(-((spread * t) ** 2) / hbar**2)
    regime_ok = t * math.hypot(spread, energy) <= 0.1 * hbar
    return DecayDiagnostic(value=value, regime_ok=regime_ok)


@dataclass(frozen=True)
class Margin:
    """One inequality check: satisfied means lhs <= rhs + slack."""

    name: str
    lhs: float
    rhs: float
    slack: float
    note: str | None = None

    @property
    def satisfied(self) -> bool:
        return self.lhs <= self.rhs + self.slack

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class BoundReport:
    context: str
    moments: MomentPair
    characteristic: CharacteristicTimes
    margins: tuple
    numerical_slack: dict
    events: dict = field(default_factory=dict)
    measured_orth_time: float | None = None
    measured_antipodal_time: float | None = None
    provenance: dict = field(default_factory=dict)

    @property
    def all_satisfied(self) -> bool:
        return all(m.satisfied for m in self.margins)

    @property
    def violations(self) -> tuple:
        return tuple(m for m in self.margins if not m.satisfied)

    def to_dict(self) -> dict:
        def clean(x):
            if x is None or isinstance(x, (bool, str)):
                return x
            x = float(x)
            return x if math.isfinite(x) else None

        events = {}
        for kind, ev in self.events.items():
            events[kind] = {
                "triggered": ev.triggered,
                "time": clean(ev.time),
                "bracket_width": clean(ev.bracket_width),
                "functional_value": clean(ev.functional_value),
                "note": ev.note,
            }
        return {
            "context": self.context,
            "moments": {"energy": clean(self.moments.energy),
                        "spread": clean(self.moments.spread)},
            "characteristic_times": {"t_any": clean(self.characteristic.t_any),
                                     "t_orth": clean(self.characteristic.t_orth)},
            "events": events,
            "measured_orth_time": clean(self.measured_orth_time),
            "measured_antipodal_time": clean(self.measured_antipodal_time),
            "margins": [
                {"name": m.name, "lhs": clean(m.lhs), "rhs": clean(m.rhs),
                 "slack": clean(m.slack), "margin": clean(m.margin),
                 "satisfied": m.satisfied, "note": m.note}
                for m in self.margins
            ],
            "numerical_slack": {k: clean(v) for k, v in self.numerical_slack.items()},
            "provenance": self.provenance,
        }


def write_report_json(report: BoundReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _worst_sample_margin(name, lhs_array, rhs_array, slack, times, note_prefix=""):
    gap = lhs_array - rhs_array
    k = int(np.argmax(gap))
    note = f"{note_prefix}worst sample at t = {times[k]:.9g}"
    return Margin(name=name, lhs=float(lhs_array[k]), rhs=float(rhs_array[k]),
                  slack=slack, note=note)


def check_inequalities(traj: Trajectory, moments: MomentPair, context: str,
                       events: dict | None = None, schedule: Schedule | None = None,
                       total_time: float | None = None,
                       provenance: dict | None = None) -> BoundReport:
    """Evaluate every applicable inequality against one trajectory.

    `context` selects the family: "time-independent" checks the fixed-H
    characteristic times and survival floor; "qac" (requires `schedule` and
    `total_time`) checks the schedule-rescaled forms. `moments` are the
    moments of the fixed H (time-independent) or of the problem term (qac) in
    the start state. `events` maps "orthogonal"/"antipodal" to EventResults
    when event detection ran.
    """
    if context not in CONTEXTS:
        raise ValueError(f"context must be one of {CONTEXTS}, got {context!r}")
    if context == "time-independent" and (schedule is not None or total_time is not None):
        raise ValueError("schedule arguments given for a time-independent context")
    if context == "qac" and (schedule is None or total_time is None):
        raise ValueError("qac context needs schedule and total_time")

    hbar = traj.hbar
    events = dict(events or {})
    slack_map = {label: traj.numerical_slack(label) for label in traj.distances}
    floor = math.sqrt(2.0 * traj.norm_max_dev) + FLOAT_FLOOR
    margins = []

    # master inequality, one worst-sample entry per beta policy
    for label, d in traj.distances.items():
        margins.append(_worst_sample_margin(
            f"general:{label}", hbar * d, traj.rhs_integrals[label],
            slack_map[label], traj.times))

    # survival floor over all samples
    if context == "time-independent":
        x = (moments.spread * traj.times) ** 2 / (2.0 * hbar**2)
        char = char_times_ti(moments, hbar)
    else:
        g_grid = np.array([schedule.g(t / total_time) for t in traj.times])
        G = cumulative_trapezoid(g_grid, dx=traj.dt, initial=0.0)
        x = (moments.spread * G) ** 2 / (2.0 * hbar**2)
        char = char_times_qac(moments, schedule_integral(schedule), hbar)
    bound = np.clip(1.0 - x, 0.0, None) ** 2
    margins.append(_worst_sample_margin("survival", bound, traj.survival,
                                        floor, traj.times))

    orth = events.get("orthogonal")
    anti = events.get("antipodal")
    measured_orth = orth.time if orth is not None and orth.triggered else None
    measured_anti = anti.time if anti is not None and anti.triggered else None

    def untriggered(name, lhs):
        return Margin(name=name, lhs=lhs, rhs=math.inf, slack=0.0,
                      note="not triggered; consistent (necessary condition)")

    if context == "time-independent":
        # event times against characteristic times, in time units
        if orth is not None:
            if orth.triggered:
                margins.append(Margin("orthogonal_time", lhs=char.t_orth,
                                      rhs=orth.time, slack=orth.bracket_width))
            else:
                margins.append(untriggered("orthogonal_time", char.t_orth))
        if anti is not None:
            if anti.triggered:
                margins.append(Margin("antipodal_time", lhs=char.t_any,
                                      rhs=anti.time, slack=anti.bracket_width))
            else:
                margins.append(untriggered("antipodal_time", char.t_any))
    else:
        # schedule-weighted forms: at an event time t_e the accumulated rhs
        # integral must already exceed hbar*sqrt(2) (orthogonal, any policy)
        # or 2*hbar (antipodal, zero policy)
        if orth is not None:
            if orth.triggered:
                best_label = min(
                    traj.rhs_integrals,
                    key=lambda lab: np.interp(orth.time, traj.times,
                                              traj.rhs_integrals[lab]))
                rhs = float(np.interp(orth.time, traj.times,
                                      traj.rhs_integrals[best_label]))
                slack = (slack_map[best_label]
                         + orth.bracket_width * traj.integrand_max[best_label])
                margins.append(Margin("qac_orthogonal", lhs=hbar * math.sqrt(2.0),
                                      rhs=rhs, slack=slack,
                                      note=f"policy {best_label}"))
            else:
                margins.append(untriggered("qac_orthogonal", hbar * math.sqrt(2.0)))
        if anti is not None:
            if anti.triggered and "zero" in traj.rhs_integrals:
                rhs = float(np.interp(anti.time, traj.times,
                                      traj.rhs_integrals["zero"]))
                slack = (slack_map["zero"]
                         + anti.bracket_width * traj.integrand_max["zero"])
                margins.append(Margin("qac_antipodal", lhs=2.0 * hbar, rhs=rhs,
                                      slack=slack, note="policy zero"))
            elif not anti.triggered:
                margins.append(untriggered("qac_antipodal", 2.0 * hbar))

    return BoundReport(
        context=context,
        moments=moments,
        characteristic=char,
        margins=tuple(margins),
        numerical_slack=slack_map,
        events=events,
        measured_orth_time=measured_orth,
        measured_antipodal_time=measured_anti,
        provenance=dict(provenance or {}),
    )
