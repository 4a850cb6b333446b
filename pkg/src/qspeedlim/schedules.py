"""Interpolation schedules for annealing-style Hamiltonians.

A schedule is a pair of functions (f, g) on the unit interval with
f(0) = 1, f(1) = 0, g(0) = 0, g(1) = 1, both continuous and g >= 0,
plus an optional extra-term envelope h with h(0) = h(1) = 0.
"""

from __future__ import annotations

import json
import warnings

import numpy as np
from scipy.integrate import quad

BOUNDARY_TOL = 1e-12


class Schedule:
    """Interpolation envelope; build via :meth:`linear`, :meth:`polynomial`
    or :meth:`tabulated`."""

    def __init__(self, kind, f, g, h=None, power=None, knots=None):
        self.kind = kind
        self._f = f
        self._g = g
        self._h = h
        self.power = power
        self.knots = knots
        self._validate_boundaries()

    def _validate_boundaries(self):
        checks = [
            ("f(0)", self.f(0.0), 1.0),
            ("f(1)", self.f(1.0), 0.0),
            ("g(0)", self.g(0.0), 0.0),
            ("g(1)", self.g(1.0), 1.0),
        ]
        if self._h is not None:
            checks += [("h(0)", self.h(0.0), 0.0), ("h(1)", self.h(1.0), 0.0)]
        for name, got, want in checks:
            if abs(got - want) > BOUNDARY_TOL:
                raise ValueError(f"schedule boundary violated: {name} = {got!r}, expected {want}")

    @classmethod
    def linear(cls, h=None) -> "Schedule":
        """f = 1 - tau, g = tau."""
        return cls("linear", lambda tau: 1.0 - tau, lambda tau: tau, h=h)

    @classmethod
    def polynomial(cls, power: float, h=None) -> "Schedule":
        """g = tau**power with f = 1 - g; power must be positive."""
        if not power > 0:
            raise ValueError(f"power must be positive, got {power}")
        return cls(
            "poly",
            lambda tau: 1.0 - tau**power,
            lambda tau: tau**power,
            h=h,
            power=float(power),
        )

    @classmethod
    def tabulated(cls, knots, h=None) -> "Schedule":
        """Piecewise-linear schedule through rows (tau, f, g).

        Knots must start at tau = 0 and end at tau = 1; g must be
        nonnegative at every knot (piecewise linearity then gives g >= 0
        everywhere). f may dip below zero but that is unusual enough to
        warrant a warning.
        """
        table = np.asarray(knots, dtype=float)
        if table.ndim != 2 or table.shape[1] != 3 or table.shape[0] < 2:
            raise ValueError("knots must be an (m, 3) table of (tau, f, g) rows with m >= 2")
        taus = table[:, 0]
        if np.any(np.diff(taus) <= 0):
            raise ValueError("knot positions must be strictly increasing")
        if abs(taus[0]) > BOUNDARY_TOL or abs(taus[-1] - 1.0) > BOUNDARY_TOL:
            raise ValueError("knots must span tau = 0 to tau = 1")
        if np.any(table[:, 2] < 0):
            raise ValueError("g must be nonnegative at every knot")
        if np.any(table[:, 1] < 0):
            warnings.warn("tabulated schedule has f < 0 at some knots", stacklevel=2)
        f = lambda tau: float(np.interp(tau, taus, table[:, 1]))
        g = lambda tau: float(np.interp(tau, taus, table[:, 2]))
        return cls("tabulated", f, g, h=h, knots=table)

    @property
    def has_extra_envelope(self) -> bool:
        return self._h is not None

    def f(self, tau: float) -> float:
        return float(self._f(tau))

    def g(self, tau: float) -> float:
        return float(self._g(tau))

    def h(self, tau: float) -> float:
        if self._h is None:
            raise ValueError("schedule has no extra-term envelope")
        return float(self._h(tau))

    def to_dict(self) -> dict:
        if self._h is not None:
            raise ValueError("the schedule file format carries no extra-term envelope")
        if self.kind == "linear":
            return {"kind": "linear"}
        if self.kind == "poly":
            return {"kind": "poly", "power": self.power}
        return {"kind": "tabulated", "knots": self.knots.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        kind = data.get("kind")
        if kind == "linear":
            return cls.linear()
        if kind == "poly":
            if "power" not in data:
                raise ValueError("poly schedule needs a 'power' field")
            return cls.polynomial(data["power"])
        if kind == "tabulated":
            if "knots" not in data:
                raise ValueError("tabulated schedule needs a 'knots' field")
            return cls.tabulated(data["knots"])
        raise ValueError(f"unknown schedule kind {kind!r}")


def schedule_integral(s: Schedule, upto: float = 1.0) -> float:
    """Integral of g from 0 to `upto` (a point in [0, 1]).

    Analytic presets go through adaptive quadrature (absolute error below
    1e-10); tabulated schedules use the exact trapezoid of the
    piecewise-linear interpolant.
    """
    if not 0.0 <= upto <= 1.0 + BOUNDARY_TOL:
        raise ValueError(f"upto must lie in [0, 1], got {upto}")
    upto = min(upto, 1.0)
    if s.kind == "tabulated":
        taus = s.knots[:, 0]
        gvals = s.knots[:, 2]
        inside = taus[taus < upto]
        pts = np.append(inside, upto)
        vals = np.append(gvals[: len(inside)], s.g(upto))
        return float(np.trapezoid(vals, pts))
    value, _ = quad(s.g, 0.0, upto, epsabs=1e-12, limit=200)
    return float(value)


def load_schedule(path) -> Schedule:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return Schedule.from_dict(data)
