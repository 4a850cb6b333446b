"""Hamiltonian builders: transverse-field starters, diagonal Ising problems,
random Gaussian-ensemble draws, and schedule-interpolated combinations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .algebra import DIM_CAP, HermitianOperator
from .schedules import Schedule

_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


def _check_qubit_count(n: int) -> int:
    if n < 1:
        raise ValueError(f"need at least one qubit, got n = {n}")
    if 2**n > DIM_CAP:
        raise ValueError(f"2**{n} exceeds the dimension cap {DIM_CAP}")
    return 2**n


def transverse_initial(n: int) -> HermitianOperator:
    """sum_i (1 - sigma_x^i) / 2 on n qubits.

    Spectrum is {0, 1, ..., n}; the unique ground state is the uniform
    superposition over computational basis states, at energy zero.
    """
    dim = _check_qubit_count(n)
    H = np.zeros((dim, dim), dtype=complex)
    site = (_I2 - _SX) / 2.0
    for i in range(n):
        H += np.kron(np.kron(np.eye(2**i), site), np.eye(2 ** (n - 1 - i)))
    return HermitianOperator(H)


def _spin_table(n: int) -> np.ndarray:
    # Row q holds sigma_z^q eigenvalues over the computational basis;
    # qubit 0 is the leftmost tensor factor, bit 0 maps to spin +1.
    idx = np.arange(2**n)
    table = np.empty((n, 2**n))
    for q in range(n):
        bits = (idx >> (n - 1 - q)) & 1
        table[q] = 1.0 - 2.0 * bits
    return table


@dataclass(frozen=True)
class IsingInstance:
    """A classical Ising cost function: couplings J_ij and local fields h_i."""

    n: int
    couplings: tuple = ()
    fields: tuple = ()

    def __post_init__(self):
        _check_qubit_count(self.n)
        object.__setattr__(
            self, "couplings", tuple((int(i), int(j), float(J)) for i, j, J in self.couplings)
        )
        object.__setattr__(self, "fields", tuple((int(i), float(h)) for i, h in self.fields))
        seen = set()
        for i, j, _ in self.couplings:
            if not 0 <= i < j < self.n:
                raise ValueError(f"coupling indices must satisfy 0 <= i < j < n, got ({i}, {j})")
            if (i, j) in seen:
                raise ValueError(f"duplicate coupling pair ({i}, {j})")
            seen.add((i, j))
        for i, _ in self.fields:
            if not 0 <= i < self.n:
                raise ValueError(f"field index {i} out of range for n = {self.n}")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "couplings": [list(c) for c in self.couplings],
            "fields": [list(f) for f in self.fields],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IsingInstance":
        if "n" not in data:
            raise ValueError("Ising instance needs an 'n' field")
        return cls(
            n=int(data["n"]),
            couplings=tuple(tuple(row) for row in data.get("couplings", [])),
            fields=tuple(tuple(row) for row in data.get("fields", [])),
        )


def ising_problem(inst: IsingInstance) -> HermitianOperator:
    """Diagonal operator sum_ij J_ij sz_i sz_j + sum_i h_i sz_i."""
    spins = _spin_table(inst.n)
    diag = np.zeros(2**inst.n)
    for i, j, J in inst.couplings:
        diag += J * spins[i] * spins[j]
    for i, h in inst.fields:
        diag += h * spins[i]
    return HermitianOperator(np.diag(diag.astype(complex)))


def load_ising_instance(path) -> IsingInstance:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return IsingInstance.from_dict(data)


def noninteracting_pair(h1: HermitianOperator, h2: HermitianOperator) -> HermitianOperator:
    """Composite h1 (x) 1 + 1 (x) h2 of two uncoupled subsystems."""
    d1, d2 = h1.dim, h2.dim
    if d1 * d2 > DIM_CAP:
        raise ValueError(f"composite dimension {d1 * d2} exceeds the cap {DIM_CAP}")
    return HermitianOperator(
        np.kron(h1.entries, np.eye(d2)) + np.kron(np.eye(d1), h2.entries)
    )


def shift_ground_to_zero(op: HermitianOperator) -> HermitianOperator:
    """Subtract the lowest eigenvalue times identity."""
    lowest = float(np.linalg.eigvalsh(op.entries)[0])
    return HermitianOperator(op.entries - lowest * np.eye(op.dim))


def random_hermitian(dim: int, seed: int) -> HermitianOperator:
    """Gaussian unitary ensemble draw: (M + M^dag) / 2 with standard
    complex normal entries, deterministic in the seed."""
    rng = np.random.default_rng(seed)
    M = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    return HermitianOperator((M + M.conj().T) / 2.0)


@dataclass(frozen=True, eq=False)
class InterpolatedHamiltonian:
    """H(t) = f(t/T) * initial + g(t/T) * problem (+ h(t/T) * extra)."""

    initial: HermitianOperator
    problem: HermitianOperator
    schedule: Schedule
    total_time: float
    extra: HermitianOperator | None = None

    def __post_init__(self):
        if self.initial.dim != self.problem.dim:
            raise ValueError(
                f"operator dimensions differ: {self.initial.dim} vs {self.problem.dim}"
            )
        if self.extra is not None and self.extra.dim != self.initial.dim:
            raise ValueError("extra term dimension differs from the initial term")
        if not self.total_time > 0:
            raise ValueError(f"total_time must be positive, got {self.total_time}")
        if self.schedule.has_extra_envelope and self.extra is None:
            raise ValueError("schedule has an extra-term envelope but no extra operator was given")
        if self.extra is not None and not self.schedule.has_extra_envelope:
            raise ValueError("extra operator given but the schedule has no envelope for it")

    @property
    def dim(self) -> int:
        return self.initial.dim

    def matrix(self, t: float) -> np.ndarray:
        """Raw ndarray at time t; cheaper than `evaluate` inside integrators."""
        if t < -1e-12 * self.total_time or t > self.total_time * (1 + 1e-12):
            raise ValueError(f"t = {t} outside [0, {self.total_time}]")
        tau = min(max(t / self.total_time, 0.0), 1.0)
        M = self.schedule.f(tau) * self.initial.entries + self.schedule.g(tau) * self.problem.entries
        if self.extra is not None:
            M = M + self.schedule.h(tau) * self.extra.entries
        return M

    def evaluate(self, t: float) -> HermitianOperator:
        return HermitianOperator(self.matrix(t))
