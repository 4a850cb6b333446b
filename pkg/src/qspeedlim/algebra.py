"""Complex state and operator algebra on a finite Hilbert space.

States are unit vectors of complex amplitudes, observables are dense
Hermitian matrices. Both are validated at construction and immutable
afterwards, so every operation below is a pure function and safe to share
across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Dense desk-scale algebra only; lift deliberately if you need more.
DIM_CAP = 4096

NORM_TOL = 1e-10
HERMITICITY_TOL = 1e-12


def _check_same_dim(da: int, db: int) -> None:
    if da != db:
        raise ValueError(f"dimension mismatch: {da} != {db}")


@dataclass(frozen=True)
class PhysicalConstants:
    """Physical constants entering the dynamics; hbar in action units."""

    hbar: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state as a 1-D complex amplitude vector.

    The constructor rejects anything that is not unit norm within
    ``NORM_TOL``; use :meth:`normalized` to rescale raw amplitudes.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1:
            raise ValueError("state amplitudes must be one-dimensional")
        if amps.shape[0] < 2:
            raise ValueError("Hilbert-space dimension must be at least 2")
        if amps.shape[0] > DIM_CAP:
            raise ValueError(f"dimension {amps.shape[0]} exceeds cap {DIM_CAP}")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm_sq!r}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, values) -> "StateVector":
        """Build a state from arbitrary amplitudes, rescaled to unit norm."""
        amps = np.asarray(values, dtype=np.complex128)
        norm = float(np.linalg.norm(amps))
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> "StateVector":
        """Computational basis vector |index> of the given dimension."""
        amps = np.zeros(dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def uniform(cls, dim: int) -> "StateVector":
        """Uniform superposition over the computational basis."""
        return cls(np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense self-adjoint matrix in energy units."""

    entries: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator must be a square matrix, got shape {mat.shape}")
        if mat.shape[0] > DIM_CAP:
            raise ValueError(f"dimension {mat.shape[0]} exceeds cap {DIM_CAP}")
        defect = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
        if defect > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian: max |A - A^dag| = {defect:g}")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "entries", mat)

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim, dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def apply(self, s: StateVector) -> np.ndarray:
        """Raw matrix-vector product H|s> (not normalized in general)."""
        _check_same_dim(self.dim, s.dim)
        return self.entries @ s.amplitudes


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> with conjugation on the first argument."""
    _check_same_dim(a.dim, b.dim)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def distance(a: StateVector, b: StateVector) -> float:
    """Norm distance || |a> - |b> || = sqrt(2 - 2 Re<a|b>), in [0, 2]."""
    d_sq = 2.0 - 2.0 * inner_product(a, b).real
    return float(np.sqrt(min(max(d_sq, 0.0), 4.0)))


def expectation(op: HermitianOperator, s: StateVector) -> float:
    """Re<s|op|s>; the imaginary residual must sit below 1e-10."""
    val = complex(np.vdot(s.amplitudes, op.apply(s)))
    if abs(val.imag) >= 1e-10:
        raise ValueError(f"expectation has imaginary residual {val.imag:g}")
    return val.real


def variance_sqrt(op: HermitianOperator, s: StateVector) -> float:
    """Spread sqrt(<op^2> - <op>^2); negative round-off clamped to zero.

    Uses <s|op^2|s> = ||op|s>||^2, valid because op is self-adjoint.
    """
    y = op.apply(s)
    second = float(np.vdot(y, y).real)
    first = float(np.vdot(s.amplitudes, y).real)
    return float(np.sqrt(max(second - first * first, 0.0)))


def residual_norm(op: HermitianOperator, shift: float, s: StateVector) -> float:
    """||(op - shift * identity)|s>||.

    For normalized s this equals sqrt(spread^2 + (<op> - shift)^2), and is
    minimized over the shift at shift = <op>.
    """
    y = op.apply(s) - shift * s.amplitudes
    return float(np.linalg.norm(y))


def tensor(a, b):
    """Kronecker product of two states or two operators (same kind)."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, HermitianOperator) and isinstance(b, HermitianOperator):
        return HermitianOperator(np.kron(a.entries, b.entries))
    raise TypeError(f"tensor needs two states or two operators, got {type(a).__name__} and {type(b).__name__}")


def random_state(dim: int, seed) -> StateVector:
    """Haar-distributed random state: normalized complex Gaussian vector."""
    if not 2 <= dim <= DIM_CAP:
        raise ValueError(f"dimension must be in [2, {DIM_CAP}], got {dim}")
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector.normalized(amps)
