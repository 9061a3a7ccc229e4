"""Dense complex linear algebra and quantum-state validation.

All bipartite operators use the ordering ``index = i_a * d_b + i_b``, i.e. the
first tensor factor is subsystem A and varies slowest. Matrices are plain
``numpy`` arrays of dtype ``complex128``; :class:`DensityOperator` and
:class:`PureState` wrap validated, read-only copies.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
NORM_TOL = 1e-12

SUBSYSTEMS = ("A", "B")


class InvalidStateError(ValueError):
    """A matrix failed one of the density-operator invariants.

    ``invariant`` names the violated property and ``magnitude`` is the size of
    the violation (max Hermitian defect, trace, or most negative eigenvalue).
    """

    invariant = "state"

    def __init__(self, message: str, magnitude: float):
        super().__init__(message)
        self.magnitude = float(magnitude)


class HermiticityError(InvalidStateError):
    invariant = "hermiticity"


class TraceError(InvalidStateError):
    invariant = "trace"


class PositivityError(InvalidStateError):
    invariant = "positivity"


class NormError(InvalidStateError):
    invariant = "norm"


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array.

    Accepts array-likes as well as :class:`DensityOperator` and
    :class:`PureState` (the latter becomes its projector).
    """
    if isinstance(m, DensityOperator):
        return m.matrix
    if isinstance(m, PureState):
        return m.projector()
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Validated quantum state. Build through :func:`validate_density`."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NormError(f"state vector has norm {norm!r}", norm)
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(amps / np.linalg.norm(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> DensityOperator:
        return validate_density(self.projector())


def kron(a, b) -> np.ndarray:
    """Kronecker product; ``a`` is the slow (first) subsystem."""
    return np.kron(as_matrix(a), as_matrix(b))


def swap_operator(d: int) -> np.ndarray:
    """Permutation matrix V on C^d (x) C^d with V|i>|j> = |j>|i>."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    v = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            v[j * d + i, i * d + j] = 1.0
    return v


def max_entangled_state(d: int) -> PureState:
    """(1/sqrt(d)) sum_i |i>|i>."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    amps = np.zeros(d * d, dtype=complex)
    amps[[i * d + i for i in range(d)]] = 1.0 / np.sqrt(d)
    return PureState(amps)


def _check_bipartite(m: np.ndarray, d_a: int, d_b: int) -> None:
    n = d_a * d_b
    if m.shape != (n, n):
        raise ValueError(
            f"matrix of shape {m.shape} is not compatible with subsystem dims ({d_a}, {d_b})"
        )


def _check_subsystem(label: str) -> None:
    if label not in SUBSYSTEMS:
        raise ValueError(f"subsystem must be 'A' or 'B', got {label!r}")


def partial_transpose(m, d_a: int, d_b: int, subsystem: str = "B") -> np.ndarray:
    """Transpose the indices of one tensor factor only."""
    m = as_matrix(m)
    _check_bipartite(m, d_a, d_b)
    _check_subsystem(subsystem)
    t = m.reshape(d_a, d_b, d_a, d_b)
    if subsystem == "A":
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(d_a * d_b, d_a * d_b)


def partial_trace(m, d_a: int, d_b: int, keep: str = "A") -> np.ndarray:
    """Trace out the factor not named by ``keep``."""
    m = as_matrix(m)
    _check_bipartite(m, d_a, d_b)
    _check_subsystem(keep)
    t = m.reshape(d_a, d_b, d_a, d_b)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def hermitian_defect(m) -> float:
    m = as_matrix(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns).

    Raises
    ------
    HermiticityError
        If ``max |m - m^dagger| > tol``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    defect = hermitian_defect(m)
    if defect > tol:
        raise HermiticityError(f"matrix is not Hermitian (defect {defect:.3e})", defect)
    # eigh reads only one triangle; symmetrize so both halves count
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def validate_density(m, tol: float = HERMITIAN_TOL) -> DensityOperator:
    """Check Hermiticity, unit trace and positivity, in that order.

    Each violation raises its own :class:`InvalidStateError` subclass carrying
    the violation magnitude.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"density matrix must be square and non-empty, got shape {m.shape}")
    defect = hermitian_defect(m)
    if defect > tol:
        raise HermiticityError(f"not Hermitian: max |M - M^dagger| = {defect:.3e}", defect)
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > tol:
        raise TraceError(f"trace is {tr!r}, expected 1", tr)
    lam_min = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
    if lam_min < -tol:
        raise PositivityError(f"negative eigenvalue {lam_min!r}", lam_min)
    return DensityOperator(_readonly(m))


def as_density(m) -> DensityOperator:
    """Pass a :class:`DensityOperator` through; validate anything else."""
    if isinstance(m, DensityOperator):
        return m
    if isinstance(m, PureState):
        return m.density()
    return validate_density(m)


def trace_distance(a, b) -> float:
    """(1/2) * sum |eigenvalues(a - b)|."""
    diff = as_matrix(a) - as_matrix(b)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) <= tol


def maximally_mixed(d: int) -> DensityOperator:
    return validate_density(np.eye(d) / d)


def basis_state(d: int, n: int) -> PureState:
    if not 0 <= n < d:
        raise IndexError(f"basis index {n} out of range for dimension {d}")
    amps = np.zeros(d, dtype=complex)
    amps[n] = 1.0
    return PureState(amps)
