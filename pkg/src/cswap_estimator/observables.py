"""Expectation values of Hermitian observables via a SWAP overlap.

The observable is shifted to ``A' = gamma*I + A >= 0`` and normalized into a
state ``rho_A' = A' / tr(A')``.  The overlap ``v = tr(rho_A' rho_b)`` then gives

    <A> = v * tr(A) + gamma * (v*d - 1)

which holds for any gamma with ``tr(A') > 0``, so the small padding added to
gamma below does not bias the exact-mode result.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .interferometer import overlap
from .linalg import (
    HERMITIAN_TOL,
    DensityOperator,
    HermiticityError,
    as_density,
    as_matrix,
    eig_hermitian,
    hermitian_defect,
    validate_density,
)

PAD_SCALE = 1e-6


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"observable must be square, got shape {m.shape}")
        defect = hermitian_defect(m)
        if defect > HERMITIAN_TOL:
            raise HermiticityError(f"observable is not Hermitian (defect {defect:.3e})", defect)
        m = np.array(0.5 * (m + m.conj().T))
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Embedding:
    gamma: float
    trace_a_prime: float
    rho_a_prime: DensityOperator


@dataclass(frozen=True)
class ExpectationEstimate:
    value: float
    stderr: float
    visibility: float
    embedding: Embedding

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "v": self.visibility,
            "gamma": self.embedding.gamma,
            "trace_a_prime": self.embedding.trace_a_prime,
        }


def _as_observable(a) -> Observable:
    return a if isinstance(a, Observable) else Observable(a)


def embed_observable(a) -> Embedding:
    """Shift and normalize ``a`` into a density operator.

    gamma is ``-lambda_min`` when that is non-negative, padded by
    ``1e-6 * max|A_ij|`` so ``A'`` never vanishes identically (e.g. ``A = -I``).
    For positive-definite ``A`` gamma is 0.
    """
    a = _as_observable(a)
    scale = float(np.max(np.abs(a.matrix)))
    if scale == 0.0:
        raise ValueError("the zero observable has no valid embedding")
    lam_min = float(eig_hermitian(a.matrix)[0][0])
    gamma = 0.0 if lam_min > 0.0 else -lam_min + PAD_SCALE * scale
    a_prime = a.matrix + gamma * np.eye(a.dim)
    tr = float(np.trace(a_prime).real)
    assert tr > 0.0, "padding guarantees tr(A') > 0"
    return Embedding(gamma=gamma, trace_a_prime=tr, rho_a_prime=validate_density(a_prime / tr))


def expectation_estimate(a, rho_b, shots: int = 0, seed: int = 0) -> ExpectationEstimate:
    a = _as_observable(a)
    rho_b = as_density(rho_b)
    if a.dim != rho_b.dim:
        raise ValueError(f"dimension mismatch: observable {a.dim}, state {rho_b.dim}")
    emb = embed_observable(a)
    est = overlap(emb.rho_a_prime, rho_b, shots=shots, seed=seed, label="expectation")
    v = est.v
    value = v * float(np.trace(a.matrix).real) + emb.gamma * (v * a.dim - 1.0)
    # d<A>/dv = tr A + gamma*d = tr A'
    return ExpectationEstimate(
        value=value, stderr=emb.trace_a_prime * est.stderr_v, visibility=v, embedding=emb
    )


def expectation(a, rho_b, shots: int = 0, seed: int = 0) -> float:
    """``<A>`` in ``rho_b``; exact mode (``shots=0``) equals ``tr(A rho_b)``."""
    return expectation_estimate(a, rho_b, shots, seed).value
