"""Single-qubit interferometer with a controlled-U between the Hadamards.

The control qubit goes through H, controlled-U on the target ``rho``, a phase
shift ``phi`` on the ``|1>`` branch, H, and a computational-basis measurement.
The outcome statistics are

    Pr(0) = (1 + Re(exp(i*phi) * tr(rho U))) / 2

which is the only quantity simulated: only the control qubit is measured, and
in sampled mode a run of ``shots`` repetitions yields a Binomial(shots, Pr(0))
count of zeros.

``shots=0`` selects exact mode everywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.stats import binom

from . import _rng
from .linalg import (
    DensityOperator,
    as_density,
    as_matrix,
    is_unitary,
    swap_operator,
    validate_density,
)


@dataclass(frozen=True)
class VisibilityEstimate:
    """Outcome of one interferometer setting.

    ``v = 2 * p0 - 1`` is the visibility when ``tr(rho U)`` is real (the SWAP
    usage); ``alpha`` is then 0.  ``stderr_p0`` is the binomial standard error
    of the estimated zero-probability and is exactly 0 in exact mode.
    """

    v: float
    alpha: float
    p0: float
    shots_used: int
    stderr_p0: float

    @property
    def stderr_v(self) -> float:
        return 2.0 * self.stderr_p0

    def to_dict(self) -> dict:
        return {
            "v": self.v,
            "alpha": self.alpha,
            "p0": self.p0,
            "shots_used": self.shots_used,
            "stderr_p0": self.stderr_p0,
            "stderr_v": self.stderr_v,
        }


class TraceEstimate(NamedTuple):
    """Complex ``tr(rho U) = v * exp(i * alpha)`` from two fringe settings."""

    v: float
    alpha: float
    re: float
    im: float
    stderr_re: float
    stderr_im: float
    shots_used: int

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


def _check_operands(u, rho) -> tuple[np.ndarray, np.ndarray]:
    u = as_matrix(u)
    rho = as_matrix(rho)
    if u.shape != rho.shape or u.shape[0] != u.shape[1]:
        raise ValueError(f"dimension mismatch: U is {u.shape}, rho is {rho.shape}")
    if not is_unitary(u):
        raise ValueError("U is not unitary (||U^dagger U - I||_max > 1e-10)")
    return u, rho


def _trace_product(a: np.ndarray, b: np.ndarray) -> complex:
    return complex(np.einsum("ij,ji->", a, b))


def prob_zero_exact(u, rho, phi: float = 0.0) -> float:
    """Exact probability of reading ``|0>`` on the control qubit."""
    u, rho = _check_operands(u, rho)
    t = _trace_product(rho, u)
    p = 0.5 * (1.0 + (np.exp(1j * phi) * t).real)
    return min(1.0, max(0.0, p))


def sample_zero_count(p0: float, shots: int, rng: np.random.Generator) -> int:
    """Number of ``|0>`` outcomes in ``shots`` Bernoulli(p0) trials.

    Drawn by inverting the binomial CDF at a single uniform variate, so two
    calls sharing a generator state are monotonically coupled in ``p0``
    (used for common-random-number finite differences).
    """
    p0 = min(1.0, max(0.0, p0))
    u = rng.random()
    return int(min(shots, max(0, binom.ppf(u, shots, p0))))


@dataclass(frozen=True)
class InterferometerRun:
    u: np.ndarray
    rho: DensityOperator
    phase_phi: float = 0.0
    shots: int = 0
    seed: int = 0
    mode: str | None = None
    label: str = field(default="run", compare=False)

    def __post_init__(self):
        u, rho = _check_operands(self.u, self.rho)
        if not isinstance(self.rho, DensityOperator):
            object.__setattr__(self, "rho", validate_density(rho))
        object.__setattr__(self, "u", u)
        if self.shots < 0:
            raise ValueError(f"shots must be non-negative, got {self.shots}")
        mode = self.mode or ("exact" if self.shots == 0 else "sampled")
        if mode not in ("exact", "sampled"):
            raise ValueError(f"mode must be 'exact' or 'sampled', got {mode!r}")
        if mode == "sampled" and self.shots < 1:
            raise ValueError("sampled mode requires shots >= 1")
        object.__setattr__(self, "mode", mode)


def run(r: InterferometerRun) -> VisibilityEstimate:
    p0 = prob_zero_exact(r.u, r.rho, r.phase_phi)
    if r.mode == "exact":
        return VisibilityEstimate(v=2.0 * p0 - 1.0, alpha=0.0, p0=p0, shots_used=0, stderr_p0=0.0)
    count = sample_zero_count(p0, r.shots, _rng.stream(r.seed, r.label))
    p_hat = count / r.shots
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / r.shots)
    return VisibilityEstimate(
        v=2.0 * p_hat - 1.0, alpha=0.0, p0=p_hat, shots_used=r.shots, stderr_p0=stderr
    )


def estimate_tr_rho_u(u, rho, shots: int = 0, seed: int = 0) -> TraceEstimate:
    """Recover the complex ``tr(rho U)`` from the phi = 0 and phi = -pi/2 fringes.

    With the phase convention above, ``2 Pr(0) - 1`` equals ``Re tr(rho U)``
    at phi = 0 and ``Im tr(rho U)`` at phi = -pi/2.  Each setting gets
    ``shots`` repetitions.
    """
    rho = as_density(rho)
    re_run = run(InterferometerRun(u, rho, 0.0, shots, seed, label="tr/re"))
    im_run = run(InterferometerRun(u, rho, -math.pi / 2, shots, seed, label="tr/im"))
    t = complex(re_run.v, im_run.v)
    alpha = float(np.angle(t))
    if alpha <= -math.pi:
        alpha = math.pi
    return TraceEstimate(
        v=abs(t),
        alpha=alpha,
        re=t.real,
        im=t.imag,
        stderr_re=re_run.stderr_v,
        stderr_im=im_run.stderr_v,
        shots_used=re_run.shots_used + im_run.shots_used,
    )


def overlap(rho_a, rho_b, shots: int = 0, seed: int = 0, label: str = "overlap") -> VisibilityEstimate:
    """Estimate ``tr(rho_a rho_b)`` with U = SWAP on ``rho_a (x) rho_b`` at phi = 0."""
    a = as_density(rho_a).matrix
    b = as_density(rho_b).matrix
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    d = a.shape[0]
    joint = DensityOperator(np.kron(a, b))
    return run(InterferometerRun(swap_operator(d), joint, 0.0, shots, seed, label=label))
