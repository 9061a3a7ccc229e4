"""Channel characterization through the Choi-Jamiolkowski state.

A channel is carried as a Kraus set.  Its Choi state is

    rho_Lambda = (I (x) Lambda) P+ = (1/d) sum_ij |i><j| (x) Lambda(|i><j|)

with subsystem A the untouched half of ``|phi+>`` and B the half sent through
the channel.  The A-marginal of any Choi state is ``I/d``; the channel is
recovered as ``Lambda(rho) = d * tr_A[(rho^T (x) I) rho_Lambda]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .linalg import (
    DensityOperator,
    as_density,
    as_matrix,
    eig_hermitian,
    max_entangled_state,
    partial_trace,
    validate_density,
)
from .serialization import (
    MatrixFormatError,
    density_from_json,
    density_to_json,
    matrix_from_json,
    matrix_to_json,
)
from .spectral import OptimizerConfig, extremal_eigen
from .tomography import project_to_physical, tomography

COMPLETENESS_TOL = 1e-10
MARGINAL_TOL = 1e-9
CAPACITY_MARGIN = 1e-6
DISTILL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class KrausChannel:
    kraus_ops: tuple

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise ValueError(f"Kraus operators must all be {d}x{d}, got {k.shape}")
        defect = float(np.max(np.abs(sum(k.conj().T @ k for k in ops) - np.eye(d))))
        if defect > COMPLETENESS_TOL:
            raise ValueError(f"Kraus set is not trace preserving (defect {defect:.3e})")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    def __call__(self, rho) -> DensityOperator:
        return apply_channel(self, rho)


@dataclass(frozen=True, eq=False)
class ChoiState:
    """Choi state of a ``dim``-level channel.

    ``strict=False`` skips the A-marginal check (used for noisy tomographic
    estimates, whose deviation is exposed as :attr:`a_marginal_deviation`).
    """

    dim: int
    state: DensityOperator
    strict: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.state.dim != self.dim * self.dim:
            raise ValueError(f"Choi state of a {self.dim}-level channel must be {self.dim ** 2}-dimensional")
        if self.strict and self.a_marginal_deviation > MARGINAL_TOL:
            raise ValueError(
                f"A-marginal deviates from I/d by {self.a_marginal_deviation:.3e}; not a Choi state"
            )

    def marginal(self, keep: str) -> np.ndarray:
        return partial_trace(self.state, self.dim, self.dim, keep)

    @property
    def a_marginal_deviation(self) -> float:
        return float(np.max(np.abs(self.marginal("A") - np.eye(self.dim) / self.dim)))

    @property
    def b_marginal_deviation(self) -> float:
        return float(np.max(np.abs(self.marginal("B") - np.eye(self.dim) / self.dim)))


def apply_channel(ch: KrausChannel, rho) -> DensityOperator:
    rho = as_density(rho)
    if rho.dim != ch.dim:
        raise ValueError(f"dimension mismatch: channel {ch.dim}, state {rho.dim}")
    out = sum(k @ rho.matrix @ k.conj().T for k in ch.kraus_ops)
    return validate_density(out)


def choi_state(ch: KrausChannel) -> ChoiState:
    d = ch.dim
    p_plus = max_entangled_state(d).projector()
    eye = np.eye(d)
    out = sum(np.kron(eye, k) @ p_plus @ np.kron(eye, k).conj().T for k in ch.kraus_ops)
    return ChoiState(d, validate_density(out))


def channel_from_choi(c: ChoiState, rho_in) -> DensityOperator:
    """``Lambda(rho) = d * tr_A[(rho^T (x) I) rho_Lambda]``.

    For a non-strict (estimated) Choi state the result is projected back onto
    the density operators, since a perturbed A-marginal breaks trace
    preservation.
    """
    rho = as_density(rho_in)
    d = c.dim
    if rho.dim != d:
        raise ValueError(f"dimension mismatch: channel {d}, state {rho.dim}")
    lifted = np.kron(rho.matrix.T, np.eye(d)) @ c.state.matrix
    out = d * partial_trace(lifted, d, d, keep="B")
    out = 0.5 * (out + out.conj().T)
    if not c.strict:
        return project_to_physical(out)
    return validate_density(out, tol=1e-8)


def channel_tomography(ch_oracle, shots_per_probe: int = 0, seed: int = 0, max_workers=None,
                       return_report: bool = False):
    """Estimate the Choi state by state tomography on ``rho_Lambda``.

    ``ch_oracle`` is a :class:`KrausChannel` (its Choi state is prepared per
    run), a :class:`ChoiState`, or a zero-argument callable returning a fresh
    Choi state or its matrix.  With ``return_report`` the underlying
    :class:`~cswap_estimator.tomography.ReconstructionReport` is returned too.
    """
    if isinstance(ch_oracle, KrausChannel):
        prepared = choi_state(ch_oracle)
        oracle = lambda: prepared.state  # noqa: E731
    elif isinstance(ch_oracle, ChoiState):
        oracle = lambda: ch_oracle.state  # noqa: E731
    elif callable(ch_oracle):
        def oracle():
            out = ch_oracle()
            return out.state if isinstance(out, ChoiState) else out
    else:
        raise TypeError("ch_oracle must be a KrausChannel, ChoiState or callable")
    report = tomography(oracle, shots_per_probe=shots_per_probe, seed=seed, max_workers=max_workers)
    d = int(round(np.sqrt(report.state.dim)))
    if d * d != report.state.dim:
        raise ValueError(f"Choi state dimension {report.state.dim} is not a perfect square")
    choi = ChoiState(d, report.state, strict=False)
    return (choi, report) if return_report else choi


def is_bistochastic(c: ChoiState, tol: float = MARGINAL_TOL) -> bool:
    """True iff the channel-output marginal is also ``I/d`` within ``tol``."""
    return c.b_marginal_deviation <= tol


class CapacityVerdict(NamedTuple):
    verdict: bool
    lambda_max: float
    inconclusive: bool = False
    stderr: float = 0.0
    converged: bool = True


def two_way_capacity_positive(c: ChoiState, cfg: OptimizerConfig | None = None) -> CapacityVerdict:
    """Qubit channel has positive two-way capacity iff lambda_max(rho_Lambda) > 1/2.

    In sampled mode a result within three standard errors of 1/2 is flagged
    ``inconclusive``.
    """
    if c.dim != 2:
        raise ValueError(f"capacity criterion applies to qubit channels, got d={c.dim}")
    res = extremal_eigen(c.state, "max", cfg)
    lam = res.eigenvalue_estimate
    inconclusive = res.stderr > 0 and abs(lam - 0.5) <= 3.0 * res.stderr
    return CapacityVerdict(lam > 0.5 + CAPACITY_MARGIN, lam, inconclusive, res.stderr, res.converged)


class DistillabilityVerdict(NamedTuple):
    verdict: bool
    min_eig: float


def distillability_operator_test(rho_ab) -> DistillabilityVerdict:
    """Two-qubit two-way distillability: ``rho_A (x) I - rho_AB`` has a negative eigenvalue."""
    rho = as_density(rho_ab)
    if rho.dim != 4:
        raise ValueError(f"expected a two-qubit (4x4) state, got dimension {rho.dim}")
    rho_a = partial_trace(rho, 2, 2, keep="A")
    op = np.kron(rho_a, np.eye(2)) - rho.matrix
    min_eig = float(eig_hermitian(op)[0][0])
    return DistillabilityVerdict(min_eig < -DISTILL_TOL, min_eig)


# channel zoo

def identity_channel(d: int = 2) -> KrausChannel:
    return KrausChannel((np.eye(d),))


def unitary_channel(u) -> KrausChannel:
    return KrausChannel((as_matrix(u),))


def _weyl_operators(d: int) -> list[np.ndarray]:
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(d)
        for b in range(d)
    ]


def depolarizing(p: float, d: int = 2) -> KrausChannel:
    """``rho -> p*rho + (1-p)*I/d`` for ``-1/(d^2-1) <= p <= 1``.

    Uses the Weyl (clock-shift) twirl: the average of ``W rho W^dagger`` over
    all d^2 Weyl operators is ``I/d`` for unit-trace ``rho``.
    """
    weights = np.full(d * d, (1.0 - p) / (d * d))
    weights[0] += p
    if np.any(weights < -1e-15):
        raise ValueError(f"depolarizing parameter {p} does not give a CP map for d={d}")
    ops = [np.sqrt(max(w, 0.0)) * w_op for w, w_op in zip(weights, _weyl_operators(d)) if w > 0]
    return KrausChannel(tuple(ops))


def amplitude_damping(gamma: float) -> KrausChannel:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"damping probability must lie in [0, 1], got {gamma}")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]])
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    return KrausChannel((k0, k1))


def bit_flip(q: float) -> KrausChannel:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"flip probability must lie in [0, 1], got {q}")
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    return KrausChannel((np.sqrt(1.0 - q) * np.eye(2), np.sqrt(q) * x))


def random_channel(d: int, rng: np.random.Generator, n_kraus: int | None = None) -> KrausChannel:
    """Kraus blocks of a random isometry C^d -> C^(n_kraus * d)."""
    n_kraus = n_kraus or d * d
    g = rng.standard_normal((n_kraus * d, d)) + 1j * rng.standard_normal((n_kraus * d, d))
    q, _ = np.linalg.qr(g)
    return KrausChannel(tuple(q[i * d:(i + 1) * d, :] for i in range(n_kraus)))


def kraus_to_json(ch: KrausChannel) -> dict:
    return {"dim": ch.dim, "kraus": [matrix_to_json(k) for k in ch.kraus_ops]}


def kraus_from_json(doc: dict) -> KrausChannel:
    try:
        ops = [matrix_from_json(k) for k in doc["kraus"]]
    except (KeyError, TypeError) as exc:
        raise MatrixFormatError(f"malformed channel document: {exc}") from exc
    ch = KrausChannel(tuple(ops))
    if "dim" in doc and int(doc["dim"]) != ch.dim:
        raise MatrixFormatError(f"'dim' is {doc['dim']} but Kraus operators are {ch.dim}x{ch.dim}")
    return ch


def choi_to_json(c: ChoiState) -> dict:
    doc = density_to_json(c.state)
    doc["channel_dim"] = c.dim
    doc["subsystems"] = {"A": "reference", "B": "channel output", "order": "index = i_A * d + i_B"}
    return doc


def choi_from_json(doc: dict, strict: bool = True) -> ChoiState:
    state = density_from_json(doc)
    d = int(doc.get("channel_dim", round(np.sqrt(state.dim))))
    return ChoiState(d, state, strict=strict)
