"""Purity, Bloch length and extremal eigenvalues from overlap visibilities.

For a pure probe ``|psi>`` the visibility ``v_psi = <psi|rho|psi>`` is a convex
combination of the eigenvalues of ``rho``, so searching over probes for the
largest (smallest) visibility finds ``lambda_max`` (``lambda_min``) and its
eigenvector.  The search is projected gradient ascent/descent on the unit
sphere of C^d.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .interferometer import VisibilityEstimate, overlap
from .linalg import PureState, as_density, maximally_mixed, partial_trace
from .random_states import random_pure_state

BLOCH_CLAMP = 0.05
SEPARABILITY_TOL = 1e-6
MIXED_MARGINAL_TOL = 1e-6


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for :func:`extremal_eigen`.

    ``shots_per_eval = 0`` runs exact visibilities; otherwise each visibility
    costs that many interferometer shots and the gradient is taken by central
    finite differences of half-width ``fd_step``.
    """

    max_iters: int = 2000
    step_size: float = 0.5
    grad_tol: float = 1e-8
    value_tol: float = 1e-12
    restarts: int = 5
    seed: int = 0
    shots_per_eval: int = 0
    fd_step: float = 0.05

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.shots_per_eval < 0:
            raise ValueError("shots_per_eval must be non-negative")
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")


@dataclass(frozen=True)
class ExtremalResult:
    which: str
    eigenvalue_estimate: float
    eigenvector_estimate: PureState
    iterations_used: int
    restarts_used: int
    converged: bool
    visibility_trace: np.ndarray = field(repr=False)
    stderr: float = 0.0

    def to_dict(self) -> dict:
        vec = self.eigenvector_estimate.amplitudes
        return {
            "which": self.which,
            "eigenvalue_estimate": self.eigenvalue_estimate,
            "stderr": self.stderr,
            "eigenvector_estimate": {"re": [float(x) for x in vec.real], "im": [float(x) for x in vec.imag]},
            "iterations_used": self.iterations_used,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "visibility_trace": [float(x) for x in self.visibility_trace],
        }


def purity_estimate(rho_b, shots: int = 0, seed: int = 0) -> VisibilityEstimate:
    rho_b = as_density(rho_b)
    return overlap(rho_b, rho_b, shots=shots, seed=seed, label="purity")


def purity(rho_b, shots: int = 0, seed: int = 0) -> float:
    """``tr(rho_b^2)`` from two copies of ``rho_b`` in the interferometer."""
    return purity_estimate(rho_b, shots, seed).v


def bloch_length(v: float, return_clamped: bool = False):
    """Bloch-vector length ``sqrt(2v - 1)`` of a qubit with purity ``v``.

    Purity estimates up to ``BLOCH_CLAMP`` outside ``[1/2, 1]`` are treated as
    sampling noise and clamped (to length 0 or 1); anything further out raises
    ``ValueError``.
    """
    if v < 0.5 - BLOCH_CLAMP or v > 1.0 + BLOCH_CLAMP:
        raise ValueError(f"purity {v!r} is inconsistent with a qubit state")
    clamped = bool(v < 0.5 or v > 1.0)
    length = math.sqrt(2.0 * min(max(v, 0.5), 1.0) - 1.0)
    return (length, clamped) if return_clamped else length


def visibility_at(psi, rho_b, shots: int = 0, seed: int = 0, label: str = "visibility") -> float:
    """Visibility for probe ``|psi><psi| (x) rho_b``; exactly ``<psi|rho_b|psi>``."""
    if not isinstance(psi, PureState):
        psi = PureState.normalized(psi)
    return overlap(psi, rho_b, shots=shots, seed=seed, label=label).v


def _normalize(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x)


def _rayleigh(rho: np.ndarray, psi: np.ndarray) -> float:
    return float(np.vdot(psi, rho @ psi).real)


def _descend_exact(rho, psi, sign, cfg):
    # exact visibilities equal the Rayleigh quotient, so evaluate it directly
    v = _rayleigh(rho, psi)
    trace = [v]
    converged = False
    it = 0
    while it < cfg.max_iters:
        g = rho @ psi - v * psi
        if np.linalg.norm(g) <= cfg.grad_tol:
            converged = True
            break
        psi = _normalize(psi + sign * cfg.step_size * g)
        v_new = _rayleigh(rho, psi)
        trace.append(v_new)
        it += 1
        if abs(v_new - v) <= cfg.value_tol:
            v = v_new
            converged = True
            break
        v = v_new
    return psi, v, trace, it, converged


def _fd_gradient(rho, psi, cfg, label):
    """Finite-difference gradient of the visibility on the sphere.

    Each +/- pair shares one random stream (common random numbers), which
    makes the difference nearly free of shot noise.
    """
    d = psi.shape[0]
    h = cfg.fd_step
    grad = np.zeros(d, dtype=complex)
    for j in range(d):
        for unit in (1.0, 1.0j):
            e = np.zeros(d, dtype=complex)
            e[j] = unit
            seed = _rng.child_seed(cfg.seed, f"{label}/{j}/{'im' if unit == 1.0j else 're'}")
            v_plus = visibility_at(_normalize(psi + h * e), rho, cfg.shots_per_eval, seed, "fd")
            v_minus = visibility_at(_normalize(psi - h * e), rho, cfg.shots_per_eval, seed, "fd")
            grad += (v_plus - v_minus) / (2.0 * h) * e
    # tangent projection; the sphere gradient of <psi|rho|psi> is 2(rho psi - v psi)
    grad -= np.vdot(psi, grad) * psi
    return 0.5 * grad


def _descend_sampled(rho, psi, sign, cfg, restart):
    shots = cfg.shots_per_eval
    window = 10

    def measure(x, tag):
        return visibility_at(PureState(x), rho, shots, _rng.child_seed(cfg.seed, f"r{restart}/{tag}"), "trace")

    v = measure(psi, "start")
    trace = [v]
    converged = False
    it = 0
    while it < cfg.max_iters:
        g = _fd_gradient(rho, psi, cfg, f"r{restart}/it{it}")
        if np.linalg.norm(g) <= cfg.grad_tol:
            converged = True
            break
        psi = _normalize(psi + sign * cfg.step_size * g)
        it += 1
        v = measure(psi, f"it{it}")
        trace.append(v)
        if len(trace) >= 2 * window:
            recent = np.mean(trace[-window:])
            before = np.mean(trace[-2 * window:-window])
            noise = 2.0 * math.sqrt(0.25 / shots)
            if abs(recent - before) <= 3.0 * noise * math.sqrt(2.0 / window) + cfg.value_tol:
                converged = True
                break
    return psi, v, trace, it, converged


def extremal_eigen(rho_b, which: str = "max", cfg: OptimizerConfig | None = None) -> ExtremalResult:
    """Search probe states for the extremal eigenvalue of ``rho_b``.

    Runs ``cfg.restarts`` independent searches from Haar-random starts and
    keeps the best.  ``converged`` is the winning restart's flag; False means
    it hit ``max_iters`` and the result is best-so-far.
    """
    if which not in ("min", "max"):
        raise ValueError(f"which must be 'min' or 'max', got {which!r}")
    cfg = cfg or OptimizerConfig()
    rho = as_density(rho_b).matrix
    d = rho.shape[0]
    sign = 1.0 if which == "max" else -1.0
    better = max if which == "max" else min

    runs = []
    total_iters = 0
    for r in range(cfg.restarts):
        start = random_pure_state(d, _rng.stream(cfg.seed, f"restart/{r}")).amplitudes.copy()
        if cfg.shots_per_eval == 0:
            psi, v, trace, iters, conv = _descend_exact(rho, start, sign, cfg)
        else:
            psi, _, trace, iters, conv = _descend_sampled(rho, start, sign, cfg, r)
            # fresh stream so restart selection is not scored on its own trace
            v = visibility_at(PureState(_normalize(psi)), rho, cfg.shots_per_eval,
                              _rng.child_seed(cfg.seed, f"r{r}/final"), "final")
        total_iters += iters
        runs.append((v, psi, trace, conv))

    best = better(runs, key=lambda run: run[0])
    v, psi, trace, conv = best
    stderr = 0.0
    if cfg.shots_per_eval:
        est = overlap(PureState(_normalize(psi)), rho, cfg.shots_per_eval,
                      _rng.child_seed(cfg.seed, "report"), "report")
        v, stderr = est.v, est.stderr_v
    return ExtremalResult(
        which=which,
        eigenvalue_estimate=float(v),
        eigenvector_estimate=PureState(_normalize(psi)),
        iterations_used=total_iters,
        restarts_used=cfg.restarts,
        converged=bool(conv),
        visibility_trace=np.asarray(trace),
        stderr=stderr,
    )


def maximally_mixed_subsystem_separability_check(rho_b, cfg: OptimizerConfig | None = None) -> bool:
    """Separability test for two qubits with a maximally mixed marginal.

    Returns True when the estimated largest eigenvalue does not exceed 1/2.
    Raises ``ValueError`` if neither single-qubit marginal is ``I/2``.
    """
    rho = as_density(rho_b)
    if rho.dim != 4:
        raise ValueError(f"expected a two-qubit (4x4) state, got dimension {rho.dim}")
    half = maximally_mixed(2).matrix
    marginals = (partial_trace(rho, 2, 2, "A"), partial_trace(rho, 2, 2, "B"))
    if not any(np.max(np.abs(m - half)) <= MIXED_MARGINAL_TOL for m in marginals):
        raise ValueError("neither qubit is maximally mixed; the eigenvalue test does not apply")
    res = extremal_eigen(rho, "max", cfg)
    tol = SEPARABILITY_TOL + 3.0 * res.stderr
    return res.eigenvalue_estimate <= 0.5 + tol
