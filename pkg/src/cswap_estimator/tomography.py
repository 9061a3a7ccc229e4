"""State tomography with pure probe states fed into the SWAP interferometer.

For a probe ``|psi>`` the overlap visibility is ``<psi|rho|psi>``.  With the
probes ``|n>``, ``(|n> + |k>)/sqrt(2)`` and ``(|n> + i|k>)/sqrt(2)`` the
readouts are

    v_diag(n)      = rho_nn
    v_real(n, k)   = (rho_nn + rho_kk)/2 + Re rho_nk
    v_imag(n, k)   = (rho_nn + rho_kk)/2 - Im rho_nk

with ``rho_nk = <n|rho|k>``.  Note the minus sign on the imaginary probe.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .interferometer import overlap
from .linalg import (
    DensityOperator,
    PureState,
    as_density,
    as_matrix,
    eig_hermitian,
)
from .serialization import density_to_json, matrix_to_json

PROBE_KINDS = ("diagonal", "real_offdiag", "imag_offdiag")

#: sign s in Im rho_nk = s * (v_imag - (rho_nn + rho_kk)/2)
IMAG_PROBE_SIGN = -1.0


class ProjectionError(ValueError):
    """Nothing positive survives eigenvalue clipping."""


@dataclass(frozen=True)
class ProbeSpec:
    kind: str
    n: int
    k: int = -1

    def __post_init__(self):
        if self.kind not in PROBE_KINDS:
            raise ValueError(f"unknown probe kind {self.kind!r}")
        if self.kind != "diagonal" and not self.n < self.k:
            raise ValueError(f"off-diagonal probe needs n < k, got n={self.n}, k={self.k}")

    def check(self, d: int) -> None:
        if not 0 <= self.n < d:
            raise IndexError(f"probe index n={self.n} out of range for d={d}")
        if self.kind != "diagonal" and not self.k < d:
            raise IndexError(f"probe index k={self.k} out of range for d={d}")

    @property
    def label(self) -> str:
        if self.kind == "diagonal":
            return f"probe/diagonal/{self.n}"
        return f"probe/{self.kind}/{self.n}/{self.k}"

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "n": self.n}
        if self.kind != "diagonal":
            out["k"] = self.k
        return out


@dataclass(frozen=True)
class TomographySchedule:
    dim: int
    probes: tuple[ProbeSpec, ...]
    shots_per_probe: int = 0

    def __post_init__(self):
        d = self.dim
        counts = {kind: sum(p.kind == kind for p in self.probes) for kind in PROBE_KINDS}
        pairs = d * (d - 1) // 2
        if counts != {"diagonal": d, "real_offdiag": pairs, "imag_offdiag": pairs}:
            raise ValueError(f"schedule for d={d} needs {d} diagonal and {pairs} of each off-diagonal probe")
        for p in self.probes:
            p.check(d)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "shots_per_probe": self.shots_per_probe,
            "probes": [p.to_dict() for p in self.probes],
        }


@dataclass(frozen=True)
class ReconstructionReport:
    schedule: TomographySchedule
    raw_hermitian: np.ndarray
    state: DensityOperator
    per_probe_visibilities: np.ndarray
    total_shots: int
    per_probe_stderr: np.ndarray = field(default=None)

    def to_dict(self) -> dict:
        out = {
            "schedule": self.schedule.to_dict(),
            "per_probe_visibilities": [float(v) for v in self.per_probe_visibilities],
            "raw_hermitian": matrix_to_json(self.raw_hermitian),
            "state": density_to_json(self.state),
            "total_shots": self.total_shots,
        }
        if self.per_probe_stderr is not None:
            out["per_probe_stderr"] = [float(s) for s in self.per_probe_stderr]
        return out


def probe_state(p: ProbeSpec, d: int) -> PureState:
    p.check(d)
    amps = np.zeros(d, dtype=complex)
    if p.kind == "diagonal":
        amps[p.n] = 1.0
        return PureState(amps)
    amps[p.n] = 1.0
    amps[p.k] = 1.0 if p.kind == "real_offdiag" else 1.0j
    return PureState(amps / np.sqrt(2.0))


def default_schedule(d: int, shots_per_probe: int = 0) -> TomographySchedule:
    """Diagonals ascending, then real pairs, then imaginary pairs (lexicographic)."""
    if d < 2:
        raise ValueError(f"tomography needs d >= 2, got {d}")
    pairs = [(n, k) for n in range(d) for k in range(n + 1, d)]
    probes = [ProbeSpec("diagonal", n) for n in range(d)]
    probes += [ProbeSpec("real_offdiag", n, k) for n, k in pairs]
    probes += [ProbeSpec("imag_offdiag", n, k) for n, k in pairs]
    return TomographySchedule(d, tuple(probes), shots_per_probe)


def _measure(p: ProbeSpec, rho_b, shots: int, seed: int):
    rho_b = as_density(rho_b)
    psi = probe_state(p, rho_b.dim)
    return overlap(psi, rho_b, shots=shots, seed=seed, label=p.label)


def measure_probe(p: ProbeSpec, rho_b, shots: int = 0, seed: int = 0) -> float:
    """Visibility for one probe; exact value is ``<psi|rho_b|psi>``."""
    return _measure(p, rho_b, shots, seed).v


def reconstruct(schedule: TomographySchedule, visibilities: Sequence[float]) -> ReconstructionReport:
    """Invert probe visibilities into a Hermitian matrix, then project it."""
    vis = np.asarray(visibilities, dtype=float)
    if vis.shape != (len(schedule.probes),):
        raise ValueError(f"expected {len(schedule.probes)} visibilities, got shape {vis.shape}")
    d = schedule.dim
    diag = np.zeros(d)
    for p, v in zip(schedule.probes, vis):
        if p.kind == "diagonal":
            diag[p.n] = v
    raw = np.diag(diag).astype(complex)
    for p, v in zip(schedule.probes, vis):
        if p.kind == "diagonal":
            continue
        mean = 0.5 * (diag[p.n] + diag[p.k])
        if p.kind == "real_offdiag":
            raw[p.n, p.k] += v - mean
        else:
            raw[p.n, p.k] += 1j * IMAG_PROBE_SIGN * (v - mean)
    raw = np.triu(raw, 1) + np.triu(raw, 1).conj().T + np.diag(diag)
    return ReconstructionReport(
        schedule=schedule,
        raw_hermitian=raw,
        state=project_to_physical(raw),
        per_probe_visibilities=vis,
        total_shots=schedule.shots_per_probe * len(schedule.probes),
    )


def project_to_physical(h) -> DensityOperator:
    """Clip negative eigenvalues to zero and renormalize the spectrum to sum 1."""
    h = as_matrix(h)
    lam, vecs = eig_hermitian(h)
    lam = np.clip(lam, 0.0, None)
    total = lam.sum()
    if total <= 0.0:
        raise ProjectionError("no positive eigenvalue left after clipping")
    lam = lam / total
    rho = (vecs * lam) @ vecs.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    # fix the trace exactly; diagonal is real after symmetrization
    rho[np.diag_indices_from(rho)] += (1.0 - np.trace(rho).real) / rho.shape[0]
    rho.setflags(write=False)
    return DensityOperator(rho)


def tomography(
    rho_b_oracle: Callable[[], object] | DensityOperator | np.ndarray,
    d: int | None = None,
    shots_per_probe: int = 0,
    seed: int = 0,
    max_workers: int | None = None,
) -> ReconstructionReport:
    """Full procedure: schedule, per-probe measurement, reconstruction.

    ``rho_b_oracle`` is either the state itself or a zero-argument callable
    returning a fresh copy.  Each probe draws from its own stream derived from
    ``(seed, probe label)``, so ``max_workers > 1`` gives identical results.
    """
    oracle = rho_b_oracle if callable(rho_b_oracle) else (lambda: rho_b_oracle)
    rho = as_density(oracle())
    if d is None:
        d = rho.dim
    if rho.dim != d:
        raise ValueError(f"oracle state has dimension {rho.dim}, expected {d}")
    schedule = default_schedule(d, shots_per_probe)

    def measure(p: ProbeSpec):
        return _measure(p, oracle(), shots_per_probe, seed)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            estimates = list(pool.map(measure, schedule.probes))
    else:
        estimates = [measure(p) for p in schedule.probes]
    report = reconstruct(schedule, [e.v for e in estimates])
    stderr = np.array([e.stderr_v for e in estimates])
    return ReconstructionReport(
        schedule=report.schedule,
        raw_hermitian=report.raw_hermitian,
        state=report.state,
        per_probe_visibilities=report.per_probe_visibilities,
        total_shots=report.total_shots,
        per_probe_stderr=stderr,
    )


def design_matrix(schedule: TomographySchedule) -> np.ndarray:
    """Rows are probe projectors as real vectors in the Hermitian-matrix space.

    Coordinates: the d diagonal entries, then Re and Im of the strictly upper
    triangle.  Full column rank ``d**2`` means the probes determine rho.
    """
    d = schedule.dim
    iu = np.triu_indices(d, 1)
    rows = []
    for p in schedule.probes:
        proj = probe_state(p, d).projector()
        rows.append(np.concatenate([proj.diagonal().real, proj[iu].real, proj[iu].imag]))
    return np.array(rows)
