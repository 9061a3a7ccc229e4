"""Random test inputs: Haar states/unitaries, Ginibre densities, Hermitian matrices."""
import numpy as np

from .linalg import PureState, validate_density


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_pure_state(d: int, rng: np.random.Generator) -> PureState:
    """Haar-distributed unit vector."""
    return PureState.normalized(_ginibre(rng, d, 1)[:, 0])


def random_density(d: int, rng: np.random.Generator, rank: int | None = None):
    """Density operator G G^dagger / tr(G G^dagger) with G a d x rank Ginibre matrix.

    ``rank=None`` gives the Hilbert-Schmidt (full-rank) ensemble.
    """
    g = _ginibre(rng, d, d if rank is None else rank)
    rho = g @ g.conj().T
    return validate_density(rho / np.trace(rho).real)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR with the phase correction on R's diagonal."""
    q, r = np.linalg.qr(_ginibre(rng, d, d))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = _ginibre(rng, d, d)
    return scale * 0.5 * (g + g.conj().T)
