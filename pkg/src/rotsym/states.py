"""Bipartite state containers, the invariant family rho(p), and twirling.

Product-basis index order is subsystem A major, subsystem B minor, so a
partial transpose on B is a block-local transpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spin_algebra import HALF, Spin, coupled_basis, haar_rotation, wigner_rotation

TOL_HERMITIAN = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = -1e-10
TOL_NORM = 1e-12


@dataclass
class DensityMatrix:
    """A validated density matrix on a bipartite dim_a x dim_b space."""

    dim_a: int
    dim_b: int
    data: np.ndarray

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=complex)
        d = self.dim_a * self.dim_b
        if self.data.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got shape {self.data.shape}")
        if np.max(np.abs(self.data - self.data.conj().T)) > TOL_HERMITIAN:
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(self.data).real - 1.0) > TOL_TRACE:
            raise ValueError("matrix does not have unit trace")
        if np.linalg.eigvalsh(self.data).min() < TOL_PSD:
            raise ValueError("matrix is not positive semidefinite")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b


@dataclass
class PureState:
    """A unit vector on a bipartite dim_a x dim_b space."""

    dim_a: int
    dim_b: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).ravel()
        if self.amplitudes.shape[0] != self.dim_a * self.dim_b:
            raise ValueError("amplitude length does not match dim_a * dim_b")
        if abs(np.linalg.norm(self.amplitudes) - 1.0) > TOL_NORM:
            raise ValueError("state vector is not normalized")

    @property
    def matrix(self) -> np.ndarray:
        """Amplitudes reshaped to a dim_a x dim_b coefficient matrix."""
        return self.amplitudes.reshape(self.dim_a, self.dim_b)

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.dim_a, self.dim_b,
                             np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class SymmetricState:
    """The pair (j, p) naming a member of the rotationally invariant family."""

    j: Spin
    p: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")

    def density(self) -> DensityMatrix:
        return rho_p(self.j, self.p)


@dataclass
class SchmidtData:
    """Schmidt coefficients (nonincreasing) and the paired local bases."""

    coefficients: np.ndarray
    left: np.ndarray   # columns are A-side Schmidt vectors
    right: np.ndarray  # columns are B-side Schmidt vectors

    def reconstruct(self) -> np.ndarray:
        """The dim_a x dim_b coefficient matrix implied by the decomposition."""
        return (self.left * self.coefficients) @ self.right.conj().T


def separability_threshold(j: Spin) -> float:
    """The boundary 2j/(2j+1); rho(p) is separable iff p is at or below it."""
    t = Spin.parse(j).twice_j
    return t / (t + 1)


def jminus_projector(j: Spin) -> np.ndarray:
    """Projector onto the total-angular-momentum j-1/2 subspace of j (x) 1/2."""
    j = Spin.parse(j)
    if j.twice_j == 0:
        raise ValueError("j = 0 has no j - 1/2 subspace")
    return coupled_basis(j, HALF).projector(Spin(j.twice_j - 1))


def rho_p(j: Spin, p: float) -> DensityMatrix:
    """The invariant state (1-p)/(2j+2) P_{j+1/2} + p/(2j) P_{j-1/2}."""
    j = Spin.parse(j)
    if j.twice_j == 0:
        raise ValueError("j = 0 has no j - 1/2 subspace")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    basis = coupled_basis(j, HALF)
    pi_plus = basis.projector(Spin(j.twice_j + 1))
    pi_minus = basis.projector(Spin(j.twice_j - 1))
    data = (1 - p) / (j.twice_j + 2) * pi_plus + (p / j.twice_j) * pi_minus
    return DensityMatrix(j.dim, 2, data)


def _ab_index(j: Spin, m_a: float, b_up: bool) -> int:
    """Product-basis index of |j, m_a> (x) |1/2, +-1/2>."""
    ia = (j.twice_j - int(round(2 * m_a))) // 2
    return 2 * ia + (0 if b_up else 1)


def chi_state(j: Spin, mu: float) -> PureState:
    """-sqrt(mu)|j,j-1>|up> + sqrt(1-mu)|j,j>|down>; rank-2 Schmidt form."""
    j = Spin.parse(j)
    if j.twice_j == 0:
        raise ValueError("chi requires j >= 1/2")
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    amp = np.zeros(2 * j.dim, dtype=complex)
    amp[_ab_index(j, j.j - 1, True)] = -np.sqrt(mu)
    amp[_ab_index(j, j.j, False)] = np.sqrt(1 - mu)
    return PureState(j.dim, 2, amp)


def phi_product_state(j: Spin, nu: float) -> PureState:
    """|j,j> (x) (sqrt(1-nu)|up> + sqrt(nu)|down>); zero entanglement."""
    j = Spin.parse(j)
    if not 0.0 <= nu <= 1.0:
        raise ValueError("nu must lie in [0, 1]")
    amp = np.zeros(2 * j.dim, dtype=complex)
    amp[_ab_index(j, j.j, True)] = np.sqrt(1 - nu)
    amp[_ab_index(j, j.j, False)] = np.sqrt(nu)
    return PureState(j.dim, 2, amp)


def psi_mu_u(j: Spin, mu: float, u: np.ndarray) -> PureState:
    """The fiducial family (U (x) I)|chi(mu)>; entanglement-preserving."""
    j = Spin.parse(j)
    u = np.asarray(u, dtype=complex)
    if u.shape != (j.dim, j.dim):
        raise ValueError(f"unitary must be {j.dim}x{j.dim}")
    if np.max(np.abs(u.conj().T @ u - np.eye(j.dim))) > 1e-10:
        raise ValueError("u is not unitary")
    chi = chi_state(j, mu)
    amp = (u @ chi.matrix).ravel()
    return PureState(j.dim, 2, amp)


def schmidt(psi: PureState) -> SchmidtData:
    """Schmidt decomposition via SVD of the coefficient matrix."""
    u, s, vh = np.linalg.svd(psi.matrix, full_matrices=False)
    return SchmidtData(coefficients=s, left=u, right=vh.conj().T)


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Marginal on subsystem 'A' or 'B'."""
    r = rho.data.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    if keep.upper() == "A":
        data = np.einsum("ibjb->ij", r)
        return DensityMatrix(rho.dim_a, 1, data)
    if keep.upper() == "B":
        data = np.einsum("aiaj->ij", r)
        return DensityMatrix(1, rho.dim_b, data)
    raise ValueError("keep must be 'A' or 'B'")


def partial_transpose_b(rho: DensityMatrix) -> np.ndarray:
    """Transpose on subsystem-B indices; Hermitian, unit trace, maybe not PSD."""
    r = rho.data.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    return r.transpose(0, 3, 2, 1).reshape(rho.dim, rho.dim)


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """(1/2) ||a - b||_1 for Hermitian matrices."""
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


def subspace_overlaps(sigma: DensityMatrix, j1: Spin, j2: Spin) -> dict[float, float]:
    """Overlaps tr(sigma P_J) for every coupled J, keyed by J."""
    basis = coupled_basis(Spin.parse(j1), Spin.parse(j2))
    if sigma.dim != basis.dim:
        raise ValueError("state dimension does not match the coupled spins")
    return {
        J.j: float(np.trace(sigma.data @ basis.projector(J)).real)
        for J in basis.total_spins
    }


def twirl_exact(sigma: DensityMatrix, j1: Spin, j2: Spin) -> DensityMatrix:
    """Group-average projection: sum_J tr(sigma P_J) P_J / (2J+1)."""
    j1, j2 = Spin.parse(j1), Spin.parse(j2)
    basis = coupled_basis(j1, j2)
    if sigma.dim != basis.dim:
        raise ValueError("state dimension does not match the coupled spins")
    out = np.zeros_like(sigma.data)
    for J in basis.total_spins:
        proj = basis.projector(J)
        out += np.trace(sigma.data @ proj).real / J.dim * proj
    return DensityMatrix(sigma.dim_a, sigma.dim_b, out)


def twirl_monte_carlo(
    sigma: DensityMatrix,
    j1: Spin,
    j2: Spin,
    n_samples: int,
    seed: int = 0,
) -> tuple[DensityMatrix, float]:
    """Sample-average twirl over Haar-random rotations.

    Returns the estimate and its trace distance to the exact twirl (the
    exact reference is available, so no statistical error bar is needed).
    """
    j1, j2 = Spin.parse(j1), Spin.parse(j2)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if sigma.dim != j1.dim * j2.dim:
        raise ValueError("state dimension does not match the coupled spins")
    rng = np.random.default_rng(seed)
    acc = np.zeros_like(sigma.data)
    for _ in range(n_samples):
        rot = haar_rotation(rng)
        d = np.kron(wigner_rotation(j1, rot), wigner_rotation(j2, rot))
        acc += d @ sigma.data @ d.conj().T
    acc /= n_samples
    acc = (acc + acc.conj().T) / 2
    estimate = DensityMatrix(sigma.dim_a, sigma.dim_b, acc)
    exact = twirl_exact(sigma, j1, j2)
    return estimate, trace_distance(estimate.data, exact.data)


def random_density_matrix(dim_a: int, dim_b: int, rng: np.random.Generator) -> DensityMatrix:
    """Full-rank random state from a complex Wishart draw."""
    d = dim_a * dim_b
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    w = g @ g.conj().T
    return DensityMatrix(dim_a, dim_b, w / np.trace(w).real)


def random_pure_state(dim_a: int, dim_b: int, rng: np.random.Generator) -> PureState:
    """Haar-random pure state on the product space."""
    v = rng.normal(size=dim_a * dim_b) + 1j * rng.normal(size=dim_a * dim_b)
    return PureState(dim_a, dim_b, v / np.linalg.norm(v))
