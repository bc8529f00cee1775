"""Brute-force numerical verifiers for the closed-form measures.

These optimizers never consult the analytic expressions they are meant to
check: the constrained pure-state search, the ensemble (convex-roof)
search, and the unitary overlap maximization all work directly from the
definitions.  Gradients come from jax; the outer loops are scipy L-BFGS
with Haar-random multi-starts.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.optimize

import jax

jax.config.update("jax_enable_x64", True)

import jax.numpy as jnp
from jax.scipy.linalg import expm as jexpm

from .spin_algebra import HALF, Spin, coupled_basis
from .states import DensityMatrix, PureState, chi_state, jminus_projector

_PURE_MEASURES = ("entropy", "concurrence", "tangle", "negativity")


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 8
    max_iterations: int = 3000
    convergence_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be positive")


@dataclass
class EnsembleDecomposition:
    """A pure-state ensemble sum_i w_i |psi_i><psi_i|."""

    weights: np.ndarray
    states: list[PureState]

    def reconstruction(self) -> np.ndarray:
        out = np.zeros((self.states[0].amplitudes.size,) * 2, dtype=complex)
        for w, psi in zip(self.weights, self.states):
            out += w * np.outer(psi.amplitudes, psi.amplitudes.conj())
        return out

    def reconstruction_error(self, rho: DensityMatrix) -> float:
        return float(np.max(np.abs(self.reconstruction() - rho.data)))


@dataclass
class OracleResult:
    value: float
    converged: bool
    iterations: int
    restarts: int
    witness_state: PureState | None = None
    witness_unitary: np.ndarray | None = None
    decomposition: EnsembleDecomposition | None = None
    message: str = ""


# Floors keep gradients finite where the exact expressions have infinite
# slope (sqrt at a double root, x ln x at zero); the induced bias is far
# below every verification tolerance.
_DISC_FLOOR = 1e-24
_MU_FLOOR = 1e-12


def _mu_from_pair(psi_flat, dim_a):
    """Smaller B-marginal eigenvalue of a unit vector on dim_a x 2 (jax)."""
    m = psi_flat.reshape(dim_a, 2)
    g = m.conj().T @ m  # 2x2 Gram; trace 1 for normalized input
    det = jnp.real(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0])
    disc = jnp.sqrt(jnp.clip(0.25 - det, _DISC_FLOOR, None))
    return jnp.clip(0.5 - disc, _MU_FLOOR, 0.5)


def _pure_measure_of_mu(mu, measure: str):
    if measure == "entropy":
        one = jnp.clip(1.0 - mu, _MU_FLOOR, 1.0)
        return -mu * jnp.log(mu) - one * jnp.log(one)
    if measure in ("concurrence", "negativity"):
        return 2.0 * jnp.sqrt(mu * (1.0 - mu))
    if measure == "tangle":
        return 4.0 * mu * (1.0 - mu)
    raise ValueError(f"unknown pure-state measure {measure!r}; known: {_PURE_MEASURES}")


def _to_complex(x, n):
    return x[:n] + 1j * x[n:]


@lru_cache(maxsize=None)
def _subspace_frames(twice_j: int):
    """Orthonormal frames (columns) for the j-1/2 and j+1/2 subspaces."""
    j = Spin(twice_j)
    basis = coupled_basis(j, HALF)
    lo = Spin(twice_j - 1)
    hi = Spin(twice_j + 1)
    b_minus = np.column_stack([basis.ket(lo.j, m) for m in lo.m_values()])
    b_plus = np.column_stack([basis.ket(hi.j, m) for m in hi.m_values()])
    return jnp.asarray(b_minus), jnp.asarray(b_plus)


@lru_cache(maxsize=None)
def _epsilon_objective(twice_j: int, p: float):
    """Jitted E(psi) over the exact-overlap slice; params are free reals."""
    b_minus, b_plus = _subspace_frames(twice_j)
    n_minus = b_minus.shape[1]
    n_plus = b_plus.shape[1]
    dim_a = twice_j + 1
    sqrt_p = np.sqrt(p)
    sqrt_q = np.sqrt(1.0 - p)

    def build(x):
        a = _to_complex(x[: 2 * n_minus], n_minus)
        b = _to_complex(x[2 * n_minus :], n_plus)
        a = a / jnp.linalg.norm(a)
        b = b / jnp.linalg.norm(b)
        return sqrt_p * (b_minus @ a) + sqrt_q * (b_plus @ b)

    def objective(x):
        return _pure_measure_of_mu(_mu_from_pair(build(x), dim_a), "entropy")

    return jax.jit(jax.value_and_grad(objective)), jax.jit(build), 2 * (n_minus + n_plus)


def _lbfgs(fun_and_grad, x0, cfg: OptimizerConfig):
    def f(x):
        v, g = fun_and_grad(jnp.asarray(x))
        return float(v), np.asarray(g, dtype=float)

    res = scipy.optimize.minimize(
        f, x0, jac=True, method="L-BFGS-B",
        options={"maxiter": cfg.max_iterations, "ftol": cfg.convergence_tol,
                 "gtol": 1e-12, "maxls": 100},
    )
    return res


def min_epsilon_numeric(j: Spin, p: float, cfg: OptimizerConfig = OptimizerConfig()) -> OracleResult:
    """Minimize E(psi) over unit vectors with <psi|P_{j-1/2}|psi> = p.

    The constraint is enforced exactly by splitting the state into its
    components inside and outside the j-1/2 subspace and fixing their norms
    to sqrt(p) and sqrt(1-p).
    """
    j = Spin.parse(j)
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    fun_and_grad, build, n_params = _epsilon_objective(j.twice_j, float(p))
    rng = np.random.default_rng(cfg.seed)
    best = None
    total_iter = 0
    for _ in range(cfg.restarts):
        x0 = rng.normal(size=n_params)
        res = _lbfgs(fun_and_grad, x0, cfg)
        total_iter += res.nit
        if best is None or res.fun < best.fun:
            best = res
    psi = np.asarray(build(jnp.asarray(best.x)))
    witness = PureState(j.dim, 2, psi / np.linalg.norm(psi))
    return OracleResult(
        value=float(best.fun),
        converged=bool(best.success),
        iterations=total_iter,
        restarts=cfg.restarts,
        witness_state=witness,
        message="" if best.success else str(best.message),
    )


@lru_cache(maxsize=None)
def _roof_objective(dim_a: int, dim_b: int, n_terms: int, rank: int, measure: str):
    """Jitted ensemble-average objective over the mixture-unitary freedom.

    Every size-n decomposition of rho is S = Q @ W.T with Q an n x r
    column-orthonormal matrix and W the sqrt-weighted eigenvectors of rho;
    Q is produced by QR of a free complex matrix.
    """

    def objective(x, w_frame):
        z = _to_complex(x, n_terms * rank).reshape(n_terms, rank)
        q, _ = jnp.linalg.qr(z)
        s = q @ w_frame.T  # rows are unnormalized ensemble members
        mats = s.reshape(n_terms, dim_a, dim_b)
        grams = jnp.einsum("nai,naj->nij", mats.conj(), mats)
        w = jnp.real(jnp.trace(grams, axis1=1, axis2=2))
        dets = jnp.real(
            grams[:, 0, 0] * grams[:, 1, 1] - grams[:, 0, 1] * grams[:, 1, 0]
        )
        w_safe = jnp.clip(w, 1e-30, None)
        disc = jnp.sqrt(jnp.clip(0.25 - dets / w_safe**2, _DISC_FLOOR, None))
        mu = jnp.clip(0.5 - disc, _MU_FLOOR, 0.5)
        return jnp.sum(w * _pure_measure_of_mu(mu, measure))

    return jax.jit(jax.value_and_grad(objective))


def convex_roof_numeric(
    rho: DensityMatrix,
    measure: str = "entropy",
    n_terms: int | None = None,
    cfg: OptimizerConfig = OptimizerConfig(),
) -> OracleResult:
    """Minimize the ensemble average of a pure-state measure over all
    decompositions of rho; an upper bound on the true convex roof.

    `measure` is one of 'entropy', 'concurrence', 'tangle', 'negativity'
    (all functions of the smaller Schmidt square, since dim_b = 2).
    """
    if rho.dim_b != 2:
        raise ValueError("the ensemble oracle expects a (dim_a x 2) system")
    if measure not in _PURE_MEASURES:
        raise ValueError(f"unknown pure-state measure {measure!r}; known: {_PURE_MEASURES}")
    evals, evecs = np.linalg.eigh(rho.data)
    keep = evals > 1e-12
    lam, vecs = evals[keep], evecs[:, keep]
    rank = int(lam.size)
    if n_terms is None:
        n_terms = rank * rank  # Caratheodory-type bound for convex roofs
    if n_terms < rank:
        raise ValueError(f"n_terms must be >= rank(rho) = {rank}")
    w_frame = jnp.asarray(vecs * np.sqrt(lam))  # columns scaled by sqrt(eigenvalue)
    rng = np.random.default_rng(cfg.seed)

    if rank == 1:
        # pure input: the decomposition is unique up to phases
        psi = PureState(rho.dim_a, rho.dim_b, np.asarray(vecs[:, 0]))
        mu = float(np.min(np.linalg.eigvalsh(psi.matrix.conj().T @ psi.matrix)))
        value = float(_pure_measure_of_mu(jnp.clip(mu, _MU_FLOOR, 0.5), measure))
        decomp = EnsembleDecomposition(np.array([1.0]), [psi])
        return OracleResult(value=value, converged=True, iterations=0,
                            restarts=0, decomposition=decomp)

    # The rank^2-size landscape is flat and multimodal; smaller ensembles
    # (still valid decompositions, embeddable into n_terms by zero weights)
    # expose different basins, so multi-start across a ladder of sizes and
    # keep the best, then polish the winner with random kicks.
    sizes = sorted({min(s, n_terms) for s in (rank, 2 * rank, 4 * rank, 6 * rank, n_terms)})
    best_val = np.inf
    best_x = None
    best_n = n_terms
    total_iter = 0
    any_converged = False
    for n in sizes:
        fun_and_grad = _roof_objective(rho.dim_a, rho.dim_b, n, rank, measure)
        bound = lambda x: fun_and_grad(jnp.asarray(x), w_frame)
        for _ in range(cfg.restarts):
            res = _lbfgs(bound, rng.normal(size=2 * n * rank), cfg)
            total_iter += res.nit
            any_converged |= bool(res.success)
            if res.fun < best_val:
                best_val, best_x, best_n = res.fun, res.x, n
    fun_and_grad = _roof_objective(rho.dim_a, rho.dim_b, best_n, rank, measure)
    bound = lambda x: fun_and_grad(jnp.asarray(x), w_frame)
    for scale in (0.5, 0.5, 0.15):
        for _ in range(cfg.restarts):
            res = _lbfgs(bound, best_x + scale * rng.normal(size=best_x.size), cfg)
            total_iter += res.nit
            if res.fun < best_val:
                best_val, best_x = res.fun, res.x

    # reconstruct the winning ensemble in numpy
    z = (best_x[: best_n * rank] + 1j * best_x[best_n * rank :]).reshape(best_n, rank)
    q, _ = np.linalg.qr(z)
    s = q @ np.asarray(w_frame).T
    weights = np.sum(np.abs(s) ** 2, axis=1)
    states = []
    kept_weights = []
    for i in range(best_n):
        if weights[i] > 1e-12:
            states.append(PureState(rho.dim_a, rho.dim_b, s[i] / np.sqrt(weights[i])))
            kept_weights.append(weights[i])
    decomp = EnsembleDecomposition(np.asarray(kept_weights), states)
    return OracleResult(
        value=float(best_val),
        converged=any_converged,
        iterations=total_iter,
        restarts=cfg.restarts,
        decomposition=decomp,
        message="" if any_converged else "no restart reported convergence",
    )


@lru_cache(maxsize=None)
def _pmu_objective(twice_j: int, mu: float):
    """Jitted negative overlap p_mu(U) with U = expm(i H(x))."""
    j = Spin(twice_j)
    proj = jnp.asarray(jminus_projector(j))
    chi = np.asarray(chi_state(j, mu).matrix)
    chi_m = jnp.asarray(chi)
    d = j.dim
    iu = np.triu_indices(d, k=1)

    def build_unitary(x):
        diag = x[:d]
        re = x[d : d + iu[0].size]
        im = x[d + iu[0].size :]
        h = jnp.zeros((d, d), dtype=complex)
        h = h.at[iu].set(re + 1j * im)
        h = h + h.conj().T + jnp.diag(diag.astype(complex))
        return jexpm(1j * h)

    def objective(x):
        u = build_unitary(x)
        psi = (u @ chi_m).reshape(-1)
        return -jnp.real(psi.conj() @ (proj @ psi))

    return jax.jit(jax.value_and_grad(objective)), jax.jit(build_unitary), d * d


def max_p_mu_over_u(j: Spin, mu: float, cfg: OptimizerConfig = OptimizerConfig()) -> OracleResult:
    """Maximize <psi_mu(U)|P_{j-1/2}|psi_mu(U)> over unitaries U.

    U is parameterized as expm(iH) with a free Hermitian generator, which
    is surjective onto the unitary group; multi-start from random seeds.
    """
    j = Spin.parse(j)
    if not 0.0 <= mu <= 1.0 / (j.twice_j + 1):
        raise ValueError("mu must lie in [0, 1/(2j+1)]")
    fun_and_grad, build_unitary, n_params = _pmu_objective(j.twice_j, float(mu))
    rng = np.random.default_rng(cfg.seed)
    best = None
    total_iter = 0
    for _ in range(cfg.restarts):
        x0 = rng.normal(size=n_params)
        res = _lbfgs(fun_and_grad, x0, cfg)
        total_iter += res.nit
        if best is None or res.fun < best.fun:
            best = res
    return OracleResult(
        value=float(-best.fun),
        converged=bool(best.success),
        iterations=total_iter,
        restarts=cfg.restarts,
        witness_unitary=np.asarray(build_unitary(jnp.asarray(best.x))),
        message="" if best.success else str(best.message),
    )


def probe_p_mu_bound(j: Spin, n_samples: int, seed: int = 0) -> float:
    """Max of p_mu(U) - p_mu over random (mu, U); nonpositive up to rounding.

    mu is uniform on [0, 1/(2j+1)] and U is Haar (QR of a Ginibre matrix).
    """
    j = Spin.parse(j)
    rng = np.random.default_rng(seed)
    proj = jminus_projector(j)
    d = j.dim
    tj = j.twice_j
    worst = -np.inf
    for _ in range(n_samples):
        mu = rng.uniform(0.0, 1.0 / (tj + 1))
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        q, r = np.linalg.qr(g)
        u = q * (np.diag(r) / np.abs(np.diag(r)))
        psi = (u @ chi_state(j, mu).matrix).ravel()
        overlap = float(np.real(psi.conj() @ (proj @ psi)))
        p_ref = (np.sqrt(mu) + np.sqrt(tj * (1 - mu))) ** 2 / (tj + 1)
        worst = max(worst, overlap - p_ref)
    return worst


@dataclass
class LowerEnvelope:
    """Piecewise-linear lower convex envelope of 1-D samples."""

    vertices: np.ndarray  # shape (k, 2), x strictly increasing

    def __call__(self, x):
        return np.interp(x, self.vertices[:, 0], self.vertices[:, 1])


def convex_hull_1d(samples) -> LowerEnvelope:
    """Lower convex envelope of (p, value) samples via the monotone chain.

    Samples must be sorted by p; duplicate p keeps the minimum value (with
    a warning when the values differ).
    """
    pts = [(float(p), float(v)) for p, v in samples]
    if len(pts) < 2:
        raise ValueError("need at least 2 samples")
    if any(pts[i + 1][0] < pts[i][0] for i in range(len(pts) - 1)):
        raise ValueError("samples must be sorted by p")
    dedup: list[tuple[float, float]] = []
    for p, v in pts:
        if dedup and dedup[-1][0] == p:
            if dedup[-1][1] != v:
                warnings.warn(f"duplicate p={p} with differing values; keeping the minimum")
            dedup[-1] = (p, min(dedup[-1][1], v))
        else:
            dedup.append((p, v))
    hull: list[tuple[float, float]] = []
    for pt in dedup:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it turns strictly upward
            if (x2 - x1) * (pt[1] - y1) - (pt[0] - x1) * (y2 - y1) < 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    return LowerEnvelope(np.asarray(hull))
