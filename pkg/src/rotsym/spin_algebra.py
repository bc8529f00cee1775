"""Angular-momentum operators, coupled bases, spin rotations, and Haar sampling.

Conventions: hbar = 1, the single-spin basis is ordered by descending Jz
eigenvalue (m = j first), and coupled states carry Condon-Shortley phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

_TOL_AXIS = 1e-12


@dataclass(frozen=True, order=True)
class Spin:
    """A spin quantum number, stored as 2j so half-integers stay exact."""

    twice_j: int

    def __post_init__(self) -> None:
        if not isinstance(self.twice_j, (int, np.integer)) or self.twice_j < 0:
            raise ValueError(f"twice_j must be a nonnegative integer, got {self.twice_j!r}")

    @property
    def j(self) -> float:
        return self.twice_j / 2

    @property
    def dim(self) -> int:
        return self.twice_j + 1

    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers m = j, j-1, ..., -j."""
        return (self.twice_j - 2 * np.arange(self.dim)) / 2

    @classmethod
    def parse(cls, value) -> "Spin":
        """Accept a Spin, a number, or a string like '3/2', '1.5', '2'."""
        if isinstance(value, Spin):
            return value
        if isinstance(value, str):
            frac = Fraction(value)
            twice = frac * 2
            if twice.denominator != 1:
                raise ValueError(f"{value!r} is not an integer or half-integer spin")
            return cls(int(twice))
        twice = 2 * float(value)
        if abs(twice - round(twice)) > 1e-9:
            raise ValueError(f"{value!r} is not an integer or half-integer spin")
        return cls(int(round(twice)))

    def __str__(self) -> str:
        if self.twice_j % 2 == 0:
            return str(self.twice_j // 2)
        return f"{self.twice_j}/2"


HALF = Spin(1)


@dataclass(frozen=True)
class SpinOperators:
    """Matrices of Jx, Jy, Jz in the descending-m basis."""

    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def dim(self) -> int:
        return self.jz.shape[0]

    def along(self, axis: np.ndarray) -> np.ndarray:
        """n . J for a 3-vector n."""
        n = np.asarray(axis, dtype=float)
        return n[0] * self.jx + n[1] * self.jy + n[2] * self.jz


@lru_cache(maxsize=None)
def _spin_operators_cached(twice_j: int) -> SpinOperators:
    j = twice_j / 2
    dim = twice_j + 1
    m = (twice_j - 2 * np.arange(dim)) / 2
    jz = np.diag(m).astype(complex)
    # J+ |j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>; raising moves one index up.
    raise_coeff = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jplus = np.diag(raise_coeff, k=1).astype(complex)
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / (2 * 1j)
    return SpinOperators(jx=jx, jy=jy, jz=jz)


def spin_operators(j: Spin) -> SpinOperators:
    """Standard ladder-operator construction of Jx, Jy, Jz for spin j."""
    return _spin_operators_cached(Spin.parse(j).twice_j)


@dataclass(frozen=True)
class Rotation:
    """An SU(2) rotation: unit axis and angle in [0, 4*pi).

    The angle lives on the double cover, so a 2*pi turn is distinct from
    the identity (it flips the sign of half-integer representations).
    """

    axis: tuple
    angle: float

    def __post_init__(self) -> None:
        ax = np.asarray(self.axis, dtype=float)
        if ax.shape != (3,):
            raise ValueError("axis must be a 3-vector")
        if abs(np.linalg.norm(ax) - 1.0) > _TOL_AXIS:
            raise ValueError("axis must be a unit vector")
        object.__setattr__(self, "axis", tuple(ax))

    @classmethod
    def about(cls, axis, angle: float) -> "Rotation":
        """Rotation about an arbitrary (non-normalized) axis."""
        ax = np.asarray(axis, dtype=float)
        norm = np.linalg.norm(ax)
        if norm == 0:
            raise ValueError("axis must be nonzero")
        return cls(axis=tuple(ax / norm), angle=float(angle) % (4 * math.pi))

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(axis=(0.0, 0.0, 1.0), angle=0.0)

    @classmethod
    def from_quaternion(cls, q) -> "Rotation":
        """Rotation from a unit quaternion (w, x, y, z)."""
        q = np.asarray(q, dtype=float)
        q = q / np.linalg.norm(q)
        w, v = q[0], q[1:]
        s = np.linalg.norm(v)
        # atan2 gives angle/2 in [0, pi], covering both quaternion signs
        angle = 2.0 * math.atan2(s, w)
        axis = v / s if s > 1e-15 else np.array([0.0, 0.0, 1.0])
        return cls(axis=tuple(axis), angle=angle)

    @property
    def quaternion(self) -> np.ndarray:
        """Unit quaternion (w, x, y, z) with w = cos(angle/2)."""
        h = self.angle / 2
        return np.concatenate([[math.cos(h)], math.sin(h) * np.asarray(self.axis)])

    def compose(self, other: "Rotation") -> "Rotation":
        """Rotation r with D(r) = D(self) D(other), via quaternion product."""
        w1, x1, y1, z1 = self.quaternion
        w2, x2, y2, z2 = other.quaternion
        q = np.array([
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ])
        return Rotation.from_quaternion(q)


def haar_rotation(rng: np.random.Generator) -> Rotation:
    """Draw a Haar-uniform SU(2) rotation (normalized 4-vector of normals)."""
    q = rng.normal(size=4)
    return Rotation.from_quaternion(q)


def wigner_rotation(j: Spin, r: Rotation) -> np.ndarray:
    """The spin-j rotation matrix exp(-i * angle * n.J).

    Computed by spectral decomposition of the Hermitian generator, which
    keeps the result unitary to machine precision.
    """
    j = Spin.parse(j)
    ops = spin_operators(j)
    gen = ops.along(np.asarray(r.axis))
    evals, evecs = np.linalg.eigh(gen)
    phases = np.exp(-1j * r.angle * evals)
    return (evecs * phases) @ evecs.conj().T


class CoupledBasis:
    """Total-angular-momentum eigenbasis |J,m> of a j1 (x) j2 pair.

    Product-basis indexing is subsystem-1 major, both subsystems ordered by
    descending m.  Vectors are keyed by (2J, 2m) internally; use `ket` and
    `projector` with ordinary (half-)integer arguments.
    """

    def __init__(self, j1: Spin, j2: Spin):
        self.j1 = Spin.parse(j1)
        self.j2 = Spin.parse(j2)
        self.dim = self.j1.dim * self.j2.dim
        self._vectors: dict[tuple[int, int], np.ndarray] = {}
        self._projectors: dict[int, np.ndarray] = {}
        self._build()

    @property
    def total_spins(self) -> list[Spin]:
        """Coupled J values from j1+j2 down to |j1-j2|."""
        hi = self.j1.twice_j + self.j2.twice_j
        lo = abs(self.j1.twice_j - self.j2.twice_j)
        return [Spin(t) for t in range(hi, lo - 1, -2)]

    def ket(self, J, m) -> np.ndarray:
        """The coupled state |J, m> as a product-basis column vector."""
        return self._vectors[self._key(J, m)]

    def projector(self, J) -> np.ndarray:
        """Projector onto the total-angular-momentum-J subspace."""
        tJ = Spin.parse(J).twice_j
        return self._projectors[tJ]

    def items(self):
        for (tJ, tm), vec in self._vectors.items():
            yield (tJ / 2, tm / 2), vec

    @staticmethod
    def _key(J, m) -> tuple[int, int]:
        tJ = int(round(2 * float(J)))
        tm = int(round(2 * float(m)))
        return tJ, tm

    def _build(self) -> None:
        t1, t2 = self.j1.twice_j, self.j2.twice_j
        d1, d2 = self.j1.dim, self.j2.dim
        ops1, ops2 = spin_operators(self.j1), spin_operators(self.j2)
        i1, i2 = np.eye(d1), np.eye(d2)
        jx = np.kron(ops1.jx, i2) + np.kron(i1, ops2.jx)
        jy = np.kron(ops1.jy, i2) + np.kron(i1, ops2.jy)
        jz = np.kron(ops1.jz, i2) + np.kron(i1, ops2.jz)
        jsq = jx @ jx + jy @ jy + jz @ jz
        jminus = jx - 1j * jy

        # twice the total m of each product-basis state
        tm_prod = np.add.outer(t1 - 2 * np.arange(d1), t2 - 2 * np.arange(d2)).ravel()

        for J in self.total_spins:
            tJ = J.twice_j
            jj = (tJ / 2) * (tJ / 2 + 1)
            # top state |J, J> lives in the m = J eigenspace of Jz
            idx = np.flatnonzero(tm_prod == tJ)
            block = jsq[np.ix_(idx, idx)]
            evals, evecs = np.linalg.eigh(block)
            k = int(np.argmin(np.abs(evals - jj)))
            if abs(evals[k] - jj) > 1e-8:
                raise RuntimeError(f"no J(J+1) eigenvalue in the m={J} block")
            top = np.zeros(self.dim, dtype=complex)
            top[idx] = evecs[:, k]
            # Condon-Shortley: coefficient of the largest-m1 product state in
            # |J,J> is real positive; idx is sorted so that entry comes first.
            c = top[idx[0]]
            if abs(c) < 1e-12:
                raise RuntimeError("vanishing Condon-Shortley reference coefficient")
            top *= c.conjugate() / abs(c)

            vec = top
            self._vectors[(tJ, tJ)] = vec
            for tm in range(tJ - 2, -tJ - 1, -2):
                vec = jminus @ vec
                vec = vec / np.linalg.norm(vec)
                self._vectors[(tJ, tm)] = vec

            proj = np.zeros((self.dim, self.dim), dtype=complex)
            for tm in range(tJ, -tJ - 1, -2):
                v = self._vectors[(tJ, tm)]
                proj += np.outer(v, v.conj())
            self._projectors[tJ] = proj


@lru_cache(maxsize=None)
def _coupled_basis_cached(t1: int, t2: int) -> CoupledBasis:
    return CoupledBasis(Spin(t1), Spin(t2))


def coupled_basis(j1: Spin, j2: Spin) -> CoupledBasis:
    """Cached Clebsch-Gordan coupled basis for j1 (x) j2."""
    return _coupled_basis_cached(Spin.parse(j1).twice_j, Spin.parse(j2).twice_j)
