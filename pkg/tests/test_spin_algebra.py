"""Operators, coupled bases, rotations, Haar sampling."""

import math

import numpy as np
import pytest

from rotsym.spin_algebra import (
    HALF,
    Rotation,
    Spin,
    coupled_basis,
    haar_rotation,
    spin_operators,
    wigner_rotation,
)

SPINS = [Spin(t) for t in range(1, 9)]  # j = 1/2 .. 4


def test_spin_parse_forms():
    assert Spin.parse("1/2").twice_j == 1
    assert Spin.parse("3/2").twice_j == 3
    assert Spin.parse("1").twice_j == 2
    assert Spin.parse(0.5).twice_j == 1
    assert Spin.parse(Spin(4)).twice_j == 4
    assert str(Spin(1)) == "1/2"
    assert str(Spin(2)) == "1"
    assert Spin(3).dim == 4
    assert Spin(3).j == 1.5


def test_spin_rejects_bad_values():
    with pytest.raises(ValueError):
        Spin(-1)
    with pytest.raises(ValueError):
        Spin.parse(0.3)
    with pytest.raises(ValueError):
        Spin.parse("x")


def test_half_spin_is_pauli_over_two():
    ops = spin_operators(HALF)
    assert np.allclose(ops.jz, np.diag([0.5, -0.5]))
    assert np.allclose(ops.jx, 0.5 * np.array([[0, 1], [1, 0]]))
    assert np.allclose(ops.jy, 0.5 * np.array([[0, -1j], [1j, 0]]))


def test_spin_one_jz_descending():
    ops = spin_operators(Spin(2))
    assert np.allclose(ops.jz, np.diag([1.0, 0.0, -1.0]))


@pytest.mark.parametrize("j", SPINS, ids=str)
def test_commutation_relations(j):
    ops = spin_operators(j)
    pairs = [(ops.jx, ops.jy, ops.jz), (ops.jy, ops.jz, ops.jx), (ops.jz, ops.jx, ops.jy)]
    for a, b, c in pairs:
        assert np.max(np.abs(a @ b - b @ a - 1j * c)) < 1e-12


@pytest.mark.parametrize("j", SPINS, ids=str)
def test_casimir_identity(j):
    ops = spin_operators(j)
    casimir = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
    assert np.max(np.abs(casimir - j.j * (j.j + 1) * np.eye(j.dim))) < 1e-12


def test_casimir_j3_is_12():
    ops = spin_operators(Spin(6))
    casimir = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
    assert np.max(np.abs(casimir - 12.0 * np.eye(7))) < 1e-12


def _total_operators(j1, j2):
    a, b = spin_operators(j1), spin_operators(j2)
    i1, i2 = np.eye(j1.dim), np.eye(j2.dim)
    tot = [np.kron(m, i2) + np.kron(i1, n) for m, n in zip((a.jx, a.jy, a.jz), (b.jx, b.jy, b.jz))]
    return tot[0] @ tot[0] + tot[1] @ tot[1] + tot[2] @ tot[2], tot[2]


COUPLE_PAIRS = [(Spin(a), Spin(b)) for a in range(1, 5) for b in range(1, a + 1)]


@pytest.mark.parametrize("j1,j2", COUPLE_PAIRS, ids=lambda s: str(s))
def test_coupled_basis_invariants(j1, j2):
    cb = coupled_basis(j1, j2)
    dim = j1.dim * j2.dim
    jsq, jz = _total_operators(j1, j2)

    vectors = [(J, m, v) for (J, m), v in cb.items()]
    mat = np.column_stack([v for _, _, v in vectors])
    assert mat.shape == (dim, dim)
    assert np.max(np.abs(mat.conj().T @ mat - np.eye(dim))) < 1e-10

    total = sum(cb.projector(J.j) for J in cb.total_spins)
    assert np.max(np.abs(total - np.eye(dim))) < 1e-10
    for J in cb.total_spins:
        for Jp in cb.total_spins:
            prod = cb.projector(J.j) @ cb.projector(Jp.j)
            expect = cb.projector(J.j) if J == Jp else np.zeros((dim, dim))
            assert np.max(np.abs(prod - expect)) < 1e-10

    for J, m, v in vectors:
        assert np.max(np.abs(jsq @ v - J * (J + 1) * v)) < 1e-10
        assert np.max(np.abs(jz @ v - m * v)) < 1e-10


def test_coupled_total_spin_range():
    cb = coupled_basis(Spin(4), Spin(3))  # j1=2, j2=3/2
    assert sorted(J.j for J in cb.total_spins) == [0.5, 1.5, 2.5, 3.5]


def test_stretched_state_half_half():
    cb = coupled_basis(HALF, HALF)
    v = cb.ket(1, 1)
    expect = np.zeros(4)
    expect[0] = 1.0  # |up,up> in A-major ordering
    assert np.allclose(v, expect, atol=1e-12)


def test_singlet_half_half():
    cb = coupled_basis(HALF, HALF)
    v = cb.ket(0, 0)
    # lower-sign branch: -|down,up>/sqrt2 + |up,down>/sqrt2
    expect = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2)
    assert np.allclose(v, expect, atol=1e-12)
    jsq, _ = _total_operators(HALF, HALF)
    assert abs(v.conj() @ jsq @ v) < 1e-12


def _closed_form_ket(j: Spin, upper: bool, m: float) -> np.ndarray:
    """Coupling of spin j with spin 1/2, written out from the standard
    two-term Clebsch-Gordan expression. Independent of the library's
    diagonalization-based construction."""
    tj = j.twice_j
    sign = 1.0 if upper else -1.0
    vec = np.zeros(2 * j.dim)
    ca = sign * math.sqrt((tj + 1 + sign * 2 * m) / (2 * (tj + 1)))
    cb_ = math.sqrt((tj + 1 - sign * 2 * m) / (2 * (tj + 1)))
    m1a = m - 0.5  # pairs with spin-1/2 up
    m1b = m + 0.5  # pairs with spin-1/2 down
    if abs(m1a) <= j.j:
        vec[int(round(j.j - m1a)) * 2 + 0] = ca
    if abs(m1b) <= j.j:
        vec[int(round(j.j - m1b)) * 2 + 1] = cb_
    return vec


@pytest.mark.parametrize("twice_j", range(1, 7))
def test_coupled_basis_matches_closed_form_with_half(twice_j):
    j = Spin(twice_j)
    cb = coupled_basis(j, HALF)
    for upper in (True, False):
        J = j.j + (0.5 if upper else -0.5)
        if J < 0:
            continue
        m = -J
        while m <= J + 1e-9:
            assert np.max(np.abs(cb.ket(J, m) - _closed_form_ket(j, upper, m))) < 1e-12
            m += 1.0


def test_coupled_coefficient_spin_one_example():
    # j=1 coupled with 1/2, |3/2, 1/2>: coefficient sqrt(2/3) on
    # |1,0>x|1/2,1/2> and sqrt(1/3) on |1,1>x|1/2,-1/2>
    cb = coupled_basis(Spin(2), HALF)
    v = cb.ket(1.5, 0.5)
    assert abs(v[1 * 2 + 0] - math.sqrt(2.0 / 3.0)) < 1e-12
    assert abs(v[0 * 2 + 1] - math.sqrt(1.0 / 3.0)) < 1e-12


def test_rotation_axis_normalized():
    r = Rotation.about((0.0, 0.0, 2.0), 1.0)
    assert abs(np.linalg.norm(r.axis) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        Rotation.about((0.0, 0.0, 0.0), 1.0)


def test_wigner_angle_zero_is_identity():
    for j in SPINS[:4]:
        d = wigner_rotation(j, Rotation.identity())
        assert np.max(np.abs(d - np.eye(j.dim))) < 1e-12


def test_wigner_two_pi_spinor():
    for axis in [(1, 0, 0), (0, 1, 0), (0.6, 0.0, 0.8)]:
        d = wigner_rotation(HALF, Rotation.about(axis, 2 * math.pi))
        assert np.max(np.abs(d + np.eye(2))) < 1e-10


def test_wigner_unitary():
    rng = np.random.default_rng(3)
    for _ in range(20):
        r = haar_rotation(rng)
        for j in (HALF, Spin(3), Spin(4)):
            d = wigner_rotation(j, r)
            assert np.max(np.abs(d @ d.conj().T - np.eye(j.dim))) < 1e-10


def test_wigner_homomorphism():
    rng = np.random.default_rng(11)
    for _ in range(25):
        r1, r2 = haar_rotation(rng), haar_rotation(rng)
        r12 = r1.compose(r2)
        for j in (HALF, Spin(2), Spin(3)):
            lhs = wigner_rotation(j, r1) @ wigner_rotation(j, r2)
            rhs = wigner_rotation(j, r12)
            assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_conjugation_identity():
    # D(R)* equals the pi-rotation about y conjugating D(R)
    rng = np.random.default_rng(5)
    rotations = [haar_rotation(rng) for _ in range(100)]
    for j in [Spin(t) for t in range(1, 5)]:
        ops = spin_operators(j)
        evals, evecs = np.linalg.eigh(ops.jy)
        epy = (evecs * np.exp(1j * math.pi * evals)) @ evecs.conj().T
        for r in rotations:
            d = wigner_rotation(j, r)
            assert np.max(np.abs(d.conj() - epy @ d @ epy.conj().T)) < 1e-9


def test_haar_determinism():
    a = haar_rotation(np.random.default_rng(42))
    b = haar_rotation(np.random.default_rng(42))
    assert a.axis == b.axis and a.angle == b.angle


def test_haar_statistics():
    rng = np.random.default_rng(7)
    n = 100_000
    tol = 5.0 / math.sqrt(n)
    mean = np.zeros((2, 2), dtype=complex)
    top = 0.0
    for _ in range(n):
        d = wigner_rotation(HALF, haar_rotation(rng))
        mean += d
        top += abs(d[0, 0]) ** 2
    mean /= n
    assert np.max(np.abs(mean)) < tol
    assert abs(top / n - 0.5) < tol
