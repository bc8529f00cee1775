"""Closed-form entanglement measures for the invariant family rho(p).

All entropic quantities are in nats.  Every mixed-state measure of the
family is piecewise: identically zero up to the separability threshold
2j/(2j+1) and given by an analytic expression above it.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

from .spin_algebra import Spin
from .states import (
    DensityMatrix,
    PureState,
    partial_transpose_b,
    schmidt,
    separability_threshold,
)

_ENTROPY_CLAMP = 1e-12


class MeasureKind(enum.Enum):
    EOF = "eof"
    EPSILON = "epsilon"
    I_CONCURRENCE = "iconcurrence"
    TANGLE = "tangle"
    NEGATIVITY = "negativity"
    CR_NEGATIVITY = "crnegativity"


@dataclass
class MeasureReport:
    """A named measure value with provenance."""

    kind: MeasureKind
    j: Spin
    p: float
    value: float
    method: str = "closed_form"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("measure values are nonnegative")


def binary_entropy(x: float) -> float:
    """H(x) = -x ln x - (1-x) ln(1-x), with 0 ln 0 = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("binary entropy requires x in [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1 - x) * math.log(1 - x)


def _spectrum_entropy(eigs: np.ndarray) -> float:
    """Shannon entropy of a probability spectrum, clamping tiny negatives."""
    worst = float(np.min(np.real(eigs), initial=0.0))
    if worst < -_ENTROPY_CLAMP:
        logger.debug("clamped negative spectral weight of magnitude %.3e", -worst)
    lam = np.clip(np.real(eigs), 0.0, 1.0)
    lam = lam[lam > _ENTROPY_CLAMP]
    return float(-np.sum(lam * np.log(lam)))


def _require_nonzero_spin(j: Spin) -> Spin:
    j = Spin.parse(j)
    if j.twice_j == 0:
        raise ValueError("measures of rho(p) are defined for j >= 1/2")
    return j


def pure_entanglement(psi: PureState) -> float:
    """Entropy of either marginal, from the Schmidt spectrum."""
    s = schmidt(psi).coefficients
    return _spectrum_entropy(s**2)


def concurrence_pure(psi: PureState) -> float:
    """sqrt(2 [1 - tr(rho_A^2)]); equals 2 sqrt(mu(1-mu)) at Schmidt rank 2."""
    s2 = schmidt(psi).coefficients ** 2
    return float(np.sqrt(max(2.0 * (1.0 - np.sum(s2**2)), 0.0)))


def negativity_pure(psi: PureState) -> float:
    """Negativity of the pure-state projector: (sum of Schmidt coeffs)^2 - 1."""
    s = schmidt(psi).coefficients
    return float(np.sum(s) ** 2 - 1.0)


def p_mu(j: Spin, mu: float) -> float:
    """Overlap of chi(mu) with the j-1/2 subspace: (sqrt(mu)+sqrt(2j(1-mu)))^2/(2j+1)."""
    j = _require_nonzero_spin(j)
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    tj = j.twice_j
    return (math.sqrt(mu) + math.sqrt(tj * (1 - mu))) ** 2 / (tj + 1)


def mu_min(j: Spin, p: float) -> float:
    """Smaller-branch inverse of p_mu: (sqrt(p)-sqrt(2j(1-p)))^2 / (2j+1)."""
    j = _require_nonzero_spin(j)
    thr = separability_threshold(j)
    if not thr <= p <= 1.0:
        raise ValueError(f"mu_min requires p in [{thr}, 1]")
    tj = j.twice_j
    return (math.sqrt(p) - math.sqrt(tj * (1 - p))) ** 2 / (tj + 1)


def epsilon(j: Spin, p: float) -> float:
    """Minimal pure-state entanglement at fixed subspace overlap p."""
    j = _require_nonzero_spin(j)
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p <= separability_threshold(j):
        return 0.0
    return binary_entropy(mu_min(j, p))


def eof(j: Spin, p: float) -> float:
    """Entanglement of formation of rho(p); epsilon is already convex."""
    return epsilon(j, p)


def epsilon_second_derivative(j: Spin, p: float) -> float:
    """The analytic second derivative of epsilon on the open entangled interval."""
    j = _require_nonzero_spin(j)
    thr = separability_threshold(j)
    if not thr < p < 1.0:
        raise ValueError(f"second derivative is defined on ({thr}, 1)")
    tj = j.twice_j
    num = math.sqrt(tj * p) + math.sqrt(1 - p)
    den = math.sqrt(p) - math.sqrt(tj * (1 - p))
    lhs = math.sqrt(tj) / (tj + 1) * math.log(num / den) - math.sqrt(p * (1 - p))
    return lhs / (p * (1 - p)) ** 1.5


def second_derivative_lower_bound(j: Spin) -> float:
    """Lower bound on (p(1-p))^(3/2) * epsilon''(p): sqrt(2j) ln(2j) / (2(2j+1))."""
    tj = _require_nonzero_spin(j).twice_j
    return math.sqrt(tj) / (2 * (tj + 1)) * math.log(tj)


def c_of_p(j: Spin, p: float) -> float:
    """Minimal pure-state concurrence at overlap p, for p above threshold."""
    j = _require_nonzero_spin(j)
    tj = j.twice_j
    return 2.0 / (tj + 1) * (
        math.sqrt(tj) * (2 * p - 1) - (tj - 1) * math.sqrt(p * (1 - p))
    )


def i_concurrence(j: Spin, p: float) -> float:
    """I-concurrence of rho(p): 0 below threshold, c(p) above."""
    j = _require_nonzero_spin(j)
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p <= separability_threshold(j):
        return 0.0
    return c_of_p(j, p)


def tangle(j: Spin, p: float) -> float:
    """Tangle of rho(p): the square of the I-concurrence branch."""
    j = _require_nonzero_spin(j)
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p <= separability_threshold(j):
        return 0.0
    return c_of_p(j, p) ** 2


def cr_negativity(j: Spin, p: float) -> float:
    """Convex-roof-extended negativity; identical to the I-concurrence here."""
    return i_concurrence(j, p)


def negativity(rho: DensityMatrix) -> float:
    """-2 * (sum of negative partial-transpose eigenvalues)."""
    eigs = np.linalg.eigvalsh(partial_transpose_b(rho))
    return float(-2.0 * eigs[eigs < 0].sum())


def negativity_closed_form(j: Spin, p: float) -> float:
    """max[0, 2(p - 2j/(2j+1))]."""
    j = _require_nonzero_spin(j)
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return max(0.0, 2.0 * (p - separability_threshold(j)))


def pt_eigenvalues_closed_form(j: Spin, p: float) -> tuple[float, float]:
    """The two partial-transpose eigenvalues (mu_plus, mu_minus) of rho(p).

    mu_plus has degeneracy 2(j+1), mu_minus has degeneracy 2j.
    """
    j = _require_nonzero_spin(j)
    tj = j.twice_j
    mu_plus = (1.0 / (tj + 1) + p) / (tj + 2)
    mu_minus = 1.0 / (tj + 1) - p / tj
    return mu_plus, mu_minus


def f_extremum(j: Spin, mu: float, m: float) -> float:
    """Stationary value F_m = (sqrt((1-mu) r_m) + sqrt(mu r_{-m}))^2.

    r_m = j + 1/2 + m; valid for half-integer m in [-j+1/2, j-1/2].
    """
    j = _require_nonzero_spin(j)
    tm = int(round(2 * float(m)))
    if tm % 2 == j.twice_j % 2 or abs(tm) > j.twice_j - 1:
        raise ValueError("m must be a coupled-subspace label in [-j+1/2, j-1/2]")
    if not 0.0 <= mu <= 1.0 / (j.twice_j + 1):
        raise ValueError("mu must lie in [0, 1/(2j+1)]")
    r_m = (j.twice_j + 1 + tm) / 2
    r_neg = (j.twice_j + 1 - tm) / 2
    return (math.sqrt((1 - mu) * r_m) + math.sqrt(mu * r_neg)) ** 2


_CLOSED_FORMS = {
    MeasureKind.EOF: eof,
    MeasureKind.EPSILON: epsilon,
    MeasureKind.I_CONCURRENCE: i_concurrence,
    MeasureKind.TANGLE: tangle,
    MeasureKind.NEGATIVITY: negativity_closed_form,
    MeasureKind.CR_NEGATIVITY: cr_negativity,
}

_KIND_ALIASES = {
    "eof": MeasureKind.EOF,
    "epsilon": MeasureKind.EPSILON,
    "iconcurrence": MeasureKind.I_CONCURRENCE,
    "concurrence": MeasureKind.I_CONCURRENCE,
    "tangle": MeasureKind.TANGLE,
    "negativity": MeasureKind.NEGATIVITY,
    "crnegativity": MeasureKind.CR_NEGATIVITY,
}


def parse_measure_kind(name: str) -> MeasureKind:
    key = name.strip().lower().replace("-", "").replace("_", "")
    if key not in _KIND_ALIASES:
        raise ValueError(f"unknown measure {name!r}; known: {sorted(_KIND_ALIASES)}")
    return _KIND_ALIASES[key]


def evaluate(kind: MeasureKind, j: Spin, p: float) -> MeasureReport:
    """Closed-form evaluation of one measure at (j, p)."""
    j = Spin.parse(j)
    value = _CLOSED_FORMS[kind](j, p)
    return MeasureReport(kind=kind, j=j, p=p, value=value)
