"""Truncated-Fock entropy oracle.

Numerical verification of the information-theoretic backbone at desk
scale: von Neumann entropy, quantum relative entropy, conditional entropy
of classical-quantum states, joint convexity of the relative entropy, and
the analytic ignorance of the beam-splitting adversary.  All logarithms
are base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AssertionFailure, DomainError, InvalidState
from .source import photon_number_pmf

_HERMITICITY_TOL = 1e-12
_TRACE_TOL = 1e-12
_EIG_CLAMP = 1e-12
INFINITE = math.inf


def serialize_matrix(matrix: np.ndarray) -> str:
    """Row-major plain-text dump; entries as "re,im" pairs."""
    rows = []
    for row in np.atleast_2d(matrix):
        # + 0.0 normalizes negative zero
        rows.append(
            " ".join(f"{z.real + 0.0:.17g},{z.imag + 0.0:.17g}" for z in row)
        )
    return "\n".join(rows)


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density operator on a finite-dimensional space."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidState(f"density matrix must be square, got {m.shape}")
        object.__setattr__(self, "entries", m)
        if np.max(np.abs(m - m.conj().T)) > _HERMITICITY_TOL:
            raise InvalidState("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > _TRACE_TOL:
            raise InvalidState(f"trace must be 1, got {tr}")
        eigs = np.linalg.eigvalsh(m)
        if eigs.min() < -_EIG_CLAMP:
            raise InvalidState(f"negative eigenvalue {eigs.min()}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues with sub-tolerance magnitudes clamped to zero."""
        eigs = np.linalg.eigvalsh(self.entries)
        eigs[np.abs(eigs) < _EIG_CLAMP] = 0.0
        return eigs


@dataclass(frozen=True)
class CqState:
    """Classical-quantum state: label probabilities and conditional states."""

    labels: tuple
    probs: tuple
    conditionals: tuple  # of DensityMatrix

    def __post_init__(self):
        if len(self.labels) != len(self.probs) or len(self.labels) != len(
            self.conditionals
        ):
            raise InvalidState("labels, probs and conditionals must align")
        if any(p < -1e-15 for p in self.probs):
            raise InvalidState("negative label probability")
        if abs(sum(self.probs) - 1.0) > _TRACE_TOL:
            raise InvalidState(f"label probabilities sum to {sum(self.probs)}")
        dims = {c.dim for c in self.conditionals}
        if len(dims) != 1:
            raise InvalidState("conditional states must share one dimension")

    def joint_matrix(self) -> np.ndarray:
        """Block-diagonal joint state, one block per label."""
        d = self.conditionals[0].dim
        n = len(self.labels)
        joint = np.zeros((n * d, n * d), dtype=complex)
        for k, (p, rho) in enumerate(zip(self.probs, self.conditionals)):
            joint[k * d : (k + 1) * d, k * d : (k + 1) * d] = p * rho.entries
        return joint

    def average_conditional(self) -> DensityMatrix:
        avg = sum(
            p * rho.entries for p, rho in zip(self.probs, self.conditionals)
        )
        return DensityMatrix(avg)


@dataclass(frozen=True)
class KrausChannel:
    """Completely positive trace-nonincreasing map given by Kraus operators."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise InvalidState("KrausChannel needs at least one operator")
        in_dim = ops[0].shape[1]
        if any(k.shape[1] != in_dim for k in ops):
            raise InvalidState("Kraus operators must share the input dimension")
        object.__setattr__(self, "operators", ops)
        total = sum(k.conj().T @ k for k in ops)
        eigs = np.linalg.eigvalsh(np.eye(in_dim) - total)
        if eigs.min() < -1e-10:
            raise InvalidState("sum K^dag K exceeds the identity")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return sum(k @ rho @ k.conj().T for k in self.operators)


def _entropy_of_eigenvalues(eigs: np.ndarray) -> float:
    eigs = eigs[eigs > 0.0]
    return float(-np.sum(eigs * np.log2(eigs)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """H(rho) = -Tr(rho log2 rho), with 0 log 0 = 0."""
    return _entropy_of_eigenvalues(rho.eigenvalues())


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """D(rho || sigma); INFINITE when rho has weight outside sigma's support."""
    if rho.dim != sigma.dim:
        raise InvalidState("relative entropy needs equal dimensions")
    sig_eigs, sig_vecs = np.linalg.eigh(sigma.entries)
    support = sig_eigs > _EIG_CLAMP
    if not support.all():
        null_vecs = sig_vecs[:, ~support]
        outside = np.trace(
            null_vecs.conj().T @ rho.entries @ null_vecs
        ).real
        if outside > _EIG_CLAMP:
            return INFINITE
    rho_eigs = rho.eigenvalues()
    tr_rho_log_rho = float(
        np.sum(rho_eigs[rho_eigs > 0] * np.log2(rho_eigs[rho_eigs > 0]))
    )
    # Tr(rho log sigma) evaluated in sigma's eigenbasis, support only.
    weights = np.einsum(
        "ij,jk,ki->i", sig_vecs.conj().T, rho.entries, sig_vecs
    ).real
    tr_rho_log_sig = float(
        np.sum(weights[support] * np.log2(sig_eigs[support]))
    )
    return tr_rho_log_rho - tr_rho_log_sig


def conditional_entropy_cq(cq: CqState) -> float:
    """H(A|E) = H(joint block-diagonal state) - H(average conditional)."""
    joint_eigs = np.linalg.eigvalsh(cq.joint_matrix())
    joint_eigs[np.abs(joint_eigs) < _EIG_CLAMP] = 0.0
    if joint_eigs.min() < 0.0:
        raise InvalidState("joint cq state has a negative eigenvalue")
    h_joint = _entropy_of_eigenvalues(joint_eigs)
    h_avg = von_neumann_entropy(cq.average_conditional())
    return h_joint - h_avg


def poisson_tail_mass(intensity: float, n_max: int) -> float:
    """Probability mass above n_max for the given mean photon number.

    Summed term by term from the tail so values far below machine
    epsilon stay accurate.
    """
    if intensity == 0.0:
        return 0.0
    j = n_max + 1
    p = photon_number_pmf(intensity, j)
    total = 0.0
    while p > 0.0 and j < n_max + 512:
        total += p
        j += 1
        p *= intensity / j
    return total


def bs_attack_cq_state(mu: float, t: float, n_max: int) -> CqState:
    """Adversary's cq state after beam splitting, truncated at n_max photons.

    Per key bit u, the adversary holds a Poisson((1-t) mu) mixture of the
    vacuum and u-polarized photon-number states.  Photon-number states of
    different bits are orthogonal, so the conditionals live on a common
    space of dimension 1 + 2 n_max: {vac, (j,u=0), (j,u=1)}.  The
    truncated distribution is renormalized; use :func:`poisson_tail_mass`
    for the discarded mass.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must be in [0,1], got {t}")
    if mu < 0:
        raise DomainError(f"mu must be >= 0, got {mu}")
    mu_e = (1.0 - t) * mu
    pmf = np.array([photon_number_pmf(mu_e, j) for j in range(n_max + 1)])
    pmf = pmf / pmf.sum()
    dim = 1 + 2 * n_max
    conditionals = []
    for u in (0, 1):
        diag = np.zeros(dim)
        diag[0] = pmf[0]
        offset = 1 + u * n_max
        diag[offset : offset + n_max] = pmf[1:]
        conditionals.append(DensityMatrix(np.diag(diag.astype(complex))))
    return CqState(labels=(0, 1), probs=(0.5, 0.5), conditionals=tuple(conditionals))


@dataclass(frozen=True)
class ConvexityReport:
    trials: int
    dim: int
    max_violation: float
    violations: int


def random_density_matrix(dim: int, rng: np.random.Generator) -> DensityMatrix:
    """Full-rank random state from a complex Ginibre matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def verify_joint_convexity(
    trials: int, dim: int, rng: np.random.Generator, slack: float = 1e-9
) -> ConvexityReport:
    """Sample random state pairs and check joint convexity of D(.||.).

    Raises :class:`AssertionFailure` with the serialized counterexample
    on any violation beyond ``slack``; otherwise reports the worst margin.
    """
    if dim > 6:
        raise DomainError(f"desk-scale check supports dim <= 6, got {dim}")
    max_violation = -math.inf
    violations = 0
    for _ in range(trials):
        rho1 = random_density_matrix(dim, rng)
        rho2 = random_density_matrix(dim, rng)
        sig1 = random_density_matrix(dim, rng)
        sig2 = random_density_matrix(dim, rng)
        p = rng.uniform(1e-6, 1.0 - 1e-6)
        mixed_rho = DensityMatrix(p * rho1.entries + (1 - p) * rho2.entries)
        mixed_sig = DensityMatrix(p * sig1.entries + (1 - p) * sig2.entries)
        lhs = relative_entropy(mixed_rho, mixed_sig)
        rhs = p * relative_entropy(rho1, sig1) + (1 - p) * relative_entropy(
            rho2, sig2
        )
        violation = lhs - rhs
        max_violation = max(max_violation, violation)
        if violation > slack:
            violations += 1
            dump = "\n--\n".join(
                serialize_matrix(m.entries)
                for m in (rho1, rho2, sig1, sig2)
            )
            raise AssertionFailure(
                f"joint convexity violated by {violation} (p={p})",
                counterexample=dump,
            )
    return ConvexityReport(
        trials=trials, dim=dim, max_violation=max_violation, violations=violations
    )


@dataclass(frozen=True)
class VacuumEntropyReport:
    value: float
    expected: float
    passed: bool


def verify_vacuum_component_entropy(
    probs: tuple = (0.5, 0.5), tol: float = 1e-12
) -> VacuumEntropyReport:
    """Vacuum conditionals carry no bit information: H(A|E) = H(probs).

    For the default uniform bit this must equal exactly 1.  Raises
    :class:`AssertionFailure` on deviation beyond ``tol``.
    """
    vac = DensityMatrix(np.diag([1.0, 0.0]).astype(complex))
    cq = CqState(labels=(0, 1), probs=tuple(probs), conditionals=(vac, vac))
    value = conditional_entropy_cq(cq)
    expected = _entropy_of_eigenvalues(np.asarray(probs, dtype=float))
    passed = abs(value - expected) <= tol
    if not passed:
        raise AssertionFailure(
            f"vacuum-component entropy {value} differs from {expected}",
            counterexample=serialize_matrix(cq.joint_matrix()),
        )
    return VacuumEntropyReport(value=value, expected=expected, passed=True)
