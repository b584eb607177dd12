"""Classical Markov chains and the four-set classical bottleneck bound.

Matrices are column-stochastic: entry [i, j] is the probability of moving
j -> i, so the chain acts on column probability vectors as pi' = M @ pi.
Total-variation distance between probability vectors is half the L1 norm.

The structural condition mirrors the quantum one: with the state space
split into disjoint sets A, B1, B2, C, single applications of M must not
connect A with B2 or C, nor C with A or B1. Builders place structural
(exact) zeros, so the condition check demands exact zeros rather than
small entries.
"""

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadPartition,
    BoundViolated,
    ConditionViolated,
    EmptyA,
    NonUniqueStationary,
    NotConverged,
    NotStochastic,
)
from .pauli import popcount

__all__ = [
    "StochasticMatrix",
    "StatePartition",
    "ClassicalConditionReport",
    "ClassicalBottleneckReport",
    "stationary_distribution",
    "check_classical_condition",
    "classical_bottleneck_report",
    "classical_mixing_time",
    "glauber_chain",
    "hamming_state_partition",
    "tv_distance",
    "chain_to_csv",
]

_EIG_DENSE_CUTOFF = 1024
_MIXING_CAP = 10**7


@dataclass
class StochasticMatrix:
    """Column-stochastic matrix; columns sum to 1 within 1e-12."""

    mat: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.mat, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise NotStochastic(f"expected square matrix, got {M.shape}")
        if M.min() < 0:
            raise NotStochastic(f"negative entry {M.min():.3e}")
        colsums = M.sum(axis=0)
        dev = np.abs(colsums - 1.0).max()
        if dev > 1e-12:
            raise NotStochastic(f"column sums deviate from 1 by {dev:.3e}")
        self.mat = M

    @property
    def dim(self):
        return self.mat.shape[0]


@dataclass
class StatePartition:
    """Disjoint index sets A, B1, B2, C covering {0..dim-1}; A, C non-empty."""

    A: tuple
    B1: tuple
    B2: tuple
    C: tuple
    dim: int = field(default=None)

    def __post_init__(self):
        blocks = []
        for name in ("A", "B1", "B2", "C"):
            idx = tuple(sorted(int(i) for i in getattr(self, name)))
            setattr(self, name, idx)
            blocks.append(idx)
        allidx = [i for blk in blocks for i in blk]
        if len(set(allidx)) != len(allidx):
            raise BadPartition("blocks overlap")
        if self.dim is None:
            self.dim = len(allidx)
        if sorted(allidx) != list(range(self.dim)):
            raise BadPartition("blocks do not cover 0..dim-1")
        if not self.A or not self.C:
            raise BadPartition("A and C must be non-empty")

    @property
    def B(self):
        return tuple(sorted(self.B1 + self.B2))


def tv_distance(p, q):
    """Total-variation distance, half the L1 difference."""
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def stationary_distribution(M):
    """The unique probability vector with M pi = pi.

    Dense eigendecomposition up to 1024 states, ARPACK above. Uniqueness
    of the eigenvalue-1 space is checked; reducible chains raise
    NonUniqueStationary.
    """
    mat = M.mat if isinstance(M, StochasticMatrix) else StochasticMatrix(M).mat
    dim = mat.shape[0]
    if dim <= _EIG_DENSE_CUTOFF:
        w, V = np.linalg.eig(mat)
        close = np.flatnonzero(np.abs(w - 1.0) < 1e-9)
    else:
        from scipy.sparse.linalg import eigs

        k = min(6, dim - 2)
        w, V = eigs(mat, k=k, which="LM", tol=0)
        close = np.flatnonzero(np.abs(w - 1.0) < 1e-9)
    if close.size != 1:
        raise NonUniqueStationary(
            f"found {close.size} eigenvalues within 1e-9 of 1"
        )
    vec = np.real(V[:, close[0]])
    vec = np.where(np.abs(vec) < 1e-15, 0.0, vec)
    if vec.sum() < 0:
        vec = -vec
    vec = np.clip(vec, 0.0, None)
    pi = vec / vec.sum()
    resid = float(np.abs(mat @ pi - pi).sum())
    if resid > 1e-10:
        raise NonUniqueStationary(f"stationary residual {resid:.3e} exceeds 1e-10")
    return pi


@dataclass
class ClassicalConditionReport:
    max_forbidden_entry: float
    passes: bool
    offending: tuple = None


def check_classical_condition(M, part):
    """Exact-zero check of the two forbidden blocks of M."""
    mat = M.mat if isinstance(M, StochasticMatrix) else np.asarray(M)
    worst = 0.0
    offending = None
    pairs = [
        (tuple(part.B2) + tuple(part.C), part.A),  # rows, cols of P_{B2 u C} M P_A
        (tuple(part.A) + tuple(part.B1), part.C),
    ]
    for rows, cols in pairs:
        if not rows or not cols:
            continue
        block = mat[np.ix_(rows, cols)]
        j = np.unravel_index(np.argmax(np.abs(block)), block.shape)
        if abs(block[j]) > worst:
            worst = float(abs(block[j]))
            offending = (rows[j[0]], cols[j[1]])
    return ClassicalConditionReport(worst, worst == 0.0, offending)


@dataclass
class ClassicalBottleneckReport:
    lhs: float
    bound: float
    pi_A: float
    pi_B: float
    pi_C: float
    condition_max: float


def classical_bottleneck_report(M, part, pi=None):
    """Verify ||M pi_A - pi_A||_1 <= 2 pi(B)/pi(A) for a conditioned chain.

    pi may be passed when known in closed form (e.g. Gibbs for a
    detailed-balance chain); it is validated as stationary within 1e-10
    either way. The theorem inequality is asserted with slack 1e-12; a
    violation raises BoundViolated since it would falsify the
    implementation, not the theorem.
    """
    sm = M if isinstance(M, StochasticMatrix) else StochasticMatrix(M)
    cond = check_classical_condition(sm, part)
    if not cond.passes:
        raise ConditionViolated(
            f"forbidden entry {cond.max_forbidden_entry:.3e} at {cond.offending}"
        )
    if pi is None:
        pi = stationary_distribution(sm)
    else:
        pi = np.asarray(pi, dtype=np.float64)
        resid = float(np.abs(sm.mat @ pi - pi).sum())
        if resid > 1e-10:
            raise NonUniqueStationary(
                f"supplied pi is not stationary (residual {resid:.3e})"
            )
    pA = float(pi[list(part.A)].sum())
    pB = float(pi[list(part.B)].sum()) if part.B else 0.0
    pC = float(pi[list(part.C)].sum())
    if pA < 1e-14:
        raise EmptyA(f"pi(A) = {pA:.3e}")
    piA = np.zeros_like(pi)
    piA[list(part.A)] = pi[list(part.A)] / pA
    lhs = float(np.abs(sm.mat @ piA - piA).sum())
    bound = 2.0 * pB / pA
    if lhs > bound + 1e-12:
        raise BoundViolated(
            f"classical bottleneck bound violated: {lhs!r} > {bound!r}",
            lhs=lhs,
            bound=bound,
        )
    return ClassicalBottleneckReport(lhs, bound, pA, pB, pC, cond.max_forbidden_entry)


def classical_mixing_time(M, eps, cap=_MIXING_CAP):
    """Smallest t with max_j TV(M^t delta_j, pi) <= eps.

    Exact for finite chains because the extreme points of the simplex are
    the delta distributions. Detects a stalled or period-2 iteration
    (M^t repeating while still above eps) and raises NotConverged rather
    than looping all the way to the cap.
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps {eps} outside (0, 1)")
    sm = M if isinstance(M, StochasticMatrix) else StochasticMatrix(M)
    pi = stationary_distribution(sm)
    D_prev = None
    D = np.eye(sm.dim)
    worst = 0.5 * np.abs(D - pi[:, None]).sum(axis=0).max()
    if worst <= eps:
        return 0
    for t in range(1, cap + 1):
        D_next = sm.mat @ D
        worst = 0.5 * np.abs(D_next - pi[:, None]).sum(axis=0).max()
        if worst <= eps:
            return t
        if np.array_equal(D_next, D) or (
            D_prev is not None and np.array_equal(D_next, D_prev)
        ):
            raise NotConverged(f"iteration repeats at TV {worst:.3e} > {eps}")
        D_prev, D = D, D_next
    raise NotConverged(f"no convergence within {cap} steps (TV {worst:.3e})")


def glauber_chain(energies, beta, laziness=0.0):
    """Single-bit-flip Metropolis chain over bitstring states.

    Proposals pick one of the m bits uniformly (scaled by 1-laziness) and
    accept with min(1, e^{-beta dE}). Detailed balance with respect to
    pi ~ e^{-beta E} holds exactly by construction.
    """
    E = np.asarray(energies, dtype=np.float64)
    dim = E.shape[0]
    m = int(dim).bit_length() - 1
    if 2**m != dim or m > 12:
        raise BadPartition(f"need 2^m energies with m <= 12, got {dim}")
    if not 0 <= laziness < 1:
        raise ValueError(f"laziness {laziness} outside [0, 1)")
    M = np.zeros((dim, dim))
    idx = np.arange(dim)
    for b in range(m):
        flip = idx ^ (1 << b)
        accept = np.minimum(1.0, np.exp(-beta * (E[flip] - E)))
        M[flip, idx] += (1.0 - laziness) / m * accept
    np.fill_diagonal(M, 0.0)
    M[idx, idx] = 1.0 - M.sum(axis=0)
    return StochasticMatrix(M)


def hamming_state_partition(m, center, inner, width):
    """Shells by Hamming distance from a center bitstring.

    A is the ball of radius inner, B1/B2 the next two shells of the given
    width, C everything beyond. Suits chains whose single update moves at
    most `width` bits.
    """
    dim = 1 << m
    d = popcount(np.arange(dim, dtype=np.uint64) ^ np.uint64(int(center)))
    A = np.flatnonzero(d <= inner)
    B1 = np.flatnonzero((d > inner) & (d <= inner + width))
    B2 = np.flatnonzero((d > inner + width) & (d <= inner + 2 * width))
    C = np.flatnonzero(d > inner + 2 * width)
    return StatePartition(tuple(A), tuple(B1), tuple(B2), tuple(C), dim)


def chain_to_csv(M, fileobj=None):
    """Dense CSV with a one-line convention header."""
    sm = M if isinstance(M, StochasticMatrix) else StochasticMatrix(M)
    out = fileobj or io.StringIO()
    out.write("# column-stochastic: entry [i,j] = P(j -> i)\n")
    for row in sm.mat:
        out.write(",".join(repr(float(x)) for x in row) + "\n")
    return out.getvalue() if fileobj is None else None
