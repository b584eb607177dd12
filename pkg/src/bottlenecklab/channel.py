"""Kraus-represented quantum channels.

A channel is a list of Kraus operators summing to the identity under
K† K. Locality is measured per operator by splitting out each qubit and
comparing the four blocks against an identity factor. Quasi-local
channels carry a certificate table mapping a radius r to a distance
estimate f(r) together with the r-local surrogate that achieves it;
channels built as convex mixtures (1-p) local + p tail certify f(r) = 2p
without any diamond-norm computation.

Steady states come from the eigenvalue-1 space of the vectorized
superoperator, which is dense and limits that path to n <= 6; larger
channels in this package are constructed with known fixed points and
only verified against them.
"""

import ast
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DeclarationInconsistent,
    DimensionMismatch,
    EmptyInput,
    MultipleSteadyStates,
    NoPositiveFixedPoint,
    NotTracePreserving,
)
from .numerics import DEFAULT_TOL, DensityMatrix, operator_norm, trace_norm

logger = logging.getLogger(__name__)

__all__ = [
    "KrausChannel",
    "EvolutionTrace",
    "ChannelReport",
    "PartitionConditionReport",
    "validate_channel",
    "apply_channel",
    "channel_locality",
    "steady_state",
    "check_partition_condition",
    "evolve_sequence",
    "quasi_local_mixture",
    "channel_to_text",
    "channel_from_text",
]


@dataclass
class KrausChannel:
    """Trace-preserving channel given by explicit Kraus operators."""

    n: int
    kraus: list
    declared_locality: int = None
    quasi_local_certificate: dict = field(default=None, repr=False)

    def __post_init__(self):
        if not self.kraus:
            raise EmptyInput("channel needs at least one Kraus operator")
        dim = 1 << self.n
        ops = []
        for K in self.kraus:
            K = np.asarray(K, dtype=np.complex128)
            if K.shape != (dim, dim):
                raise DimensionMismatch(
                    f"Kraus shape {K.shape} does not match 2^{self.n}"
                )
            ops.append(K)
        self.kraus = ops
        total = sum(K.conj().T @ K for K in ops)
        resid = np.abs(total - np.eye(dim)).max()
        if resid > 1e-9:
            raise NotTracePreserving(
                f"sum of K†K deviates from identity by {resid:.3e}"
            )

    @property
    def dim(self):
        return 1 << self.n


@dataclass
class EvolutionTrace:
    times: list
    distances: list


@dataclass
class ChannelReport:
    residual: float
    supports: list
    passes: bool


@dataclass
class PartitionConditionReport:
    residual: float
    passes: bool
    worst_kraus: int = None


def validate_channel(C, tol=DEFAULT_TOL):
    """Trace-preservation residual plus detected per-Kraus supports."""
    dim = C.dim
    total = sum(K.conj().T @ K for K in C.kraus)
    resid = float(np.abs(total - np.eye(dim)).max())
    supports = [_kraus_support(K, C.n) for K in C.kraus]
    return ChannelReport(resid, supports, resid < tol.abs)


def apply_channel(C, rho):
    """Sum of K rho K† as a new density matrix."""
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if mat.shape != (C.dim, C.dim):
        raise DimensionMismatch(f"state shape {mat.shape} vs channel dim {C.dim}")
    out = np.zeros_like(mat, dtype=np.complex128)
    for K in C.kraus:
        out += K @ mat @ K.conj().T
    return DensityMatrix(out, C.n)


def _kraus_support(K, n):
    """Qubits on which K differs from an identity tensor factor."""
    support = []
    for q in range(n):
        left = 1 << q
        right = 1 << (n - 1 - q)
        blk = K.reshape(left, 2, right, left, 2, right)
        diag_dev = np.abs(blk[:, 0, :, :, 0, :] - blk[:, 1, :, :, 1, :]).max()
        off_dev = max(
            np.abs(blk[:, 0, :, :, 1, :]).max(), np.abs(blk[:, 1, :, :, 0, :]).max()
        )
        if max(diag_dev, off_dev) > 1e-9:
            support.append(q)
    return tuple(support)


def channel_locality(C):
    """Largest detected Kraus support size; trusts a consistent declaration."""
    detected = max(len(_kraus_support(K, C.n)) for K in C.kraus)
    if C.declared_locality is not None:
        if C.declared_locality < detected:
            raise DeclarationInconsistent(
                f"declared {C.declared_locality}-local, detected {detected}"
            )
        return C.declared_locality
    return detected


def steady_state(C, tol=DEFAULT_TOL):
    """Fixed point from the vectorized superoperator (n <= 6).

    The eigenvalue-1 eigenvector is Hermitized, small negative weight
    clipped, and the result renormalized; the fixed-point residual is
    re-verified in trace norm before returning.
    """
    dim = C.dim
    if C.n > 6:
        raise DimensionMismatch(f"superoperator path limited to n <= 6, got {C.n}")
    S = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for K in C.kraus:
        S += np.kron(K, K.conj())
    w, V = np.linalg.eig(S)
    order = np.argsort(-np.abs(w))
    close = np.flatnonzero(np.abs(w - 1.0) < 1e-9)
    if close.size != 1:
        raise MultipleSteadyStates(f"{close.size} eigenvalues within 1e-9 of 1")
    if order.size > 1:
        logger.debug("superoperator gap %.3e", 1.0 - abs(w[order[1]]))
    rho = V[:, close[0]].reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    vals, vecs = np.linalg.eigh(rho)
    if vals.min() < -1e-8 * max(1.0, vals.max()):
        raise NoPositiveFixedPoint(
            f"fixed point has eigenvalue {vals.min():.3e} after Hermitization"
        )
    vals = np.clip(vals, 0.0, None)
    rho = (vecs * vals[None, :]) @ vecs.conj().T
    rho /= np.real(np.trace(rho))
    out = DensityMatrix(rho, C.n)
    resid = trace_norm(apply_channel(C, out).mat - out.mat)
    if resid > tol.abs * 10:
        raise NoPositiveFixedPoint(f"fixed-point residual {resid:.3e}")
    return out


def check_partition_condition(C, part, tol=DEFAULT_TOL):
    """Operator-norm residual of the two forbidden Kraus blocks.

    Norms are taken on isometry-compressed blocks: ||(P_C + P_B2) K P_A||
    equals the norm of basis†_{B2,C} K basis_A, which keeps the
    computation at subspace size.
    """
    if part.A.basis.shape[0] != C.dim:
        raise DimensionMismatch("partition register differs from channel register")
    out_a = np.hstack([part.B2.basis, part.C.basis])
    out_c = np.hstack([part.A.basis, part.B1.basis])
    worst = 0.0
    worst_idx = None
    for i, K in enumerate(C.kraus):
        r1 = operator_norm(out_a.conj().T @ K @ part.A.basis) if out_a.size and part.A.dim else 0.0
        r2 = operator_norm(out_c.conj().T @ K @ part.C.basis) if out_c.size and part.C.dim else 0.0
        r = max(r1, r2)
        if r > worst:
            worst, worst_idx = r, i
    return PartitionConditionReport(worst, worst < tol.abs, worst_idx)


def evolve_sequence(channels, rho0, rho_ref, T):
    """Trace distance to a reference after each of T channel applications."""
    if not channels:
        raise DimensionMismatch("need at least one channel")
    dim = channels[0].dim
    for C in channels:
        if C.dim != dim:
            raise DimensionMismatch("channels act on different registers")
    state = rho0.mat if isinstance(rho0, DensityMatrix) else np.asarray(rho0)
    ref = rho_ref.mat if isinstance(rho_ref, DensityMatrix) else np.asarray(rho_ref)
    if state.shape != (dim, dim) or ref.shape != (dim, dim):
        raise DimensionMismatch("state dimensions do not match the channels")
    times = [0]
    distances = [trace_norm(state - ref)]
    for t in range(1, T + 1):
        C = channels[(t - 1) % len(channels)]
        nxt = np.zeros_like(state)
        for K in C.kraus:
            nxt += K @ state @ K.conj().T
        state = nxt
        times.append(t)
        distances.append(trace_norm(state - ref))
    return EvolutionTrace(times, distances)


def quasi_local_mixture(local, tail, p):
    """Convex mixture (1-p) local + p tail with its locality certificate.

    The surrogate at radius r = locality(local) is the local part itself;
    the certified distance is f(r) = 2p, from pulling the mixture apart
    term by term.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"mixture weight {p} outside [0, 1]")
    if local.n != tail.n:
        raise DimensionMismatch("mixture parts act on different registers")
    kraus = [np.sqrt(1 - p) * K for K in local.kraus]
    kraus += [np.sqrt(p) * K for K in tail.kraus]
    r = channel_locality(local)
    cert = {r: (2.0 * p, local)}
    return KrausChannel(local.n, kraus, quasi_local_certificate=cert)


def channel_to_text(C):
    """Plain-text serialization; 17 significant digits per component."""
    lines = [
        f"channel n={C.n} kraus={len(C.kraus)} locality={C.declared_locality!r}"
    ]
    for idx, K in enumerate(C.kraus):
        lines.append(f"kraus {idx}")
        for row in K:
            lines.append(
                " ".join("%.17g%+.17gj" % (z.real, z.imag) for z in row)
            )
    cert = C.quasi_local_certificate or {}
    for r in sorted(cert):
        f_r, surrogate = cert[r]
        lines.append(f"begin certificate r={r} f={f_r!r}")
        lines.append(channel_to_text(surrogate).rstrip("\n"))
        lines.append("end certificate")
    return "\n".join(lines) + "\n"


def channel_from_text(text):
    lines = text.splitlines()
    channel, _ = _parse_channel(lines, 0)
    return channel


def _parse_channel(lines, pos):
    head = lines[pos].split()
    if head[0] != "channel":
        raise DimensionMismatch(f"expected channel header, got {lines[pos]!r}")
    fields = dict(part.split("=", 1) for part in head[1:])
    n = int(fields["n"])
    m = int(fields["kraus"])
    declared = ast.literal_eval(fields["locality"])
    pos += 1
    dim = 1 << n
    kraus = []
    for _ in range(m):
        pos += 1  # "kraus <idx>" marker
        rows = [
            [complex(tok) for tok in lines[pos + r].split()] for r in range(dim)
        ]
        kraus.append(np.array(rows, dtype=np.complex128))
        pos += dim
    cert = {}
    while pos < len(lines) and lines[pos].startswith("begin certificate"):
        head = lines[pos].split()
        r = int(head[2].split("=", 1)[1])
        f_r = ast.literal_eval(head[3].split("=", 1)[1])
        surrogate, pos = _parse_channel(lines, pos + 1)
        if lines[pos] != "end certificate":
            raise DimensionMismatch("unterminated certificate block")
        pos += 1
        cert[r] = (f_r, surrogate)
    return (
        KrausChannel(n, kraus, declared, cert or None),
        pos,
    )
