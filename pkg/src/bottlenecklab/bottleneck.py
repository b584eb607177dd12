"""Bottleneck ratios and the slow-mixing bounds built on them.

The central quantity is Delta = ||P_B rho||_1 / tr(P_A rho) for a fixed
point rho of a channel and a four-way split A, B1, B2, C of the register.
When no Kraus operator connects A with B2 u C nor C with A u B1, the
conditioned state rho_A moves by at most 10 Delta in trace norm per
application. Local channels get their split for free from Pauli
neighborhoods: A = V, B1 and B2 the first and second r-shells, C the
rest; the Kraus condition is still re-verified numerically rather than
trusted.

Everything here asserts the inequalities it reports. A violation raises
BoundViolated carrying the numbers, since it would mean a broken
construction rather than an unlucky instance.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .channel import apply_channel, channel_locality, check_partition_condition
from .errors import (
    BetaNegative,
    BoundViolated,
    ConditionViolated,
    EmptyA,
    EmptyBoundary,
    LocalityInsufficient,
    NotFixedPoint,
    ZeroDelta,
)
from .model import gibbs_state, subspace_min_energy
from .numerics import DensityMatrix, hermitian_eigensystem, operator_norm, trace_norm
from .subspace import HilbertPartition, Subspace, boundary, partition_from_radius

__all__ = [
    "BottleneckReport",
    "FreeEnergyReport",
    "QuasiLocalReport",
    "bottleneck_ratio",
    "verify_bottleneck_theorem",
    "diagonal_bound",
    "mixing_time_lower_bound",
    "product_drift",
    "free_energy_report",
    "quasi_local_bound",
    "REPORT_COLUMNS",
    "report_csv_row",
    "report_json",
]

THEOREM_SLACK = 1e-8
DEFAULT_MIX_EPS = 0.25


@dataclass
class BottleneckReport:
    delta: float
    numerator: float
    denominator: float
    lhs: float
    bound: float
    condition_residual: float
    tmix_lower: float
    mode: str
    prob_B: float = 0.0
    prob_C: float = 0.0
    steps: int = 1


@dataclass
class FreeEnergyReport:
    F_total: float
    F_V: float
    F_boundary: float
    E_min_V: float
    bounds_a: float
    bounds_b: float
    bounds_c: float
    a_applicable: bool
    b_applicable: bool


@dataclass
class QuasiLocalReport:
    lhs: float
    combined_bound: float
    best_radius: int
    terms: dict


def _projector_of(P):
    if isinstance(P, Subspace):
        return P.projector()
    return np.asarray(P, dtype=np.complex128)


def bottleneck_ratio(rho, P_A, P_B):
    """Delta = ||P_B rho||_1 / tr(P_A rho), with its two pieces."""
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
    pa = _projector_of(P_A)
    pb = _projector_of(P_B)
    denominator = float(np.real(np.trace(pa @ mat)))
    if denominator <= 1e-12:
        raise EmptyA(f"tr(P_A rho) = {denominator:.3e}")
    numerator = trace_norm(pb @ mat)
    return numerator / denominator, numerator, denominator


def _conditioned(rho, basis):
    """rho restricted to a subspace and renormalized, as a full-space state."""
    block = basis.conj().T @ rho @ basis
    block /= np.real(np.trace(block))
    return basis @ block @ basis.conj().T


def verify_bottleneck_theorem(C, rho, spec, mix_eps=DEFAULT_MIX_EPS):
    """Check hypotheses, measure the drift of rho_A, assert lhs <= 10 Delta.

    spec is either an explicit HilbertPartition (general mode) or a pair
    (V, r) for the local construction A=V, B1/B2 = first/second r-shells.
    A schedule (list of channels) is composed for the drift; each entry
    must fix rho on its own and the bound scales with the step count.
    """
    channels = list(C) if isinstance(C, (list, tuple)) else [C]
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
    state = DensityMatrix(mat, channels[0].n)
    for chan in channels:
        resid = trace_norm(apply_channel(chan, state).mat - state.mat)
        if resid > 1e-9:
            raise NotFixedPoint(f"steady-state residual {resid:.3e}")
    if isinstance(spec, HilbertPartition):
        part = spec
        mode = "general"
    else:
        V, r = spec
        for chan in channels:
            loc = channel_locality(chan)
            if r < loc:
                raise LocalityInsufficient(
                    f"partition radius {r} below channel locality {loc}"
                )
        part = partition_from_radius(V, r)
        mode = f"local(r={r})"
    worst = 0.0
    for chan in channels:
        rep = check_partition_condition(chan, part)
        worst = max(worst, rep.residual)
    if worst >= 1e-9:
        raise ConditionViolated(f"Kraus condition residual {worst:.3e}")
    delta, numerator, denominator = bottleneck_ratio(
        state, part.A.projector(), part.b_projector()
    )
    rho_A = _conditioned(mat, part.A.basis)
    evolved = rho_A
    for chan in channels:
        evolved = apply_channel(chan, DensityMatrix(evolved, chan.n)).mat
    lhs = trace_norm(evolved - rho_A)
    bound = 10.0 * delta * len(channels)
    if lhs > bound + THEOREM_SLACK:
        raise BoundViolated(
            f"drift {lhs!r} exceeds 10*Delta bound {bound!r}",
            lhs=lhs,
            bound=bound,
            delta=delta,
        )
    prob_C = float(np.real(np.trace(part.C.projector() @ mat)))
    prob_B = float(np.real(np.trace(part.b_projector() @ mat)))
    if delta > 0:
        tmix = (1.0 - denominator) / (5.0 * delta) - mix_eps
    else:
        tmix = math.inf
    return BottleneckReport(
        delta=delta,
        numerator=numerator,
        denominator=denominator,
        lhs=lhs,
        bound=bound,
        condition_residual=worst,
        tmix_lower=tmix,
        mode=mode,
        prob_B=prob_B,
        prob_C=prob_C,
        steps=len(channels),
    )


def diagonal_bound(rho, P):
    """||rho P||_1 against sqrt(tr(rho P)); the inequality is asserted."""
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
    proj = _projector_of(P)
    lhs = trace_norm(mat @ proj)
    rhs = math.sqrt(max(0.0, float(np.real(np.trace(mat @ proj)))))
    if lhs > rhs + 1e-10:
        raise BoundViolated(
            f"||rho P||_1 = {lhs!r} exceeds sqrt(tr) = {rhs!r}", lhs=lhs, rhs=rhs
        )
    return lhs, rhs


def mixing_time_lower_bound(report, rho, P_A, eps):
    """Steps needed before the conditioned state can be eps-mixed.

    Returns (bound, weaker): the main form (1 - tr(P_A rho))/(5 Delta) - eps
    and the probability-only variant tr(P_A rho) tr(P_C rho)/(5 ||P_B rho||_1)
    - eps. Zero Delta means the state never leaves: both are +inf.
    """
    if report.delta < 0:
        raise ZeroDelta(f"negative delta {report.delta!r}")
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
    prob_A = float(np.real(np.trace(_projector_of(P_A) @ mat)))
    if report.delta == 0.0 or report.numerator == 0.0:
        return math.inf, math.inf
    strong = (1.0 - prob_A) / (5.0 * report.delta) - eps
    weak = prob_A * report.prob_C / (5.0 * report.numerator) - eps
    return strong, weak


def product_drift(channels, sigma):
    """Drift of sigma under a composed schedule, telescoped step by step.

    Peeling one channel at a time and using that channels contract the
    trace norm, the composed drift is at most the sum of the single-step
    drifts measured on sigma itself. For a schedule repeating one channel
    that sum is t times the single drift; once the steps differ, the
    smallest step drift does not bound the composition (one step can
    barely move sigma while the rest transport it far), so the sum is
    what gets asserted.
    """
    channels = list(channels)
    if not channels:
        raise EmptyA("empty channel list")
    mat = sigma.mat if isinstance(sigma, DensityMatrix) else np.asarray(sigma)
    n = channels[0].n
    single = [
        trace_norm(apply_channel(chan, DensityMatrix(mat, n)).mat - mat)
        for chan in channels
    ]
    state = mat
    for chan in channels:
        state = apply_channel(chan, DensityMatrix(state, n)).mat
    delta_t = trace_norm(state - mat)
    step_sum = float(sum(single))
    if delta_t > step_sum + 1e-9:
        raise BoundViolated(
            f"composed drift {delta_t!r} exceeds summed step drifts {step_sum!r}",
            delta_t=delta_t,
            step_sum=step_sum,
        )
    return delta_t, step_sum


def _log_projected_weight(w, U, basis):
    """log tr(P e^{-beta H}) pieces: eigenweights of the projector."""
    if U is None:
        q = (np.abs(basis) ** 2).sum(axis=1)
    else:
        G = U.conj().T @ basis
        q = (np.abs(G) ** 2).sum(axis=1)
    return np.clip(q, 0.0, None)


def free_energy_report(H, beta, V, r, rho_G=None, delta_measured=0.0):
    """Free energies of V, its 2r-collar, and the whole space, with the
    three Delta upper bounds they imply.

    (a) exp(-beta F(dV)/2) / tr(P_V rho_G), valid once log Z >= 0;
    (b) exp(-beta (F(dV) - F(V))), valid when rho_G commutes with the
        collar projector;
    (c) the split form with E_min(V), valid unconditionally.
    Each applicable bound is asserted against the measured Delta.
    """
    if beta <= 0:
        raise BetaNegative(f"free energies need beta > 0, got {beta}")
    mat = H.mat
    shell = boundary(V, 2 * r)
    if shell.dim == 0:
        raise EmptyBoundary("2r-collar of V is empty")
    offdiag = np.abs(mat - np.diag(np.diag(mat))).max()
    if offdiag < 1e-12:
        w = np.real(np.diag(mat)).astype(np.float64)
        U = None
    else:
        w, U = hermitian_eigensystem(mat)
    logZ = float(logsumexp(-beta * w))
    q_V = _log_projected_weight(w, U, V.basis)
    q_B = _log_projected_weight(w, U, shell.basis)
    log_trV = float(logsumexp(-beta * w, b=q_V))
    log_trB = float(logsumexp(-beta * w, b=q_B))
    F_total = -logZ / beta
    F_V = -log_trV / beta
    F_boundary = -log_trB / beta
    E_min_V = subspace_min_energy(V, H)
    if rho_G is None:
        rho_G, _, _ = gibbs_state(H, beta)
    prob_V = float(np.real(np.trace(V.projector() @ rho_G.mat)))
    P_shell = shell.projector()
    comm = operator_norm(rho_G.mat @ P_shell - P_shell @ rho_G.mat)
    b_applicable = comm < 1e-9
    a_applicable = logZ >= -1e-12 and prob_V > 1e-12
    bounds_a = math.exp(0.5 * log_trB) / prob_V if prob_V > 1e-12 else math.inf
    bounds_b = math.exp(log_trB - log_trV)
    bounds_c = math.exp(
        0.5 * (log_trB - log_trV) + 0.5 * (logZ + beta * E_min_V)
    )
    checks = [("c", bounds_c, True), ("b", bounds_b, b_applicable), ("a", bounds_a, a_applicable)]
    for name, value, applicable in checks:
        if applicable and value < delta_measured - THEOREM_SLACK:
            raise BoundViolated(
                f"free-energy bound ({name}) = {value!r} below measured "
                f"Delta = {delta_measured!r}",
                which=name,
                bound=value,
                delta=delta_measured,
            )
    return FreeEnergyReport(
        F_total=F_total,
        F_V=F_V,
        F_boundary=F_boundary,
        E_min_V=E_min_V,
        bounds_a=bounds_a,
        bounds_b=bounds_b,
        bounds_c=bounds_c,
        a_applicable=a_applicable,
        b_applicable=b_applicable,
    )


def quasi_local_bound(C, rho, V, mix_eps=DEFAULT_MIX_EPS):
    """Combined drift bound min over certified radii of 10 Delta(s) + f(s).

    The full channel need not be local; each certificate entry supplies an
    s-local surrogate within f(s), and the local theorem runs against the
    surrogate's partition while the tail contributes f(s) additively.
    """
    if not C.quasi_local_certificate:
        raise LocalityInsufficient("channel carries no quasi-local certificate")
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
    state = DensityMatrix(mat, C.n)
    resid = trace_norm(apply_channel(C, state).mat - state.mat)
    if resid > 1e-9:
        raise NotFixedPoint(f"steady-state residual {resid:.3e}")
    rho_A = None
    terms = {}
    best = (math.inf, None)
    for s in sorted(C.quasi_local_certificate):
        f_s, surrogate = C.quasi_local_certificate[s]
        loc = channel_locality(surrogate)
        if loc > s:
            raise LocalityInsufficient(
                f"surrogate for radius {s} detected as {loc}-local"
            )
        part = partition_from_radius(V, s)
        rep = check_partition_condition(surrogate, part)
        if rep.residual >= 1e-9:
            raise ConditionViolated(
                f"surrogate Kraus condition residual {rep.residual:.3e}"
            )
        delta, _, _ = bottleneck_ratio(
            state, part.A.projector(), part.b_projector()
        )
        if rho_A is None:
            rho_A = _conditioned(mat, V.basis)
        total = 10.0 * delta + f_s
        terms[s] = (delta, f_s, total)
        if total < best[0]:
            best = (total, s)
    evolved = apply_channel(C, DensityMatrix(rho_A, C.n)).mat
    lhs = trace_norm(evolved - rho_A)
    combined, best_s = best
    if lhs > combined + THEOREM_SLACK:
        raise BoundViolated(
            f"drift {lhs!r} exceeds quasi-local bound {combined!r}",
            lhs=lhs,
            bound=combined,
        )
    return QuasiLocalReport(
        lhs=lhs, combined_bound=combined, best_radius=best_s, terms=terms
    )


REPORT_COLUMNS = [
    "delta",
    "numerator",
    "denominator",
    "lhs",
    "bound",
    "cond_residual",
    "tmix_lower",
    "beta",
    "g",
    "n",
    "model",
    "mode",
    "r",
]


def report_csv_row(report, beta="", g="", n="", model="", r=""):
    """One flat CSV row per instance, floats in repr form."""
    vals = [
        report.delta,
        report.numerator,
        report.denominator,
        report.lhs,
        report.bound,
        report.condition_residual,
        report.tmix_lower,
        beta,
        g,
        n,
        model,
        report.mode,
        r,
    ]
    return ",".join(repr(v) if isinstance(v, float) else str(v) for v in vals)


def report_json(report, **meta):
    out = {
        "delta": report.delta,
        "numerator": report.numerator,
        "denominator": report.denominator,
        "lhs": report.lhs,
        "bound": report.bound,
        "cond_residual": report.condition_residual,
        "tmix_lower": report.tmix_lower,
        "mode": report.mode,
    }
    out.update(meta)
    return out
