"""Perturbative stability: energy shells, tail bounds, and decay sweeps.

The machinery follows one storyline. Split the spectrum of the
unperturbed Hamiltonian into a low part, a ladder of width-delta_E
shells, and a high part. A perturbation whose terms touch few checks is
block-tridiagonal in that ladder, so the amplitude of a low-energy
eigenstate on the high part decays geometrically shell by shell. The
sweep turns the resulting exponential estimates into measured bottleneck
ratios on perturbed Gibbs states across a (beta, g, n, seed) grid.

Shell width bookkeeping: w0 is the maximum number of checks any qubit
touches and w1 the largest perturbation-term support, so one term can
move the unperturbed energy by at most w0*w1. Hamiltonians built
straight from checks carry w1 = 0; the window tests here treat them as
targets of at-least-single-site perturbations (w1 = 1).
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bottleneck import bottleneck_ratio
from .errors import (
    BoundViolated,
    ModelNotFound,
    ParametersInadmissible,
    PerturbationTooLarge,
)
from .model import (
    REGISTRY,
    barrier_subspace,
    build_hamiltonian,
    gibbs_state,
    perturb,
    random_local_perturbation,
    subspace_min_energy,
)
from .numerics import hermitian_eigensystem, operator_norm

__all__ = [
    "ShellDecomposition",
    "TailRecord",
    "BlockTridiagonalReport",
    "SweepRow",
    "SweepResult",
    "shell_decomposition",
    "plan_shell_width",
    "verify_block_tridiagonal",
    "tail_amplitudes",
    "coefficient_cascade",
    "stability_sweep",
    "sweep_to_csv",
    "fits_to_json",
    "SWEEP_CSV_HEADER",
]


@dataclass
class ShellDecomposition:
    """Projectors [Q_<, Q_1..Q_{q*}, Q_>] onto exact eigenspace windows."""

    projectors: tuple
    E_boundaries: tuple
    delta_E: float
    eps1: float
    eps2: float
    n: int
    g: float
    q_star: int

    def __post_init__(self):
        dim = self.projectors[0].shape[0]
        total = sum(self.projectors)
        if np.abs(total - np.eye(dim)).max() > 1e-9:
            raise ParametersInadmissible("shell projectors do not resolve identity")
        for i, Qi in enumerate(self.projectors):
            for Qj in self.projectors[i + 1 :]:
                if np.abs(Qi @ Qj).max() > 1e-9:
                    raise ParametersInadmissible("shell projectors overlap")


@dataclass
class TailRecord:
    eigen_index: int
    energy: float
    amplitude: float
    lemma_bound: float
    lambda_: float

    def __post_init__(self):
        if not -1e-12 <= self.amplitude <= 1 + 1e-12:
            raise BoundViolated(
                f"amplitude {self.amplitude!r} outside [0, 1]",
                amplitude=self.amplitude,
            )


@dataclass
class BlockTridiagonalReport:
    residual: float
    passes: bool
    worst_pair: tuple


def _assumed_w0w1(H0):
    return H0.w0 * max(H0.w1, 1)


def _window_checks(H0, eps1, eps2, g, delta_E):
    if eps2 <= eps1 + 4 * g:
        raise ParametersInadmissible(
            f"need eps2 > eps1 + 4g, got eps2-eps1 = {eps2 - eps1!r} with g = {g!r}"
        )
    w0w1 = _assumed_w0w1(H0)
    if delta_E <= w0w1:
        raise ParametersInadmissible(
            f"shell width {delta_E!r} must exceed w0*w1 = {w0w1!r}"
        )
    top = w0w1 * (eps2 - eps1) / (eps2 - eps1 - 4 * g)
    if delta_E > top + 1e-12:
        raise ParametersInadmissible(
            f"shell width {delta_E!r} above admissible maximum {top!r}"
        )
    q_exact = ((eps2 - eps1) / 2 - 2 * g) * H0.n / delta_E
    q_star = round(q_exact)
    if q_star < 1 or abs(q_exact - q_star) > 1e-9 * max(1.0, abs(q_exact)):
        raise ParametersInadmissible(
            f"shell count {q_exact!r} is not a positive integer; "
            "pick delta_E so the barrier window tiles exactly"
        )
    return q_star


def plan_shell_width(H0, eps1, eps2, g):
    """Smallest admissible delta_E whose shell count is an integer.

    Smaller shells mean more of them and a faster tail decay rate, so the
    planner maximizes the shell count within the admissible window.
    """
    if eps2 <= eps1 + 4 * g:
        raise ParametersInadmissible(
            f"need eps2 > eps1 + 4g, got eps2-eps1 = {eps2 - eps1!r} with g = {g!r}"
        )
    w0w1 = _assumed_w0w1(H0)
    span = ((eps2 - eps1) / 2 - 2 * g) * H0.n
    q_star = math.ceil(span / w0w1 - 1e-12) - 1
    if q_star < 1:
        raise ParametersInadmissible(
            f"window {span!r} too narrow for even one shell wider than {w0w1!r}"
        )
    delta_E = span / q_star
    top = w0w1 * (eps2 - eps1) / (eps2 - eps1 - 4 * g)
    if delta_E > top + 1e-12:
        raise ParametersInadmissible(
            f"no integer shell count fits: delta_E = {delta_E!r} exceeds {top!r}"
        )
    return delta_E


def shell_decomposition(H0, eps1, eps2, g, delta_E):
    """Split the spectrum of H0 into [Q_<, Q_1..Q_{q*}, Q_>].

    The ladder starts at (eps2+eps1)n/2 + 2gn and ends at eps2*n, in q*
    windows of width delta_E built from exact eigenspaces of H0.
    """
    q_star = _window_checks(H0, eps1, eps2, g, delta_E)
    n = H0.n
    E1 = (eps2 + eps1) * n / 2 + 2 * g * n
    boundaries = tuple(E1 + q * delta_E for q in range(q_star + 1))
    mat = H0.mat
    offdiag = np.abs(mat - np.diag(np.diag(mat))).max()
    if offdiag < 1e-12:
        w = np.real(np.diag(mat)).astype(np.float64)
        U = None
    else:
        w, U = hermitian_eigensystem(mat)
    dim = mat.shape[0]
    bins = np.empty(w.size, dtype=np.int64)
    for i, E in enumerate(w):
        if E < boundaries[0]:
            bins[i] = 0
        elif E >= boundaries[-1]:
            bins[i] = q_star + 1
        else:
            bins[i] = 1 + int((E - boundaries[0]) / delta_E + 1e-12)
    projectors = []
    for b in range(q_star + 2):
        sel = np.flatnonzero(bins == b)
        if U is None:
            Q = np.zeros((dim, dim), dtype=np.complex128)
            Q[sel, sel] = 1.0
        else:
            cols = U[:, sel]
            Q = cols @ cols.conj().T
        projectors.append(Q)
    return ShellDecomposition(
        projectors=tuple(projectors),
        E_boundaries=boundaries,
        delta_E=delta_E,
        eps1=eps1,
        eps2=eps2,
        n=n,
        g=g,
        q_star=q_star,
    )


def verify_block_tridiagonal(Vpert, shells):
    """Largest coupling Q_i V Q_j between non-adjacent shells."""
    V = Vpert.mat
    worst = 0.0
    worst_pair = (0, 0)
    m = len(shells.projectors)
    for i in range(m):
        for j in range(i + 2, m):
            r = operator_norm(shells.projectors[i] @ V @ shells.projectors[j])
            if r > worst:
                worst = r
                worst_pair = (i, j)
    return BlockTridiagonalReport(residual=worst, passes=worst < 1e-9, worst_pair=worst_pair)


def _decay_rate(eps1, eps2, g, delta_E):
    if g <= 0:
        return math.inf
    return (eps2 - eps1 - 4 * g) / (2 * delta_E) * math.log((eps2 - eps1) / (2 * g))


def _check_perturbation(H, H0, g):
    dev = operator_norm(H.mat - H0.mat)
    if dev > g * H0.n + 1e-9:
        raise PerturbationTooLarge(
            f"||H - H0|| = {dev!r} exceeds g*n = {g * H0.n!r}"
        )


def tail_amplitudes(H, H0, eps1, eps2, g, delta_E):
    """Weight of every low-energy eigenstate of H on the high shell of H0.

    Each eigenstate with energy below eps1*n gets its measured ||Q_> psi||
    together with the geometric-decay bound e^{-lambda(g) n}; the bound is
    asserted, not just reported.
    """
    _check_perturbation(H, H0, g)
    shells = shell_decomposition(H0, eps1, eps2, g, delta_E)
    w, U = hermitian_eigensystem(H.mat)
    lam = _decay_rate(eps1, eps2, g, delta_E)
    bound = math.exp(-lam * H0.n) if lam < math.inf else 0.0
    Q_top = shells.projectors[-1]
    records = []
    for i in np.flatnonzero(w < eps1 * H0.n):
        amp = float(np.linalg.norm(Q_top @ U[:, i]))
        if amp > bound + 1e-9:
            raise BoundViolated(
                f"tail amplitude {amp!r} above e^(-lambda n) = {bound!r} "
                f"for eigenstate {int(i)}",
                amplitude=amp,
                bound=bound,
            )
        records.append(
            TailRecord(
                eigen_index=int(i),
                energy=float(w[i]),
                amplitude=amp,
                lemma_bound=bound,
                lambda_=lam,
            )
        )
    return records


def coefficient_cascade(H, H0, eigenstate, shells):
    """Shell weights of one eigenstate against the recursion envelope.

    Returns (amplitudes, bounds), both ordered like shells.projectors.
    The bound for shell q is the product of the per-step factors
    g*n / (E(q) - 2gn - E); the top entry reuses the full product, which
    is the quantity the decay rate exponentiates.
    """
    _check_perturbation(H, H0, shells.g)
    w, U = hermitian_eigensystem(H.mat)
    psi = U[:, eigenstate]
    E = float(w[eigenstate])
    amplitudes = [float(np.linalg.norm(Q @ psi)) for Q in shells.projectors]
    gn = shells.g * shells.n
    bounds = [1.0]
    running = 1.0
    for q in range(1, shells.q_star + 1):
        denom = shells.E_boundaries[q - 1] - 2 * gn - E
        factor = math.inf if denom <= 0 else gn / denom
        running = running * factor
        bounds.append(running)
    bounds.append(running)
    if amplitudes[-1] > bounds[-1] + 1e-9:
        raise BoundViolated(
            f"top-shell weight {amplitudes[-1]!r} above recursion product "
            f"{bounds[-1]!r}",
            amplitude=amplitudes[-1],
            bound=bounds[-1],
        )
    return amplitudes, bounds


# ---------------------------------------------------------------------------
# Decay sweep


@dataclass
class SweepRow:
    model: str
    n: int
    beta: float
    g: float
    seed: int
    kappa: float
    eps: float
    delta: float
    bound_chain: float
    admissible: bool
    lambda_kappa: float


@dataclass
class SweepResult:
    rows: list
    fits: dict = field(default_factory=dict)


SWEEP_CSV_HEADER = "model,n,beta,g,seed,kappa,eps,delta,bound_chain,admissible,lambda"

_LN2 = math.log(2.0)


def _lambda_kappa(kappa, g, w0w1):
    if kappa <= 0:
        return 0.0
    if g <= 0:
        return math.inf
    return kappa / (4 * w0w1) * math.log(kappa / (4 * g))


def _chain_log_sq(n, beta, g, eps, kappa, lam_k):
    t1 = n * math.log(8.0) - lam_k * n
    t2 = n * math.log(4.0) - beta * (eps + kappa / 2) * n
    return float(np.logaddexp(t1, t2)) + 2 * beta * (eps + g) * n


def _grid_point(model, n, beta, g, seed, H0, cert, P_V, P_B):
    V = random_local_perturbation(n, tuple((i,) for i in range(n)), g, seed)
    H = perturb(H0, V)
    if g > 0:
        floor_E = cert.E_min_boundary - g * n - 1e-9
        shifted = subspace_min_energy(cert.boundary, H)
        if shifted < floor_E:
            raise BoundViolated(
                f"boundary floor {shifted!r} dropped below {floor_E!r}",
                shifted=shifted,
                floor=floor_E,
            )
    rho, _, _ = gibbs_state(H, beta)
    delta, _, _ = bottleneck_ratio(rho, P_V, P_B)
    w0w1 = H0.w0 * max(V.w1, 1)
    lam_k = _lambda_kappa(cert.kappa, g, w0w1)
    eps = cert.E_min_V / n
    cond1 = beta * (cert.kappa / 2 - eps - 2 * g) > 2 * _LN2
    cond2 = lam_k - 2 * beta * (eps + g) > 3 * _LN2
    admissible = bool(cond1 and cond2)
    log_sq = _chain_log_sq(n, beta, g, eps, cert.kappa, lam_k)
    if admissible and delta**2 > math.exp(min(log_sq, 1400.0)) + 1e-8:
        raise BoundViolated(
            f"delta^2 = {delta**2!r} above the proof chain e^{log_sq!r}",
            delta=delta,
            log_chain=log_sq,
        )
    bound_chain = math.exp(0.5 * log_sq) if log_sq < 1400.0 else math.inf
    return SweepRow(
        model=model,
        n=n,
        beta=beta,
        g=g,
        seed=seed,
        kappa=cert.kappa,
        eps=eps,
        delta=delta,
        bound_chain=bound_chain,
        admissible=admissible,
        lambda_kappa=lam_k,
    )


def stability_sweep(model, barrier, betas, gs, ns, seeds, jobs=1):
    """Measure the bottleneck ratio across a (beta, g, n, seed) grid.

    barrier is (center, inner_radius, boundary_radius) handed to the
    barrier construction per system size. Every row carries the measured
    delta, the proof-chain value on the delta scale, the admissibility
    tag from the two explicit (beta, g) conditions, and the decay rate.
    Fits of log(delta) = a - b*n are computed per (beta, g) over all
    rows; the slope assertion b > 0 fires only when at least three
    distinct n values are admissible, otherwise the fit entry carries a
    no-admissible-points diagnosis instead.
    """
    if model not in REGISTRY:
        raise ModelNotFound(f"unknown model {model!r}")
    center, inner_radius, boundary_radius = barrier
    per_n = {}
    for n in ns:
        checks = REGISTRY[model](n)
        H0 = build_hamiltonian(checks)
        cert = barrier_subspace(checks, center, inner_radius, boundary_radius, H0)
        per_n[n] = (H0, cert, cert.V.projector(), cert.boundary.projector())
    tasks = [
        (model, n, beta, g, seed, *per_n[n])
        for n in ns
        for beta in betas
        for g in gs
        for seed in seeds
    ]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda t: _grid_point(*t), tasks))
    else:
        rows = [_grid_point(*t) for t in tasks]
    rows.sort(key=lambda r: (r.model, r.n, r.beta, r.g, r.seed))
    fits = {}
    for beta in betas:
        for g in gs:
            group = [r for r in rows if r.beta == beta and r.g == g]
            pts = [(r.n, math.log(r.delta)) for r in group if r.delta > 0]
            entry = {"points": len(pts)}
            if len(set(x for x, _ in pts)) >= 2:
                xs = np.array([x for x, _ in pts], dtype=float)
                ys = np.array([y for _, y in pts], dtype=float)
                slope, intercept = np.polyfit(xs, ys, 1)
                resid = ys - (slope * xs + intercept)
                ss_tot = float(((ys - ys.mean()) ** 2).sum())
                r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 1e-30 else 1.0
                entry.update(a=float(intercept), b=float(-slope), r2=r2)
            admissible_ns = sorted({r.n for r in group if r.admissible})
            entry["admissible_ns"] = admissible_ns
            if len(admissible_ns) >= 3:
                entry["status"] = "ok"
                if entry.get("b", 0.0) <= 0:
                    raise BoundViolated(
                        f"decay slope {entry['b']!r} not positive over admissible "
                        f"sizes {admissible_ns}",
                        slope=entry["b"],
                    )
            else:
                entry["status"] = "no-admissible-points"
            fits[(beta, g)] = entry
    return SweepResult(rows=rows, fits=fits)


def sweep_to_csv(result):
    lines = [SWEEP_CSV_HEADER]
    for r in result.rows:
        lines.append(
            ",".join(
                [
                    r.model,
                    str(r.n),
                    repr(float(r.beta)),
                    repr(float(r.g)),
                    str(r.seed),
                    repr(r.kappa),
                    repr(r.eps),
                    repr(r.delta),
                    repr(r.bound_chain),
                    "true" if r.admissible else "false",
                    repr(r.lambda_kappa),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def fits_to_json(result):
    payload = {
        f"beta={beta!r},g={g!r}": fit for (beta, g), fit in result.fits.items()
    }
    return json.dumps(payload, sort_keys=True, indent=2)
