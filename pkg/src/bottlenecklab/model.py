"""Commuting-projector Hamiltonians built from parity checks.

A model is a family of Z-type and X-type checks. Each check contributes a
projector term (1 - C)/2 resp. (1 - A)/2, so the energy of a state counts
the checks it violates and code states sit at energy zero. Classical
models have no X checks and are diagonal in the computational basis; CSS
models carry both kinds, with every Z/X support pair overlapping on an
even number of qubits.

Eigenstates of a CSS model are labeled |x, z> = X(x) Z(z) |psi0> where
psi0 is the uniform superposition over the span of the X-check supports.
Labels are classes: x modulo that span, z modulo its GF(2) orthogonal
complement. Distance between eigenstates is the minimal weight of a Pauli
string mapping one to the other, minimized over both stabilizer actions,
which collapses to plain Hamming distance for classical models.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BetaNegative,
    CenterOutsideSpace,
    EmptyBoundary,
    EmptySubspace,
    NonCommutingChecks,
    NotClassical,
)
from .numerics import DensityMatrix, hermitian_eigensystem
from .pauli import PauliString, apply_pauli, gf2_null_space_masks, gf2_span, mask_from_indices, popcount
from .subspace import Subspace, basis_state_subspace

__all__ = [
    "CheckFamily",
    "Hamiltonian",
    "BarrierCertificate",
    "build_hamiltonian",
    "classical_energy",
    "classical_energies",
    "expansion_scan",
    "barrier_subspace",
    "gibbs_state",
    "subspace_min_energy",
    "random_local_perturbation",
    "perturb",
    "css_labels",
    "css_eigenstate",
    "ising_ring",
    "repetition",
    "curie_weiss",
    "steane7",
    "toric",
    "random_ldpc",
    "REGISTRY",
    "checks_from_text",
    "checks_to_text",
]


@dataclass(frozen=True)
class CheckFamily:
    """Parity checks over n qubits; x_checks empty for classical models."""

    n: int
    z_checks: tuple = ()
    x_checks: tuple = ()

    def __post_init__(self):
        for attr in ("z_checks", "x_checks"):
            cleaned = tuple(
                tuple(sorted(int(q) for q in supp)) for supp in getattr(self, attr)
            )
            object.__setattr__(self, attr, cleaned)
            for supp in cleaned:
                if len(set(supp)) != len(supp):
                    raise NonCommutingChecks(f"repeated qubit in support {supp}")
                if supp and (supp[0] < 0 or supp[-1] >= self.n):
                    raise NonCommutingChecks(f"support {supp} outside 0..{self.n - 1}")
        for zs in self.z_checks:
            for xs in self.x_checks:
                if len(set(zs) & set(xs)) % 2:
                    raise NonCommutingChecks(
                        f"Z support {zs} and X support {xs} overlap oddly"
                    )

    @property
    def is_classical(self):
        return not self.x_checks

    def z_masks(self):
        return np.array(
            [mask_from_indices(self.n, s) for s in self.z_checks], dtype=np.uint64
        )

    def x_masks(self):
        return np.array(
            [mask_from_indices(self.n, s) for s in self.x_checks], dtype=np.uint64
        )


@dataclass
class Hamiltonian:
    mat: np.ndarray
    n: int
    w0: int
    w1: int
    source: str = ""
    term_supports: tuple = field(default=(), repr=False)
    checks: "CheckFamily" = field(default=None, repr=False)

    def __post_init__(self):
        M = np.asarray(self.mat, dtype=np.complex128)
        dev = np.abs(M - M.conj().T).max() if M.size else 0.0
        if dev > 1e-10:
            raise NonCommutingChecks(f"Hamiltonian not Hermitian (dev {dev:.3e})")
        self.mat = M

    @property
    def is_diagonal(self):
        off = self.mat - np.diag(np.diag(self.mat))
        return np.abs(off).max() < 1e-12 if off.size else True


@dataclass
class BarrierCertificate:
    V: Subspace
    boundary_radius: int
    E_min_V: float
    E_min_boundary: float
    kappa: float
    boundary: Subspace = field(default=None, repr=False)


def _max_per_qubit(n, supports):
    counts = np.zeros(n, dtype=int)
    for supp in supports:
        for q in supp:
            counts[q] += 1
    return int(counts.max()) if n else 0


def _parity(indices, mask):
    return (popcount(indices & np.uint64(mask)) & 1).astype(np.int64)


def build_hamiltonian(checks):
    """H0 = sum of violated-check projectors; spectrum counts violations.

    Terms are verified mutually commuting and, when the full spectrum is
    affordable (dim <= 512), the integer-spectrum invariant is checked
    directly; classical models check their diagonal at any size.
    """
    n = checks.n
    dim = 1 << n
    idx = np.arange(dim, dtype=np.uint64)
    diag = np.zeros(dim)
    for mask in checks.z_masks():
        diag += _parity(idx, mask)
    H = np.diag(diag.astype(np.complex128))
    x_terms = []
    for mask in checks.x_masks():
        perm = (idx ^ np.uint64(mask)).astype(np.int64)
        term = 0.5 * np.eye(dim, dtype=np.complex128)
        term[perm, np.arange(dim)] -= 0.5
        x_terms.append(term)
        H += term
    z_diags = [_parity(idx, m).astype(np.complex128) for m in checks.z_masks()]
    for xt in x_terms:
        for zd in z_diags:
            resid = np.abs(xt * zd[None, :] - zd[:, None] * xt).max()
            if resid > 1e-10:
                raise NonCommutingChecks(f"term commutator residual {resid:.3e}")
    if checks.is_classical:
        if np.abs(diag - np.round(diag)).max() > 1e-9:
            raise NonCommutingChecks("non-integer classical spectrum")
    elif dim <= 512:
        w = np.linalg.eigvalsh(H)
        if np.abs(w - np.round(w)).max() > 1e-9 or w.min() < -1e-9:
            raise NonCommutingChecks("spectrum is not non-negative integers")
    supports = checks.z_checks + checks.x_checks
    return Hamiltonian(
        mat=H,
        n=n,
        w0=_max_per_qubit(n, supports),
        w1=0,
        source="checks",
        term_supports=supports,
        checks=checks,
    )


def _as_mask(n, x):
    if np.isscalar(x) or isinstance(x, (int, np.integer)):
        val = int(x)
        if not 0 <= val < (1 << n):
            raise CenterOutsideSpace(f"bitstring {val} outside n={n} register")
        return val
    bits = np.asarray(x, dtype=np.int64)
    if bits.size != n:
        raise CenterOutsideSpace(f"expected {n} bits, got {bits.size}")
    return mask_from_indices(n, np.flatnonzero(bits))


def bits_from_mask(n, mask):
    return np.array([(mask >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.int8)


def classical_energy(x, checks):
    """Number of Z checks with odd parity on the bitstring x."""
    if not checks.is_classical:
        raise NotClassical("model has X checks")
    mask = np.uint64(_as_mask(checks.n, x))
    return int(sum(int(popcount(mask & np.uint64(m))) & 1 for m in checks.z_masks()))


def classical_energies(checks):
    """Energy of every bitstring, vectorized over the full register."""
    if not checks.is_classical:
        raise NotClassical("model has X checks")
    idx = np.arange(1 << checks.n, dtype=np.uint64)
    E = np.zeros(idx.size, dtype=np.int64)
    for mask in checks.z_masks():
        E += _parity(idx, mask)
    return E


def expansion_scan(checks, delta):
    """Worst energy-per-weight ratio over words of weight up to delta*n.

    Returns (gamma, witness bits). Ties break toward the lexicographically
    first witness, which under the bit convention is the smallest basis
    index.
    """
    if not checks.is_classical:
        raise NotClassical("model has X checks")
    n = checks.n
    if n > 20:
        raise NotClassical(f"scan over 2^{n} states refused (n > 20)")
    E = classical_energies(checks)
    w = popcount(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    sel = (w > 0) & (w <= delta * n)
    if not sel.any():
        raise NotClassical(f"no nonzero weights within delta*n = {delta * n}")
    ratios = E[sel] / w[sel]
    pos = np.argmin(ratios)
    gamma = float(ratios[pos])
    witness = int(np.flatnonzero(sel)[pos])
    return gamma, bits_from_mask(n, witness)


def css_labels(checks):
    """Class representatives for CSS eigenstate labels.

    Returns (x_reps, z_reps, gx_span, gxp_span): x labels run modulo the
    span of X-check supports, z labels modulo its orthogonal complement,
    each coset represented by its smallest member.
    """
    n = checks.n
    x_masks = [int(m) for m in checks.x_masks()]
    gx_span = gf2_span(x_masks)
    gxp_span = gf2_span(gf2_null_space_masks(n, x_masks))
    idx = np.arange(1 << n, dtype=np.uint64)
    x_min = idx.copy()
    for g in gx_span:
        np.minimum(x_min, idx ^ np.uint64(int(g)), out=x_min)
    x_reps = np.unique(x_min)
    z_min = idx.copy()
    for h in gxp_span:
        np.minimum(z_min, idx ^ np.uint64(int(h)), out=z_min)
    z_reps = np.unique(z_min)
    return x_reps, z_reps, gx_span, gxp_span


def _reference_state(n, gx_span):
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[gx_span.astype(np.int64)] = 1.0 / math.sqrt(gx_span.size)
    return psi


def css_eigenstate(checks, x, z, psi0=None, gx_span=None):
    """The eigenstate X(x) Z(z) |psi0>, phase dropped."""
    n = checks.n
    if gx_span is None:
        gx_span = gf2_span([int(m) for m in checks.x_masks()])
    if psi0 is None:
        psi0 = _reference_state(n, gx_span)
    vec = apply_pauli(PauliString(n, int(x), int(z)), psi0)
    lead = vec[np.flatnonzero(np.abs(vec) > 1e-12)[0]]
    return vec * (abs(lead) / lead)


def _joint_reduced_distance(a, b, gx_span, gxp_span):
    """Min weight of supp(a^g) | supp(b^h) over both stabilizer spans."""
    ag = np.uint64(int(a)) ^ gx_span
    bh = np.uint64(int(b)) ^ gxp_span
    joint = np.bitwise_or.outer(ag, bh)
    return int(popcount(joint).min())


def barrier_subspace(checks, center, inner_radius, boundary_radius, H):
    """Ball of eigenstates around a center label, with its energy gap.

    V spans all eigenstates within reduced distance inner_radius of the
    center; the boundary shell reaches boundary_radius further out. Both
    minimum energies are measured against the supplied Hamiltonian (which
    may carry a perturbation on top of the checks).
    """
    n = checks.n
    x0 = _as_mask(n, center[0])
    z0 = _as_mask(n, center[1])
    if inner_radius + boundary_radius > n:
        raise EmptyBoundary(
            f"radii {inner_radius}+{boundary_radius} exceed register size {n}"
        )
    if checks.is_classical:
        return _classical_barrier(checks, x0, inner_radius, boundary_radius, H)
    x_reps, z_reps, gx_span, gxp_span = css_labels(checks)
    inner_pairs = []
    shell_pairs = []
    for xr in x_reps:
        for zr in z_reps:
            d = _joint_reduced_distance(xr ^ np.uint64(x0), zr ^ np.uint64(z0), gx_span, gxp_span)
            if d <= inner_radius:
                inner_pairs.append((int(xr), int(zr)))
            elif d <= inner_radius + boundary_radius:
                shell_pairs.append((int(xr), int(zr)))
    if not shell_pairs:
        raise EmptyBoundary("no eigenstates in the boundary shell")
    psi0 = _reference_state(n, gx_span)
    V = Subspace(
        n,
        np.column_stack(
            [css_eigenstate(checks, x, z, psi0, gx_span) for x, z in inner_pairs]
        ),
        label=f"ball r<={inner_radius}",
    )
    shell = Subspace(
        n,
        np.column_stack(
            [css_eigenstate(checks, x, z, psi0, gx_span) for x, z in shell_pairs]
        ),
        label=f"shell {inner_radius}<d<={inner_radius + boundary_radius}",
    )
    e_v = subspace_min_energy(V, H)
    e_b = subspace_min_energy(shell, H)
    return BarrierCertificate(
        V=V,
        boundary_radius=boundary_radius,
        E_min_V=e_v,
        E_min_boundary=e_b,
        kappa=(e_b - e_v) / n,
        boundary=shell,
    )


def _classical_barrier(checks, x0, inner_radius, boundary_radius, H):
    """Hamming fast path: eigenstates are basis states, distance is plain."""
    n = checks.n
    d = popcount(np.arange(1 << n, dtype=np.uint64) ^ np.uint64(x0))
    inner_idx = np.flatnonzero(d <= inner_radius)
    shell_idx = np.flatnonzero(
        (d > inner_radius) & (d <= inner_radius + boundary_radius)
    )
    if shell_idx.size == 0:
        raise EmptyBoundary("no eigenstates in the boundary shell")
    V = basis_state_subspace(n, inner_idx, label=f"ball r<={inner_radius}")
    shell = basis_state_subspace(
        n,
        shell_idx,
        label=f"shell {inner_radius}<d<={inner_radius + boundary_radius}",
    )
    e_v = subspace_min_energy(V, H)
    e_b = subspace_min_energy(shell, H)
    return BarrierCertificate(
        V=V,
        boundary_radius=boundary_radius,
        E_min_V=e_v,
        E_min_boundary=e_b,
        kappa=(e_b - e_v) / n,
        boundary=shell,
    )


def subspace_min_energy(V, H):
    """min over unit psi in V of <psi|H|psi>, via the compressed block."""
    if V.dim == 0:
        raise EmptySubspace("minimum energy over an empty subspace")
    mat = H.mat if isinstance(H, Hamiltonian) else np.asarray(H)
    basis = V.basis
    nnz_per_col = (np.abs(basis) > 1e-14).sum(axis=0)
    offdiag = np.abs(mat - np.diag(np.diag(mat))).max()
    if offdiag < 1e-14 and (nnz_per_col == 1).all():
        rows = np.argmax(np.abs(basis), axis=0)
        return float(np.real(np.diag(mat))[rows].min())
    block = basis.conj().T @ mat @ basis
    return float(np.linalg.eigvalsh(0.5 * (block + block.conj().T))[0])


def gibbs_state(H, beta):
    """Thermal state, log partition function, and free energy -logZ/beta.

    Diagonal Hamiltonians skip the eigensolver. Weights are shifted by the
    ground energy before exponentiating so large beta stays finite.
    """
    if beta < 0:
        raise BetaNegative(f"beta = {beta}")
    mat = H.mat if isinstance(H, Hamiltonian) else np.asarray(H)
    n = H.n if isinstance(H, Hamiltonian) else int(mat.shape[0]).bit_length() - 1
    offdiag = np.abs(mat - np.diag(np.diag(mat))).max()
    if offdiag < 1e-12:
        w = np.real(np.diag(mat))
        U = None
    else:
        w, U = hermitian_eigensystem(mat)
    shifted = np.exp(-beta * (w - w.min()))
    total = shifted.sum()
    logZ = float(np.log(total) - beta * w.min())
    probs = shifted / total
    if U is None:
        rho = np.diag(probs.astype(np.complex128))
    else:
        rho = (U * probs[None, :]) @ U.conj().T
    F = -logZ / beta if beta > 0 else -math.inf
    return DensityMatrix(rho, n), logZ, F


def _embed_on_support(n, support, T):
    """Spread a 2^k matrix over the full register on the given qubits."""
    dim = 1 << n
    k = len(support)
    idx = np.arange(dim)
    sub = np.zeros(dim, dtype=np.int64)
    for pos, q in enumerate(support):
        bit = (idx >> (n - 1 - q)) & 1
        sub |= bit << (k - 1 - pos)
    rest = idx & ~mask_from_indices(n, support)
    full = T[np.ix_(sub, sub)].copy()
    full[rest[:, None] != rest[None, :]] = 0.0
    return full


def random_local_perturbation(n, term_supports, g, seed):
    """Sum of seeded Gaussian Hermitian terms, rescaled to norm g*n."""
    supports = tuple(tuple(sorted(int(q) for q in s)) for s in term_supports)
    dim = 1 << n
    V = np.zeros((dim, dim), dtype=np.complex128)
    rng = np.random.default_rng(seed)
    for supp in supports:
        k = len(supp)
        G = rng.standard_normal((1 << k, 1 << k)) + 1j * rng.standard_normal(
            (1 << k, 1 << k)
        )
        T = 0.5 * (G + G.conj().T)
        V += _embed_on_support(n, supp, T)
    if g > 0 and supports:
        norm = np.abs(np.linalg.eigvalsh(V)).max()
        if norm > 0:
            V *= (g * n) / norm
    else:
        V[:] = 0.0
    return Hamiltonian(
        mat=V,
        n=n,
        w0=_max_per_qubit(n, supports),
        w1=max((len(s) for s in supports), default=0),
        source="perturbation",
        term_supports=supports,
    )


def perturb(H0, V):
    """H0 + V with locality bookkeeping merged."""
    supports = H0.term_supports + V.term_supports
    return Hamiltonian(
        mat=H0.mat + V.mat,
        n=H0.n,
        w0=_max_per_qubit(H0.n, supports),
        w1=max(H0.w1, V.w1),
        source=f"{H0.source}+{V.source}",
        term_supports=supports,
    )


# ---------------------------------------------------------------------------
# Built-in models


def ising_ring(n):
    """Ferromagnetic ring: one bond check per adjacent pair."""
    return CheckFamily(n, z_checks=tuple((i, (i + 1) % n) for i in range(n)))


def repetition(n):
    """Repetition code with ring-closed parity checks."""
    return ising_ring(n)


def curie_weiss(n):
    """All-to-all pair checks; energy grows quadratically with weight."""
    return CheckFamily(
        n, z_checks=tuple((i, j) for i in range(n) for j in range(i + 1, n))
    )


_STEANE_SUPPORTS = ((0, 2, 4, 6), (1, 2, 5, 6), (3, 4, 5, 6))


def steane7():
    """Steane code: Hamming(7,4) checks on both bases."""
    return CheckFamily(7, z_checks=_STEANE_SUPPORTS, x_checks=_STEANE_SUPPORTS)


def toric(L=2):
    """Toric code patch on an L x L torus, qubits on edges.

    Horizontal edge (r, c) gets index r*L + c, vertical edge (r, c) gets
    L*L + r*L + c. Stars are X checks, plaquettes Z checks.
    """
    def h(r, c):
        return (r % L) * L + (c % L)

    def v(r, c):
        return L * L + (r % L) * L + (c % L)

    x_checks = []
    z_checks = []
    for r in range(L):
        for c in range(L):
            x_checks.append((h(r, c), h(r, c - 1), v(r, c), v(r - 1, c)))
            z_checks.append((h(r, c), h(r + 1, c), v(r, c), v(r, c + 1)))
    return CheckFamily(2 * L * L, z_checks=tuple(z_checks), x_checks=tuple(x_checks))


def random_ldpc(n, checks, seed):
    """Random weight-3 classical parity checks, deterministic per seed."""
    rng = np.random.default_rng(seed)
    supports = tuple(
        tuple(sorted(rng.choice(n, size=3, replace=False).tolist()))
        for _ in range(checks)
    )
    return CheckFamily(n, z_checks=supports)


REGISTRY = {
    "ising_ring": ising_ring,
    "repetition": repetition,
    "curie_weiss": curie_weiss,
    "steane7": steane7,
    "toric": toric,
    "random_ldpc": random_ldpc,
}


def checks_from_text(text):
    """Parse `Z: 0 1` / `X: 2 3 4` lines; optional `n: 7` header."""
    n = None
    z_checks = []
    x_checks = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tag, _, rest = line.partition(":")
        tag = tag.strip().lower()
        if tag == "n":
            n = int(rest)
        elif tag == "z":
            z_checks.append(tuple(int(q) for q in rest.split()))
        elif tag == "x":
            x_checks.append(tuple(int(q) for q in rest.split()))
        else:
            raise NonCommutingChecks(f"unrecognized check line {line!r}")
    if n is None:
        n = 1 + max(
            (q for supp in z_checks + x_checks for q in supp), default=-1
        )
    return CheckFamily(n, tuple(z_checks), tuple(x_checks))


def checks_to_text(checks):
    lines = [f"n: {checks.n}"]
    lines += ["Z: " + " ".join(str(q) for q in s) for s in checks.z_checks]
    lines += ["X: " + " ".join(str(q) for q in s) for s in checks.x_checks]
    return "\n".join(lines) + "\n"
