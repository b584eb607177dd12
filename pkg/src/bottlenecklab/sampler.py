"""Local Gibbs samplers for commuting-projector models.

Two constructions, both single-site Metropolis moves packaged as exact
Kraus channels. The diagonal variant flips one bit with an acceptance
amplitude read off the energy vector. The CSS variant resolves the
energy jump of a single-Pauli flip through the syndrome projectors of
the adjacent checks, which keeps every Kraus operator supported on the
site and its check neighborhoods; no global diagonalization enters the
operators. Both fix the Gibbs state of their Hamiltonian exactly, and
construction re-verifies that before returning.
"""

import numpy as np

from .channel import KrausChannel
from .errors import (
    EmptySchedule,
    MixedFixedPoints,
    NotCommuting,
    NotDiagonal,
    NotFixedPoint,
)
from .model import gibbs_state
from .numerics import trace_norm
from .pauli import PauliString, pauli_matrix

__all__ = [
    "metropolis_site_channel",
    "css_metropolis_channel",
    "sweep_schedule",
]

DEFAULT_ATTEMPT = 0.5


def _gibbs_residual(chan, H, beta):
    rho, _, _ = gibbs_state(H, beta)
    out = np.zeros_like(rho.mat)
    for K in chan.kraus:
        out += K @ rho.mat @ K.conj().T
    return trace_norm(out - rho.mat)


def metropolis_site_channel(H, beta, site, attempt_prob=DEFAULT_ATTEMPT):
    """Single-bit-flip Metropolis move on a diagonal Hamiltonian.

    Kraus pair {K_flip, K_stay}: the flip carries amplitude
    sqrt(q * min(1, e^{-beta dE})) into the flipped basis state and the
    stay operator completes trace preservation on the diagonal.
    """
    if not H.is_diagonal:
        raise NotDiagonal("site Metropolis needs a diagonal Hamiltonian")
    if not 0 < attempt_prob <= 1:
        raise ValueError(f"attempt_prob {attempt_prob} outside (0, 1]")
    n = H.n
    if not 0 <= site < n:
        raise ValueError(f"site {site} outside register of {n}")
    dim = 1 << n
    E = np.real(np.diag(H.mat))
    idx = np.arange(dim)
    flip = idx ^ (1 << (n - 1 - site))
    accept = attempt_prob * np.minimum(1.0, np.exp(-beta * (E[flip] - E)))
    K_flip = np.zeros((dim, dim), dtype=np.complex128)
    K_flip[flip, idx] = np.sqrt(accept)
    K_stay = np.diag(np.sqrt(1.0 - accept).astype(np.complex128))
    chan = KrausChannel(n, [K_flip, K_stay])
    # detailed balance makes the diagonal Gibbs vector exactly stationary
    shifted = np.exp(-beta * (E - E.min()))
    pi = shifted / shifted.sum()
    evolved = accept[flip] * pi[flip] + (1.0 - accept) * pi
    resid = float(np.abs(evolved - pi).sum())
    if resid > 1e-10:
        raise NotFixedPoint(f"Gibbs residual {resid:.3e} on site {site}")
    return chan


def css_metropolis_channel(H0, beta, site, flavor, attempt_prob=DEFAULT_ATTEMPT):
    """Energy-resolved single-Pauli Metropolis move for a CSS model.

    The flavor Pauli at the site anticommutes with the opposing checks
    touching that site; their syndrome patterns split the space into
    eigenprojectors P_omega labeled by the energy jump omega the flip
    would cause. Each jump gets Kraus sqrt(q min(1, e^{-beta omega}))
    sigma P_omega, and a commuting stay operator completes the channel.
    """
    if H0.checks is None:
        raise NotCommuting("Hamiltonian does not carry a commuting check family")
    if flavor not in ("X", "Z"):
        raise ValueError(f"flavor must be 'X' or 'Z', got {flavor!r}")
    if not 0 < attempt_prob <= 1:
        raise ValueError(f"attempt_prob {attempt_prob} outside (0, 1]")
    fam = H0.checks
    n = fam.n
    if not 0 <= site < n:
        raise ValueError(f"site {site} outside register of {n}")
    dim = 1 << n
    opposing = fam.z_checks if flavor == "X" else fam.x_checks
    opposing = [s for s in opposing if site in s]
    check_mats = []
    for supp in opposing:
        letters = {q: ("Z" if flavor == "X" else "X") for q in supp}
        check_mats.append(pauli_matrix(PauliString.from_letters(n, letters)))
    sigma = pauli_matrix(PauliString.from_letters(n, {site: flavor}))
    q = attempt_prob
    m = len(opposing)
    projectors = {}
    for pattern in range(1 << m):
        P = np.eye(dim, dtype=np.complex128)
        omega = 0
        for k in range(m):
            violated = (pattern >> k) & 1
            sign = -1.0 if violated else 1.0
            P = P @ (0.5 * (np.eye(dim) + sign * check_mats[k]))
            omega += -1 if violated else 1
        if np.abs(P).max() < 1e-14:
            continue
        if omega in projectors:
            projectors[omega] = projectors[omega] + P
        else:
            projectors[omega] = P
    kraus = []
    stay = np.zeros((dim, dim), dtype=np.complex128)
    for omega in sorted(projectors):
        P = projectors[omega]
        a = q * min(1.0, np.exp(-beta * omega))
        kraus.append(np.sqrt(a) * (sigma @ P))
        stay += np.sqrt(1.0 - a) * P
    kraus.append(stay)
    chan = KrausChannel(n, kraus)
    resid = _gibbs_residual(chan, H0, beta)
    if resid > 1e-10:
        raise NotFixedPoint(
            f"Gibbs residual {resid:.3e} on site {site} flavor {flavor}"
        )
    return chan


def sweep_schedule(H, beta, sites, flavors=None, repetitions=1, attempt_prob=DEFAULT_ATTEMPT):
    """Ordered channel list covering the sites, cycled `repetitions` times.

    Classical (diagonal) models take flavors=None and get bit-flip moves;
    CSS models get one channel per (site, flavor) pair. Every entry is
    re-checked against the shared Gibbs state.
    """
    sites = list(sites)
    if not sites or repetitions < 1:
        raise EmptySchedule(f"{len(sites)} sites, {repetitions} repetitions")
    if flavors is None:
        built = [
            metropolis_site_channel(H, beta, s, attempt_prob) for s in sites
        ]
    else:
        flavors = list(flavors)
        if not flavors:
            raise EmptySchedule("empty flavor list")
        built = [
            css_metropolis_channel(H, beta, s, f, attempt_prob)
            for s in sites
            for f in flavors
        ]
    rho, _, _ = gibbs_state(H, beta)
    for chan in built:
        out = np.zeros_like(rho.mat)
        for K in chan.kraus:
            out += K @ rho.mat @ K.conj().T
        resid = trace_norm(out - rho.mat)
        if resid > 1e-9:
            raise MixedFixedPoints(f"schedule entry residual {resid:.3e}")
    return built * repetitions
