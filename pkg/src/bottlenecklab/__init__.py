"""Numerical bottleneck bounds for quantum channels and classical chains.

Modules:
    numerics     dense linear-algebra kernels and tolerances
    pauli        Pauli strings, GF(2) machinery, reduced weights
    subspace     subspaces, neighborhoods, partitions
    channel      Kraus channels, locality, steady states
    markov       column-stochastic chains and the classical bound
    model        parity-check Hamiltonians, barriers, Gibbs states
    sampler      Metropolis-type channels with engineered fixed points
    bottleneck   the bottleneck theorem verifiers and reports
    stability    shell decompositions, tail bounds, stability sweeps
    cli          config-driven experiment runner
"""

__version__ = "0.1.0"
