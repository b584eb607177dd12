"""Dense linear-algebra kernels shared by the rest of the package.

Matrices are plain complex numpy arrays. Density matrices get a thin
wrapper so the basic sanity checks (hermiticity, unit trace) run once at
construction instead of being re-derived ad hoc at every call site.

Norm conventions: trace_norm is the Schatten 1-norm (sum of singular
values), operator_norm the Schatten infinity-norm (largest singular
value). For Hermitian input the singular values are the absolute
eigenvalues and we use the cheaper symmetric eigensolver.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyInput, NonSquare, NotHermitian

__all__ = [
    "Tolerance",
    "DensityMatrix",
    "trace_norm",
    "operator_norm",
    "orthonormal_column_basis",
    "hermitian_eigensystem",
    "fix_phases",
    "maximally_mixed",
    "pure_state_density",
]

_HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class Tolerance:
    """Numerical tolerances threaded through rank and comparison decisions.

    abs: absolute tolerance for residual comparisons.
    rank_rel: relative singular-value cutoff for rank decisions,
        measured against the largest singular value.
    """

    abs: float = 1e-10
    rank_rel: float = 1e-8

    def __post_init__(self):
        if not (self.abs > 0 and self.rank_rel > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerance()


def _as_matrix(M):
    M = np.asarray(M)
    if M.ndim != 2:
        raise NonSquare(f"expected a 2d matrix, got shape {M.shape}")
    return M.astype(np.complex128, copy=False)


def _require_square(M):
    M = _as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise NonSquare(f"matrix is {M.shape[0]}x{M.shape[1]}")
    return M


def _is_hermitian(M, tol=_HERMITICITY_TOL):
    return M.shape[0] == M.shape[1] and np.abs(M - M.conj().T).max() <= tol


def trace_norm(M):
    """Schatten 1-norm of a square matrix.

    Hermitian input (within 1e-12) is routed through eigvalsh; the
    singular values of a Hermitian matrix are the moduli of its
    eigenvalues, so both paths agree to rounding.
    """
    M = _require_square(M)
    if M.shape[0] == 0:
        return 0.0
    if _is_hermitian(M, 1e-12):
        return float(np.abs(np.linalg.eigvalsh(M)).sum())
    return float(np.linalg.svd(M, compute_uv=False).sum())


def operator_norm(M):
    """Largest singular value. Accepts rectangular input."""
    M = _as_matrix(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def fix_phases(columns, tol=1e-12):
    """Rotate each column so its first significantly nonzero entry is real positive.

    Leaves norms untouched; used to make eigenvector and basis output
    reproducible where the backend only fixes them up to phase.
    """
    out = np.array(columns, dtype=np.complex128, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = np.flatnonzero(np.abs(col) > tol)
        if idx.size == 0:
            continue
        pivot = col[idx[0]]
        out[:, j] = col * (abs(pivot) / pivot)
    return out


def orthonormal_column_basis(vectors, tol=None):
    """Orthonormal basis for the span of the given vectors.

    Parameters
    ----------
    vectors : sequence of 1d arrays, or a (dim, m) matrix whose columns
        are the vectors.
    tol : Tolerance, optional. rank_rel sets the singular-value cutoff
        relative to the largest singular value.

    Returns
    -------
    (dim, k) array with orthonormal columns; k is the numerical rank.
    k = 0 (an empty basis) is returned when every vector is numerically
    zero. Deterministic for a fixed input order.
    """
    tol = tol or DEFAULT_TOL
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        A = vectors.astype(np.complex128, copy=False)
    else:
        vecs = [np.asarray(v, dtype=np.complex128).reshape(-1) for v in vectors]
        if not vecs:
            raise EmptyInput("no vectors given")
        A = np.column_stack(vecs)
    if A.shape[1] == 0:
        raise EmptyInput("no vectors given")
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] <= 0:
        return np.zeros((A.shape[0], 0), dtype=np.complex128)
    rank = int(np.sum(s > tol.rank_rel * s[0]))
    return fix_phases(U[:, :rank])


def hermitian_eigensystem(H, tol=None):
    """Eigenvalues (ascending) and phase-fixed eigenvectors of a Hermitian matrix.

    Raises NotHermitian when max|H - H^dag| exceeds 1e-10. Reconstruction
    H = V diag(w) V^dag holds within 1e-8 * operator_norm(H); eigenvectors
    with degenerate eigenvalues come back in backend order with the phase
    of the first nonzero component fixed real positive.
    """
    H = _require_square(H)
    dev = np.abs(H - H.conj().T).max() if H.size else 0.0
    if dev > _HERMITICITY_TOL:
        raise NotHermitian(f"max |H - H^dag| = {dev:.3e}")
    w, V = np.linalg.eigh((H + H.conj().T) / 2.0)
    return w, fix_phases(V)


@dataclass
class DensityMatrix:
    """A positive unit-trace operator on n qubits.

    Construction checks hermiticity (1e-10) and unit trace (1e-10).
    Positivity is a mathematical invariant of everything this package
    produces (channel outputs, Gibbs states, normalized projections);
    the eigenvalue check costs a full diagonalization, so it lives in
    validate() and in the test suite rather than on every construction.
    """

    mat: np.ndarray
    n: int = field(default=None)

    def __post_init__(self):
        self.mat = _require_square(self.mat)
        dim = self.mat.shape[0]
        if self.n is None:
            n = int(dim).bit_length() - 1
            if 2**n != dim:
                raise DimensionMismatch(f"dimension {dim} is not a power of two")
            self.n = n
        if 2**self.n != dim:
            raise DimensionMismatch(f"dim {dim} does not match n={self.n}")
        dev = np.abs(self.mat - self.mat.conj().T).max()
        if dev > _HERMITICITY_TOL:
            raise NotHermitian(f"density matrix deviates from Hermitian by {dev:.3e}")
        tr = self.mat.trace()
        if abs(tr - 1.0) > 1e-9:
            raise ValueError(f"trace is {tr}, expected 1")

    @property
    def dim(self):
        return self.mat.shape[0]

    def validate(self, floor=-1e-10):
        """Check positivity: smallest eigenvalue must be >= floor."""
        lo = float(np.linalg.eigvalsh(self.mat)[0])
        if lo < floor:
            raise ValueError(f"negative eigenvalue {lo:.3e} below floor {floor:.1e}")
        return lo


# A handful of constructors used all over the tests and pipelines.


def maximally_mixed(n):
    dim = 2**n
    return DensityMatrix(np.eye(dim, dtype=np.complex128) / dim, n)


def pure_state_density(vec, n=None):
    v = np.asarray(vec, dtype=np.complex128).reshape(-1)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise EmptyInput("zero vector has no associated state")
    v = v / nrm
    return DensityMatrix(np.outer(v, v.conj()), n)
