"""Self-adjoint boundary pairs (A, B) at the origin and their angle spectrum.

A boundary condition -B†ψ(0) + A†ψ'(0) = 0 is self-adjoint exactly when
A†B is Hermitian and A†A + B†B is positive definite.  Every such pair is
classified by the unitary U = (B - iA)(B + iA)^{-1}: its eigenvalues are
e^{2iθ_j} with angles θ_j in (0, π], where θ = π is Dirichlet, θ = π/2 is
Neumann and anything else is a mixed (Robin-type) channel.  Angles in
(0, π/2) are "binding": the zero-potential operator already carries the
eigenvalue -cot²θ in that channel.
"""

import numpy as np
from dataclasses import dataclass

from scipy.linalg import schur

from .errors import (
    AngleOutOfRange,
    Degenerate,
    DimensionMismatch,
    NumericalSingularity,
    SelfAdjointnessViolated,
)

EPS_SA_PER_N = 1e-10      # tolerance per dimension for ||A†B - B†A||
EPS_UNITARY_PER_N = 1e-10
EPS_PD = 1e-12            # smallest admissible eigenvalue of A†A + B†B
EPS_CLASS = 1e-9          # default angle-snapping tolerance
COND_LIMIT = 1e12         # condition estimate above which B+iA counts as singular


def _as_complex_matrix(X, name: str) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimensionMismatch(f"{name} must be a square matrix, got shape {X.shape}")
    return X


@dataclass(frozen=True)
class BoundaryPair:
    """Validated matrices (A, B) defining a self-adjoint boundary condition."""

    n: int
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        self.A.setflags(write=False)
        self.B.setflags(write=False)


@dataclass(frozen=True)
class BoundaryClassification:
    """Angle spectrum of a boundary pair.

    thetas are sorted ascending in (0, π]; M's columns follow the same
    order, so M† U M = diag(e^{2iθ_j}).  Theta holds the hatted
    cotangents (0 at θ = π/2 and θ = π), ThetaT the hatted tangents
    (0 for θ ≤ π/2, tan θ ≤ 0 beyond); both are returned as 1-d arrays
    of the diagonal entries.
    """

    n: int
    U: np.ndarray
    M: np.ndarray
    thetas: np.ndarray
    n_N: int
    n_D: int
    n_M: int
    n_Mb: int
    Theta: np.ndarray
    ThetaT: np.ndarray

    def theta_t_matrix(self) -> np.ndarray:
        """M diag(ThetaT) M†, the only form in which M may be consumed."""
        return self.M @ np.diag(self.ThetaT) @ self.M.conj().T

    def theta_matrix(self) -> np.ndarray:
        """M diag(Theta) M†."""
        return self.M @ np.diag(self.Theta) @ self.M.conj().T

    @property
    def binding_free_eigenvalues(self) -> np.ndarray:
        """Eigenvalues -cot²θ of the zero-potential operator, one per binding channel."""
        binding = self.thetas[(self.thetas > 0) & (self.thetas < np.pi / 2)]
        return -1.0 / np.tan(binding) ** 2


def validate_pair(A, B) -> BoundaryPair:
    """Check the self-adjointness conditions and wrap (A, B).

    Raises DimensionMismatch, SelfAdjointnessViolated or Degenerate.
    """
    A = _as_complex_matrix(A, "A")
    B = _as_complex_matrix(B, "B")
    if A.shape != B.shape:
        raise DimensionMismatch(f"A and B differ in shape: {A.shape} vs {B.shape}")
    n = A.shape[0]
    if n < 1:
        raise DimensionMismatch("dimension must be >= 1")

    scale = max(np.linalg.norm(A), np.linalg.norm(B), 1.0)
    comm = A.conj().T @ B - B.conj().T @ A
    if np.linalg.norm(comm) > EPS_SA_PER_N * n * scale**2:
        raise SelfAdjointnessViolated(
            f"||A†B - B†A|| = {np.linalg.norm(comm):.3e} exceeds tolerance"
        )

    gram = A.conj().T @ A + B.conj().T @ B
    lam_min = float(np.linalg.eigvalsh(gram)[0])
    if lam_min <= EPS_PD * scale**2:
        raise Degenerate(f"λ_min(A†A + B†B) = {lam_min:.3e} is not positive")

    if np.linalg.cond(B + 1j * A) > COND_LIMIT:
        raise Degenerate("B + iA is numerically singular")

    return BoundaryPair(n=n, A=A.copy(), B=B.copy())


def compute_U(pair: BoundaryPair) -> np.ndarray:
    """U = (B - iA)(B + iA)^{-1}; unitary, gauge invariant under (A,B)->(AT,BT)."""
    lhs = (pair.B + 1j * pair.A).conj().T
    rhs = (pair.B - 1j * pair.A).conj().T
    try:
        U = np.linalg.solve(lhs, rhs).conj().T
    except np.linalg.LinAlgError as exc:
        raise NumericalSingularity("solve with B + iA failed") from exc
    resid = np.linalg.norm(U.conj().T @ U - np.eye(pair.n))
    if resid > EPS_UNITARY_PER_N * pair.n:
        raise NumericalSingularity(f"U is not unitary: residual {resid:.3e}")
    return U


def _theta_from_eigenvalue(lam: complex) -> float:
    # λ = e^{2iθ} with θ in (0, π]: split the principal argument at 0
    a = np.angle(lam)
    return a / 2.0 if a > 0 else a / 2.0 + np.pi


def classify(pair: BoundaryPair, eps_class: float = EPS_CLASS) -> BoundaryClassification:
    """Extract (U, M, θ_1..θ_n) and the channel counts from a validated pair.

    A complex Schur decomposition supplies an orthonormal eigenbasis even
    for degenerate U eigenvalues; columns of M are then sorted by θ.
    Angles within eps_class of π/2 or π snap to Neumann/Dirichlet; angles
    within eps_class of 0 also snap to Dirichlet (θ → 0⁺ and θ = π meet at
    the same eigenvalue λ = 1, so the classification is ambiguous there and
    the Dirichlet reading is the stable one).
    """
    if eps_class <= 0:
        raise ValueError("eps_class must be positive")
    U = compute_U(pair)
    T, Q = schur(U, output="complex")
    lams = np.diag(T)
    thetas = np.array([_theta_from_eigenvalue(l) for l in lams])

    snapped = thetas.copy()
    snapped[np.abs(thetas - np.pi / 2) <= eps_class] = np.pi / 2
    snapped[np.abs(thetas - np.pi) <= eps_class] = np.pi
    snapped[thetas <= eps_class] = np.pi

    order = np.argsort(snapped, kind="stable")
    thetas = snapped[order]
    M = Q[:, order]

    is_N = thetas == np.pi / 2
    is_D = thetas == np.pi
    is_M = ~(is_N | is_D)
    theta_hat_cot = np.where(is_N | is_D, 0.0, 1.0 / np.tan(np.where(is_M, thetas, 1.0)))
    theta_hat_tan = np.where(thetas > np.pi / 2 + eps_class, np.tan(thetas), 0.0)
    theta_hat_tan[is_D] = 0.0

    return BoundaryClassification(
        n=pair.n,
        U=U,
        M=M,
        thetas=thetas,
        n_N=int(np.count_nonzero(is_N)),
        n_D=int(np.count_nonzero(is_D)),
        n_M=int(np.count_nonzero(is_M)),
        n_Mb=int(np.count_nonzero(thetas < np.pi / 2)),
        Theta=theta_hat_cot,
        ThetaT=theta_hat_tan,
    )


def diagonal_pair(thetas) -> BoundaryPair:
    """Diagonal pair Ã = -diag(sin θ), B̃ = diag(cos θ) for angles in (0, π]."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if np.any(thetas <= 0) or np.any(thetas > np.pi):
        raise AngleOutOfRange(f"angles must lie in (0, pi], got {thetas}")
    A = -np.diag(np.sin(thetas)).astype(complex)
    B = np.diag(np.cos(thetas)).astype(complex)
    return validate_pair(A, B)


def random_pair(n: int, seed) -> BoundaryPair:
    """Random self-adjoint pair built from a Haar-like unitary U0.

    A = (i/2)(U0 - I), B = (I + U0)/2: then B + iA = I exactly, the
    self-adjointness conditions hold in exact arithmetic, and compute_U
    recovers U0.  `seed` may be an int or a numpy Generator.
    """
    if n < 1:
        raise DimensionMismatch("n must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    U0 = Q * (d / np.abs(d))
    A = 0.5j * (U0 - np.eye(n))
    B = 0.5 * (np.eye(n) + U0)
    return validate_pair(A, B)
