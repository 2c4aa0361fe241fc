"""Closed-form resolvent kernel of the zero-potential operator.

Per channel with angle θ the regular solution at energy z = k² is

    φ(x) = -(1/k) sin kx            θ = π   (Dirichlet)
    φ(x) = -cos kx                  θ = π/2 (Neumann)
    φ(x) = (cos θ/k) sin kx - sin θ cos kx   otherwise,

the decaying solution is e^{ikx} (Im k > 0), and the Jost factor
J(k) = cos θ + ik sin θ (-1 for Dirichlet, ik for Neumann) is their
Wronskian, so the Green's kernel of (-d²/dx² - z) with the boundary
condition is φ(x_<) e^{ik x_>} / J(k).  A general pair's kernel is the
diagonal one conjugated by the classification unitary M.
"""

import numpy as np
from dataclasses import dataclass

from .boundary import BoundaryClassification, BoundaryPair, classify
from .errors import NegativeCoordinate, RegimeViolation, SingularJost

JOST_SINGULAR_TOL = 1e-14


def branch_sqrt(z: complex) -> complex:
    """√z with Im k >= 0 (principal root reflected into the closed upper half plane)."""
    k = np.sqrt(complex(z))
    return -k if k.imag < 0 else k


def free_jost_entry(theta: float, k: complex) -> complex:
    """Diagonal Jost-matrix entry for one channel."""
    if theta == np.pi:
        return -1.0 + 0.0j
    if theta == np.pi / 2:
        return 1j * k
    return complex(np.cos(theta) + 1j * k * np.sin(theta))


def free_jost_matrix(classification: BoundaryClassification, k: complex) -> np.ndarray:
    """Diagonal free Jost matrix diag(cos θ_j + ik sin θ_j | -1 | ik).

    Raises SingularJost when any entry is numerically zero (z sits at a
    zero-potential resonance of a binding channel, or k = 0 with Neumann
    channels present).
    """
    entries = np.array([free_jost_entry(t, k) for t in classification.thetas])
    if np.any(np.abs(entries) < JOST_SINGULAR_TOL):
        raise SingularJost(f"free Jost matrix singular at k = {k}")
    return np.diag(entries)


def jost_matrix(pair: BoundaryPair, k: complex) -> np.ndarray:
    """B - ikA, the Jost matrix of a general pair (gauge covariant, not invariant)."""
    return pair.B - 1j * k * pair.A


def free_regular_entry(theta: float, k: complex, x) -> np.ndarray:
    """Per-channel regular solution φ(x); x may be an array."""
    x = np.asarray(x, dtype=float)
    if theta == np.pi:
        return -np.sin(k * x) / k
    if theta == np.pi / 2:
        return -np.cos(k * x)
    return np.cos(theta) / k * np.sin(k * x) - np.sin(theta) * np.cos(k * x)


def free_jost_solution(n: int, k: complex, x: float) -> np.ndarray:
    """Decaying free Jost solution f(k, x) = e^{ikx} Iₙ (Im k > 0)."""
    return np.exp(1j * k * x) * np.eye(n)


def free_growing_solution(n: int, k: complex, x: float) -> np.ndarray:
    """Growing free solution g(k, x) = e^{-ikx} Iₙ."""
    return np.exp(-1j * k * x) * np.eye(n)


@dataclass(frozen=True)
class ResolventKernel:
    """Green's kernel R₀(z)(x, y) of the free operator with boundary pair data."""

    classification: BoundaryClassification
    z: complex
    k: complex

    @property
    def n(self) -> int:
        return self.classification.n


def make_kernel(pair_or_classification, z: complex) -> ResolventKernel:
    """Build the kernel object for z off [0, ∞), checking the Jost matrix."""
    z = complex(z)
    if z.imag == 0 and z.real >= 0:
        raise RegimeViolation(f"z = {z} lies on the essential spectrum [0, inf)")
    cls = pair_or_classification
    if isinstance(cls, BoundaryPair):
        cls = classify(cls)
    k = branch_sqrt(z)
    free_jost_matrix(cls, k)  # raises SingularJost on resonance
    return ResolventKernel(classification=cls, z=z, k=k)


def _diagonal_entries(kernel: ResolventKernel, x: float, y: float) -> np.ndarray:
    k = kernel.k
    lo, hi = (x, y) if x <= y else (y, x)
    th = kernel.classification.thetas
    phi = np.array([free_regular_entry(t, k, lo) for t in th])
    jost = np.array([free_jost_entry(t, k) for t in th])
    return phi * np.exp(1j * k * hi) / jost


def kernel_eval(kernel: ResolventKernel, x: float, y: float) -> np.ndarray:
    """Evaluate the n×n kernel at (x, y), x, y >= 0."""
    if x < 0 or y < 0:
        raise NegativeCoordinate(f"kernel requested at ({x}, {y})")
    diag = _diagonal_entries(kernel, x, y)
    M = kernel.classification.M
    return (M * diag) @ M.conj().T


def kernel_diagonal(kernel: ResolventKernel, x: float) -> np.ndarray:
    """Channel values R̃_jj(z)(x, x) in the diagonal representation."""
    if x < 0:
        raise NegativeCoordinate(f"kernel requested at x = {x}")
    return _diagonal_entries(kernel, x, x)


def channel_kernel_grid(kernel: ResolventKernel, xs: np.ndarray) -> np.ndarray:
    """Array K[c, i, j] = R̃_cc(z)(x_i, x_j) over a grid, one slice per channel."""
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0):
        raise NegativeCoordinate("grid contains x < 0")
    k = kernel.k
    lo = np.minimum.outer(xs, xs)
    hi = np.maximum.outer(xs, xs)
    exp_hi = np.exp(1j * k * hi)
    th = kernel.classification.thetas
    out = np.empty((len(th), len(xs), len(xs)), dtype=complex)
    for c, t in enumerate(th):
        out[c] = free_regular_entry(t, k, lo) * exp_hi / free_jost_entry(t, k)
    return out


def kernel_decay_scale(kernel: ResolventKernel) -> float:
    """D(k): max of 1/|k| and 1/|J entry| over the mixed channels."""
    cls = kernel.classification
    scale = 1.0 / abs(kernel.k)
    for t in cls.thetas:
        if t not in (np.pi, np.pi / 2):
            scale = max(scale, 1.0 / abs(free_jost_entry(t, kernel.k)))
    return scale


def kernel_bound_check(kernel: ResolventKernel, samples: int, seed: int = 0,
                       x_max: float = 10.0) -> float:
    """Max over random (x, y) of ||R(x,y)|| / (D(k) e^{-Im k |x-y|}).

    The exponential-decay envelope holds with a moderate constant for
    real z < 0; the returned ratio is that constant's sampled estimate.
    """
    if kernel.z.imag != 0 or kernel.z.real >= 0:
        raise RegimeViolation("kernel bound check is for real z < 0")
    rng = np.random.default_rng(seed)
    dk = kernel_decay_scale(kernel)
    im_k = kernel.k.imag
    worst = 0.0
    for _ in range(samples):
        x, y = rng.uniform(0.0, x_max, size=2)
        val = np.linalg.norm(kernel_eval(kernel, x, y), 2)
        envelope = dk * np.exp(-im_k * abs(x - y))
        worst = max(worst, val / envelope)
    return worst
