"""Second counter: Birman-Schwinger operator √|V| R₀(E) √|V| as a Nyström matrix.

For V <= 0 and E < 0, eigenvalue branches of -d²/dx² + λV are
nonincreasing in the coupling λ, and a branch passes through E at
coupling λ exactly when 1/λ is an eigenvalue of the kernel operator
B(E) = √|V| R₀(E) √|V|.  Counting B-eigenvalues above 1 therefore counts
the states dragged below E by the full coupling; channels whose
zero-potential operator already sits below E (binding angles with
-cot²θ < E) are added in closed form.

The kernel is discretized with composite trapezoid weights, symmetrized
through weight square roots so the matrix is Hermitian and counts are
inertia-exact.
"""

import numpy as np
from dataclasses import dataclass

from .boundary import BoundaryClassification, BoundaryPair, classify
from .errors import EigenvalueNearOne, NotNegativePotential, RegimeViolation
from .potentials import MatrixPotential, split
from .resolvent import channel_kernel_grid, make_kernel

DEFAULT_NODE_DENSITY = 400          # trapezoid nodes per unit support length
NEAR_ONE_TOL = 1e-6                 # ambiguous-count guard around eigenvalue 1
NEGATIVITY_TOL = 1e-10


@dataclass
class BSMatrix:
    """Discretized Birman-Schwinger operator at energy E < 0."""

    E: float
    nodes: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray
    classification: BoundaryClassification

    @property
    def n(self) -> int:
        return self.classification.n

    def eigenvalues(self) -> np.ndarray:
        """Ascending real spectrum of the symmetrized Nyström matrix."""
        if self.matrix.size == 0:
            return np.zeros(0)
        return np.linalg.eigvalsh(self.matrix)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


def free_count_below(classification: BoundaryClassification, E: float) -> int:
    """Zero-potential eigenvalues -cot²θ (binding channels) lying below E."""
    return int(np.count_nonzero(classification.binding_free_eigenvalues < E))


def build_bs(pair: BoundaryPair, V: MatrixPotential, E: float,
             nodes: int | None = None,
             classification: BoundaryClassification | None = None) -> BSMatrix:
    """Assemble the Nyström matrix of √|V| R₀(E) √|V| on the support of V.

    Requires V ⪯ 0 on its support and E < 0 off the zero-potential
    resonances.  `nodes` defaults to DEFAULT_NODE_DENSITY per unit
    support length.
    """
    if E >= 0:
        raise RegimeViolation(f"E must be negative, got {E}")
    cls = classification if classification is not None else classify(pair)
    if V.n != cls.n:
        raise RegimeViolation(f"potential dimension {V.n} != pair dimension {cls.n}")
    kern = make_kernel(cls, E)  # raises SingularJost on a free resonance

    lo, hi = V.support()
    if hi <= lo:
        return BSMatrix(E=E, nodes=np.zeros(0), weights=np.zeros(0),
                        matrix=np.zeros((0, 0)), classification=cls)

    if nodes is None:
        nodes = max(50, int(np.ceil(DEFAULT_NODE_DENSITY * (hi - lo))))
    xs = np.linspace(lo, hi, nodes)
    w = np.full(nodes, xs[1] - xs[0])
    w[0] *= 0.5
    w[-1] *= 0.5

    n = cls.n
    Mh = cls.M.conj().T
    roots = np.empty((nodes, n, n), dtype=complex)
    pos_part = 0.0
    scale = 0.0
    for i, x in enumerate(xs):
        plus, minus, v1 = split(V, x)
        pos_part = max(pos_part, float(np.linalg.norm(plus, 2)))
        scale = max(scale, float(np.linalg.norm(plus + minus, 2)))
        # rotate √|V| into the diagonal frame once, so the kernel stays diagonal
        roots[i] = Mh @ v1 @ cls.M
    if pos_part > NEGATIVITY_TOL * max(1.0, scale):
        raise NotNegativePotential(
            f"V has a positive spectral part of size {pos_part:.3e} on its support"
        )

    channel = channel_kernel_grid(kern, xs)             # (n, N, N)
    kernel_blocks = np.einsum("cij->ijc", channel)      # (N, N, n) diagonal entries
    sw = np.sqrt(w)
    scaled = roots * sw[:, None, None]
    # block (i, j) = √w_i √|V|(x_i) R̃(x_i, x_j) √|V|(x_j) √w_j in the rotated frame
    big = np.einsum("iab,ijb,jbd->iajd", scaled, kernel_blocks, scaled, optimize=True)
    mat = big.reshape(nodes * n, nodes * n)
    mat = 0.5 * (mat + mat.conj().T)
    return BSMatrix(E=E, nodes=xs, weights=w, matrix=mat, classification=cls)


def bs_count(pair: BoundaryPair, V: MatrixPotential, E: float,
             nodes: int | None = None, guard: float = NEAR_ONE_TOL,
             bsm: BSMatrix | None = None) -> int:
    """Count of operator eigenvalues below E via the Birman-Schwinger principle.

    Equals (eigenvalues of the BS matrix above 1) + (zero-potential
    states below E).  Raises EigenvalueNearOne when some BS eigenvalue
    lies within `guard` of 1; the caller should perturb E and retry.
    """
    if bsm is None:
        bsm = build_bs(pair, V, E, nodes)
    rhos = bsm.eigenvalues()
    if np.any(np.abs(rhos - 1.0) < guard):
        worst = rhos[np.argmin(np.abs(rhos - 1.0))]
        raise EigenvalueNearOne(
            f"BS eigenvalue {worst!r} within {guard} of 1; perturb E"
        )
    crossings = int(np.count_nonzero(rhos > 1.0))
    return crossings + free_count_below(bsm.classification, E)


def bs_trace_bound(pair: BoundaryPair, V: MatrixPotential, E: float,
                   nodes: int | None = None,
                   bsm: BSMatrix | None = None) -> float:
    """Trace of the BS matrix: dominates the crossing count for psd B(E).

    In the regime without Neumann or binding channels it converges, as
    E → 0⁻, to the zero-energy closed form of the diagonal trace bound.
    """
    if bsm is None:
        bsm = build_bs(pair, V, E, nodes)
    return bsm.trace()
