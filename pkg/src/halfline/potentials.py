"""Hermitian matrix potentials on [0, ∞).

Presets cover the shapes the rest of the toolkit needs: a square well,
an exponentially decaying profile, a smooth compactly supported bump and
grid-sampled data with linear interpolation.  All are identically zero
(or negligible, for the exponential) beyond `support_hint`, which keeps
every potential in the finite-first-moment class by construction.
"""

import numpy as np
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import DivergentMoment, NegativeCoordinate, NonHermitianInput

EPS_Z = 1e-13          # eigenvalues in [-EPS_Z, EPS_Z] are clamped to 0 before sqrt
HERMITICITY_TOL = 1e-12
EXP_TAIL_CUT = 1e-14   # exponential preset support cut: ||V|| below this is "zero"


def _require_hermitian(X, name="matrix"):
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise NonHermitianInput(f"{name} must be square, got shape {X.shape}")
    scale = max(np.linalg.norm(X), 1.0)
    if np.linalg.norm(X - X.conj().T) > HERMITICITY_TOL * scale:
        raise NonHermitianInput(f"{name} is not Hermitian within tolerance")
    return X


class MatrixPotential:
    """Common interface: evaluate(x), values(xs), support(), faddeev moments."""

    n: int
    kind: str

    def evaluate(self, x: float) -> np.ndarray:
        if x < 0:
            raise NegativeCoordinate(f"x = {x} < 0")
        return self._eval(float(x))

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if np.any(xs < 0):
            raise NegativeCoordinate("grid contains x < 0")
        out = np.empty(xs.shape + (self.n, self.n), dtype=complex)
        for idx, x in np.ndenumerate(xs):
            out[idx] = self._eval(float(x))
        return out

    def support(self) -> tuple[float, float]:
        """Interval outside of which the potential vanishes (or is negligible)."""
        raise NotImplementedError

    @property
    def support_hint(self) -> float:
        return self.support()[1]

    def _eval(self, x: float) -> np.ndarray:
        raise NotImplementedError

    def tail_first_moment(self) -> float:
        """Upper estimate of ∫_{R}^{∞} (1+x)||V|| dx beyond the support hint."""
        return 0.0


@dataclass
class SquareWell(MatrixPotential):
    """V(x) = depth (a constant Hermitian matrix) on [a, b], zero elsewhere."""

    depth: np.ndarray
    a: float
    b: float

    kind = "square_well"

    def __post_init__(self):
        self.depth = _require_hermitian(self.depth, "depth")
        self.n = self.depth.shape[0]
        if not (0 <= self.a <= self.b):
            raise ValueError(f"need 0 <= a <= b, got a={self.a}, b={self.b}")

    def _eval(self, x):
        if self.a <= x <= self.b:
            return self.depth.copy()
        return np.zeros_like(self.depth)

    def support(self):
        return (self.a, self.b)


@dataclass
class Exponential(MatrixPotential):
    """V(x) = coefficient · e^{-rate·x}, rate > 0."""

    coefficient: np.ndarray
    rate: float

    kind = "exp"

    def __post_init__(self):
        self.coefficient = _require_hermitian(self.coefficient, "coefficient")
        self.n = self.coefficient.shape[0]
        if self.rate <= 0:
            raise DivergentMoment(f"exponential rate must be > 0, got {self.rate}")

    def _eval(self, x):
        return self.coefficient * np.exp(-self.rate * x)

    def values(self, xs):
        xs = np.asarray(xs, dtype=float)
        if np.any(xs < 0):
            raise NegativeCoordinate("grid contains x < 0")
        return np.exp(-self.rate * xs)[..., None, None] * self.coefficient

    def support(self):
        c = max(np.linalg.norm(self.coefficient, 2), EXP_TAIL_CUT)
        return (0.0, np.log(c / EXP_TAIL_CUT) / self.rate)

    def tail_first_moment(self):
        c = np.linalg.norm(self.coefficient, 2)
        r = self.support()[1]
        mu = self.rate
        return c * np.exp(-mu * r) * (1.0 + r + 1.0 / mu) / mu


@dataclass
class Bump(MatrixPotential):
    """V(x) = amplitude · exp(1 - 1/(1-t²)) with t = 2(x-a)/(b-a) - 1 on (a, b).

    Smooth, compactly supported, peaking at the amplitude matrix mid-well.
    """

    amplitude: np.ndarray
    a: float
    b: float

    kind = "bump"

    def __post_init__(self):
        self.amplitude = _require_hermitian(self.amplitude, "amplitude")
        self.n = self.amplitude.shape[0]
        if not (0 <= self.a < self.b):
            raise ValueError(f"need 0 <= a < b, got a={self.a}, b={self.b}")

    def _profile(self, x):
        t = 2.0 * (np.asarray(x, dtype=float) - self.a) / (self.b - self.a) - 1.0
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
        return out

    def _eval(self, x):
        return self.amplitude * self._profile(np.array([x]))[0]

    def values(self, xs):
        xs = np.asarray(xs, dtype=float)
        if np.any(xs < 0):
            raise NegativeCoordinate("grid contains x < 0")
        return self._profile(xs)[..., None, None] * self.amplitude

    def support(self):
        return (self.a, self.b)


@dataclass
class Sampled(MatrixPotential):
    """Linear interpolation of Hermitian samples; zero beyond the last node."""

    xs: np.ndarray
    vs: np.ndarray

    kind = "sampled"

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.vs = np.asarray(self.vs, dtype=complex)
        if self.xs.ndim != 1 or len(self.xs) < 1:
            raise ValueError("xs must be a non-empty 1-d grid")
        if np.any(np.diff(self.xs) <= 0):
            raise ValueError("xs must be strictly increasing")
        if np.any(self.xs < 0):
            raise NegativeCoordinate("sample grid contains x < 0")
        if self.vs.shape[0] != len(self.xs):
            raise ValueError("vs must provide one matrix per grid node")
        for V in self.vs:
            _require_hermitian(V, "sample")
        self.n = self.vs.shape[1]

    def _eval(self, x):
        # zero outside the grid, matching the compact-support convention
        if x >= self.xs[-1]:
            return (
                self.vs[-1].copy() if x == self.xs[-1] else np.zeros_like(self.vs[-1])
            )
        if x <= self.xs[0]:
            return self.vs[0].copy() if x == self.xs[0] else np.zeros_like(self.vs[0])
        j = int(np.searchsorted(self.xs, x, side="right")) - 1
        t = (x - self.xs[j]) / (self.xs[j + 1] - self.xs[j])
        return (1.0 - t) * self.vs[j] + t * self.vs[j + 1]

    def support(self):
        return (float(self.xs[0]), float(self.xs[-1]))


def zero_potential(n: int) -> SquareWell:
    """The identically-zero potential in dimension n."""
    return SquareWell(depth=np.zeros((n, n), dtype=complex), a=0.0, b=0.0)


@dataclass
class Conjugated(MatrixPotential):
    """Pointwise unitary conjugation M† V(x) M of another potential."""

    inner: MatrixPotential
    M: np.ndarray

    kind = "conjugated"

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=complex)
        self.n = self.inner.n
        if self.M.shape != (self.n, self.n):
            raise ValueError("conjugating matrix shape does not match the potential")

    def _eval(self, x):
        return self.M.conj().T @ self.inner._eval(x) @ self.M

    def values(self, xs):
        inner_vals = self.inner.values(xs)
        return np.einsum("ab,...bc,cd->...ad", self.M.conj().T, inner_vals, self.M)

    def support(self):
        return self.inner.support()

    def tail_first_moment(self):
        return self.inner.tail_first_moment()


def split(V: MatrixPotential, x: float):
    """Pointwise spectral split: returns (V₊(x), V₋(x), V₁(x)).

    V = V₊ - V₋ with both parts psd and mutually annihilating;
    V₁ = √(V₊+V₋) is the Hermitian psd square root of |V|.
    """
    Vx = _require_hermitian(V.evaluate(x), f"V({x})")
    d, Q = np.linalg.eigh(Vx)
    d = np.where(np.abs(d) <= EPS_Z, 0.0, d)
    plus = (Q * np.maximum(d, 0.0)) @ Q.conj().T
    minus = (Q * np.maximum(-d, 0.0)) @ Q.conj().T
    root = (Q * np.sqrt(np.abs(d))) @ Q.conj().T
    return plus, minus, root


class PotentialSplit:
    """Evaluators for the positive/negative parts and √|V| of a potential."""

    def __init__(self, V: MatrixPotential):
        self.potential = V
        self.n = V.n

    def vplus(self, x: float) -> np.ndarray:
        return split(self.potential, x)[0]

    def vminus(self, x: float) -> np.ndarray:
        return split(self.potential, x)[1]

    def v1(self, x: float) -> np.ndarray:
        return split(self.potential, x)[2]


def operator_norm(X: np.ndarray) -> float:
    """Largest singular value (the norm of X as an operator on Cⁿ)."""
    return float(np.linalg.norm(X, 2))


def faddeev_moment(V: MatrixPotential, rel_tol: float = 1e-8) -> tuple[float, float]:
    """(∫||V||dx, ∫(1+x)||V||dx) over [0, support_hint] plus a tail estimate.

    Raises DivergentMoment if the tail estimate is not negligible.
    """
    lo, hi = V.support()
    if hi <= lo:
        return (0.0, 0.0)
    l1, _ = quad(lambda x: operator_norm(V.evaluate(x)), lo, hi,
                 epsrel=rel_tol, limit=200)
    m1, _ = quad(lambda x: (1.0 + x) * operator_norm(V.evaluate(x)), lo, hi,
                 epsrel=rel_tol, limit=200)
    tail = V.tail_first_moment()
    if tail > max(rel_tol * max(m1, 1.0), 1e-10):
        raise DivergentMoment(f"tail estimate {tail:.3e} is not negligible")
    return (float(l1), float(m1 + tail))
