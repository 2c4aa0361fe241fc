"""Independent eigenvalue counter via quadratic-form discretization.

The operator's form  ∫|φ'|² - ⟨M Θ M† φ(0), φ(0)⟩ + ∫⟨Vφ, φ⟩  is
assembled with piecewise-linear finite elements on [0, L], truncated with
a hard Dirichlet condition at x = L.  Work happens in the rotated frame
where the boundary matrices are diagonal (potential conjugated to M†VM):
the boundary term is then a cotangent on each channel's origin node and
Dirichlet channels are essential constraints there.  Negative-eigenvalue
counts come from the inertia of K - E·Mass through a block-tridiagonal
LDL† recursion (Sylvester's law); eigenvalue estimates, when requested,
from inertia bisection (spectrum slicing) over the negative part.

Because P1 elements form a subspace of the form domain, discrete counts
never exceed the true count; refinement only adds states.
"""

import numpy as np
from dataclasses import dataclass, field

import scipy.sparse as sp

from .boundary import BoundaryClassification, BoundaryPair, classify
from .errors import IndefiniteMass, MeshTooCoarse, NumericalSingularity, RegimeViolation
from .potentials import MatrixPotential

EPS_NEAR_ZERO = 1e-8    # discrete eigenvalues in (-EPS_NEAR_ZERO, 0) are truncation noise
DEFAULT_LADDER = ((40.0, 0.02), (80.0, 0.01), (160.0, 0.005))
_GAUSS_OFFSET = 0.5 / np.sqrt(3.0)   # 2-point Gauss nodes at mid ± h·offset


@dataclass(frozen=True)
class Discretization:
    """Uniform mesh on [0, L] with width h and hard Dirichlet at L."""

    L: float
    h: float

    def __post_init__(self):
        if self.h <= 0:
            raise MeshTooCoarse(f"mesh width must be positive, got {self.h}")
        if self.L < 10:
            raise MeshTooCoarse(f"truncation length must be >= 10, got {self.L}")

    @property
    def m(self) -> int:
        return int(round(self.L / self.h))


@dataclass
class CountReport:
    """Count of negative eigenvalues with optional estimates and diagnostics."""

    count: int
    eigenvalues: list | None
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "count": self.count,
            "eigenvalues": self.eigenvalues,
            "converged": self.converged,
            "diagnostics": self.diagnostics,
        }


@dataclass
class FormMatrices:
    """Block-tridiagonal stiffness and mass data for the discretized form.

    Free nodes are 0..m-1 (node m is clamped); at node 0 only the
    channels in `keep0` (non-Dirichlet, in the rotated frame) are kept.
    `diag[i]`/`off[i]` are the n×n stiffness blocks, the mass is the
    scalar P1 pattern times the identity in channel space.
    """

    n: int
    m: int
    disc: Discretization
    keep0: np.ndarray
    diag: np.ndarray
    off: np.ndarray
    mass_diag: np.ndarray
    mass_off: np.ndarray
    classification: BoundaryClassification
    potential_scale: float

    @property
    def n_dof(self) -> int:
        return int(len(self.keep0)) + self.n * (self.m - 1)

    def shifted_blocks(self, E: float):
        """Diagonal and off-diagonal blocks of K - E·Mass, node 0 reduced."""
        keep = self.keep0
        d0 = (self.diag[0] - E * self.mass_diag[0] * np.eye(self.n))[np.ix_(keep, keep)]
        o0 = (self.off[0] - E * self.mass_off[0] * np.eye(self.n))[keep, :]
        diags = [d0] + [
            self.diag[i] - E * self.mass_diag[i] * np.eye(self.n)
            for i in range(1, self.m)
        ]
        offs = [o0] + [
            self.off[i] - E * self.mass_off[i] * np.eye(self.n)
            for i in range(1, self.m - 1)
        ]
        return diags, offs

    def to_sparse(self):
        """(K, Mass) as CSR matrices over the free DOFs."""
        n, m = self.n, self.m
        keep = self.keep0
        n0 = len(keep)
        offsets = np.concatenate(([0], n0 + n * np.arange(m)))

        entries_k: list[tuple[np.ndarray, int, int]] = []
        entries_m: list[tuple[np.ndarray, int, int]] = []
        for i in range(m):
            dofs = n0 if i == 0 else n
            blk = self.diag[i][np.ix_(keep, keep)] if i == 0 else self.diag[i]
            entries_k.append((blk, offsets[i], offsets[i]))
            entries_m.append((self.mass_diag[i] * np.eye(dofs), offsets[i], offsets[i]))
            if i < m - 1:
                ob = self.off[i][keep, :] if i == 0 else self.off[i]
                mo = self.mass_off[i] * (np.eye(n)[keep, :] if i == 0 else np.eye(n))
                for block, store in ((ob, entries_k), (mo, entries_m)):
                    store.append((block, offsets[i], offsets[i + 1]))
                    store.append((block.conj().T, offsets[i + 1], offsets[i]))

        def build(entries):
            rows, cols, vals = [], [], []
            for block, r0, c0 in entries:
                r, c = np.indices(block.shape)
                rows.append(r.ravel() + r0)
                cols.append(c.ravel() + c0)
                vals.append(np.asarray(block, dtype=complex).ravel())
            nd = self.n_dof
            return sp.csr_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=(nd, nd),
            )

        return build(entries_k), build(entries_m)


def _potential_element_blocks(V: MatrixPotential, M: np.ndarray, disc: Discretization):
    """Per-element integrals of the rotated potential against the P1 hats.

    Returns (LL, LR, RR) arrays of shape (m, n, n): the contributions of
    element [x_e, x_e + h] to the (e,e), (e,e+1) and (e+1,e+1) blocks.
    Uses 2-point Gauss (exact for piecewise-linear data), with an exact
    overlap correction for square-well edges interior to an element.
    """
    h, m = disc.h, disc.m
    lefts = np.arange(m) * h
    lo, hi = V.support()
    active = (lefts + h > lo - h) & (lefts < hi + h)
    n = V.n
    LL = np.zeros((m, n, n), dtype=complex)
    LR = np.zeros((m, n, n), dtype=complex)
    RR = np.zeros((m, n, n), dtype=complex)
    if not np.any(active):
        return LL, LR, RR

    idx = np.nonzero(active)[0]
    s = _GAUSS_OFFSET
    g1 = lefts[idx] + h * (0.5 - s)
    g2 = lefts[idx] + h * (0.5 + s)
    V1 = V.values(g1)
    V2 = V.values(g2)
    Mh = M.conj().T
    V1 = np.einsum("ab,xbc,cd->xad", Mh, V1, M)
    V2 = np.einsum("ab,xbc,cd->xad", Mh, V2, M)
    wl1, wl2 = 0.5 + s, 0.5 - s   # left-hat values at the two Gauss nodes
    LL[idx] = (h / 2) * (wl1**2 * V1 + wl2**2 * V2)
    RR[idx] = (h / 2) * (wl2**2 * V1 + wl1**2 * V2)
    LR[idx] = (h / 2) * (wl1 * wl2) * (V1 + V2)

    if V.kind == "square_well" and hi > lo:
        # a well edge strictly inside an element: replace the Gauss value
        # with the exact hat-product overlap against the constant depth
        depth = Mh @ V.depth @ M
        for edge in (lo, hi):
            e = int(np.floor(edge / h))
            if not 0 <= e < m:
                continue
            xl, xr = e * h, (e + 1) * h
            if not xl < edge < xr:
                continue
            p, q = max(xl, lo), min(xr, hi)
            e_ll = e_lr = e_rr = 0.0
            if q > p:
                e_ll = ((xr - p) ** 3 - (xr - q) ** 3) / (3 * h * h)
                e_rr = ((q - xl) ** 3 - (p - xl) ** 3) / (3 * h * h)
                u1, u2 = p - xl, q - xl
                e_lr = (h * (u2**2 - u1**2) / 2 - (u2**3 - u1**3) / 3) / (h * h)
            LL[e] = e_ll * depth
            RR[e] = e_rr * depth
            LR[e] = e_lr * depth

    return LL, LR, RR


def assemble_form_matrix(pair: BoundaryPair, V: MatrixPotential,
                         disc: Discretization,
                         classification: BoundaryClassification | None = None
                         ) -> FormMatrices:
    """Assemble the discretized form as block-tridiagonal (K, Mass) data."""
    cls = classification if classification is not None else classify(pair)
    n, m, h = cls.n, disc.m, disc.h
    if m < 100:
        raise MeshTooCoarse(f"need at least 100 nodes, got {m}")
    if V.n != n:
        raise RegimeViolation(f"potential dimension {V.n} != pair dimension {n}")

    eye = np.eye(n)
    diag = np.empty((m, n, n), dtype=complex)
    off = np.empty((m - 1, n, n), dtype=complex)
    diag[:] = (2.0 / h) * eye
    diag[0] = (1.0 / h) * eye - np.diag(cls.Theta)
    off[:] = (-1.0 / h) * eye

    mass_diag = np.full(m, 2 * h / 3)
    mass_diag[0] = h / 3
    mass_off = np.full(m - 1, h / 6)
    row_sums = np.zeros(m)
    row_sums[:-1] += np.abs(mass_off)
    row_sums[1:] += np.abs(mass_off)
    if np.any(mass_diag - row_sums <= 0):
        raise IndefiniteMass("assembled mass matrix lost diagonal dominance")

    LL, LR, RR = _potential_element_blocks(V, cls.M, disc)
    diag[:m] += LL
    diag[1:m] += RR[: m - 1]
    off[: m - 1] += LR[: m - 1]

    keep0 = np.nonzero(cls.thetas != np.pi)[0]
    pot_scale = float(np.linalg.norm(LL, axis=(1, 2)).max()) / (h / 2)
    return FormMatrices(
        n=n,
        m=m,
        disc=disc,
        keep0=keep0,
        diag=diag,
        off=off,
        mass_diag=mass_diag,
        mass_off=mass_off,
        classification=cls,
        potential_scale=pot_scale,
    )


def _inertia_blocks(diags, offs) -> int:
    """Negative-eigenvalue count of a Hermitian block-tridiagonal matrix.

    Block LDL†: D_{i+1} = A_{i+1} - B_i† D_i^{-1} B_i; by congruence the
    matrix inertia is the sum of the block inertias.
    """
    count = 0
    D = np.array(diags[0])
    for i in range(len(diags)):
        if D.shape == (1, 1):
            if D[0, 0].real < 0:
                count += 1
        else:
            count += int(np.count_nonzero(np.linalg.eigvalsh(D) < 0))
        if i < len(offs):
            B = offs[i]
            try:
                X = np.linalg.solve(D, B)
            except np.linalg.LinAlgError as exc:
                raise NumericalSingularity("LDL pivot block singular") from exc
            D = np.array(diags[i + 1]) - B.conj().T @ X
    return count


def _inertia_scalar(kd, ko, md, mo, E: float) -> int:
    """Fast Sturm recursion for n = 1 (plain float loop)."""
    d = (kd - E * md).real.tolist()
    o = (ko - E * mo).real.tolist()
    count = 0
    prev = d[0]
    if prev < 0:
        count += 1
    if prev == 0.0:
        raise NumericalSingularity("LDL pivot is exactly zero")
    for i in range(1, len(d)):
        cur = d[i] - o[i - 1] * o[i - 1] / prev
        if cur < 0:
            count += 1
        if cur == 0.0:
            raise NumericalSingularity("LDL pivot is exactly zero")
        prev = cur
    return count


def inertia_below(fm: FormMatrices, E: float) -> int:
    """Number of generalized eigenvalues of (K, Mass) below E."""
    shift = 0.0
    for attempt in range(4):
        try:
            if fm.n == 1 and len(fm.keep0) == 1:
                kd = fm.diag[:, 0, 0]
                ko = fm.off[:, 0, 0]
                return _inertia_scalar(kd, ko, fm.mass_diag, fm.mass_off, E + shift)
            if fm.n == 1 and len(fm.keep0) == 0:
                # scalar Dirichlet channel: node 0 carries no DOF
                kd = fm.diag[1:, 0, 0]
                ko = fm.off[1:, 0, 0]
                return _inertia_scalar(kd, ko, fm.mass_diag[1:], fm.mass_off[1:],
                                       E + shift)
            diags, offs = fm.shifted_blocks(E + shift)
            return _inertia_blocks(diags, offs)
        except NumericalSingularity:
            # exact tie with a pivot: nudge the shift and retry
            shift = (attempt + 1) * 1e-11 * max(1.0, abs(E))
    raise NumericalSingularity(f"inertia failed at E = {E} after pivot nudges")


def _spectrum_floor(fm: FormMatrices) -> float:
    """A certified value below the smallest generalized eigenvalue."""
    cls = fm.classification
    cot_sq = float(np.max(cls.Theta**2)) if len(cls.Theta) else 0.0
    sigma = -(fm.potential_scale + cot_sq + 2.0)
    for _ in range(80):
        if inertia_below(fm, sigma) == 0:
            return sigma
        sigma *= 2.0
    raise NumericalSingularity("could not bracket the spectrum from below")


def eigenvalue_estimates(fm: FormMatrices, count: int,
                         rel_tol: float = 1e-7) -> list[float]:
    """The `count` smallest generalized eigenvalues by inertia bisection.

    Spectrum slicing on the Sturm count is immune to the clustering that
    defeats shift-invert iterations when a shallow state sits against
    the discretized continuum edge.
    """
    if count == 0:
        return []
    cache: dict[float, int] = {}

    def below(x: float) -> int:
        if x not in cache:
            cache[x] = inertia_below(fm, x)
        return cache[x]

    floor = _spectrum_floor(fm)
    out = []
    for k in range(1, count + 1):
        lo, hi = floor, -EPS_NEAR_ZERO
        # invariant: below(lo) < k <= below(hi)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hi - lo <= max(1e-12, rel_tol * abs(mid)):
                break
            if below(mid) >= k:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return sorted(out)


def count_negative(pair: BoundaryPair, V: MatrixPotential, disc: Discretization,
                   E: float = 0.0, estimates: bool = True,
                   fm: FormMatrices | None = None) -> CountReport:
    """Count generalized eigenvalues below E (E <= 0).

    At E = 0 the count excludes the window (-EPS_NEAR_ZERO, 0): the
    continuum operator has no zero eigenvalue, so discrete values there
    are truncation artifacts (they are flagged in the diagnostics).
    """
    if E > 0:
        raise RegimeViolation(f"shift must be <= 0, got E = {E}")
    if fm is None:
        fm = assemble_form_matrix(pair, V, disc)
    if E == 0.0:
        count = inertia_below(fm, -EPS_NEAR_ZERO)
        near_zero = inertia_below(fm, 0.0) - count
    else:
        count = inertia_below(fm, E)
        near_zero = 0
    eigs = None
    if estimates:
        eigs = eigenvalue_estimates(fm, count)
    return CountReport(
        count=count,
        eigenvalues=eigs,
        converged=True,
        diagnostics={
            "ladder": [(disc.L, disc.h, count)],
            "near_zero": near_zero,
            "E": E,
        },
    )


def converge_count(pair: BoundaryPair, V: MatrixPotential,
                   ladder=DEFAULT_LADDER, E: float = 0.0,
                   estimates: bool = True) -> CountReport:
    """Run count_negative over a (L, h) ladder until two rungs agree.

    Non-convergence is reported in the flag, never raised.
    """
    cls = classify(pair)
    rows = []
    counts = []
    last_fm = None
    for (L, h) in ladder:
        disc = Discretization(L=float(L), h=float(h))
        last_fm = assemble_form_matrix(pair, V, disc, classification=cls)
        if E == 0.0:
            c = inertia_below(last_fm, -EPS_NEAR_ZERO)
        else:
            c = inertia_below(last_fm, E)
        counts.append(c)
        rows.append((float(L), float(h), c))
        if len(counts) >= 2 and counts[-1] == counts[-2]:
            break
    converged = len(counts) >= 2 and counts[-1] == counts[-2]
    near_zero = inertia_below(last_fm, 0.0) - counts[-1] if E == 0.0 else 0
    eigs = None
    if estimates:
        eigs = eigenvalue_estimates(last_fm, counts[-1])
    return CountReport(
        count=counts[-1],
        eigenvalues=eigs,
        converged=converged,
        diagnostics={"ladder": rows, "E": E, "near_zero": near_zero},
    )
