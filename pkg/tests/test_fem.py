"""Form-discretization counter: counts, estimates, ladders, invariances."""

import numpy as np
import pytest
import scipy.linalg
from scipy.optimize import brentq

from halfline import (
    Bump,
    Conjugated,
    Discretization,
    SquareWell,
    assemble_form_matrix,
    bargmann_bound,
    classify,
    converge_count,
    count_negative,
    diagonal_pair,
    random_pair,
    validate_pair,
    zero_potential,
)
from halfline.errors import MeshTooCoarse, RegimeViolation
from halfline.fem import inertia_below

PI = np.pi


def dirichlet(n=1):
    return validate_pair(np.zeros((n, n)), np.eye(n))


def neumann(n=1):
    return validate_pair(np.eye(n), np.zeros((n, n)))


def matching_eigenvalues(g: float) -> list[float]:
    """Independent oracle for the Dirichlet square well of depth g on [0, 1].

    Bound states solve p cot p = -κ with p = √(g - κ²); roots are
    bracketed on the branches (n - ½)π < p < min(nπ, √g).
    """
    f = lambda p: p * np.cos(p) + np.sqrt(g - p * p) * np.sin(p)
    out = []
    nb = 1
    while (nb - 0.5) * PI < np.sqrt(g):
        lo = (nb - 0.5) * PI + 1e-12
        hi = min(nb * PI - 1e-12, np.sqrt(g) - 1e-12)
        if lo < hi and f(lo) * f(hi) < 0:
            p = brentq(f, lo, hi, xtol=1e-14)
            out.append(p * p - g)
        nb += 1
    return out


def test_free_dirichlet_has_no_negative_spectrum():
    rep = count_negative(dirichlet(), zero_potential(1),
                         Discretization(40.0, 0.02))
    assert rep.count == 0 and rep.eigenvalues == []
    # smallest Ritz value of the doubly-clamped truncation is ≈ (π/L)², positive
    fm = assemble_form_matrix(dirichlet(), zero_potential(1),
                              Discretization(10.0, 0.1))
    K, M = fm.to_sparse()
    vals = scipy.linalg.eigh(K.toarray(), M.toarray(), eigvals_only=True)
    assert vals[0] == pytest.approx((PI / 10.0) ** 2, rel=0.05)
    assert vals[0] > 0


def test_free_neumann_has_no_negative_spectrum():
    rep = count_negative(neumann(), zero_potential(1), Discretization(40.0, 0.02))
    assert rep.count == 0


def test_binding_channel_free_eigenvalue():
    rep = count_negative(diagonal_pair([PI / 4]), zero_potential(1),
                         Discretization(80.0, 0.01))
    assert rep.count == 1
    assert rep.eigenvalues[0] == pytest.approx(-1.0, abs=1e-3)


def test_inertia_matches_dense_eigensolver():
    # dual route: block LDL inertia against a dense generalized eigensolver
    pair = random_pair(2, seed=6)
    V = SquareWell(depth=-1.5 * np.eye(2), a=0.5, b=2.0)
    fm = assemble_form_matrix(pair, V, Discretization(12.0, 0.06))
    K, M = fm.to_sparse()
    dense = scipy.linalg.eigh(K.toarray(), M.toarray(), eigvals_only=True)
    for E in (0.0, -0.25, -1.0, -4.0):
        assert inertia_below(fm, E) == int(np.count_nonzero(dense < E))


def test_deep_well_count_and_eigenvalues_match_matching_oracle():
    oracle = matching_eigenvalues(25.0)
    assert len(oracle) == 2
    rep = converge_count(dirichlet(), SquareWell(np.array([[-25.0]]), 0.0, 1.0))
    assert rep.converged and rep.count == 2
    np.testing.assert_allclose(rep.eigenvalues, oracle, atol=2e-2)


def test_shallow_dirichlet_well_binds_nothing():
    assert matching_eigenvalues(2.0) == []
    rep = converge_count(dirichlet(), SquareWell(np.array([[-2.0]]), 0.0, 1.0))
    assert rep.converged and rep.count == 0


def test_counts_below_shifts_bracket_the_free_eigenvalue():
    pair = diagonal_pair([PI / 4])
    disc = Discretization(80.0, 0.01)
    assert count_negative(pair, zero_potential(1), disc, E=-2.0,
                          estimates=False).count == 0
    assert count_negative(pair, zero_potential(1), disc, E=-0.5,
                          estimates=False).count == 1


def test_count_rejects_positive_shift():
    with pytest.raises(RegimeViolation):
        count_negative(dirichlet(), zero_potential(1),
                       Discretization(40.0, 0.02), E=0.5)


def test_robin_dispersion():
    for theta in (PI / 8, PI / 4, 3 * PI / 8):
        rep = converge_count(diagonal_pair([theta]), zero_potential(1))
        assert rep.count == 1
        assert rep.eigenvalues[0] == pytest.approx(-1.0 / np.tan(theta) ** 2,
                                                   abs=1e-3)


def test_coupling_monotonicity():
    # V <= 0: deepening the well never removes states
    counts = []
    for lam in (0.25, 0.5, 1.0, 2.0):
        V = SquareWell(depth=np.array([[-4.0 * lam]]), a=0.0, b=1.0)
        counts.append(converge_count(dirichlet(), V, estimates=False).count)
    assert counts == sorted(counts)
    assert counts[0] == 0 and counts[-1] >= 1


def test_unitary_invariance_of_count():
    pair = random_pair(3, seed=11)
    cls = classify(pair)
    rng = np.random.default_rng(55)
    W = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))) / np.sqrt(3)
    V = Bump(amplitude=-(W.conj().T @ W), a=0.5, b=2.0)
    rep = converge_count(pair, V, estimates=False)
    rotated = converge_count(diagonal_pair(cls.thetas), Conjugated(V, cls.M),
                             estimates=False)
    assert rep.converged and rotated.converged
    assert rep.count == rotated.count


def test_bc_shift_bracketing_single_flip():
    # diagonal potential vanishing near the origin; one angle flipped
    thetas = [2.0, 2.8]
    V = SquareWell(depth=np.diag([-3.0, -1.0]), a=0.5, b=1.5)
    base = converge_count(diagonal_pair(thetas), V, estimates=False)
    flipped = converge_count(diagonal_pair([0.9, 2.8]), V, estimates=False)
    assert base.converged and flipped.converged
    assert abs(flipped.count - base.count) <= 1


def test_converged_ladder_reports_rungs():
    rep = converge_count(dirichlet(), zero_potential(1), estimates=False)
    assert rep.converged
    assert rep.diagnostics["ladder"][0][:2] == (40.0, 0.02)
    assert rep.count == 0


def test_mesh_too_coarse():
    with pytest.raises(MeshTooCoarse):
        assemble_form_matrix(dirichlet(), zero_potential(1),
                             Discretization(10.0, 0.2))
    with pytest.raises(MeshTooCoarse):
        Discretization(5.0, 0.01)


def test_near_zero_diagnostic_present():
    rep = count_negative(dirichlet(), zero_potential(1),
                         Discretization(40.0, 0.02))
    assert rep.diagnostics["near_zero"] >= 0


def test_count_dominated_by_bargmann_bound():
    for seed in range(4):
        pair = random_pair(2, seed=200 + seed)
        thetas = classify(pair).thetas
        if np.any(thetas < 0.05):
            continue
        rng = np.random.default_rng(300 + seed)
        W = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / np.sqrt(2)
        V = Bump(amplitude=-(W.conj().T @ W), a=0.3, b=1.6)
        rep = converge_count(pair, V, estimates=False)
        total = bargmann_bound(pair, V).total
        assert rep.count <= total + 1e-9


def test_well_edge_blocks_match_quadrature_oracle():
    # well edges at irrational points exercise the exact overlap correction;
    # compare the straddling-element integrals against adaptive quadrature
    from scipy.integrate import quad
    from halfline.fem import _potential_element_blocks

    disc = Discretization(10.0, 0.1)
    V = SquareWell(depth=np.array([[-25.0]]), a=1 / 3, b=1 / 3 + 1.0)
    LL, LR, RR = _potential_element_blocks(V, np.eye(1, dtype=complex), disc)
    h = disc.h

    def vfun(x):
        return -25.0 if V.a <= x <= V.b else 0.0

    for e in (3, 13):   # elements containing 1/3 and 4/3
        xl, xr = e * h, (e + 1) * h
        hat_l = lambda x: (xr - x) / h
        hat_r = lambda x: (x - xl) / h
        pts = [p for p in (V.a, V.b) if xl < p < xr]
        ref_ll = quad(lambda x: hat_l(x) ** 2 * vfun(x), xl, xr, points=pts)[0]
        ref_lr = quad(lambda x: hat_l(x) * hat_r(x) * vfun(x), xl, xr, points=pts)[0]
        ref_rr = quad(lambda x: hat_r(x) ** 2 * vfun(x), xl, xr, points=pts)[0]
        assert LL[e][0, 0].real == pytest.approx(ref_ll, abs=1e-12)
        assert LR[e][0, 0].real == pytest.approx(ref_lr, abs=1e-12)
        assert RR[e][0, 0].real == pytest.approx(ref_rr, abs=1e-12)


def test_well_edges_off_mesh_converge():
    V = SquareWell(depth=np.array([[-25.0]]), a=1 / 3, b=1 / 3 + 1.0)
    rep = converge_count(dirichlet(), V, estimates=False)
    assert rep.converged
    assert rep.count <= bargmann_bound(dirichlet(), V).total
