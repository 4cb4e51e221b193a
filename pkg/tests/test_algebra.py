import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dkpsim.algebra import (
    Kind, LORENTZ_PAIRS, METRIC, angular_momentum_matrix, beta0_multiplicities,
    bilinear, build_representation, check_clifford_algebra, check_meson_algebra,
    commutator, eta_identities, gamma5, hermiticity, lorentz_generators,
)
from dkpsim.errors import BadIndices, DimensionMismatch, RepMismatch


def test_spin1_beta0_couples_a_and_e_blocks():
    b0 = build_representation(Kind.SPIN1).betas[0]
    # A-components (slots 1..3) couple to e-components (slots 4..6) only
    nz = {(i, j) for i, j in zip(*np.nonzero(b0))}
    assert nz == {(1 + k, 4 + k) for k in range(3)} | {(4 + k, 1 + k) for k in range(3)}
    assert set(np.unique(b0)) <= {0, 1j, -1j}


def test_spin0_beta0_only_corner_entries():
    b0 = build_representation(Kind.SPIN0).betas[0]
    nz = sorted(zip(*np.nonzero(b0)))
    assert nz == [(0, 4), (4, 0)]
    assert abs(b0[0, 4]) == 1 and b0[0, 4] == np.conj(b0[4, 0])


def test_spin1_eta0_diagonal():
    eta = build_representation(Kind.SPIN1).eta0
    expect = np.diag([-1] + [1] * 6 + [-1] * 3)
    assert np.array_equal(eta, expect)


def test_meson_algebra_exact(dkp_rep):
    rep = check_meson_algebra(dkp_rep, exact=True)
    assert rep.residual == 0
    assert check_meson_algebra(dkp_rep, exact=False).residual <= 1e-14


def test_meson_special_cases(dkp_rep):
    b = dkp_rep.betas
    assert np.array_equal(b[0] @ b[0] @ b[0], b[0])
    assert np.array_equal(b[0] @ b[1] @ b[0], np.zeros_like(b[0]))


def test_meson_rejects_dirac():
    with pytest.raises(RepMismatch):
        check_meson_algebra(build_representation(Kind.DIRAC))


def test_dirac_clifford():
    rep = build_representation(Kind.DIRAC)
    assert check_clifford_algebra(rep) == 0
    g5 = gamma5(rep)
    assert np.allclose(g5 @ g5, np.eye(4))
    for g in rep.betas:
        assert np.allclose(g5 @ g + g @ g5, 0)


def test_eta_identities_exact(dkp_rep):
    res = eta_identities(dkp_rep)
    assert set(res) == {"eta0_def", "eta0_sq", "eta_b0_left", "eta_b0_right",
                        "eta_bj_anticomm", "eta_bj_adjoint"}
    assert all(v == 0 for v in res.values()), res


def test_hermiticity(dkp_rep):
    assert all(v == 0 for v in hermiticity(dkp_rep).values())


def test_beta0_multiplicities():
    assert beta0_multiplicities(build_representation(Kind.SPIN1)) == {"-1": 3, "0": 4, "1": 3}
    assert beta0_multiplicities(build_representation(Kind.SPIN0)) == {"-1": 1, "0": 3, "1": 1}


def test_lorentz_generators_commutators(dkp_rep):
    gens = lorentz_generators(dkp_rep, tol=0.0)
    assert set(gens) == set(LORENTZ_PAIRS)
    b = dkp_rep.betas
    # direct arithmetic: [b0, r01] = 2i b1
    assert np.max(np.abs(commutator(b[0], gens[(0, 1)]) - 2j * b[1])) == 0
    # antisymmetry of the commutator gives r_mm = 0
    for m in range(4):
        assert np.max(np.abs(2j * commutator(b[m], b[m]))) == 0


def test_lorentz_exhaustive_spin0():
    rep = build_representation(Kind.SPIN0)
    gens = lorentz_generators(rep)
    b = rep.betas
    for (m, n), r in gens.items():
        for lam in range(4):
            lhs = commutator(b[lam], r)
            rhs = 2j * (METRIC[lam, m] * b[n] - METRIC[lam, n] * b[m])
            assert np.array_equal(lhs, rhs)


def test_bilinear_examples():
    rep = build_representation(Kind.SPIN1)
    e = np.eye(10)
    assert bilinear(rep, e[0], e[0]) == -1
    assert bilinear(rep, e[1], e[5]) == 0
    with pytest.raises(DimensionMismatch):
        bilinear(rep, e[0], np.ones(5))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=40, max_size=40))
def test_bilinear_hermitian(vals):
    rep = build_representation(Kind.SPIN1)
    v = np.asarray(vals)
    psi = v[:10] + 1j * v[10:20]
    phi = v[20:30] + 1j * v[30:]
    assert abs(bilinear(rep, psi, phi) - np.conj(bilinear(rep, phi, psi))) <= 1e-12


def test_angular_momentum_matrix(dkp_rep):
    eta = dkp_rep.eta0
    gens = lorentz_generators(dkp_rep)
    for m, n in itertools.permutations(range(4), 2):
        S = angular_momentum_matrix(dkp_rep, m, n)
        # eta0-Hermitian: eta0 S is Hermitian, so eta-form expectations are real
        assert np.allclose(eta @ S, (eta @ S).conj().T, atol=1e-15)
        if m < n:
            # r_mn = 2i [b_m, b_n] = -2 S_mn
            assert np.allclose(gens[(m, n)], -2 * S, atol=0)
    with pytest.raises(BadIndices):
        angular_momentum_matrix(dkp_rep, 1, 1)
    with pytest.raises(BadIndices):
        angular_momentum_matrix(dkp_rep, 0, 4)
