import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dkpsim.algebra import Kind, build_representation
from dkpsim.errors import DimensionMismatch, IncommensurateModes, NotTimelike
from dkpsim.kinematics import minkowski_dot, random_timelike
from dkpsim.states import (
    NORM, Box, Branch, ModeWavefunction, PlaneWaveMode, amplitudes, decompose,
    omega, projections, random_mode_wavefunction, slashed,
)

TRACES = {Kind.SPIN1: (3, 3, 4), Kind.SPIN0: (1, 1, 3), Kind.DIRAC: (2, 2, 0)}


def momenta(rng, n=25):
    return [random_timelike(rng) for _ in range(n)]


def test_slashed_rest_frame(rep):
    assert np.array_equal(slashed(rep, [2.5, 0, 0, 0]), 2.5 * rep.betas[0])


def test_slashed_spectrum(rep, rng):
    for p in momenta(rng, 5):
        m = np.sqrt(minkowski_dot(p, p))
        ev = np.linalg.eigvals(slashed(rep, p))
        npos, nneg, nz = TRACES[rep.kind]
        assert np.sum(np.abs(ev - m) < 1e-6) == npos
        assert np.sum(np.abs(ev + m) < 1e-6) == nneg
        assert np.sum(np.abs(ev) < 1e-6) == nz


def test_slashed_cube(rep, rng):
    for p in momenta(rng):
        S = slashed(rep, p)
        m2 = minkowski_dot(p, p)
        S3 = S @ S @ S
        assert np.max(np.abs(S3 - m2 * S)) <= 1e-12 * np.max(np.abs(S3))


def test_amplitude_norms(rep, rng):
    for p in momenta(rng):
        a = amplitudes(rep, p)
        bar = rep.bar
        n = rep.n_pol
        assert np.max(np.abs(bar(a.U) @ a.U - np.eye(n))) <= 1e-12
        # DKP: vbar v = +I; Dirac: vbar v = -I (sign carried by the block)
        assert a.sign(Branch.PLUS) == 1
        assert a.sign(Branch.MINUS) == (-1 if rep.kind is Kind.DIRAC else 1)
        assert np.max(np.abs(bar(a.V) @ a.V - a.sign(Branch.MINUS) * np.eye(n))) <= 1e-12
        assert np.max(np.abs(bar(a.U) @ a.V)) <= 1e-12
        assert np.max(np.abs(bar(a.V) @ a.U)) <= 1e-12
        if a.Zmat.size:
            k = rep.n_zero_modes
            assert np.max(np.abs(bar(a.Zmat) @ a.Zmat + np.eye(k))) <= 1e-12
            assert np.max(np.abs(bar(a.Zmat) @ a.U)) <= 1e-12
            assert np.max(np.abs(bar(a.Zmat) @ a.V)) <= 1e-12
            S = slashed(rep, p)
            assert np.max(np.abs(S @ a.Zmat)) <= 1e-12 * np.max(np.abs(S))


def test_rest_frame_amplitudes_match_seeds():
    rep = build_representation(Kind.SPIN1)
    a = amplitudes(rep, [1.3, 0, 0, 0])
    r2 = 1 / np.sqrt(2)
    I, Z = np.eye(3), np.zeros((3, 3))
    wp = r2 * np.vstack([np.zeros((1, 3)), I, -1j * I, Z])
    wm = r2 * np.vstack([np.zeros((1, 3)), I, 1j * I, Z])
    assert np.allclose(a.U, wp, atol=1e-15)
    assert np.allclose(a.V, wm, atol=1e-15)
    assert np.allclose(rep.bar(a.U) @ a.U, np.eye(3), atol=1e-15)


def test_projections(rep, rng):
    for p in momenta(rng):
        L = projections(rep, p)
        scale = max(np.max(np.abs(x)) for x in L)
        assert np.max(np.abs(sum(L) - np.eye(rep.dim))) <= 1e-13
        for i, A in enumerate(L):
            # entries grow with the boost, so products are compared relative to scale^2
            assert np.max(np.abs(A @ A - A)) <= 1e-13 * scale ** 2
            for j, B in enumerate(L):
                if i != j:
                    assert np.max(np.abs(A @ B)) <= 1e-13 * scale ** 2
        assert [round(np.trace(x).real) for x in L] == list(TRACES[rep.kind])
        a = amplitudes(rep, p)
        assert np.max(np.abs(L[0] - a.U @ rep.bar(a.U))) <= 1e-12 * scale


def test_projections_reject_non_timelike(rep):
    with pytest.raises(NotTimelike):
        projections(rep, [1, 2, 0, 0])
    with pytest.raises(NotTimelike):
        projections(rep, [1, 1, 0, 0])


def test_decompose_round_trip(rep, rng):
    p = random_timelike(rng)
    a = amplitudes(rep, p)
    e = np.zeros(rep.n_pol)
    e[0] = 1
    cp, cm, c0 = decompose(rep, p, a.U @ e)
    assert np.allclose(cp, e, atol=1e-12) and np.allclose(cm, 0, atol=1e-12)
    assert np.allclose(c0, 0, atol=1e-12)
    for _ in range(20):
        p = random_timelike(rng)
        a = amplitudes(rep, p)
        v = rng.normal(size=rep.dim) + 1j * rng.normal(size=rep.dim)
        cp, cm, c0 = decompose(rep, p, v)
        rec = a.U @ cp + a.V @ cm + (a.Zmat @ c0 if c0.size else 0)
        assert np.max(np.abs(rec - v)) <= 1e-12 * max(1, np.max(np.abs(v)))
    with pytest.raises(DimensionMismatch):
        decompose(rep, p, np.ones(rep.dim + 1))


def test_kernel_spinor_has_no_oscillating_part(dkp_rep, rng):
    p = random_timelike(rng)
    a = amplitudes(dkp_rep, p)
    cp, cm, _ = decompose(dkp_rep, p, a.Zmat @ np.arange(1, dkp_rep.n_zero_modes + 1))
    assert np.max(np.abs(cp)) <= 1e-12 and np.max(np.abs(cm)) <= 1e-12


def test_omega_signs(rep):
    p = [-3.0, 0, 0, 0]
    assert omega(rep, p, Branch.PLUS) == -3.0
    assert omega(rep, p, Branch.MINUS) == 3.0
    assert omega(rep, p, Branch.ZERO) == 0.0


def test_single_mode_at_origin(rep, rng):
    p = random_timelike(rng)
    pol = rng.normal(size=rep.n_pol)
    psi = ModeWavefunction(rep, ((PlaneWaveMode(tuple(p), Branch.PLUS, tuple(pol)), 1.0),))
    assert np.allclose(psi.evaluate(np.zeros(4), 0.0), NORM * amplitudes(rep, p).U @ pol, atol=1e-15)


def test_mode_satisfies_equation(rep, rng):
    psi = random_mode_wavefunction(rep, rng, n_modes=4)
    x = rng.normal(size=4)
    dmu, dtau = psi.derivative(x, 0.3)
    # i d_tau psi = beta_mu (i d^mu) psi ... with i d^mu -> -p^mu this reads
    # i d_tau psi = -(i) beta_mu d^mu psi
    lhs = 1j * dtau
    rhs = -1j * np.einsum("mab,mb->a", rep.betas, dmu)
    assert np.max(np.abs(lhs - rhs)) <= 1e-13


def test_rate_of_coordinate_time(rep, rng):
    p = random_timelike(rng)
    m = np.sqrt(minkowski_dot(p, p))
    E = abs(p[0])
    psi = ModeWavefunction(rep, ((PlaneWaveMode(tuple(p), Branch.PLUS, (1.0,) * rep.n_pol), 1.0),))
    x = rng.normal(size=4)
    d = 0.37
    v0 = psi.evaluate(x, 0.2)
    x1 = x + np.array([d, 0, 0, 0])
    v1 = psi.evaluate(x1, 0.2 + d * E / m)
    # along dx0/dtau = m/E the phase is stationary
    assert np.max(np.abs(v1 - v0)) <= 1e-13


def test_zero_branch_tau_independent(dkp_rep, rng):
    psi = random_mode_wavefunction(dkp_rep, rng, branches=[Branch.ZERO])
    x = rng.normal(size=(3, 4))
    assert np.array_equal(psi.evaluate(x, 0.0), psi.evaluate(x, 17.0))
    assert psi.evolve(2.0).to_dict() == psi.to_dict()


def test_evolve_reversible(rep, rng):
    psi = random_mode_wavefunction(rep, rng)
    back = psi.evolve(0.7).evolve(-0.7)
    for (m1, w1), (m2, w2) in zip(psi.modes, back.modes):
        assert m1 == m2 and abs(w1 - w2) <= 1e-15


def test_quasi_norm_tau_invariant(rep, rng):
    box = Box((2 * np.pi,) * 4)
    psi = random_mode_wavefunction(rep, rng, n_modes=5)
    q0 = psi.quasi_norm(0.0, box)
    for tau in (0.5, -3.0, 11.0):
        assert abs(psi.quasi_norm(tau, box) - q0) <= 1e-12 * max(1, abs(q0))
        assert abs(psi.evolve(tau).quasi_norm(0.0, box) - q0) <= 1e-12 * max(1, abs(q0))


def test_json_round_trip(rep, rng):
    psi = random_mode_wavefunction(rep, rng)
    d = json.loads(json.dumps(psi.to_dict()))
    back = ModeWavefunction.from_dict(d)
    assert back.rep.kind is rep.kind
    x = rng.normal(size=4)
    assert np.array_equal(back.evaluate(x, 0.4), psi.evaluate(x, 0.4))


def test_box_rejects_incommensurate(rep):
    box = Box((2 * np.pi,) * 4)
    psi = ModeWavefunction(rep, ((PlaneWaveMode((2.0, 0.5, 0, 0), Branch.PLUS, (1.0,) * rep.n_pol), 1.0),))
    with pytest.raises(IncommensurateModes):
        psi.quasi_norm(box=box)
    assert box.lattice_index(box.momentum((2, -1, 0, 1))) == (2, -1, 0, 1)


def test_wrong_polarization_count(rep):
    with pytest.raises(DimensionMismatch):
        ModeWavefunction(rep, ((PlaneWaveMode((2.0, 0, 0, 0), Branch.PLUS, (1.0,) * (rep.n_pol + 1)), 1.0),))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=4, max_size=4).filter(
    lambda p: p[0] ** 2 - p[1] ** 2 - p[2] ** 2 - p[3] ** 2 > 0.25))
def test_hypothesis_norm_relations(p):
    rep = build_representation(Kind.SPIN1)
    a = amplitudes(rep, p)
    assert np.max(np.abs(rep.bar(a.U) @ a.U - np.eye(3))) <= 1e-12
    assert np.max(np.abs(rep.bar(a.U) @ a.V)) <= 1e-12
