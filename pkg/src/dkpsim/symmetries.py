"""Discrete symmetries C, P, T and TPC acting on mode lists and grids.

Each operation has the form ``psi'(x, tau) = M psi^(*)(R x, s tau)``:

====  ========  =================  =========  ===========  ================
op    conj      reflection R       tau sign   charge sign  potential map
====  ========  =================  =========  ===========  ================
C     yes       none               -1         -1           A
P     no        x -> (x0, -x)      +1         +1           (A0, -A)(R x)
T     yes       x -> (-x0, x)      +1         +1           (A0, -A)(R x)
TPC   no        x -> -x            -1         +1           -A(R x)
====  ========  =================  =========  ===========  ================

For the DKP kinds every beta is purely imaginary, so ``M = 1`` for C,
``M = eta0`` for P and T and ``M = 1`` for TPC. The Dirac kind uses the
matrices ``i gamma^2`` (C), ``gamma^0`` (P), ``i gamma^1 gamma^3 gamma^5``
(T) and their composition for TPC. The extra ``gamma^5`` in T is needed
because tau is held fixed, so the image must carry the opposite tau
frequency.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .algebra import Representation, gamma5
from .errors import GridMismatch
from .evolution import GridWavefunction, _check_grid, check_same_rep
from .states import Branch, ModeWavefunction, PlaneWaveMode, amplitudes, omega


class SymmetryKind(str, enum.Enum):
    C = "C"
    P = "P"
    T = "T"
    TPC = "TPC"


@dataclass(frozen=True)
class SymmetryOp:
    kind: SymmetryKind
    conjugate: bool
    reflect: tuple  # coordinate axes with x -> -x
    tau_sign: int
    charge_sign: int
    flip_vector: bool  # spatial components of A change sign
    negate_potential: bool

    def matrix(self, rep: Representation) -> np.ndarray:
        return symmetry_matrices(rep)[self.kind]

    def momentum(self, p) -> np.ndarray:
        """Label of the image of ``exp(i p.x)``."""
        p = np.asarray(p, dtype=float).copy()
        if self.conjugate:
            p = -p
        p[list(self.reflect)] *= -1
        return p


OPS = {
    SymmetryKind.C: SymmetryOp(SymmetryKind.C, True, (), -1, -1, False, False),
    SymmetryKind.P: SymmetryOp(SymmetryKind.P, False, (1, 2, 3), 1, 1, True, False),
    SymmetryKind.T: SymmetryOp(SymmetryKind.T, True, (0,), 1, 1, True, False),
    SymmetryKind.TPC: SymmetryOp(SymmetryKind.TPC, False, (0, 1, 2, 3), -1, 1, False, True),
}


def get_op(kind) -> SymmetryOp:
    return OPS[SymmetryKind(kind)]


@functools.lru_cache(maxsize=None)
def symmetry_matrices(rep: Representation) -> dict:
    """Matrix factor of each operation for ``rep``."""
    eta = rep.eta0
    if rep.kind.is_dkp:
        eye = np.eye(rep.dim, dtype=complex)
        return {SymmetryKind.C: eye, SymmetryKind.P: eta.astype(complex),
                SymmetryKind.T: eta.astype(complex), SymmetryKind.TPC: eye}
    g = rep.betas
    # betas hold gamma_mu; the upper-index matrices differ by a sign on the spatial ones
    g1, g2, g3 = -g[1], -g[2], -g[3]
    c = 1j * g2
    p = g[0].astype(complex)
    t = 1j * g1 @ g3 @ gamma5(rep)
    # TPC = T o P o C acting as psi -> t conj(p conj(c psi*)) = t p* c psi
    tpc = t @ p.conj() @ c
    return {SymmetryKind.C: c, SymmetryKind.P: p, SymmetryKind.T: t, SymmetryKind.TPC: tpc}


def intertwining_residual(rep: Representation, kind) -> float:
    """How far ``M`` is from mapping solutions to solutions of the transformed equation."""
    op = get_op(kind)
    M = op.matrix(rep)
    worst = 0.0
    for mu in range(4):
        b = rep.betas[mu]
        bb = b.conj() if op.conjugate else b
        # need s_mu beta_mu M = (omega'/omega) M beta_mu^(*), with p'^mu = s_mu p^mu
        s_mu = -1.0 if (mu in op.reflect) ^ op.conjugate else 1.0
        om_sign = _image_omega(op, 1.0)
        lhs = s_mu * b @ M
        rhs = om_sign * M @ bb
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def _image_omega(op: SymmetryOp, om: float) -> float:
    # conjugation flips the tau phase, tau reversal flips it back
    flips = int(op.conjugate) + int(op.tau_sign < 0)
    return om if flips % 2 == 0 else -om


def _branch_for(rep: Representation, p, target: float) -> Branch:
    best = min(Branch, key=lambda br: abs(omega(rep, p, br) - target)
               if amplitudes(rep, p).basis(br).shape[1] else np.inf)
    return best


def _apply_modes(op: SymmetryOp, psi: ModeWavefunction) -> ModeWavefunction:
    rep = psi.rep
    M = op.matrix(rep)
    out = []
    for m, w in psi.modes:
        a = w * m.spinor(rep)
        a = M @ (a.conj() if op.conjugate else a)
        p2 = op.momentum(m.p)
        br = _branch_for(rep, p2, _image_omega(op, m.omega(rep)))
        amp = amplitudes(rep, p2)
        pol = amp.sign(br) * (rep.bar(amp.basis(br)) @ a)
        out.append((PlaneWaveMode(tuple(p2), br, tuple(pol)), 1.0))
    return ModeWavefunction(rep, tuple(out))


def reflect_grid(data: np.ndarray, axes) -> np.ndarray:
    """Index map ``n -> -n mod N`` on the given axes."""
    for ax in axes:
        data = np.roll(np.flip(data, axis=ax), 1, axis=ax)
    return data


def _apply_grid(op: SymmetryOp, psi: GridWavefunction) -> GridWavefunction:
    M = op.matrix(psi.rep)
    d = psi.data.conj() if op.conjugate else psi.data
    d = reflect_grid(d, op.reflect) @ M.T
    return psi.with_data(d, op.tau_sign * psi.tau)


def apply_symmetry(kind, psi: Union[ModeWavefunction, GridWavefunction]):
    """Image of a wavefunction. Grid images carry the transformed tau label."""
    op = get_op(kind)
    if isinstance(psi, ModeWavefunction):
        return _apply_modes(op, psi)
    if isinstance(psi, GridWavefunction):
        return _apply_grid(op, psi)
    raise TypeError(f"cannot apply a symmetry to {type(psi).__name__}")


def transform_potential(kind, potential: np.ndarray, q: float) -> tuple[np.ndarray, float]:
    """``(A', q')`` under which the image of a solution is again a solution."""
    op = get_op(kind)
    A = reflect_grid(np.asarray(potential, dtype=float), op.reflect)
    if op.flip_vector:
        A = A * np.array([1.0, -1.0, -1.0, -1.0])
    if op.negate_potential:
        A = -A
    return A, op.charge_sign * q


def transform_dtau(kind, dtau: float) -> float:
    return get_op(kind).tau_sign * dtau


def generator(psi: GridWavefunction, potential: Optional[np.ndarray] = None, q: float = 0.0) -> np.ndarray:
    """``beta.(p + q A) psi`` with the momentum part applied spectrally."""
    axes = (0, 1, 2, 3)
    rep = psi.rep
    hat = np.fft.fftn(psi.data, axes=axes)
    p = psi.spec.momenta()
    out = np.fft.ifftn(np.einsum("...m,mab,...b->...a", p, rep.betas, hat, optimize=True), axes=axes)
    if potential is not None and q != 0:
        A = _check_grid(psi, potential, "potential")
        out = out + q * np.einsum("...m,mab,...b->...a", A, rep.betas, psi.data, optimize=True)
    return out


def residual(rep: Representation, psi_a: GridWavefunction, psi_b: GridWavefunction,
             potential: Optional[np.ndarray] = None, q: float = 0.0) -> float:
    """Relative residual of ``beta_mu (i d^mu - q A^mu) psi + i d_tau psi = 0``.

    The tau derivative is the centered difference between the two states and
    the spatial part is evaluated at their midpoint, so the floor is
    ``O((omega dtau)^2) + O(eps / (omega dtau))``. The result is normalized by
    the largest entry of ``i d_tau psi``.
    """
    check_same_rep(psi_a, psi_b)
    if psi_a.rep is not rep:
        raise GridMismatch("states do not use the given representation")
    dtau = psi_b.tau - psi_a.tau
    if dtau == 0:
        raise GridMismatch("the two states must sit at different tau")
    mid = psi_a.with_data(0.5 * (psi_a.data + psi_b.data))
    dt = 1j * (psi_b.data - psi_a.data) / dtau
    r = dt - generator(mid, potential, q)
    scale = max(float(np.max(np.abs(dt))), float(np.max(np.abs(generator(mid, potential, q)))), 1e-300)
    return float(np.max(np.abs(r))) / scale
