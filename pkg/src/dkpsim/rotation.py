"""Rotation operators on spinors, their eigenbases, and the exchange phase."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import block_diag

from .algebra import Kind, Representation, gamma5, u_matrices
from .errors import BadAngles, DimensionMismatch, NotUnit, UnsupportedLabel

UNIT_TOL = 1e-12


def _unit(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.shape != (3,) or abs(np.linalg.norm(s) - 1) > UNIT_TOL:
        raise NotUnit(f"rotation axis must be a unit 3-vector, got {s.tolist()}")
    return s


def v_matrices() -> np.ndarray:
    """``V_j = i U_j``; each is Hermitian with eigenvalues -1, 0, 1."""
    return 1j * u_matrices()


def axis_generator(s) -> np.ndarray:
    """``s.V``, which acts on a 3-vector as ``v -> i s x v``."""
    return np.tensordot(_unit(s), v_matrices(), axes=1)


def _spectral_exp(G: np.ndarray, theta: float) -> np.ndarray:
    # G^3 = G with spectrum {-1, 0, 1}: sum of e^{i l theta} over spectral projectors
    G2 = G @ G
    eye = np.eye(G.shape[0])
    p0 = eye - G2
    pp = (G2 + G) / 2
    pm = (G2 - G) / 2
    return p0 + cmath.exp(1j * theta) * pp + cmath.exp(-1j * theta) * pm


def dirac_generator(rep: Representation, s) -> np.ndarray:
    """``gamma^0 slashed(s) gamma^5`` for the pure-space vector s = (0, s); squares to 1."""
    s4 = np.array([0.0, *_unit(s)])
    return rep.betas[0] @ rep.slashed(s4) @ gamma5(rep)


@dataclass(frozen=True, eq=False)
class RotationOperator:
    rep: Representation
    s: np.ndarray
    theta: float
    matrix: np.ndarray


def rotation_operator(rep: Representation, s, theta: float) -> RotationOperator:
    """O(s, theta) acting on spinors of ``rep``.

    For the DKP kinds the operator is exp(i theta s.V) on each spatial
    3-vector block and 1 on the scalar slots. For Dirac it is
    ``exp((i/2) theta gamma^0 slashed(s) gamma^5)``.
    """
    s = _unit(s)
    if rep.kind is Kind.DIRAC:
        G = dirac_generator(rep, s)
        M = math.cos(theta / 2) * np.eye(4) + 1j * math.sin(theta / 2) * G
    else:
        R = _spectral_exp(axis_generator(s), theta)
        if rep.kind is Kind.SPIN1:
            M = block_diag(np.eye(1), R, R, R)
        else:
            M = block_diag(np.eye(1), R, np.eye(1))
    return RotationOperator(rep, s, float(theta), M.astype(complex))


def _fix_phase(v: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    for c in v:
        if abs(c) > tol:
            return v * (abs(c) / c)
    return v


def axis_eigenvectors(s) -> dict[int, np.ndarray]:
    """Unit eigenvectors ``v_l`` of ``i s x v = l v`` for l in (0, -1, +1).

    Phase convention: the first component with modulus above 1e-10 is real
    and positive.
    """
    G = axis_generator(s)
    w, Q = np.linalg.eigh(G)
    out = {}
    for l in (0, -1, 1):
        j = int(np.argmin(np.abs(w - l)))
        out[l] = _fix_phase(Q[:, j])
    return out


@dataclass(frozen=True, eq=False)
class RotationEigenbasis:
    rep: Representation
    s: np.ndarray
    X: np.ndarray
    labels: tuple  # Fraction per column

    def column(self, d: int) -> np.ndarray:
        """Column ``chi_d`` with 1-based ``d`` as in the usual labelling."""
        return self.X[:, d - 1]


def eigenbasis(rep: Representation, s) -> RotationEigenbasis:
    """Orthonormal eigenbasis X of O(s, theta) with one label ``l_d`` per column.

    Spin-1 columns: the scalar slot, then v0, v-1, v+1 placed in the A, e, b
    blocks in turn. Spin-0 columns: scalar, v0, last slot, v-1, v+1. Dirac:
    two columns for l = +1/2 then two for l = -1/2, obtained by projecting
    the standard basis and orthonormalizing.
    """
    s = _unit(s)
    if rep.kind is Kind.DIRAC:
        G = dirac_generator(rep, s)
        cols, labels = [], []
        for l in (Fraction(1, 2), Fraction(-1, 2)):
            P = 0.5 * np.eye(4) + float(l) * G
            # rank-2 projector: Gram-Schmidt over its columns
            basis = []
            for j in range(4):
                v = P[:, j].copy()
                for b in basis:
                    v -= (b.conj() @ v) * b
                if np.linalg.norm(v) > 1e-6:
                    basis.append(_fix_phase(v / np.linalg.norm(v)))
                if len(basis) == 2:
                    break
            cols += basis
            labels += [l, l]
        X = np.column_stack(cols)
        return RotationEigenbasis(rep, s, X, tuple(labels))

    v = axis_eigenvectors(s)
    cols, labels = [], []
    e0 = np.zeros(rep.dim, dtype=complex)
    e0[0] = 1
    cols.append(e0)
    labels.append(Fraction(0))
    if rep.kind is Kind.SPIN1:
        for l in (0, -1, 1):
            for blk in range(3):
                c = np.zeros(10, dtype=complex)
                c[1 + 3 * blk: 4 + 3 * blk] = v[l]
                cols.append(c)
                labels.append(Fraction(l))
    else:
        def mid(vec):
            return np.concatenate([[0], vec, [0]])
        e4 = np.zeros(5, dtype=complex)
        e4[4] = 1
        cols += [mid(v[0]), e4, mid(v[-1]), mid(v[1])]
        labels += [Fraction(0), Fraction(0), Fraction(-1), Fraction(1)]
    return RotationEigenbasis(rep, s, np.column_stack(cols), tuple(labels))


def expand(rep: Representation, basis: RotationEigenbasis, zeta) -> np.ndarray:
    """Coefficients ``K_d = chi_d^dagger zeta``."""
    zeta = np.asarray(zeta, dtype=complex)
    if zeta.shape != (rep.dim,) or basis.X.shape[0] != rep.dim:
        raise DimensionMismatch(f"expected a {rep.dim}-spinor, got shape {zeta.shape}")
    return basis.X.conj().T @ zeta


ALLOWED_LABELS = {Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2)}


def parse_label(l) -> Fraction:
    """Accept ints, Fractions, floats and strings like ``"1/2"`` or ``"half"``."""
    if isinstance(l, str) and l.strip().lower() in {"half", "+half"}:
        return Fraction(1, 2)
    if isinstance(l, str) and l.strip().lower() == "-half":
        return Fraction(-1, 2)
    try:
        f = Fraction(l).limit_denominator(1000) if isinstance(l, float) else Fraction(l)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise UnsupportedLabel(f"cannot read spin label {l!r}") from exc
    if f not in ALLOWED_LABELS:
        raise UnsupportedLabel(f"spin label {l!r} not in {{0, +-1, +-1/2}}")
    return f


def exchange_phase(l) -> complex:
    """``exp(2 pi i l)``: +1 for integer labels, -1 for half-odd-integer ones."""
    f = parse_label(l)
    return complex(1.0) if f.denominator == 1 else complex(-1.0)


def jabs_construct(zeta0, phi0, k, l, kappa: float, xi: float, normalize: bool = True):
    """Two-particle state at tau = 0 from two rotational eigenstates.

    Starts from ``e^{ik kappa} zeta0 (x) e^{il xi} phi0 + e^{il kappa} phi0 (x) e^{ik xi} zeta0``,
    rotates the second summand anticlockwise by ``kappa - xi`` and then by
    ``2 pi - kappa + xi``, tracking the phases literally. The result is
    ``e^{ik kappa} zeta0 (x) e^{il xi} phi0 + e^{2 pi i l} e^{il xi} phi0 (x) e^{ik kappa} zeta0``.
    """
    from .multiparticle import Symmetry, TwoParticleState

    kf, lf = parse_label(k), parse_label(l)
    for name, a in (("kappa", kappa), ("xi", xi)):
        if not 0 <= a <= 2 * math.pi:
            raise BadAngles(f"{name}={a} outside [0, 2 pi]")
    if kappa <= xi:
        raise BadAngles("construction assumes kappa > xi; swap the particle labels")
    kv, lv = float(kf), float(lf)

    # preliminary summands: (phase on the x slot, phase on the y slot)
    first = (cmath.exp(1j * kv * kappa), cmath.exp(1j * lv * xi))
    second = [cmath.exp(1j * lv * kappa), cmath.exp(1j * kv * xi)]
    # xi -> kappa on the zeta0 factor of the second summand
    second[1] *= cmath.exp(1j * kv * (kappa - xi))
    # kappa -> xi on the phi0 factor the long way round, 2 pi - kappa + xi, so the two turns close a circle
    second[0] *= cmath.exp(1j * lv * (2 * math.pi - kappa + xi))

    w1 = first[0] * first[1]
    w2 = second[0] * second[1]
    # the symmetry tag is fixed by the net relative phase e^{2 pi i l}
    sign = exchange_phase(lf).real
    tag = Symmetry.SYMMETRIC if sign > 0 else Symmetry.ANTISYMMETRIC
    state = TwoParticleState.from_products(
        zeta0.rep, [(w1, zeta0, phi0), (w2, phi0, zeta0)], tag)
    return state.normalized() if normalize else state
