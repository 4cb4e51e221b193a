"""Matrix representations of the meson algebra and their identities.

Three representations are provided:

* ``Kind.SPIN1`` -- the 10-dimensional DKP representation acting on
  ``(A0, A1, A2, A3, e1, e2, e3, b1, b2, b3)``.
* ``Kind.SPIN0`` -- the 5-dimensional DKP representation acting on
  ``(d0 rho, d1 rho, d2 rho, d3 rho, -m rho)``.
* ``Kind.DIRAC`` -- Dirac-basis gamma matrices, used for the spin-1/2
  comparison. ``betas`` holds the covariant matrices ``gamma_mu`` so that
  ``betas[mu] * p^mu`` is the slashed momentum for every kind.

All matrix entries are Gaussian integers, so identity checks can be run in
exact integer arithmetic.
"""
from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BadIndices, CommutatorMismatch, DimensionMismatch, RepMismatch

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


class Kind(str, enum.Enum):
    SPIN1 = "spin1"
    SPIN0 = "spin0"
    DIRAC = "dirac"

    @property
    def is_dkp(self) -> bool:
        return self is not Kind.DIRAC


def levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3), dtype=int)
    for perm in itertools.permutations(range(3)):
        # sign of the permutation from its inversion count
        inv = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        eps[perm] = -1 if inv % 2 else 1
    return eps


def u_matrices() -> np.ndarray:
    """``(U_j)_{kl} = -eps^{jkl}``, shape (3, 3, 3)."""
    return -levi_civita()


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Representation:
    kind: Kind
    dim: int
    betas: np.ndarray  # (4, dim, dim), covariant index
    eta0: np.ndarray

    def __repr__(self) -> str:
        return f"Representation({self.kind.value}, dim={self.dim})"

    @property
    def n_zero_modes(self) -> int:
        """Number of tau-independent polarizations per momentum."""
        return {Kind.SPIN1: 4, Kind.SPIN0: 3, Kind.DIRAC: 0}[self.kind]

    @property
    def n_pol(self) -> int:
        """Polarizations per mass sign."""
        return {Kind.SPIN1: 3, Kind.SPIN0: 1, Kind.DIRAC: 2}[self.kind]

    def slashed(self, p) -> np.ndarray:
        """``beta_mu p^mu`` for a contravariant four-vector (or a batch of them).

        A batch of shape (..., 4) returns (..., dim, dim).
        """
        p = np.asarray(p, dtype=float)
        return np.tensordot(p, self.betas, axes=([-1], [0]))

    def bar(self, psi) -> np.ndarray:
        """Dirac-style adjoint ``psi^dagger eta0`` (works on columns of a matrix)."""
        psi = np.asarray(psi)
        return psi.conj().T @ self.eta0

    def check_spinor(self, psi) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        if psi.shape[0] != self.dim:
            raise DimensionMismatch(
                f"spinor has {psi.shape[0]} components, representation needs {self.dim}")
        return psi


def _spin1_betas() -> np.ndarray:
    b = np.zeros((4, 10, 10), dtype=complex)
    for k in range(3):
        b[0, 1 + k, 4 + k] = 1j
        b[0, 4 + k, 1 + k] = -1j
    U = u_matrices()
    for j in range(3):
        b[j + 1, 0, 4 + j] = 1j
        b[j + 1, 4 + j, 0] = 1j
        b[j + 1, 1:4, 7:10] = 1j * U[j]
        b[j + 1, 7:10, 1:4] = -1j * U[j]
    return b


def _spin0_betas() -> np.ndarray:
    b = np.zeros((4, 5, 5), dtype=complex)
    b[0, 0, 4] = -1j
    b[0, 4, 0] = 1j
    for j in range(1, 4):
        b[j, j, 4] = 1j
        b[j, 4, j] = 1j
    return b


PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def _dirac_gammas_upper() -> np.ndarray:
    g = np.zeros((4, 4, 4), dtype=complex)
    g[0] = np.diag([1, 1, -1, -1])
    for j in range(3):
        g[j + 1, :2, 2:] = PAULI[j]
        g[j + 1, 2:, :2] = -PAULI[j]
    return g


@functools.lru_cache(maxsize=None)
def build_representation(kind) -> Representation:
    """Return the (cached, immutable) representation for ``kind``."""
    kind = Kind(kind)
    if kind is Kind.SPIN1:
        betas = _spin1_betas()
        eta0 = 2 * betas[0] @ betas[0] - np.eye(10)
    elif kind is Kind.SPIN0:
        betas = _spin0_betas()
        eta0 = 2 * betas[0] @ betas[0] - np.eye(5)
    else:
        upper = _dirac_gammas_upper()
        betas = np.einsum("mn,nab->mab", METRIC, upper).astype(complex)
        eta0 = upper[0].copy()
    eta0 = eta0.astype(complex)
    return Representation(kind, betas.shape[1], _readonly(betas), _readonly(eta0))


def gamma5(rep: Representation) -> np.ndarray:
    if rep.kind is not Kind.DIRAC:
        raise RepMismatch("gamma5 is only defined for the Dirac representation")
    up = np.einsum("mn,nab->mab", METRIC, rep.betas)
    return 1j * up[0] @ up[1] @ up[2] @ up[3]


# -- exact Gaussian-integer arithmetic ---------------------------------------

def gaussian_parts(m) -> tuple[np.ndarray, np.ndarray]:
    """Split a complex array with Gaussian-integer entries into integer parts."""
    m = np.asarray(m)
    re = np.rint(m.real).astype(np.int64)
    im = np.rint(m.imag).astype(np.int64)
    if not (np.array_equal(re, m.real) and np.array_equal(im, m.imag)):
        raise ValueError("matrix entries are not Gaussian integers")
    return re, im


def _gi_mul(a, b):
    return a[0] @ b[0] - a[1] @ b[1], a[0] @ b[1] + a[1] @ b[0]


def _gi_add(a, b, s=1):
    return a[0] + s * b[0], a[1] + s * b[1]


def _gi_scale(a, c: int):
    return a[0] * c, a[1] * c


def _gi_maxabs(a) -> float:
    return float(np.max(np.abs(a[0] + 1j * a[1]))) if a[0].size else 0.0


@dataclass(frozen=True)
class MesonReport:
    residual: float
    worst: tuple[int, int, int]
    exact: bool


def _require_dkp(rep: Representation) -> None:
    if not rep.kind.is_dkp:
        raise RepMismatch(f"{rep.kind.value} is not a DKP representation")


def check_meson_algebra(rep: Representation, exact: bool = True) -> MesonReport:
    """Max residual of ``b_l b_m b_n + b_n b_m b_l - b_l g_mn - b_n g_ml``.

    With ``exact=True`` the products are formed in integer arithmetic and the
    residual is an integer (0 for a valid representation).
    """
    _require_dkp(rep)
    g = METRIC.astype(int)
    worst, worst_idx = -1.0, (0, 0, 0)
    if exact:
        B = [gaussian_parts(b) for b in rep.betas]
    for lam, mu, nu in itertools.product(range(4), repeat=3):
        if exact:
            t = _gi_add(_gi_mul(_gi_mul(B[lam], B[mu]), B[nu]),
                        _gi_mul(_gi_mul(B[nu], B[mu]), B[lam]))
            t = _gi_add(t, _gi_scale(B[lam], int(g[mu, nu])), -1)
            t = _gi_add(t, _gi_scale(B[nu], int(g[mu, lam])), -1)
            r = _gi_maxabs(t)
        else:
            b = rep.betas
            t = (b[lam] @ b[mu] @ b[nu] + b[nu] @ b[mu] @ b[lam]
                 - b[lam] * g[mu, nu] - b[nu] * g[mu, lam])
            r = float(np.max(np.abs(t)))
        if r > worst:
            worst, worst_idx = r, (lam, mu, nu)
    return MesonReport(worst, worst_idx, exact)


def check_clifford_algebra(rep: Representation) -> float:
    """Max residual of ``{g_mu, g_nu} - 2 g_mu_nu`` (Dirac kind)."""
    b, eye = rep.betas, np.eye(rep.dim)
    return max(float(np.max(np.abs(b[m] @ b[n] + b[n] @ b[m] - 2 * METRIC[m, n] * eye)))
               for m in range(4) for n in range(4))


def eta_identities(rep: Representation) -> dict[str, float]:
    """Residuals of the eta0 identities, computed in exact integer arithmetic.

    Keys: ``eta0_def`` (eta0 = 2 b0^2 - 1), ``eta0_sq`` (eta0^2 = 1),
    ``eta_b0_left``/``eta_b0_right`` (eta0 b0 = b0 eta0 = b0),
    ``eta_bj_anticomm`` (eta0 bj + bj eta0 = 0),
    ``eta_bj_adjoint`` (eta0 bj = bj^dagger eta0).
    """
    _require_dkp(rep)
    E = gaussian_parts(rep.eta0)
    B = [gaussian_parts(b) for b in rep.betas]
    eye = (np.eye(rep.dim, dtype=np.int64), np.zeros((rep.dim, rep.dim), dtype=np.int64))
    out = {
        "eta0_def": _gi_maxabs(_gi_add(E, _gi_add(_gi_scale(_gi_mul(B[0], B[0]), 2), eye, -1), -1)),
        "eta0_sq": _gi_maxabs(_gi_add(_gi_mul(E, E), eye, -1)),
        "eta_b0_left": _gi_maxabs(_gi_add(_gi_mul(E, B[0]), B[0], -1)),
        "eta_b0_right": _gi_maxabs(_gi_add(_gi_mul(B[0], E), B[0], -1)),
    }
    anti, adj = 0.0, 0.0
    for j in range(1, 4):
        anti = max(anti, _gi_maxabs(_gi_add(_gi_mul(E, B[j]), _gi_mul(B[j], E))))
        bdag = (B[j][0].T, -B[j][1].T)
        adj = max(adj, _gi_maxabs(_gi_add(_gi_mul(E, B[j]), _gi_mul(bdag, E), -1)))
    out["eta_bj_anticomm"] = anti
    out["eta_bj_adjoint"] = adj
    return out


def hermiticity(rep: Representation) -> dict[str, float]:
    """b0 Hermitian and antisymmetric, bj anti-Hermitian and symmetric."""
    b = rep.betas
    return {
        "b0_hermitian": float(np.max(np.abs(b[0] - b[0].conj().T))),
        "b0_antisymmetric": float(np.max(np.abs(b[0] + b[0].T))),
        "bj_antihermitian": max(float(np.max(np.abs(b[j] + b[j].conj().T))) for j in (1, 2, 3)),
        "bj_symmetric": max(float(np.max(np.abs(b[j] - b[j].T))) for j in (1, 2, 3)),
    }


def beta0_multiplicities(rep: Representation, tol: float = 1e-9) -> dict[str, int]:
    """Eigenvalue multiplicities of the (Hermitian) matrix b0."""
    ev = np.linalg.eigvalsh(rep.betas[0])
    out: dict[str, int] = {}
    for e in ev:
        key = str(int(np.rint(e))) if abs(e - np.rint(e)) < tol else f"{e:.6g}"
        out[key] = out.get(key, 0) + 1
    return dict(sorted(out.items(), key=lambda kv: float(kv[0])))


LORENTZ_PAIRS = [(m, n) for m in range(4) for n in range(m + 1, 4)]


def commutator(a, b):
    return a @ b - b @ a


def lorentz_generators(rep: Representation, tol: float = 1e-12) -> dict[tuple[int, int], np.ndarray]:
    """``r_mn = 2i [b_m, b_n]`` for m < n, checked against ``[b_l, r_mn]``.

    Raises CommutatorMismatch when ``[b_l, r_mn] - 2i(g_lm b_n - g_ln b_m)``
    exceeds ``tol`` for any index triple.
    """
    _require_dkp(rep)
    b = rep.betas
    gens = {(m, n): 2j * commutator(b[m], b[n]) for m, n in LORENTZ_PAIRS}
    res = generator_residual(rep, gens)
    if res > tol:
        raise CommutatorMismatch(f"[beta, r] relation violated, residual {res:.3e}")
    return gens


def generator_residual(rep: Representation, gens) -> float:
    b = rep.betas
    worst = 0.0
    for (m, n), r in gens.items():
        for lam in range(4):
            t = commutator(b[lam], r) - 2j * (METRIC[lam, m] * b[n] - METRIC[lam, n] * b[m])
            worst = max(worst, float(np.max(np.abs(t))))
    return worst


def bilinear(rep: Representation, psi, phi) -> complex:
    """Invariant form ``psi^dagger eta0 phi``."""
    psi = rep.check_spinor(psi)
    phi = rep.check_spinor(phi)
    if psi.shape != phi.shape:
        raise DimensionMismatch("spinors have different shapes")
    return complex(psi.conj() @ rep.eta0 @ phi)


def angular_momentum_matrix(rep: Representation, mu: int, nu: int) -> np.ndarray:
    """Spin part ``(1/i)(b_mu b_nu - b_nu b_mu)`` of the angular momentum."""
    if mu == nu or not (0 <= mu < 4 and 0 <= nu < 4):
        raise BadIndices(f"need distinct indices in 0..3, got ({mu}, {nu})")
    b = rep.betas
    return -1j * commutator(b[mu], b[nu])
