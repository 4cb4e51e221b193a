"""Plane-wave amplitudes, spectral projections and exact mode-list wavefunctions.

For a timelike momentum ``p`` the slashed momentum ``S = beta.p`` has
eigenvalues ``+phi_p m_p`` (u branch), ``-phi_p m_p`` (v branch) and 0
(z branch). Each branch carries a basis matrix ``B`` with
``B^bar B = sigma I`` where ``sigma`` is the sign of the invariant form on
that eigenspace (+1 for u and v of the DKP kinds, -1 for z and for the Dirac
v branch). Then ``Lambda = sigma B B^bar`` is the branch projection and
``c = sigma B^bar a`` the branch coefficients of a spinor ``a``.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .algebra import Kind, Representation, build_representation
from .errors import DimensionMismatch, IncommensurateModes, NotTimelike, RepMismatch
from .kinematics import MassClass, mass_shell, minkowski_dot

NORM = 1.0 / (2.0 * np.pi) ** 2


class Branch(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"
    ZERO = "zero"


def _rest_seeds(kind: Kind) -> dict[Branch, np.ndarray]:
    r2 = 1 / math.sqrt(2)
    if kind is Kind.SPIN1:
        I, Z = np.eye(3), np.zeros((3, 3))
        wp = r2 * np.vstack([np.zeros((1, 3)), I, -1j * I, Z])
        wm = r2 * np.vstack([np.zeros((1, 3)), I, 1j * I, Z])
        z0 = np.zeros((10, 4))
        z0[0, 0] = 1
        z0[7:, 1:] = I
    elif kind is Kind.SPIN0:
        wp = r2 * np.array([[1], [0], [0], [0], [1j]])
        wm = r2 * np.array([[1], [0], [0], [0], [-1j]])
        z0 = np.zeros((5, 3))
        z0[1:4] = np.eye(3)
    else:
        eye = np.eye(4)
        wp, wm, z0 = eye[:, :2], eye[:, 2:], np.zeros((4, 0))
    return {Branch.PLUS: wp.astype(complex), Branch.MINUS: wm.astype(complex),
            Branch.ZERO: z0.astype(complex)}


def _timelike(p) -> tuple[np.ndarray, float, int]:
    p = np.asarray(p, dtype=float)
    ms = mass_shell(p)
    if ms.cls is not MassClass.TIMELIKE:
        raise NotTimelike(f"momentum {p.tolist()} is {ms.cls.value}")
    return p, ms.m_p, ms.phi_p


def slashed(rep: Representation, p) -> np.ndarray:
    """``beta_mu p^mu`` (contravariant ``p``; no sign flip on the spatial part)."""
    return rep.slashed(p)


def projections(rep: Representation, p) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(Lambda_u, Lambda_v, Lambda_z)`` for timelike ``p``."""
    p, m, phi = _timelike(p)
    S = rep.slashed(p)
    eye = np.eye(rep.dim)
    S2 = S @ S
    lam_u = (S2 + phi * m * S) / (2 * m * m)
    lam_v = (S2 - phi * m * S) / (2 * m * m)
    lam_z = eye - S2 / (m * m)
    return lam_u, lam_v, lam_z


def _inv_sqrt_psd(G: np.ndarray) -> np.ndarray:
    w, Q = np.linalg.eigh(G)
    return (Q / np.sqrt(w)) @ Q.conj().T


@dataclass(frozen=True, eq=False)
class AmplitudeBlock:
    rep: Representation
    p: np.ndarray
    U: np.ndarray
    V: np.ndarray
    Zmat: np.ndarray
    signs: dict

    def basis(self, branch: Branch) -> np.ndarray:
        return {Branch.PLUS: self.U, Branch.MINUS: self.V, Branch.ZERO: self.Zmat}[Branch(branch)]

    def sign(self, branch: Branch) -> int:
        return self.signs[Branch(branch)]


@functools.lru_cache(maxsize=4096)
def _amplitudes_cached(rep: Representation, p: tuple) -> AmplitudeBlock:
    p_arr, _, _ = _timelike(p)
    lams = dict(zip((Branch.PLUS, Branch.MINUS, Branch.ZERO), projections(rep, p_arr)))
    seeds = _rest_seeds(rep.kind)
    blocks, signs = {}, {}
    for br in Branch:
        seed = seeds[br]
        if seed.shape[1] == 0:
            blocks[br], signs[br] = np.zeros((rep.dim, 0), dtype=complex), 1
            continue
        raw = lams[br] @ seed
        sig = int(np.sign((seed.conj().T @ rep.eta0 @ seed)[0, 0].real))
        G = sig * (raw.conj().T @ rep.eta0 @ raw)
        G = (G + G.conj().T) / 2
        B = raw @ _inv_sqrt_psd(G)
        # second pass removes the cancellation error of the first Gram matrix
        G = sig * (B.conj().T @ rep.eta0 @ B)
        B = B @ _inv_sqrt_psd((G + G.conj().T) / 2)
        B.setflags(write=False)
        blocks[br], signs[br] = B, sig
    p_ro = p_arr.copy()
    p_ro.setflags(write=False)
    return AmplitudeBlock(rep, p_ro, blocks[Branch.PLUS], blocks[Branch.MINUS],
                          blocks[Branch.ZERO], signs)


def amplitudes(rep: Representation, p) -> AmplitudeBlock:
    """Bar-orthonormal amplitude matrices u(p), v(p), z(p).

    Each block is the closed-form projection of its rest-frame seed,
    ``Lambda(p) w``, right-multiplied by the inverse square root of its Gram
    matrix so that ``u^bar u = v^bar v = I`` and ``z^bar z = -I`` hold exactly
    (the bare projection only satisfies them up to a p-dependent matrix).
    """
    return _amplitudes_cached(rep, tuple(float(c) for c in np.asarray(p, dtype=float)))


def decompose(rep: Representation, p, a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Branch coefficients ``(c_plus, c_minus, c_zero)`` with ``a = U c+ + V c- + Z c0``."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (rep.dim,):
        raise DimensionMismatch(f"expected a {rep.dim}-spinor, got shape {a.shape}")
    amp = amplitudes(rep, p)
    return tuple(amp.sign(br) * (rep.bar(amp.basis(br)) @ a) for br in Branch)


def omega(rep: Representation, p, branch: Branch) -> float:
    """Eigenvalue of ``beta.p`` on the branch; the mode's tau-dependence is ``exp(-i omega tau)``."""
    _, m, phi = _timelike(p)
    return {Branch.PLUS: phi * m, Branch.MINUS: -phi * m, Branch.ZERO: 0.0}[Branch(branch)]


def momentum_key(p) -> tuple:
    return tuple(float(c) for c in np.round(np.asarray(p, dtype=float), 9))


@dataclass(frozen=True)
class Box:
    """Periodic spacetime box used to integrate over one particle's coordinates."""
    extents: tuple

    def __post_init__(self):
        ext = tuple(float(e) for e in self.extents)
        if len(ext) != 4 or min(ext) <= 0:
            raise ValueError("box needs four positive extents")
        object.__setattr__(self, "extents", ext)

    @property
    def volume(self) -> float:
        return float(np.prod(self.extents))

    def lattice_index(self, p, tol: float = 1e-9) -> tuple:
        """Integer wave numbers of ``exp(i p.x)`` on this box."""
        k = np.asarray(p, dtype=float) * np.array([1.0, -1.0, -1.0, -1.0])
        n = k * np.asarray(self.extents) / (2 * np.pi)
        ni = np.rint(n)
        if np.max(np.abs(n - ni)) > tol:
            raise IncommensurateModes(f"momentum {np.asarray(p).tolist()} is not on the box lattice")
        return tuple(int(v) for v in ni)

    def momentum(self, n) -> np.ndarray:
        """Contravariant momentum whose plane wave has integer wave numbers ``n``."""
        k = 2 * np.pi * np.asarray(n, dtype=float) / np.asarray(self.extents)
        return k * np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class PlaneWaveMode:
    p: tuple
    branch: Branch
    pol: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(c) for c in self.p))
        object.__setattr__(self, "branch", Branch(self.branch))
        object.__setattr__(self, "pol", tuple(complex(c) for c in np.atleast_1d(self.pol)))

    @property
    def key(self) -> tuple:
        return (momentum_key(self.p), self.branch)

    def check(self, rep: Representation) -> None:
        _timelike(self.p)
        n = amplitudes(rep, self.p).basis(self.branch).shape[1]
        if len(self.pol) != n:
            raise DimensionMismatch(
                f"{self.branch.value} mode of {rep.kind.value} needs {n} polarization coefficients")

    def spinor(self, rep: Representation) -> np.ndarray:
        """Amplitude ``B pol`` without the (2 pi)^-2 factor."""
        return amplitudes(rep, self.p).basis(self.branch) @ np.asarray(self.pol)

    def omega(self, rep: Representation) -> float:
        return omega(rep, self.p, self.branch)

    def value(self, rep: Representation, x, tau: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        phase = np.exp(1j * (minkowski_dot(self.p, x) - self.omega(rep) * tau))
        return NORM * np.multiply.outer(phase, self.spinor(rep))


def _complex_pair(c) -> list:
    c = complex(c)
    return [c.real, c.imag]


def _from_pair(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex numbers are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


@dataclass(frozen=True, eq=False)
class ModeWavefunction:
    """A finite superposition ``sum_i w_i f_i(x, tau)`` of plane-wave modes.

    The object stands for the whole solution; ``evolve(dtau)`` returns the
    solution shifted so that its value at ``tau`` equals this one's at
    ``tau + dtau``.
    """
    rep: Representation
    modes: tuple = field(default=())

    def __post_init__(self):
        modes = tuple((m if isinstance(m, PlaneWaveMode) else PlaneWaveMode(*m), complex(w))
                      for m, w in self.modes)
        for m, _ in modes:
            m.check(self.rep)
        object.__setattr__(self, "modes", modes)

    def __len__(self):
        return len(self.modes)

    # -- cached arrays ----------------------------------------------------
    @cached_property
    def _p(self) -> np.ndarray:
        return np.array([m.p for m, _ in self.modes], dtype=float).reshape(-1, 4)

    @cached_property
    def _omega(self) -> np.ndarray:
        return np.array([m.omega(self.rep) for m, _ in self.modes], dtype=float)

    @cached_property
    def _amp(self) -> np.ndarray:
        """Rows ``w_i (2 pi)^-2 B_i pol_i``."""
        if not self.modes:
            return np.zeros((0, self.rep.dim), dtype=complex)
        return NORM * np.array([w * m.spinor(self.rep) for m, w in self.modes])

    @cached_property
    def _keys(self) -> list:
        return [momentum_key(m.p) for m, _ in self.modes]

    # -- evaluation ---------------------------------------------------------
    def evaluate(self, x, tau: float = 0.0) -> np.ndarray:
        """Spinor value at event(s) ``x`` (shape (..., 4)) -> (..., dim)."""
        x = np.asarray(x, dtype=float)
        phase = np.exp(1j * (np.tensordot(x, self._p * [1, -1, -1, -1], axes=([-1], [1]))
                             - self._omega * tau))
        return phase @ self._amp

    def derivative(self, x, tau: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        """Analytic ``(d^mu psi, d_tau psi)``; the first has shape (..., 4, dim)."""
        x = np.asarray(x, dtype=float)
        phase = np.exp(1j * (np.tensordot(x, self._p * [1, -1, -1, -1], axes=([-1], [1]))
                             - self._omega * tau))
        dmu = np.einsum("...i,im,id->...md", phase, 1j * self._p, self._amp)
        dtau = (phase * (-1j * self._omega)) @ self._amp
        return dmu, dtau

    # -- algebra --------------------------------------------------------------
    def scaled(self, c: complex) -> "ModeWavefunction":
        return ModeWavefunction(self.rep, tuple((m, w * c) for m, w in self.modes))

    def __add__(self, other: "ModeWavefunction") -> "ModeWavefunction":
        if other.rep is not self.rep:
            raise RepMismatch("cannot add wavefunctions of different representations")
        return ModeWavefunction(self.rep, self.modes + other.modes)

    def evolve(self, dtau: float) -> "ModeWavefunction":
        return ModeWavefunction(self.rep, tuple(
            (m, w * np.exp(-1j * om * dtau)) for (m, w), om in zip(self.modes, self._omega)))

    def pairing(self, other: "ModeWavefunction", tau: float = 0.0,
                box: Optional[Box] = None) -> complex:
        """Spacetime integral of ``psi^bar phi`` at parameter ``tau``.

        With ``box=None`` this is the spacetime mean (orthogonality of distinct
        momenta is exact); with a box it is the box integral, which requires
        lattice-commensurate momenta.
        """
        if other.rep is not self.rep:
            raise RepMismatch("pairing across representations")
        if box is not None:
            ka = [box.lattice_index(m.p) for m, _ in self.modes]
            kb = [box.lattice_index(m.p) for m, _ in other.modes]
            vol = box.volume
        else:
            ka, kb, vol = self._keys, other._keys, 1.0
        if not ka or not kb:
            return 0j
        same = np.array([[a == b for b in kb] for a in ka])
        gram = self._amp.conj() @ self.rep.eta0 @ other._amp.T
        phase = np.exp(1j * np.subtract.outer(self._omega, other._omega) * tau)
        return complex(vol * np.sum(same * gram * phase))

    def quasi_norm(self, tau: float = 0.0, box: Optional[Box] = None) -> complex:
        return self.pairing(self, tau, box)

    def normalized(self, box: Optional[Box] = None) -> "ModeWavefunction":
        n = self.quasi_norm(box=box).real
        if abs(n) < 1e-300:
            return self
        return self.scaled(1 / math.sqrt(abs(n)))

    # -- construction -----------------------------------------------------------
    @classmethod
    def from_spinor(cls, rep: Representation, p, a, weight: complex = 1.0) -> "ModeWavefunction":
        """Modes whose sum is ``weight * a exp(i p.x) (2 pi)^-2`` at tau = 0."""
        coeffs = decompose(rep, p, a)
        modes = []
        for br, c in zip(Branch, coeffs):
            if c.size and np.max(np.abs(c)) > 0:
                modes.append((PlaneWaveMode(tuple(p), br, tuple(c)), weight))
        return cls(rep, tuple(modes))

    def to_dict(self) -> dict:
        return {
            "rep": self.rep.kind.value,
            "modes": [{"p": list(m.p), "branch": m.branch.value,
                       "pol": [_complex_pair(c) for c in m.pol],
                       "weight": _complex_pair(w)} for m, w in self.modes],
        }

    @classmethod
    def from_dict(cls, d: dict, rep: Optional[Representation] = None) -> "ModeWavefunction":
        rep = rep or build_representation(d["rep"])
        modes = []
        for md in d["modes"]:
            pol = tuple(_from_pair(c) for c in md["pol"])
            modes.append((PlaneWaveMode(tuple(md["p"]), md["branch"], pol),
                          _from_pair(md.get("weight", 1.0))))
        return cls(rep, tuple(modes))


def random_lattice_momentum(rng: np.random.Generator, box: Box, nmax: int = 2,
                            min_mass: float = 0.5) -> np.ndarray:
    """A timelike momentum on the box lattice with wave numbers in [-nmax, nmax]."""
    while True:
        n = rng.integers(-nmax, nmax + 1, size=4)
        p = box.momentum(n)
        if minkowski_dot(p, p) >= min_mass ** 2:
            return p


def random_mode_wavefunction(rep: Representation, rng: np.random.Generator,
                             n_modes: int = 3, box: Optional[Box] = None,
                             branches: Sequence[Branch] = tuple(Branch),
                             nmax: int = 2) -> ModeWavefunction:
    """Random superposition of lattice modes (lattice of ``box``, default extents 2 pi)."""
    box = box or Box((2 * np.pi,) * 4)
    branches = [b for b in branches if not (b is Branch.ZERO and rep.n_zero_modes == 0)]
    modes = []
    for _ in range(n_modes):
        p = random_lattice_momentum(rng, box, nmax)
        br = Branch(branches[rng.integers(len(branches))])
        n = rep.n_zero_modes if br is Branch.ZERO else rep.n_pol
        pol = rng.normal(size=n) + 1j * rng.normal(size=n)
        modes.append((PlaneWaveMode(tuple(p), br, tuple(pol)), complex(1.0)))
    return ModeWavefunction(rep, tuple(modes))

