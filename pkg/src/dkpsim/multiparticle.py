"""Two-particle mode-list states, exchange symmetry, currents and conserved observables.

A state is a finite sum ``sum_t w_t f_t(x) g_t(y)`` of products of plane-wave
modes. Values are ``dim x dim`` matrices with the first index belonging to
the particle at ``x``. The invariant form is ``Psi^bar = Psi^dagger (eta0 x eta0)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .algebra import LORENTZ_PAIRS, Representation, angular_momentum_matrix, build_representation
from .errors import NullState, RepMismatch, SymmetryViolation
from .kinematics import minkowski_dot
from .states import NORM, Box, ModeWavefunction, PlaneWaveMode, momentum_key

__all__ = [
    "Symmetry", "Slot", "TwoParticleState", "tensor_state", "symmetrize",
    "evolve_two_particle", "currents", "cross_current", "conservation_residual",
    "marginal_current", "energy_momentum_expectation", "spin_expectation",
    "angular_momentum_matrix", "SWAP_TOL",
]

SWAP_TOL = 1e-12
NULL_TOL = 1e-300


class Symmetry(str, enum.Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"
    NONE = "none"

    @property
    def sign(self) -> Optional[int]:
        return {Symmetry.SYMMETRIC: 1, Symmetry.ANTISYMMETRIC: -1}.get(self)


class Slot(str, enum.Enum):
    FIRST = "first"
    SECOND = "second"


def _pair(c) -> list:
    c = complex(c)
    return [c.real, c.imag]


@dataclass(frozen=True, eq=False)
class TwoParticleState:
    """Terms are ``(weight, left mode, right mode)``.

    ``groups`` labels each term with the product summand it came from, so
    cross terms between summands can be separated. ``metadata`` records the
    normalization outcome.
    """
    rep: Representation
    terms: tuple
    symmetry: Symmetry = Symmetry.NONE
    groups: tuple = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        terms = tuple((complex(w), l, r) for w, l, r in self.terms)
        for _, l, r in terms:
            l.check(self.rep)
            r.check(self.rep)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "symmetry", Symmetry(self.symmetry))
        groups = tuple(self.groups) if self.groups else (0,) * len(terms)
        if len(groups) != len(terms):
            raise ValueError("one group label per term")
        object.__setattr__(self, "groups", groups)

    # -- construction -----------------------------------------------------------
    @classmethod
    def from_products(cls, rep: Representation, products: Sequence, symmetry=Symmetry.NONE,
                      metadata: Optional[dict] = None) -> "TwoParticleState":
        """Expand ``sum_k c_k psi_k (x) phi_k`` into mode-pair terms."""
        terms, groups = [], []
        for g, (c, a, b) in enumerate(products):
            if a.rep is not rep or b.rep is not rep:
                raise RepMismatch("all factors must share the state's representation")
            for ma, wa in a.modes:
                for mb, wb in b.modes:
                    terms.append((complex(c) * wa * wb, ma, mb))
                    groups.append(g)
        return cls(rep, tuple(terms), symmetry, tuple(groups), dict(metadata or {}))

    def with_weights(self, weights) -> "TwoParticleState":
        terms = tuple((w, l, r) for w, (_, l, r) in zip(weights, self.terms))
        return TwoParticleState(self.rep, terms, self.symmetry, self.groups, dict(self.metadata))

    def swapped(self) -> "TwoParticleState":
        """Exchange of the two slots, ``Psi(x, y) -> Psi(y, x)`` with spinor indices swapped."""
        terms = tuple((w, r, l) for w, l, r in self.terms)
        return TwoParticleState(self.rep, terms, self.symmetry, self.groups, dict(self.metadata))

    def scaled(self, c: complex) -> "TwoParticleState":
        return self.with_weights(self.weights * c)

    # -- cached arrays --------------------------------------------------------------
    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _, _ in self.terms], dtype=complex)

    @cached_property
    def _pl(self) -> np.ndarray:
        return np.array([l.p for _, l, _ in self.terms], dtype=float).reshape(-1, 4)

    @cached_property
    def _pr(self) -> np.ndarray:
        return np.array([r.p for _, _, r in self.terms], dtype=float).reshape(-1, 4)

    @cached_property
    def _al(self) -> np.ndarray:
        return NORM * np.array([l.spinor(self.rep) for _, l, _ in self.terms]).reshape(-1, self.rep.dim)

    @cached_property
    def _ar(self) -> np.ndarray:
        return NORM * np.array([r.spinor(self.rep) for _, _, r in self.terms]).reshape(-1, self.rep.dim)

    @cached_property
    def total_omega(self) -> np.ndarray:
        return np.array([l.omega(self.rep) + r.omega(self.rep) for _, l, r in self.terms], dtype=float)

    def _same(self, which: str, box: Optional[Box]) -> np.ndarray:
        ms = [l if which == "l" else r for _, l, r in self.terms]
        keys = [box.lattice_index(m.p) for m in ms] if box is not None else [momentum_key(m.p) for m in ms]
        return np.array([[a == b for b in keys] for a in keys], dtype=bool).reshape(len(ms), len(ms))

    def _gram(self, A: np.ndarray, M: Optional[np.ndarray] = None) -> np.ndarray:
        """``G[s, t] = A_s^dagger eta0 M A_t``."""
        op = self.rep.eta0 if M is None else self.rep.eta0 @ M
        return A.conj() @ op @ A.T

    # -- values -----------------------------------------------------------------------
    def _phases(self, x, y, tau) -> np.ndarray:
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        arg = (minkowski_dot(x[..., None, :], self._pl) + minkowski_dot(y[..., None, :], self._pr)
               - self.total_omega * tau)
        return self.weights * np.exp(1j * arg)

    def evaluate(self, x, y, tau: float = 0.0) -> np.ndarray:
        """``Psi(x, y, tau)`` with shape (..., dim, dim)."""
        return np.einsum("...t,ta,tb->...ab", self._phases(x, y, tau), self._al, self._ar)

    def coefficients(self) -> dict:
        """Canonical form: ``{(left key, right key): sum of w a_L a_R^T}``."""
        out: dict = {}
        for (w, l, r), al, ar in zip(self.terms, self._al, self._ar):
            k = (l.key, r.key)
            out[k] = out.get(k, 0) + w * np.outer(al, ar)
        return out

    def coefficient_scale(self) -> float:
        c = self.coefficients()
        return max((float(np.max(np.abs(v))) for v in c.values()), default=0.0)

    # -- exchange symmetry -------------------------------------------------------------
    def swap_residual(self, sign: Optional[int] = None) -> float:
        """``max |C(a, b) - sign C(b, a)^T|`` relative to the largest coefficient."""
        sign = self.symmetry.sign if sign is None else sign
        if sign is None:
            raise ValueError("state has no exchange symmetry tag; pass sign explicitly")
        c = self.coefficients()
        scale = self.coefficient_scale()
        if scale == 0:
            return 0.0
        zero = np.zeros((self.rep.dim, self.rep.dim), dtype=complex)
        worst = 0.0
        for (kl, kr), v in c.items():
            partner = c.get((kr, kl), zero)
            worst = max(worst, float(np.max(np.abs(v - sign * partner.T))))
        return worst / scale

    def pointwise_swap_residual(self, x, y, tau: float = 0.0, sign: Optional[int] = None) -> float:
        """Relative ``max |Psi(x, y) - sign Psi(y, x)^T|`` over the supplied events."""
        sign = self.symmetry.sign if sign is None else sign
        a = self.evaluate(x, y, tau)
        b = np.swapaxes(self.evaluate(y, x, tau), -1, -2)
        scale = max(float(np.max(np.abs(a))), 1e-300)
        return float(np.max(np.abs(a - sign * b))) / scale

    # -- invariant form ------------------------------------------------------------------
    def pairing(self, other: "TwoParticleState", tau: float = 0.0, box: Optional[Box] = None) -> complex:
        """``integral Psi^bar Phi`` over both slots (spacetime mean when ``box`` is None)."""
        if other.rep is not self.rep:
            raise RepMismatch("pairing across representations")
        both = TwoParticleState(self.rep, self.terms + other.terms)
        n = len(self.terms)
        same = (both._same("l", box) & both._same("r", box))[:n, n:]
        gram = (self._al.conj() @ self.rep.eta0 @ other._al.T) * (self._ar.conj() @ self.rep.eta0 @ other._ar.T)
        phase = np.exp(1j * np.subtract.outer(self.total_omega, other.total_omega) * tau)
        w = np.outer(self.weights.conj(), other.weights)
        vol = box.volume ** 2 if box is not None else 1.0
        return complex(vol * np.sum(same * gram * phase * w))

    def quasi_norm(self, tau: float = 0.0, box: Optional[Box] = None) -> complex:
        return self.pairing(self, tau, box)

    def normalized(self, box: Optional[Box] = None) -> "TwoParticleState":
        """Scale to unit quasi-norm magnitude; a vanishing quasi-norm leaves the factor at 1."""
        n = self.quasi_norm(box=box).real
        meta = dict(self.metadata)
        if abs(n) <= 1e-14 * max(self.coefficient_scale() ** 2, NULL_TOL):
            meta.update(norm_status="null", norm_factor=1.0)
            return TwoParticleState(self.rep, self.terms, self.symmetry, self.groups, meta)
        f = 1.0 / math.sqrt(abs(n))
        meta.update(norm_status="positive" if n > 0 else "negative", norm_factor=f)
        return TwoParticleState(self.rep, tuple((w * f, l, r) for w, l, r in self.terms),
                                self.symmetry, self.groups, meta)

    def evolve(self, dtau: float) -> "TwoParticleState":
        return self.with_weights(self.weights * np.exp(-1j * self.total_omega * dtau))

    # -- serialization ---------------------------------------------------------------------
    def to_dict(self) -> dict:
        def mode(m: PlaneWaveMode) -> dict:
            return {"p": list(m.p), "branch": m.branch.value, "pol": [_pair(c) for c in m.pol]}
        return {
            "rep": self.rep.kind.value,
            "symmetry": self.symmetry.value,
            "terms": [{"weight": _pair(w), "left": mode(l), "right": mode(r), "group": g}
                      for (w, l, r), g in zip(self.terms, self.groups)],
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TwoParticleState":
        rep = build_representation(d["rep"])

        def mode(md) -> PlaneWaveMode:
            return PlaneWaveMode(tuple(md["p"]), md["branch"], tuple(complex(*c) for c in md["pol"]))
        terms = tuple((complex(*t["weight"]), mode(t["left"]), mode(t["right"])) for t in d["terms"])
        groups = tuple(t.get("group", 0) for t in d["terms"])
        return cls(rep, terms, d.get("symmetry", "none"), groups, dict(d.get("metadata", {})))


def tensor_state(psi1: ModeWavefunction, psi2: ModeWavefunction) -> TwoParticleState:
    """Single product ``psi1 (x) psi2`` with no exchange symmetry."""
    if psi1.rep is not psi2.rep:
        raise RepMismatch("tensor product of different representations")
    return TwoParticleState.from_products(psi1.rep, [(1.0, psi1, psi2)])


def symmetrize(psi1: ModeWavefunction, psi2: ModeWavefunction, sign: int,
               box: Optional[Box] = None) -> TwoParticleState:
    """``N (psi1 (x) psi2 + sign psi2 (x) psi1)`` with unit quasi-norm magnitude when possible.

    Raises NullState when the combination vanishes identically, as it does
    for ``sign = -1`` and equal factors.
    """
    if psi1.rep is not psi2.rep:
        raise RepMismatch("symmetrizing different representations")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    tag = Symmetry.SYMMETRIC if sign == 1 else Symmetry.ANTISYMMETRIC
    state = TwoParticleState.from_products(psi1.rep, [(1.0, psi1, psi2), (sign, psi2, psi1)], tag)
    # compare against the size of the individual products to decide "identically zero"
    size = tensor_state(psi1, psi2).coefficient_scale()
    if state.coefficient_scale() <= 1e-13 * max(size, NULL_TOL):
        raise NullState("the (anti)symmetrized combination vanishes")
    return state.normalized(box)


def evolve_two_particle(state: TwoParticleState, dtau: float, tol: float = SWAP_TOL) -> TwoParticleState:
    """Evolve both slots by ``dtau``; a tagged symmetry is re-checked afterwards."""
    out = state.evolve(dtau)
    if out.symmetry.sign is not None:
        res = out.swap_residual()
        if res > tol:
            raise SymmetryViolation(f"swap residual {res:.3e} after evolution exceeds {tol:.1e}")
    return out


# -- currents ------------------------------------------------------------------------------

def _current_pairs(state: TwoParticleState, x, y, tau):
    """Per-pair current densities ``(jx[..., s, t, mu], jy[..., s, t, mu], rho[..., s, t])``."""
    ph = state._phases(x, y, tau)
    b = state.rep.betas
    gl = np.stack([state._gram(state._al, b[m]) for m in range(4)], axis=-1)
    gr = np.stack([state._gram(state._ar, b[m]) for m in range(4)], axis=-1)
    hl, hr = state._gram(state._al), state._gram(state._ar)
    c = ph.conj()[..., :, None] * ph[..., None, :]
    jx = c[..., None] * (gl * hr[..., None])
    jy = c[..., None] * (hl[..., None] * gr)
    rho = c * hl * hr
    return jx, jy, rho


def currents(state: TwoParticleState, x, y, tau: float = 0.0, return_imag: bool = False):
    """``(j^x_mu, j^y_mu)`` at events ``x`` and ``y``; each has shape (..., 4)."""
    jx, jy, _ = _current_pairs(state, x, y, tau)
    jx, jy = jx.sum(axis=(-3, -2)), jy.sum(axis=(-3, -2))
    if return_imag:
        return jx.real, jy.real, max(float(np.max(np.abs(jx.imag))), float(np.max(np.abs(jy.imag))))
    return jx.real, jy.real


def cross_current(state: TwoParticleState, x, y, tau: float = 0.0) -> np.ndarray:
    """Part of ``j^x`` coming from pairs of terms in different product summands."""
    jx, _, _ = _current_pairs(state, x, y, tau)
    g = np.asarray(state.groups)
    mask = g[:, None] != g[None, :]
    return (jx * mask[..., None]).sum(axis=(-3, -2)).real


def conservation_residual(state: TwoParticleState, x, y, tau: float = 0.0,
                          h: Optional[float] = None, relative: bool = False) -> float:
    """``|d j^x_mu / d x_mu + d j^y_mu / d y_mu + d (Psi^bar Psi) / d tau|``.

    With ``h=None`` the derivatives are exact (each pair of terms carries
    known phases). With a step ``h`` they are central differences. With
    ``relative=True`` the largest residual over the sampled events is divided
    by the largest sum of the absolute contributions of all pairs of terms,
    which stays meaningful where the divergences themselves nearly vanish.
    """
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    jx, jy, rho = _current_pairs(state, x, y, tau)
    # d^mu of conj(e^{i s}) e^{i t} is i (p_t - p_s)^mu; contract with the lower mu of beta_mu
    cx = jx * (1j * (state._pl[None, :, :] - state._pl[:, None, :]))
    cy = jy * (1j * (state._pr[None, :, :] - state._pr[:, None, :]))
    ct = rho * (-1j * (state.total_omega[None, :] - state.total_omega[:, None]))
    scale = (np.sum(np.abs(cx), axis=(-3, -2, -1)) + np.sum(np.abs(cy), axis=(-3, -2, -1))
             + np.sum(np.abs(ct), axis=(-2, -1)))
    if h is None:
        tx = np.sum(cx, axis=(-3, -2, -1))
        ty = np.sum(cy, axis=(-3, -2, -1))
        tt = np.sum(ct, axis=(-2, -1))
    else:
        metric = np.array([1.0, -1.0, -1.0, -1.0])
        tx = ty = 0.0
        for mu in range(4):
            e = np.zeros(4)
            e[mu] = h
            jxp, _ = currents(state, x + e, y, tau)
            jxm, _ = currents(state, x - e, y, tau)
            _, jyp = currents(state, x, y + e, tau)
            _, jym = currents(state, x, y - e, tau)
            tx = tx + metric[mu] * (jxp[..., mu] - jxm[..., mu]) / (2 * h)
            ty = ty + metric[mu] * (jyp[..., mu] - jym[..., mu]) / (2 * h)

        def dens(t):
            v = state.evaluate(x, y, t)
            return np.einsum("...ab,ac,bd,...cd->...", v.conj(), state.rep.eta0, state.rep.eta0, v).real
        tt = (dens(tau + h) - dens(tau - h)) / (2 * h)
    total = float(np.max(np.abs(tx + ty + tt)))
    if relative:
        return total / max(float(np.max(scale)), 1e-300)
    return total


# -- integrated quantities --------------------------------------------------------------------

def _slot_masks(state: TwoParticleState, which: Slot, box: Optional[Box]):
    which = Slot(which)
    same_l, same_r = state._same("l", box), state._same("r", box)
    return (same_r, same_l) if which is Slot.FIRST else (same_l, same_r)


def marginal_current(state: TwoParticleState, which: Slot, x, tau: float = 0.0,
                     box: Optional[Box] = None) -> np.ndarray:
    """Current of one particle with the other slot integrated out.

    ``box`` fixes the integration domain of the other slot (a periodic box,
    which needs lattice-commensurate momenta); ``None`` uses the spacetime
    mean. Returns shape (..., 4).
    """
    which = Slot(which)
    other_same, _ = _slot_masks(state, which, box)
    x = np.asarray(x, dtype=float)
    b = state.rep.betas
    if which is Slot.FIRST:
        own_p, own_a, other_a = state._pl, state._al, state._ar
    else:
        own_p, own_a, other_a = state._pr, state._ar, state._al
    g = np.stack([state._gram(own_a, b[m]) for m in range(4)], axis=-1)
    h = state._gram(other_a)
    w = state.weights * np.exp(1j * (minkowski_dot(x[..., None, :], own_p) - state.total_omega * tau))
    c = w.conj()[..., :, None] * w[..., None, :]
    vol = box.volume if box is not None else 1.0
    j = vol * np.sum((c * (other_same * h))[..., None] * g, axis=(-3, -2))
    return j.real


def energy_momentum_expectation(state: TwoParticleState, which: Slot = Slot.FIRST,
                                tau: float = 0.0, box: Optional[Box] = None) -> np.ndarray:
    """``<p^mu (x) I>`` (or ``<I (x) p^mu>``) with mode labels as momentum eigenvalues.

    Every mode ``exp(i p.x)`` is an eigenfunction of ``-i d^mu`` with
    eigenvalue ``p^mu``; that operator is used here. Returns a complex
    4-vector whose imaginary part vanishes up to rounding.
    """
    which = Slot(which)
    same = state._same("l", box) & state._same("r", box)
    p = state._pl if which is Slot.FIRST else state._pr
    gram = state._gram(state._al) * state._gram(state._ar)
    phase = np.exp(1j * np.subtract.outer(state.total_omega, state.total_omega) * tau)
    c = np.outer(state.weights.conj(), state.weights) * same * gram * phase
    vol = box.volume ** 2 if box is not None else 1.0
    return vol * np.einsum("st,tm->m", c, p)


def spin_expectation(state: TwoParticleState, mu: int, nu: int, which: Slot = Slot.FIRST,
                     tau: float = 0.0, box: Optional[Box] = None) -> complex:
    """``<S_{mu nu} (x) I>`` with ``S = -i [beta_mu, beta_nu]``.

    Constant in tau whenever all terms that overlap share one total
    frequency, e.g. for (anti)symmetrized products of single-branch modes.
    """
    which = Slot(which)
    S = angular_momentum_matrix(state.rep, mu, nu)
    same = state._same("l", box) & state._same("r", box)
    if which is Slot.FIRST:
        gram = state._gram(state._al, S) * state._gram(state._ar)
    else:
        gram = state._gram(state._al) * state._gram(state._ar, S)
    phase = np.exp(1j * np.subtract.outer(state.total_omega, state.total_omega) * tau)
    c = np.outer(state.weights.conj(), state.weights) * same * gram * phase
    vol = box.volume ** 2 if box is not None else 1.0
    return complex(vol * np.sum(c))


def spin_expectations(state: TwoParticleState, which: Slot = Slot.FIRST, tau: float = 0.0,
                      box: Optional[Box] = None) -> dict:
    return {pair: spin_expectation(state, *pair, which=which, tau=tau, box=box) for pair in LORENTZ_PAIRS}
