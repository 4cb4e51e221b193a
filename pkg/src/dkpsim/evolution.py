"""Free and potential tau-evolution, the light-cone kernel and a causality check.

The generator of tau-translations is ``S = beta.p``. Its minimal polynomial
(``S^3 = m^2 S`` for DKP, ``S^2 = m^2`` for Dirac) gives the closed form

    exp(-i S t) = I - i S g1(m^2, t) + S^2 g2(m^2, t)

with ``g1 = sin(m t)/m`` and ``g2 = (cos(m t) - 1)/m^2``. Both are entire
in ``m^2``, so the same expression covers timelike, null and spacelike
momenta (for spacelike ones the trigonometric functions turn hyperbolic).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .algebra import Representation
from .errors import ConeExceedsBox, GridMismatch, IncommensurateModes, RepMismatch
from .kinematics import minkowski_dot
from .states import Box, ModeWavefunction

SERIES_CUTOFF = 1e-8
METRIC_SIGNS = np.array([1.0, -1.0, -1.0, -1.0])


def _g_factors(m2, t):
    """``(g1, g2)`` for arrays of ``m^2`` and a scalar or array ``t``."""
    m2 = np.asarray(m2, dtype=float)
    t = np.asarray(t, dtype=float)
    z = m2 * t * t
    small = np.abs(z) < SERIES_CUTOFF
    zs = np.where(small, 1.0, z)
    s = np.sqrt(np.abs(zs))
    pos = zs > 0
    sinc = np.where(pos, np.sin(s) / s, np.sinh(s) / s)
    # cos(s) - 1 = -2 sin^2(s/2); written this way to avoid cancellation
    cdef = np.where(pos, -2 * np.sin(s / 2) ** 2, 2 * np.sinh(s / 2) ** 2) / zs
    sinc = np.where(small, 1 - z / 6 + z * z / 120, sinc)
    cdef = np.where(small, -0.5 + z / 24 - z * z / 720, cdef)
    return t * sinc, t * t * cdef


def propagator_matrix(rep: Representation, p, dtau: float, mass_sign: int = 1) -> np.ndarray:
    """``exp(-i mass_sign beta.p dtau)`` for any real four-vector ``p``.

    ``mass_sign=-1`` selects the negative-mass inversion path, which flips
    every phase.
    """
    p = np.asarray(p, dtype=float)
    t = float(dtau) * mass_sign
    S = rep.slashed(p)
    g1, g2 = _g_factors(minkowski_dot(p, p), t)
    return np.eye(rep.dim) - 1j * g1 * S + g2 * (S @ S)


def _apply_exp(rep: Representation, vec: np.ndarray, psi: np.ndarray, t: float) -> np.ndarray:
    """Apply ``exp(-i (beta.vec) t)`` pointwise; ``vec`` is (..., 4), ``psi`` (..., dim)."""
    g1, g2 = _g_factors(minkowski_dot(vec, vec), t)

    def S(f):
        return np.einsum("...m,mab,...b->...a", vec, rep.betas, f, optimize=True)

    s1 = S(psi)
    s2 = S(s1)
    return psi - 1j * g1[..., None] * s1 + g2[..., None] * s2


def evolve_modes(psi: ModeWavefunction, dtau: float) -> ModeWavefunction:
    """Plus modes pick up ``e^{-i phi m dtau}``, Minus ``e^{+i phi m dtau}``, Zero nothing."""
    return psi.evolve(dtau)


# -- grids ----------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Periodic 4D lattice with ``points[mu]`` samples over ``[0, extents[mu])``."""
    extents: tuple
    points: tuple

    def __post_init__(self):
        ext = tuple(float(e) for e in self.extents)
        pts = tuple(int(n) for n in self.points)
        if len(ext) != 4 or len(pts) != 4:
            raise GridMismatch("grid needs four extents and four point counts")
        if min(ext) <= 0 or min(pts) <= 0:
            raise GridMismatch("extents and point counts must be positive")
        object.__setattr__(self, "extents", ext)
        object.__setattr__(self, "points", pts)

    @property
    def spacing(self) -> np.ndarray:
        return np.asarray(self.extents) / np.asarray(self.points)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def box(self) -> Box:
        return Box(self.extents)

    def coordinates(self) -> np.ndarray:
        """Event coordinates, shape (N0, N1, N2, N3, 4)."""
        axes = [np.arange(n) * d for n, d in zip(self.points, self.spacing)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def wave_numbers(self) -> list[np.ndarray]:
        """Per-axis FFT wave numbers ``k`` of ``exp(i k x)``.

        The Nyquist entry of an even axis is set to 0, as usual for odd
        spectral derivatives: its sign is ambiguous, and keeping it would
        break the exact covariance of the generator under ``x -> -x`` and
        complex conjugation.
        """
        out = []
        for n, d in zip(self.points, self.spacing):
            k = 2 * np.pi * np.fft.fftfreq(n, d)
            if n % 2 == 0:
                k[n // 2] = 0.0
            out.append(k)
        return out

    def momenta(self) -> np.ndarray:
        """Contravariant ``p^mu`` at each FFT index, shape (N0, N1, N2, N3, 4).

        The plane wave ``exp(i p.x)`` has Euclidean wave vector
        ``(p^0, -p^1, -p^2, -p^3)``.
        """
        k = np.stack(np.meshgrid(*self.wave_numbers(), indexing="ij"), axis=-1)
        return k * METRIC_SIGNS

    def to_dict(self) -> dict:
        return {"extents": list(self.extents), "points": list(self.points)}


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    rep: Representation
    spec: GridSpec
    data: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        want = self.spec.points + (self.rep.dim,)
        if data.shape != want:
            raise GridMismatch(f"data shape {data.shape} does not match grid {want}")
        object.__setattr__(self, "data", data)

    def quasi_norm(self) -> float:
        """``sum_x psi^bar psi`` times the cell volume (real up to rounding)."""
        d = self.data
        val = np.vdot(d, d @ self.rep.eta0.T)
        return float(val.real) * self.spec.cell_volume

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.data) ** 2) * self.spec.cell_volume))

    def with_data(self, data, tau: Optional[float] = None) -> "GridWavefunction":
        return GridWavefunction(self.rep, self.spec, data, self.tau if tau is None else tau)

    @classmethod
    def from_modes(cls, psi: ModeWavefunction, spec: GridSpec, tau: float = 0.0) -> "GridWavefunction":
        """Sample a mode list on the grid; every mode must be a resolvable lattice mode."""
        box = spec.box
        for m, _ in psi.modes:
            n = box.lattice_index(m.p)
            for ni, Ni in zip(n, spec.points):
                if not -Ni // 2 <= ni < Ni - Ni // 2 or (Ni % 2 == 0 and ni == -Ni // 2):
                    raise IncommensurateModes(
                        f"wave numbers {n} are not resolved by {spec.points} points")
        return cls(psi.rep, spec, psi.evaluate(spec.coordinates(), tau), tau)


def _check_grid(psi: GridWavefunction, field: np.ndarray, name: str) -> np.ndarray:
    field = np.asarray(field, dtype=float)
    if field.shape != psi.spec.points + (4,):
        raise GridMismatch(f"{name} shape {field.shape} does not match grid {psi.spec.points}")
    return field


def free_step(psi: GridWavefunction, dtau: float, mass_sign: int = 1) -> np.ndarray:
    axes = (0, 1, 2, 3)
    hat = np.fft.fftn(psi.data, axes=axes)
    hat = _apply_exp(psi.rep, psi.spec.momenta(), hat, dtau * mass_sign)
    return np.fft.ifftn(hat, axes=axes)


def spacelike_growth(spec: GridSpec, dtau: float) -> float:
    """Largest amplification ``exp(|m| |dtau|)`` over spacelike lattice momenta."""
    p = spec.momenta()
    m2 = minkowski_dot(p, p)
    worst = math.sqrt(max(0.0, -float(m2.min())))
    return math.exp(worst * abs(dtau))


def _step_count(steps) -> int:
    n = int(steps)
    if n < 1 or n != steps:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")
    return n


def evolve_grid_free(psi: GridWavefunction, dtau: float, steps: int = 1,
                     mass_sign: int = 1) -> GridWavefunction:
    """Spectral free evolution by ``steps`` applications of the momentum-space propagator.

    Spacelike lattice momenta grow like ``exp(|m| |dtau|)``, so rounding
    noise in those components is amplified by roughly
    ``spacelike_growth(spec, total_dtau)``; keep that factor well below
    ``1/eps`` times the accuracy you need.
    """
    n = _step_count(steps)
    out = psi
    for _ in range(n):
        out = out.with_data(free_step(out, dtau, mass_sign), out.tau + dtau)
    return out


def evolve_grid_potential(psi: GridWavefunction, potential, q: float, dtau: float,
                          steps: int = 1, mass_sign: int = 1) -> GridWavefunction:
    """Strang splitting of ``beta_mu (i d^mu - q A^mu) psi + i d_tau psi = 0`` on the grid.

    For ``exp(i p.x)`` the operator ``i d^mu`` acts as ``-p^mu``, so the
    generator is ``beta.(p + q A)``. ``potential`` holds the contravariant
    ``A^mu`` at every site, shape (N0, N1, N2, N3, 4). Each step is a local
    half step with ``exp(-i q beta.A dtau/2)``, a free step, and another
    local half step.
    """
    n = _step_count(steps)
    A = _check_grid(psi, potential, "potential")
    half = 0.5 * dtau * mass_sign
    data = psi.data
    local_vec = q * A
    for _ in range(n):
        data = _apply_exp(psi.rep, local_vec, data, half)
        data = free_step(psi.with_data(data), dtau, mass_sign)
        data = _apply_exp(psi.rep, local_vec, data, half)
    return psi.with_data(data, psi.tau + dtau * n)


# -- light cone -------------------------------------------------------------------

class KernelValue(NamedTuple):
    value: float
    region: str  # "outside", "inside" or "on_cone"


def lightcone_kernel(t: float, r: float, tau: float, tol: float = 1e-12) -> KernelValue:
    """Smooth part of ``(1/4 pi^2 r) d/dr [H(s) s^{-1/2}]`` with ``s = t^2 - tau^2 - r^2``.

    Inside the cone this is ``s^{-3/2} / (4 pi^2)``, independent of the sign
    convention of ``r``. Outside it is 0. Near the cone surface the Heaviside
    derivative contributes a surface term; there the value is NaN and the
    region is ``"on_cone"``.
    """
    if r <= 0:
        raise ValueError("lightcone_kernel needs r > 0")
    s = t * t - tau * tau - r * r
    if abs(s) < tol:
        return KernelValue(float("nan"), "on_cone")
    if s < 0:
        return KernelValue(0.0, "outside")
    return KernelValue(s ** -1.5 / (4 * math.pi ** 2), "inside")


def _bump(r: np.ndarray, w: float) -> np.ndarray:
    out = np.zeros_like(r)
    inside = r < w
    u = r[inside] / w
    out[inside] = np.exp(-1.0 / (1.0 - u * u))
    return out


@dataclass
class CausalityReport:
    leakage: float
    scalar_leakage: float
    points: int
    extent: float
    t_max: float
    tau: float
    source_width: float
    margin: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def causality_support_check(rep: Representation, spec: GridSpec, source_width: float,
                            tau: float) -> CausalityReport:
    """Leakage of the retarded kernel outside the inflated cone, in a 1+1(+tau) reduction.

    The scalar kernel is propagated exactly in Fourier space as the solution
    of ``(d_t^2 - d_tau^2 - d_x^2) u = 0`` with ``u(0) = 0`` and
    ``d_t u(0) = -b``, where ``b`` is a compact smooth bump of radius
    ``source_width`` in the ``(tau, x)`` plane. The spinor field is the
    fourth-order differential operator relating the two kernels applied to
    ``u a`` for a fixed spinor ``a``. Leakage is the fraction of
    ``sum |psi|^2`` over the tau slice and all sampled ``t`` that lies where
    ``sqrt(tau^2 + x^2) > t + source_width + 2 dx``.

    Axis 0 of ``spec`` fixes the ``t`` window ``[0, extents[0]]`` and its
    sample count; axis 1 fixes the periodic ``(tau, x)`` box and resolution.
    """
    T, nt = spec.extents[0], spec.points[0]
    L, N = spec.extents[1], spec.points[1]
    w = float(source_width)
    dx = L / N
    margin = w + 2 * dx
    if T + margin >= L / 2 or abs(tau) + w >= L / 2:
        raise ConeExceedsBox(f"cone radius {T + margin} does not fit in half box {L / 2}")

    grid = (np.arange(N) - N // 2) * dx
    it = int(np.argmin(np.abs(grid - tau)))
    TT, XX = np.meshgrid(grid, grid, indexing="ij")
    b_hat = np.fft.fft2(np.fft.ifftshift(_bump(np.hypot(TT, XX), w)))
    k = 2 * np.pi * np.fft.fftfreq(N, dx)
    KT, KX = np.meshgrid(k, k, indexing="ij")
    om = np.hypot(KT, KX)
    safe = np.where(om > 0, om, 1.0)

    b0, b1 = rep.betas[0], rep.betas[1]
    a = np.zeros(rep.dim, dtype=complex)
    a[0] = 1.0
    a[-1] = 0.5j
    rho = np.hypot(grid[it], grid)
    outside = rho > np.linspace(0, T, nt)[:, None] + margin

    def slice_field(f_hat):
        # inverse transform, then keep the tau row nearest to the requested value
        return np.fft.fftshift(np.fft.ifft2(f_hat), axes=(0, 1))[it]

    tot = out = tot_s = out_s = 0.0
    for i, t in enumerate(np.linspace(0, T, nt)):
        u = -np.where(om > 0, np.sin(om * t) / safe, t) * b_hat
        ut = -np.cos(om * t) * b_hat
        utt = om * np.sin(om * t) * b_hat
        ix, itau = 1j * KX, 1j * KT
        # scalar coefficient fields multiplying fixed matrices, then applied to a
        terms = [
            (b0 @ b0, utt),
            (-(b0 @ b1 + b1 @ b0), ix * ut),
            (b1 @ b1, ix * ix * u),
            (-b0, itau * ut),
            (b1, itau * ix * u),
            (np.eye(rep.dim), -utt + ix * ix * u + itau * itau * u),
        ]
        spinor = sum(np.multiply.outer(slice_field(f), M @ a) for M, f in terms)
        dens = np.sum(np.abs(spinor) ** 2, axis=-1)
        sdens = np.abs(slice_field(u)) ** 2
        tot += dens.sum()
        out += dens[outside[i]].sum()
        tot_s += sdens.sum()
        out_s += sdens[outside[i]].sum()
    leak = out / tot if tot > 0 else 0.0
    leak_s = out_s / tot_s if tot_s > 0 else 0.0
    return CausalityReport(float(leak), float(leak_s), N, L, T, float(tau), w, margin)


def check_same_rep(a: GridWavefunction, b: GridWavefunction) -> None:
    if a.rep is not b.rep:
        raise RepMismatch("grid wavefunctions use different representations")
    if a.spec != b.spec:
        raise GridMismatch("grid wavefunctions live on different grids")
