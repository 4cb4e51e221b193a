"""Four-vectors in natural units with signature (+, -, -, -)."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

DEFAULT_TOL = 1e-12


def as_four_vector(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 4:
        raise ValueError(f"four-vector needs 4 components, got shape {p.shape}")
    return p


def minkowski_dot(p, q):
    """``p0 q0 - p.q``; broadcasts over leading axes."""
    p, q = as_four_vector(p), as_four_vector(q)
    return p[..., 0] * q[..., 0] - np.sum(p[..., 1:] * q[..., 1:], axis=-1)


def lower(p) -> np.ndarray:
    p = as_four_vector(p)
    return p * np.array([1.0, -1.0, -1.0, -1.0])


class MassClass(str, enum.Enum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"
    ZERO_ENERGY = "zero_energy"


@dataclass(frozen=True)
class MassShellData:
    m2: float
    m_p: Optional[float]
    phi_p: Optional[int]
    cls: MassClass


def mass_shell(p, tol: float = DEFAULT_TOL) -> MassShellData:
    """Classify ``p`` and return its mass magnitude and energy sign.

    ``|p.p| <= tol`` is lightlike. ``|p0| <= tol`` is labelled ZERO_ENERGY
    (such a vector can only be spacelike or null, and has no energy sign).
    """
    p = as_four_vector(p)
    m2 = float(minkowski_dot(p, p))
    phi = None if abs(p[0]) <= tol else (1 if p[0] > 0 else -1)
    if phi is None:
        cls = MassClass.ZERO_ENERGY
    elif abs(m2) <= tol:
        cls = MassClass.LIGHTLIKE
    elif m2 > 0:
        cls = MassClass.TIMELIKE
    else:
        cls = MassClass.SPACELIKE
    m_p = math.sqrt(m2) if cls is MassClass.TIMELIKE else None
    return MassShellData(m2, m_p, phi, cls)


def random_timelike(rng: np.random.Generator, bound: float = 10.0, min_mass: float = 0.5) -> np.ndarray:
    """Rejection-sample p with every |p^mu| <= bound and m_p >= min_mass."""
    while True:
        p = rng.uniform(-bound, bound, size=4)
        if minkowski_dot(p, p) >= min_mass ** 2:
            return p


def random_four_vector(rng: np.random.Generator, cls: MassClass, bound: float = 10.0) -> np.ndarray:
    """Sample a vector of the requested causal class (lightlike exactly null)."""
    if cls is MassClass.TIMELIKE:
        return random_timelike(rng, bound)
    if cls is MassClass.LIGHTLIKE:
        n = rng.normal(size=3)
        n *= rng.uniform(0.1, bound) / np.linalg.norm(n)
        return np.array([rng.choice([-1.0, 1.0]) * np.linalg.norm(n), *n])
    if cls is MassClass.ZERO_ENERGY:
        return np.array([0.0, *rng.uniform(-bound, bound, size=3)])
    while True:
        p = rng.uniform(-bound, bound, size=4)
        if minkowski_dot(p, p) <= -0.25:
            return p
