"""Independent reference computations shared by the test modules."""
import mpmath
import numpy as np


def mp_expm(M: np.ndarray, dps: int = 30) -> np.ndarray:
    """Matrix exponential in extended precision (mpmath scaling and squaring)."""
    with mpmath.workdps(dps):
        A = mpmath.matrix([[mpmath.mpc(complex(c)) for c in row] for row in M])
        E = mpmath.expm(A)
        return np.array([[complex(E[i, j]) for j in range(E.cols)] for i in range(E.rows)])


def propagator_oracle(rep, p, dtau, dps: int = 30) -> np.ndarray:
    return mp_expm(-1j * dtau * rep.slashed(p), dps)


def mode_grid(psi, spec, tau=0.0):
    """Direct pointwise evaluation of a mode list on the grid nodes."""
    return psi.evaluate(spec.coordinates(), tau)
