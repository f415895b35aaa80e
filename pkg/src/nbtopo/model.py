"""Two-band non-reciprocal chain in Bloch, non-Bloch and real-space form.

The unit cell holds two sites (A, B).  Intra-cell hopping t1 carries the
non-reciprocity gamma, t2 couples neighbouring cells through B->A bonds and
t3 through A->B bonds.  All matrices use the site order
(cell 0:A, cell 0:B, cell 1:A, ...), which is the wire order for every
module in this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .errors import SingularReferenceError

# Sublattice indices into 2x2 blocks.
A, B = 0, 1

# Chiral (sublattice) operator on the two-component spinor.
CHIRAL = np.diag([1.0, -1.0])


@dataclass(frozen=True)
class ModelParams:
    """Real couplings of the chain: t1, t2, t3 and non-reciprocity gamma."""

    t1: float
    t2: float
    t3: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("t1", "t2", "t3", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")

    @property
    def a_plus(self) -> float:
        return self.t1 + self.gamma

    @property
    def a_minus(self) -> float:
        return self.t1 - self.gamma


class BoundaryCondition(Enum):
    OBC = "obc"
    PBC = "pbc"


def offdiagonal_couplings(p: ModelParams, beta):
    """Return (R_plus, R_minus) of H(beta), vectorised over beta.

    R_plus multiplies the A<-B element, R_minus the B<-A element:
    R_plus = (t1+gamma) + t2/beta + t3*beta,
    R_minus = (t1-gamma) + t3/beta + t2*beta.
    """
    beta = np.asarray(beta, dtype=complex)
    if np.any(beta == 0):
        raise ValueError("beta must be nonzero")
    r_plus = p.a_plus + p.t2 / beta + p.t3 * beta
    r_minus = p.a_minus + p.t3 / beta + p.t2 * beta
    return r_plus, r_minus


def bloch_hamiltonian(p: ModelParams, k: float) -> np.ndarray:
    """2x2 Bloch Hamiltonian H(k); equals H(beta) on the unit circle."""
    return nonbloch_hamiltonian(p, np.exp(1j * k))


def nonbloch_hamiltonian(p: ModelParams, beta: complex) -> np.ndarray:
    """2x2 non-Bloch Hamiltonian from the substitution e^{ik} -> beta."""
    if beta == 0:
        raise ValueError("beta must be nonzero")
    r_plus, r_minus = offdiagonal_couplings(p, beta)
    return np.array([[0.0, complex(r_plus)], [complex(r_minus), 0.0]])


def nonbloch_hamiltonians(p: ModelParams, betas) -> np.ndarray:
    """Stacked (N, 2, 2) Hamiltonians for an array of beta values."""
    r_plus, r_minus = offdiagonal_couplings(p, betas)
    out = np.zeros(r_plus.shape + (2, 2), dtype=complex)
    out[..., A, B] = r_plus
    out[..., B, A] = r_minus
    return out


def characteristic_polynomial(p: ModelParams, energy: complex) -> np.ndarray:
    """Coefficients c0..c4 of beta^2 * det[H(beta) - E] in ascending order.

    The degree collapses to 2 when t2*t3 == 0; the list keeps explicit
    zeros so callers see one uniform shape.
    """
    c = np.zeros(5, dtype=complex)
    c[0] = -p.t2 * p.t3
    c[1] = -(p.a_plus * p.t3 + p.a_minus * p.t2)
    c[2] = energy * energy - p.a_plus * p.a_minus - p.t2**2 - p.t3**2
    c[3] = -(p.a_plus * p.t2 + p.a_minus * p.t3)
    c[4] = -p.t2 * p.t3
    return c


def real_space_hamiltonian(p: ModelParams, cells: int,
                           bc: BoundaryCondition) -> np.ndarray:
    """Dense 2L x 2L single-particle Hamiltonian for L unit cells."""
    if cells < 4:
        raise ValueError(f"need at least 4 cells, got {cells}")
    size = 2 * cells
    h = np.zeros((size, size), dtype=complex)
    for n in range(cells):
        a_n, b_n = 2 * n, 2 * n + 1
        h[a_n, b_n] = p.a_plus
        h[b_n, a_n] = p.a_minus
        m = n + 1
        if m >= cells:
            if bc is not BoundaryCondition.PBC:
                continue
            m -= cells
        a_m, b_m = 2 * m, 2 * m + 1
        h[b_n, a_m] += p.t2
        h[a_m, b_n] += p.t2
        h[a_n, b_m] += p.t3
        h[b_m, a_n] += p.t3
    return h


def spectral_winding(p: ModelParams, e_ref: complex, n_k: int = 4096) -> int:
    """Winding of det[H(k) - E_ref] as k sweeps the Brillouin zone.

    Zero for line-gapped spectra, nonzero in a point-gapped regime.
    """
    k = 2.0 * np.pi * np.arange(n_k) / n_k
    r_plus, r_minus = offdiagonal_couplings(p, np.exp(1j * k))
    det = e_ref * e_ref - r_plus * r_minus
    if np.min(np.abs(det)) < 1e-10:
        raise SingularReferenceError(
            "det[H(k) - E_ref] vanishes on the grid; reference sits on the spectrum")
    phase = np.unwrap(np.angle(np.append(det, det[0])))
    return int(round((phase[-1] - phase[0]) / (2.0 * np.pi)))
