"""Generalized Brillouin zone from the equal-modulus root condition.

The contour is assembled by an energy sweep: eigenvalues of a long open
chain seed the characteristic equation, whose beta roots are kept whenever
the middle pair has (nearly) equal modulus.  An optional refinement step
moves each seed energy along the local band direction until the modulus
mismatch is minimised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (DegeneratePolynomialError, InsufficientSeedError,
                     NotApplicableError, SingularRadiusError)
from .model import (BoundaryCondition, ModelParams, characteristic_polynomial,
                    offdiagonal_couplings, real_space_hamiltonian)

EDGE_ENERGY_CUTOFF = 1e-6   # open-chain zero modes are not bulk seeds
MIN_RAW_POINTS = 32
ANGLE_DUPLICATE_TOL = 1e-10

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class GBZOptions:
    """Knobs for the energy-sweep contour solver."""

    seed_chain_length: int = 120
    resample_count: int = 720
    modulus_tolerance: float = 1e-6
    refine: bool = True

    def __post_init__(self):
        if self.resample_count < 64:
            raise ValueError("resample_count must be at least 64")
        if self.modulus_tolerance <= 0:
            raise ValueError("modulus_tolerance must be positive")
        if self.seed_chain_length < 40:
            raise ValueError("seed_chain_length must be at least 40")


@dataclass
class GBZContour:
    """Closed contour in the complex beta plane, ordered by angle."""

    points: np.ndarray            # complex beta values
    angles: np.ndarray            # arg(beta), strictly increasing in [0, 2pi)
    energies: np.ndarray          # band energy associated with each point
    closed: bool = True
    raw_points: np.ndarray = field(default=None, repr=False)
    raw_residuals: np.ndarray = field(default=None, repr=False)

    @property
    def radii(self) -> np.ndarray:
        return np.abs(self.points)

    def winding_number(self) -> int:
        """Winding of the contour around beta = 0."""
        wrapped = np.append(self.points, self.points[0])
        phase = np.unwrap(np.angle(wrapped))
        return int(round((phase[-1] - phase[0]) / (2.0 * np.pi)))


def polynomial_roots(coeffs) -> np.ndarray:
    """All roots of sum_k coeffs[k] * x^k via the companion matrix."""
    c = np.asarray(coeffs, dtype=complex)
    degree = c.shape[0] - 1
    while degree > 0 and c[degree] == 0:
        degree -= 1
    if degree < 1:
        raise DegeneratePolynomialError(
            "polynomial has no nonzero coefficient beyond the constant term")
    c = c[:degree + 1]
    monic = c / c[-1]
    comp = np.zeros((degree, degree), dtype=complex)
    comp[1:, :-1] = np.eye(degree - 1)
    comp[:, -1] = -monic[:-1]
    return np.linalg.eigvals(comp)


def _char_degree(p: ModelParams) -> int:
    if p.t2 == 0 and p.t3 == 0:
        raise DegeneratePolynomialError("t2 = t3 = 0 gives a dispersionless chain")
    return 4 if (p.t2 != 0 and p.t3 != 0) else 2


def _beta_roots_stacked(p: ModelParams, energies: np.ndarray) -> np.ndarray:
    """Roots of the characteristic equation for many energies at once.

    Returns an (N, degree) array sorted by modulus along the last axis.
    The beta = 0 roots introduced by the beta^2 prefactor are stripped.
    """
    e = np.asarray(energies, dtype=complex).ravel()
    degree = _char_degree(p)
    base = characteristic_polynomial(p, 0.0)
    if degree == 2:
        # c0 = c4 = 0 here; dropping the spurious beta = 0 root leaves
        # c3 beta^2 + (c2 + E^2) beta + c1 = 0.
        a = np.full(e.shape, base[3], dtype=complex)
        b = base[2] + e * e
        cc = np.full(e.shape, base[1], dtype=complex)
        disc = np.sqrt(b * b - 4.0 * a * cc)
        disc = np.where(np.real(np.conj(b) * disc) < 0, -disc, disc)
        q = -0.5 * (b + disc)
        with np.errstate(divide="ignore", invalid="ignore"):
            roots = np.stack([q / a, cc / q], axis=-1)
    else:
        comp = np.zeros(e.shape + (4, 4), dtype=complex)
        comp[..., 1, 0] = 1.0
        comp[..., 2, 1] = 1.0
        comp[..., 3, 2] = 1.0
        comp[..., 0, 3] = -base[0] / base[4]
        comp[..., 1, 3] = -base[1] / base[4]
        comp[..., 2, 3] = -(base[2] + e * e) / base[4]
        comp[..., 3, 3] = -base[3] / base[4]
        roots = np.linalg.eigvals(comp)
    order = np.argsort(np.abs(roots), axis=-1)
    return np.take_along_axis(roots, order, axis=-1)


def _middle_mismatch(p: ModelParams, energies: np.ndarray):
    """Relative modulus mismatch of the middle root pair, plus the pair."""
    roots = _beta_roots_stacked(p, energies)
    mid = roots.shape[-1] // 2
    lower, upper = roots[..., mid - 1], roots[..., mid]
    mism = (np.abs(upper) - np.abs(lower)) / np.abs(lower)
    return mism, lower, upper


def obc_energy_samples(p: ModelParams, cells: int) -> np.ndarray:
    """Open-chain eigenvalues with near-zero edge energies removed."""
    if cells < 40:
        raise ValueError(f"need at least 40 cells for bulk seeds, got {cells}")
    h = real_space_hamiltonian(p, cells, BoundaryCondition.OBC)
    energies = np.linalg.eigvals(h)
    return energies[np.abs(energies) > EDGE_ENERGY_CUTOFF]


def gbz_points_at_energy(p: ModelParams, energy: complex, tol: float):
    """Middle root pair at one energy, or None if the moduli differ.

    The roots are sorted by modulus; the pair (beta_M, beta_M+1) with
    M = degree/2 is returned iff its relative modulus mismatch is < tol.
    """
    mism, lower, upper = _middle_mismatch(p, np.array([energy]))
    if mism[0] < tol:
        return complex(lower[0]), complex(upper[0])
    return None


def circular_gbz_radius(p: ModelParams) -> float:
    """Closed-form contour radius sqrt|t1-gamma| / sqrt|t1+gamma| for t3 = 0."""
    if p.t3 != 0:
        raise NotApplicableError("closed-form radius requires t3 = 0")
    if abs(p.t1) == abs(p.gamma):
        raise SingularRadiusError("|t1| == |gamma| has no finite contour radius")
    return float(np.sqrt(abs(p.a_minus / p.a_plus)))


def _golden_min(f, lo: np.ndarray, hi: np.ndarray, iters: int = 48) -> np.ndarray:
    """Vectorised golden-section minimiser over per-element brackets."""
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        take_left = fc < fd
        hi = np.where(take_left, d, hi)
        lo = np.where(take_left, lo, c)
        c = hi - _INVPHI * (hi - lo)
        d = lo + _INVPHI * (hi - lo)
        fc, fd = f(c), f(d)
    return 0.5 * (lo + hi)


def _golden_refine(p: ModelParams, seeds: np.ndarray, spans: np.ndarray,
                   directions: np.ndarray) -> np.ndarray:
    """Minimise the modulus mismatch along the local band direction."""

    def f(s):
        return _middle_mismatch(p, seeds + s * spans * directions)[0]

    s_best = _golden_min(f, np.full(seeds.shape, -1.0), np.full(seeds.shape, 1.0))
    return seeds + s_best * spans * directions


def _radial_polish(p: ModelParams, points: np.ndarray,
                   window: float = 0.1) -> np.ndarray:
    """Pull interpolated points onto the contour at fixed angle.

    Any beta solves the characteristic equation at E(beta)^2 = R+ R-, so
    the equal-modulus condition becomes a scalar function of the radius
    along each angular ray; minimising it removes the interpolation bias
    without disturbing the uniform angle grid.  The merit function also
    requires beta itself to sit at the middle-pair modulus, which keeps a
    ray from locking onto a different root sheet.
    """
    theta = np.angle(points)

    def merit(log_radius, angle):
        radius = np.exp(log_radius)
        beta = radius * np.exp(1j * angle)
        r_plus, r_minus = offdiagonal_couplings(p, beta)
        mism, lower, upper = _middle_mismatch(p, np.sqrt(r_plus * r_minus))
        off_sheet = np.minimum(np.abs(radius - np.abs(lower)),
                               np.abs(radius - np.abs(upper))) / radius
        return np.maximum(mism, off_sheet)

    log_r = np.log(np.abs(points))
    current = merit(log_r, theta)
    for span in (window, 3.0 * window):
        todo = current > 1e-10
        if not np.any(todo):
            break
        sub_theta = theta[todo]
        best = _golden_min(lambda s: merit(s, sub_theta),
                           log_r[todo] - span, log_r[todo] + span)
        score = merit(best, sub_theta)
        improved = score < current[todo]
        log_r[todo] = np.where(improved, best, log_r[todo])
        current[todo] = np.minimum(score, current[todo])
    return np.exp(log_r) * np.exp(1j * theta)


def compute_gbz(p: ModelParams, opts: GBZOptions | None = None) -> GBZContour:
    """Assemble the contour from an energy sweep over the open-chain spectrum.

    Both members of each accepted root pair are kept, sorted by angle,
    deduplicated, and resampled to a uniform angle grid by periodic linear
    interpolation of log|beta|.
    """
    opts = opts or GBZOptions()
    energies = obc_energy_samples(p, opts.seed_chain_length)

    # E and -E share the characteristic equation; keep one seed per E^2.
    e2 = energies * energies
    order = np.lexsort((e2.imag, e2.real))
    energies, e2 = energies[order], e2[order]
    keep = np.ones(len(energies), dtype=bool)
    keep[1:] = np.abs(np.diff(e2)) > 1e-12
    seeds = energies[keep]

    mism, lower, upper = _middle_mismatch(p, seeds)
    accepted = mism < opts.modulus_tolerance

    if opts.refine and not np.all(accepted):
        todo = ~accepted
        # Local band direction from neighbouring seeds (seeds are sorted
        # along the band by E^2 lexicographic order).
        diffs = np.zeros(len(seeds), dtype=complex)
        if len(seeds) > 1:
            diffs[1:-1] = seeds[2:] - seeds[:-2]
            diffs[0] = seeds[1] - seeds[0]
            diffs[-1] = seeds[-1] - seeds[-2]
        norms = np.abs(diffs)
        directions = np.where(norms > 0, diffs / np.where(norms > 0, norms, 1.0), 1.0)
        gaps = np.abs(np.diff(seeds))
        spans = np.zeros(len(seeds))
        if len(gaps):
            spans[:-1] = gaps
            spans[1:] = np.maximum(spans[1:], gaps)
        spans = np.maximum(spans, 1e-8)
        refined = _golden_refine(p, seeds[todo], spans[todo], directions[todo])
        new_mism, new_lower, new_upper = _middle_mismatch(p, refined)
        ok = new_mism < opts.modulus_tolerance
        idx = np.flatnonzero(todo)[ok]
        mism[idx] = new_mism[ok]
        lower[idx] = new_lower[ok]
        upper[idx] = new_upper[ok]
        accepted[idx] = True

    raw_points = np.concatenate([lower[accepted], upper[accepted]])
    raw_resid = np.concatenate([mism[accepted], mism[accepted]])
    if raw_points.size < MIN_RAW_POINTS:
        raise InsufficientSeedError(
            f"only {raw_points.size} contour points passed the modulus condition; "
            "gapless (TSM) regime or tolerance too tight")

    angles = np.mod(np.angle(raw_points), 2.0 * np.pi)
    order = np.argsort(angles)
    angles, raw_points, raw_resid = angles[order], raw_points[order], raw_resid[order]

    # Collapse duplicate angles, keeping the smaller mismatch residual.
    keep = []
    last_angle = None
    for i in range(len(angles)):
        if last_angle is not None and angles[i] - last_angle < ANGLE_DUPLICATE_TOL:
            if raw_resid[i] < raw_resid[keep[-1]]:
                keep[-1] = i
            continue
        keep.append(i)
        last_angle = angles[i]
    if len(keep) > 1 and (2.0 * np.pi + angles[keep[0]]) - angles[keep[-1]] < ANGLE_DUPLICATE_TOL:
        drop = keep[-1] if raw_resid[keep[-1]] > raw_resid[keep[0]] else keep[0]
        keep = [i for i in keep if i != drop]
    keep = np.array(keep, dtype=int)
    angles, raw_points, raw_resid = angles[keep], raw_points[keep], raw_resid[keep]

    # Periodic linear interpolation of log r over the angle.
    theta = 2.0 * np.pi * np.arange(opts.resample_count) / opts.resample_count
    log_r = np.interp(theta, angles, np.log(np.abs(raw_points)), period=2.0 * np.pi)
    points = np.exp(log_r) * np.exp(1j * theta)
    if opts.refine:
        points = _radial_polish(p, points)

    r_plus, r_minus = offdiagonal_couplings(p, points)
    energies_out = np.sqrt(r_plus * r_minus)

    return GBZContour(points=points, angles=theta, energies=energies_out,
                      closed=True, raw_points=raw_points, raw_residuals=raw_resid)


def unit_circle_contour(n_points: int) -> GBZContour:
    """Bloch contour: the unit circle on a uniform angle grid."""
    theta = 2.0 * np.pi * np.arange(n_points) / n_points
    points = np.exp(1j * theta)
    return GBZContour(points=points, angles=theta,
                      energies=np.full(n_points, np.nan, dtype=complex))
