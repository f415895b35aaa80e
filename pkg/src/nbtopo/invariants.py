"""Polarization invariants: Wilson loops, entanglement, Resta and flux.

All mod-1 quantities are compared with the circle distance
d(a, b) = min_k |a - b + k|, k in {-1, 0, 1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (AmbiguousLocalizationError, EPContourError,
                     HalfFillingError, InsufficientSeedError,
                     NearDefectiveError, PairingViolationError,
                     SingularReferenceError)
from .gbz import GBZContour, GBZOptions, compute_gbz, unit_circle_contour
from .model import (ModelParams, nonbloch_hamiltonians,
                    offdiagonal_couplings, spectral_winding)
from .spectra import (BiorthogonalEigensystem, CorrelationMatrix,
                      EntanglementReport, biorth_eig, correlation_matrix,
                      entanglement_spectrum, occupied_projector)
from .surrogate import (DecayClass, build_surrogate, default_truncation,
                        hopping_decay_profile)

OVERLAP_FLOOR = 1e-12
IMAG_RESIDUE_TOL = 1e-6
LOCALIZATION_TOL = 0.1
XI_INTEGER_EXEMPTION = 0.011


def circle_distance(a: float, b: float) -> float:
    """Distance between two phases living on the unit interval mod 1."""
    d = (a - b) % 1.0
    return min(d, 1.0 - d)


@dataclass
class WilsonLoopResult:
    p_beta: float        # winding phase / 2pi, in [0, 1)
    w_norm: float        # loop norm; pinned to 1 in gapped phases
    n_points: int
    raw_norm: float = None   # bare product norm, carries an O(1/N) metric deficit


def _wilson_loop(p: ModelParams, betas: np.ndarray,
                 require_closure: bool = True) -> WilsonLoopResult:
    """Cyclic biorthogonal overlap product along an ordered beta loop.

    The occupied band is continuity-tracked (maximal-overlap continuation
    of the energy branch), seeded where Re E < 0; a pointwise sign rule
    would misassign the band where Re E changes sign along the contour.

    The loop phase comes from the product of biorthonormalised links
    <u_L(b_j)|u_R(b_j+1)>.  The reported norm is the continuum value
    exp(Re oint <u_L|du_R>) evaluated by the (spectrally accurate)
    central trapezoidal sum: the bare product norm shrinks towards it
    only as O(1/N) through the quantum-metric deficit, while near an
    exceptional point the connection integral diverges and the norm
    collapses to zero.
    """
    r_plus, r_minus = offdiagonal_couplings(p, betas)
    branch = np.sqrt(r_plus * r_minus)
    # Continuity of the energy branch: flip wherever the sign-flipped
    # square root is the closer continuation.
    flip = np.abs(branch + np.roll(branch, 1)) < np.abs(branch - np.roll(branch, 1))
    flip[0] = False
    sign = np.cumprod(np.where(flip, -1.0, 1.0))
    energy = sign * branch
    if energy[0].real > 0 or (energy[0].real == 0 and energy[0].imag > 0):
        energy = -energy

    # Eigenframe u_R = (R+, E), u_L = (1/(2 R+), 1/(2E)); <u_L|u_R> = 1.
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio_a = np.roll(r_plus, -1) / r_plus
        ratio_e = np.roll(energy, -1) / energy
        links = 0.5 * (ratio_a + ratio_e)
    if not np.all(np.isfinite(links)):
        raise EPContourError("eigenframe degenerates on the contour (E or R+ vanishes)")
    if np.min(np.abs(links)) < OVERLAP_FLOOR:
        j = int(np.argmin(np.abs(links)))
        raise EPContourError(
            f"overlap collapsed to {np.min(np.abs(links)):.2e} at contour index {j}; "
            "exceptional point on the integration path")
    # The wrap link used sign[0]; if the branch returns sign-flipped the
    # occupied band does not close, i.e. the loop threads an odd number
    # of exceptional degeneracies.
    closure = np.abs(energy[0] - energy[-1]) <= np.abs(energy[0] + energy[-1])
    if not closure and require_closure:
        raise EPContourError(
            "occupied band fails to close around the contour; "
            "exceptional points inside the loop")

    w = complex(np.prod(links))
    if closure:
        conn = 0.5 * ((np.roll(r_plus, -1) - np.roll(r_plus, 1)) / (2.0 * r_plus)
                      + (np.roll(energy, -1) - np.roll(energy, 1)) / (2.0 * energy))
        norm = float(np.exp(-abs(float(np.sum(conn.real)))))
    else:
        # Open band (point-gapped loop): no continuum norm exists, report
        # the bare product norm as the breakdown diagnostic.
        norm = float(np.abs(w))
    return WilsonLoopResult(p_beta=float(np.angle(w) / (2.0 * np.pi) % 1.0),
                            w_norm=norm,
                            n_points=len(betas),
                            raw_norm=float(np.abs(w)))


def nonbloch_polarization(contour: GBZContour, p: ModelParams) -> WilsonLoopResult:
    """Discrete Wilson loop of the occupied band along the contour."""
    return _wilson_loop(p, contour.points)


def bloch_polarization(p: ModelParams, n_k: int = 1024) -> WilsonLoopResult:
    """Same loop on the unit circle: the periodic-boundary invariant.

    In a point-gapped regime the Bloch band does not close around the
    circle; the product is still reported (its failure to quantize is
    the standard symptom of the skin effect breaking Bloch theory).
    """
    return _wilson_loop(p, unit_circle_contour(n_k).points, require_closure=False)


def left_partition_projector(cell_count: int) -> np.ndarray:
    """Diagonal site mask selecting the first floor(|A|/2) cells of A."""
    sites = 2 * cell_count
    mask = np.zeros(sites)
    mask[: 2 * (cell_count // 2)] = 1.0
    return mask


def entanglement_polarization(report: EntanglementReport,
                              pi_left: np.ndarray) -> float:
    """Sum of eigenvalues weighted by left-occupation integers, mod 1.

    Per degenerate class the basis-invariant trace of the projected
    density Tr(P_class Pi_L) counts the left-localised members; classes
    whose eigenvalue is itself (near-)integer contribute nothing mod 1,
    so their delocalised bulk members are exempt from the integrality
    guard.
    """
    if report.right_vectors is None or report.left_vectors is None:
        raise ValueError("report carries no eigenvectors")
    right = report.right_vectors
    left = report.left_vectors
    weights = np.asarray(pi_left, dtype=float)
    total = 0.0 + 0.0j
    for group in report.groups:
        idx = group.indices
        n_raw = complex(np.sum(left[:, idx].conj() * (weights[:, None] * right[:, idx])))
        n_int = int(round(n_raw.real))
        fractional = abs(group.xi - round(group.xi.real)) > XI_INTEGER_EXEMPTION
        if fractional and abs(n_raw.real - n_int) > LOCALIZATION_TOL:
            raise AmbiguousLocalizationError(
                f"class at xi = {group.xi:.6g} has occupation trace "
                f"{n_raw.real:.4f}, not close to an integer")
        group.n_left_raw = float(n_raw.real)
        group.n_left = n_int
        total += n_int * group.xi
    if abs(total.imag) >= IMAG_RESIDUE_TOL:
        raise PairingViolationError(
            f"imaginary residue {total.imag:.2e} in the polarization sum")
    return float(total.real % 1.0)


@dataclass
class RestaResult:
    p_resta: float           # raw twist phase / 2pi, in [0, 1)
    p_corrected: float       # parity-offset corrected (odd L only)
    det_norm: float          # |det S|, stability diagnostic
    parity_offset: float
    ill_defined: bool


def resta_polarization(sys: BiorthogonalEigensystem, cells: int,
                       bands: int = 1) -> RestaResult:
    """Phase of det of the position-twist overlap between ground states.

    Both sublattices carry the integer cell coordinate.  The permutation
    parity offset (L-1)/2 * M is only defined for odd L; even L reports
    the raw phase unchanged.
    """
    occ = sys.occupied_mask
    if np.any(np.abs(sys.energies.real) < 1e-8):
        raise HalfFillingError("occupied set ambiguous for the twist overlap")
    x_cell = np.repeat(np.arange(cells), 2)
    twist = np.exp(2j * np.pi * x_cell / cells)
    right_occ = sys.right_vectors[:, occ]
    left_occ = sys.left_vectors[:, occ]
    overlap = left_occ.conj().T @ (twist[:, None] * right_occ)
    sign, log_abs = np.linalg.slogdet(overlap)
    p_raw = float(np.angle(sign) / (2.0 * np.pi) % 1.0)
    det_norm = float(np.exp(log_abs))
    if cells % 2 == 1:
        offset = 0.5 * ((((cells - 1) // 2) * bands) % 2)
    else:
        offset = 0.0
    return RestaResult(p_resta=p_raw,
                       p_corrected=float((p_raw - offset) % 1.0),
                       det_norm=det_norm,
                       parity_offset=offset,
                       ill_defined=det_norm < 1e-10)


def flux_polarization(corr: CorrelationMatrix) -> float:
    """Boundary charge Tr(C^A) mod 1 from adiabatic flux insertion."""
    trace = complex(np.trace(corr.entries))
    if abs(trace.imag) >= IMAG_RESIDUE_TOL:
        raise PairingViolationError(
            f"imaginary trace residue {trace.imag:.2e} in the correlation matrix")
    return float(trace.real % 1.0)


def chiral_pairing_check(report: EntanglementReport) -> float:
    """Worst-case violation of the xi <-> 1 - xi pairing."""
    return report.pairing_residual


class PhaseStatus(Enum):
    GAPPED = "Gapped"
    TSM = "TSM"
    EP_NEAR = "EPNear"


@dataclass
class PolarizationRecord:
    """One parameter point: every invariant the pipeline can produce."""

    params: ModelParams
    cells: int
    status: PhaseStatus = None
    chi: float = None
    p_beta: float = None
    w_norm: float = None
    p_resta: float = None
    det_s_norm: float = None
    p_flux: float = None
    p_bloch: float = None
    winding: int = None
    ent_gap: float = None
    pairing_residual: float = None
    alpha: float = None


def classify_phase(p: ModelParams, cells: int,
                   gbz_options: GBZOptions | None = None,
                   n_max: int = None,
                   n_k_bloch: int = 1024,
                   subsystem_start: int = 0,
                   subsystem_cells: int = None) -> PolarizationRecord:
    """Run the full pipeline at one parameter point.

    Gapless or exceptional-point failures are absorbed into the status
    field (TSM / EPNear) with the affected invariants left undefined.
    """
    rec = PolarizationRecord(params=p, cells=cells)
    try:
        rec.p_bloch = bloch_polarization(p, n_k_bloch).p_beta
    except EPContourError:
        pass
    try:
        rec.winding = spectral_winding(p, 0.0)
    except SingularReferenceError:
        pass

    try:
        contour = compute_gbz(p, gbz_options)
    except InsufficientSeedError:
        rec.status = PhaseStatus.TSM
        return rec

    try:
        loop = nonbloch_polarization(contour, p)
        rec.p_beta, rec.w_norm = loop.p_beta, loop.w_norm
    except EPContourError:
        rec.status = PhaseStatus.EP_NEAR
        return rec

    n_max = n_max if n_max is not None else default_truncation(cells)
    surr = build_surrogate(contour, p, cells, n_max)
    if surr.n_max >= 16:
        profile = hopping_decay_profile(surr)
        if profile.classification is DecayClass.POWER_LAW:
            rec.alpha = profile.alpha

    try:
        sys = biorth_eig(surr.realized)
    except NearDefectiveError:
        rec.status = PhaseStatus.EP_NEAR
        return rec
    try:
        projector = occupied_projector(sys)
    except HalfFillingError:
        rec.status = PhaseStatus.TSM
        return rec

    count = subsystem_cells if subsystem_cells is not None else cells // 2
    corr = correlation_matrix(projector, subsystem_start, count)
    try:
        report = entanglement_spectrum(corr)
    except NearDefectiveError:
        rec.status = PhaseStatus.EP_NEAR
        return rec
    rec.ent_gap = report.gap
    rec.pairing_residual = report.pairing_residual
    try:
        rec.p_flux = flux_polarization(corr)
    except PairingViolationError:
        pass

    try:
        resta = resta_polarization(sys, cells)
        rec.p_resta = resta.p_corrected if cells % 2 == 1 else resta.p_resta
        rec.det_s_norm = resta.det_norm
    except HalfFillingError:
        pass

    if report.midgap_count > 2:
        # Entanglement spectrum has delocalised into the midgap window:
        # the gapless regime, where the invariant is undefined.
        rec.status = PhaseStatus.TSM
        return rec

    try:
        rec.chi = entanglement_polarization(report, left_partition_projector(count))
    except (AmbiguousLocalizationError, PairingViolationError):
        rec.status = PhaseStatus.TSM
        return rec

    rec.status = PhaseStatus.GAPPED
    return rec
