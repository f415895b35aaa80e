"""GBZ topology toolkit for 1D non-Hermitian lattices."""

from .errors import (AmbiguousLocalizationError, ConfigError,
                     DegeneratePolynomialError, EPContourError,
                     HalfFillingError, InsufficientSeedError, NBTopoError,
                     NearDefectiveError, NotApplicableError,
                     PairingViolationError, SingularRadiusError,
                     SingularReferenceError)
from .gbz import (GBZContour, GBZOptions, circular_gbz_radius, compute_gbz,
                  gbz_points_at_energy, obc_energy_samples, polynomial_roots,
                  unit_circle_contour)
from .invariants import (PhaseStatus, PolarizationRecord, RestaResult,
                         WilsonLoopResult, bloch_polarization,
                         chiral_pairing_check, circle_distance,
                         classify_phase, entanglement_polarization,
                         flux_polarization, left_partition_projector,
                         nonbloch_polarization, resta_polarization)
from .model import (BoundaryCondition, ModelParams, bloch_hamiltonian,
                    characteristic_polynomial, nonbloch_hamiltonian,
                    real_space_hamiltonian, spectral_winding)
from .spectra import (BiorthogonalEigensystem, CorrelationMatrix,
                      EntanglementReport, biorth_eig, correlation_matrix,
                      entanglement_spectrum, occupied_projector)
from .surrogate import (DecayClass, DecayProfile, SurrogateHamiltonian,
                        build_surrogate, classify_decay, default_truncation,
                        hopping_coefficient, hopping_decay_profile)

__version__ = "0.1.0"
