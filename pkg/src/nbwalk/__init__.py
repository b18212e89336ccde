"""Non-Bloch band theory and lossy dynamics of a split-step quantum walk with a domain wall."""

from .analysis import (EpCriterion, EpEstimate, FitModel, FitResult, GridSpec, accumulated_variance,
                       fit_exponential, fit_power_law, locate_ep, phase_diagram)
from .bandtheory import (BandSpectrum, GbzCircle, PtPhase, QuasiEnergy, beta_roots, bloch_operator,
                         bloch_spectrum, eta_metric, exceptional_theta2, gbz_circle, gbz_radius,
                         nonbloch_spectrum, pt_classify, quasienergies, trace_deviation)
from .dynamics import Scheme, SchemeSpec, Trajectory, corrected_site, corrected_total, evolve, lattice_for
from .errors import (BracketingError, ConfigError, ContractError, DegenerateDispersionError, DomainError,
                     EpProximityError, NbWalkError, ResourceError, SingularityError, SolverError)
from .model import (Boundary, CoinParams, StepOperator, Variant, WalkConfig, balanced_from_lossy,
                    build_step_operator, loss_fraction, loss_parameter)
from .presets import available_presets, load_preset
from .spectra import (EigenSystem, LocalizationReport, PhaseDiagram, SpectralMethod, eigendecompose,
                      localization_report, max_imag_quasienergy, realspace_eigensystem, realspace_spectrum,
                      spectral_loop_area)

__version__ = "0.1.0"
