"""Heat flux in networks of periodically modulated quantum resonators.

Two independent Floquet solvers (frequency-domain Langevin and Fourier-space
master-equation moments), a brute-force time-domain integrator, and
second-order perturbation theory for the forward/backward flux asymmetry
induced by synthetic electric and magnetic fields.
"""

from .model import (
    FloqheatError,
    ValidationError,
    SingularBlockError,
    QuadratureError,
    ConvergenceError,
    PhysicalConstants,
    SI,
    ResonatorNetwork,
    ModulationProtocol,
    PowerMatrix,
    Violation,
    occupation,
    validate,
    build_chain4,
)
from .config import ConfigError, load_config
from .langevin import (
    FloquetSpectrum,
    SidebandBlockSystem,
    assemble_A,
    assemble_sideband_system,
    emitted_power,
    heat_flux_spectrum,
    integrate_power,
    occupation_spectrum,
    spectral_correlations,
)
from .master import (
    FourierSolution,
    MomentIndexMap,
    assemble_Gpm,
    assemble_Mn,
    moment_index_map,
    converged_power_matrix,
    periodic_expectations,
    power_matrix,
    solve_fourier,
)
from .perturbation import (
    PerturbationResult,
    assemble_Npert,
    delta_n14_closed_form,
    delta_n14_general,
    delta_power_weak_coupling,
    perturbation_result,
    power_second_order,
)
from .scenarios import (
    SweepSpec,
    SweepRow,
    MethodComparison,
    compare_methods,
    default_chain,
    rectification,
    run_forward_backward,
    spectrum_run,
    sweep,
)
from .timedomain import (
    MomentSamples,
    cycle_average_power,
    cycle_averaged_moments,
    evolve_to_cycle,
    generator,
)

__version__ = "0.1.0"
