from stalab.field_lab.equivalence import EquivalenceReport, equivalence_suite, extract_phase, phase_gradient
from stalab.field_lab.fields import (
    AnalyticField,
    ConstantField,
    CoordinateField,
    LinearField,
    ModulatedSpinor,
    MultivectorField,
    PlaneWaveSpinor,
    ProductField,
    ScaledField,
    SumField,
    affine_scalar,
)
from stalab.field_lab.ghje import GhjeReport, ghje_report
from stalab.field_lab.grid import (
    Grid4,
    GridField,
    grid_dalembertian,
    grid_dirac_op,
    grid_gradient,
    sample,
)
from stalab.field_lab.residuals import (
    dh_residual,
    dirac_op,
    exterior_derivative,
    hje_residual,
    log_derivative_check,
    lorentz_consistency,
    nonlinear_dh_residual,
    velocity_gradient_identity,
)
