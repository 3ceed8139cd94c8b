"""Generalised HJE report over a grid for a classical or a beta-modulated spinor."""

import logging
from pathlib import Path

import numpy as np

from stalab.field_lab import ConstantField, Grid4, ModulatedSpinor, PlaneWaveSpinor, ghje_report
from stalab.spinor_kit import MomentumSpec, boost_rotor
from stalab.suites import SuiteResult
from stalab.utils.config import RunConfig, Settings
from stalab.utils.grid_io import write_report_csv

logger = logging.getLogger(__name__)


def run(config: RunConfig, out_dir: Path, settings: Settings) -> SuiteResult:
    params = config.params
    spec = MomentumSpec(pi=params.pi, a_pot=params.a_pot, mass=params.mass, charge=params.charge)
    if params.family == "classical":
        field = PlaneWaveSpinor(spec)
    else:
        field = ModulatedSpinor(
            rotor=boost_rotor(spec),
            rho0=params.rho0,
            center=params.center,
            width=params.width,
            beta0=params.beta0,
            beta_slope=params.beta_slope,
            momentum=spec.pi,
        )
    mode = "log" if config.strict_paper else params.mode
    grid = Grid4.centered(params.center, params.half_extent, params.h)
    report = ghje_report(field, ConstantField(spec.a_vector()), spec.mass, spec.charge, grid, mode, settings.eps_scale)

    result = SuiteResult()
    result.check("decomposition_residual", report.max_abs("decomposition_residual"), params.decomposition_tolerance)
    if params.family == "classical":
        result.check("variable_mass_defect", float(np.max(np.abs(report.variable_mass - spec.mass))), params.tolerance)
        result.check("constraint_grade3_norm", report.max_abs("constraint_grade3_norm"), params.tolerance)
        result.check("quantum_potential_norm", report.max_abs("quantum_potential_1form"), params.tolerance)
        result.check("ghje_residual_norm", report.max_abs("ghje_residual_1form"), params.tolerance)
    else:
        result.diagnostics.update(
            constraint_grade3_norm_max=report.max_abs("constraint_grade3_norm"),
            quantum_potential_norm_max=report.max_abs("quantum_potential_1form"),
            ghje_residual_norm_max=report.max_abs("ghje_residual_1form"),
        )
    result.diagnostics.update(
        mode=mode,
        nodes=len(report.points),
        masked=report.masked_count,
        beta_range=[float(np.min(report.beta_field)), float(np.max(report.beta_field))],
        variable_mass_range=[float(np.min(report.variable_mass)), float(np.max(report.variable_mass))],
        notes=report.metadata,
    )
    write_report_csv(out_dir / "ghje_report.csv", report.to_frame())
    result.artifacts.append("ghje_report.csv")
    return result
