"""Convergence of the soliton residuals and the dispersion relation, per speed."""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from stalab import soliton
from stalab.suites import SuiteResult
from stalab.utils.config import RunConfig, Settings
from stalab.utils.grid_io import write_report_csv

logger = logging.getLogger(__name__)

REST_FRAME_EVENTS = np.array(
    [
        [0.4, 0.5, -0.3, 0.2],
        [1.3, -0.8, 0.6, 1.1],
        [-0.7, 2.0, 0.1, -0.4],
    ]
)


def run(config: RunConfig, out_dir: Path, settings: Settings) -> SuiteResult:
    params = config.params
    result = SuiteResult()
    rows = []
    for v in params.speeds:
        p = soliton.params_from(params.amplitude, params.mass, v, params.phase)
        if params.broken_dispersion:
            p = soliton.with_broken_dispersion(p, params.dispersion_factor)
        tag = f"v{v:g}"
        result.check(f"{tag}_dispersion", abs(p.dispersion_defect()), params.dispersion_tolerance * max(1.0, p.mass**2))
        for residual in soliton.RESIDUALS:
            study = soliton.convergence_study(
                p, residual, params.center, params.extent, params.h, params.order, params.ratio_tolerance
            )
            result.check(
                f"{tag}_{residual}_convergence",
                abs(study.ratio - study.expected_ratio),
                study.tolerance * study.expected_ratio,
            )
            rows.append(
                {
                    "speed": v,
                    "residual": residual,
                    "h": study.h,
                    "coarse_max": study.coarse_max,
                    "fine_max": study.fine_max,
                    "ratio": study.ratio,
                    "converged": study.converged,
                }
            )
        if v == 0.0 and not params.broken_dispersion:
            rest = soliton.rest_frame_check(p, REST_FRAME_EVENTS)
            result.check("rest_frame_g01", rest.g01_max_error, params.rest_frame_tolerance)
        report = soliton.velocity_constraint_report(p, REST_FRAME_EVENTS, settings.eps_scale)
        result.diagnostics[f"{tag}_velocity_constraint_skipped"] = int(np.count_nonzero(report.skipped))
        if report.evaluated:
            result.diagnostics[f"{tag}_velocity_constraint_deviation_max"] = float(np.nanmax(report.deviation))

    frame = pd.DataFrame(rows)
    frame.index.name = "study"
    write_report_csv(out_dir / "soliton_convergence.csv", frame)
    result.artifacts.append("soliton_convergence.csv")
    return result
