"""Invariant factors of a single multivector given in text form."""

import logging
from pathlib import Path

from stalab import sta_core as sc
from stalab import spinor_kit as sk
from stalab.suites import SuiteResult
from stalab.utils.config import RunConfig, Settings
from stalab.utils.errors import ConfigError, MultivectorParseError, NonClassicalBeta

logger = logging.getLogger(__name__)


def run(config: RunConfig, out_dir: Path, settings: Settings) -> SuiteResult:
    params = config.params
    try:
        psi = sc.parse_multivector(params.multivector)
    except MultivectorParseError as exc:
        raise ConfigError(f"decompose.multivector: {exc}") from exc

    rho, beta, rotor = sk.invariant_decompose(psi, settings.eps_scale)
    result = SuiteResult()
    result.check("recomposition", sc.norm(sk.compose(rho, beta, rotor) - psi), params.tolerance * max(1.0, rho))
    result.check("rotor_unit", sc.norm(sc.gp(rotor, sc.reverse(rotor)) - sc.ONE), params.tolerance)
    result.diagnostics.update(
        rho=rho,
        beta=beta,
        rotor=sc.format_multivector(rotor, compact=True),
        classical=sk.beta_distance(beta) <= sk.BETA_TOL,
    )
    try:
        result.diagnostics["velocity"] = sc.format_multivector(sk.velocity(psi, settings.eps_scale), compact=True)
    except NonClassicalBeta:
        logger.info("beta = %.6g is not classical; no velocity reported", beta)
    return result
