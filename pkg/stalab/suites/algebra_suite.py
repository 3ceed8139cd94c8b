"""Seeded property sweeps over the algebra kernel, boost rotors and the matrix dictionary."""

import logging
from pathlib import Path

import numpy as np

from stalab import dirac_bridge as db
from stalab import sta_core as sc
from stalab import spinor_kit as sk
from stalab.field_lab.fields import ConstantField, PlaneWaveSpinor
from stalab.field_lab.residuals import dh_residual
from stalab.suites import SuiteResult
from stalab.utils.config import RunConfig, Settings

logger = logging.getLogger(__name__)

MASS_SHIFT = 0.1
EVENT = (0.3, -0.7, 0.2, 1.1)


def _anticommutation() -> float:
    worst = 0.0
    for mu, a in enumerate(sc.GAMMA_UP):
        for nu, b in enumerate(sc.GAMMA_UP):
            target = sc.scalar(2.0 * sc.METRIC[mu]) if mu == nu else sc.Multivector()
            worst = max(worst, float(np.max(np.abs((sc.gp(a, b) + sc.gp(b, a) - target).coeffs))))
    return worst


def _kernel_sweep(rng: np.random.Generator, samples: int) -> dict[str, float]:
    assoc = reverse = homomorphism = 0.0
    for _ in range(samples):
        a, b, c = (sc.Multivector(rng.uniform(-1.0, 1.0, sc.DIM)) for _ in range(3))
        ab = sc.gp(a, b)
        assoc = max(assoc, sc.norm(sc.gp(ab, c) - sc.gp(a, sc.gp(b, c))))
        reverse = max(reverse, sc.norm(sc.reverse(ab) - sc.gp(sc.reverse(b), sc.reverse(a))))
        homomorphism = max(homomorphism, float(np.max(np.abs(db.rep(ab) - db.rep(a) @ db.rep(b)))))
    return {"associativity": assoc, "reversion": reverse, "homomorphism": homomorphism}


def _boost_sweep(rng: np.random.Generator, samples: int, mass_range, max_rapidity: float) -> dict[str, float]:
    unit = velocity = exp_form = agreement = 0.0
    zero = (0.0, 0.0, 0.0, 0.0)
    for _ in range(samples):
        spec = sk.random_on_shell(rng, mass_range, max_rapidity)
        r = sk.boost_rotor(spec)
        unit = max(unit, sc.norm(sc.gp(r, sc.reverse(r)) - sc.ONE))
        velocity = max(velocity, sc.norm(sc.sandwich(r, sc.G0) - spec.kinetic() / spec.mass))
        exp_form = max(exp_form, sc.norm(r - sk.boost_rotor_exp(spec)))

        shifted = spec.mass + MASS_SHIFT
        psi = PlaneWaveSpinor(spec)
        clifford = sc.norm(dh_residual(psi, ConstantField(spec.a_vector()), shifted, spec.charge, EVENT))
        matrix = db.matrix_dirac_residual(spec, EVENT, mass=shifted)
        expected = MASS_SHIFT * sc.norm(sc.gp(psi.value(EVENT), sc.G0))
        agreement = max(agreement, abs(clifford - matrix), abs(clifford - expected),
                        db.matrix_dirac_residual(spec, zero))
    return {
        "boost_rotor_unit": unit,
        "boost_rotor_velocity": velocity,
        "boost_rotor_exponential_form": exp_form,
        "matrix_clifford_residual_agreement": agreement,
    }


def _dictionary_sweep(rng: np.random.Generator, samples: int) -> dict[str, float]:
    worst = dict.fromkeys(db.DictionaryReport._fields, 0.0)
    for _ in range(samples):
        report = db.dictionary_check(sk.random_even(rng))
        for name, value in report._asdict().items():
            worst[name] = max(worst[name], value)
    return {f"dictionary_{name}": value for name, value in worst.items()}


def run(config: RunConfig, out_dir: Path, settings: Settings) -> SuiteResult:
    params = config.params
    rng = np.random.default_rng(config.seed)
    result = SuiteResult()
    result.check("anticommutation", _anticommutation(), 0.0)
    for name, value in _kernel_sweep(rng, params.samples).items():
        result.check(name, value, params.tolerance)
    for name, value in _boost_sweep(rng, params.samples, params.mass_range, params.max_rapidity).items():
        result.check(name, value, params.tolerance)
    for name, value in _dictionary_sweep(rng, params.samples).items():
        result.check(name, value, params.tolerance)
    result.diagnostics["faithfulness_rank"] = db.faithfulness_rank()
    result.diagnostics["samples"] = params.samples
    return result
