"""Complex 4x4 matrix image of Cl(1,3) and the column-spinor dictionary.

This is the only module that uses complex numbers. ``rep`` sends ``g_mu`` to
the standard-representation Dirac matrices; an even multivector corresponds
to the first column of its matrix, and right multiplication by ``g21`` acts
as the complex unit on that column.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from stalab import sta_core as sc
from stalab.sta_core import Multivector
from stalab.spinor_kit import EvenMultivector, MomentumSpec, as_even, classical_spinor

logger = logging.getLogger(__name__)

ComplexMatrix4 = np.ndarray
ColumnSpinor = np.ndarray

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# standard (Dirac) representation, upper indices
DIRAC_GAMMA = (
    np.block([[_I2, _Z2], [_Z2, -_I2]]),
    *(np.block([[_Z2, s], [-s, _Z2]]) for s in PAULI),
)


def _blade_matrices() -> np.ndarray:
    mats = np.empty((sc.DIM, 4, 4), dtype=complex)
    for idx, indices in enumerate(sc.BLADES):
        m = np.eye(4, dtype=complex)
        for i in indices:
            m = m @ DIRAC_GAMMA[i]
        mats[idx] = m
    return mats


BLADE_MATRICES = _blade_matrices()
# gamma^0 gamma^1 gamma^2 gamma^3 as a matrix product
GAMMA5_MATRIX = BLADE_MATRICES[15]

_C0, _C01, _C02, _C03, _C12, _C13, _C23, _C0123 = 0, 5, 6, 7, 8, 9, 10, 15


def rep(a) -> ComplexMatrix4:
    """Matrix image of a multivector (or a batch of coefficient arrays)."""
    c = a.coeffs if isinstance(a, Multivector) else np.asarray(a, dtype=np.float64)
    return np.einsum("...i,ijk->...jk", c, BLADE_MATRICES)


def column_from_even(psi: Multivector) -> ColumnSpinor:
    c = as_even(psi).coeffs
    return np.array(
        [
            c[_C0] - 1j * c[_C12],
            -c[_C13] - 1j * c[_C23],
            c[_C03] - 1j * c[_C0123],
            c[_C01] + 1j * c[_C02],
        ]
    )


def even_from_column(col: ColumnSpinor) -> EvenMultivector:
    col = np.asarray(col, dtype=complex).reshape(4)
    c = np.zeros(sc.DIM)
    c[_C0], c[_C12] = col[0].real, -col[0].imag
    c[_C13], c[_C23] = -col[1].real, -col[1].imag
    c[_C03], c[_C0123] = col[2].real, -col[2].imag
    c[_C01], c[_C02] = col[3].real, col[3].imag
    return EvenMultivector(c)


def d20_matrix(col: ColumnSpinor) -> ComplexMatrix4:
    """Full matrix of an even element rebuilt from its first column."""
    p1, p2, p3, p4 = np.asarray(col, dtype=complex).reshape(4)
    cj = np.conj
    return np.array(
        [
            [p1, -cj(p2), p3, cj(p4)],
            [p2, cj(p1), p4, -cj(p3)],
            [p3, cj(p4), p1, -cj(p2)],
            [p4, -cj(p3), p2, cj(p1)],
        ]
    )


def primitive_idempotent() -> ComplexMatrix4:
    """Matrix of (1 + g0)/2 (1 - i g21)/2, which projects onto the first column."""
    half_time = (np.eye(4) + rep(sc.G0)) / 2
    half_spin = (np.eye(4) - 1j * rep(sc.G21)) / 2
    return half_time @ half_spin


def faithfulness_rank() -> int:
    """Rank of rep as a real-linear map R^16 -> R^32."""
    flat = BLADE_MATRICES.reshape(sc.DIM, 16)
    real = np.concatenate([flat.real, flat.imag], axis=1)
    return int(np.linalg.matrix_rank(real))


def _validate() -> None:
    eta = np.diag(sc.METRIC)
    for mu in range(4):
        for nu in range(4):
            anti = DIRAC_GAMMA[mu] @ DIRAC_GAMMA[nu] + DIRAC_GAMMA[nu] @ DIRAC_GAMMA[mu]
            if not np.allclose(anti, 2 * eta[mu, nu] * np.eye(4)):
                raise RuntimeError(f"Dirac matrices violate anticommutation at ({mu}, {nu})")
    for idx in np.flatnonzero(sc.GRADES % 2 == 0):
        e = np.zeros(sc.DIM)
        e[idx] = 1.0
        m = BLADE_MATRICES[idx]
        if not np.allclose(m, d20_matrix(m[:, 0])):
            raise RuntimeError(f"column pattern mismatch for blade {sc.BLADE_NAMES[idx]}")
        if not np.allclose(m[:, 0], column_from_even(Multivector(e))):
            raise RuntimeError(f"column map mismatch for blade {sc.BLADE_NAMES[idx]}")
    if not np.allclose(primitive_idempotent(), np.diag([1, 0, 0, 0])):
        raise RuntimeError("idempotent does not select the first column")


_validate()


class DictionaryReport(NamedTuple):
    gamma_mu: float
    imaginary_unit: float
    gamma5: float
    dirac_adjoint: float
    hermitian_adjoint: float
    complex_conjugate: float

    def max_residual(self) -> float:
        return max(self)


def dictionary_check(psi: Multivector) -> DictionaryReport:
    """Residuals of the six matrix/Clifford correspondences for one spinor."""
    psi = as_even(psi)
    big = column_from_even(psi)
    g0 = sc.G0

    gamma_mu = max(
        float(np.linalg.norm(rep(gl) @ big - column_from_even(sc.gp(sc.gp(gl, psi), g0))))
        for gl in sc.GAMMA_DOWN
    )
    imaginary_unit = float(np.linalg.norm(1j * big - column_from_even(sc.gp(psi, sc.G21))))
    gamma5 = float(np.linalg.norm(1j * GAMMA5_MATRIX @ big - column_from_even(sc.gp(psi, sc.blade("g03")))))

    rev = sc.reverse(psi)
    bar = big.conj() @ DIRAC_GAMMA[0]
    dirac_adjoint = float(np.linalg.norm(bar - rep(rev)[0, :]))
    hermitian_adjoint = float(np.linalg.norm(big.conj() - rep(sc.gp(sc.gp(g0, rev), g0))[0, :]))
    complex_conjugate = float(
        np.linalg.norm(big.conj() - column_from_even(-sc.gp(sc.gp(sc.G2, psi), sc.G2)))
    )
    return DictionaryReport(gamma_mu, imaginary_unit, gamma5, dirac_adjoint, hermitian_adjoint, complex_conjugate)


def plane_wave_column(spec: MomentumSpec, x, amplitude: float = 1.0) -> ColumnSpinor:
    """Psi(x) = Psi_0 exp(i S(x)) with S(x) = S_0 - Pi_mu x^mu."""
    x = np.asarray(x, dtype=np.float64)
    psi0 = classical_spinor(spec.model_copy(update={"action_phase": 0.0}))
    s = spec.action_phase - float(np.dot(spec.pi, x))
    return amplitude * column_from_even(psi0) * np.exp(1j * s)


def plane_wave_column_gradient(spec: MomentumSpec, x, amplitude: float = 1.0) -> np.ndarray:
    """Rows d_mu Psi = -i Pi_mu Psi."""
    col = plane_wave_column(spec, x, amplitude)
    return -1j * np.asarray(spec.pi)[:, None] * col[None, :]


def matrix_dirac_residual(spec: MomentumSpec, x=(0.0, 0.0, 0.0, 0.0), mass: float | None = None,
                          amplitude: float = 1.0) -> float:
    """Norm of i gamma^mu (d_mu - i e A_mu) Psi - m Psi on the plane wave of ``spec``.

    ``mass`` replaces the mass in the equation only; the wave is still built
    from ``spec``.
    """
    m = spec.mass if mass is None else mass
    col = plane_wave_column(spec, x, amplitude)
    grad = plane_wave_column_gradient(spec, x, amplitude)
    out = -m * col
    for mu in range(4):
        covariant = grad[mu] - 1j * spec.charge * spec.a_pot[mu] * col
        out = out + 1j * (DIRAC_GAMMA[mu] @ covariant)
    return float(np.linalg.norm(out))
