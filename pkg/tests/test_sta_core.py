import hashlib
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, seed, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm

from stalab import sta_core as sc
from stalab.dirac_bridge import rep
from stalab.utils.errors import MultivectorParseError, NotABiform, SingularVersor
from stalab.utils.summary import canonical_json

coeffs16 = arrays(np.float64, sc.DIM, elements=st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False))
bivector6 = arrays(np.float64, 6, elements=st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False))


def _bivector(c6) -> sc.Multivector:
    c = np.zeros(sc.DIM)
    c[5:11] = c6
    return sc.Multivector(c)


def test_blade_order_and_grades():
    assert sc.BLADE_NAMES[:5] == ["1", "g0", "g1", "g2", "g3"]
    assert sc.BLADE_NAMES[5:11] == ["g01", "g02", "g03", "g12", "g13", "g23"]
    assert sc.BLADE_NAMES[15] == "g0123"
    assert list(sc.GRADES) == [0, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 4]


@pytest.mark.parametrize("mu", range(4))
@pytest.mark.parametrize("nu", range(4))
def test_generators_anticommute_exactly(mu, nu):
    a, b = sc.GAMMA_UP[mu], sc.GAMMA_UP[nu]
    expected = sc.scalar(2.0 * sc.METRIC[mu]) if mu == nu else sc.Multivector()
    assert sc.gp(a, b) + sc.gp(b, a) == expected


def test_package_imports_cleanly():
    root = Path(__file__).resolve().parent.parent
    done = subprocess.run([sys.executable, "-c", "import stalab.cli"], cwd=root, capture_output=True, text=True)
    assert done.returncode == 0, done.stderr


def test_product_table_self_check(monkeypatch):
    sc._check_anticommutation()
    broken = {**sc._TABLES, "gp": sc._TABLES["gp"].copy()}
    # g0 g1 = 2 g01 while g1 g0 = -g01
    broken["gp"][1, 2, 5] += 1.0
    monkeypatch.setattr(sc, "_TABLES", broken)
    with pytest.raises(RuntimeError):
        sc._check_anticommutation()


def test_named_constants():
    assert sc.G21 == -sc.blade("g12")
    assert sc.G30 == -sc.blade("g03")
    assert sc.gp(sc.G5, sc.G5) == sc.scalar(-1.0)
    assert sc.gp(sc.G21, sc.G21) == sc.scalar(-1.0)
    assert sc.GAMMA_DOWN[0] == sc.G0
    assert sc.GAMMA_DOWN[2] == -sc.G2


@seed(11)
@given(coeffs16, coeffs16, coeffs16)
def test_product_is_associative(a, b, c):
    left = sc.gp(sc.gp(a, b), c)
    right = sc.gp(a, sc.gp(b, c))
    assert left.allclose(right, atol=1e-12)


@seed(12)
@given(coeffs16, coeffs16)
def test_reverse_is_an_anti_automorphism(a, b):
    assert sc.reverse(sc.gp(a, b)).allclose(sc.gp(sc.reverse(b), sc.reverse(a)), atol=1e-12)


@given(coeffs16)
def test_grades_partition_the_multivector(a):
    total = sum((sc.grade(a, k) for k in range(5)), sc.Multivector())
    assert total.allclose(a, atol=0.0)
    assert sc.even_part(a).allclose(sc.grade(a, 0) + sc.grade(a, 2) + sc.grade(a, 4), atol=0.0)


def test_grade_out_of_range():
    with pytest.raises(ValueError):
        sc.grade(sc.ONE, 5)


def test_contractions_on_vectors():
    a, b = sc.vector(1.0, 2.0, 0.0, 0.0), sc.vector(0.5, 0.0, -1.0, 3.0)
    assert sc.lcontract(a, b) == sc.scalar(sc.dot(a, b))
    # a ⌟ (b ∧ c) = (a.b) c - (a.c) b
    c = sc.vector(0.0, 1.0, 1.0, 0.0)
    expected = sc.vector_components(c) * sc.dot(a, b) - sc.vector_components(b) * sc.dot(a, c)
    np.testing.assert_allclose(sc.vector_components(sc.lcontract(a, sc.wedge(b, c))), expected, atol=1e-14)
    assert sc.rcontract(sc.wedge(b, c), a).allclose(-sc.lcontract(a, sc.wedge(b, c)))


def test_dot_uses_the_metric():
    assert sc.dot(sc.G0, sc.G0) == 1.0
    assert sc.dot(sc.G3, sc.G3) == -1.0
    assert sc.dot(sc.vector(2.0, 1.0, 0.0, 0.0), sc.vector(2.0, 1.0, 0.0, 0.0)) == 3.0


@given(coeffs16)
def test_double_dual_negates(a):
    assert sc.dual(sc.dual(a)).allclose(-sc.Multivector(a), atol=1e-14)


def test_grade_mask():
    assert sc.grade_mask(sc.ONE + sc.G21) == frozenset({0, 2})
    assert sc.grade_mask(sc.vector(1e-15, 0, 0, 0), tol=1e-12) == frozenset()


@pytest.mark.parametrize("theta", [0.0, 0.3, 2.0, -5.0])
def test_exp_of_rotation_plane(theta):
    expected = sc.scalar(math.cos(theta)) + sc.G21 * math.sin(theta)
    assert sc.exp_biform(sc.G21 * theta).allclose(expected, atol=1e-14)


@pytest.mark.parametrize("chi", [0.1, 1.0, 3.0])
def test_exp_of_boost_plane(chi):
    g01 = sc.blade("g01")
    expected = sc.scalar(math.cosh(chi)) + g01 * math.sinh(chi)
    assert sc.exp_biform(g01 * chi).allclose(expected, atol=1e-12 * math.cosh(chi))


@seed(3)
@given(bivector6)
def test_exp_matches_matrix_exponential(c6):
    b = _bivector(c6)
    np.testing.assert_allclose(rep(sc.exp_biform(b)), expm(rep(b)), atol=1e-10)


@given(bivector6)
def test_exp_of_bivector_is_a_rotor(c6):
    r = sc.exp_biform(_bivector(c6))
    assert sc.gp(r, sc.reverse(r)).allclose(sc.ONE, atol=1e-10)


def test_exp_rejects_other_grades():
    with pytest.raises(NotABiform):
        sc.exp_biform(sc.G0 + sc.G21)


def test_versor_inverse_of_even_element(rng):
    for _ in range(20):
        c = np.zeros(sc.DIM)
        c[[0, 5, 6, 7, 8, 9, 10, 15]] = rng.normal(size=8)
        a = sc.Multivector(c)
        assert sc.gp(a, sc.versor_inverse(a)).allclose(sc.ONE, atol=1e-10)
        assert sc.gp(sc.versor_inverse(a), a).allclose(sc.ONE, atol=1e-10)


def test_versor_inverse_of_vector():
    v = sc.vector(2.0, 1.0, 0.5, 0.0)
    assert sc.gp(v, sc.versor_inverse(v)).allclose(sc.ONE, atol=1e-14)


def test_null_vector_has_no_inverse():
    with pytest.raises(SingularVersor):
        sc.versor_inverse(sc.G0 + sc.G1)


def test_multivector_is_read_only():
    a = sc.vector(1.0, 2.0, 3.0, 4.0)
    with pytest.raises(ValueError):
        a.coeffs[0] = 5.0
    assert a["g2"] == 3.0
    assert hash(a) == hash(sc.vector(1.0, 2.0, 3.0, 4.0))


def test_format_and_parse():
    a = sc.Multivector(np.arange(sc.DIM) * 0.1 - 0.7)
    assert sc.parse_multivector(sc.format_multivector(a)) == a
    assert sc.format_multivector(sc.ONE, compact=True) == "1.0"
    assert sc.parse_multivector("2 - 0.5 g0 + g0123") == sc.scalar(2.0) - sc.G0 * 0.5 + sc.G5


def test_parse_accepts_non_canonical_blades():
    assert sc.parse_multivector("g21") == sc.G21
    assert sc.parse_multivector("3 g10") == -3.0 * sc.blade("g01")


@pytest.mark.parametrize("text", ["", "g0 g1", "1 + + g0", "g4", "abc"])
def test_parse_rejects_malformed_text(text):
    with pytest.raises(MultivectorParseError):
        sc.parse_multivector(text)


def test_convention_hash_is_stable():
    digest = sc.convention_hash()
    assert len(digest) == 64
    assert digest == hashlib.sha256(canonical_json(sc.convention_table()).encode("utf-8")).hexdigest()
    assert sc.convention_table()["metric"] == [1.0, -1.0, -1.0, -1.0]
