"""Dense real Clifford algebra Cl(1,3).

A multivector is stored as 16 float64 coefficients on the canonical blades,
ordered by grade and then lexicographically::

    1, g0, g1, g2, g3, g01, g02, g03, g12, g13, g23,
    g012, g013, g023, g123, g0123

``g0..g3`` are the generators gamma^0..gamma^3 with metric (+,-,-,-). Every
product table is derived here from the anticommutation rule, nothing is
entered by hand. All kernels work on arrays of shape ``(..., 16)`` so grid
sweeps reuse the same code as single values.
"""

from __future__ import annotations

import hashlib
import logging
import re
from itertools import combinations
from numbers import Real
from typing import Iterable

import numpy as np

from stalab.utils.errors import MultivectorParseError, NotABiform, SingularVersor
from stalab.utils.summary import canonical_json

logger = logging.getLogger(__name__)

METRIC = (1.0, -1.0, -1.0, -1.0)
DIM = 16
DEFAULT_EPS_SCALE = 1e-10
SCALAR_SQUARE_TOL = 1e-13

GradeMask = frozenset


def _build_blades() -> list[tuple[int, ...]]:
    blades: list[tuple[int, ...]] = []
    for r in range(5):
        blades.extend(combinations(range(4), r))
    return blades


BLADES: list[tuple[int, ...]] = _build_blades()
BLADE_NAMES: list[str] = ["1"] + ["g" + "".join(map(str, b)) for b in BLADES[1:]]
GRADES = np.array([len(b) for b in BLADES])
_MASKS = [sum(1 << i for i in b) for b in BLADES]
_INDEX_OF_MASK = {m: idx for idx, m in enumerate(_MASKS)}


def _blade_product(a: int, b: int) -> tuple[float, int]:
    """Sign and result mask of e_A e_B for bitmask blades A, B."""
    swaps = 0
    for j in range(4):
        if b >> j & 1:
            # generators of A with index above j must move past e_j
            swaps += bin(a >> (j + 1)).count("1")
    sign = -1.0 if swaps % 2 else 1.0
    common = a & b
    for k in range(4):
        if common >> k & 1:
            sign *= METRIC[k]
    return sign, a ^ b


def _build_tables() -> dict[str, np.ndarray]:
    gp = np.zeros((DIM, DIM, DIM))
    wedge = np.zeros_like(gp)
    left = np.zeros_like(gp)
    right = np.zeros_like(gp)
    for i, a in enumerate(_MASKS):
        for j, b in enumerate(_MASKS):
            sign, m = _blade_product(a, b)
            k = _INDEX_OF_MASK[m]
            gp[i, j, k] = sign
            if a & b == 0:
                wedge[i, j, k] = sign
            if a & b == a:
                left[i, j, k] = sign
            if a & b == b:
                right[i, j, k] = sign
    return {"gp": gp, "wedge": wedge, "lcontract": left, "rcontract": right}


_TABLES = _build_tables()
_REVERSE_SIGN = np.array([(-1.0) ** (r * (r - 1) // 2) for r in GRADES])
_ODD = (GRADES % 2).astype(bool)


def _check_anticommutation() -> None:
    gp = _TABLES["gp"]
    for mu in range(4):
        for nu in range(4):
            s = gp[1 + mu, 1 + nu] + gp[1 + nu, 1 + mu]
            expected = np.zeros(DIM)
            if mu == nu:
                expected[0] = 2.0 * METRIC[mu]
            if not np.array_equal(s, expected):
                raise RuntimeError(f"product table violates anticommutation for ({mu}, {nu})")


_check_anticommutation()


# ---------------------------------------------------------------------------
# array kernels
# ---------------------------------------------------------------------------

def _product(a: np.ndarray, b: np.ndarray, table: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    shape = np.broadcast_shapes(a.shape, b.shape)
    out = np.zeros(shape)
    for i in range(DIM):
        ai = a[..., i]
        if not np.any(ai):
            continue
        out += ai[..., None] * (b @ table[i])
    return out


def gp_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _product(a, b, _TABLES["gp"])


def wedge_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _product(a, b, _TABLES["wedge"])


def lcontract_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _product(a, b, _TABLES["lcontract"])


def rcontract_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _product(a, b, _TABLES["rcontract"])


def reverse_batch(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=np.float64) * _REVERSE_SIGN


def grade_batch(a: np.ndarray, k: int) -> np.ndarray:
    return np.asarray(a, dtype=np.float64) * (GRADES == k)


def even_batch(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=np.float64) * ~_ODD


# ---------------------------------------------------------------------------
# value type
# ---------------------------------------------------------------------------

class Multivector:
    """Immutable element of Cl(1,3)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[float] | np.ndarray | None = None):
        if coeffs is None:
            c = np.zeros(DIM)
        else:
            c = np.array(coeffs, dtype=np.float64).reshape(DIM)
        c.flags.writeable = False
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    def __getitem__(self, key: int | str) -> float:
        if isinstance(key, str):
            key = BLADE_NAMES.index(key)
        return float(self._c[key])

    def __add__(self, other):
        return Multivector(self._c + as_coeffs(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Multivector(self._c - as_coeffs(other))

    def __rsub__(self, other):
        return Multivector(as_coeffs(other) - self._c)

    def __neg__(self):
        return Multivector(-self._c)

    def __mul__(self, other):
        if isinstance(other, Real):
            return Multivector(self._c * float(other))
        return gp(self, other)

    def __rmul__(self, other):
        if isinstance(other, Real):
            return Multivector(self._c * float(other))
        return gp(other, self)

    def __truediv__(self, other: float):
        return Multivector(self._c / float(other))

    def __invert__(self):
        return reverse(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self) -> int:
        return hash(self._c.tobytes())

    def allclose(self, other, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self._c, as_coeffs(other), rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        return f"Multivector({format_multivector(self, compact=True)})"


def as_coeffs(x) -> np.ndarray:
    """Coefficient array of a multivector, a real scalar or a length-16 sequence."""
    if isinstance(x, Multivector):
        return x.coeffs
    if isinstance(x, Real):
        c = np.zeros(DIM)
        c[0] = float(x)
        return c
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape != (DIM,):
        raise ValueError(f"expected {DIM} coefficients, got shape {arr.shape}")
    return arr


def blade(name: str) -> Multivector:
    """Basis blade by name; non-canonical orders such as ``g21`` are multiplied out."""
    return parse_multivector(name)


def scalar(value: float) -> Multivector:
    return Multivector(as_coeffs(float(value)))


def vector(c0: float, c1: float = 0.0, c2: float = 0.0, c3: float = 0.0) -> Multivector:
    """1-form c_mu g^mu from covariant components."""
    c = np.zeros(DIM)
    c[1:5] = (c0, c1, c2, c3)
    return Multivector(c)


def vector_components(a: Multivector) -> np.ndarray:
    return np.array(a.coeffs[1:5])


# ---------------------------------------------------------------------------
# products and involutions
# ---------------------------------------------------------------------------

def gp(a, b) -> Multivector:
    return Multivector(gp_batch(as_coeffs(a), as_coeffs(b)))


def wedge(a, b) -> Multivector:
    return Multivector(wedge_batch(as_coeffs(a), as_coeffs(b)))


def lcontract(a, b) -> Multivector:
    """Left contraction a ⌟ b, grade s - r on homogeneous arguments."""
    return Multivector(lcontract_batch(as_coeffs(a), as_coeffs(b)))


def rcontract(a, b) -> Multivector:
    """Right contraction a ⌞ b, grade r - s on homogeneous arguments."""
    return Multivector(rcontract_batch(as_coeffs(a), as_coeffs(b)))


def reverse(a) -> Multivector:
    return Multivector(reverse_batch(as_coeffs(a)))


def grade(a, k: int) -> Multivector:
    if k not in range(5):
        raise ValueError(f"grade must be in 0..4, got {k}")
    return Multivector(grade_batch(as_coeffs(a), k))


def even_part(a) -> Multivector:
    return Multivector(even_batch(as_coeffs(a)))


def scalar_part(a) -> float:
    return float(as_coeffs(a)[0])


def dot(a, b) -> float:
    """Scalar part of the geometric product; the metric inner product on 1-forms."""
    return float(as_coeffs(gp(a, b))[0])


def norm(a) -> float:
    """Euclidean norm of the coefficient vector, used for every residual."""
    return float(np.linalg.norm(as_coeffs(a)))


def sandwich(r, a) -> Multivector:
    """r a reverse(r)."""
    return gp(gp(r, a), reverse(r))


def grade_mask(a, tol: float = 0.0) -> GradeMask:
    c = np.abs(as_coeffs(a))
    return frozenset(int(k) for k in range(5) if np.any(c[GRADES == k] > tol))


def dual(a) -> Multivector:
    """-a gamma^5."""
    return -gp(a, G5)


# ---------------------------------------------------------------------------
# exponential and inverse
# ---------------------------------------------------------------------------

def exp_biform(b, tol: float = 1e-12) -> Multivector:
    """Exponential of a grade-2 element.

    Closed forms are used when B² is a scalar, otherwise a scaled and
    squared Taylor series.
    """
    c = as_coeffs(b)
    off = np.abs(c[GRADES != 2])
    scale = max(1.0, float(np.max(np.abs(c))))
    if np.any(off > tol * scale):
        raise NotABiform(f"exp_biform needs a grade-2 argument, got grades {sorted(grade_mask(c, tol * scale))}")
    c = grade_batch(c, 2)
    sq = gp_batch(c, c)
    s, p = sq[0], sq[15]
    if abs(p) <= SCALAR_SQUARE_TOL * max(1.0, float(c @ c)):
        out = np.zeros(DIM)
        if s < 0.0:
            theta = np.sqrt(-s)
            out[0] = np.cos(theta)
            out += np.sinc(theta / np.pi) * c
        elif s > 0.0:
            chi = np.sqrt(s)
            out[0] = np.cosh(chi)
            out += (np.sinh(chi) / chi) * c
        else:
            out[0] = 1.0
            out += c
        return Multivector(out)
    return Multivector(_exp_series(c))


def _exp_series(c: np.ndarray) -> np.ndarray:
    squarings = max(0, int(np.ceil(np.log2(max(np.linalg.norm(c), 1e-300) / 0.5))))
    x = c / 2.0**squarings
    out = np.zeros(DIM)
    out[0] = 1.0
    term = out.copy()
    for n in range(1, 40):
        term = gp_batch(term, x) / n
        out = out + term
        if np.linalg.norm(term) < 1e-17:
            break
    for _ in range(squarings):
        out = gp_batch(out, out)
    return out


def versor_inverse(a, eps_scale: float = DEFAULT_EPS_SCALE) -> Multivector:
    """Inverse of an element whose a·reverse(a) is scalar plus pseudoscalar."""
    c = as_coeffs(a)
    rev = reverse_batch(c)
    n = gp_batch(c, rev)
    size = float(np.max(np.abs(c))) if c.size else 0.0
    eps = eps_scale * size**2
    s, p = n[0], n[15]
    rho = float(np.hypot(s, p))
    if rho <= eps:
        raise SingularVersor(f"a*reverse(a) has magnitude {rho:.3e} <= {eps:.3e}")
    rest = n.copy()
    rest[0] = rest[15] = 0.0
    if np.max(np.abs(rest)) > 1e-9 * max(rho, size**2):
        raise SingularVersor("a*reverse(a) is not scalar plus pseudoscalar; not a versor")
    conj = np.zeros(DIM)
    conj[0], conj[15] = s, -p
    return Multivector(gp_batch(rev, conj) / (s * s + p * p))


# ---------------------------------------------------------------------------
# textual format
# ---------------------------------------------------------------------------

_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|inf|nan)?\s*\*?\s*"
    r"(?P<blade>g[0-3]+)?\s*"
)


def format_multivector(a, compact: bool = False) -> str:
    """``c0 + c1 g0 + ... + c15 g0123``; ``compact`` drops zero terms."""
    c = as_coeffs(a)
    parts: list[str] = []
    for k, (value, name) in enumerate(zip(c, BLADE_NAMES)):
        if compact and value == 0.0 and not (k == 0 and not np.any(c)):
            continue
        text = repr(float(abs(value)))
        label = text if k == 0 else f"{text} {name}"
        if not parts:
            parts.append(("-" if np.signbit(value) else "") + label)
        else:
            parts.append(("- " if np.signbit(value) else "+ ") + label)
    return " ".join(parts) if parts else "0.0"


def parse_multivector(text: str) -> Multivector:
    """Inverse of :func:`format_multivector`.

    Blade names may be given in any generator order (``g21``, ``g30``);
    they are multiplied out with the metric.
    """
    text = text.strip()
    if not text:
        raise MultivectorParseError("empty multivector text")
    out = np.zeros(DIM)
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if m is None or m.end() == pos:
            raise MultivectorParseError(f"cannot parse {text!r} at offset {pos}")
        sign, num, name = m.group("sign"), m.group("num"), m.group("blade")
        if num is None and name is None:
            raise MultivectorParseError(f"empty term in {text!r} at offset {pos}")
        if sign is None and not first:
            raise MultivectorParseError(f"missing operator in {text!r} at offset {pos}")
        value = float(num) if num is not None else 1.0
        if sign == "-":
            value = -value
        if name is None:
            out[0] += value
        else:
            sign_b, index = _named_blade(name)
            out[index] += sign_b * value
        pos = m.end()
        first = False
    return Multivector(out)


def _named_blade(name: str) -> tuple[float, int]:
    sign, mask = 1.0, 0
    for ch in name[1:]:
        s, mask = _blade_product(mask, 1 << int(ch))
        sign *= s
    return sign, _INDEX_OF_MASK[mask]


# ---------------------------------------------------------------------------
# constants and conventions
# ---------------------------------------------------------------------------

ONE = scalar(1.0)
G0, G1, G2, G3 = (blade(f"g{i}") for i in range(4))
G5 = blade("g0123")
G21 = blade("g21")
G30 = blade("g30")
GAMMA_UP = (G0, G1, G2, G3)
# lower-index generators gamma_mu = eta_mu_mu gamma^mu
GAMMA_DOWN = tuple(g * m for g, m in zip(GAMMA_UP, METRIC))


def convention_table() -> dict:
    return {
        "algebra": "Cl(1,3)",
        "metric": list(METRIC),
        "blades": BLADE_NAMES,
        "grades": [int(g) for g in GRADES],
        "pseudoscalar": "g0123 = g0 g1 g2 g3",
        "gamma21": format_multivector(G21, compact=True),
        "dual": "dual(a) = -a g0123",
        "vector_components": "covariant",
        "product_table_sha256": hashlib.sha256(_TABLES["gp"].tobytes()).hexdigest(),
    }


def convention_hash() -> str:
    return hashlib.sha256(canonical_json(convention_table()).encode("utf-8")).hexdigest()
