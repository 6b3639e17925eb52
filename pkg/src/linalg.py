# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Exact linear algebra over the Gaussian rationals.

Scalars are elements of sympy's ``QQ_I`` field and matrices are dense
``DomainMatrix`` objects over it. The path ring Q(i)[c,s]/(c^2+s^2-1), which
models trigonometric homotopies with c = cos t and s = sin t, lives here as well
so that matrices over it can share the same helpers.

Scalars travel through files as strings of the form ``"a/b+c/d*i"``.
"""

import logging
import re
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.domain import Domain
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, ring

logger = logging.getLogger(__name__)

K = QQ_I
Scalar = GaussianRational
Rational = Union[int, Fraction, str]

PATH_RING, COS, SIN = ring("c,s", QQ_I, lex)
PATH_DOMAIN = PATH_RING.to_domain()
CIRCLE = COS**2 + SIN**2 - 1
PathScalar = PolyElement

# (cos t, sin t) at the two endpoints t = 0 and t = pi/2 of every path.
ENDPOINTS = {0: (1, 0), 1: (0, 1)}

_RATIONAL_PATTERN = re.compile(r"^[+-]?\d+(/\d+)?$")


class GKCalcError(Exception):
    """Base class for every error raised by gkcalc."""


class InternalInvariantError(GKCalcError):
    """Raised when a result violates an invariant that valid input guarantees."""


class ScalarFormatError(GKCalcError):
    """Raised when a scalar string is not of the form a/b+c/d*i."""


class PathEvaluationError(GKCalcError):
    """Raised when a path is evaluated anywhere but at its two endpoints."""


def _to_fraction(value: Rational) -> Fraction:
    if isinstance(value, str):
        if not _RATIONAL_PATTERN.match(value):
            raise ScalarFormatError(f"not a rational number: '{value}'")
        try:
            return Fraction(value)
        except ZeroDivisionError as e:
            raise ScalarFormatError(f"zero denominator in '{value}'") from e
    return Fraction(value)


def scalar(re_part: Rational = 0, im_part: Rational = 0) -> Scalar:
    """Build the Gaussian rational re_part + im_part*i."""
    real, imag = _to_fraction(re_part), _to_fraction(im_part)
    return K(QQ(real.numerator, real.denominator), QQ(imag.numerator, imag.denominator))


def to_scalar(value: object) -> Scalar:
    """Coerce ints, Fractions, scalar strings and scalars to a scalar."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, (int, Fraction)):
        return scalar(value)
    raise ScalarFormatError(f"cannot interpret {value!r} as a Gaussian rational")


def parse_scalar(text: str) -> Scalar:
    """Parse ``"a/b+c/d*i"`` (every part optional) into a scalar.

    Args:
        text: the scalar string, e.g. ``"3"``, ``"-1/2*i"`` or ``"1/3-2*i"``

    Returns:
        the exact scalar
    """
    compact = text.replace(" ", "")
    if not compact:
        raise ScalarFormatError("empty scalar")
    if not compact.endswith("i"):
        return scalar(compact)
    body = compact[:-1].removesuffix("*")
    split = max(body.rfind("+"), body.rfind("-"))
    if split > 0:
        real, imag = body[:split], body[split:]
    else:
        real, imag = "0", body
    if imag in ("", "+", "-"):
        imag += "1"
    return scalar(real, imag.lstrip("+"))


def _format_rational(value: object) -> str:
    fraction = Fraction(int(value.numerator), int(value.denominator))  # type: ignore[attr-defined]
    if fraction.denominator == 1:
        return str(fraction.numerator)
    return f"{fraction.numerator}/{fraction.denominator}"


def format_scalar(value: Scalar) -> str:
    """Render a scalar in lowest terms, the inverse of `parse_scalar`."""
    real, imag = value.x, value.y
    if not imag:
        return _format_rational(real)
    magnitude = _format_rational(-imag if imag < 0 else imag)
    sign = "-" if imag < 0 else "+"
    if not real:
        return f"{'-' if imag < 0 else ''}{magnitude}*i"
    return f"{_format_rational(real)}{sign}{magnitude}*i"


def matrix(rows: Sequence[Sequence[object]], domain: Domain = K) -> DomainMatrix:
    """Build a dense matrix, coercing every entry to a scalar."""
    height = len(rows)
    width = len(rows[0]) if height else 0
    if any(len(row) != width for row in rows):
        raise ScalarFormatError("ragged matrix rows")
    if domain == K:
        entries = [[to_scalar(entry) for entry in row] for row in rows]
    else:
        entries = [list(row) for row in rows]
    return DomainMatrix(entries, (height, width), domain)


def from_entries(entries: list[list], height: int, width: int, domain: Domain = K) -> DomainMatrix:
    """Wrap already-coerced entries without copying."""
    return DomainMatrix(entries, (height, width), domain)


def zeros(height: int, width: int, domain: Domain = K) -> DomainMatrix:
    """A zero matrix of the given shape."""
    return DomainMatrix([[domain.zero] * width for _ in range(height)], (height, width), domain)


def identity(size: int, domain: Domain = K) -> DomainMatrix:
    """The identity matrix of the given size."""
    return diagonal([domain.one] * size, domain)


def diagonal(entries: Sequence[object], domain: Domain = K) -> DomainMatrix:
    """A square matrix with ``entries`` on the diagonal."""
    size = len(entries)
    rows = [[domain.zero] * size for _ in range(size)]
    for index, entry in enumerate(entries):
        rows[index][index] = entry
    return DomainMatrix(rows, (size, size), domain)


def unit_matrix(height: int, width: int, row: int, col: int, domain: Domain = K) -> DomainMatrix:
    """The matrix unit e_{row,col}."""
    rows = [[domain.zero] * width for _ in range(height)]
    rows[row][col] = domain.one
    return DomainMatrix(rows, (height, width), domain)


def entries(m: DomainMatrix) -> list[list]:
    """The rows of ``m`` as nested lists."""
    return m.to_list()


def entry(m: DomainMatrix, row: int, col: int):
    """A single entry of ``m``."""
    return m.to_list()[row][col]


def is_zero(m: DomainMatrix) -> bool:
    """Whether every entry of ``m`` vanishes."""
    return not any(value for row in m.to_list() for value in row)


def equal(a: DomainMatrix, b: DomainMatrix) -> bool:
    """Exact entrywise equality, independent of the internal storage format."""
    return a.shape == b.shape and a.to_list() == b.to_list()


def map_entries(m: DomainMatrix, func: Callable, domain: Domain) -> DomainMatrix:
    """Apply ``func`` to every entry, landing in ``domain``."""
    rows = [[func(value) for value in row] for row in m.to_list()]
    return DomainMatrix(rows, m.shape, domain)


def scale(m: DomainMatrix, factor: object) -> DomainMatrix:
    """Multiply every entry by a scalar of the matrix's domain."""
    return map_entries(m, lambda value: value * factor, m.domain)


def kron(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    """Kronecker product; index (i*p + k, j*q + l) holds a[i,j]*b[k,l]."""
    (m, n), (p, q) = a.shape, b.shape
    left, right = a.to_list(), b.to_list()
    rows = [[a.domain.zero] * (n * q) for _ in range(m * p)]
    for i in range(m):
        for j in range(n):
            if not left[i][j]:
                continue
            for k in range(p):
                for col in range(q):
                    rows[i * p + k][j * q + col] = left[i][j] * right[k][col]
    return DomainMatrix(rows, (m * p, n * q), a.domain)


def block_diagonal(blocks: Sequence[DomainMatrix], domain: Domain = K) -> DomainMatrix:
    """Blocks placed along the diagonal, zeros elsewhere."""
    height = sum(block.shape[0] for block in blocks)
    width = sum(block.shape[1] for block in blocks)
    rows = [[domain.zero] * width for _ in range(height)]
    row_offset = col_offset = 0
    for block in blocks:
        for i, values in enumerate(block.to_list()):
            rows[row_offset + i][col_offset : col_offset + len(values)] = values
        row_offset += block.shape[0]
        col_offset += block.shape[1]
    return DomainMatrix(rows, (height, width), domain)


def block_matrix(grid: Sequence[Sequence[DomainMatrix]], domain: Domain = K) -> DomainMatrix:
    """Assemble a matrix from a grid of blocks with matching shapes."""
    rows: list[list] = []
    for band in grid:
        band_rows = [list(values) for values in band[0].to_list()]
        for block in band[1:]:
            for index, values in enumerate(block.to_list()):
                band_rows[index].extend(values)
        rows.extend(band_rows)
    width = len(rows[0]) if rows else 0
    return DomainMatrix(rows, (len(rows), width), domain)


def submatrix(m: DomainMatrix, rows: Sequence[int], cols: Sequence[int]) -> DomainMatrix:
    """The rows and columns of ``m`` picked by index."""
    values = m.to_list()
    picked = [[values[i][j] for j in cols] for i in rows]
    return DomainMatrix(picked, (len(rows), len(cols)), m.domain)


def column(values: Sequence[object], domain: Domain = K) -> DomainMatrix:
    """A column vector."""
    return DomainMatrix([[value] for value in values], (len(values), 1), domain)


def flatten_column(m: DomainMatrix) -> list:
    """The entries of a column vector as a list."""
    return [row[0] for row in m.to_list()]


def rank(m: DomainMatrix) -> int:
    """Rank of ``m``; empty matrices have rank zero."""
    if 0 in m.shape:
        return 0
    return m.to_dense().rank()


def trace(m: DomainMatrix):
    """Sum of the diagonal entries."""
    values = m.to_list()
    total = m.domain.zero
    for index in range(min(m.shape)):
        total += values[index][index]
    return total


def inverse(m: DomainMatrix) -> DomainMatrix | None:
    """Exact inverse, or None for singular matrices."""
    if m.shape[0] != m.shape[1]:
        return None
    if m.shape[0] == 0:
        return m
    if rank(m) < m.shape[0]:
        return None
    return m.to_dense().inv().to_dense()


def nullspace(m: DomainMatrix) -> list[list[Scalar]]:
    """Basis vectors of {v : m v = 0} as plain lists."""
    height, width = m.shape
    if width == 0:
        return []
    if height == 0:
        return [[K.one if i == j else K.zero for i in range(width)] for j in range(width)]
    basis = m.to_dense().nullspace().to_dense()
    return [list(row) for row in basis.to_list() if any(row)]


def independent_rows(m: DomainMatrix) -> list[int]:
    """Indices of a maximal set of linearly independent rows."""
    if 0 in m.shape:
        return []
    _, pivots = m.to_dense().transpose().rref()
    return list(pivots)


def left_inverse(m: DomainMatrix) -> DomainMatrix:
    """A matrix L with L m = 1 for an injective (full column rank) matrix m."""
    height, width = m.shape
    rows = independent_rows(m)
    if len(rows) != width:
        raise InternalInvariantError("left inverse requested for a non-injective map")
    square_inverse = inverse(submatrix(m, rows, range(width)))
    assert square_inverse is not None
    selector = zeros(width, height)
    selector_rows = selector.to_list()
    for index, row in enumerate(rows):
        selector_rows[index][row] = K.one
    return square_inverse * DomainMatrix(selector_rows, (width, height), K)


def solve_in_image(m: DomainMatrix, rhs: DomainMatrix) -> DomainMatrix | None:
    """Solve m x = rhs exactly; None when rhs is outside the column space."""
    height, width = m.shape
    augmented = block_matrix([[m, rhs]])
    reduced, pivots = augmented.to_dense().rref()
    if any(pivot >= width for pivot in pivots):
        return None
    values = reduced.to_list()
    solution = [[K.zero] * rhs.shape[1] for _ in range(width)]
    for row, pivot in enumerate(pivots):
        for col in range(rhs.shape[1]):
            solution[pivot][col] = values[row][width + col]
    return DomainMatrix(solution, (width, rhs.shape[1]), K)


def lift(value: Scalar) -> PathScalar:
    """View a scalar as a constant path."""
    return PATH_RING.ground_new(value)


def lift_matrix(m: DomainMatrix) -> DomainMatrix:
    """View a scalar matrix as a constant path of matrices."""
    return map_entries(m, lift, PATH_DOMAIN)


def reduce_path(value: PathScalar) -> PathScalar:
    """Normal form modulo c^2 + s^2 - 1: degree at most one in c."""
    return value.rem(CIRCLE)


def reduce_matrix(m: DomainMatrix) -> DomainMatrix:
    """Reduce every entry modulo c^2 + s^2 - 1."""
    return map_entries(m, reduce_path, PATH_DOMAIN)


def evaluate_path(value: PathScalar, endpoint: int) -> Scalar:
    """Evaluate a path at t = 0 (endpoint 0) or t = pi/2 (endpoint 1)."""
    try:
        cos_value, sin_value = ENDPOINTS[endpoint]
    except (KeyError, TypeError) as e:
        raise PathEvaluationError(
            f"paths are only evaluated at their endpoints 0 and 1, not at {endpoint!r}"
        ) from e
    total = K.zero
    for (cos_degree, sin_degree), coeff in value.terms():
        if (cos_degree and not cos_value) or (sin_degree and not sin_value):
            continue
        total += coeff
    return total


def evaluate_matrix(m: DomainMatrix, endpoint: int) -> DomainMatrix:
    """Evaluate every entry at an endpoint."""
    return map_entries(m, lambda value: evaluate_path(value, endpoint), K)


def reverse_path(value: PathScalar) -> PathScalar:
    """Substitute s -> -s, which runs a rotation backwards (t -> -t)."""
    return PATH_RING.from_dict(
        {
            monom: (-coeff if monom[1] % 2 else coeff)
            for monom, coeff in value.terms()
        }
    )


def parse_path(terms: Iterable[Sequence[object]]) -> PathScalar:
    """Build a path scalar from ``[cos_degree, sin_degree, "scalar"]`` triples."""
    value = PATH_RING.zero
    for cos_degree, sin_degree, coeff in terms:
        value += COS ** int(cos_degree) * SIN ** int(sin_degree) * lift(to_scalar(coeff))
    return value


def format_path(value: PathScalar) -> list[list]:
    """Serialize a path scalar as sorted ``[cos_degree, sin_degree, "scalar"]`` triples."""
    return [
        [monom[0], monom[1], format_scalar(coeff)]
        for monom, coeff in sorted(reduce_path(value).terms())
    ]


def coerce(value: object, domain: Domain) -> object:
    """Bring a scalar or path scalar into ``domain``."""
    if domain == PATH_DOMAIN and not isinstance(value, PolyElement):
        return lift(value)  # type: ignore[arg-type]
    return value
