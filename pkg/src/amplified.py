# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Matrices over unitized algebras, M_N(X^+), and the amplification of maps.

An element is stored as L (x) 1 + sum_b C_b (x) x_b, where L is the N x N scalar
part and C_b the coefficient matrix of basis element x_b of X. Entries live in
Q(i) or, for homotopies, in the path ring.
"""

import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from sympy.polys.domains.domain import Domain
from sympy.polys.matrices import DomainMatrix

from algebra import (
    GAlgebra,
    GHom,
    HomomorphismError,
    PathHom,
    make_hom,
    make_matrix_algebra,
    sparse_columns,
    trivial_gamma,
    unitize,
    unitize_hom,
)
from linalg import (
    K,
    PATH_DOMAIN,
    block_diagonal,
    block_matrix,
    coerce,
    evaluate_matrix,
    identity,
    inverse,
    kron,
    lift_matrix,
    reduce_matrix,
    scale,
    submatrix,
    zeros,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class UnitizedMatrix:
    """An N x N matrix over the unitization X^+ of ``algebra``."""

    algebra: GAlgebra
    size: int
    scalar: DomainMatrix
    parts: Mapping[int, DomainMatrix]
    domain: Domain = K

    @classmethod
    def zero(cls, algebra: GAlgebra, size: int, domain: Domain = K) -> "UnitizedMatrix":
        """The zero matrix of the given size."""
        return cls(algebra, size, zeros(size, size, domain), {}, domain)

    @classmethod
    def from_scalar(cls, algebra: GAlgebra, scalar: DomainMatrix) -> "UnitizedMatrix":
        """A matrix with scalar entries only."""
        return cls(algebra, scalar.shape[0], scalar, {}, scalar.domain)

    @classmethod
    def from_parts(
        cls,
        algebra: GAlgebra,
        scalar: DomainMatrix,
        parts: Mapping[int, DomainMatrix],
    ) -> "UnitizedMatrix":
        """Assemble a matrix from its scalar part and its parts per basis element."""
        domain = scalar.domain
        kept = {b: m for b, m in parts.items() if any(v for row in m.to_list() for v in row)}
        return cls(algebra, scalar.shape[0], scalar, dict(sorted(kept.items())), domain)

    @classmethod
    def from_entries(
        cls, algebra: GAlgebra, entries: Sequence[Sequence[tuple[object, Sequence]]]
    ) -> "UnitizedMatrix":
        """Build from a grid of (scalar, algebra vector) pairs."""
        size = len(entries)
        scalar = DomainMatrix(
            [[entry[0] for entry in row] for row in entries], (size, size), K
        )
        parts = {}
        for b in range(algebra.dim):
            rows = [[entry[1][b] for entry in row] for row in entries]
            parts[b] = DomainMatrix(rows, (size, size), K)
        return cls.from_parts(algebra, scalar, parts)

    def _zero_matrix(self) -> DomainMatrix:
        return zeros(self.size, self.size, self.domain)

    def part(self, b: int) -> DomainMatrix:
        """The coefficient matrix of basis element ``b``."""
        matrix = self.parts.get(b)
        return matrix if matrix is not None else self._zero_matrix()

    def entry(self, row: int, col: int) -> tuple[object, tuple]:
        """The (row, col) entry as a scalar and an algebra vector."""
        vector = [self.domain.zero] * self.algebra.dim
        for b, m in self.parts.items():
            vector[b] = m.to_list()[row][col]
        return self.scalar.to_list()[row][col], tuple(vector)

    def _check_compatible(self, other: "UnitizedMatrix") -> None:
        if other.algebra is not self.algebra or other.size != self.size:
            raise ValueError(
                f"incompatible matrices over {self.algebra.name} and {other.algebra.name}"
            )

    def __add__(self, other: "UnitizedMatrix") -> "UnitizedMatrix":
        """Entrywise sum."""
        self._check_compatible(other)
        parts = dict(self.parts)
        for b, m in other.parts.items():
            parts[b] = parts[b] + m if b in parts else m
        return UnitizedMatrix.from_parts(self.algebra, self.scalar + other.scalar, parts)

    def __neg__(self) -> "UnitizedMatrix":
        """Entrywise negation."""
        return UnitizedMatrix(
            self.algebra,
            self.size,
            -self.scalar,
            {b: -m for b, m in self.parts.items()},
            self.domain,
        )

    def __sub__(self, other: "UnitizedMatrix") -> "UnitizedMatrix":
        """Entrywise difference."""
        return self + (-other)

    def __mul__(self, other: "UnitizedMatrix") -> "UnitizedMatrix":
        """Matrix product, multiplying basis parts through the structure constants."""
        self._check_compatible(other)
        parts: dict[int, DomainMatrix] = {}

        def accumulate(index: int, value: DomainMatrix) -> None:
            parts[index] = parts[index] + value if index in parts else value

        for b, m in other.parts.items():
            accumulate(b, self.scalar * m)
        for b, m in self.parts.items():
            accumulate(b, m * other.scalar)
        table = self.algebra.table
        for b, left in self.parts.items():
            for c, right in other.parts.items():
                terms = table.get((b, c))
                if not terms:
                    continue
                product = left * right
                for d, coeff in terms:
                    accumulate(d, scale(product, self._coerce(coeff)))
        return UnitizedMatrix.from_parts(self.algebra, self.scalar * other.scalar, parts)

    def _coerce(self, coeff: object) -> object:
        return coerce(coeff, self.domain)

    def equals(self, other: "UnitizedMatrix") -> bool:
        """Whether both matrices live over the same algebra and agree."""
        if other.algebra is not self.algebra or other.size != self.size:
            return False
        return (self - other).is_zero()

    def is_zero(self) -> bool:
        """Whether every part vanishes."""
        return not any(v for row in self.scalar.to_list() for v in row) and not self.parts

    def is_scalar(self) -> bool:
        """Whether the matrix lies in M_N(C)."""
        return not self.parts

    def is_idempotent(self) -> bool:
        """Whether the square equals the matrix, modulo c^2 + s^2 - 1 for paths."""
        square = self * self
        if self.domain == PATH_DOMAIN:
            return (square - self).reduce().is_zero()
        return square.equals(self)

    def apply_hom(self, hom: Union[GHom, PathHom]) -> "UnitizedMatrix":
        """Apply hom^+ entrywise: parts are mapped, the scalar part is kept."""
        if hom.source is not self.algebra:
            raise ValueError(f"{hom.name} does not start at {self.algebra.name}")
        domain = hom.matrix.domain if self.domain == K else self.domain
        scalar = self.scalar if domain == self.domain else lift_matrix(self.scalar)
        columns = sparse_columns(hom.matrix)
        parts: dict[int, DomainMatrix] = {}
        for b, m in self.parts.items():
            source = m if domain == self.domain else lift_matrix(m)
            for d, coeff in columns[b]:
                term = scale(source, coerce(coeff, domain))
                parts[d] = parts[d] + term if d in parts else term
        return UnitizedMatrix.from_parts(hom.target, scalar, parts)

    def act(self, g: int, u: DomainMatrix) -> "UnitizedMatrix":
        """ad(u) (x) alpha_g, the action of g on M_N(X^+) implemented by u."""
        u_inv = inverse(u)
        if u_inv is None:
            raise ValueError(f"implementing matrix of group element {g} is singular")
        if self.domain != K:
            u, u_inv = lift_matrix(u), lift_matrix(u_inv)
        columns = sparse_columns(self.algebra.action[g])
        parts: dict[int, DomainMatrix] = {}
        for b, m in self.parts.items():
            conjugated = u * m * u_inv
            for d, coeff in columns[b]:
                term = scale(conjugated, self._coerce(coeff))
                parts[d] = parts[d] + term if d in parts else term
        return UnitizedMatrix.from_parts(self.algebra, u * self.scalar * u_inv, parts)

    def is_invariant(self, rep: Sequence[DomainMatrix]) -> bool:
        """Whether conjugating by ``rep`` and acting leaves the matrix fixed."""
        for g, u in enumerate(rep):
            moved = self.act(g, u)
            difference = moved - self
            if self.domain == PATH_DOMAIN:
                difference = difference.reduce()
            if not difference.is_zero():
                return False
        return True

    def direct_sum(self, other: "UnitizedMatrix") -> "UnitizedMatrix":
        """Block-diagonal sum of two matrices over the same algebra."""
        if other.algebra is not self.algebra:
            raise ValueError("direct sums need matrices over the same algebra")
        keys = sorted(set(self.parts) | set(other.parts))
        return UnitizedMatrix.from_parts(
            self.algebra,
            block_diagonal([self.scalar, other.scalar], self.domain),
            {b: block_diagonal([self.part(b), other.part(b)], self.domain) for b in keys},
        )

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> "UnitizedMatrix":
        """The submatrix on the given indices; square index sets keep the type."""
        if len(rows) != len(cols):
            raise ValueError("blocks of unitized matrices must be square")
        return UnitizedMatrix.from_parts(
            self.algebra,
            submatrix(self.scalar, rows, cols),
            {b: submatrix(m, rows, cols) for b, m in self.parts.items()},
        )

    def couples(self, inside: Sequence[int], outside: Sequence[int]) -> bool:
        """Whether any entry links the two index sets in either direction."""
        matrices = [self.scalar, *self.parts.values()]
        for m in matrices:
            values = m.to_list()
            for i in inside:
                for j in outside:
                    if values[i][j] or values[j][i]:
                        return True
        return False

    def lift(self) -> "UnitizedMatrix":
        """View the matrix as a constant path."""
        if self.domain == PATH_DOMAIN:
            return self
        return UnitizedMatrix(
            self.algebra,
            self.size,
            lift_matrix(self.scalar),
            {b: lift_matrix(m) for b, m in self.parts.items()},
            PATH_DOMAIN,
        )

    def reduce(self) -> "UnitizedMatrix":
        """Reduce every entry modulo c^2 + s^2 - 1."""
        return UnitizedMatrix.from_parts(
            self.algebra,
            reduce_matrix(self.scalar),
            {b: reduce_matrix(m) for b, m in self.parts.items()},
        )

    def evaluate(self, endpoint: int) -> "UnitizedMatrix":
        """Evaluate a path of matrices at an endpoint."""
        return UnitizedMatrix.from_parts(
            self.algebra,
            evaluate_matrix(self.scalar, endpoint),
            {b: evaluate_matrix(m, endpoint) for b, m in self.parts.items()},
        )

    def scale_scalar(self, factor: object) -> "UnitizedMatrix":
        """Multiply every entry, scalar part and basis parts alike, by ``factor``."""
        return UnitizedMatrix.from_parts(
            self.algebra,
            scale(self.scalar, factor),
            {b: scale(m, factor) for b, m in self.parts.items()},
        )

    def same_scalar_part(self, other: "UnitizedMatrix") -> bool:
        """Whether the scalar parts agree."""
        difference = self.scalar - other.scalar
        if self.domain == PATH_DOMAIN:
            difference = reduce_matrix(difference)
        return not any(v for row in difference.to_list() for v in row)

    def as_vector(self, matrix_algebra: GAlgebra) -> tuple:
        """Coordinates in make_matrix_algebra(size, unitize(algebra)[0], ...)."""
        unitized, _ = unitize(self.algebra)
        d = unitized.dim
        vector = [K.zero] * (self.size * self.size * d)
        scalar_rows = self.scalar.to_list()
        part_rows = {b: m.to_list() for b, m in self.parts.items()}
        for r in range(self.size):
            for c in range(self.size):
                offset = (r * self.size + c) * d
                vector[offset + d - 1] = scalar_rows[r][c]
                for b, rows in part_rows.items():
                    vector[offset + b] = rows[r][c]
        if matrix_algebra.dim != len(vector):
            raise ValueError(f"{matrix_algebra.name} does not match this matrix size")
        return tuple(vector)


def scalar_identity(algebra: GAlgebra, size: int, domain: Domain = K) -> UnitizedMatrix:
    """The identity of M_N(X+), as a scalar matrix."""
    return UnitizedMatrix(algebra, size, identity(size, domain), {}, domain)


def block_grid(
    algebra: GAlgebra, grid: Sequence[Sequence[UnitizedMatrix]]
) -> UnitizedMatrix:
    """Assemble a block matrix of unitized matrices with equal block sizes per band."""
    domain = grid[0][0].domain
    keys = sorted({b for band in grid for block in band for b in block.parts})
    scalar = block_matrix([[block.scalar for block in band] for band in grid], domain)
    parts = {
        b: block_matrix([[block.part(b) for block in band] for band in grid], domain)
        for b in keys
    }
    return UnitizedMatrix.from_parts(algebra, scalar, parts)


def hat(
    hom: GHom,
    m: int,
    n: int,
    source_gamma: Optional[tuple[Sequence[DomainMatrix], Sequence[DomainMatrix]]] = None,
    target_gamma: Optional[tuple[Sequence[DomainMatrix], Sequence[DomainMatrix]]] = None,
) -> GHom:
    """The amplification ((hom (x) id_m)^+) (x) id_n : M_n(M_m(A)^+) -> M_n(M_m(X)^+).

    The actions on both sides are given as (inner, outer) implementing matrices
    for M_m and M_n and default to trivial ones. The result is checked to be an
    equivariant homomorphism, so incompatible actions are reported with the
    failing group element and basis element.

    Args:
        hom: the map s: A -> X
        m: inner matrix size
        n: outer matrix size
        source_gamma: implementing matrices (for M_m, for M_n) on the source side
        target_gamma: implementing matrices (for M_m, for M_n) on the target side

    Returns:
        the amplified homomorphism between the materialized algebras
    """
    group = hom.source.group
    inner_source, outer_source = source_gamma or (
        trivial_gamma(group, m),
        trivial_gamma(group, n),
    )
    inner_target, outer_target = target_gamma or (
        trivial_gamma(group, m),
        trivial_gamma(group, n),
    )
    source_inner = make_matrix_algebra(m, hom.source, inner_source)
    target_inner = make_matrix_algebra(m, hom.target, inner_target)
    inner = make_hom(
        f"{hom.name}(x)id{m}", source_inner, target_inner, kron(identity(m * m), hom.matrix)
    )
    inner_plus = unitize_hom(inner)
    source = make_matrix_algebra(n, inner_plus.source, outer_source)
    target = make_matrix_algebra(n, inner_plus.target, outer_target)
    try:
        return make_hom(
            f"hat({hom.name},{m},{n})",
            source,
            target,
            kron(identity(n * n), inner_plus.matrix),
        )
    except HomomorphismError as e:
        logger.warning("Amplification of %s is not equivariant: %s", hom.name, e)
        raise
