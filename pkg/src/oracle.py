# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Idempotent invariants on semisimple G-algebras.

The oracle decides class equality without looking at how an idempotent was
produced: it pushes the idempotent through the block presentation of the target
algebra and reads off, per block, how often each irreducible representation of
the group occurs in its image. Irreducibles are the Q(i)-rational ones, found
from the central primitive idempotents of the group algebra.
"""

import functools
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

from sympy import Poly, Symbol
from sympy.polys.matrices import DomainMatrix

from algebra import FiniteGroup, GAlgebra, block_implementing
from amplified import UnitizedMatrix
from linalg import (
    K,
    GKCalcError,
    InternalInvariantError,
    Scalar,
    format_scalar,
    identity,
    inverse,
    kron,
    nullspace,
    scalar,
    scale,
    trace,
    zeros,
)

logger = logging.getLogger(__name__)

_X = Symbol("x")
MAX_SEPARATION_ATTEMPTS = 64


class OracleInputError(GKCalcError):
    """Raised when the oracle is handed something that is not an invariant idempotent."""


@dataclass(frozen=True)
class Indeterminate:
    """A refused decision, with the reason it was refused."""

    reason: str


@dataclass(frozen=True)
class Irreducible:
    """A Q(i)-irreducible representation of a finite group.

    ``idempotent`` holds the coefficients of its central primitive idempotent in
    Q(i)[G]; ``character`` its character per group element. ``degree`` is the
    dimension of the representation, ``field_degree`` the degree of the centre
    of its simple component and ``matrix_size`` the size of that component.
    """

    idempotent: tuple[Scalar, ...]
    character: tuple[Scalar, ...]
    degree: int
    field_degree: int
    matrix_size: int

    def label(self) -> str:
        """Degree and character values, used to name generators."""
        return f"d={self.degree}:" + ",".join(format_scalar(v) for v in self.character)


@dataclass(frozen=True)
class InvariantVector:
    """Per block of the target: irreducible multiplicities and the virtual character.

    ``characters`` lists one value per conjugacy class of the group.
    """

    multiplicities: tuple[tuple[int, ...], ...]
    characters: tuple[tuple[Scalar, ...], ...]

    def __add__(self, other: "InvariantVector") -> "InvariantVector":
        """Blockwise sum of multiplicities and characters."""
        multiplicities = zip(self.multiplicities, other.multiplicities)
        characters = zip(self.characters, other.characters)
        return InvariantVector(
            tuple(tuple(a + b for a, b in zip(x, y)) for x, y in multiplicities),
            tuple(tuple(a + b for a, b in zip(x, y)) for x, y in characters),
        )

    def __neg__(self) -> "InvariantVector":
        """Blockwise negation."""
        return InvariantVector(
            tuple(tuple(-a for a in x) for x in self.multiplicities),
            tuple(tuple(-a for a in x) for x in self.characters),
        )

    def __sub__(self, other: "InvariantVector") -> "InvariantVector":
        """Blockwise difference."""
        return self + (-other)

    def is_zero(self) -> bool:
        """Whether every multiplicity is zero."""
        return not any(a for x in self.multiplicities for a in x)

    def as_dict(self) -> dict:
        """Serialize multiplicities and characters."""
        return {
            "multiplicities": [list(x) for x in self.multiplicities],
            "characters": [[format_scalar(v) for v in x] for x in self.characters],
        }


def _class_sum_constants(group: FiniteGroup) -> list[DomainMatrix]:
    """Matrices of multiplication by each class sum on the centre of Q(i)[G]."""
    classes = group.conjugacy_classes
    r = len(classes)
    matrices = []
    for a in range(r):
        rows = [[K.zero] * r for _ in range(r)]
        for b in range(r):
            counts = [0] * r
            for x in classes[a]:
                for y in classes[b]:
                    z = group.mul(x, y)
                    c = group.class_index(z)
                    if z == classes[c][0]:
                        counts[c] += 1
            for c in range(r):
                rows[c][b] = scalar(counts[c])
        matrices.append(DomainMatrix(rows, (r, r), K))
    return matrices


def poly_at_matrix(poly: Poly, m: DomainMatrix) -> DomainMatrix:
    """Evaluate ``poly`` at a square matrix by Horner's rule."""
    size = m.shape[0]
    result = zeros(size, size)
    for coeff in poly.all_coeffs():
        result = result * m + scale(identity(size), K.from_sympy(coeff))
    return result


def charpoly(m: DomainMatrix) -> Poly:
    """Characteristic polynomial of ``m`` over Q(i)."""
    coefficients = m.to_dense().charpoly()
    return Poly([K.to_sympy(c) for c in coefficients], _X, domain=K)


def _separating_element(constants: list[DomainMatrix]) -> DomainMatrix:
    """A central element whose multiplication matrix has a squarefree characteristic polynomial."""
    r = constants[0].shape[0]
    for t in range(2, 2 + MAX_SEPARATION_ATTEMPTS):
        m = zeros(r, r)
        for a, constant in enumerate(constants):
            m = m + scale(constant, scalar(t**a))
        if charpoly(m).is_sqf:
            return m
    raise InternalInvariantError("no separating central element found for the group algebra")


@functools.cache
def irreducible_characters(group: FiniteGroup) -> tuple[Irreducible, ...]:
    """The Q(i)-irreducible representations of ``group``, trivial one first."""
    classes = group.conjugacy_classes
    r = len(classes)
    m = _separating_element(_class_sum_constants(group))
    _, factors = charpoly(m).factor_list()
    kernels = [nullspace(poly_at_matrix(f, m)) for f, _ in factors]
    basis_columns = [vector for kernel in kernels for vector in kernel]
    change = DomainMatrix([list(row) for row in zip(*basis_columns)], (r, r), K)
    change_inv = inverse(change)
    if change_inv is None:
        raise InternalInvariantError("central components do not span the centre")
    unit = DomainMatrix([[K.one if a == 0 else K.zero] for a in range(r)], (r, 1), K)
    coordinates = [row[0] for row in (change_inv * unit).to_list()]
    irreducibles = []
    position = 0
    order = scalar(group.order)
    for (factor, _), kernel in zip(factors, kernels):
        component = [K.zero] * r
        for offset, vector in enumerate(kernel):
            for a in range(r):
                component[a] += coordinates[position + offset] * vector[a]
        position += len(kernel)
        coefficients = tuple(component[group.class_index(g)] for g in group.elements())
        field_degree = factor.degree()
        dimension = order * coefficients[group.identity]
        squared = dimension / scalar(field_degree)
        matrix_size = _integer_sqrt(squared)
        character = tuple(
            order * coefficients[group.inv(g)] / scalar(matrix_size) for g in group.elements()
        )
        irreducibles.append(
            Irreducible(
                coefficients,
                character,
                matrix_size * field_degree,
                field_degree,
                matrix_size,
            )
        )
    trivial = [i for i in irreducibles if all(v == K.one for v in i.character)]
    rest = sorted(
        (i for i in irreducibles if i not in trivial),
        key=lambda i: (i.degree, i.field_degree, i.label()),
    )
    logger.debug("Group %s has %d irreducibles over Q(i)", group.name, len(irreducibles))
    return tuple(trivial + rest)


def _integer_sqrt(value: Scalar) -> int:
    if value.y or value.x.denominator != 1:
        raise InternalInvariantError(
            f"component dimension {format_scalar(value)} is not integral"
        )
    n = int(value.x.numerator)
    root = math.isqrt(n) if n >= 0 else -1
    if root * root != n:
        raise InternalInvariantError(f"component dimension {n} is not a square")
    return root


def block_images(element: UnitizedMatrix) -> list[DomainMatrix]:
    """pi_k^+ of a matrix over B^+, one (N n_k)-square matrix per block of B."""
    algebra = element.algebra
    presentation = algebra.presentation
    if presentation is None:
        raise OracleInputError(f"{algebra.name} has no block presentation")
    images = []
    for k, size in enumerate(presentation.blocks):
        block = kron(element.scalar, identity(size))
        for b, coefficients in element.parts.items():
            block = block + kron(coefficients, presentation.block_of(algebra.basis(b), k))
        images.append(block)
    return images


def from_block_images(
    algebra: GAlgebra, size: int, blocks: Sequence[DomainMatrix]
) -> UnitizedMatrix:
    """The matrix over B (no scalar part) whose block images are ``blocks``."""
    presentation = algebra.presentation
    assert presentation is not None
    rows = [[None] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            pieces = []
            for k, n_k in enumerate(presentation.blocks):
                values = blocks[k].to_list()
                pieces.append(
                    DomainMatrix(
                        [
                            [values[i * n_k + a][j * n_k + c] for c in range(n_k)]
                            for a in range(n_k)
                        ],
                        (n_k, n_k),
                        K,
                    )
                )
            rows[i][j] = (K.zero, presentation.vector_from_blocks(pieces))
    return UnitizedMatrix.from_entries(algebra, rows)


def block_representations(
    algebra: GAlgebra, rep: Sequence[DomainMatrix]
) -> Union[list[tuple[DomainMatrix, ...]], Indeterminate]:
    """rho_{k,g} = u_g (x) v_{k,g} per block, or the reason the oracle refuses."""
    presentation = algebra.presentation
    if presentation is None:
        return Indeterminate(f"{algebra.name} has no semisimple presentation")
    implementing = block_implementing(algebra)
    if implementing is None:
        if _permutes_blocks(algebra):
            return Indeterminate(f"the action on {algebra.name} permutes its blocks")
        return Indeterminate(f"the action on {algebra.name} is not given as inner on each block")
    group = algebra.group
    result = []
    for k in range(len(presentation.blocks)):
        rho = tuple(kron(u, v) for u, v in zip(rep, implementing[k]))
        for g in group.elements():
            for h in group.elements():
                if (rho[g] * rho[h]).to_list() != rho[group.mul(g, h)].to_list():
                    return Indeterminate(
                        f"block {k} of {algebra.name} carries a projective representation "
                        f"at group elements ({g}, {h})"
                    )
        result.append(rho)
    return result


def _permutes_blocks(algebra: GAlgebra) -> bool:
    presentation = algebra.presentation
    assert presentation is not None
    for g in algebra.group.elements():
        for i in range(algebra.dim):
            moved = algebra.act(g, algebra.basis(i))
            for k in range(len(presentation.blocks)):
                source_zero = not any(
                    v for row in presentation.block_of(algebra.basis(i), k).to_list() for v in row
                )
                target_zero = not any(
                    v for row in presentation.block_of(moved, k).to_list() for v in row
                )
                if source_zero != target_zero:
                    return True
    return False


def invariant_oracle(
    p: UnitizedMatrix, rep: Sequence[DomainMatrix]
) -> Union[InvariantVector, Indeterminate]:
    """The invariant of a G-invariant idempotent over B^+.

    Args:
        p: an idempotent N x N matrix over the unitization of B
        rep: implementing matrices u_g of the action on C^N

    Returns:
        per block of B, the multiplicities of the irreducibles of G in the image
        of p together with its character, or Indeterminate outside the oracle's scope
    """
    algebra = p.algebra
    if not p.is_idempotent():
        raise OracleInputError(f"matrix over {algebra.name}+ is not idempotent")
    if not p.is_invariant(rep):
        raise OracleInputError(f"idempotent over {algebra.name}+ is not invariant")
    representations = block_representations(algebra, rep)
    if isinstance(representations, Indeterminate):
        logger.warning("Oracle refused a decision: %s", representations.reason)
        return representations
    group = algebra.group
    irreducibles = irreducible_characters(group)
    classes = group.conjugacy_classes
    multiplicities, characters = [], []
    for image, rho in zip(block_images(p), representations):
        character = [trace(rho[g] * image) for g in group.elements()]
        counts = []
        for irreducible in irreducibles:
            total = K.zero
            for g in group.elements():
                total += irreducible.idempotent[g] * character[g]
            count = total / scalar(irreducible.degree)
            if count.y or count.x.denominator != 1:
                raise InternalInvariantError(
                    f"non-integral multiplicity {format_scalar(count)} in {algebra.name}"
                )
            counts.append(int(count.x.numerator))
        multiplicities.append(tuple(counts))
        characters.append(tuple(character[members[0]] for members in classes))
    return InvariantVector(tuple(multiplicities), tuple(characters))
