# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Finite groups, finite-dimensional G-algebras and their equivariant maps.

An algebra is stored by sparse structure constants over a declared basis; its
elements are tuples of coordinates. Groups act by invertible matrices on those
coordinates. Homomorphisms are matrices that are checked to be multiplicative
and equivariant when they are built.
"""

import functools
import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from sympy.polys.matrices import DomainMatrix

from linalg import (
    K,
    GKCalcError,
    PathEvaluationError,
    Scalar,
    block_diagonal,
    evaluate_matrix,
    identity,
    inverse,
    is_zero,
    kron,
    left_inverse,
    rank,
    reduce_path,
    solve_in_image,
    submatrix,
    zeros,
)

logger = logging.getLogger(__name__)

Vector = tuple
StructureTable = Mapping[tuple[int, int], tuple[tuple[int, Scalar], ...]]


class AlgebraError(GKCalcError):
    """Base class for errors about groups, algebras and their maps."""


class GroupError(AlgebraError):
    """Raised when a multiplication table does not define a group."""


class AlgebraValidationError(AlgebraError):
    """Raised when an algebra violates one of its axioms."""

    def __init__(self, message: str, triple: Optional[tuple[int, ...]] = None):
        super().__init__(message)
        self.triple = triple


class HomomorphismError(AlgebraError):
    """Raised when a map is not multiplicative or not equivariant."""

    def __init__(
        self,
        message: str,
        group_element: Optional[int] = None,
        basis: Optional[tuple[int, ...]] = None,
    ):
        super().__init__(message)
        self.group_element = group_element
        self.basis = basis


class CornerError(AlgebraError):
    """Raised when a matrix action does not fix the upper-left corner."""


class ColumnActionError(AlgebraError):
    """Raised when an action on M_n(A) is not induced by an action on A^n."""


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its multiplication table.

    ``mul_table[g][h]`` is the index of the product gh.
    """

    name: str
    mul_table: tuple[tuple[int, ...], ...]
    identity: int = field(init=False)
    inverse: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        order = len(self.mul_table)
        if order == 0:
            raise GroupError(f"group {self.name} is empty")
        elements = set(range(order))
        for g, row in enumerate(self.mul_table):
            if len(row) != order or set(row) != elements:
                raise GroupError(f"row {g} of group {self.name} is not a permutation")
        for g in range(order):
            for h in range(order):
                for k in range(order):
                    if self.mul(self.mul(g, h), k) != self.mul(g, self.mul(h, k)):
                        raise GroupError(
                            f"group {self.name} is not associative at ({g}, {h}, {k})"
                        )
        neutral = [g for g in range(order) if self.mul_table[g] == tuple(range(order))]
        if not neutral:
            raise GroupError(f"group {self.name} has no identity element")
        object.__setattr__(self, "identity", neutral[0])
        inverses = []
        for g in range(order):
            candidates = [h for h in range(order) if self.mul_table[g][h] == neutral[0]]
            inverses.append(candidates[0])
        object.__setattr__(self, "inverse", tuple(inverses))

    @property
    def order(self) -> int:
        """Number of elements."""
        return len(self.mul_table)

    def elements(self) -> range:
        """The elements as indices."""
        return range(self.order)

    def mul(self, g: int, h: int) -> int:
        """Product ``g * h``."""
        return self.mul_table[g][h]

    def inv(self, g: int) -> int:
        """Inverse of ``g``."""
        return self.inverse[g]

    def is_trivial(self) -> bool:
        """Whether the group has a single element."""
        return self.order == 1

    @functools.cached_property
    def conjugacy_classes(self) -> tuple[tuple[int, ...], ...]:
        """Conjugacy classes in order of their smallest element; the identity class first."""
        seen: set[int] = set()
        classes = []
        for g in self.elements():
            if g in seen:
                continue
            orbit = sorted({self.mul(self.mul(h, g), self.inv(h)) for h in self.elements()})
            seen.update(orbit)
            classes.append(tuple(orbit))
        classes.sort(key=lambda c: (self.identity not in c, c[0]))
        return tuple(classes)

    def class_index(self, g: int) -> int:
        """Index of the conjugacy class holding ``g``."""
        for index, members in enumerate(self.conjugacy_classes):
            if g in members:
                return index
        raise GroupError(f"{g} is not an element of {self.name}")


def cyclic_group(order: int, name: Optional[str] = None) -> FiniteGroup:
    """The cyclic group of the given order, written additively."""
    table = tuple(tuple((g + h) % order for h in range(order)) for g in range(order))
    return FiniteGroup(name or f"Z{order}", table)


def trivial_group() -> FiniteGroup:
    """The group with one element."""
    return cyclic_group(1, "1")


def regular_representation(group: FiniteGroup) -> tuple[DomainMatrix, ...]:
    """Left regular representation: lambda_g maps delta_h to delta_gh."""
    matrices = []
    for g in group.elements():
        rows = [[K.zero] * group.order for _ in group.elements()]
        for h in group.elements():
            rows[group.mul(g, h)][h] = K.one
        matrices.append(DomainMatrix(rows, (group.order, group.order), K))
    return tuple(matrices)


def is_scalar_matrix(m: DomainMatrix) -> bool:
    """Whether ``m`` is a multiple of the identity."""
    values = m.to_list()
    size = m.shape[0]
    return all(
        values[i][j] == (values[0][0] if i == j else K.zero)
        for i in range(size)
        for j in range(size)
    )


def check_projective_action(group: FiniteGroup, implementing: Sequence[DomainMatrix]) -> None:
    """Check that g -> ad(w_g) is an action by automorphisms of M_n.

    The w_g themselves may form a projective representation.
    """
    if len(implementing) != group.order:
        raise CornerError(
            f"expected {group.order} implementing matrices, got {len(implementing)}"
        )
    inverses = []
    for g, w in enumerate(implementing):
        w_inv = inverse(w)
        if w_inv is None:
            raise CornerError(f"implementing matrix of group element {g} is singular")
        inverses.append(w_inv)
    if not is_scalar_matrix(implementing[group.identity]):
        raise CornerError("the identity element does not act trivially on M_n")
    for g in group.elements():
        for h in group.elements():
            defect = implementing[g] * implementing[h] * inverses[group.mul(g, h)]
            if not is_scalar_matrix(defect):
                raise CornerError(
                    f"matrix action is not multiplicative at group elements ({g}, {h})"
                )


def conjugation_matrix(w: DomainMatrix) -> DomainMatrix:
    """The matrix of ad(w) on M_n in the row-major basis e_rc."""
    w_inv = inverse(w)
    if w_inv is None:
        raise CornerError("cannot conjugate by a singular matrix")
    return kron(w, w_inv.transpose())


@dataclass(frozen=True)
class Presentation:
    """An explicit isomorphism of an algebra onto a sum of full matrix algebras.

    Column j of ``iso`` holds the images of basis element j, block after block,
    each n_k x n_k block flattened row-major. ``implementing`` gives, per block
    and per group element, an invertible v with pi_k(alpha_g(b)) = v pi_k(b) v^-1.
    """

    blocks: tuple[int, ...]
    iso: DomainMatrix
    implementing: Optional[tuple[tuple[DomainMatrix, ...], ...]] = None

    @property
    def offsets(self) -> tuple[int, ...]:
        """Start of each block in the flattened presentation coordinates."""
        positions, total = [], 0
        for size in self.blocks:
            positions.append(total)
            total += size * size
        return tuple(positions)

    @functools.cached_property
    def iso_inverse(self) -> DomainMatrix:
        """Inverse of the presentation isomorphism."""
        inv = inverse(self.iso)
        if inv is None:
            raise AlgebraValidationError("presentation map is not invertible")
        return inv

    def block_of(self, vector: Vector, k: int) -> DomainMatrix:
        """pi_k(vector) as an n_k x n_k matrix."""
        size, offset = self.blocks[k], self.offsets[k]
        rows = self.iso.to_list()
        flat = []
        for position in range(size * size):
            row = rows[offset + position]
            total = K.zero
            for j, coeff in enumerate(vector):
                if coeff and row[j]:
                    total += row[j] * coeff
            flat.append(total)
        return DomainMatrix(
            [flat[r * size : (r + 1) * size] for r in range(size)], (size, size), K
        )

    def vector_from_blocks(self, blocks: Sequence[DomainMatrix]) -> Vector:
        """Inverse of the presentation: the element with the given blocks."""
        flat = []
        for block in blocks:
            for row in block.to_list():
                flat.extend(row)
        inv_rows = self.iso_inverse.to_list()
        return tuple(
            sum((row[j] * flat[j] for j in range(len(flat)) if row[j] and flat[j]), K.zero)
            for row in inv_rows
        )


@dataclass(frozen=True)
class Amplification:
    """Records that an algebra was built as (M_n, ad w) tensor base."""

    n: int
    base: "GAlgebra"
    gamma: tuple[DomainMatrix, ...]


@dataclass(frozen=True, eq=False)
class GAlgebra:
    """A finite-dimensional algebra over Q(i) with an action of a finite group.

    Algebras compare by identity: two algebras built separately are different
    objects of the workspace even when their tables agree.
    """

    name: str
    group: FiniteGroup
    labels: tuple[str, ...]
    table: StructureTable
    action: tuple[DomainMatrix, ...]
    unit: Optional[Vector] = None
    presentation: Optional[Presentation] = None
    amplification: Optional[Amplification] = None

    @property
    def dim(self) -> int:
        """Dimension over Q(i)."""
        return len(self.labels)

    def zero(self, zero=K.zero) -> Vector:
        """The zero vector."""
        return (zero,) * self.dim

    def basis(self, index: int) -> Vector:
        """The basis vector with the given index."""
        return tuple(K.one if i == index else K.zero for i in range(self.dim))

    def multiply(self, left: Sequence, right: Sequence, zero=K.zero) -> Vector:
        """Product of two vectors through the structure constants."""
        out = [zero] * self.dim
        for i, a in enumerate(left):
            if not a:
                continue
            for j, b in enumerate(right):
                if not b:
                    continue
                for k, coeff in self.table.get((i, j), ()):
                    out[k] += a * b * coeff
        return tuple(out)

    @functools.cached_property
    def _action_columns(self) -> tuple[tuple[tuple[tuple[int, Scalar], ...], ...], ...]:
        return tuple(sparse_columns(matrix) for matrix in self.action)

    def act(self, g: int, vector: Sequence, zero=K.zero) -> Vector:
        """Apply the action of ``g`` to a vector."""
        return apply_columns(self._action_columns[g], vector, self.dim, zero)

    def has_trivial_action(self) -> bool:
        """Whether every group element acts as the identity."""
        unit = identity(self.dim)
        return all(m.to_list() == unit.to_list() for m in self.action)

    def validate(self) -> None:
        """Check associativity, the group action and the declared unit."""
        logger.debug("Validating algebra %s of dimension %d", self.name, self.dim)
        d = self.dim
        for (i, j), terms in self.table.items():
            if not (0 <= i < d and 0 <= j < d) or any(not 0 <= k < d for k, _ in terms):
                raise AlgebraValidationError(
                    f"structure constant index out of range in {self.name}", (i, j)
                )
        for i in range(d):
            for j in range(d):
                left = self.multiply(self.basis(i), self.basis(j))
                for k in range(d):
                    if self.multiply(left, self.basis(k)) != self.multiply(
                        self.basis(i), self.multiply(self.basis(j), self.basis(k))
                    ):
                        raise AlgebraValidationError(
                            f"multiplication of {self.name} is not associative on basis "
                            f"({self.labels[i]}, {self.labels[j]}, {self.labels[k]})",
                            (i, j, k),
                        )
        self._validate_action()
        if self.unit is not None:
            for i in range(d):
                e = self.basis(i)
                if self.multiply(self.unit, e) != e or self.multiply(e, self.unit) != e:
                    raise AlgebraValidationError(
                        f"declared unit of {self.name} fails on {self.labels[i]}", (i,)
                    )
        if not self.is_quadratik():
            raise AlgebraValidationError(
                f"{self.name} is not quadratik: products do not span the algebra"
            )
        if self.presentation is not None:
            validate_presentation(self)

    def _validate_action(self) -> None:
        group = self.group
        if len(self.action) != group.order:
            raise AlgebraValidationError(
                f"{self.name} needs one action matrix per element of {group.name}"
            )
        for g, matrix in enumerate(self.action):
            if matrix.shape != (self.dim, self.dim) or inverse(matrix) is None:
                raise HomomorphismError(
                    f"action of group element {g} on {self.name} is not invertible", g
                )
            for i in range(self.dim):
                for j in range(self.dim):
                    product = self.multiply(self.basis(i), self.basis(j))
                    if self.act(g, product) != self.multiply(
                        self.act(g, self.basis(i)), self.act(g, self.basis(j))
                    ):
                        raise HomomorphismError(
                            f"group element {g} does not act by an automorphism of "
                            f"{self.name} on basis pair "
                            f"({self.labels[i]}, {self.labels[j]})",
                            g,
                            (i, j),
                        )
        if self.action[group.identity].to_list() != identity(self.dim).to_list():
            raise HomomorphismError(f"identity element acts non-trivially on {self.name}")
        for g in group.elements():
            for h in group.elements():
                if (self.action[g] * self.action[h]).to_list() != self.action[
                    group.mul(g, h)
                ].to_list():
                    raise HomomorphismError(
                        f"action on {self.name} is not a group homomorphism at ({g}, {h})", g
                    )

    def is_quadratik(self) -> bool:
        """Whether products of pairs of basis elements span the algebra."""
        if self.unit is not None:
            return True
        products = [
            self.multiply(self.basis(i), self.basis(j))
            for i in range(self.dim)
            for j in range(self.dim)
        ]
        if not products:
            return True
        span = DomainMatrix([list(p) for p in products], (len(products), self.dim), K)
        return rank(span) == self.dim


def sparse_columns(matrix: DomainMatrix) -> tuple[tuple[tuple[int, object], ...], ...]:
    """Nonzero entries of each column, for sparse application."""
    rows = matrix.to_list()
    height, width = matrix.shape
    return tuple(
        tuple((i, rows[i][j]) for i in range(height) if rows[i][j]) for j in range(width)
    )


def apply_columns(columns: Sequence, vector: Sequence, height: int, zero=K.zero) -> Vector:
    """Apply a matrix stored by sparse columns to a vector."""
    out = [zero] * height
    for j, coeff in enumerate(vector):
        if not coeff:
            continue
        for i, value in columns[j]:
            out[i] += coeff * value
    return tuple(out)


def validate_presentation(algebra: GAlgebra) -> None:
    """Check that the declared block presentation is an equivariant algebra isomorphism."""
    presentation = algebra.presentation
    assert presentation is not None
    total = sum(size * size for size in presentation.blocks)
    if presentation.iso.shape != (total, algebra.dim) or total != algebra.dim:
        raise AlgebraValidationError(
            f"presentation of {algebra.name} has shape {presentation.iso.shape}, "
            f"expected ({algebra.dim}, {algebra.dim})"
        )
    if inverse(presentation.iso) is None:
        raise AlgebraValidationError(f"presentation of {algebra.name} is not invertible")
    for k in range(len(presentation.blocks)):
        for i in range(algebra.dim):
            for j in range(algebra.dim):
                product = algebra.multiply(algebra.basis(i), algebra.basis(j))
                expected = presentation.block_of(algebra.basis(i), k) * presentation.block_of(
                    algebra.basis(j), k
                )
                if presentation.block_of(product, k).to_list() != expected.to_list():
                    raise AlgebraValidationError(
                        f"presentation of {algebra.name} is not multiplicative in block {k}",
                        (i, j),
                    )
    if presentation.implementing is None:
        return
    for k, per_group in enumerate(presentation.implementing):
        for g, v in enumerate(per_group):
            v_inv = inverse(v)
            if v_inv is None:
                raise AlgebraValidationError(
                    f"implementing matrix of block {k}, group element {g} is singular"
                )
            for i in range(algebra.dim):
                moved = presentation.block_of(algebra.act(g, algebra.basis(i)), k)
                conjugated = v * presentation.block_of(algebra.basis(i), k) * v_inv
                if moved.to_list() != conjugated.to_list():
                    raise AlgebraValidationError(
                        f"implementing matrix of block {k} does not implement group "
                        f"element {g} on {algebra.labels[i]}",
                        (k, g, i),
                    )


def block_implementing(algebra: GAlgebra) -> Optional[tuple[tuple[DomainMatrix, ...], ...]]:
    """Implementing matrices per block, defaulting to identities for trivial actions."""
    presentation = algebra.presentation
    if presentation is None:
        return None
    if presentation.implementing is not None:
        return presentation.implementing
    if not algebra.has_trivial_action():
        return None
    return tuple(
        tuple(identity(size) for _ in algebra.group.elements()) for size in presentation.blocks
    )


def make_algebra(
    name: str,
    group: FiniteGroup,
    labels: Sequence[str],
    table: StructureTable,
    action: Optional[Sequence[DomainMatrix]] = None,
    unit: Optional[Vector] = None,
    presentation: Optional[Presentation] = None,
    check: bool = True,
) -> GAlgebra:
    """Build an algebra from explicit data and verify all of its axioms."""
    dim = len(labels)
    actions = tuple(action) if action is not None else (identity(dim),) * group.order
    algebra = GAlgebra(
        name=name,
        group=group,
        labels=tuple(labels),
        table={key: tuple(terms) for key, terms in table.items() if terms},
        action=actions,
        unit=unit,
        presentation=presentation,
    )
    if check:
        algebra.validate()
    return algebra


def complex_algebra(group: FiniteGroup, name: str = "C") -> GAlgebra:
    """The complex numbers with trivial action, the source of every word."""
    return make_algebra(
        name,
        group,
        ["1"],
        {(0, 0): ((0, K.one),)},
        unit=(K.one,),
        presentation=Presentation((1,), identity(1)),
    )


def is_complex_algebra(algebra: GAlgebra) -> bool:
    """Whether ``algebra`` is C with its unit and the trivial action."""
    return (
        algebra.dim == 1
        and algebra.unit == (K.one,)
        and algebra.has_trivial_action()
        and algebra.multiply((K.one,), (K.one,)) == (K.one,)
    )


@dataclass(frozen=True, eq=False)
class GHom:
    """An equivariant algebra homomorphism, as a target.dim x source.dim matrix."""

    name: str
    source: GAlgebra
    target: GAlgebra
    matrix: DomainMatrix

    @functools.cached_property
    def _columns(self):
        return sparse_columns(self.matrix)

    def apply(self, vector: Sequence, zero=K.zero) -> Vector:
        """Image of a vector."""
        return apply_columns(self._columns, vector, self.target.dim, zero)

    def image(self, index: int) -> Vector:
        """Image of a basis vector."""
        return self.apply(self.source.basis(index))

    def is_identity(self) -> bool:
        """Whether this is the identity of its source."""
        return self.source is self.target and (
            self.matrix.to_list() == identity(self.source.dim).to_list()
        )

    def validate(self) -> None:
        """Check shape, multiplicativity and equivariance."""
        source, target = self.source, self.target
        if self.matrix.shape != (target.dim, source.dim):
            raise HomomorphismError(
                f"{self.name} has shape {self.matrix.shape}, expected "
                f"({target.dim}, {source.dim})"
            )
        if source.group != target.group:
            raise HomomorphismError(
                f"{self.name} maps between algebras over different groups"
            )
        for i in range(source.dim):
            for j in range(source.dim):
                product = source.multiply(source.basis(i), source.basis(j))
                if self.apply(product) != target.multiply(self.image(i), self.image(j)):
                    raise HomomorphismError(
                        f"{self.name} is not multiplicative on basis pair "
                        f"({source.labels[i]}, {source.labels[j]})",
                        basis=(i, j),
                    )
        for g in source.group.elements():
            for i in range(source.dim):
                if self.apply(source.act(g, source.basis(i))) != target.act(g, self.image(i)):
                    raise HomomorphismError(
                        f"{self.name} is not equivariant for group element {g} on basis "
                        f"{source.labels[i]}",
                        group_element=g,
                        basis=(i,),
                    )


def make_hom(
    name: str, source: GAlgebra, target: GAlgebra, matrix: DomainMatrix, check: bool = True
) -> GHom:
    """Build a homomorphism, validating it unless ``check`` is false."""
    hom = GHom(name, source, target, matrix.to_dense())
    if check:
        hom.validate()
    return hom


def identity_hom(algebra: GAlgebra) -> GHom:
    """The identity homomorphism of ``algebra``."""
    return GHom(f"id({algebra.name})", algebra, algebra, identity(algebra.dim))


def zero_hom(source: GAlgebra, target: GAlgebra) -> GHom:
    """The zero homomorphism between two algebras."""
    return GHom(f"0({source.name},{target.name})", source, target, zeros(target.dim, source.dim))


def compose(first: GHom, second: GHom, name: Optional[str] = None) -> GHom:
    """The composite written first.second: apply ``first``, then ``second``."""
    if first.target is not second.source:
        raise HomomorphismError(
            f"cannot compose {first.name}: {first.source.name} -> {first.target.name} "
            f"with {second.name}: {second.source.name} -> {second.target.name}"
        )
    return GHom(
        name or f"{first.name}.{second.name}",
        first.source,
        second.target,
        second.matrix * first.matrix,
    )


def homs_equal(first: GHom, second: GHom) -> bool:
    """Whether two homomorphisms have the same endpoints and matrix."""
    return (
        first.source is second.source
        and first.target is second.target
        and first.matrix.to_list() == second.matrix.to_list()
    )


@functools.cache
def unitize(algebra: GAlgebra) -> tuple[GAlgebra, GHom]:
    """A^+ = A with an adjoined unit as its last basis element, and the inclusion A -> A^+."""
    d = algebra.dim
    table = dict(algebra.table)
    for i in range(d):
        table[(i, d)] = ((i, K.one),)
        table[(d, i)] = ((i, K.one),)
    table[(d, d)] = ((d, K.one),)
    unitized = GAlgebra(
        name=f"{algebra.name}+",
        group=algebra.group,
        labels=algebra.labels + ("1+",),
        table=table,
        action=tuple(block_diagonal([m, identity(1)]) for m in algebra.action),
        unit=tuple(K.one if i == d else K.zero for i in range(d + 1)),
    )
    inclusion = GHom(
        f"iota({algebra.name})",
        algebra,
        unitized,
        DomainMatrix(
            [[K.one if i == j else K.zero for j in range(d)] for i in range(d + 1)],
            (d + 1, d),
            K,
        ),
    )
    return unitized, inclusion


@functools.cache
def unitize_hom(hom: GHom) -> GHom:
    """phi^+: adjoined unit to adjoined unit, phi on the rest."""
    source_plus, _ = unitize(hom.source)
    target_plus, _ = unitize(hom.target)
    return GHom(
        f"{hom.name}+", source_plus, target_plus, block_diagonal([hom.matrix, identity(1)])
    )


# Keyed on the base object, which the entry keeps alive.
_MATRIX_ALGEBRAS: dict[tuple[int, "GAlgebra", tuple], GAlgebra] = {}


def _gamma_key(gamma: Sequence[DomainMatrix]) -> tuple:
    return tuple(tuple(tuple(row) for row in w.to_list()) for w in gamma)


def trivial_gamma(group: FiniteGroup, n: int) -> tuple[DomainMatrix, ...]:
    """The trivial action on M_n(C)."""
    return tuple(identity(n) for _ in group.elements())


def make_matrix_algebra(
    n: int,
    base: GAlgebra,
    gamma: Optional[Sequence[DomainMatrix]] = None,
    name: Optional[str] = None,
) -> GAlgebra:
    """(M_n, ad w) tensor base, with basis e_rc (x) b at index (r*n + c)*dim + b.

    ``gamma`` lists one implementing matrix w_g per group element; the result is
    cached so that equal requests return the same algebra object.
    """
    if n < 1:
        raise CornerError(f"matrix size must be positive, got {n}")
    group = base.group
    gamma = tuple(g.to_dense() for g in gamma) if gamma is not None else trivial_gamma(group, n)
    key = (n, base, _gamma_key(gamma))
    cached = _MATRIX_ALGEBRAS.get(key)
    if cached is not None:
        return cached
    check_projective_action(group, gamma)
    if any(w.shape != (n, n) for w in gamma):
        raise CornerError(f"implementing matrices must be {n}x{n}")
    d = base.dim
    labels = tuple(
        f"E{r + 1}{c + 1}*{label}" for r in range(n) for c in range(n) for label in base.labels
    )
    table: dict[tuple[int, int], tuple[tuple[int, Scalar], ...]] = {}
    for (i, j), terms in base.table.items():
        for r in range(n):
            for c in range(n):
                for q in range(n):
                    left = (r * n + c) * d + i
                    right = (c * n + q) * d + j
                    table[(left, right)] = tuple(((r * n + q) * d + k, v) for k, v in terms)
    action = tuple(
        kron(conjugation_matrix(w), alpha) for w, alpha in zip(gamma, base.action)
    )
    unit = None
    if base.unit is not None:
        entries = [K.zero] * (n * n * d)
        for r in range(n):
            for b, coeff in enumerate(base.unit):
                entries[(r * n + r) * d + b] = coeff
        unit = tuple(entries)
    algebra = GAlgebra(
        name=name or f"M{n}({base.name})",
        group=group,
        labels=labels,
        table=table,
        action=action,
        unit=unit,
        presentation=_amplified_presentation(n, base, gamma),
        amplification=Amplification(n, base, gamma),
    )
    _MATRIX_ALGEBRAS[key] = algebra
    logger.debug("Built matrix algebra %s of dimension %d", algebra.name, algebra.dim)
    return algebra


def _amplified_presentation(
    n: int, base: GAlgebra, gamma: tuple[DomainMatrix, ...]
) -> Optional[Presentation]:
    presentation = base.presentation
    if presentation is None:
        return None
    d = base.dim
    blocks = tuple(n * size for size in presentation.blocks)
    total = sum(size * size for size in blocks)
    columns = []
    for r in range(n):
        for c in range(n):
            unit_rc = DomainMatrix(
                [[K.one if (x, y) == (r, c) else K.zero for y in range(n)] for x in range(n)],
                (n, n),
                K,
            )
            for b in range(d):
                flat = []
                for k in range(len(presentation.blocks)):
                    block = kron(unit_rc, presentation.block_of(base.basis(b), k))
                    for row in block.to_list():
                        flat.extend(row)
                columns.append(flat)
    iso = DomainMatrix([list(row) for row in zip(*columns)], (total, n * n * d), K)
    base_implementing = block_implementing(base)
    implementing = None
    if base_implementing is not None:
        implementing = tuple(
            tuple(kron(w, v) for w, v in zip(gamma, per_group))
            for per_group in base_implementing
        )
    return Presentation(blocks, iso, implementing)


@dataclass(frozen=True, eq=False)
class CornerEmbedding:
    """The very special corner embedding a -> e_11 (x) a of base into M_n (x) base.

    ``basis_change`` is the change of basis of C^n under which gamma was written,
    when the corner was produced by averaging over the group.
    """

    name: str
    base: GAlgebra
    n: int
    gamma: tuple[DomainMatrix, ...]
    ambient: GAlgebra
    embedding: GHom
    basis_change: Optional[DomainMatrix] = None


def corner_embedding(
    base: GAlgebra,
    n: int,
    gamma: Optional[Sequence[DomainMatrix]] = None,
    name: Optional[str] = None,
    basis_change: Optional[DomainMatrix] = None,
) -> CornerEmbedding:
    """The corner embedding of ``base`` into M_n(C) tensor ``base``."""
    ambient = make_matrix_algebra(n, base, gamma)
    gamma = ambient.amplification.gamma  # type: ignore[union-attr]
    for g, w in enumerate(gamma):
        moved = conjugation_matrix(w).to_list()
        column = [moved[x][0] for x in range(n * n)]
        if column[0] != K.one or any(column[1:]):
            raise CornerError(
                f"matrix action of group element {g} moves the corner e11 of {ambient.name}"
            )
    d = base.dim
    matrix = DomainMatrix(
        [[K.one if i == j else K.zero for j in range(d)] for i in range(n * n * d)],
        (n * n * d, d),
        K,
    )
    label = name or f"e({base.name},{n})"
    embedding = make_hom(label, base, ambient, matrix)
    return CornerEmbedding(label, base, n, gamma, ambient, embedding, basis_change)


@dataclass(frozen=True)
class DirectSum:
    """A direct sum with its inclusions, projections and split exact sequence."""

    algebra: GAlgebra
    inclusions: tuple[GHom, GHom]
    projections: tuple[GHom, GHom]
    sequence: "SplitExactSequence"


def direct_sum(left: GAlgebra, right: GAlgebra, name: Optional[str] = None) -> DirectSum:
    """A (+) B with its canonical split-exact sequence A -> A (+) B -> B."""
    if left.group != right.group:
        raise AlgebraError(f"{left.name} and {right.name} carry different groups")
    dl, dr = left.dim, right.dim
    table = dict(left.table)
    for (i, j), terms in right.table.items():
        table[(i + dl, j + dl)] = tuple((k + dl, v) for k, v in terms)
    unit = None
    if left.unit is not None and right.unit is not None:
        unit = tuple(left.unit) + tuple(right.unit)
    algebra = GAlgebra(
        name=name or f"({left.name}+{right.name})",
        group=left.group,
        labels=tuple(f"{label}@0" for label in left.labels)
        + tuple(f"{label}@1" for label in right.labels),
        table=table,
        action=tuple(block_diagonal([a, b]) for a, b in zip(left.action, right.action)),
        unit=unit,
        presentation=_sum_presentation(left, right),
    )
    total = dl + dr
    inl = GHom(
        f"{algebra.name}_inl",
        left,
        algebra,
        DomainMatrix(
            [[K.one if i == j else K.zero for j in range(dl)] for i in range(total)],
            (total, dl),
            K,
        ),
    )
    inr = GHom(
        f"{algebra.name}_inr",
        right,
        algebra,
        DomainMatrix(
            [[K.one if i == j + dl else K.zero for j in range(dr)] for i in range(total)],
            (total, dr),
            K,
        ),
    )
    prl = GHom(f"{algebra.name}_prl", algebra, left, inl.matrix.transpose())
    prr = GHom(f"{algebra.name}_prr", algebra, right, inr.matrix.transpose())
    sequence = SplitExactSequence(f"{algebra.name}_split", inl, prr, inr)
    return DirectSum(algebra, (inl, inr), (prl, prr), sequence)


def _sum_presentation(left: GAlgebra, right: GAlgebra) -> Optional[Presentation]:
    if left.presentation is None or right.presentation is None:
        return None
    implementing = None
    left_impl, right_impl = block_implementing(left), block_implementing(right)
    if left_impl is not None and right_impl is not None:
        implementing = left_impl + right_impl
    return Presentation(
        left.presentation.blocks + right.presentation.blocks,
        block_diagonal([left.presentation.iso, right.presentation.iso]),
        implementing,
    )


@dataclass(frozen=True)
class SplitReport:
    """Outcome of `check_splitexact`; ``projection`` is u: M -> J when valid."""

    failures: tuple[str, ...]
    projection: Optional[DomainMatrix] = None

    @property
    def valid(self) -> bool:
        """Whether no check failed."""
        return not self.failures


def check_splitexact(i: GHom, f: GHom, s: GHom) -> SplitReport:
    """Check J -i-> M -f-> A with split s and compute the projection of M onto J."""
    if i.target is not f.source or s.source is not f.target or s.target is not f.source:
        return SplitReport(("maps are not composable as J -> M -> A with split A -> M",))
    failures = []
    if (f.matrix * s.matrix).to_list() != identity(f.target.dim).to_list():
        failures.append("split law fails")
    if rank(i.matrix) < i.source.dim:
        failures.append("injectivity fails")
    kernel_dim = f.source.dim - rank(f.matrix)
    if not is_zero(f.matrix * i.matrix) or rank(i.matrix) != kernel_dim:
        failures.append("exactness fails")
    if failures:
        for failure in failures:
            logger.debug("Split-exact check: %s", failure)
        return SplitReport(tuple(failures))
    complement = identity(f.source.dim) - s.matrix * f.matrix
    return SplitReport((), left_inverse(i.matrix) * complement)


@dataclass(frozen=True, eq=False)
class SplitExactSequence:
    """A split-exact sequence J -i-> M -f-> A with split s: A -> M."""

    name: str
    i: GHom
    f: GHom
    s: GHom

    @property
    def ideal(self) -> GAlgebra:
        """The ideal J."""
        return self.i.source

    @property
    def middle(self) -> GAlgebra:
        """The middle algebra M."""
        return self.i.target

    @property
    def quotient(self) -> GAlgebra:
        """The quotient A."""
        return self.f.target

    def validate(self) -> SplitReport:
        """Raise when the sequence is not split exact."""
        report = check_splitexact(self.i, self.f, self.s)
        if not report.valid:
            raise AlgebraValidationError(
                f"{self.name} is not split exact: {'; '.join(report.failures)}"
            )
        return report


@dataclass(frozen=True)
class ColumnAction:
    """The action gamma on the column A^n, with the reconstruction certificate."""

    n: int
    base: GAlgebra
    gamma: tuple[DomainMatrix, ...]
    certified: bool


def _column_indices(n: int, d: int) -> list[int]:
    return [(r * n) * d + b for r in range(n) for b in range(d)]


def _left_multiplication(algebra: GAlgebra, element: Vector, columns: list[int]) -> DomainMatrix:
    """Matrix of c -> element * c restricted to the span of the given basis indices."""
    position = {index: slot for slot, index in enumerate(columns)}
    rows = [[K.zero] * len(columns) for _ in columns]
    for slot, index in enumerate(columns):
        product = algebra.multiply(element, algebra.basis(index))
        for k, coeff in enumerate(product):
            if coeff:
                rows[position[k]][slot] = coeff
    return DomainMatrix(rows, (len(columns), len(columns)), K)


def derive_column_action(
    algebra: GAlgebra, gamma: Optional[Sequence[DomainMatrix]] = None
) -> ColumnAction:
    """Restrict an action on M_n(A) to the first column and certify it determines the action.

    Args:
        algebra: an algebra built by `make_matrix_algebra`
        gamma: action matrices on ``algebra``; defaults to its own action

    Returns:
        the column action, one nd x nd matrix per group element
    """
    if algebra.amplification is None:
        raise ColumnActionError(f"{algebra.name} is not a matrix algebra over a base")
    n, base = algebra.amplification.n, algebra.amplification.base
    d = base.dim
    actions = tuple(gamma) if gamma is not None else algebra.action
    corner = list(range(d))
    column_basis = _column_indices(n, d)
    column_set = set(column_basis)
    restricted = []
    for g, big in enumerate(actions):
        rows = big.to_list()
        for j in corner:
            if any(rows[i][j] for i in range(algebra.dim) if i not in corner):
                raise ColumnActionError(
                    f"group element {g} moves the corner of {algebra.name} out of itself"
                )
        for j in column_basis:
            if any(rows[i][j] for i in range(algebra.dim) if i not in column_set):
                raise ColumnActionError(
                    f"group element {g} does not preserve the first column of {algebra.name}"
                )
        restricted.append(submatrix(big, column_basis, column_basis))
    for g, small in enumerate(restricted):
        if inverse(small) is None:
            raise ColumnActionError(f"column action of group element {g} is singular")
        big_columns = sparse_columns(actions[g])
        for t in range(algebra.dim):
            moved_t = apply_columns(big_columns, algebra.basis(t), algebra.dim)
            lhs = _left_multiplication(algebra, moved_t, column_basis)
            rhs = small * _left_multiplication(algebra, algebra.basis(t), column_basis)
            if (lhs * small).to_list() != rhs.to_list():
                raise ColumnActionError(
                    f"action of group element {g} is not ad of its column action on "
                    f"{algebra.labels[t]}"
                )
    _certify_reconstruction(algebra, actions, restricted, column_basis)
    return ColumnAction(n, base, tuple(restricted), True)


def _certify_reconstruction(
    algebra: GAlgebra,
    actions: Sequence[DomainMatrix],
    restricted: Sequence[DomainMatrix],
    column_basis: list[int],
) -> None:
    size = len(column_basis)
    multiplications = [
        _left_multiplication(algebra, algebra.basis(t), column_basis) for t in range(algebra.dim)
    ]
    system = DomainMatrix(
        [
            [multiplications[t].to_list()[r][c] for t in range(algebra.dim)]
            for r in range(size)
            for c in range(size)
        ],
        (size * size, algebra.dim),
        K,
    )
    if rank(system) < algebra.dim:
        raise ColumnActionError(f"{algebra.name} does not act faithfully on its first column")
    for g, small in enumerate(restricted):
        small_inv = inverse(small)
        assert small_inv is not None
        for t in range(algebra.dim):
            target = small * multiplications[t] * small_inv
            rhs = DomainMatrix(
                [[value] for row in target.to_list() for value in row], (size * size, 1), K
            )
            solution = solve_in_image(system, rhs)
            expected = [row[t] for row in actions[g].to_list()]
            if solution is None or [row[0] for row in solution.to_list()] != expected:
                raise ColumnActionError(
                    f"internal consistency: action of group element {g} on "
                    f"{algebra.labels[t]} is not recovered from its column action"
                )


@dataclass(frozen=True, eq=False)
class PathHom:
    """A homomorphism A -> B[t] with entries in the path ring Q(i)[c,s]/(c^2+s^2-1)."""

    name: str
    source: GAlgebra
    target: GAlgebra
    matrix: DomainMatrix

    def image(self, index: int):
        """Image of a basis vector as a vector of path scalars."""
        return tuple(row[index] for row in self.matrix.to_list())

    def validate(self) -> None:
        """Check multiplicativity and equivariance modulo c^2 + s^2 - 1."""
        source, target = self.source, self.target
        zero = self.matrix.domain.zero
        columns = sparse_columns(self.matrix)
        for i in range(source.dim):
            for j in range(source.dim):
                product = source.multiply(source.basis(i), source.basis(j))
                lhs = apply_columns(columns, product, target.dim, zero)
                rhs = target.multiply(self.image(i), self.image(j), zero)
                if any(reduce_path(a - b) for a, b in zip(lhs, rhs)):
                    raise HomomorphismError(
                        f"homotopy {self.name} is not multiplicative on "
                        f"({source.labels[i]}, {source.labels[j]})",
                        basis=(i, j),
                    )
        for g in source.group.elements():
            for i in range(source.dim):
                lhs = apply_columns(columns, source.act(g, source.basis(i)), target.dim, zero)
                rhs = target.act(g, self.image(i), zero)
                if any(reduce_path(a - b) for a, b in zip(lhs, rhs)):
                    raise HomomorphismError(
                        f"homotopy {self.name} is not equivariant for group element {g}",
                        group_element=g,
                        basis=(i,),
                    )

    @functools.cache
    def at(self, endpoint: int) -> GHom:
        """The evaluation at t = 0 (endpoint 0) or t = pi/2 (endpoint 1)."""
        if endpoint not in (0, 1):
            raise PathEvaluationError(
                f"homotopy {self.name} can only be evaluated at 0 or 1, not {endpoint!r}"
            )
        return make_hom(
            f"{self.name}@{endpoint}",
            self.source,
            self.target,
            evaluate_matrix(self.matrix, endpoint),
        )
