# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Level-one elements in the very special setting and their stabilized idempotent form.

A level-one element A -> B is the data of an ambient algebra X, an ideal J of X
given by an injective map iota, a corner embedding e of B (J maps into its
ambient M_k (x) B) and two equivariant splits sigma_+ and sigma_- : A -> X whose
difference lands in iota(J). Elements from C are carried as pairs of invariant
idempotent matrices (`S1Element`).
"""

import functools
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from sympy.polys.matrices import DomainMatrix

from algebra import (
    CornerEmbedding,
    GAlgebra,
    GHom,
    SplitExactSequence,
    check_splitexact,
    compose,
    corner_embedding,
    direct_sum,
    identity_hom,
    is_complex_algebra,
    make_hom,
    make_matrix_algebra,
    trivial_gamma,
    unitize,
    zero_hom,
)
from amplified import UnitizedMatrix
from linalg import (
    K,
    GKCalcError,
    block_diagonal,
    format_scalar,
    identity,
    kron,
    left_inverse,
    matrix,
    rank,
    scale,
    submatrix,
    unit_matrix,
    zeros,
)
from words import (
    CornerInvLetter,
    Gen,
    HomLetter,
    IdentityLetter,
    Letter,
    SplitLetter,
    Word,
    make_compose,
)

logger = logging.getLogger(__name__)


class LevelOneError(GKCalcError):
    """Raised when level-one data violates its invariants."""


@functools.cache
def _ideal_solver(iota: GHom) -> DomainMatrix:
    return left_inverse(iota.matrix)


def ideal_coordinates(iota: GHom, vector: Sequence) -> Optional[tuple]:
    """Coordinates j with iota(j) = vector, or None when vector is outside the ideal."""
    solver = _ideal_solver(iota)
    column = DomainMatrix([[value] for value in vector], (len(vector), 1), K)
    solution = solver * column
    coordinates = tuple(row[0] for row in solution.to_list())
    if tuple(iota.apply(coordinates)) != tuple(vector):
        return None
    return coordinates


def _corner_size(corner: Optional[CornerEmbedding]) -> int:
    return corner.n if corner is not None else 1


def _corner_gamma(target: GAlgebra, corner: Optional[CornerEmbedding]) -> tuple:
    return corner.gamma if corner is not None else trivial_gamma(target.group, 1)


@dataclass(frozen=True, eq=False)
class LevelOne:
    """The diagram sigma_+ nabla sigma_- from ``source`` to ``target``."""

    source: GAlgebra
    target: GAlgebra
    ambient: GAlgebra
    ideal: GAlgebra
    iota: GHom
    ideal_map: GHom
    sigma_plus: GHom
    sigma_minus: GHom
    corner: Optional[CornerEmbedding] = None
    name: str = "x"

    def validate(self) -> None:
        """Check that the diagram is a well-formed level-one element."""
        ambient, ideal = self.ambient, self.ideal
        if self.iota.source is not ideal or self.iota.target is not ambient:
            raise LevelOneError(f"{self.name}: iota must map {ideal.name} into {ambient.name}")
        for sigma in (self.sigma_plus, self.sigma_minus):
            if sigma.source is not self.source or sigma.target is not ambient:
                raise LevelOneError(
                    f"{self.name}: {sigma.name} must map {self.source.name} into {ambient.name}"
                )
        expected = self.corner.ambient if self.corner is not None else self.target
        if self.ideal_map.source is not ideal or self.ideal_map.target is not expected:
            raise LevelOneError(
                f"{self.name}: ideal map must go from {ideal.name} to {expected.name}"
            )
        if self.corner is not None and self.corner.base is not self.target:
            raise LevelOneError(f"{self.name}: corner is not a corner of {self.target.name}")
        if rank(self.iota.matrix) < ideal.dim:
            raise LevelOneError(f"{self.name}: iota is not injective")
        for j in range(ideal.dim):
            image = self.iota.image(j)
            for b in range(ambient.dim):
                e = ambient.basis(b)
                for product in (ambient.multiply(image, e), ambient.multiply(e, image)):
                    if ideal_coordinates(self.iota, product) is None:
                        raise LevelOneError(
                            f"{self.name}: {ideal.name} is not an ideal of {ambient.name} "
                            f"at ({ideal.labels[j]}, {ambient.labels[b]})"
                        )
        for a in range(self.source.dim):
            difference = tuple(
                p - m for p, m in zip(self.sigma_plus.image(a), self.sigma_minus.image(a))
            )
            if ideal_coordinates(self.iota, difference) is None:
                raise LevelOneError(
                    f"{self.name}: splits differ outside the ideal on {self.source.labels[a]}"
                )
        middle = self.middle
        report = check_splitexact(middle.i, middle.f, middle.s)
        if not report.valid:
            raise LevelOneError(f"{self.name}: {'; '.join(report.failures)}")

    @functools.cached_property
    def middle(self) -> "Middle":
        """The middle algebra of the double split sequence."""
        return build_middle(self)

    def pointed(self) -> "PointedLevelOne":
        """The images of 1 under both splits, for elements starting at C."""
        if not is_complex_algebra(self.source):
            raise LevelOneError(f"{self.name} does not start at C but at {self.source.name}")
        rep = tuple(identity(1) for _ in self.source.group.elements())
        plus = UnitizedMatrix.from_entries(
            self.ambient, [[(K.zero, self.sigma_plus.image(0))]]
        )
        minus = UnitizedMatrix.from_entries(
            self.ambient, [[(K.zero, self.sigma_minus.image(0))]]
        )
        return PointedLevelOne(
            target=self.target,
            ambient=self.ambient,
            ideal=self.ideal,
            iota=self.iota,
            ideal_map=self.ideal_map,
            corner=self.corner,
            plus=plus,
            minus=minus,
            rep=rep,
        )

    def negate(self) -> "LevelOne":
        """Swap the two splits."""
        return LevelOne(
            self.source,
            self.target,
            self.ambient,
            self.ideal,
            self.iota,
            self.ideal_map,
            self.sigma_minus,
            self.sigma_plus,
            self.corner,
            f"-{self.name}",
        )

    def to_word(self) -> Word:
        """(sigma_+ (+) id) . delta(sigma_- (+) id) [. ideal map] [. e^-1]."""
        middle = self.middle
        word: Word = make_compose(
            Gen(HomLetter(middle.lift_plus)), Gen(SplitLetter(middle.sequence))
        )
        if not self.ideal_map.is_identity():
            word = make_compose(word, Gen(HomLetter(self.ideal_map)))
        if self.corner is not None:
            word = make_compose(word, Gen(CornerInvLetter(self.corner)))
        return word


@dataclass(frozen=True)
class Middle:
    """M = iota(J) + graph(sigma_-) inside X (+) A, with J -> M -> A split by sigma_- (+) id."""

    algebra: GAlgebra
    i: GHom
    f: GHom
    s: GHom
    lift_plus: GHom
    sequence: SplitExactSequence


def build_middle(x: LevelOne) -> Middle:
    """Realize the middle algebra of ``x`` as J (+) A with its splits."""
    ambient, source, ideal = x.ambient, x.source, x.ideal
    dj, da = ideal.dim, source.dim

    def coordinates(ambient_part: Sequence, source_part: Sequence) -> tuple:
        shifted = tuple(
            value - moved for value, moved in zip(ambient_part, x.sigma_minus.apply(source_part))
        )
        ideal_part = ideal_coordinates(x.iota, shifted)
        if ideal_part is None:
            raise LevelOneError(f"{x.name}: element leaves the middle algebra")
        return tuple(ideal_part) + tuple(source_part)

    def realize(vector: Sequence) -> tuple[tuple, tuple]:
        ideal_part, source_part = vector[:dj], vector[dj:]
        ambient_part = tuple(
            a + b for a, b in zip(x.iota.apply(ideal_part), x.sigma_minus.apply(source_part))
        )
        return ambient_part, tuple(source_part)

    dim = dj + da
    basis = [tuple(K.one if i == k else K.zero for i in range(dim)) for k in range(dim)]
    realized = [realize(vector) for vector in basis]
    table = {}
    for p, (xp, ap) in enumerate(realized):
        for q, (xq, aq) in enumerate(realized):
            product = coordinates(ambient.multiply(xp, xq), source.multiply(ap, aq))
            terms = tuple((k, v) for k, v in enumerate(product) if v)
            if terms:
                table[(p, q)] = terms
    action = []
    for g in source.group.elements():
        columns = [coordinates(ambient.act(g, xp), source.act(g, ap)) for xp, ap in realized]
        action.append(DomainMatrix([list(row) for row in zip(*columns)], (dim, dim), K))
    name = f"M({x.name})"
    labels = tuple(f"{label}@J" for label in ideal.labels)
    labels += tuple(f"{label}@A" for label in source.labels)
    algebra = GAlgebra(name, source.group, labels, table, tuple(action))
    i = GHom(
        f"{name}_i",
        ideal,
        algebra,
        matrix([[K.one if r == c else K.zero for c in range(dj)] for r in range(dim)]),
    )
    f = GHom(
        f"{name}_f",
        algebra,
        source,
        matrix([[K.one if c == dj + r else K.zero for c in range(dim)] for r in range(da)]),
    )
    s = GHom(f"{name}_s", source, algebra, f.matrix.transpose())
    lift_columns = [coordinates(x.sigma_plus.image(a), source.basis(a)) for a in range(da)]
    lift_plus = GHom(
        f"{x.sigma_plus.name}+id",
        source,
        algebra,
        DomainMatrix([list(row) for row in zip(*lift_columns)], (dim, da), K),
    )
    logger.debug("Built middle algebra %s of dimension %d", name, dim)
    return Middle(algebra, i, f, s, lift_plus, SplitExactSequence(f"{name}_split", i, f, s))


def chi(letter: Letter) -> LevelOne:
    """The level-one form of a generator."""
    if isinstance(letter, HomLetter):
        return _hom_diagram(letter.hom)
    if isinstance(letter, IdentityLetter):
        return _hom_diagram(identity_hom(letter.algebra))
    if isinstance(letter, CornerInvLetter):
        corner = letter.corner
        ambient = corner.ambient
        unit = identity_hom(ambient)
        return LevelOne(
            source=ambient,
            target=corner.base,
            ambient=ambient,
            ideal=ambient,
            iota=unit,
            ideal_map=unit,
            sigma_plus=unit,
            sigma_minus=zero_hom(ambient, ambient),
            corner=corner,
            name=letter.text(),
        )
    sequence = letter.sequence
    middle, ideal = sequence.middle, sequence.ideal
    return LevelOne(
        source=middle,
        target=ideal,
        ambient=middle,
        ideal=ideal,
        iota=sequence.i,
        ideal_map=identity_hom(ideal),
        sigma_plus=identity_hom(middle),
        sigma_minus=compose(sequence.f, sequence.s),
        name=letter.text(),
    )


def _hom_diagram(hom: GHom) -> LevelOne:
    target = hom.target
    unit = identity_hom(target)
    return LevelOne(
        source=hom.source,
        target=target,
        ambient=target,
        ideal=target,
        iota=unit,
        ideal_map=unit,
        sigma_plus=hom,
        sigma_minus=zero_hom(hom.source, target),
        name=hom.name,
    )


def _stack(first: GHom, second: GHom, target: GAlgebra, name: str) -> GHom:
    rows = first.matrix.to_list() + second.matrix.to_list()
    return GHom(name, first.source, target, DomainMatrix(rows, (target.dim, first.source.dim), K))


def _corner_ideal_matrix(
    x: LevelOne, offset: int, size: int, total: int
) -> list[list]:
    """Columns of x's ideal map re-indexed into the (offset, offset) block of M_total (x) B."""
    d = x.target.dim
    rows = [[K.zero] * x.ideal.dim for _ in range(total * total * d)]
    values = x.ideal_map.matrix.to_list()
    for r in range(size):
        for c in range(size):
            for b in range(d):
                source_row = (r * size + c) * d + b
                target_row = ((offset + r) * total + offset + c) * d + b
                rows[target_row] = list(values[source_row])
    return rows


def add(x: LevelOne, y: LevelOne, name: Optional[str] = None) -> LevelOne:
    """Block-diagonal direct sum of ambients, ideals, splits and corners."""
    if x.source is not y.source or x.target is not y.target:
        raise LevelOneError(
            f"cannot add {x.name}: {x.source.name} -> {x.target.name} "
            f"and {y.name}: {y.source.name} -> {y.target.name}"
        )
    label = name or f"({x.name}+{y.name})"
    ambient = direct_sum(x.ambient, y.ambient, f"{label}_X")
    ideal = direct_sum(x.ideal, y.ideal, f"{label}_J")
    iota = GHom(
        f"{label}_iota",
        ideal.algebra,
        ambient.algebra,
        block_diagonal([x.iota.matrix, y.iota.matrix]),
    )
    sigma_plus = _stack(x.sigma_plus, y.sigma_plus, ambient.algebra, f"{label}_plus")
    sigma_minus = _stack(x.sigma_minus, y.sigma_minus, ambient.algebra, f"{label}_minus")
    k, l = _corner_size(x.corner), _corner_size(y.corner)
    gamma = tuple(
        block_diagonal([w, v])
        for w, v in zip(_corner_gamma(x.target, x.corner), _corner_gamma(y.target, y.corner))
    )
    corner = corner_embedding(x.target, k + l, gamma, f"{label}_e")
    left = _corner_ideal_matrix(x, 0, k, k + l)
    right = _corner_ideal_matrix(y, k, l, k + l)
    columns = [row_l + row_r for row_l, row_r in zip(left, right)]
    ideal_map = make_hom(
        f"{label}_ideal",
        ideal.algebra,
        corner.ambient,
        DomainMatrix(columns, (corner.ambient.dim, ideal.algebra.dim), K),
    )
    return LevelOne(
        x.source,
        x.target,
        ambient.algebra,
        ideal.algebra,
        iota,
        ideal_map,
        sigma_plus,
        sigma_minus,
        corner,
        label,
    )


def negate(x: LevelOne) -> LevelOne:
    """Swap the two splits of ``x``."""
    return x.negate()


def to_word(x: LevelOne) -> Word:
    """A word representing ``x``."""
    return x.to_word()


@dataclass(frozen=True, eq=False)
class PointedLevelOne:
    """A level-one element from C stored by the images T_+ and T_- of 1 in M_N(X^+)."""

    target: GAlgebra
    ambient: GAlgebra
    ideal: GAlgebra
    iota: GHom
    ideal_map: GHom
    corner: Optional[CornerEmbedding]
    plus: UnitizedMatrix
    minus: UnitizedMatrix
    rep: tuple[DomainMatrix, ...]

    @property
    def size(self) -> int:
        """Matrix size N."""
        return self.plus.size

    def validate(self) -> None:
        """Check idempotency, invariance and equal scalar parts."""
        for side, m in (("plus", self.plus), ("minus", self.minus)):
            if m.algebra is not self.ambient:
                raise LevelOneError(f"{side} idempotent is not over {self.ambient.name}")
            if not m.is_idempotent():
                raise LevelOneError(f"{side} matrix is not idempotent")
            if not m.is_invariant(self.rep):
                raise LevelOneError(f"{side} idempotent is not invariant")
        difference = self.plus - self.minus
        if any(v for row in difference.scalar.to_list() for v in row):
            raise LevelOneError("idempotents differ in their scalar parts")
        self._ideal_parts(difference)

    def _ideal_parts(self, difference: UnitizedMatrix) -> dict[int, DomainMatrix]:
        solver = _ideal_solver(self.iota)
        size = difference.size
        parts: dict[int, DomainMatrix] = {}
        for j, row in enumerate(solver.to_list()):
            total = zeros(size, size)
            for b, coeff in enumerate(row):
                if coeff and b in difference.parts:
                    total = total + scale(difference.parts[b], coeff)
            parts[j] = total
        for b, row in enumerate(self.iota.matrix.to_list()):
            rebuilt = zeros(size, size)
            for j, coeff in enumerate(row):
                if coeff:
                    rebuilt = rebuilt + scale(parts[j], coeff)
            if rebuilt.to_list() != difference.part(b).to_list():
                raise LevelOneError(f"difference of idempotents leaves {self.ideal.name}")
        return parts

    def to_s1(self) -> "S1Element":
        """Pull T_+ back along iota and the ideal map; T_- must be scalar."""
        if not self.minus.is_scalar():
            raise LevelOneError("minus idempotent is not scalar, take the standard form first")
        difference = self.plus - self.minus
        if any(v for row in difference.scalar.to_list() for v in row):
            raise LevelOneError("idempotents differ in their scalar parts")
        ideal_parts = self._ideal_parts(difference)
        k = _corner_size(self.corner)
        d = self.target.dim
        size = self.size
        mapped = [zeros(size, size) for _ in range(self.ideal_map.target.dim)]
        for e, row in enumerate(self.ideal_map.matrix.to_list()):
            for j, coeff in enumerate(row):
                if coeff:
                    mapped[e] = mapped[e] + scale(ideal_parts[j], coeff)
        parts: dict[int, DomainMatrix] = {}
        for e, m in enumerate(mapped):
            if not any(v for row in m.to_list() for v in row):
                continue
            block, b = divmod(e, d)
            r, c = divmod(block, k)
            term = kron(m, unit_matrix(k, k, r, c))
            parts[b] = parts[b] + term if b in parts else term
        minus_scalar = kron(self.minus.scalar, identity(k))
        minus = UnitizedMatrix.from_scalar(self.target, minus_scalar)
        plus = UnitizedMatrix.from_parts(self.target, minus_scalar, parts)
        gamma = _corner_gamma(self.target, self.corner)
        rep = tuple(kron(u, w) for u, w in zip(self.rep, gamma))
        logger.debug(
            "Pulled back a level-one element to size %d over %s", size * k, self.target.name
        )
        return S1Element(self.target, size * k, plus, minus, rep)


@dataclass(frozen=True, eq=False)
class S1Element:
    """A pair of invariant idempotents in M_N(B^+) with equal scalar parts."""

    target: GAlgebra
    size: int
    plus: UnitizedMatrix
    minus: UnitizedMatrix
    rep: tuple[DomainMatrix, ...]

    @classmethod
    def zero(cls, target: GAlgebra) -> "S1Element":
        """The zero element over ``target``."""
        rep = tuple(identity(1) for _ in target.group.elements())
        empty = UnitizedMatrix.zero(target, 1)
        return cls(target, 1, empty, empty, rep)

    @classmethod
    def trivial(cls, target: GAlgebra, idempotent: UnitizedMatrix, rep) -> "S1Element":
        """The trivial element u nabla u."""
        return cls(target, idempotent.size, idempotent, idempotent, tuple(rep))

    @property
    def domain(self):
        """Domain of the matrix entries: Q(i) or the path ring."""
        return self.plus.domain

    def validate(self) -> None:
        """Check sizes, idempotency, invariance and equal scalar parts."""
        for side, m in (("plus", self.plus), ("minus", self.minus)):
            if m.algebra is not self.target or m.size != self.size:
                raise LevelOneError(f"{side} idempotent is not a {self.size}x{self.size} matrix")
            if not m.is_idempotent():
                raise LevelOneError(f"{side} matrix is not idempotent")
            if not m.is_invariant(self.rep):
                raise LevelOneError(f"{side} idempotent is not invariant")
        if len(self.rep) != self.target.group.order:
            raise LevelOneError("representation does not cover the group")
        if not self.plus.same_scalar_part(self.minus):
            raise LevelOneError("idempotents differ in their scalar parts")

    def is_standard(self) -> bool:
        """Whether P_- is a diagonal scalar matrix with entries 0 and 1."""
        if not self.minus.is_scalar():
            return False
        values = self.minus.scalar.to_list()
        for r, row in enumerate(values):
            for c, value in enumerate(row):
                if r != c and value:
                    return False
                if r == c and value not in (K.zero, K.one):
                    return False
        return True

    def negate(self) -> "S1Element":
        """Swap the two idempotents."""
        return S1Element(self.target, self.size, self.minus, self.plus, self.rep)

    def add(self, other: "S1Element") -> "S1Element":
        """Block-diagonal sum of two elements over the same algebra."""
        if other.target is not self.target:
            raise LevelOneError(
                f"cannot add elements over {self.target.name} and {other.target.name}"
            )
        rep = tuple(block_diagonal([u, v]) for u, v in zip(self.rep, other.rep))
        return S1Element(
            self.target,
            self.size + other.size,
            self.plus.direct_sum(other.plus),
            self.minus.direct_sum(other.minus),
            rep,
        )

    def pad(self, extra: int) -> "S1Element":
        """Append ``extra`` zero rows and columns, acted on trivially."""
        if extra <= 0:
            return self
        zero = UnitizedMatrix.zero(self.target, extra, self.domain)
        rep = tuple(block_diagonal([u, identity(extra)]) for u in self.rep)
        return S1Element(
            self.target,
            self.size + extra,
            self.plus.direct_sum(zero),
            self.minus.direct_sum(zero),
            rep,
        )

    def restrict(self, indices: Sequence[int]) -> "S1Element":
        """Keep only the given indices of both idempotents and the representation."""
        indices = list(indices)
        rep = tuple(submatrix(u, indices, indices) for u in self.rep)
        return S1Element(
            self.target,
            len(indices),
            self.plus.block(indices, indices),
            self.minus.block(indices, indices),
            rep,
        )

    def components(self) -> list[list[int]]:
        """Index sets that neither the representation nor the idempotents couple."""
        parent = list(range(self.size))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        matrices = [self.plus.scalar, self.minus.scalar, *self.rep]
        matrices += list(self.plus.parts.values()) + list(self.minus.parts.values())
        for m in matrices:
            for r, row in enumerate(m.to_list()):
                for c, value in enumerate(row):
                    if value:
                        parent[find(r)] = find(c)
        groups: dict[int, list[int]] = {}
        for i in range(self.size):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())

    def compress(self) -> "S1Element":
        """Strip trivial summands: components on which P_+ and P_- agree."""
        kept: list[int] = []
        for component in self.components():
            if not self.plus.block(component, component).equals(
                self.minus.block(component, component)
            ):
                kept.extend(component)
        if not kept:
            return S1Element.zero(self.target)
        if len(kept) == self.size:
            return self
        logger.debug(
            "Compressed an element over %s from %d to %d", self.target.name, self.size, len(kept)
        )
        return self.restrict(kept)

    def as_level_one(self, origin: GAlgebra) -> LevelOne:
        """The level-one element C -> B whose splits send 1 to P_+ and P_-.

        A zero index acted on trivially is put in front so that the corner e11
        of the stabilization is invariant.
        """
        size = self.size + 1
        rep = tuple(block_diagonal([identity(1), u]) for u in self.rep)
        zero = UnitizedMatrix.zero(self.target, 1)
        plus = zero.direct_sum(self.plus)
        minus = zero.direct_sum(self.minus)
        unitized, inclusion = unitize(self.target)
        ambient = make_matrix_algebra(size, unitized, rep)
        corner = corner_embedding(self.target, size, rep, f"e({self.target.name},{size})")
        ideal = corner.ambient
        iota = GHom(
            f"iota(M{size}({self.target.name}))",
            ideal,
            ambient,
            kron(identity(size * size), inclusion.matrix),
        )

        def split(name: str, idempotent: UnitizedMatrix) -> GHom:
            vector = idempotent.as_vector(ambient)
            return make_hom(
                name, origin, ambient, DomainMatrix([[v] for v in vector], (ambient.dim, 1), K)
            )

        return LevelOne(
            source=origin,
            target=self.target,
            ambient=ambient,
            ideal=ideal,
            iota=iota,
            ideal_map=identity_hom(ideal),
            sigma_plus=split("P+", plus),
            sigma_minus=split("P-", minus),
            corner=corner,
            name="z",
        )

    def endpoints(self) -> tuple["S1Element", "S1Element"]:
        """Evaluations of an element over the path ring at both ends."""
        for side, m in (("plus", self.plus), ("minus", self.minus)):
            if not m.is_idempotent():
                raise LevelOneError(f"path is not idempotent: {side} P(t)^2 != P(t)")
        try:
            self.validate()
        except LevelOneError as e:
            raise LevelOneError(f"path is not an element: {e}") from e
        results = []
        for endpoint in (0, 1):
            value = S1Element(
                self.target,
                self.size,
                self.plus.evaluate(endpoint),
                self.minus.evaluate(endpoint),
                self.rep,
            )
            try:
                value.validate()
            except LevelOneError as e:
                raise LevelOneError(f"evaluation at {endpoint} is not an element: {e}") from e
            results.append(value)
        return results[0], results[1]

    def as_dict(self) -> dict:
        """Serialize the element with trivial summands and padding stripped."""
        canonical = self.compress()
        return {
            "algebra": canonical.target.name,
            "size": canonical.size,
            "plus": format_unitized(canonical.plus),
            "minus": format_unitized(canonical.minus),
        }


def endpoints(homotopy: S1Element) -> tuple[S1Element, S1Element]:
    """Both endpoints of a homotopy."""
    return homotopy.endpoints()


def format_unitized(m: UnitizedMatrix) -> dict:
    """Serialize a unitized matrix by scalar part and named basis parts."""
    labels = m.algebra.labels
    return {
        "scalar": [[format_scalar(v) for v in row] for row in m.scalar.to_list()],
        "parts": {
            labels[b]: [[format_scalar(v) for v in row] for row in part.to_list()]
            for b, part in m.parts.items()
        },
    }
