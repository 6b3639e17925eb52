# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Standard form, fusion and the left fold of words from C into stabilized idempotents."""

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from algebra import CornerEmbedding, GAlgebra, compose, is_complex_algebra
from amplified import UnitizedMatrix, block_grid, scalar_identity
from levelone import LevelOne, LevelOneError, PointedLevelOne, S1Element, chi
from linalg import (
    COS,
    PATH_DOMAIN,
    SIN,
    GKCalcError,
    InternalInvariantError,
    block_diagonal,
    format_path,
    identity,
    zeros,
)
from words import (
    CornerInvLetter,
    HomLetter,
    IdentityLetter,
    Letter,
    RewriteContext,
    SplitLetter,
    SumOfProducts,
    Word,
    expand,
)

logger = logging.getLogger(__name__)


class NormalizationError(GKCalcError):
    """Raised when an element cannot be brought into standard form or fused."""


def rotation_unitary(p: UnitizedMatrix) -> UnitizedMatrix:
    """U_t = [[c p + p', s p], [-s p, c p + p']] over the path ring, p' = 1 - p."""
    if not p.is_idempotent():
        raise NormalizationError("rotation needs an idempotent")
    lifted = p.lift()
    perp = scalar_identity(p.algebra, p.size, PATH_DOMAIN) - lifted
    diagonal = lifted.scale_scalar(COS) + perp
    off = lifted.scale_scalar(SIN)
    return block_grid(p.algebra, [[diagonal, off], [-off, diagonal]])


def rotation_inverse(p: UnitizedMatrix) -> UnitizedMatrix:
    """U_{-t}, the inverse of `rotation_unitary`."""
    lifted = p.lift()
    perp = scalar_identity(p.algebra, p.size, PATH_DOMAIN) - lifted
    diagonal = lifted.scale_scalar(COS) + perp
    off = lifted.scale_scalar(SIN)
    return block_grid(p.algebra, [[diagonal, -off], [off, diagonal]])


@dataclass(frozen=True, eq=False)
class StandardFormCertificate:
    """The trivial summand q nabla q and the rotation carrying v_+- to t_+-."""

    trivial: UnitizedMatrix
    rotation: UnitizedMatrix
    rotation_inv: UnitizedMatrix
    inputs: tuple[UnitizedMatrix, UnitizedMatrix]
    outputs: tuple[UnitizedMatrix, UnitizedMatrix]

    def verify(self) -> bool:
        """Replay the rotation and check both endpoint evaluations."""
        size = self.rotation.size
        unit = scalar_identity(self.rotation.algebra, size, PATH_DOMAIN)
        if not (self.rotation * self.rotation_inv - unit).reduce().is_zero():
            return False
        start = scalar_identity(self.rotation.algebra, size)
        if not self.rotation.evaluate(0).equals(start):
            return False
        turn, turn_inv = self.rotation.evaluate(1), self.rotation_inv.evaluate(1)
        for before, after in zip(self.inputs, self.outputs):
            if not (turn * before * turn_inv).equals(after):
                return False
        return True

    def as_dict(self) -> dict:
        """Serialize the rotation path and the trivial summand."""
        return {
            "rotation": _format_path_matrix(self.rotation.reduce()),
            "trivial_size": self.trivial.size,
        }


def _format_path_matrix(m: UnitizedMatrix) -> dict:
    labels = m.algebra.labels
    return {
        "scalar": [[format_path(v) for v in row] for row in m.scalar.to_list()],
        "parts": {
            labels[b]: [[format_path(v) for v in row] for row in part.to_list()]
            for b, part in m.parts.items()
        },
    }


def standard_form(
    x: Union[LevelOne, PointedLevelOne],
) -> tuple[PointedLevelOne, StandardFormCertificate]:
    """Add q nabla q with q = 1 - T_- and rotate so that the minus part becomes 0 (+) 1.

    Args:
        x: a level-one element starting at C, or its pointed form

    Returns:
        the pointed element with T_- = diag(0, 1) and the certificate of the rotation
    """
    pointed = x.pointed() if isinstance(x, LevelOne) else x
    p = pointed.minus
    if not p.is_idempotent():
        raise NormalizationError("minus part is not idempotent")
    algebra, size = p.algebra, p.size
    perp = scalar_identity(algebra, size) - p
    v_plus = pointed.plus.direct_sum(perp)
    v_minus = p.direct_sum(perp)
    turn = block_grid(algebra, [[perp, p], [-p, perp]])
    turn_inv = block_grid(algebra, [[perp, -p], [p, perp]])
    t_plus = turn * v_plus * turn_inv
    t_minus = turn * v_minus * turn_inv
    expected = UnitizedMatrix.from_scalar(
        algebra, block_diagonal([zeros(size, size), identity(size)])
    )
    if not t_minus.equals(expected):
        raise InternalInvariantError("rotated minus part is not 0 (+) 1")
    rep = tuple(block_diagonal([u, u]) for u in pointed.rep)
    result = PointedLevelOne(
        target=pointed.target,
        ambient=pointed.ambient,
        ideal=pointed.ideal,
        iota=pointed.iota,
        ideal_map=pointed.ideal_map,
        corner=pointed.corner,
        plus=t_plus,
        minus=expected,
        rep=rep,
    )
    certificate = StandardFormCertificate(
        trivial=perp,
        rotation=rotation_unitary(p),
        rotation_inv=rotation_inverse(p),
        inputs=(v_plus, v_minus),
        outputs=(t_plus, expected),
    )
    logger.debug("Standard form over %s has size %d", algebra.name, 2 * size)
    return result, certificate


def standardize(x: Union[LevelOne, PointedLevelOne]) -> S1Element:
    """The standard form pulled back to an element over the target."""
    return standard_form(x)[0].to_s1()


class FusionFormula(enum.Enum):
    """Which fusion formula ``fuse`` uses."""

    AUTO = "auto"
    FULL = "full"
    SIMPLIFIED = "simplified"


def fuse(
    x: S1Element, y: LevelOne, formula: FusionFormula = FusionFormula.AUTO
) -> PointedLevelOne:
    """The product of x over A with y: A -> B as a level-one element from C.

    The full formula is T_+- = s_+-(P_+) (+) s_-+(P_-) with the representation
    doubled; when P_- is scalar both s-images of P_- agree and the simplified
    formula T_+- = s_+-(P_+) is used.
    """
    if y.source is not x.target:
        raise NormalizationError(
            f"cannot fuse an element over {x.target.name} with {y.name} starting at "
            f"{y.source.name}"
        )
    if formula is FusionFormula.SIMPLIFIED and not x.minus.is_scalar():
        raise NormalizationError("simplified fusion needs a scalar minus part")
    simplified = formula is FusionFormula.SIMPLIFIED or (
        formula is FusionFormula.AUTO and x.minus.is_scalar()
    )
    if simplified:
        plus = x.plus.apply_hom(y.sigma_plus)
        minus = x.plus.apply_hom(y.sigma_minus)
        rep = x.rep
    else:
        plus = x.plus.apply_hom(y.sigma_plus).direct_sum(x.minus.apply_hom(y.sigma_minus))
        minus = x.plus.apply_hom(y.sigma_minus).direct_sum(x.minus.apply_hom(y.sigma_plus))
        rep = tuple(block_diagonal([u, u]) for u in x.rep)
    logger.debug(
        "Fused size %d over %s with %s (%s)",
        x.size,
        x.target.name,
        y.name,
        "simplified" if simplified else "full",
    )
    return PointedLevelOne(
        target=y.target,
        ambient=y.ambient,
        ideal=y.ideal,
        iota=y.iota,
        ideal_map=y.ideal_map,
        corner=y.corner,
        plus=plus,
        minus=minus,
        rep=rep,
    )


class Normalizer:
    """Runs z products and the fold of words.

    Args:
        formula: which fusion formula to use
        compress: strip trivial summands after every step
        swap_splits: fuse with the negated diagram; only for exercising the fuzz harness
        record: keep the standard form certificates of every step
        cache_folds: memoize the folds of letter prefixes
    """

    def __init__(
        self,
        formula: FusionFormula = FusionFormula.AUTO,
        compress: bool = True,
        swap_splits: bool = False,
        record: bool = False,
        cache_folds: bool = False,
    ):
        self.formula = formula
        self.compress = compress
        self.swap_splits = swap_splits
        self.record = record
        self.certificates: list[StandardFormCertificate] = []
        self._seeds: dict[int, tuple[GAlgebra, S1Element]] = {}
        self._folds: Optional[dict[tuple, S1Element]] = {} if cache_folds else None

    def seed(self, origin: GAlgebra) -> S1Element:
        """The standard form of chi(1_C), computed once per C."""
        cached = self._seeds.get(id(origin))
        if cached is not None:
            return cached[1]
        if not is_complex_algebra(origin):
            raise NormalizationError(f"words must start at C, not at {origin.name}")
        x = standardize(chi(IdentityLetter(origin)))
        if self.compress:
            x = x.compress()
        self._seeds[id(origin)] = (origin, x)
        return x

    def z_product(self, x: S1Element, letter: Letter) -> S1Element:
        """x (.) a: the standard form of the fusion of x with chi(a)."""
        diagram = chi(letter)
        if self.swap_splits:
            diagram = diagram.negate()
        try:
            pointed, certificate = standard_form(fuse(x, diagram, self.formula))
            result = pointed.to_s1()
        except LevelOneError as e:
            raise InternalInvariantError(f"step with {diagram.name} failed: {e}") from e
        if self.record:
            self.certificates.append(certificate)
        if self.compress:
            result = result.compress()
        logger.debug("Step with %s gives size %d", diagram.name, result.size)
        return result

    def fold(self, letters: Sequence[Letter]) -> S1Element:
        """(...((chi(1_C) (.) a_1) (.) a_2) ...) (.) a_k."""
        letters = tuple(letters)
        if self._folds is not None and letters in self._folds:
            return self._folds[letters]
        if len(letters) == 1:
            x = self.seed(letters[0].source)
        else:
            x = self.fold(letters[:-1])
        result = self.z_product(x, letters[-1])
        if self._folds is not None:
            self._folds[letters] = result
        return result

    def phi(self, word: Union[Word, SumOfProducts]) -> S1Element:
        """Fold every product of the expanded word and add the results in term order."""
        expanded = word if isinstance(word, SumOfProducts) else expand(word)
        if not is_complex_algebra(expanded.source):
            raise NormalizationError(
                f"words must start at C, this one starts at {expanded.source.name}"
            )
        total: Optional[S1Element] = None
        for term in expanded.terms:
            x = self.fold(term.letters)
            if term.sign < 0:
                x = x.negate()
            total = x if total is None else total.add(x)
        if total is None:
            return S1Element.zero(expanded.target)
        return total


_DEFAULT = Normalizer()


def z_product(x: S1Element, letter: Letter) -> S1Element:
    """One normalizer step with the default settings."""
    return _DEFAULT.z_product(x, letter)


def phi(word: Union[Word, SumOfProducts]) -> S1Element:
    """Normalize a word from C with the default settings."""
    return _DEFAULT.phi(word)


@dataclass(frozen=True)
class Claim:
    """One relation claim and the verdict of the class comparison."""

    name: str
    verdict: object
    detail: str = ""


@dataclass
class ClaimContext:
    """Everything the per-generator claims may refer to besides the letter itself."""

    rewrite: RewriteContext = field(default_factory=RewriteContext)
    corners: tuple[CornerEmbedding, ...] = ()
    following: Optional[Letter] = None


def relation_claims(
    x: S1Element,
    letter: Letter,
    equiv: Callable[[S1Element, S1Element], object],
    context: Optional[ClaimContext] = None,
    normalizer: Optional[Normalizer] = None,
) -> list[Claim]:
    """Check the claims a well-defined fold must satisfy at x and the generator a."""
    context = context or ClaimContext()
    run = normalizer or _DEFAULT
    step = run.z_product
    claims = []
    if letter.source is x.target:
        padded = x.pad(1)
        claims.append(Claim("congruence", equiv(step(x, letter), step(padded, letter))))
        pair = x.add(x.negate())
        claims.append(
            Claim(
                "additivity",
                equiv(step(pair, letter), step(x, letter).add(step(x.negate(), letter))),
            )
        )
        following = context.following
        if (
            isinstance(letter, HomLetter)
            and isinstance(following, HomLetter)
            and following.source is letter.target
        ):
            merged = HomLetter(compose(letter.hom, following.hom))
            claims.append(
                Claim(
                    "composition",
                    equiv(step(step(x, letter), following), step(x, merged)),
                )
            )
    claims.append(Claim("unit", equiv(x, step(x, IdentityLetter(x.target)))))
    for homotopy in context.rewrite.homotopies:
        if homotopy.source is x.target:
            start, end = HomLetter(homotopy.at(0)), HomLetter(homotopy.at(1))
            claims.append(
                Claim("homotopy", equiv(step(x, start), step(x, end)), homotopy.name)
            )
    for sequence in context.rewrite.splits:
        if sequence.middle is x.target:
            through_ideal = step(step(x, SplitLetter(sequence)), HomLetter(sequence.i))
            through_quotient = step(step(x, HomLetter(sequence.f)), HomLetter(sequence.s))
            claims.append(
                Claim("split", equiv(x, through_ideal.add(through_quotient)), sequence.name)
            )
        if sequence.ideal is x.target:
            back = step(step(x, HomLetter(sequence.i)), SplitLetter(sequence))
            claims.append(Claim("split-ideal", equiv(x, back), sequence.name))
    for corner in context.corners:
        if corner.ambient is x.target:
            there = step(step(x, CornerInvLetter(corner)), HomLetter(corner.embedding))
            claims.append(Claim("corner-inverse", equiv(x, there), corner.name))
        if corner.base is x.target:
            back = step(step(x, HomLetter(corner.embedding)), CornerInvLetter(corner))
            claims.append(Claim("corner", equiv(x, back), corner.name))
    return claims
