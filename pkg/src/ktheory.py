# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Classes of stabilized idempotent pairs, their group structure and explicit homotopies."""

import enum
import logging
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from sympy.polys.matrices import DomainMatrix

from algebra import (
    CornerEmbedding,
    FiniteGroup,
    GAlgebra,
    GHom,
    corner_embedding,
    regular_representation,
)
from amplified import UnitizedMatrix, block_grid, scalar_identity
from levelone import LevelOneError, S1Element
from linalg import (
    COS,
    PATH_DOMAIN,
    SIN,
    GKCalcError,
    K,
    column,
    flatten_column,
    identity,
    inverse,
    is_zero,
    left_inverse,
    nullspace,
    rank,
    scalar,
    scale,
    submatrix,
    zeros,
)
from oracle import (
    Indeterminate,
    InvariantVector,
    block_images,
    block_representations,
    charpoly,
    from_block_images,
    invariant_oracle,
    irreducible_characters,
    poly_at_matrix,
)
from words import Word

logger = logging.getLogger(__name__)

MAX_SHRINK_ATTEMPTS = 48
MAX_CONJUGATOR_ATTEMPTS = 24
WITNESS_SEED = 0


class WitnessError(GKCalcError):
    """Raised when a homotopy witness cannot be built or does not replay."""


class Verdict(enum.Enum):
    """Outcome of comparing two classes."""

    EQUAL = "equal"
    NOT_EQUAL = "not-equal"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True, eq=False)
class KClass:
    """The class of an element: the oracle key of P_+ minus that of P_-."""

    target: GAlgebra
    key: Optional[InvariantVector]
    representative: S1Element
    indeterminate: Optional[Indeterminate] = None

    @property
    def decidable(self) -> bool:
        """Whether the oracle produced a key."""
        return self.key is not None

    def as_dict(self) -> dict:
        """Serialize the key, or the reason it is missing."""
        if self.key is None:
            reason = self.indeterminate.reason if self.indeterminate else "undecided"
            return {"algebra": self.target.name, "indeterminate": reason}
        return {"algebra": self.target.name, "key": self.key.as_dict()}


def class_of(x: S1Element) -> KClass:
    """The class of ``x``, keyed by the oracle on both idempotents."""
    plus = invariant_oracle(x.plus, x.rep)
    if isinstance(plus, Indeterminate):
        return KClass(x.target, None, x, plus)
    minus = invariant_oracle(x.minus, x.rep)
    if isinstance(minus, Indeterminate):
        return KClass(x.target, None, x, minus)
    return KClass(x.target, plus - minus, x)


def compare(x: KClass, y: KClass) -> Verdict:
    """Compare two classes over the same algebra by key."""
    if x.target is not y.target:
        raise LevelOneError(f"classes over {x.target.name} and {y.target.name} do not compare")
    if x.key is None or y.key is None:
        return Verdict.INDETERMINATE
    return Verdict.EQUAL if x.key == y.key else Verdict.NOT_EQUAL


@dataclass(frozen=True)
class EquivResult:
    """A verdict with an optional witness and a reason for undecided cases."""

    verdict: Verdict
    witness: Optional["HomotopyWitness"] = None
    reason: str = ""


def equiv(x: S1Element, y: S1Element, witness: bool = False) -> EquivResult:
    """Decide x == y in K^G, with a homotopy witness on request."""
    cx, cy = class_of(x), class_of(y)
    verdict = compare(cx, cy)
    if verdict is Verdict.INDETERMINATE:
        undecided = cx.indeterminate or cy.indeterminate
        return EquivResult(verdict, reason=undecided.reason if undecided else "")
    if verdict is Verdict.EQUAL and witness:
        return EquivResult(verdict, homotopy_witness(x, y))
    return EquivResult(verdict)


def same_class(x: S1Element, y: S1Element) -> Verdict:
    """The verdict of ``equiv`` without a witness."""
    return equiv(x, y).verdict


class GroupOps:
    """The abelian group K^G(B) on classes."""

    def __init__(self, algebra: GAlgebra):
        self.algebra = algebra

    def zero(self) -> KClass:
        """The class of the zero element."""
        return class_of(S1Element.zero(self.algebra))

    def add(self, x: KClass, y: KClass) -> KClass:
        """Sum of two classes, represented by the direct sum."""
        representative = x.representative.add(y.representative)
        if x.key is None or y.key is None:
            return KClass(
                self.algebra, None, representative, x.indeterminate or y.indeterminate
            )
        return KClass(self.algebra, x.key + y.key, representative)

    def neg(self, x: KClass) -> KClass:
        """Negation by swapping the idempotents."""
        key = -x.key if x.key is not None else None
        return KClass(self.algebra, key, x.representative.negate(), x.indeterminate)

    def is_zero(self, x: KClass) -> Verdict:
        """Whether a class is zero."""
        if x.key is None:
            return Verdict.INDETERMINATE
        return Verdict.EQUAL if x.key.is_zero() else Verdict.NOT_EQUAL


@dataclass(frozen=True, eq=False)
class KGroupPresentation:
    """A free abelian group given by its rank and one representative per generator."""

    algebra: GAlgebra
    rank: int
    generators: tuple[S1Element, ...]
    labels: tuple[str, ...]
    keys: tuple[InvariantVector, ...]

    def describe(self) -> str:
        """The group as ``Z^r``."""
        if self.rank == 0:
            return "0"
        return "Z" if self.rank == 1 else f"Z^{self.rank}"

    def as_dict(self) -> dict:
        """Serialize the group and its generators."""
        return {
            "algebra": self.algebra.name,
            "group": self.describe(),
            "rank": self.rank,
            "generators": [
                {"label": label, "key": key.as_dict(), "element": generator.as_dict()}
                for label, key, generator in zip(self.labels, self.keys, self.generators)
            ],
        }


def _frame(vectors: Sequence[Sequence]) -> DomainMatrix:
    """The matrix whose columns are ``vectors``."""
    rows = [list(row) for row in zip(*vectors)]
    return DomainMatrix(rows, (len(rows), len(vectors)), K)


def _spin(rho: Sequence[DomainMatrix], start: Sequence[Sequence]) -> list[list]:
    """A basis of the smallest rho-invariant subspace containing ``start``."""
    basis: list[list] = []
    queue = [list(v) for v in start]
    while queue:
        vector = queue.pop(0)
        if not any(vector):
            continue
        if rank(_frame(basis + [vector])) == len(basis):
            continue
        basis.append(vector)
        queue.extend(flatten_column(g * column(vector)) for g in rho)
    return basis


def _candidates(rho: Sequence[DomainMatrix], rng: random.Random):
    yield from rho
    for g in rho:
        for h in rho:
            yield g + h
    size = rho[0].shape[0]
    while True:
        total = zeros(size, size)
        for g in rho:
            total = total + scale(g, scalar(rng.randint(-2, 2)))
        yield total


def _shrink(
    rho: Sequence[DomainMatrix], space: list[list], degree: int, rng: random.Random
) -> Optional[list[list]]:
    """Cut an isotypic submodule down to an irreducible one using kernels of factors."""
    current = space
    candidates = _candidates(rho, rng)
    for _ in range(MAX_SHRINK_ATTEMPTS):
        if len(current) == degree:
            return current
        frame = _frame(current)
        restricted = left_inverse(frame) * next(candidates) * frame
        _, factors = charpoly(restricted).factor_list()
        for factor, _ in factors:
            kernel = nullspace(poly_at_matrix(factor, restricted))
            if not 0 < len(kernel) < len(current):
                continue
            smaller = _spin(rho, [flatten_column(frame * column(kernel[0]))])
            if len(smaller) < len(current):
                current = smaller
                break
    return current if len(current) == degree else None


def _averaged(rho: Sequence[DomainMatrix], m: DomainMatrix) -> DomainMatrix:
    total = zeros(*m.shape)
    for g in rho:
        g_inv = inverse(g)
        assert g_inv is not None
        total = total + g * m * g_inv
    return scale(total, scalar(1) / scalar(len(rho)))


def kgroup(algebra: GAlgebra) -> Union[KGroupPresentation, Indeterminate]:
    """Generators of K^G(B): one minimal invariant idempotent per block and irreducible.

    Generators live in M_|G|(B) with the regular representation on C^|G|, which
    contains every irreducible of G.
    """
    if algebra.presentation is None:
        return Indeterminate(f"{algebra.name} has no semisimple presentation")
    group = algebra.group
    regular = regular_representation(group)
    representations = block_representations(algebra, regular)
    if isinstance(representations, Indeterminate):
        logger.warning("No K-group for %s: %s", algebra.name, representations.reason)
        return representations
    rng = random.Random(WITNESS_SEED)
    generators, labels, keys = [], [], []
    for k, rho in enumerate(representations):
        dim = rho[0].shape[0]
        for irreducible in irreducible_characters(group):
            isotypic = zeros(dim, dim)
            for g, coeff in enumerate(irreducible.idempotent):
                if coeff:
                    isotypic = isotypic + scale(rho[g], coeff)
            start = next(c for c in zip(*isotypic.to_list()) if any(c))
            space = _spin(rho, [start])
            minimal = _shrink(rho, space, irreducible.degree, rng)
            if minimal is None:
                logger.warning(
                    "No irreducible submodule found for %s in block %d of %s, keeping %d",
                    irreducible.label(),
                    k,
                    algebra.name,
                    len(space),
                )
                minimal = space
            frame = _frame(minimal)
            projection = _averaged(rho, frame * left_inverse(frame))
            blocks = [
                projection if index == k else zeros(*other[0].shape)
                for index, other in enumerate(representations)
            ]
            plus = from_block_images(algebra, group.order, blocks)
            minus = UnitizedMatrix.zero(algebra, group.order)
            generator = S1Element(algebra, group.order, plus, minus, regular)
            key = class_of(generator).key
            assert key is not None
            generators.append(generator)
            keys.append(key)
            labels.append(f"block{k}" if group.is_trivial() else f"block{k}:{irreducible.label()}")
    logger.info("K-group of %s has rank %d", algebra.name, len(generators))
    return KGroupPresentation(
        algebra, len(generators), tuple(generators), tuple(labels), tuple(keys)
    )


def k_functor(hom: GHom) -> Callable[[S1Element], S1Element]:
    """K^G(f): apply f entrywise to both idempotents."""

    def apply(x: S1Element) -> S1Element:
        if x.target is not hom.source:
            raise LevelOneError(f"{hom.name} does not start at {x.target.name}")
        return S1Element(hom.target, x.size, x.plus.apply_hom(hom), x.minus.apply_hom(hom), x.rep)

    return apply


def psi_inverse(x: S1Element, origin: GAlgebra) -> Word:
    """A word from ``origin`` whose class is the class of ``x``."""
    return x.as_level_one(origin).to_word()


def averaging_embedding(
    group: FiniteGroup, algebra: GAlgebra, name: Optional[str] = None
) -> CornerEmbedding:
    """A -> End(l^2(G)) (x) A in a basis of l^2(G) whose first vector is the sum of all points.

    The other basis vectors are delta_g - delta_1. The first one is fixed by
    translations, so the corner it spans is invariant.
    """
    n = group.order
    rows = [[K.zero] * n for _ in range(n)]
    for r in range(n):
        rows[r][0] = K.one
    for c in range(1, n):
        rows[c][c] = K.one
        rows[0][c] = -K.one
    change = DomainMatrix(rows, (n, n), K)
    change_inv = inverse(change)
    assert change_inv is not None
    gamma = tuple(change_inv * g * change for g in regular_representation(group))
    return corner_embedding(algebra, n, gamma, name or f"avg({algebra.name})", change)


@dataclass(frozen=True, eq=False)
class AddTrivial:
    """Append the trivial element q nabla q."""

    idempotent: UnitizedMatrix
    rep: tuple[DomainMatrix, ...]

    def describe(self) -> dict:
        """Serialize the move."""
        return {"move": "add-trivial", "size": self.idempotent.size}


@dataclass(frozen=True, eq=False)
class RemoveTrivial:
    """Remove a trivial summand at the given positions."""

    positions: tuple[int, ...]

    def describe(self) -> dict:
        """Serialize the move."""
        return {"move": "remove-trivial", "positions": list(self.positions)}


@dataclass(frozen=True, eq=False)
class Conjugation:
    """Conjugate one idempotent along a path of invertibles that starts at the identity."""

    side: str
    path: UnitizedMatrix
    inverse_path: UnitizedMatrix
    kind: str = "straight"

    def describe(self) -> dict:
        """Serialize the move."""
        return {"move": "conjugate", "side": self.side, "path": self.kind, "size": self.path.size}


Move = Union[AddTrivial, RemoveTrivial, Conjugation]


def _same_rep(left: Sequence[DomainMatrix], right: Sequence[DomainMatrix]) -> bool:
    return all(u.to_list() == v.to_list() for u, v in zip(left, right))


def identical(x: S1Element, y: S1Element) -> bool:
    """Whether two elements are equal as matrices."""
    return (
        x.target is y.target
        and x.size == y.size
        and x.plus.equals(y.plus)
        and x.minus.equals(y.minus)
        and _same_rep(x.rep, y.rep)
    )


def _remove(state: S1Element, positions: Sequence[int]) -> S1Element:
    removed = list(positions)
    rest = [i for i in range(state.size) if i not in removed]
    if not rest:
        raise WitnessError("cannot remove every index")
    for m in (state.plus, state.minus):
        if m.couples(removed, rest):
            raise WitnessError("removed indices are coupled to the rest")
    for u in state.rep:
        if not is_zero(submatrix(u, removed, rest)) or not is_zero(submatrix(u, rest, removed)):
            raise WitnessError("removed indices are coupled by the representation")
    if not state.plus.block(removed, removed).equals(state.minus.block(removed, removed)):
        raise WitnessError("removed summand is not trivial")
    return state.restrict(rest)


def _conjugate(state: S1Element, move: Conjugation) -> S1Element:
    size = state.size
    path, path_inv = move.path, move.inverse_path
    if path.size != size:
        raise WitnessError("conjugating path has the wrong size")
    unit = scalar_identity(state.target, size, PATH_DOMAIN)
    if not (path * path_inv - unit).reduce().is_zero():
        raise WitnessError("path is not invertible with the given inverse")
    if not path.evaluate(0).equals(scalar_identity(state.target, size)):
        raise WitnessError("path does not start at the identity")
    if not path.is_invariant(state.rep):
        raise WitnessError("path is not invariant")
    if move.side == "plus":
        moved, other = state.plus, state.minus
    else:
        moved, other = state.minus, state.plus
    moving = (path * moved.lift() * path_inv).reduce()
    if not moving.is_idempotent():
        raise WitnessError("intermediate matrix is not idempotent")
    if not moving.same_scalar_part(other.lift()):
        raise WitnessError("intermediate element leaves the ideal")
    end = moving.evaluate(1)
    if move.side == "plus":
        return S1Element(state.target, size, end, state.minus, state.rep)
    return S1Element(state.target, size, state.plus, end, state.rep)


def apply_move(state: S1Element, move: Move) -> S1Element:
    """Apply one witness move, checking its preconditions."""
    if isinstance(move, AddTrivial):
        trivial = S1Element.trivial(state.target, move.idempotent, move.rep)
        trivial.validate()
        return state.add(trivial)
    if isinstance(move, RemoveTrivial):
        return _remove(state, move.positions)
    return _conjugate(state, move)


@dataclass(frozen=True, eq=False)
class HomotopyWitness:
    """A chain of moves leading from ``source`` to ``target``."""

    source: S1Element
    target: S1Element
    moves: tuple[Move, ...] = ()

    def replay(self) -> S1Element:
        """Apply every move to the source."""
        state = self.source
        for index, move in enumerate(self.moves):
            try:
                state = apply_move(state, move)
            except (LevelOneError, WitnessError) as e:
                raise WitnessError(f"move {index} ({move.describe()['move']}) fails: {e}") from e
        return state

    def verify(self) -> bool:
        """Whether replaying the moves reaches the target."""
        try:
            final = self.replay()
        except WitnessError as e:
            logger.warning("Witness does not replay: %s", e)
            return False
        return identical(final, self.target)

    def as_dict(self) -> dict:
        """Serialize the moves."""
        return {"moves": [move.describe() for move in self.moves]}


def _quiet_verify(witness: HomotopyWitness) -> bool:
    try:
        return identical(witness.replay(), witness.target)
    except WitnessError:
        return False


def _unit_element(algebra: GAlgebra, size: int) -> UnitizedMatrix:
    """e = 1_B (x) I_N."""
    unit = algebra.unit
    if unit is None:
        presentation = algebra.presentation
        if presentation is None:
            raise WitnessError(f"{algebra.name} has no unit")
        unit = presentation.vector_from_blocks([identity(n) for n in presentation.blocks])
    parts = {b: scale(identity(size), coeff) for b, coeff in enumerate(unit) if coeff}
    return UnitizedMatrix.from_parts(algebra, zeros(size, size), parts)


def _straight(nilpotent: UnitizedMatrix) -> Conjugation:
    """I + s^2 N for N with N^2 = 0, inverted by I - s^2 N."""
    unit = scalar_identity(nilpotent.algebra, nilpotent.size, PATH_DOMAIN)
    weighted = nilpotent.lift().scale_scalar(SIN * SIN)
    return Conjugation("plus", unit + weighted, unit - weighted)


def _intertwiner(
    rep: Sequence[DomainMatrix],
    source: UnitizedMatrix,
    target: UnitizedMatrix,
    rng: random.Random,
) -> tuple[UnitizedMatrix, UnitizedMatrix]:
    """An invariant V over B, invertible in the corner of 1_B, with V source V^-1 = target."""
    algebra = source.algebra
    representations = block_representations(algebra, rep)
    if isinstance(representations, Indeterminate):
        raise WitnessError(representations.reason)
    forward, backward = [], []
    for rho, x, y in zip(representations, block_images(source), block_images(target)):
        dim = x.shape[0]
        unit = identity(dim)
        for attempt in range(MAX_CONJUGATOR_ATTEMPTS):
            if attempt == 0:
                m = unit
            elif attempt == 1:
                m = DomainMatrix([[K.one] * dim for _ in range(dim)], (dim, dim), K)
            else:
                values = [[scalar(rng.randint(-3, 3)) for _ in range(dim)] for _ in range(dim)]
                m = DomainMatrix(values, (dim, dim), K)
            averaged = _averaged(rho, m)
            v = -(y * averaged * x) + (unit - y) * averaged * (unit - x)
            v_inv = inverse(v)
            if v_inv is not None:
                forward.append(v)
                backward.append(v_inv)
                break
        else:
            raise WitnessError(f"no invertible intertwiner found over {algebra.name}")
    return (
        from_block_images(algebra, source.size, forward),
        from_block_images(algebra, source.size, backward),
    )


def _conjugation_moves(
    state: S1Element, goal: UnitizedMatrix, rng: random.Random
) -> tuple[list[Move], int]:
    """Moves turning the plus side of ``state`` into ``goal``, and the zero padding they add."""
    algebra, size = state.target, state.size
    v, v_inv = _intertwiner(state.rep, state.plus, goal, rng)
    e = _unit_element(algebra, size)
    if (v * v).equals(-e):
        f = scalar_identity(algebra, size) - e
        fixed = f.lift() + e.lift().scale_scalar(COS)
        turn = v.lift().scale_scalar(SIN)
        return [Conjugation("plus", fixed + turn, fixed - turn, "rotation")], 0
    zero = UnitizedMatrix.zero(algebra, size)
    moves: list[Move] = [AddTrivial(zero, state.rep)]
    # diag(f + V, f + V^-1) as a product of six elementary matrices, rightmost first
    factors = [
        [[zero, v], [zero, zero]],
        [[zero, zero], [-v_inv, zero]],
        [[zero, v], [zero, zero]],
        [[zero, -e], [zero, zero]],
        [[zero, zero], [e, zero]],
        [[zero, -e], [zero, zero]],
    ]
    for grid in reversed(factors):
        moves.append(_straight(block_grid(algebra, grid)))
    return moves, size


def homotopy_witness(x: S1Element, y: S1Element) -> HomotopyWitness:
    """An explicit chain of moves from x to y.

    Args:
        x: the starting element
        y: an element of the same class

    Returns:
        a witness whose `verify` replays every move

    Raises:
        WitnessError: if the classes differ or are undecided, or no chain was found
    """
    if same_class(x, y) is not Verdict.EQUAL:
        raise WitnessError("elements are not known to be equal, no witness exists")
    if identical(x, y):
        return HomotopyWitness(x, y)
    if y.size > x.size:
        tail = y.restrict(range(x.size, y.size))
        witness = HomotopyWitness(x, y, (AddTrivial(tail.plus, tail.rep),))
        if tail.plus.equals(tail.minus) and _quiet_verify(witness):
            return witness
    if x.size > y.size:
        witness = HomotopyWitness(x, y, (RemoveTrivial(tuple(range(y.size, x.size))),))
        if _quiet_verify(witness):
            return witness
    rng = random.Random(WITNESS_SEED)
    moves: list[Move] = []
    removed: list[int] = []
    if x.size == y.size and x.minus.equals(y.minus) and _same_rep(x.rep, y.rep):
        state, goal = x, y.plus
    else:
        moves.append(AddTrivial(y.minus, y.rep))
        state = apply_move(x, moves[-1])
        goal = x.minus.direct_sum(y.plus)
        removed = list(range(x.size))
    conjugations, padding = _conjugation_moves(state, goal, rng)
    moves.extend(conjugations)
    removed += range(state.size, state.size + padding)
    if removed:
        moves.append(RemoveTrivial(tuple(removed)))
    witness = HomotopyWitness(x, y, tuple(moves))
    if not witness.verify():
        raise WitnessError("constructed chain does not replay to the target")
    logger.debug("Witness over %s has %d moves", x.target.name, len(moves))
    return witness
