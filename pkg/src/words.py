# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Morphism words over the generators and their single-step rewriting.

Words are written left to right: ``phi . psi`` applies phi first. The surface
syntax has ``.`` for composition, ``+`` and ``-`` for sums, parentheses,
``e^-1`` for the inverse of a corner embedding, ``delta(s)`` for the split
generator of a split-exact sequence and ``id(A)`` for identities.
"""

import enum
import logging
from dataclasses import dataclass, field
from typing import Protocol, Sequence, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from algebra import (
    CornerEmbedding,
    GAlgebra,
    GHom,
    PathHom,
    SplitExactSequence,
    compose,
    homs_equal,
)
from linalg import GKCalcError, PathEvaluationError

logger = logging.getLogger(__name__)

GRAMMAR = r"""
    ?start: sum

    ?sum: product
        | sum "+" product      -> plus
        | sum "-" product      -> minus

    ?product: unary
        | product "." unary    -> compose

    ?unary: atom
        | "-" unary            -> neg

    ?atom: NAME                -> generator
        | NAME "^-1"           -> corner_inverse
        | "delta" "(" NAME ")" -> split
        | "id" "(" NAME ")"    -> identity
        | "(" sum ")"

    NAME: /[A-Za-z_][A-Za-z0-9_]*/

    %import common.WS
    %ignore WS
"""

_PARSER = Lark(GRAMMAR, parser="lalr", propagate_positions=True)


class WordError(GKCalcError):
    """Base class for errors about morphism words."""


class WordParseError(WordError):
    """Raised when a word cannot be parsed; carries the 1-based position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class WordTypeError(WordError):
    """Raised when a composition joins morphisms whose objects do not match."""


class RewriteError(WordError):
    """Raised when a relation is not applicable at the requested site."""


@dataclass(frozen=True, eq=False)
class HomLetter:
    """A letter for a named equivariant homomorphism."""

    hom: GHom

    @property
    def source(self) -> GAlgebra:
        """Source algebra."""
        return self.hom.source

    @property
    def target(self) -> GAlgebra:
        """Target algebra."""
        return self.hom.target

    def text(self) -> str:
        """The letter as written in a word."""
        return self.hom.name


@dataclass(frozen=True, eq=False)
class CornerInvLetter:
    """The synthetic inverse e^-1: M_n (x) A -> A of a corner embedding."""

    corner: CornerEmbedding

    @property
    def source(self) -> GAlgebra:
        """The ambient algebra M_n(C) tensor A."""
        return self.corner.ambient

    @property
    def target(self) -> GAlgebra:
        """The base algebra A."""
        return self.corner.base

    def text(self) -> str:
        """The letter as written in a word."""
        return f"{self.corner.name}^-1"


@dataclass(frozen=True, eq=False)
class SplitLetter:
    """The synthetic split generator Delta_s: M -> J of a split-exact sequence."""

    sequence: SplitExactSequence

    @property
    def source(self) -> GAlgebra:
        """The middle algebra of the sequence."""
        return self.sequence.middle

    @property
    def target(self) -> GAlgebra:
        """The ideal of the sequence."""
        return self.sequence.ideal

    def text(self) -> str:
        """The letter as written in a word."""
        return f"delta({self.sequence.name})"


@dataclass(frozen=True, eq=False)
class IdentityLetter:
    """The identity letter of an algebra."""

    algebra: GAlgebra

    @property
    def source(self) -> GAlgebra:
        """The algebra itself."""
        return self.algebra

    @property
    def target(self) -> GAlgebra:
        """The algebra itself."""
        return self.algebra

    def text(self) -> str:
        """The letter as written in a word."""
        return f"id({self.algebra.name})"


Letter = Union[HomLetter, CornerInvLetter, SplitLetter, IdentityLetter]


@dataclass(frozen=True, eq=False)
class Gen:
    """A word made of one letter."""

    letter: Letter

    @property
    def source(self) -> GAlgebra:
        """Source of the letter."""
        return self.letter.source

    @property
    def target(self) -> GAlgebra:
        """Target of the letter."""
        return self.letter.target


@dataclass(frozen=True, eq=False)
class Compose:
    """``left`` followed by ``right``."""

    left: "Word"
    right: "Word"

    @property
    def source(self) -> GAlgebra:
        """Source of the first factor."""
        return self.left.source

    @property
    def target(self) -> GAlgebra:
        """Target of the last factor."""
        return self.right.target


@dataclass(frozen=True, eq=False)
class Plus:
    """A sum of words with common source and target."""

    children: tuple["Word", ...]
    source: GAlgebra
    target: GAlgebra


@dataclass(frozen=True, eq=False)
class Neg:
    """The negation of a word."""

    child: "Word"

    @property
    def source(self) -> GAlgebra:
        """Source of the negated word."""
        return self.child.source

    @property
    def target(self) -> GAlgebra:
        """Target of the negated word."""
        return self.child.target


Word = Union[Gen, Compose, Plus, Neg]


def make_compose(left: Word, right: Word) -> Compose:
    """Compose two words, checking that they meet."""
    if left.target is not right.source:
        raise WordTypeError(
            f"cannot compose {format_word(left)}: {left.source.name} -> {left.target.name} "
            f"with {format_word(right)}: {right.source.name} -> {right.target.name}; "
            f"{left.target.name} is not {right.source.name}"
        )
    return Compose(left, right)


def make_plus(children: Sequence[Word]) -> Plus:
    """Sum words, checking that they share source and target."""
    first = children[0]
    for child in children[1:]:
        if child.source is not first.source or child.target is not first.target:
            raise WordTypeError(
                f"cannot add {format_word(first)}: {first.source.name} -> {first.target.name} "
                f"and {format_word(child)}: {child.source.name} -> {child.target.name}"
            )
    return Plus(tuple(children), first.source, first.target)


def format_word(word: Word) -> str:
    """Render a word in the syntax ``parse`` accepts."""
    if isinstance(word, Gen):
        return word.letter.text()
    if isinstance(word, Compose):
        return f"{_format_factor(word.left)} . {_format_factor(word.right)}"
    if isinstance(word, Neg):
        return f"-{_format_factor(word.child)}"
    if not word.children:
        return f"0({word.source.name},{word.target.name})"
    text = format_word(word.children[0])
    for child in word.children[1:]:
        if isinstance(child, Neg):
            text += f" - {_format_factor(child.child)}"
        else:
            text += f" + {format_word(child)}"
    return text


def _format_factor(word: Word) -> str:
    if isinstance(word, Plus):
        return f"({format_word(word)})"
    return format_word(word)


class Registry(Protocol):
    """Name resolution for the parser."""

    def lookup_hom(self, name: str) -> GHom:
        """Return the homomorphism (or corner embedding) registered under ``name``."""
        ...

    def lookup_corner(self, name: str) -> CornerEmbedding:
        """Return the corner embedding registered under ``name``."""
        ...

    def lookup_split(self, name: str) -> SplitExactSequence:
        """Return the split-exact sequence registered under ``name``."""
        ...

    def lookup_algebra(self, name: str) -> GAlgebra:
        """Return the algebra registered under ``name``."""
        ...


@v_args(meta=True)
class _WordBuilder(Transformer):
    def __init__(self, registry: Registry):
        super().__init__()
        self._registry = registry

    def _resolve(self, lookup, token: Token, kind: str):
        try:
            return lookup(str(token))
        except KeyError as e:
            raise WordParseError(
                f"unknown {kind} '{token}'", token.line or 0, token.column or 0
            ) from e

    def _typed(self, meta, build):
        try:
            return build()
        except WordTypeError as e:
            line = getattr(meta, "line", 0)
            column = getattr(meta, "column", 0)
            raise WordTypeError(f"{e} (line {line}, column {column})") from e

    def generator(self, meta, children):
        return Gen(HomLetter(self._resolve(self._registry.lookup_hom, children[0], "morphism")))

    def corner_inverse(self, meta, children):
        corner = self._resolve(self._registry.lookup_corner, children[0], "corner embedding")
        return Gen(CornerInvLetter(corner))

    def split(self, meta, children):
        sequence = self._resolve(self._registry.lookup_split, children[0], "split sequence")
        return Gen(SplitLetter(sequence))

    def identity(self, meta, children):
        algebra = self._resolve(self._registry.lookup_algebra, children[0], "algebra")
        return Gen(IdentityLetter(algebra))

    def compose(self, meta, children):
        return self._typed(meta, lambda: make_compose(children[0], children[1]))

    def plus(self, meta, children):
        return self._typed(meta, lambda: make_plus(_flatten(children[0]) + [children[1]]))

    def minus(self, meta, children):
        return self._typed(
            meta, lambda: make_plus(_flatten(children[0]) + [Neg(children[1])])
        )

    def neg(self, meta, children):
        return Neg(children[0])


def _flatten(word: Word) -> list[Word]:
    return list(word.children) if isinstance(word, Plus) else [word]


def parse(text: str, registry: Registry) -> Word:
    """Parse a word and check that it is well typed.

    Args:
        text: the word, e.g. ``"(a + b) . c"``
        registry: resolves generator names

    Returns:
        the typed expression tree
    """
    try:
        tree = _PARSER.parse(text)
    except UnexpectedEOF as e:
        message = "unexpected end of word, unbalanced brackets?"
        raise WordParseError(message, 1, len(text) + 1) from e
    except UnexpectedCharacters as e:
        message = f"unexpected character '{text[e.pos_in_stream]}'"
        raise WordParseError(message, e.line, e.column) from e
    except UnexpectedInput as e:
        raise WordParseError(f"unexpected token: {e}", e.line, e.column) from e
    try:
        word = _WordBuilder(registry).transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, WordError):
            raise e.orig_exc from None
        raise
    logger.debug("Parsed word %s: %s -> %s", text, word.source.name, word.target.name)
    return word


@dataclass(frozen=True, eq=False)
class SignedProduct:
    """A product of letters with a sign."""

    sign: int
    letters: tuple[Letter, ...]

    @property
    def source(self) -> GAlgebra:
        """Source of the first letter."""
        return self.letters[0].source

    @property
    def target(self) -> GAlgebra:
        """Target of the last letter."""
        return self.letters[-1].target

    def same_as(self, other: "SignedProduct") -> bool:
        """Whether both products have the same sign and the same letters."""
        return self.sign == other.sign and len(self.letters) == len(other.letters) and all(
            a is b for a, b in zip(self.letters, other.letters)
        )


@dataclass(frozen=True, eq=False)
class SumOfProducts:
    """A bracket-free word: the signed sum of products of letters, in expansion order."""

    source: GAlgebra
    target: GAlgebra
    terms: tuple[SignedProduct, ...] = field(default=())

    def as_word(self) -> Word:
        """Rebuild a word tree from the terms."""
        words: list[Word] = []
        for term in self.terms:
            word: Word = Gen(term.letters[0])
            for letter in term.letters[1:]:
                word = Compose(word, Gen(letter))
            words.append(Neg(word) if term.sign < 0 else word)
        if len(words) == 1:
            return words[0]
        return Plus(tuple(words), self.source, self.target)

    def same_as(self, other: "SumOfProducts") -> bool:
        """Whether both sums have the same terms in the same order."""
        return len(self.terms) == len(other.terms) and all(
            a.same_as(b) for a, b in zip(self.terms, other.terms)
        )

    def text(self) -> str:
        """The sum as written in a word."""
        return format_word(self.as_word())


def expand(word: Word) -> SumOfProducts:
    """Multiply out all brackets, distributing signs into the terms."""
    return SumOfProducts(word.source, word.target, tuple(_expand(word)))


def _expand(word: Word) -> list[SignedProduct]:
    if isinstance(word, Gen):
        return [SignedProduct(1, (word.letter,))]
    if isinstance(word, Neg):
        return [SignedProduct(-term.sign, term.letters) for term in _expand(word.child)]
    if isinstance(word, Plus):
        return [term for child in word.children for term in _expand(child)]
    return [
        SignedProduct(left.sign * right.sign, left.letters + right.letters)
        for left in _expand(word.left)
        for right in _expand(word.right)
    ]


class Relation(enum.Enum):
    """Single-step relations between words."""

    COMPOSE = "compose"
    DROP_IDENTITY = "drop-identity"
    INSERT_IDENTITY = "insert-identity"
    CORNER = "corner"
    SPLIT = "split"
    SPLIT_IDEAL = "split-ideal"
    HOMOTOPY = "homotopy"


@dataclass(frozen=True)
class Site:
    """Where a relation applies: term index, letter position and, when several
    sequences or homotopies fit, which one."""

    term: int
    position: int
    choice: int = 0


@dataclass(frozen=True)
class RewriteContext:
    """Splits and homotopies that the rewriting relations may use."""

    splits: tuple[SplitExactSequence, ...] = ()
    homotopies: tuple[PathHom, ...] = ()


def _corner_pair(first: Letter, second: Letter) -> bool:
    if isinstance(first, HomLetter) and isinstance(second, CornerInvLetter):
        return first.hom is second.corner.embedding
    if isinstance(first, CornerInvLetter) and isinstance(second, HomLetter):
        return second.hom is first.corner.embedding
    return False


def _homotopy_end(letter: Letter, homotopy: PathHom) -> int | None:
    if not isinstance(letter, HomLetter):
        return None
    for endpoint in (0, 1):
        if homs_equal(letter.hom, homotopy.at(endpoint)):
            return endpoint
    return None


def applicable_sites(
    word: SumOfProducts, relation: Relation, context: RewriteContext = RewriteContext()
) -> list[Site]:
    """Every site where ``relation`` applies to ``word``."""
    sites = []
    for t, term in enumerate(word.terms):
        letters = term.letters
        for k, letter in enumerate(letters):
            following = letters[k + 1] if k + 1 < len(letters) else None
            if relation is Relation.COMPOSE:
                if isinstance(letter, HomLetter) and isinstance(following, HomLetter):
                    sites.append(Site(t, k))
            elif relation is Relation.DROP_IDENTITY:
                if isinstance(letter, IdentityLetter) and len(letters) > 1:
                    sites.append(Site(t, k))
            elif relation is Relation.INSERT_IDENTITY:
                sites.append(Site(t, k))
            elif relation is Relation.CORNER:
                if following is not None and _corner_pair(letter, following):
                    sites.append(Site(t, k))
            elif relation in (Relation.SPLIT, Relation.SPLIT_IDEAL):
                if not isinstance(letter, IdentityLetter):
                    continue
                for j, sequence in enumerate(context.splits):
                    anchor = sequence.middle if relation is Relation.SPLIT else sequence.ideal
                    if anchor is letter.algebra:
                        sites.append(Site(t, k, j))
            elif relation is Relation.HOMOTOPY:
                for j, homotopy in enumerate(context.homotopies):
                    if _homotopy_end(letter, homotopy) is not None:
                        sites.append(Site(t, k, j))
    return sites


def rewrite_one(
    word: SumOfProducts,
    relation: Relation,
    site: Site,
    context: RewriteContext = RewriteContext(),
) -> SumOfProducts:
    """Apply one relation at one site; every other letter is left untouched."""
    if site not in applicable_sites(word, relation, context):
        raise RewriteError(f"relation {relation.value} does not apply at {site}")
    term = word.terms[site.term]
    letters, k = term.letters, site.position
    prefix, suffix = letters[:k], letters[k + 1 :]
    replacement: list[SignedProduct]
    if relation is Relation.COMPOSE:
        first, second = letters[k], letters[k + 1]
        assert isinstance(first, HomLetter) and isinstance(second, HomLetter)
        merged = HomLetter(compose(first.hom, second.hom))
        replacement = [SignedProduct(term.sign, prefix + (merged,) + letters[k + 2 :])]
    elif relation is Relation.DROP_IDENTITY:
        replacement = [SignedProduct(term.sign, prefix + suffix)]
    elif relation is Relation.INSERT_IDENTITY:
        inserted = IdentityLetter(letters[k].source)
        replacement = [SignedProduct(term.sign, prefix + (inserted, letters[k]) + suffix)]
    elif relation is Relation.CORNER:
        first, second = letters[k], letters[k + 1]
        if isinstance(first, CornerInvLetter):
            algebra = first.corner.ambient
        else:
            assert isinstance(second, CornerInvLetter)
            algebra = second.corner.base
        replacement = [
            SignedProduct(term.sign, prefix + (IdentityLetter(algebra),) + letters[k + 2 :])
        ]
    elif relation is Relation.SPLIT:
        sequence = context.splits[site.choice]
        through_ideal = (SplitLetter(sequence), HomLetter(sequence.i))
        through_quotient = (HomLetter(sequence.f), HomLetter(sequence.s))
        replacement = [
            SignedProduct(term.sign, prefix + through_ideal + suffix),
            SignedProduct(term.sign, prefix + through_quotient + suffix),
        ]
    elif relation is Relation.SPLIT_IDEAL:
        sequence = context.splits[site.choice]
        through_middle = (HomLetter(sequence.i), SplitLetter(sequence))
        replacement = [SignedProduct(term.sign, prefix + through_middle + suffix)]
    else:
        homotopy = context.homotopies[site.choice]
        endpoint = _homotopy_end(letters[k], homotopy)
        assert endpoint is not None
        swapped = HomLetter(homotopy.at(1 - endpoint))
        replacement = [SignedProduct(term.sign, prefix + (swapped,) + suffix)]
    terms = word.terms[: site.term] + tuple(replacement) + word.terms[site.term + 1 :]
    logger.debug("Rewrote term %d with %s at position %d", site.term, relation.value, k)
    return SumOfProducts(word.source, word.target, terms)


def homotopy_endpoints(homotopy: object) -> tuple[GHom, GHom]:
    """The evaluations of a homotopy A -> B[t] at both ends."""
    if not isinstance(homotopy, PathHom):
        raise PathEvaluationError(
            f"{getattr(homotopy, 'name', homotopy)!s} is not valued in the path model"
        )
    return homotopy.at(0), homotopy.at(1)
