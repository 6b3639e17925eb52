# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Randomized check that single-step rewrites of words never change their class."""

import logging
import random
from dataclasses import dataclass, field
from typing import Optional

from algebra import GAlgebra
from ktheory import KClass, Verdict, class_of, compare
from linalg import GKCalcError
from normalizer import Normalizer
from words import (
    CornerInvLetter,
    HomLetter,
    IdentityLetter,
    Letter,
    Relation,
    Site,
    SignedProduct,
    SplitLetter,
    SumOfProducts,
    applicable_sites,
    rewrite_one,
)
from workspace import Workspace

logger = logging.getLogger(__name__)

DEFAULT_COUNT = 200
DEFAULT_MAX_LENGTH = 6
SUM_PROBABILITY = 0.2
# Delta and e^-1 letters carry most of the relations, so walks prefer them
LETTER_WEIGHTS = {"hom": 1.0, "corner-inverse": 3.0, "split": 3.0, "identity": 0.25}


@dataclass(frozen=True)
class Mismatch:
    """A rewrite that changed the class of a word."""

    word: str
    relation: str
    site: Site
    rewritten: str
    reproducer: str
    detail: str = ""

    def as_dict(self) -> dict:
        """Serialize the mismatch with the site flattened."""
        return {
            "word": self.word,
            "relation": self.relation,
            "term": self.site.term,
            "position": self.site.position,
            "rewritten": self.rewritten,
            "reproducer": self.reproducer,
            "detail": self.detail,
        }


@dataclass
class FuzzReport:
    """Counts and mismatches of one fuzzing run."""

    seed: int
    count: int
    words: int = 0
    rewrites: int = 0
    indeterminate: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Whether no rewrite changed a class."""
        return not self.mismatches

    def as_dict(self) -> dict:
        """Serialize the run."""
        return {
            "seed": self.seed,
            "count": self.count,
            "words": self.words,
            "rewrites": self.rewrites,
            "indeterminate": self.indeterminate,
            "passed": self.passed,
            "mismatches": [m.as_dict() for m in self.mismatches],
        }


def _single(source: GAlgebra, letters: tuple[Letter, ...]) -> SumOfProducts:
    return SumOfProducts(source, letters[-1].target, (SignedProduct(1, letters),))


class WordGenerator:
    """Random well-typed walks from C through the generators of a workspace."""

    def __init__(self, workspace: Workspace, rng: random.Random, max_length: int):
        self.workspace = workspace
        self.rng = rng
        self.max_length = max_length
        self.origin = workspace.origin()
        self._outgoing: dict[int, list[tuple[str, Letter]]] = {}
        for hom in workspace.homs.values():
            self._add("hom", HomLetter(hom))
        for corner in workspace.corners.values():
            self._add("corner-inverse", CornerInvLetter(corner))
        for sequence in workspace.splits.values():
            self._add("split", SplitLetter(sequence))
        for algebra in workspace.algebras.values():
            self._add("identity", IdentityLetter(algebra))

    def _add(self, kind: str, letter: Letter) -> None:
        self._outgoing.setdefault(id(letter.source), []).append((kind, letter))

    def walk(self) -> tuple[Letter, ...]:
        """A random path of composable letters starting at C."""
        length = self.rng.randint(1, self.max_length)
        letters: list[Letter] = []
        position: GAlgebra = self.origin
        for _ in range(length):
            choices = self._outgoing.get(id(position), [])
            if not choices:
                break
            weights = [LETTER_WEIGHTS[kind] for kind, _ in choices]
            _, letter = self.rng.choices(choices, weights)[0]
            letters.append(letter)
            position = letter.target
        if not letters:
            letters.append(IdentityLetter(self.origin))
        return tuple(letters)

    def word(self) -> SumOfProducts:
        """A random word, sometimes a sum of two signed products."""
        first = self.walk()
        terms = [SignedProduct(1, first)]
        if self.rng.random() < SUM_PROBABILITY:
            sign = self.rng.choice((1, -1))
            second = self.walk()
            if second[-1].target is not first[-1].target:
                second = first
            terms.append(SignedProduct(sign, second))
        return SumOfProducts(self.origin, first[-1].target, tuple(terms))


class RelationFuzzer:
    """Compares the class of every generated word with the classes of all its rewrites.

    Args:
        workspace: supplies generators, split sequences and homotopies
        seed: seeds word generation; the report only depends on it and the workspace
        max_length: longest walk from C
        inject_fault: fuse with negated diagrams, which the fuzzer must detect
    """

    def __init__(
        self,
        workspace: Workspace,
        seed: int = 0,
        max_length: int = DEFAULT_MAX_LENGTH,
        inject_fault: bool = False,
    ):
        self.workspace = workspace
        self.seed = seed
        self.context = workspace.rewrite_context()
        self.generator = WordGenerator(workspace, random.Random(seed), max_length)
        self.normalizer = Normalizer(cache_folds=True, swap_splits=inject_fault)

    def _class(self, word: SumOfProducts) -> KClass:
        return class_of(self.normalizer.phi(word))

    def _differs(self, left: SumOfProducts, right: SumOfProducts) -> bool:
        return compare(self._class(left), self._class(right)) is Verdict.NOT_EQUAL

    def _reproducer(self, word: SumOfProducts, relation: Relation, site: Site) -> str:
        """The shortest prefix of the rewritten term that still shows the mismatch."""
        term = word.terms[site.term]
        alone = _single(word.source, term.letters)
        local = Site(0, site.position, site.choice)
        start = min(site.position + 2, len(term.letters))
        for cut in range(start, len(term.letters) + 1):
            letters = term.letters[:cut]
            candidate = _single(word.source, letters)
            if local not in applicable_sites(candidate, relation, self.context):
                continue
            try:
                if self._differs(candidate, rewrite_one(candidate, relation, local, self.context)):
                    return candidate.text()
            except GKCalcError:
                return candidate.text()
        return alone.text()

    def check(self, word: SumOfProducts, report: FuzzReport) -> None:
        """Compare the class of ``word`` with the class after every applicable rewrite."""
        try:
            reference = self._class(word)
        except GKCalcError as e:
            report.mismatches.append(
                Mismatch(word.text(), "normalize", Site(0, 0), "", word.text(), str(e))
            )
            return
        if not reference.decidable:
            report.indeterminate += 1
            return
        for relation in Relation:
            for site in applicable_sites(word, relation, self.context):
                rewritten = rewrite_one(word, relation, site, self.context)
                report.rewrites += 1
                detail = ""
                try:
                    verdict = compare(reference, self._class(rewritten))
                except GKCalcError as e:
                    verdict, detail = Verdict.NOT_EQUAL, str(e)
                if verdict is Verdict.INDETERMINATE:
                    report.indeterminate += 1
                if verdict is not Verdict.NOT_EQUAL:
                    continue
                mismatch = Mismatch(
                    word.text(),
                    relation.value,
                    site,
                    rewritten.text(),
                    self._reproducer(word, relation, site),
                    detail,
                )
                logger.warning(
                    "Relation %s at %s changes the class of %s",
                    relation.value,
                    site,
                    mismatch.word,
                )
                report.mismatches.append(mismatch)

    def run(self, count: int = DEFAULT_COUNT, stop_after: Optional[int] = None) -> FuzzReport:
        """Check ``count`` random words, stopping after ``stop_after`` mismatches."""
        report = FuzzReport(self.seed, count)
        for _ in range(count):
            self.check(self.generator.word(), report)
            report.words += 1
            if stop_after is not None and len(report.mismatches) >= stop_after:
                break
        logger.info(
            "Checked %d words and %d rewrites, %d mismatches",
            report.words,
            report.rewrites,
            len(report.mismatches),
        )
        return report


def fuzz_relations(
    workspace: Workspace,
    seed: int = 0,
    count: int = DEFAULT_COUNT,
    inject_fault: bool = False,
) -> FuzzReport:
    """Run a relation fuzzer over ``workspace``."""
    return RelationFuzzer(workspace, seed, inject_fault=inject_fault).run(count)
