# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

import copy
import json
from pathlib import Path

from hypothesis import strategies as st

from algebra import (
    FiniteGroup,
    GAlgebra,
    GHom,
    complex_algebra,
    cyclic_group,
    make_hom,
    make_matrix_algebra,
    trivial_group,
)
from amplified import UnitizedMatrix
from ktheory import KGroupPresentation
from levelone import S1Element
from linalg import K, diagonal, identity, matrix, to_scalar
from workspace import Workspace, load_workspace

WORKSPACE_PATH = Path(__file__).parent.parent / "data" / "workspace.json"

KLEIN_TABLE = (
    (0, 1, 2, 3),
    (1, 0, 3, 2),
    (2, 3, 0, 1),
    (3, 2, 1, 0),
)


def z2() -> FiniteGroup:
    return cyclic_group(2, "Z2")


def klein() -> FiniteGroup:
    return FiniteGroup("V4", KLEIN_TABLE)


def complex_plane(group: FiniteGroup | None = None) -> GAlgebra:
    return complex_algebra(group or trivial_group())


def flip_gamma() -> tuple:
    """ad(diag(1, -1)) on M2 for Z/2."""
    return (identity(2), diagonal([K.one, -K.one]))


def pauli_gamma() -> tuple:
    """A projective action of the Klein group on M2."""
    return (
        identity(2),
        matrix([[0, 1], [1, 0]]),
        matrix([[1, 0], [0, -1]]),
        matrix([[0, -1], [1, 0]]),
    )


def matrix_unit_hom(c: GAlgebra, m: GAlgebra, row: int, name: str) -> GHom:
    """C -> M_n(C) sending 1 to the diagonal matrix unit e_(row,row)."""
    n = m.amplification.n  # type: ignore[union-attr]
    column = [[1 if index == row * n + row else 0] for index in range(n * n)]
    return make_hom(name, c, m, matrix(column))


def scalar_element(algebra: GAlgebra, plus: list, minus: list) -> S1Element:
    """An element whose idempotents are scalar diagonal matrices, acted on trivially."""
    size = len(plus)
    rep = tuple(identity(size) for _ in algebra.group.elements())
    return S1Element(
        algebra,
        size,
        UnitizedMatrix.from_scalar(algebra, diagonal([to_scalar(v) for v in plus])),
        UnitizedMatrix.from_scalar(algebra, diagonal([to_scalar(v) for v in minus])),
        rep,
    )


def rank_one_element(c: GAlgebra) -> S1Element:
    """The class of 1 in M_1(C): P_+ = 1 as an element of C, P_- = 0."""
    rep = tuple(identity(1) for _ in c.group.elements())
    plus = UnitizedMatrix.from_entries(c, [[(K.zero, (K.one,))]])
    return S1Element(c, 1, plus, UnitizedMatrix.zero(c, 1), rep)


def flipped_matrix_algebra(c: GAlgebra) -> GAlgebra:
    return make_matrix_algebra(2, c, flip_gamma(), "M2flip")


def workspace_document() -> dict:
    return copy.deepcopy(json.loads(WORKSPACE_PATH.read_text()))


def sample_workspace() -> Workspace:
    return load_workspace(workspace_document())


@st.composite
def generator_sums(draw, presentation: KGroupPresentation) -> S1Element:
    """Signed sums of one or two K-group generators, sometimes padded by a zero row."""
    picks = draw(
        st.lists(
            st.tuples(st.integers(0, presentation.rank - 1), st.booleans()),
            min_size=1,
            max_size=2,
        )
    )
    total = None
    for index, negated in picks:
        generator = presentation.generators[index]
        summand = generator.negate() if negated else generator
        total = summand if total is None else total.add(summand)
    assert total is not None
    return total.pad(draw(st.integers(0, 1)))
