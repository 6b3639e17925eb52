# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

import logging

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from algebra import (
    FiniteGroup,
    Presentation,
    cyclic_group,
    make_algebra,
    make_matrix_algebra,
    trivial_group,
)
from amplified import UnitizedMatrix, scalar_identity
from linalg import K, diagonal, identity, inverse, matrix, scalar, zeros
from oracle import (
    Indeterminate,
    InvariantVector,
    OracleInputError,
    block_images,
    block_representations,
    from_block_images,
    invariant_oracle,
    irreducible_characters,
)
from tests.unit.fixtures import complex_plane, flip_gamma, klein, pauli_gamma, z2


def symmetric_group() -> FiniteGroup:
    perms = [(0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)]
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(tuple(index[tuple(g[h[x]] for x in range(3))] for h in perms) for g in perms)
    return FiniteGroup("S3", table)


def corner_unit(algebra, b: int) -> UnitizedMatrix:
    return UnitizedMatrix.from_parts(algebra, zeros(1, 1), {b: matrix([[1]])})


def trivial_rep(group, size: int = 1) -> tuple:
    return tuple(identity(size) for _ in group.elements())


def swapped_pair():
    """C (+) C with Z/2 exchanging the summands."""
    table = {(0, 0): ((0, K.one),), (1, 1): ((1, K.one),)}
    swap = matrix([[0, 1], [1, 0]])
    return make_algebra(
        "CC",
        z2(),
        ["a", "b"],
        table,
        (identity(2), swap),
        unit=(K.one, K.one),
        presentation=Presentation((1, 1), identity(2)),
    )


class TestIrreducibleCharacters:
    def test_given_z2_when_irreducibles_then_trivial_and_sign(self):
        irreducibles = irreducible_characters(z2())

        assert [i.character for i in irreducibles] == [
            (scalar(1), scalar(1)),
            (scalar(1), scalar(-1)),
        ]

    @pytest.mark.parametrize(
        "group,degrees",
        [
            (trivial_group(), [1]),
            (cyclic_group(3), [1, 2]),
            (cyclic_group(4), [1, 1, 1, 1]),
            (klein(), [1, 1, 1, 1]),
            (symmetric_group(), [1, 1, 2]),
        ],
    )
    def test_given_group_when_irreducibles_then_degrees_over_gaussian_rationals(
        self, group: FiniteGroup, degrees: list[int]
    ):
        irreducibles = irreducible_characters(group)

        assert sorted(i.degree for i in irreducibles) == degrees
        assert sum(i.degree * i.degree // i.field_degree for i in irreducibles) == group.order

    def test_given_z3_when_irreducibles_then_rotation_pair_has_field_degree_two(self):
        _, pair = irreducible_characters(cyclic_group(3))

        assert pair.field_degree == 2
        assert pair.character == (scalar(2), scalar(-1), scalar(-1))

    def test_given_any_group_when_idempotents_summed_then_unit_of_group_algebra(self):
        group = symmetric_group()
        total = [K.zero] * group.order
        for irreducible in irreducible_characters(group):
            total = [a + b for a, b in zip(total, irreducible.idempotent)]

        assert total == [K.one if g == group.identity else K.zero for g in group.elements()]


class TestInvariantVector:
    def test_given_vector_when_subtracted_from_itself_then_zero(self):
        v = InvariantVector(((1, 2),), ((scalar(3), scalar(-1)),))

        assert (v - v).is_zero()
        assert not (v + v).is_zero()
        assert (-v).multiplicities == ((-1, -2),)

    def test_given_vector_when_as_dict_then_scalars_are_strings(self):
        v = InvariantVector(((1,),), ((scalar(0, 1),),))

        assert v.as_dict() == {"multiplicities": [[1]], "characters": [["1*i"]]}


class TestInvariantOracle:
    def test_given_unit_of_c_when_oracle_then_one_copy_of_trivial_rep(self):
        c = complex_plane()
        p = UnitizedMatrix.from_entries(c, [[(K.zero, (K.one,))]])

        key = invariant_oracle(p, trivial_rep(c.group))

        assert isinstance(key, InvariantVector)
        assert key.multiplicities == ((1,),)

    def test_given_flip_action_when_oracle_then_diagonal_units_carry_different_reps(self):
        m2 = make_matrix_algebra(2, complex_plane(z2()), flip_gamma())
        rep = trivial_rep(m2.group)

        upper = invariant_oracle(corner_unit(m2, 0), rep)
        lower = invariant_oracle(corner_unit(m2, 3), rep)

        assert upper.multiplicities == ((1, 0),)
        assert lower.multiplicities == ((0, 1),)

    def test_given_non_idempotent_when_oracle_then_input_error(self):
        c = complex_plane()
        twice = UnitizedMatrix.from_entries(c, [[(K.zero, (scalar(2),))]])

        with pytest.raises(OracleInputError, match="not idempotent"):
            invariant_oracle(twice, trivial_rep(c.group))

    def test_given_non_invariant_idempotent_when_oracle_then_input_error(self):
        m2 = make_matrix_algebra(2, complex_plane(z2()), flip_gamma())
        half = scalar(1) / scalar(2)
        rows = [[(K.zero, (half, half, half, half))]]
        tilted = UnitizedMatrix.from_entries(m2, rows)

        with pytest.raises(OracleInputError, match="not invariant"):
            invariant_oracle(tilted, trivial_rep(m2.group))

    def test_given_projective_action_when_oracle_then_indeterminate_and_warning(
        self, caplog: pytest.LogCaptureFixture
    ):
        caplog.set_level(logging.WARNING)
        m2 = make_matrix_algebra(2, complex_plane(klein()), pauli_gamma())

        result = invariant_oracle(scalar_identity(m2, 1), trivial_rep(m2.group))

        assert isinstance(result, Indeterminate)
        assert "projective" in result.reason
        assert "Oracle refused a decision" in caplog.text

    def test_given_algebra_without_presentation_when_oracle_then_indeterminate(self):
        table = {(0, 0): ((0, K.one),), (1, 1): ((1, K.one),)}
        bare = make_algebra("CC", trivial_group(), ["a", "b"], table, unit=(K.one, K.one))

        result = block_representations(bare, trivial_rep(bare.group))

        assert isinstance(result, Indeterminate)
        assert "semisimple presentation" in result.reason

    def test_given_action_swapping_blocks_when_oracle_then_indeterminate(self):
        pair = swapped_pair()

        result = block_representations(pair, trivial_rep(pair.group))

        assert isinstance(result, Indeterminate)
        assert "permutes its blocks" in result.reason

    def test_given_block_images_when_rebuilt_then_same_matrix(self):
        m2 = make_matrix_algebra(2, complex_plane())
        e12 = corner_unit(m2, 1)

        rebuilt = from_block_images(m2, 1, block_images(e12))

        assert rebuilt.equals(e12)


bits = st.lists(st.integers(min_value=0, max_value=1), min_size=1, max_size=3)


def diagonal_idempotent(algebra, values: list[int]) -> UnitizedMatrix:
    part = diagonal([K.one if v else K.zero for v in values])
    return UnitizedMatrix.from_parts(algebra, zeros(len(values), len(values)), {0: part})


class TestOracleLaws:
    @settings(max_examples=15, deadline=None)
    @given(left=bits, right=bits)
    def test_given_two_idempotents_when_summed_then_keys_add(self, left, right):
        c = complex_plane(z2())
        p, q = diagonal_idempotent(c, left), diagonal_idempotent(c, right)

        total = invariant_oracle(p.direct_sum(q), trivial_rep(c.group, len(left) + len(right)))

        assert total == invariant_oracle(p, trivial_rep(c.group, len(left))) + invariant_oracle(
            q, trivial_rep(c.group, len(right))
        )
        assert total.multiplicities == ((sum(left) + sum(right), 0),)

    @settings(max_examples=15, deadline=None)
    @given(
        values=st.lists(st.integers(min_value=-3, max_value=3), min_size=4, max_size=4),
        projection=st.lists(st.integers(min_value=0, max_value=1), min_size=2, max_size=2),
    )
    def test_given_similar_idempotents_when_oracle_then_same_key(self, values, projection):
        a, b, c, d = values
        change = matrix([[a, b], [c, d]])
        change_inv = inverse(change)
        assume(change_inv is not None)
        plane = complex_plane()
        p = diagonal_idempotent(plane, projection)
        part = change * p.part(0) * change_inv
        moved = UnitizedMatrix.from_parts(plane, zeros(2, 2), {0: part})
        rep = trivial_rep(plane.group, 2)

        assert invariant_oracle(moved, rep) == invariant_oracle(p, rep)
