# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

import pytest
from sympy.polys.matrices import DomainMatrix

from algebra import (
    AlgebraValidationError,
    ColumnActionError,
    CornerError,
    FiniteGroup,
    GroupError,
    HomomorphismError,
    PathHom,
    check_splitexact,
    compose,
    corner_embedding,
    cyclic_group,
    derive_column_action,
    direct_sum,
    homs_equal,
    identity_hom,
    make_algebra,
    make_hom,
    make_matrix_algebra,
    regular_representation,
    unitize,
)
from linalg import PATH_DOMAIN, K, PathEvaluationError, identity, matrix, parse_path, scalar
from tests.unit.fixtures import (
    complex_plane,
    flip_gamma,
    klein,
    matrix_unit_hom,
    pauli_gamma,
    z2,
)


class TestFiniteGroup:
    def test_given_cyclic_group_when_built_then_inverses_and_classes_are_known(self):
        group = cyclic_group(3)

        assert group.order == 3
        assert group.inv(1) == 2
        assert group.conjugacy_classes == ((0,), (1,), (2,))

    def test_given_table_that_is_not_a_latin_square_when_built_then_group_error(self):
        with pytest.raises(GroupError):
            FiniteGroup("bad", ((0, 1), (0, 1)))

    def test_given_symmetric_group_when_classes_then_identity_class_first(self):
        # S3 as permutations of {0, 1, 2}, listed so that 0 is the identity
        perms = [(0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)]
        index = {p: i for i, p in enumerate(perms)}
        table = tuple(
            tuple(index[tuple(g[h[x]] for x in range(3))] for h in perms) for g in perms
        )
        group = FiniteGroup("S3", table)

        assert group.conjugacy_classes[0] == (0,)
        assert sorted(len(c) for c in group.conjugacy_classes) == [1, 2, 3]

    def test_given_group_when_regular_representation_then_it_is_multiplicative(self):
        group = klein()
        rep = regular_representation(group)

        for g in group.elements():
            for h in group.elements():
                assert (rep[g] * rep[h]).to_list() == rep[group.mul(g, h)].to_list()


class TestGAlgebra:
    def test_given_non_associative_table_when_make_algebra_then_error_names_triple(self):
        table = {(0, 0): ((1, K.one),), (1, 0): ((0, K.one),)}
        with pytest.raises(AlgebraValidationError) as e:
            make_algebra("bad", z2(), ["a", "b"], table)
        assert e.value.triple is not None

    def test_given_product_without_span_when_make_algebra_then_not_quadratik(self):
        table = {(0, 0): ((1, K.one),)}
        with pytest.raises(AlgebraValidationError, match="quadratik"):
            make_algebra("nil", cyclic_group(1), ["a", "b"], table)

    def test_given_wrong_unit_when_make_algebra_then_validation_error(self):
        table = {(0, 0): ((0, K.one),)}
        with pytest.raises(AlgebraValidationError, match="unit"):
            make_algebra("C", cyclic_group(1), ["1"], table, unit=(scalar(2),))

    def test_given_action_that_is_not_an_automorphism_when_make_algebra_then_error(self):
        table = {(0, 0): ((0, K.one),), (1, 1): ((1, K.one),)}
        action = (identity(2), matrix([[1, 1], [0, 1]]))
        with pytest.raises(HomomorphismError) as e:
            make_algebra("CC", z2(), ["a", "b"], table, action)
        assert e.value.group_element == 1

    def test_given_matrix_algebra_when_built_then_units_multiply(self):
        c = complex_plane()
        m2 = make_matrix_algebra(2, c)
        e12, e21 = m2.basis(1), m2.basis(2)

        assert m2.dim == 4
        assert m2.multiply(e12, e21) == m2.basis(0)
        assert m2.multiply(e21, e12) == m2.basis(3)
        assert m2.unit == (K.one, K.zero, K.zero, K.one)

    def test_given_same_request_when_make_matrix_algebra_then_same_object(self):
        c = complex_plane(z2())

        assert make_matrix_algebra(2, c, flip_gamma()) is make_matrix_algebra(2, c, flip_gamma())

    def test_given_equal_but_distinct_bases_when_make_matrix_algebra_then_each_has_its_own(self):
        first, second = complex_plane(z2()), complex_plane(z2())

        m_first = make_matrix_algebra(2, first, flip_gamma())
        m_second = make_matrix_algebra(2, second, flip_gamma())

        assert m_first is not m_second
        assert m_first.amplification.base is first
        assert m_second.amplification.base is second

    def test_given_projective_gamma_when_make_matrix_algebra_then_action_is_accepted(self):
        m2 = make_matrix_algebra(2, complex_plane(klein()), pauli_gamma())

        assert m2.group.order == 4
        m2.validate()

    def test_given_gamma_that_is_not_an_action_when_make_matrix_algebra_then_corner_error(self):
        gamma = (identity(2), matrix([[1, 1], [0, 1]]))
        with pytest.raises(CornerError):
            make_matrix_algebra(2, complex_plane(z2()), gamma)

    def test_given_algebra_when_unitized_then_adjoined_unit_is_last(self):
        c = complex_plane()
        unitized, inclusion = unitize(c)

        assert unitized.dim == 2
        assert unitized.unit == (K.zero, K.one)
        assert inclusion.image(0) == (K.one, K.zero)
        assert unitize(c)[0] is unitized


class TestHomomorphisms:
    def test_given_non_multiplicative_map_when_make_hom_then_basis_pair_is_named(self):
        c = complex_plane()
        m2 = make_matrix_algebra(2, c)
        with pytest.raises(HomomorphismError) as e:
            make_hom("twice", c, m2, matrix([[2], [0], [0], [0]]))
        assert e.value.basis == (0, 0)

    def test_given_non_equivariant_map_when_make_hom_then_group_element_is_named(self):
        c = complex_plane(z2())
        m2 = make_matrix_algebra(2, c, flip_gamma())
        half = "1/2"
        with pytest.raises(HomomorphismError) as e:
            make_hom("tilt", c, m2, matrix([[half], [half], [half], [half]]))
        assert e.value.group_element == 1

    def test_given_two_homs_when_composed_then_matrices_multiply(self):
        c = complex_plane()
        m2 = make_matrix_algebra(2, c)
        p = matrix_unit_hom(c, m2, 0, "p")
        composite = compose(identity_hom(c), p)

        assert homs_equal(composite, p)

    def test_given_mismatched_homs_when_composed_then_homomorphism_error(self):
        c = complex_plane()
        m2 = make_matrix_algebra(2, c)
        p = matrix_unit_hom(c, m2, 0, "p")
        with pytest.raises(HomomorphismError):
            compose(p, p)


class TestCornersAndSums:
    def test_given_corner_embedding_when_built_then_lands_in_e11(self):
        c = complex_plane(z2())
        corner = corner_embedding(c, 2, flip_gamma(), "e")

        assert corner.embedding.image(0) == (K.one, K.zero, K.zero, K.zero)
        assert corner.ambient.amplification.n == 2

    def test_given_gamma_moving_e11_when_corner_embedding_then_corner_error(self):
        c = complex_plane(z2())
        swap = (identity(2), matrix([[0, 1], [1, 0]]))
        with pytest.raises(CornerError):
            corner_embedding(c, 2, swap)

    def test_given_direct_sum_when_built_then_sequence_is_split_exact(self):
        c = complex_plane()
        m2 = make_matrix_algebra(2, c)
        summed = direct_sum(c, m2, "S")

        report = summed.sequence.validate()

        assert summed.algebra.dim == 5
        assert summed.algebra.presentation.blocks == (1, 2)
        assert report.valid
        assert report.projection is not None

    def test_given_maps_that_do_not_split_when_checked_then_failures_are_reported(self):
        c = complex_plane()
        summed = direct_sum(c, c, "CC")
        inl, inr = summed.inclusions
        _, prr = summed.projections

        report = check_splitexact(inl, prr, inl)
        broken = check_splitexact(inr, prr, inr)

        assert not report.valid
        assert "exactness fails" in broken.failures


class TestColumnAction:
    def test_given_flip_action_when_derived_then_column_action_is_certified(self):
        m2 = make_matrix_algebra(2, complex_plane(z2()), flip_gamma())

        column_action = derive_column_action(m2)

        assert column_action.certified
        assert column_action.gamma[1].to_list() == flip_gamma()[1].to_list()

    def test_given_algebra_that_is_not_amplified_when_derived_then_column_action_error(self):
        with pytest.raises(ColumnActionError):
            derive_column_action(complex_plane())


class TestPathHom:
    def _rotation(self):
        c = complex_plane()
        m2 = make_matrix_algebra(2, c)
        entries = [[[2, 0, "1"]], [[1, 1, "1"]], [[1, 1, "1"]], [[0, 2, "1"]]]
        rows = [[parse_path(entry)] for entry in entries]
        return c, m2, PathHom("h", c, m2, DomainMatrix(rows, (4, 1), PATH_DOMAIN))

    def test_given_rotation_of_projections_when_validated_then_endpoints_are_e11_and_e22(self):
        c, m2, homotopy = self._rotation()

        homotopy.validate()

        assert homs_equal(homotopy.at(0), matrix_unit_hom(c, m2, 0, "p"))
        assert homs_equal(homotopy.at(1), matrix_unit_hom(c, m2, 1, "q"))

    def test_given_homotopy_when_evaluated_inside_then_path_evaluation_error(self):
        _, _, homotopy = self._rotation()
        with pytest.raises(PathEvaluationError):
            homotopy.at(2)
