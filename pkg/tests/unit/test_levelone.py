# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

import pytest

from algebra import compose
from amplified import UnitizedMatrix
from levelone import LevelOneError, S1Element, add, chi
from linalg import PATH_DOMAIN, SIN
from words import CornerInvLetter, HomLetter, IdentityLetter, SplitLetter
from tests.unit.fixtures import rank_one_element, sample_workspace, scalar_element


@pytest.fixture(scope="module")
def workspace():
    return sample_workspace()


class TestChi:
    def test_given_hom_when_chi_then_minus_split_is_zero(self, workspace):
        x = chi(HomLetter(workspace.homs["p"]))

        x.validate()

        assert x.sigma_plus is workspace.homs["p"]
        assert not any(v for row in x.sigma_minus.matrix.to_list() for v in row)
        assert x.corner is None

    def test_given_corner_inverse_when_chi_then_corner_is_recorded(self, workspace):
        corner = workspace.corners["e"]

        x = chi(CornerInvLetter(corner))

        x.validate()
        assert x.corner is corner
        assert x.target is corner.base

    def test_given_split_letter_when_chi_then_splits_differ_inside_ideal(self, workspace):
        sequence = workspace.splits["S_split"]

        x = chi(SplitLetter(sequence))

        x.validate()
        assert x.source is sequence.middle
        assert x.target is sequence.ideal

    def test_given_identity_letter_when_chi_then_plus_split_is_identity(self, workspace):
        c = workspace.algebras["C"]

        x = chi(IdentityLetter(c))

        assert x.sigma_plus.is_identity()
        assert x.source is c and x.target is c


class TestLevelOne:
    def test_given_element_when_negated_then_splits_swap(self, workspace):
        x = chi(HomLetter(workspace.homs["p"]))

        y = x.negate()

        assert y.sigma_plus is x.sigma_minus
        assert y.sigma_minus is x.sigma_plus
        assert y.name == "-p"

    def test_given_two_elements_when_added_then_sum_lands_in_a_corner(self, workspace):
        x = chi(HomLetter(workspace.homs["p"]))
        y = chi(HomLetter(workspace.homs["q"]))

        total = add(x, y)

        total.validate()
        assert total.corner is not None
        assert total.corner.ambient.amplification.n == 2
        assert total.name == "(p+q)"

    def test_given_elements_with_different_sources_when_added_then_error(self, workspace):
        x = chi(HomLetter(workspace.homs["p"]))
        y = chi(SplitLetter(workspace.splits["S_split"]))

        with pytest.raises(LevelOneError, match="cannot add"):
            add(x, y)

    def test_given_element_when_to_word_then_word_has_its_type(self, workspace):
        x = chi(HomLetter(workspace.homs["p"]))

        word = x.to_word()

        assert word.source is workspace.algebras["C"]
        assert word.target is workspace.algebras["M2"]

    def test_given_element_from_c_when_pointed_then_pulled_back_to_matrix_units(self, workspace):
        x = chi(HomLetter(workspace.homs["p"]))

        pointed = x.pointed()
        pointed.validate()
        element = pointed.to_s1()

        element.validate()
        assert element.size == 1
        assert set(element.plus.parts) == {0}
        assert element.is_standard()

    def test_given_element_not_from_c_when_pointed_then_error(self, workspace):
        x = chi(SplitLetter(workspace.splits["S_split"]))

        with pytest.raises(LevelOneError, match="does not start at C"):
            x.pointed()


class TestS1Element:
    def test_given_rank_one_element_when_validated_then_standard(self, workspace):
        element = rank_one_element(workspace.algebras["C"])

        element.validate()

        assert element.is_standard()
        assert not element.negate().is_standard()

    def test_given_different_scalar_parts_when_validated_then_error(self, workspace):
        element = scalar_element(workspace.algebras["C"], [1, 0], [0, 1])

        with pytest.raises(LevelOneError, match="scalar parts"):
            element.validate()

    def test_given_two_elements_when_added_then_sizes_add(self, workspace):
        x = rank_one_element(workspace.algebras["C"])

        total = x.add(x.negate())

        total.validate()
        assert total.size == 2
        assert total.compress().size == 2

    def test_given_elements_over_different_algebras_when_added_then_error(self, workspace):
        x = rank_one_element(workspace.algebras["C"])
        y = S1Element.zero(workspace.algebras["M2"])

        with pytest.raises(LevelOneError, match="cannot add"):
            x.add(y)

    def test_given_padded_element_when_compressed_then_padding_is_stripped(self, workspace):
        x = rank_one_element(workspace.algebras["C"])

        padded = x.pad(2)

        assert padded.size == 3
        assert padded.components() == [[0], [1], [2]]
        compressed = padded.compress()
        assert compressed.size == 1
        assert compressed.plus.equals(x.plus)

    def test_given_trivial_element_when_compressed_then_zero(self, workspace):
        c = workspace.algebras["C"]
        x = rank_one_element(c)

        trivial = S1Element.trivial(c, x.plus, x.rep)

        assert trivial.compress().plus.is_zero()
        assert trivial.compress().size == 1

    def test_given_element_when_restricted_then_block_is_kept(self, workspace):
        x = rank_one_element(workspace.algebras["C"])
        total = x.add(x.negate())

        restricted = total.restrict([1])

        assert restricted.plus.equals(x.minus)
        assert restricted.minus.equals(x.plus)

    def test_given_element_when_as_level_one_then_valid_with_leading_zero(self, workspace):
        c = workspace.algebras["C"]
        x = rank_one_element(c)

        z = x.as_level_one(c)

        z.validate()
        assert z.corner is not None
        assert z.corner.ambient.amplification.n == 2
        assert z.source is c and z.target is c

    def test_given_constant_path_when_endpoints_then_both_ends_are_the_element(self, workspace):
        c = workspace.algebras["C"]
        x = rank_one_element(c)
        path = S1Element(c, 1, x.plus.lift(), UnitizedMatrix.zero(c, 1, PATH_DOMAIN), x.rep)

        start, end = path.endpoints()

        assert start.plus.equals(x.plus)
        assert end.plus.equals(x.plus)
        assert end.minus.is_zero()

    def test_given_path_with_non_idempotent_interior_when_endpoints_then_level_one_error(
        self, workspace
    ):
        c = workspace.algebras["C"]
        x = rank_one_element(c)
        squeezed = x.plus.lift().scale_scalar(SIN * SIN)
        path = S1Element(c, 1, squeezed, UnitizedMatrix.zero(c, 1, PATH_DOMAIN), x.rep)

        with pytest.raises(LevelOneError, match="path is not idempotent"):
            path.endpoints()

    def test_given_element_when_as_dict_then_entries_are_formatted(self, workspace):
        x = rank_one_element(workspace.algebras["C"])

        assert x.as_dict() == {
            "algebra": "C",
            "size": 1,
            "plus": {"scalar": [["0"]], "parts": {"1": [["1"]]}},
            "minus": {"scalar": [["0"]], "parts": {}},
        }

    def test_given_padded_element_when_as_dict_then_padding_is_stripped(self, workspace):
        x = rank_one_element(workspace.algebras["C"])

        assert x.pad(2).as_dict() == x.as_dict()

    def test_given_split_composite_when_compared_then_it_is_idempotent_on_middle(self, workspace):
        sequence = workspace.splits["S_split"]

        projection = compose(sequence.f, sequence.s)

        assert compose(projection, projection).matrix.to_list() == projection.matrix.to_list()
