# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from linalg import (
    COS,
    PATH_RING,
    SIN,
    InternalInvariantError,
    K,
    PathEvaluationError,
    ScalarFormatError,
    evaluate_path,
    format_path,
    format_scalar,
    identity,
    inverse,
    kron,
    left_inverse,
    matrix,
    nullspace,
    parse_path,
    parse_scalar,
    rank,
    reduce_path,
    reverse_path,
    scalar,
    solve_in_image,
    trace,
)

fractions = st.fractions(max_denominator=50).filter(lambda f: abs(f) < 1000)


class TestScalars:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("3", scalar(3)),
            ("-1/2", scalar(Fraction(-1, 2))),
            ("1/3-2*i", scalar(Fraction(1, 3), -2)),
            ("-1/2*i", scalar(0, Fraction(-1, 2))),
            ("i", scalar(0, 1)),
            ("2 + i", scalar(2, 1)),
        ],
    )
    def test_given_scalar_text_when_parse_then_exact_value(self, text: str, expected):
        assert parse_scalar(text) == expected

    @pytest.mark.parametrize("text", ["", "abc", "1/0", "1.5", "2*j"])
    def test_given_malformed_text_when_parse_then_scalar_format_error(self, text: str):
        with pytest.raises(ScalarFormatError):
            parse_scalar(text)

    @pytest.mark.parametrize("text", ["0", "7", "-1/2", "1/3-2*i", "-1/2*i", "2+1*i"])
    def test_given_canonical_text_when_format_then_text_is_reproduced(self, text: str):
        assert format_scalar(parse_scalar(text)) == text

    @given(real=fractions, imag=fractions)
    def test_given_any_gaussian_rational_when_formatted_then_it_parses_back(
        self, real: Fraction, imag: Fraction
    ):
        value = scalar(real, imag)
        assert parse_scalar(format_scalar(value)) == value


class TestMatrices:
    def test_given_ragged_rows_when_matrix_then_scalar_format_error(self):
        with pytest.raises(ScalarFormatError):
            matrix([[1, 2], [3]])

    def test_given_two_identities_when_kron_then_identity(self):
        assert kron(identity(2), identity(3)).to_list() == identity(6).to_list()

    def test_given_kron_when_indexed_then_follows_row_major_blocks(self):
        product = kron(matrix([[1, 2], [3, 4]]), matrix([[0, 1], [1, 0]]))
        assert product.to_list()[0][3] == scalar(2)
        assert product.to_list()[3][0] == scalar(3)
        assert trace(product) == scalar(0)

    def test_given_singular_matrix_when_inverse_then_none(self):
        assert inverse(matrix([[1, 2], [2, 4]])) is None

    def test_given_invertible_matrix_when_inverse_then_product_is_identity(self):
        m = matrix([[1, "i"], [0, 2]])
        m_inv = inverse(m)
        assert m_inv is not None
        assert (m * m_inv).to_list() == identity(2).to_list()

    def test_given_rank_one_matrix_when_nullspace_then_one_vector_in_kernel(self):
        m = matrix([[1, 1], [1, 1]])
        kernel = nullspace(m)
        assert len(kernel) == 1
        assert rank(m) == 1
        vector = matrix([[v] for v in kernel[0]])
        assert not any(row[0] for row in (m * vector).to_list())

    def test_given_injective_matrix_when_left_inverse_then_identity_on_source(self):
        m = matrix([[1, 0], [2, 1], [0, 3]])
        assert (left_inverse(m) * m).to_list() == identity(2).to_list()

    def test_given_non_injective_matrix_when_left_inverse_then_internal_error(self):
        with pytest.raises(InternalInvariantError):
            left_inverse(matrix([[1, 1], [1, 1]]))

    def test_given_right_hand_side_outside_image_when_solve_then_none(self):
        m = matrix([[1], [1]])
        assert solve_in_image(m, matrix([[1], [2]])) is None
        solution = solve_in_image(m, matrix([[3], [3]]))
        assert solution is not None and solution.to_list() == [[scalar(3)]]


class TestPaths:
    def test_given_circle_relation_when_reduced_then_one(self):
        assert reduce_path(COS**2 + SIN**2) == PATH_RING.one

    @pytest.mark.parametrize(
        "value,at_start,at_end",
        [
            (COS**2, 1, 0),
            (SIN**2, 0, 1),
            (COS * SIN, 0, 0),
            (PATH_RING.one + SIN, 1, 2),
        ],
    )
    def test_given_path_when_evaluated_then_endpoint_values(self, value, at_start, at_end):
        assert evaluate_path(value, 0) == scalar(at_start)
        assert evaluate_path(value, 1) == scalar(at_end)

    @pytest.mark.parametrize("endpoint", [2, -1, 0.5, None])
    def test_given_interior_point_when_evaluated_then_path_evaluation_error(self, endpoint):
        with pytest.raises(PathEvaluationError):
            evaluate_path(COS, endpoint)

    def test_given_sine_when_reversed_then_sign_flips(self):
        assert reverse_path(SIN) == -SIN
        assert reverse_path(COS) == COS

    def test_given_triples_when_parsed_then_formatted_in_reduced_form(self):
        value = parse_path([[2, 0, "1"], [0, 2, "1"], [1, 1, "1/2*i"]])
        assert format_path(value) == [[0, 0, "1"], [1, 1, "1/2*i"]]

    def test_given_constant_when_lifted_then_scalar_unchanged(self):
        assert evaluate_path(PATH_RING.ground_new(K.one), 1) == K.one
