# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

import json

import pytest

from algebra import is_complex_algebra
from workspace import (
    DEFAULT_MAX_DIM,
    FORMAT_API,
    WorkspaceError,
    canonical_json,
    dump_word,
    get_sha256_hex,
    load_workspace,
)
from tests.unit.fixtures import WORKSPACE_PATH, klein, sample_workspace, workspace_document


def _set(document: dict, path: list, value) -> dict:
    node = document
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] = value
    return document


class TestLoadWorkspace:
    def test_given_workspace_file_when_loaded_then_every_section_is_registered(self):
        workspace = load_workspace(WORKSPACE_PATH)

        assert set(workspace.algebras) >= {"C", "M2", "M2flip", "S"}
        assert {"p", "q", "pf", "qf", "e", "avg"} <= set(workspace.homs)
        assert {"S_inl", "S_inr", "S_prl", "S_prr"} <= set(workspace.homs)
        assert set(workspace.splits) == {"S_split"}
        assert set(workspace.homotopies) == {"h"}
        assert set(workspace.corners) == {"e", "avg"}
        assert len(workspace.words) == 6

    def test_given_same_document_as_text_and_dict_when_loaded_then_same_digest(self):
        from_text = load_workspace(WORKSPACE_PATH.read_text())
        from_dict = load_workspace(workspace_document())

        assert from_text.digest == from_dict.digest
        assert len(from_text.digest) == 64

    def test_given_reordered_keys_when_loaded_then_digest_is_unchanged(self):
        document = workspace_document()
        reordered = dict(reversed(list(document.items())))

        assert load_workspace(reordered).digest == load_workspace(document).digest

    def test_given_changed_document_when_loaded_then_digest_changes(self):
        document = workspace_document()
        document["words"]["extra"] = "q"

        assert load_workspace(document).digest != sample_workspace().digest

    def test_given_workspace_when_provenance_then_digest_and_format(self):
        workspace = sample_workspace()

        assert workspace.provenance() == {"digest": workspace.digest, "format": f"{FORMAT_API}.0"}

    def test_given_corner_when_loaded_then_its_ambient_is_shared(self):
        workspace = sample_workspace()

        assert workspace.corners["e"].ambient is workspace.algebras["M2"]
        assert workspace.corners["avg"].ambient is workspace.algebras["M2flip"]
        assert workspace.homs["e"] is workspace.corners["e"].embedding

    def test_given_explicit_algebra_when_loaded_then_trivial_group_is_implied(self):
        document = workspace_document()
        document["algebras"]["CC"] = {
            "kind": "explicit",
            "basis": ["a", "b"],
            "products": [
                {"left": "a", "right": "a", "result": {"a": "1"}},
                {"left": "b", "right": "b", "result": {"b": "1"}},
            ],
            "unit": ["1", "1"],
            "presentation": {"blocks": [1, 1], "iso": [["1", "0"], ["0", "1"]]},
        }

        workspace = load_workspace(document)

        algebra = workspace.algebras["CC"]
        assert algebra.dim == 2
        assert algebra.presentation.blocks == (1, 1)
        assert workspace.groups["1"].order == 1

    def test_given_extra_split_when_loaded_then_it_is_registered(self):
        document = workspace_document()
        document["splits"] = {
            "T": {"ideal_map": "S_inl", "quotient_map": "S_prr", "split": "S_inr"}
        }

        workspace = load_workspace(document)

        assert workspace.splits["T"].ideal is workspace.algebras["C"]

    @pytest.mark.parametrize(
        "path,value,pointer,message",
        [
            (["format"], 2, "/format", "unsupported workspace format"),
            (["algebras", "C", "kind"], "quaternion", "/algebras/C/kind", "quaternion"),
            (["algebras", "C", "group"], "Z3", "/algebras/C/group", "unknown group"),
            (["homs", "p", "source"], "X", "/homs/p/source", "unknown algebra 'X'"),
            (["homs", "p", "matrix"], [["1"]], "/homs/p/matrix", "expected a 4x1 matrix"),
            (
                ["homs", "p", "matrix"],
                [["1/0"], ["0"], ["0"], ["0"]],
                "/homs/p/matrix",
                "",
            ),
            (["homs", "p", "matrix"], [["2"], ["0"], ["0"], ["0"]], "/homs/p", ""),
            (
                ["splits"],
                {"T": {"ideal_map": "S_inl", "quotient_map": "S_prr", "split": "S_inl"}},
                "/splits/T",
                "not split exact",
            ),
            (
                ["homotopies", "p"],
                {"source": "C", "target": "M2", "matrix": [[[]], [[]], [[]], [[]]]},
                "/homotopies/p",
                "already used",
            ),
            (["words", "bad"], "p . p", "/words/bad", "M2 is not C"),
            (["words", "bad"], "p .", "/words/bad", ""),
        ],
    )
    def test_given_broken_node_when_loaded_then_error_points_at_it(
        self, path: list, value, pointer: str, message: str
    ):
        document = _set(workspace_document(), path, value)

        with pytest.raises(WorkspaceError, match=message) as e:
            load_workspace(document)

        assert e.value.pointer == pointer
        assert str(e.value).startswith(f"{pointer}: ")

    def test_given_dimension_limit_when_loaded_then_larger_algebra_is_refused(self):
        with pytest.raises(WorkspaceError, match="the limit is 4") as e:
            load_workspace(workspace_document(), max_dim=4)

        assert e.value.pointer == "/algebras/S"

    def test_given_default_limit_when_loaded_then_sample_fits(self):
        workspace = load_workspace(workspace_document(), max_dim=DEFAULT_MAX_DIM)

        assert max(algebra.dim for algebra in workspace.algebras.values()) <= DEFAULT_MAX_DIM

    def test_given_text_that_is_not_json_when_loaded_then_error(self):
        with pytest.raises(WorkspaceError, match="not valid JSON"):
            load_workspace("{")

    def test_given_unknown_basis_label_when_loaded_then_error_points_at_product(self):
        document = workspace_document()
        document["algebras"]["CC"] = {
            "kind": "explicit",
            "basis": ["a"],
            "products": [{"left": "a", "right": "z", "result": {"a": "1"}}],
        }

        with pytest.raises(WorkspaceError, match="unknown basis element") as e:
            load_workspace(document)

        assert e.value.pointer == "/algebras/CC/products/0"


class TestWorkspaceLookups:
    def test_given_workspace_when_origin_then_first_complex_algebra(self):
        workspace = sample_workspace()

        origin = workspace.origin()

        assert origin is workspace.algebras["C"]
        assert is_complex_algebra(origin)

    def test_given_group_without_complex_algebra_when_origin_then_error(self):
        with pytest.raises(WorkspaceError, match="no complex algebra"):
            sample_workspace().origin(klein())

    def test_given_unknown_name_when_lookup_then_key_error(self):
        with pytest.raises(KeyError):
            sample_workspace().lookup_hom("zz")


class TestDumpWord:
    def test_given_difference_when_dumped_then_tree_has_plus_and_neg(self):
        workspace = sample_workspace()

        tree = dump_word(workspace.parse_word("p - q"))

        assert tree == {
            "node": "plus",
            "children": [
                {"node": "generator", "kind": "hom", "name": "p", "source": "C", "target": "M2"},
                {
                    "node": "neg",
                    "child": {
                        "node": "generator",
                        "kind": "hom",
                        "name": "q",
                        "source": "C",
                        "target": "M2",
                    },
                },
            ],
            "source": "C",
            "target": "M2",
        }

    def test_given_corner_word_when_dumped_then_inverse_is_marked(self):
        workspace = sample_workspace()

        tree = dump_word(workspace.parse_word("e . e^-1"))

        assert tree["node"] == "compose"
        assert tree["right"]["kind"] == "corner-inverse"
        assert tree["right"]["name"] == "e^-1"

    def test_given_split_and_identity_when_dumped_then_kinds_are_named(self):
        workspace = sample_workspace()

        tree = dump_word(workspace.parse_word("id(C) . S_inl . delta(S_split)"))

        assert tree["left"]["left"]["kind"] == "identity"
        assert tree["right"]["kind"] == "split"


class TestDigest:
    def test_given_data_when_hashed_then_matches_known_sha256(self):
        assert get_sha256_hex("") == (
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        )

    def test_given_dict_when_canonical_json_then_keys_are_sorted_and_compact(self):
        assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
        assert json.loads(canonical_json({"x": "y"})) == {"x": "y"}
