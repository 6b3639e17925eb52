# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

import json
from pathlib import Path

import pytest

from cli import ExitCode, Settings, SettingsError, build_parser, main, render
from tests.unit.fixtures import KLEIN_TABLE, WORKSPACE_PATH


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.delenv("GKCALC_MAX_DIM", raising=False)
    monkeypatch.delenv("GKCALC_LOG_LEVEL", raising=False)


def run(capsys: pytest.CaptureFixture, *argv: str, workspace: Path = WORKSPACE_PATH):
    command, *rest = argv
    code = main([command, "--workspace", str(workspace), "--format", "machine", *rest])
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


class TestSettings:
    def test_given_empty_environment_when_from_env_then_defaults(self):
        settings = Settings.from_env({})

        assert settings == Settings()
        assert settings.log_level == "WARNING"

    def test_given_lowercase_level_when_from_env_then_normalized(self):
        settings = Settings.from_env({"GKCALC_LOG_LEVEL": "debug", "GKCALC_MAX_DIM": "8"})

        assert settings.log_level == "DEBUG"
        assert settings.max_dim == 8

    @pytest.mark.parametrize(
        "environ,message",
        [
            ({"GKCALC_MAX_DIM": "many"}, "must be an integer"),
            ({"GKCALC_MAX_DIM": "0"}, "must be positive"),
            ({"GKCALC_LOG_LEVEL": "loud"}, "not a logging level"),
        ],
    )
    def test_given_bad_value_when_from_env_then_settings_error(self, environ, message: str):
        with pytest.raises(SettingsError, match=message):
            Settings.from_env(environ)


class TestRender:
    def test_given_nested_report_when_rendered_as_text_then_dotted_sorted_lines(self):
        text = render({"b": {"c": 1}, "a": [1, 2], "m": [{"x": "y"}]}, "text")

        assert text.splitlines() == ["a: [1, 2]", "b.c: 1", "m[0].x: y"]

    def test_given_report_when_rendered_as_machine_then_sorted_json(self):
        text = render({"b": 1, "a": True}, "machine")

        assert json.loads(text) == {"a": True, "b": 1}
        assert text.index('"a"') < text.index('"b"')


class TestMain:
    def test_given_sample_workspace_when_validate_then_ok_with_provenance(self, capsys):
        code, report = run(capsys, "validate")

        assert code == ExitCode.OK
        assert report["valid"] is True
        assert report["provenance"]["format"] == "1.0"
        assert report["algebras"]["S"] == 5

    def test_given_algebra_when_kgroup_then_rank_and_generators(self, capsys):
        code, report = run(capsys, "kgroup", "C")

        assert code == ExitCode.OK
        assert report["group"] == "Z^2"
        assert report["summary"] == "Z^2, 2 generators"

    def test_given_text_format_when_kgroup_then_dotted_lines(self, capsys):
        code = main(["kgroup", "--workspace", str(WORKSPACE_PATH), "S"])

        assert code == ExitCode.OK
        assert "group: Z^4" in capsys.readouterr().out.splitlines()

    def test_given_unknown_algebra_when_kgroup_then_invalid(self, capsys):
        code, report = run(capsys, "kgroup", "nowhere")

        assert code == ExitCode.INVALID
        assert report is None

    def test_given_projective_action_when_kgroup_then_indeterminate(self, capsys, tmp_path):
        document = {
            "format": 1,
            "groups": {"V4": {"mul_table": [list(row) for row in KLEIN_TABLE]}},
            "algebras": {
                "C": {"kind": "complex", "group": "V4"},
                "M2": {
                    "kind": "matrix",
                    "base": "C",
                    "n": 2,
                    "gamma": [
                        [[1, 0], [0, 1]],
                        [[0, 1], [1, 0]],
                        [[1, 0], [0, -1]],
                        [[0, -1], [1, 0]],
                    ],
                },
            },
        }
        path = tmp_path / "pauli.json"
        path.write_text(json.dumps(document))

        code, report = run(capsys, "kgroup", "M2", workspace=path)

        assert code == ExitCode.INDETERMINATE
        assert "projective" in report["indeterminate"]

    def test_given_word_when_product_with_extras_then_ast_and_certificates(self, capsys):
        code, report = run(capsys, "product", "p", "--dump-ast", "--emit-certificate")

        assert code == ExitCode.OK
        assert report["target"] == "M2"
        assert report["ast"]["kind"] == "hom"
        assert len(report["certificates"]) == 1
        assert "key" in report["class"]

    def test_given_workspace_word_name_when_product_then_its_text_is_used(self, capsys):
        code, report = run(capsys, "product", "rotate")

        assert code == ExitCode.OK
        assert report["word"] == "p - q"

    def test_given_ill_typed_word_when_product_then_invalid(self, capsys):
        code, _ = run(capsys, "product", "p . p")

        assert code == ExitCode.INVALID

    def test_given_homotopic_words_when_equiv_with_certificate_then_witness(self, capsys):
        code, report = run(capsys, "equiv", "p", "q", "--emit-certificate")

        assert code == ExitCode.OK
        assert report["verdict"] == "equal"
        assert "moves" in report["witness"]

    def test_given_flipped_projections_when_equiv_then_not_equal(self, capsys):
        code, report = run(capsys, "equiv", "pf", "qf")

        assert code == ExitCode.OK
        assert report["verdict"] == "not-equal"
        assert "witness" not in report

    def test_given_sample_workspace_when_fuzzing_then_ok(self, capsys):
        code, report = run(capsys, "fuzz-relations", "--count", "2", "--seed", "5")

        assert code == ExitCode.OK
        assert report["passed"] is True
        assert report["seed"] == 5

    def test_given_injected_fault_when_fuzzing_then_internal_failure(self, capsys):
        code, report = run(capsys, "fuzz-relations", "--count", "10", "--inject-fault")

        assert code == ExitCode.INTERNAL
        assert report["mismatches"]

    def test_given_missing_file_when_validate_then_invalid(self, capsys, tmp_path):
        code, _ = run(capsys, "validate", workspace=tmp_path / "missing.json")

        assert code == ExitCode.INVALID

    def test_given_dimension_limit_in_environment_when_validate_then_invalid(
        self, capsys, monkeypatch: pytest.MonkeyPatch
    ):
        monkeypatch.setenv("GKCALC_MAX_DIM", "4")

        code, _ = run(capsys, "validate")

        assert code == ExitCode.INVALID

    def test_given_bad_environment_when_run_then_invalid_and_message(
        self, capsys, monkeypatch: pytest.MonkeyPatch
    ):
        monkeypatch.setenv("GKCALC_MAX_DIM", "many")

        code = main(["validate", "--workspace", str(WORKSPACE_PATH)])

        assert code == ExitCode.INVALID
        assert "GKCALC_MAX_DIM" in capsys.readouterr().err

    def test_given_bad_log_level_option_when_run_then_invalid(self, capsys):
        code = main(["validate", "--workspace", str(WORKSPACE_PATH), "--log-level", "loud"])

        assert code == ExitCode.INVALID
        assert "logging level" in capsys.readouterr().err

    def test_given_no_subcommand_when_parsed_then_usage_error(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])
