# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

import json
import logging
import os
import subprocess
import sys
from pathlib import Path

import pytest

logger = logging.getLogger(__name__)

ROOT = Path(__file__).parent.parent.parent
CLI = ROOT / "src" / "cli.py"


@pytest.fixture(scope="module")
def workspace(request: pytest.FixtureRequest) -> str:
    return str(Path(str(request.config.getoption("--workspace"))).resolve())


def gkcalc(*argv: str, **environ: str) -> subprocess.CompletedProcess:
    env = dict(os.environ, PYTHONPATH=str(ROOT / "src"), **environ)
    logger.info("Running gkcalc %s", " ".join(argv))
    return subprocess.run(
        [sys.executable, str(CLI), *argv],
        capture_output=True,
        text=True,
        env=env,
        timeout=600,
    )


def machine(result: subprocess.CompletedProcess) -> dict:
    return json.loads(result.stdout)


def test_given_workspace_when_validate_then_exit_zero(workspace: str):
    result = gkcalc("validate", "--workspace", workspace, "--format", "machine")

    assert result.returncode == 0, result.stderr
    assert machine(result)["valid"] is True


def test_given_reruns_when_product_then_output_is_byte_identical(workspace: str):
    argv = ("product", "split", "--workspace", workspace, "--format", "machine")

    first, second = gkcalc(*argv), gkcalc(*argv)

    assert first.returncode == 0, first.stderr
    assert first.stdout == second.stdout


def test_given_every_named_word_when_compared_with_unit_then_expected_verdicts(workspace: str):
    expected = {"corner": "equal", "split": "equal", "averaged": "equal"}

    for name, verdict in expected.items():
        result = gkcalc(
            "equiv", name, "unit", "--workspace", workspace, "--format", "machine"
        )
        assert result.returncode == 0, result.stderr
        assert machine(result)["verdict"] == verdict


def test_given_rotation_word_when_product_then_class_is_zero(workspace: str):
    result = gkcalc("product", "rotate", "--workspace", workspace, "--format", "machine")

    assert result.returncode == 0, result.stderr
    key = machine(result)["class"]["key"]
    assert all(m == 0 for block in key["multiplicities"] for m in block)


def test_given_injected_fault_when_fuzzing_then_exit_three(workspace: str):
    result = gkcalc(
        "fuzz-relations", "--workspace", workspace, "--count", "10", "--inject-fault"
    )

    assert result.returncode == 3


def test_given_info_level_in_environment_when_run_then_logs_on_stderr(workspace: str):
    result = gkcalc("kgroup", "C", "--workspace", workspace, GKCALC_LOG_LEVEL="INFO")

    assert result.returncode == 0
    assert "K-group of C has rank 2" in result.stderr
