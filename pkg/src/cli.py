#!/usr/bin/env python3
# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Command line front-end: validate workspaces, compute K-groups and classes of words."""

import argparse
import enum
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

from algebra import AlgebraError
from fuzz import DEFAULT_COUNT, RelationFuzzer
from ktheory import Verdict, WitnessError, class_of, equiv, kgroup
from levelone import LevelOneError
from linalg import GKCalcError, InternalInvariantError, ScalarFormatError
from normalizer import NormalizationError, Normalizer
from oracle import Indeterminate, OracleInputError
from words import WordError, expand
from workspace import DEFAULT_MAX_DIM, Workspace, WorkspaceError, dump_word, load_workspace

logger = logging.getLogger(__name__)


class ExitCode(enum.IntEnum):
    """Process exit codes."""

    OK = 0
    INDETERMINATE = 1
    INVALID = 2
    INTERNAL = 3


INVALID_INPUT = (
    WorkspaceError,
    WordError,
    AlgebraError,
    ScalarFormatError,
    OracleInputError,
    LevelOneError,
)
INTERNAL_FAILURE = (InternalInvariantError, NormalizationError, WitnessError)


class SettingsError(GKCalcError):
    """Raised when an environment variable holds an unusable value."""


@dataclass(frozen=True)
class Settings:
    """Configuration read from the environment once per run."""

    max_dim: int = DEFAULT_MAX_DIM
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """Read the settings from the environment."""
        environ = os.environ if environ is None else environ
        raw = environ.get("GKCALC_MAX_DIM", str(DEFAULT_MAX_DIM))
        try:
            max_dim = int(raw)
        except ValueError as e:
            raise SettingsError(f"GKCALC_MAX_DIM must be an integer, got '{raw}'") from e
        if max_dim < 1:
            raise SettingsError(f"GKCALC_MAX_DIM must be positive, got {max_dim}")
        log_level = environ.get("GKCALC_LOG_LEVEL", "WARNING").upper()
        if not isinstance(logging.getLevelName(log_level), int):
            raise SettingsError(f"GKCALC_LOG_LEVEL is not a logging level: '{log_level}'")
        return cls(max_dim, log_level)


def render(report: dict, output_format: str) -> str:
    """Serialize a report; both formats are stable under reruns."""
    if output_format == "machine":
        return json.dumps(report, sort_keys=True, indent=2)
    lines: list[str] = []
    _flatten(report, "", lines)
    return "\n".join(lines)


def _flatten(value: object, prefix: str, lines: list[str]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(value[key], f"{prefix}.{key}" if prefix else str(key), lines)
    elif isinstance(value, list) and any(isinstance(item, (dict, list)) for item in value):
        for index, item in enumerate(value):
            _flatten(item, f"{prefix}[{index}]", lines)
    else:
        text = json.dumps(value) if isinstance(value, list) else value
        lines.append(f"{prefix}: {text}")


def _word_text(workspace: Workspace, text: str) -> str:
    """Named words of the workspace may be used in place of their text."""
    return workspace.words.get(text, text)


def cmd_validate(workspace: Workspace, args: argparse.Namespace) -> tuple[ExitCode, dict]:
    """Report the provenance and the dimension of every algebra."""
    report = {
        "valid": True,
        "provenance": workspace.provenance(),
        "algebras": {name: a.dim for name, a in sorted(workspace.algebras.items())},
        "homs": sorted(workspace.homs),
        "corners": sorted(workspace.corners),
        "splits": sorted(workspace.splits),
        "homotopies": sorted(workspace.homotopies),
        "words": sorted(workspace.words),
    }
    return ExitCode.OK, report


def cmd_kgroup(workspace: Workspace, args: argparse.Namespace) -> tuple[ExitCode, dict]:
    """Report the K-group of an algebra and its generators."""
    algebra = workspace.lookup_algebra(args.algebra)
    result = kgroup(algebra)
    if isinstance(result, Indeterminate):
        return ExitCode.INDETERMINATE, {"algebra": algebra.name, "indeterminate": result.reason}
    report = result.as_dict()
    report["summary"] = f"{result.describe()}, {result.rank} generators"
    return ExitCode.OK, report


def cmd_product(workspace: Workspace, args: argparse.Namespace) -> tuple[ExitCode, dict]:
    """Normalize a word and report its class."""
    word = workspace.parse_word(_word_text(workspace, args.word))
    normalizer = Normalizer(record=args.emit_certificate)
    element = normalizer.phi(word)
    klass = class_of(element)
    report: dict = {
        "word": expand(word).text(),
        "source": word.source.name,
        "target": word.target.name,
        "class": klass.as_dict(),
        "element": element.as_dict(),
    }
    if args.dump_ast:
        report["ast"] = dump_word(word)
    if args.emit_certificate:
        certificates = []
        for certificate in normalizer.certificates:
            if not certificate.verify():
                raise InternalInvariantError("a standard form certificate does not verify")
            certificates.append(certificate.as_dict())
        report["certificates"] = certificates
    code = ExitCode.OK if klass.decidable else ExitCode.INDETERMINATE
    return code, report


def cmd_equiv(workspace: Workspace, args: argparse.Namespace) -> tuple[ExitCode, dict]:
    """Compare the classes of two words."""
    left = Normalizer().phi(workspace.parse_word(_word_text(workspace, args.left)))
    right = Normalizer().phi(workspace.parse_word(_word_text(workspace, args.right)))
    result = equiv(left, right, witness=args.emit_certificate)
    report: dict = {"verdict": result.verdict.value}
    if result.reason:
        report["reason"] = result.reason
    if result.witness is not None:
        report["witness"] = result.witness.as_dict()
    if result.verdict is Verdict.INDETERMINATE:
        return ExitCode.INDETERMINATE, report
    return ExitCode.OK, report


def cmd_fuzz_relations(
    workspace: Workspace, args: argparse.Namespace
) -> tuple[ExitCode, dict]:
    """Fuzz the rewriting relations and report mismatches."""
    fuzzer = RelationFuzzer(workspace, args.seed, inject_fault=args.inject_fault)
    report = fuzzer.run(args.count)
    return (ExitCode.OK if report.passed else ExitCode.INTERNAL), report.as_dict()


COMMANDS: dict[str, Callable[[Workspace, argparse.Namespace], tuple[ExitCode, dict]]] = {
    "validate": cmd_validate,
    "kgroup": cmd_kgroup,
    "product": cmd_product,
    "equiv": cmd_equiv,
    "fuzz-relations": cmd_fuzz_relations,
}


def build_parser() -> argparse.ArgumentParser:
    """The argument parser with one subcommand per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workspace", type=Path, required=True, help="workspace JSON file")
    common.add_argument("--format", choices=("text", "machine"), default="text")
    common.add_argument("--log-level", default=None, help="overrides GKCALC_LOG_LEVEL")

    parser = argparse.ArgumentParser(
        prog="gkcalc", description="Normalize morphism words into equivariant K-theory classes."
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("validate", parents=[common], help="load and check a workspace")
    kgroup_parser = commands.add_parser("kgroup", parents=[common], help="K-group of an algebra")
    kgroup_parser.add_argument("algebra")
    product = commands.add_parser("product", parents=[common], help="class of a word from C")
    product.add_argument("word", help="word text or the name of a workspace word")
    product.add_argument("--dump-ast", action="store_true")
    product.add_argument("--emit-certificate", action="store_true")
    equal = commands.add_parser("equiv", parents=[common], help="compare the classes of words")
    equal.add_argument("left")
    equal.add_argument("right")
    equal.add_argument("--emit-certificate", action="store_true", help="add a homotopy witness")
    fuzz = commands.add_parser(
        "fuzz-relations", parents=[common], help="check that rewrites keep classes"
    )
    fuzz.add_argument("--seed", type=int, default=0)
    fuzz.add_argument("--count", type=int, default=DEFAULT_COUNT)
    fuzz.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.from_env()
    except SettingsError as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCode.INVALID
    level = (args.log_level or settings.log_level).upper()
    if not isinstance(logging.getLevelName(level), int):
        print(f"error: --log-level is not a logging level: '{level}'", file=sys.stderr)
        return ExitCode.INVALID
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        workspace = load_workspace(args.workspace, settings.max_dim)
        code, report = COMMANDS[args.command](workspace, args)
    except OSError as e:
        logger.error("Cannot read workspace: %s", e)
        return ExitCode.INVALID
    except KeyError as e:
        logger.error("Unknown name %s", e)
        return ExitCode.INVALID
    except INVALID_INPUT as e:
        logger.error("Validation failed: %s", e)
        return ExitCode.INVALID
    except INTERNAL_FAILURE as e:
        logger.error("Internal invariant breached: %s", e)
        return ExitCode.INTERNAL
    except GKCalcError as e:
        logger.error("Computation failed: %s", e)
        return ExitCode.INTERNAL
    print(render(report, args.format))
    return code


if __name__ == "__main__":  # pragma: nocover
    sys.exit(main())
