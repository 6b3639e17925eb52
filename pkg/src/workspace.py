# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Workspace files: the registry of groups, algebras and maps that words refer to.

A workspace is a JSON document. It is checked against `WORKSPACE_JSON_SCHEMA`
first, then every object is built in declaration order and validated, so an
error always points at the node that broke it.

Example:
```json
{
    "format": 1,
    "groups": {"Z2": {"cyclic": 2}},
    "algebras": {
        "C": {"kind": "complex", "group": "Z2"},
        "M2": {"kind": "matrix", "base": "C", "n": 2}
    },
    "homs": {"p": {"source": "C", "target": "M2", "matrix": [["1"], ["0"], ["0"], ["0"]]}},
    "words": {"w": "p"}
}
```
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, Union

from cryptography.hazmat.primitives import hashes
from jsonschema import exceptions, validate
from sympy.polys.matrices import DomainMatrix

from algebra import (
    CornerEmbedding,
    FiniteGroup,
    GAlgebra,
    GHom,
    PathHom,
    Presentation,
    SplitExactSequence,
    complex_algebra,
    corner_embedding,
    cyclic_group,
    direct_sum,
    is_complex_algebra,
    make_algebra,
    make_hom,
    make_matrix_algebra,
    trivial_group,
)
from ktheory import averaging_embedding
from linalg import PATH_DOMAIN, GKCalcError, K, ScalarFormatError, parse_path, to_scalar
from words import (
    CornerInvLetter,
    Gen,
    HomLetter,
    IdentityLetter,
    Neg,
    Plus,
    RewriteContext,
    SplitLetter,
    Word,
    parse,
)

logger = logging.getLogger(__name__)

# Increment when the layout of workspace files changes incompatibly
FORMAT_API = 1

# Increment on compatible additions, reset to 0 when FORMAT_API changes
FORMAT_PATCH = 0

DEFAULT_MAX_DIM = 64

_NAME = {"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_]*$", "not": {"enum": ["delta", "id"]}}
_SCALAR = {"type": ["string", "integer"]}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _SCALAR}}
_MATRICES = {"type": "array", "items": _MATRIX}
_PATH_SCALAR = {
    "type": "array",
    "items": {
        "type": "array",
        "prefixItems": [
            {"type": "integer", "minimum": 0},
            {"type": "integer", "minimum": 0},
            _SCALAR,
        ],
        "minItems": 3,
        "maxItems": 3,
    },
}

WORKSPACE_JSON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "title": "gkcalc workspace",
    "description": "Groups, algebras, equivariant maps and words of one computation.",
    "properties": {
        "format": {"type": "integer"},
        "groups": {
            "type": "object",
            "propertyNames": _NAME,
            "additionalProperties": {
                "type": "object",
                "oneOf": [
                    {
                        "properties": {"cyclic": {"type": "integer", "minimum": 1}},
                        "required": ["cyclic"],
                    },
                    {
                        "properties": {
                            "mul_table": {
                                "type": "array",
                                "items": {"type": "array", "items": {"type": "integer"}},
                            }
                        },
                        "required": ["mul_table"],
                    },
                ],
            },
        },
        "algebras": {
            "type": "object",
            "propertyNames": _NAME,
            "additionalProperties": {
                "type": "object",
                "properties": {
                    "kind": {"enum": ["complex", "matrix", "direct_sum", "explicit"]},
                    "group": {"type": "string"},
                    "base": {"type": "string"},
                    "n": {"type": "integer", "minimum": 1},
                    "gamma": _MATRICES,
                    "left": {"type": "string"},
                    "right": {"type": "string"},
                    "basis": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    "products": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "properties": {
                                "left": {"type": "string"},
                                "right": {"type": "string"},
                                "result": {"type": "object", "additionalProperties": _SCALAR},
                            },
                            "required": ["left", "right", "result"],
                        },
                    },
                    "action": _MATRICES,
                    "unit": {"type": "array", "items": _SCALAR},
                    "presentation": {
                        "type": "object",
                        "properties": {
                            "blocks": {
                                "type": "array",
                                "items": {"type": "integer", "minimum": 1},
                            },
                            "iso": _MATRIX,
                            "implementing": {"type": "array", "items": _MATRICES},
                        },
                        "required": ["blocks", "iso"],
                    },
                },
                "required": ["kind"],
            },
        },
        "homs": {
            "type": "object",
            "propertyNames": _NAME,
            "additionalProperties": {
                "type": "object",
                "properties": {
                    "source": {"type": "string"},
                    "target": {"type": "string"},
                    "matrix": _MATRIX,
                },
                "required": ["source", "target", "matrix"],
            },
        },
        "corners": {
            "type": "object",
            "propertyNames": _NAME,
            "additionalProperties": {
                "type": "object",
                "properties": {
                    "base": {"type": "string"},
                    "n": {"type": "integer", "minimum": 1},
                    "gamma": _MATRICES,
                    "averaging": {"type": "boolean"},
                },
                "required": ["base"],
            },
        },
        "splits": {
            "type": "object",
            "propertyNames": _NAME,
            "additionalProperties": {
                "type": "object",
                "properties": {
                    "ideal_map": {"type": "string"},
                    "quotient_map": {"type": "string"},
                    "split": {"type": "string"},
                },
                "required": ["ideal_map", "quotient_map", "split"],
            },
        },
        "homotopies": {
            "type": "object",
            "propertyNames": _NAME,
            "additionalProperties": {
                "type": "object",
                "properties": {
                    "source": {"type": "string"},
                    "target": {"type": "string"},
                    "matrix": {"type": "array", "items": {"type": "array", "items": _PATH_SCALAR}},
                },
                "required": ["source", "target", "matrix"],
            },
        },
        "words": {"type": "object", "additionalProperties": {"type": "string"}},
    },
    "required": ["format", "algebras"],
    "additionalProperties": False,
}


class WorkspaceError(GKCalcError):
    """Raised when a workspace file is malformed or one of its objects is invalid."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


def get_sha256_hex(data: str) -> str:
    """Calculate the hash of the provided data and return the hexadecimal representation."""
    digest = hashes.Hash(hashes.SHA256())
    digest.update(data.encode())
    return digest.finalize().hex()


def canonical_json(data: Any) -> str:
    """JSON text with sorted keys and no whitespace, the input of the digest."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


@dataclass
class Workspace:
    """Every named object of a workspace; resolves the names used in words."""

    groups: dict[str, FiniteGroup] = field(default_factory=dict)
    algebras: dict[str, GAlgebra] = field(default_factory=dict)
    homs: dict[str, GHom] = field(default_factory=dict)
    corners: dict[str, CornerEmbedding] = field(default_factory=dict)
    splits: dict[str, SplitExactSequence] = field(default_factory=dict)
    homotopies: dict[str, PathHom] = field(default_factory=dict)
    words: dict[str, str] = field(default_factory=dict)
    digest: str = ""
    format_version: tuple[int, int] = (FORMAT_API, FORMAT_PATCH)

    def lookup_hom(self, name: str) -> GHom:
        """The homomorphism with the given name."""
        if name in self.homs:
            return self.homs[name]
        raise KeyError(name)

    def lookup_corner(self, name: str) -> CornerEmbedding:
        """The corner embedding with the given name."""
        return self.corners[name]

    def lookup_split(self, name: str) -> SplitExactSequence:
        """The split exact sequence with the given name."""
        return self.splits[name]

    def lookup_algebra(self, name: str) -> GAlgebra:
        """The algebra with the given name."""
        return self.algebras[name]

    def parse_word(self, text: str) -> Word:
        """Parse a word against this workspace."""
        return parse(text, self)

    def origin(self, group: Optional[FiniteGroup] = None) -> GAlgebra:
        """The first complex algebra, optionally the first one over ``group``."""
        for algebra in self.algebras.values():
            if is_complex_algebra(algebra) and (group is None or algebra.group == group):
                return algebra
        raise WorkspaceError("workspace declares no complex algebra", "/algebras")

    def rewrite_context(self) -> RewriteContext:
        """Every split and homotopy of the workspace, for rewriting."""
        return RewriteContext(tuple(self.splits.values()), tuple(self.homotopies.values()))

    def provenance(self) -> dict:
        """Digest and format version of the loaded file."""
        api, patch = self.format_version
        return {"digest": self.digest, "format": f"{api}.{patch}"}


class _Loader:
    def __init__(self, data: dict, max_dim: int):
        self.data = data
        self.max_dim = max_dim
        self.workspace = Workspace()

    def _guard(self, pointer: str, build: Callable[[], Any]) -> Any:
        try:
            return build()
        except WorkspaceError:
            raise
        except KeyError as e:
            raise WorkspaceError(f"unknown name {e}", pointer) from e
        except (GKCalcError, ValueError) as e:
            raise WorkspaceError(str(e), pointer) from e

    def _matrix(self, rows: list, height: int, width: int, pointer: str) -> DomainMatrix:
        if len(rows) != height or any(len(row) != width for row in rows):
            raise WorkspaceError(f"expected a {height}x{width} matrix", pointer)
        try:
            values = [[to_scalar(v) for v in row] for row in rows]
        except ScalarFormatError as e:
            raise WorkspaceError(str(e), pointer) from e
        return DomainMatrix(values, (height, width), K)

    def _matrices(self, items: list, size: int, group: FiniteGroup, pointer: str) -> tuple:
        if len(items) != group.order:
            raise WorkspaceError(f"expected one matrix per element of {group.name}", pointer)
        return tuple(
            self._matrix(m, size, size, f"{pointer}/{g}") for g, m in enumerate(items)
        )

    def _check_dim(self, algebra: GAlgebra, pointer: str) -> GAlgebra:
        if algebra.dim > self.max_dim:
            raise WorkspaceError(
                f"{algebra.name} has dimension {algebra.dim}, the limit is {self.max_dim}", pointer
            )
        return algebra

    def _group(self, name: Optional[str], pointer: str) -> FiniteGroup:
        if name is None:
            return self.workspace.groups.setdefault("1", trivial_group())
        if name not in self.workspace.groups:
            raise WorkspaceError(f"unknown group '{name}'", pointer)
        return self.workspace.groups[name]

    def _algebra(self, name: str, pointer: str) -> GAlgebra:
        if name not in self.workspace.algebras:
            raise WorkspaceError(f"unknown algebra '{name}'", pointer)
        return self.workspace.algebras[name]

    def _hom(self, name: str, pointer: str) -> GHom:
        if name not in self.workspace.homs:
            raise WorkspaceError(f"unknown morphism '{name}'", pointer)
        return self.workspace.homs[name]

    def _register(self, table: dict, name: str, value: Any, pointer: str) -> None:
        ws = self.workspace
        taken = name in ws.homs or name in ws.corners or name in ws.splits or name in ws.homotopies
        if table is not ws.algebras and taken:
            raise WorkspaceError(f"name '{name}' is already used", pointer)
        if name in table:
            raise WorkspaceError(f"name '{name}' is already used", pointer)
        table[name] = value

    def load(self) -> Workspace:
        version = self.data["format"]
        if version != FORMAT_API:
            raise WorkspaceError(
                f"unsupported workspace format {version}, expected {FORMAT_API}", "/format"
            )
        sections = [
            ("groups", self._load_group),
            ("algebras", self._load_algebra),
            ("homs", self._load_hom),
            ("corners", self._load_corner),
            ("splits", self._load_split),
            ("homotopies", self._load_homotopy),
            ("words", self._load_word),
        ]
        for section, build in sections:
            for name, node in self.data.get(section, {}).items():
                build(name, node, f"/{section}/{name}")
        return self.workspace

    def _load_group(self, name: str, node: dict, pointer: str) -> None:
        if "cyclic" in node:
            group = self._guard(pointer, lambda: cyclic_group(node["cyclic"], name))
        else:
            table = tuple(tuple(row) for row in node["mul_table"])
            group = self._guard(pointer, lambda: FiniteGroup(name, table))
        self.workspace.groups[name] = group

    def _load_algebra(self, name: str, node: dict, pointer: str) -> None:
        algebra = self._check_dim(self._build_algebra(name, node, pointer), pointer)
        self._register(self.workspace.algebras, name, algebra, pointer)

    def _load_hom(self, name: str, node: dict, pointer: str) -> None:
        source = self._algebra(node["source"], f"{pointer}/source")
        target = self._algebra(node["target"], f"{pointer}/target")
        matrix = self._matrix(node["matrix"], target.dim, source.dim, f"{pointer}/matrix")
        hom = self._guard(pointer, lambda: make_hom(name, source, target, matrix))
        self._register(self.workspace.homs, name, hom, pointer)

    def _load_corner(self, name: str, node: dict, pointer: str) -> None:
        corner = self._build_corner(name, node, pointer)
        self._check_dim(corner.ambient, pointer)
        self._register(self.workspace.corners, name, corner, pointer)
        self.workspace.homs[name] = corner.embedding
        self.workspace.algebras.setdefault(corner.ambient.name, corner.ambient)

    def _load_split(self, name: str, node: dict, pointer: str) -> None:
        sequence = SplitExactSequence(
            name,
            self._hom(node["ideal_map"], f"{pointer}/ideal_map"),
            self._hom(node["quotient_map"], f"{pointer}/quotient_map"),
            self._hom(node["split"], f"{pointer}/split"),
        )
        self._guard(pointer, sequence.validate)
        self._register(self.workspace.splits, name, sequence, pointer)

    def _load_homotopy(self, name: str, node: dict, pointer: str) -> None:
        homotopy = self._build_homotopy(name, node, pointer)
        self._register(self.workspace.homotopies, name, homotopy, pointer)

    def _load_word(self, name: str, text: str, pointer: str) -> None:
        self._guard(pointer, lambda: parse(text, self.workspace))
        self.workspace.words[name] = text

    def _build_algebra(self, name: str, node: dict, pointer: str) -> GAlgebra:
        kind = node["kind"]
        if kind == "complex":
            group = self._group(node.get("group"), f"{pointer}/group")
            return complex_algebra(group, name)
        if kind == "matrix":
            base = self._algebra(node.get("base", ""), f"{pointer}/base")
            n = node.get("n", 1)
            gamma = None
            if "gamma" in node:
                gamma = self._matrices(node["gamma"], n, base.group, f"{pointer}/gamma")
            return self._guard(pointer, lambda: make_matrix_algebra(n, base, gamma, name))
        if kind == "direct_sum":
            left = self._algebra(node.get("left", ""), f"{pointer}/left")
            right = self._algebra(node.get("right", ""), f"{pointer}/right")
            summed = self._guard(pointer, lambda: direct_sum(left, right, name))
            for hom in summed.inclusions + summed.projections:
                self._register(self.workspace.homs, hom.name, hom, pointer)
            self._register(
                self.workspace.splits, summed.sequence.name, summed.sequence, pointer
            )
            return summed.algebra
        return self._build_explicit(name, node, pointer)

    def _build_explicit(self, name: str, node: dict, pointer: str) -> GAlgebra:
        group = self._group(node.get("group"), f"{pointer}/group")
        labels = node.get("basis")
        if not labels:
            raise WorkspaceError("explicit algebras need a basis", f"{pointer}/basis")
        index = {label: i for i, label in enumerate(labels)}
        dim = len(labels)
        table: dict[tuple[int, int], tuple] = {}
        for p, product in enumerate(node.get("products", [])):
            at = f"{pointer}/products/{p}"
            try:
                key = (index[product["left"]], index[product["right"]])
                terms = tuple(
                    (index[label], to_scalar(value))
                    for label, value in product["result"].items()
                )
            except KeyError as e:
                raise WorkspaceError(f"unknown basis element {e}", at) from e
            except ScalarFormatError as e:
                raise WorkspaceError(str(e), at) from e
            table[key] = tuple((k, v) for k, v in terms if v)
        action = None
        if "action" in node:
            action = self._matrices(node["action"], dim, group, f"{pointer}/action")
        unit = None
        if "unit" in node:
            unit = tuple(
                self._matrix([node["unit"]], 1, dim, f"{pointer}/unit").to_list()[0]
            )
        presentation = None
        if "presentation" in node:
            presentation = self._presentation(node["presentation"], dim, group, pointer)
        return self._guard(
            pointer,
            lambda: make_algebra(name, group, labels, table, action, unit, presentation),
        )

    def _presentation(
        self, node: dict, dim: int, group: FiniteGroup, pointer: str
    ) -> Presentation:
        blocks = tuple(node["blocks"])
        iso = self._matrix(node["iso"], dim, dim, f"{pointer}/presentation/iso")
        implementing = None
        if "implementing" in node:
            if len(node["implementing"]) != len(blocks):
                raise WorkspaceError(
                    "expected implementing matrices for every block",
                    f"{pointer}/presentation/implementing",
                )
            implementing = tuple(
                self._matrices(
                    items, size, group, f"{pointer}/presentation/implementing/{k}"
                )
                for k, (items, size) in enumerate(zip(node["implementing"], blocks))
            )
        return Presentation(blocks, iso, implementing)

    def _build_corner(self, name: str, node: dict, pointer: str) -> CornerEmbedding:
        base = self._algebra(node["base"], f"{pointer}/base")
        if node.get("averaging"):
            return self._guard(pointer, lambda: averaging_embedding(base.group, base, name))
        n = node.get("n", 1)
        gamma = None
        if "gamma" in node:
            gamma = self._matrices(node["gamma"], n, base.group, f"{pointer}/gamma")
        return self._guard(pointer, lambda: corner_embedding(base, n, gamma, name))

    def _build_homotopy(self, name: str, node: dict, pointer: str) -> PathHom:
        source = self._algebra(node["source"], f"{pointer}/source")
        target = self._algebra(node["target"], f"{pointer}/target")
        rows = node["matrix"]
        if len(rows) != target.dim or any(len(row) != source.dim for row in rows):
            raise WorkspaceError(
                f"expected a {target.dim}x{source.dim} matrix", f"{pointer}/matrix"
            )
        try:
            values = [[parse_path(entry) for entry in row] for row in rows]
        except ScalarFormatError as e:
            raise WorkspaceError(str(e), f"{pointer}/matrix") from e
        matrix = DomainMatrix(values, (target.dim, source.dim), PATH_DOMAIN)
        homotopy = PathHom(name, source, target, matrix)
        self._guard(pointer, homotopy.validate)
        return homotopy


def load_workspace(
    source: Union[str, Path, dict], max_dim: int = DEFAULT_MAX_DIM
) -> Workspace:
    """Load, validate and build a workspace.

    Args:
        source: a path to a JSON file, its text, or the already decoded document
        max_dim: largest algebra dimension accepted

    Returns:
        the workspace, with every object validated

    Raises:
        WorkspaceError: on the first invalid node, naming its JSON pointer
    """
    if isinstance(source, Path):
        source = source.read_text()
    if isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as e:
            raise WorkspaceError(f"not valid JSON: {e.msg} at line {e.lineno}") from e
    else:
        data = source
    try:
        validate(instance=data, schema=WORKSPACE_JSON_SCHEMA)
    except exceptions.ValidationError as e:
        pointer = "/" + "/".join(str(part) for part in e.absolute_path)
        raise WorkspaceError(e.message, pointer) from e
    workspace = _Loader(data, max_dim).load()
    workspace.digest = get_sha256_hex(canonical_json(data))
    logger.info(
        "Loaded workspace with %d algebras and %d words, digest %s",
        len(workspace.algebras),
        len(workspace.words),
        workspace.digest,
    )
    return workspace


def dump_word(word: Word) -> dict:
    """The expression tree of a word as JSON-compatible data."""
    if isinstance(word, Gen):
        letter = word.letter
        kinds = {
            HomLetter: "hom",
            CornerInvLetter: "corner-inverse",
            SplitLetter: "split",
            IdentityLetter: "identity",
        }
        return {
            "node": "generator",
            "kind": kinds[type(letter)],
            "name": letter.text(),
            "source": word.source.name,
            "target": word.target.name,
        }
    if isinstance(word, Neg):
        return {"node": "neg", "child": dump_word(word.child)}
    if isinstance(word, Plus):
        return {
            "node": "plus",
            "children": [dump_word(child) for child in word.children],
            "source": word.source.name,
            "target": word.target.name,
        }
    return {"node": "compose", "left": dump_word(word.left), "right": dump_word(word.right)}

