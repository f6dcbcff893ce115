"""Typed three-address IR shared by snippets and target-corpus sources.

The instruction taxonomy is closed: semantic-vector dimensionality in
the clone detector is ``2 * len(InstructionKind)``, so adding a kind is
a format change.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

__all__ = [
    "InstructionKind",
    "IrInstruction",
    "IrMethod",
    "MethodPdg",
    "UNKNOWN_TYPE",
    "method_from_json_dict",
]

# Marker for references the frontend cannot resolve to a declared type.
UNKNOWN_TYPE = "UNKNOWNP.UNKNOWN"


class InstructionKind(str, Enum):
    INVOKE_VIRTUAL = "InvokeVirtual"
    INVOKE_STATIC = "InvokeStatic"
    INVOKE_CONSTRUCTOR = "InvokeConstructor"
    NEW_OBJECT = "NewObject"
    FIELD_GET = "FieldGet"
    FIELD_PUT = "FieldPut"
    ARRAY_NEW = "ArrayNew"
    ARRAY_LOAD = "ArrayLoad"
    ARRAY_STORE = "ArrayStore"
    CONST_LOAD = "ConstLoad"
    BINARY_OP = "BinaryOp"
    COMPARE = "Compare"
    CAST = "Cast"
    ASSIGN = "Assign"
    RETURN = "Return"
    THROW = "Throw"


KIND_ORDER: tuple[InstructionKind, ...] = tuple(InstructionKind)


@dataclass(frozen=True)
class IrInstruction:
    id: int
    kind: InstructionKind
    uses: frozenset[int]
    defines: int | None
    # Free-form descriptor for debugging and fact extraction: the method
    # name for invokes, rendered literal for ConstLoad, field name, etc.
    detail: str = ""

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "uses": sorted(self.uses),
            "defines": self.defines,
        }


@dataclass
class IrMethod:
    qualified_path: tuple[str, ...]
    instructions: list[IrInstruction]
    constants: Counter
    security_method_names: frozenset[str]
    uses_unknown_types: bool = False
    # Simple names of the immediate class's extends/implements clause;
    # feeds the clone detector's candidate-class filter.
    declared_supertypes: frozenset[str] = frozenset()

    @property
    def name(self) -> str:
        return self.qualified_path[-1]

    @property
    def class_path(self) -> tuple[str, ...]:
        return self.qualified_path[:-1]

    @property
    def path_str(self) -> str:
        return "/".join(self.qualified_path)


@dataclass
class MethodPdg:
    method: IrMethod
    edges: list[tuple[int, int]]
    semantic_blocks: list[list[int]] = field(default_factory=list)

    def out_degree(self, node_id: int) -> int:
        return sum(1 for a, _ in self.edges if a == node_id)

    def to_json_dict(self) -> dict:
        return {
            "path": list(self.method.qualified_path),
            "instructions": [i.to_json_dict() for i in self.method.instructions],
            "edges": [list(e) for e in self.edges],
            "constants": sorted(self.method.constants.elements()),
            "sec_methods": sorted(self.method.security_method_names),
            "supertypes": sorted(self.method.declared_supertypes),
        }


def method_from_json_dict(d: dict) -> IrMethod:
    """Rebuild a method from its dump; instruction details are not
    round-tripped (matching never reads them)."""
    instructions = [
        IrInstruction(
            id=i["id"],
            kind=InstructionKind(i["kind"]),
            uses=frozenset(i["uses"]),
            defines=i["defines"],
        )
        for i in d["instructions"]
    ]
    return IrMethod(
        qualified_path=tuple(d["path"]),
        instructions=instructions,
        constants=Counter(d["constants"]),
        security_method_names=frozenset(d["sec_methods"]),
        declared_supertypes=frozenset(d.get("supertypes", [])),
    )
