"""AST for the supported Java-like subset."""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = [
    "ArrayInit", "Assign", "Binary", "Block", "Break", "Call", "Cast",
    "ClassDecl", "Continue", "DoWhile", "Empty", "ExprStmt", "FieldAccess",
    "FieldDecl", "For", "ForEach", "If", "Import", "Index", "InitBlock",
    "InstanceOf", "Literal", "LocalClass", "LocalVarDecl", "MethodDecl",
    "Name", "New", "NewArray", "Return", "Super", "Switch", "Ternary",
    "This", "Throw", "Try", "TypeName", "Unary", "Unit", "While",
]


# --- expressions -----------------------------------------------------------

@dataclass
class Literal:
    kind: str  # int | float | string | char | bool | null
    text: str  # canonical rendering (strings/chars already unescaped)


@dataclass
class Name:
    ident: str


@dataclass
class TypeName:
    """A dotted name used in receiver/static position, e.g. ``Cipher``
    or ``javax.crypto.Cipher``."""
    dotted: str

    @property
    def simple(self) -> str:
        return self.dotted.rsplit(".", 1)[-1]


@dataclass
class This:
    pass


@dataclass
class Super:
    pass


@dataclass
class FieldAccess:
    target: object  # expression or TypeName
    name: str


@dataclass
class Call:
    target: object | None  # expression, TypeName, or None for bare calls
    method: str
    args: list


@dataclass
class New:
    type_name: str
    args: list
    anon_body: list | None = None  # class members for anonymous classes


@dataclass
class NewArray:
    type_name: str
    dims: list  # dimension expressions; may be empty for initializer form
    init: list | None = None


@dataclass
class ArrayInit:
    elements: list


@dataclass
class Index:
    array: object
    index: object


@dataclass
class Binary:
    op: str
    left: object
    right: object


@dataclass
class Unary:
    op: str
    operand: object
    postfix: bool = False


@dataclass
class Assign:
    target: object
    op: str  # "=", "+=", ...
    value: object


@dataclass
class Cast:
    type_name: str
    expr: object


@dataclass
class Ternary:
    cond: object
    then: object
    other: object


@dataclass
class InstanceOf:
    expr: object
    type_name: str


# --- statements ------------------------------------------------------------

@dataclass
class Block:
    statements: list


@dataclass
class LocalVarDecl:
    type_name: str
    declarators: list[tuple[str, object | None]]


@dataclass
class ExprStmt:
    expr: object


@dataclass
class If:
    cond: object
    then: object
    other: object | None


@dataclass
class While:
    cond: object
    body: object


@dataclass
class DoWhile:
    body: object
    cond: object


@dataclass
class For:
    init: list
    cond: object | None
    update: list
    body: object


@dataclass
class ForEach:
    type_name: str
    var: str
    iterable: object
    body: object


@dataclass
class Try:
    body: Block
    catches: list[tuple[str, str, Block]]  # (exception type, var, handler)
    finally_block: Block | None


@dataclass
class Return:
    value: object | None


@dataclass
class Throw:
    value: object


@dataclass
class Break:
    pass


@dataclass
class Continue:
    pass


@dataclass
class Switch:
    selector: object
    cases: list[tuple[list, list]]  # (label exprs or [] for default, stmts)


@dataclass
class Empty:
    pass


@dataclass
class LocalClass:
    decl: "ClassDecl"


# --- declarations ----------------------------------------------------------

@dataclass
class FieldDecl:
    type_name: str
    name: str
    init: object | None


@dataclass
class MethodDecl:
    name: str  # "<init>" for constructors
    return_type: str
    params: list[tuple[str, str]]  # (type, name)
    body: Block | None


@dataclass
class InitBlock:
    static: bool
    body: Block


@dataclass
class ClassDecl:
    name: str
    kind: str  # class | interface | enum
    supertypes: list[str]
    members: list = field(default_factory=list)


@dataclass
class Import:
    path: str
    wildcard: bool = False
    static: bool = False


@dataclass
class Unit:
    package: str | None
    imports: list[Import]
    types: list[ClassDecl]
