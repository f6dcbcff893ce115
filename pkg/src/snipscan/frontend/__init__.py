"""Source front end: partial-snippet completion, parsing, IR lowering."""

from __future__ import annotations

from ..ir import IrMethod
from ..registry import ApiRegistry
from .lowering import lower_unit
from .parser import ParseError, parse_unit
from .wrap import wrap_partial

__all__ = ["CompileRejection", "compile_unit", "try_compile", "wrap_partial"]


class CompileRejection(ValueError):
    """The unit is outside the supported subset; a recorded outcome, not
    a crash: mixed prose, elision markers and exotic syntax land here."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def compile_unit(unit_text: str, registry: ApiRegistry) -> list[IrMethod]:
    """Compile a complete unit to per-method IR or raise CompileRejection."""
    try:
        ast = parse_unit(unit_text)
    except ParseError as exc:
        raise CompileRejection(str(exc)) from exc
    try:
        return lower_unit(ast, registry)
    except (TypeError, RecursionError) as exc:
        raise CompileRejection(f"lowering failed: {exc}") from exc


def try_compile(
    unit_text: str, registry: ApiRegistry
) -> tuple[list[IrMethod] | None, str | None]:
    """compile_unit as a (methods, rejection_reason) pair."""
    try:
        return compile_unit(unit_text, registry), None
    except CompileRejection as exc:
        return None, exc.reason
