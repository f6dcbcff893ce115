"""AST lowering to three-address IR.

Each method body flattens to a straight-line instruction sequence; a use
of a local links to its most recent textual definition, so the def-use
graph is a DAG over SSA-style value ids. Control constructs contribute
only the values their conditions consume. Single-producer right-hand
sides fuse with the binding (``a = 1`` is one ConstLoad, not
ConstLoad+Assign), matching compact bytecode-style lowering.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..ir import InstructionKind as K
from ..ir import IrInstruction, IrMethod, UNKNOWN_TYPE
from ..registry import ApiRegistry
from . import nodes as n

__all__ = ["lower_unit"]


@dataclass
class _UnitCtx:
    registry: ApiRegistry
    imports: dict[str, str] = field(default_factory=dict)  # simple -> fqn
    local_types: set[str] = field(default_factory=set)  # classes declared here


class _MethodLowerer:
    def __init__(self, ctx: _UnitCtx, class_path: tuple[str, ...], name: str,
                 anon_namer=None, supertypes: frozenset[str] = frozenset()):
        self.ctx = ctx
        self.supertypes = supertypes
        self.path = class_path + (name,)
        self.instructions: list[IrInstruction] = []
        self.env: dict[str, int] = {}
        self.var_types: dict[str, str] = {}
        self.constants: Counter = Counter()
        self.sec_names: set[str] = set()
        self.uses_unknown = False
        # anonymous classes discovered while lowering this body
        self.pending_classes: list[tuple[tuple[str, ...], n.ClassDecl]] = []
        self.anon_namer = anon_namer or (lambda: "$anon1")

    # -- emission --------------------------------------------------------

    def emit(self, kind: K, uses: set[int], defines: bool, detail: str = "") -> int | None:
        iid = len(self.instructions)
        self.instructions.append(
            IrInstruction(
                id=iid,
                kind=kind,
                uses=frozenset(u for u in uses if u is not None),
                defines=iid if defines else None,
                detail=detail,
            )
        )
        return iid if defines else None

    def finish(self) -> IrMethod:
        return IrMethod(
            qualified_path=self.path,
            instructions=self.instructions,
            constants=self.constants,
            security_method_names=frozenset(self.sec_names),
            uses_unknown_types=self.uses_unknown,
            declared_supertypes=self.supertypes,
        )

    # -- type and security bookkeeping ------------------------------------

    def _static_type(self, expr) -> str | None:
        if isinstance(expr, n.Name):
            return self.var_types.get(expr.ident)
        if isinstance(expr, n.New):
            return expr.type_name.rsplit(".", 1)[-1]
        if isinstance(expr, n.Cast):
            return expr.type_name.replace("[]", "").rsplit(".", 1)[-1]
        return None

    def _note_security_call(self, type_name: str | None, method: str) -> None:
        if type_name is None or method == "<init>":
            return
        base = type_name.replace("[]", "")
        simple = base.rsplit(".", 1)[-1]
        if simple in self.ctx.local_types:
            return
        reg = self.ctx.registry
        if "." in base:
            classes = [c for c in [reg.by_fqn(base)] if c is not None]
        elif simple in self.ctx.imports:
            classes = [c for c in [reg.by_fqn(self.ctx.imports[simple])] if c is not None]
        else:
            classes = reg.candidates(simple)
        for cls in classes:
            if (
                cls.security
                and not reg.is_blacklisted(cls.package)
                and method in cls.methods
            ):
                self.sec_names.add(method)
                return

    # -- expressions -------------------------------------------------------

    def lower_expr(self, expr) -> int | None:
        if expr is None:
            return None
        if isinstance(expr, n.Literal):
            return self._lower_literal(expr)
        if isinstance(expr, n.Name):
            vid = self.env.get(expr.ident)
            if vid is None and expr.ident not in self.var_types:
                self.uses_unknown = True
            return vid
        if isinstance(expr, (n.This, n.Super)):
            return None
        if isinstance(expr, n.TypeName):
            # bare type mention in value position: unresolved static ref
            self.uses_unknown = True
            return None
        if isinstance(expr, n.FieldAccess):
            return self._lower_field_get(expr)
        if isinstance(expr, n.Call):
            return self._lower_call(expr)
        if isinstance(expr, n.New):
            return self._lower_new(expr)
        if isinstance(expr, n.NewArray):
            return self._lower_new_array(expr)
        if isinstance(expr, n.ArrayInit):
            return self._lower_array_init(expr.elements)
        if isinstance(expr, n.Index):
            arr = self.lower_expr(expr.array)
            idx = self.lower_expr(expr.index)
            return self.emit(K.ARRAY_LOAD, {arr, idx}, True)
        if isinstance(expr, n.Binary):
            left = self.lower_expr(expr.left)
            right = self.lower_expr(expr.right)
            kind = K.COMPARE if expr.op in ("==", "!=", "<", ">", "<=", ">=") else K.BINARY_OP
            return self.emit(kind, {left, right}, True, expr.op)
        if isinstance(expr, n.Unary):
            return self._lower_unary(expr)
        if isinstance(expr, n.Assign):
            return self._lower_assign(expr)
        if isinstance(expr, n.Cast):
            v = self.lower_expr(expr.expr)
            return self.emit(K.CAST, {v}, True, expr.type_name)
        if isinstance(expr, n.Ternary):
            self.lower_expr(expr.cond)
            a = self.lower_expr(expr.then)
            b = self.lower_expr(expr.other)
            return self.emit(K.ASSIGN, {a, b}, True, "?:")
        if isinstance(expr, n.InstanceOf):
            v = self.lower_expr(expr.expr)
            return self.emit(K.COMPARE, {v}, True, f"instanceof {expr.type_name}")
        raise TypeError(f"unhandled expression node {type(expr).__name__}")

    def _lower_literal(self, lit: n.Literal) -> int | None:
        if lit.kind in ("int", "float", "string", "char"):
            self.constants[lit.text] += 1
        return self.emit(K.CONST_LOAD, set(), True, lit.text)

    def _lower_field_get(self, expr: n.FieldAccess) -> int | None:
        if isinstance(expr.target, n.TypeName):
            return self.emit(K.FIELD_GET, set(), True, f"{expr.target.dotted}.{expr.name}")
        recv = self.lower_expr(expr.target)
        return self.emit(K.FIELD_GET, {recv}, True, expr.name)

    def _lower_call(self, expr: n.Call) -> int | None:
        args = {self.lower_expr(a) for a in expr.args}
        target = expr.target
        if isinstance(target, n.Name) and (
            target.ident[0].isupper()
            and target.ident not in self.env
            and target.ident not in self.var_types
        ):
            # capitalized bare name with no local binding: a missing
            # class, so the call is read as static
            target = n.TypeName(dotted=target.ident)
        if isinstance(target, n.TypeName):
            self._note_security_call(target.dotted, expr.method)
            simple = target.simple
            detail = expr.method
            if (
                simple not in self.ctx.local_types
                and simple not in self.ctx.imports
                and not self.ctx.registry.candidates(simple)
            ):
                self.uses_unknown = True
                detail = f"{UNKNOWN_TYPE}.{expr.method}"
            return self.emit(K.INVOKE_STATIC, args, True, detail)
        if isinstance(target, n.Super) or target is None:
            kind = K.INVOKE_CONSTRUCTOR if expr.method == "<init>" else K.INVOKE_VIRTUAL
            return self.emit(kind, args, True, expr.method)
        recv = self.lower_expr(target)
        self._note_security_call(self._static_type(target), expr.method)
        uses = set(args)
        uses.add(recv)
        return self.emit(K.INVOKE_VIRTUAL, uses, True, expr.method)

    def _lower_new(self, expr: n.New) -> int | None:
        obj = self.emit(K.NEW_OBJECT, set(), True, expr.type_name)
        args = {self.lower_expr(a) for a in expr.args}
        args.add(obj)
        self.emit(K.INVOKE_CONSTRUCTOR, args, False, "<init>")
        if expr.anon_body is not None:
            decl = n.ClassDecl(
                name=self.anon_namer(),
                kind="class",
                supertypes=[expr.type_name],
                members=expr.anon_body,
            )
            self.pending_classes.append((self.path[:-1], decl))
        return obj

    def _lower_new_array(self, expr: n.NewArray) -> int | None:
        dims = {self.lower_expr(d) for d in expr.dims}
        arr = self.emit(K.ARRAY_NEW, dims, True, expr.type_name)
        if expr.init is not None:
            for elem in expr.init:
                v = self.lower_expr(elem)
                self.emit(K.ARRAY_STORE, {arr, v}, False)
        return arr

    def _lower_array_init(self, elements: list) -> int | None:
        arr = self.emit(K.ARRAY_NEW, set(), True, "")
        for elem in elements:
            v = self.lower_expr(elem)
            self.emit(K.ARRAY_STORE, {arr, v}, False)
        return arr

    def _lower_unary(self, expr: n.Unary) -> int | None:
        if expr.op in ("++", "--"):
            if isinstance(expr.operand, n.Name):
                name = expr.operand.ident
                vid = self.emit(K.BINARY_OP, {self.env.get(name)}, True, expr.op)
                self.env[name] = vid
                return vid
            v = self.lower_expr(expr.operand)
            return self.emit(K.BINARY_OP, {v}, True, expr.op)
        v = self.lower_expr(expr.operand)
        kind = K.COMPARE if expr.op == "!" else K.BINARY_OP
        return self.emit(kind, {v}, True, expr.op)

    def _lower_assign(self, expr: n.Assign) -> int | None:
        target = expr.target
        if expr.op != "=":
            # compound: read-modify-write
            op = expr.op[:-1]
            if isinstance(target, n.Name):
                rhs = self.lower_expr(expr.value)
                vid = self.emit(K.BINARY_OP, {self.env.get(target.ident), rhs}, True, op)
                self.env[target.ident] = vid
                return vid
            current = self.lower_expr(target)
            rhs = self.lower_expr(expr.value)
            combined = self.emit(K.BINARY_OP, {current, rhs}, True, op)
            self._store_to(target, combined, already_lowered_target=True)
            return combined
        rhs_vid = self._lower_binding_rhs(expr.value)
        self._store_to(target, rhs_vid)
        return rhs_vid

    def _lower_binding_rhs(self, value) -> int | None:
        """Lower a right-hand side, fusing single-producer results with
        the binding instead of emitting a copy."""
        before = len(self.instructions)
        vid = self.lower_expr(value)
        produced = len(self.instructions) > before
        if produced and vid is not None:
            return vid
        # plain copy (x = y) or unknown value: explicit Assign node
        return self.emit(K.ASSIGN, {vid} if vid is not None else set(), True)

    def _store_to(self, target, vid: int | None, already_lowered_target: bool = False) -> None:
        if isinstance(target, n.Name):
            if vid is not None:
                self.env[target.ident] = vid
            return
        if isinstance(target, n.FieldAccess):
            if isinstance(target.target, n.TypeName):
                self.emit(K.FIELD_PUT, {vid}, False, target.name)
            else:
                recv = None if already_lowered_target else self.lower_expr(target.target)
                self.emit(K.FIELD_PUT, {recv, vid}, False, target.name)
            return
        if isinstance(target, n.Index):
            if already_lowered_target:
                self.emit(K.ARRAY_STORE, {vid}, False)
            else:
                arr = self.lower_expr(target.array)
                idx = self.lower_expr(target.index)
                self.emit(K.ARRAY_STORE, {arr, idx, vid}, False)
            return
        # anything else (casted lvalues etc.): treat as opaque store
        self.emit(K.ASSIGN, {vid} if vid is not None else set(), True)

    # -- statements ---------------------------------------------------------

    def lower_stmt(self, stmt) -> None:
        if stmt is None or isinstance(stmt, (n.Empty, n.Break, n.Continue)):
            return
        if isinstance(stmt, n.Block):
            for s in stmt.statements:
                self.lower_stmt(s)
            return
        if isinstance(stmt, n.LocalVarDecl):
            base = stmt.type_name.replace("[]", "").rsplit(".", 1)[-1]
            for name, init in stmt.declarators:
                self.var_types[name] = base
                if init is not None:
                    vid = self._lower_binding_rhs(init)
                    if vid is not None:
                        self.env[name] = vid
            return
        if isinstance(stmt, n.ExprStmt):
            self.lower_expr(stmt.expr)
            return
        if isinstance(stmt, n.If):
            self.lower_expr(stmt.cond)
            self.lower_stmt(stmt.then)
            self.lower_stmt(stmt.other)
            return
        if isinstance(stmt, n.While):
            self.lower_expr(stmt.cond)
            self.lower_stmt(stmt.body)
            return
        if isinstance(stmt, n.DoWhile):
            self.lower_stmt(stmt.body)
            self.lower_expr(stmt.cond)
            return
        if isinstance(stmt, n.For):
            for s in stmt.init:
                self.lower_stmt(s)
            self.lower_expr(stmt.cond)
            self.lower_stmt(stmt.body)
            for e in stmt.update:
                self.lower_expr(e)
            return
        if isinstance(stmt, n.ForEach):
            it = self.lower_expr(stmt.iterable)
            self.var_types[stmt.var] = stmt.type_name.replace("[]", "").rsplit(".", 1)[-1]
            vid = self.emit(K.ASSIGN, {it}, True, "for-each")
            self.env[stmt.var] = vid
            return
        if isinstance(stmt, n.Try):
            self.lower_stmt(stmt.body)
            for ex_type, var, handler in stmt.catches:
                self.var_types[var] = ex_type.replace("[]", "").rsplit(".", 1)[-1]
                self.lower_stmt(handler)
            if stmt.finally_block is not None:
                self.lower_stmt(stmt.finally_block)
            return
        if isinstance(stmt, n.Return):
            v = self.lower_expr(stmt.value)
            self.emit(K.RETURN, {v} if v is not None else set(), False)
            return
        if isinstance(stmt, n.Throw):
            v = self.lower_expr(stmt.value)
            self.emit(K.THROW, {v} if v is not None else set(), False)
            return
        if isinstance(stmt, n.Switch):
            self.lower_expr(stmt.selector)
            for _labels, stmts in stmt.cases:
                for s in stmts:
                    self.lower_stmt(s)
            return
        if isinstance(stmt, n.LocalClass):
            self.pending_classes.append((self.path[:-1], stmt.decl))
            return
        raise TypeError(f"unhandled statement node {type(stmt).__name__}")


def lower_unit(unit: n.Unit, registry: ApiRegistry) -> list[IrMethod]:
    """Lower every method of every (nested, anonymous, local) class."""
    ctx = _UnitCtx(registry=registry)
    for imp in unit.imports:
        if not imp.wildcard and not imp.static:
            ctx.imports[imp.path.rsplit(".", 1)[-1]] = imp.path

    def collect_names(decl: n.ClassDecl) -> None:
        ctx.local_types.add(decl.name)
        for m in decl.members:
            if isinstance(m, n.ClassDecl):
                collect_names(m)

    for decl in unit.types:
        collect_names(decl)

    methods: list[IrMethod] = []

    def lower_class(class_path: tuple[str, ...], decl: n.ClassDecl) -> None:
        path = class_path + (decl.name,)
        supers = frozenset(s.rsplit(".", 1)[-1] for s in decl.supertypes)
        field_inits: list[tuple[str, object]] = []
        queue: list[tuple[tuple[str, ...], n.ClassDecl]] = []
        anon_counter = [0]

        def next_anon() -> str:
            anon_counter[0] += 1
            return f"$anon{anon_counter[0]}"

        def make_lowerer(name: str) -> _MethodLowerer:
            return _MethodLowerer(ctx, path, name, next_anon, supers)

        for member in decl.members:
            items = member if isinstance(member, list) else [member]
            for m in items:
                if isinstance(m, n.FieldDecl):
                    if m.init is not None:
                        field_inits.append((m.name, m.init))
                elif isinstance(m, n.MethodDecl):
                    if m.body is None:
                        continue
                    low = make_lowerer(m.name)
                    for ptype, pname in m.params:
                        low.var_types[pname] = ptype.replace("[]", "").rsplit(".", 1)[-1]
                    low.lower_stmt(m.body)
                    methods.append(low.finish())
                    queue.extend(low.pending_classes)
                elif isinstance(m, n.InitBlock):
                    low = make_lowerer("$staticinit" if m.static else "$init")
                    low.lower_stmt(m.body)
                    methods.append(low.finish())
                    queue.extend(low.pending_classes)
                elif isinstance(m, n.ClassDecl):
                    queue.append((path, m))
        if field_inits:
            low = make_lowerer("<fieldinit>")
            for fname, init in field_inits:
                vid = low._lower_binding_rhs(init)
                if vid is not None:
                    low.env[fname] = vid
            methods.append(low.finish())
            queue.extend(low.pending_classes)
        for sub_path, sub in queue:
            lower_class(sub_path, sub)

    for decl in unit.types:
        lower_class((), decl)
    return methods
