"""Recursive-descent parser for the supported Java-like subset.

Covers what forum snippets and plain application sources actually use:
classes (nested, anonymous, local), interfaces, fields, methods,
declarations, assignments, calls, object/array creation, field/array
access, literals, if/else, loops, switch, try/catch/finally, return,
throw. Generics are parsed and discarded; annotations are skipped;
lambdas and the module system are out. Anything outside the subset
raises :class:`ParseError`: callers treat that as a recorded
rejection, not a crash.
"""

from __future__ import annotations

from ..lexing import LexError, Token, java_tokens, strip_comments
from . import nodes as n

__all__ = ["ParseError", "parse_unit"]

_MODIFIERS = {
    "public", "private", "protected", "static", "final", "abstract",
    "synchronized", "native", "transient", "volatile", "strictfp", "default",
}

_PRIMITIVES = {"void", "boolean", "byte", "char", "short", "int", "long", "float", "double"}

_STMT_KEYWORDS = {
    "if", "while", "for", "do", "try", "return", "throw", "break",
    "continue", "switch", "synchronized", "assert", "new", "this", "super",
}

_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="}


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (offset {pos})")
        self.pos = pos


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    # -- token plumbing ------------------------------------------------

    def peek(self, off: int = 0) -> Token | None:
        j = self.i + off
        return self.toks[j] if j < len(self.toks) else None

    def at_punct(self, text: str, off: int = 0) -> bool:
        t = self.peek(off)
        return t is not None and t.kind == "punct" and t.text == text

    def at_ident(self, text: str | None = None, off: int = 0) -> bool:
        t = self.peek(off)
        return t is not None and t.kind == "ident" and (text is None or t.text == text)

    def pos(self) -> int:
        t = self.peek()
        return t.pos if t is not None else (self.toks[-1].pos if self.toks else 0)

    def advance(self) -> Token:
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self.pos())
        self.i += 1
        return t

    def expect_punct(self, text: str) -> Token:
        if not self.at_punct(text):
            got = self.peek()
            raise ParseError(
                f"expected {text!r}, found {got.text if got else 'end of input'!r}",
                self.pos(),
            )
        return self.advance()

    def expect_ident(self) -> Token:
        t = self.peek()
        if t is None or t.kind != "ident":
            raise ParseError("expected identifier", self.pos())
        return self.advance()

    def fail(self, message: str) -> ParseError:
        return ParseError(message, self.pos())

    # -- helpers --------------------------------------------------------

    def skip_annotations(self) -> None:
        while self.at_punct("@"):
            self.advance()
            self.expect_ident()
            while self.at_punct("."):
                self.advance()
                self.expect_ident()
            if self.at_punct("("):
                depth = 0
                while True:
                    t = self.advance()
                    if t.kind == "punct" and t.text == "(":
                        depth += 1
                    elif t.kind == "punct" and t.text == ")":
                        depth -= 1
                        if depth == 0:
                            break

    def skip_modifiers(self) -> None:
        while True:
            self.skip_annotations()
            if self.at_ident() and self.peek().text in _MODIFIERS:
                self.advance()
            else:
                return

    def try_skip_generics(self) -> bool:
        """Skip a ``<...>`` group if one starts here and closes sanely."""
        if not self.at_punct("<"):
            return False
        save = self.i
        depth = 0
        while self.i < len(self.toks):
            t = self.toks[self.i]
            if t.kind == "punct":
                if t.text == "<":
                    depth += 1
                elif t.text in (">", ">>", ">>>"):
                    depth -= t.text.count(">")
                    self.i += 1
                    if depth <= 0:
                        return True
                    continue
                elif t.text in (";", "{", "}", ")", "=", "&&", "||"):
                    break
            self.i += 1
        self.i = save
        return False

    def try_parse_type(self) -> str | None:
        """Parse a type reference; returns the dotted base name with
        ``[]`` suffixes, or None (position restored) if not a type."""
        save = self.i
        t = self.peek()
        if t is None or t.kind != "ident":
            return None
        if t.text in _PRIMITIVES:
            base = self.advance().text
        elif t.text[0].isupper() or self._looks_qualified_type():
            parts = [self.advance().text]
            self.try_skip_generics()
            while self.at_punct(".") and self.at_ident(off=1):
                self.advance()
                parts.append(self.advance().text)
                self.try_skip_generics()
            if not parts[-1][0].isupper():
                self.i = save
                return None
            base = ".".join(parts)
        else:
            return None
        dims = ""
        while self.at_punct("[") and self.at_punct("]", off=1):
            self.advance()
            self.advance()
            dims += "[]"
        return base + dims

    def _looks_qualified_type(self) -> bool:
        """Lowercase head like ``javax`` can still start a type if the
        dotted chain ends in a capitalized segment followed by a
        declarator-ish token."""
        j = self.i
        if not (self.at_ident(off=0) and self.toks[j].text[0].islower()):
            return False
        last_upper = False
        while j < len(self.toks) and self.toks[j].kind == "ident":
            last_upper = self.toks[j].text[0].isupper()
            if j + 1 < len(self.toks) and self.toks[j + 1].kind == "punct" and self.toks[j + 1].text == ".":
                j += 2
            else:
                break
        return last_upper

    # -- compilation unit ------------------------------------------------

    def parse_unit(self) -> n.Unit:
        package = None
        imports: list[n.Import] = []
        types: list[n.ClassDecl] = []
        while self.peek() is not None:
            if self.at_ident("package"):
                self.advance()
                package = self._parse_dotted()
                self.expect_punct(";")
                continue
            if self.at_ident("import"):
                self.advance()
                static = False
                if self.at_ident("static"):
                    static = True
                    self.advance()
                path = self._parse_dotted()
                wildcard = False
                if self.at_punct("."):
                    self.advance()
                    self.expect_punct("*")
                    wildcard = True
                elif path.endswith(".*"):
                    wildcard = True
                    path = path[:-2]
                self.expect_punct(";")
                imports.append(n.Import(path=path, wildcard=wildcard, static=static))
                continue
            if self.at_punct(";"):
                self.advance()
                continue
            types.append(self.parse_class())
        if not types:
            raise self.fail("no type declaration in compilation unit")
        return n.Unit(package=package, imports=imports, types=types)

    def _parse_dotted(self) -> str:
        parts = [self.expect_ident().text]
        while self.at_punct(".") and self.at_ident(off=1):
            self.advance()
            parts.append(self.advance().text)
        return ".".join(parts)

    def parse_class(self) -> n.ClassDecl:
        self.skip_modifiers()
        t = self.peek()
        if t is None or t.kind != "ident" or t.text not in ("class", "interface", "enum"):
            raise self.fail("expected a class, interface or enum declaration")
        kind = self.advance().text
        name = self.expect_ident().text
        self.try_skip_generics()
        supertypes: list[str] = []
        while self.at_ident("extends") or self.at_ident("implements"):
            self.advance()
            while True:
                st = self.try_parse_type()
                if st is None:
                    raise self.fail("expected supertype name")
                supertypes.append(st.replace("[]", ""))
                if self.at_punct(","):
                    self.advance()
                    continue
                break
        self.expect_punct("{")
        members = self.parse_member_list(kind)
        self.expect_punct("}")
        return n.ClassDecl(name=name, kind=kind, supertypes=supertypes, members=members)

    def parse_member_list(self, class_kind: str = "class") -> list:
        members: list = []
        if class_kind == "enum":
            # enum constants: NAME [, NAME]* [;]
            while self.at_ident() and not self.at_punct("(", 1):
                members_name = self.advance().text  # noqa: F841  (constants carry no IR)
                if self.at_punct(","):
                    self.advance()
                    continue
                break
            if self.at_punct(";"):
                self.advance()
        while not self.at_punct("}") and self.peek() is not None:
            members.append(self.parse_member())
        return members

    def parse_member(self):
        self.skip_annotations()
        save = self.i
        self.skip_modifiers()
        if self.at_ident("class") or self.at_ident("interface") or self.at_ident("enum"):
            self.i = save
            return self.parse_class()
        if self.at_punct("{"):  # initializer block (modifiers already eaten)
            was_static = any(
                self.toks[j].kind == "ident" and self.toks[j].text == "static"
                for j in range(save, self.i)
            )
            return n.InitBlock(static=was_static, body=self.parse_block())
        # constructor: Name ( ... )
        if self.at_ident() and self.peek().text[0].isupper() and self.at_punct("(", 1):
            name = self.advance().text
            params = self.parse_params()
            self._skip_throws()
            body = self.parse_block() if self.at_punct("{") else self._expect_semi_none()
            return n.MethodDecl(name="<init>", return_type=name, params=params, body=body)
        ty = self.try_parse_type()
        if ty is None:
            raise self.fail("expected a member declaration")
        self.try_skip_generics()
        name_tok = self.peek()
        if name_tok is None or name_tok.kind != "ident":
            raise self.fail("expected member name")
        name = self.advance().text
        if self.at_punct("("):
            params = self.parse_params()
            self._skip_throws()
            body = self.parse_block() if self.at_punct("{") else self._expect_semi_none()
            return n.MethodDecl(name=name, return_type=ty, params=params, body=body)
        # field declaration, possibly multiple declarators
        fields = []
        while True:
            dims = ""
            while self.at_punct("[") and self.at_punct("]", off=1):
                self.advance()
                self.advance()
                dims += "[]"
            init = None
            if self.at_punct("="):
                self.advance()
                init = self.parse_initializer()
            fields.append(n.FieldDecl(type_name=ty + dims, name=name, init=init))
            if self.at_punct(","):
                self.advance()
                name = self.expect_ident().text
                continue
            break
        self.expect_punct(";")
        return fields if len(fields) > 1 else fields[0]

    def _expect_semi_none(self) -> None:
        self.expect_punct(";")
        return None

    def _skip_throws(self) -> None:
        if self.at_ident("throws"):
            self.advance()
            while True:
                if self.try_parse_type() is None:
                    raise self.fail("expected exception type after 'throws'")
                if self.at_punct(","):
                    self.advance()
                    continue
                break

    def parse_params(self) -> list[tuple[str, str]]:
        self.expect_punct("(")
        params: list[tuple[str, str]] = []
        while not self.at_punct(")"):
            self.skip_annotations()
            if self.at_ident("final"):
                self.advance()
            ty = self.try_parse_type()
            if ty is None:
                raise self.fail("expected parameter type")
            if self.at_punct("..."):
                self.advance()
                ty += "[]"
            pname = self.expect_ident().text
            while self.at_punct("[") and self.at_punct("]", off=1):
                self.advance()
                self.advance()
                ty += "[]"
            params.append((ty, pname))
            if self.at_punct(","):
                self.advance()
        self.expect_punct(")")
        return params

    # -- statements -------------------------------------------------------

    def parse_block(self) -> n.Block:
        self.expect_punct("{")
        stmts = []
        while not self.at_punct("}"):
            if self.peek() is None:
                raise self.fail("unterminated block")
            stmts.append(self.parse_statement())
        self.expect_punct("}")
        return n.Block(statements=stmts)

    def parse_statement(self):
        self.skip_annotations()
        t = self.peek()
        if t is None:
            raise self.fail("expected statement")
        if t.kind == "punct":
            if t.text == "{":
                return self.parse_block()
            if t.text == ";":
                self.advance()
                return n.Empty()
        if t.kind == "ident":
            kw = t.text
            if kw == "if":
                return self._parse_if()
            if kw == "while":
                self.advance()
                self.expect_punct("(")
                cond = self.parse_expression()
                self.expect_punct(")")
                return n.While(cond=cond, body=self.parse_statement())
            if kw == "do":
                self.advance()
                body = self.parse_statement()
                if not self.at_ident("while"):
                    raise self.fail("expected 'while' after do-body")
                self.advance()
                self.expect_punct("(")
                cond = self.parse_expression()
                self.expect_punct(")")
                self.expect_punct(";")
                return n.DoWhile(body=body, cond=cond)
            if kw == "for":
                return self._parse_for()
            if kw == "try":
                return self._parse_try()
            if kw == "switch":
                return self._parse_switch()
            if kw == "return":
                self.advance()
                value = None if self.at_punct(";") else self.parse_expression()
                self.expect_punct(";")
                return n.Return(value=value)
            if kw == "throw":
                self.advance()
                value = self.parse_expression()
                self.expect_punct(";")
                return n.Throw(value=value)
            if kw == "break":
                self.advance()
                if self.at_ident():
                    self.advance()
                self.expect_punct(";")
                return n.Break()
            if kw == "continue":
                self.advance()
                if self.at_ident():
                    self.advance()
                self.expect_punct(";")
                return n.Continue()
            if kw == "synchronized" and self.at_punct("(", 1):
                self.advance()
                self.expect_punct("(")
                self.parse_expression()
                self.expect_punct(")")
                return self.parse_block()
            if kw == "assert":
                self.advance()
                self.parse_expression()
                if self.at_punct(":"):
                    self.advance()
                    self.parse_expression()
                self.expect_punct(";")
                return n.Empty()
            if kw in ("class", "interface", "enum") or (
                kw in _MODIFIERS and self._modifier_leads_to_class()
            ):
                return n.LocalClass(decl=self.parse_class())
            # label:
            if kw not in _STMT_KEYWORDS and self.at_punct(":", 1) and not self.at_punct("::", 1):
                self.advance()
                self.advance()
                return self.parse_statement()
        decl = self._try_parse_local_decl()
        if decl is not None:
            return decl
        expr = self.parse_expression()
        self.expect_punct(";")
        return n.ExprStmt(expr=expr)

    def _modifier_leads_to_class(self) -> bool:
        j = self.i
        while j < len(self.toks) and self.toks[j].kind == "ident" and self.toks[j].text in _MODIFIERS:
            j += 1
        return (
            j < len(self.toks)
            and self.toks[j].kind == "ident"
            and self.toks[j].text in ("class", "interface", "enum")
        )

    def _parse_if(self) -> n.If:
        self.advance()
        self.expect_punct("(")
        cond = self.parse_expression()
        self.expect_punct(")")
        then = self.parse_statement()
        other = None
        if self.at_ident("else"):
            self.advance()
            other = self.parse_statement()
        return n.If(cond=cond, then=then, other=other)

    def _parse_for(self):
        self.advance()
        self.expect_punct("(")
        # enhanced for: Type name : expr
        save = self.i
        if self.at_ident("final"):
            self.advance()
        ty = self.try_parse_type()
        if ty is not None and self.at_ident() and self.at_punct(":", 1):
            var = self.advance().text
            self.advance()  # ':'
            iterable = self.parse_expression()
            self.expect_punct(")")
            return n.ForEach(type_name=ty, var=var, iterable=iterable, body=self.parse_statement())
        self.i = save
        init: list = []
        if not self.at_punct(";"):
            decl = self._try_parse_local_decl(consume_semi=False)
            if decl is not None:
                init.append(decl)
            else:
                init.append(n.ExprStmt(self.parse_expression()))
                while self.at_punct(","):
                    self.advance()
                    init.append(n.ExprStmt(self.parse_expression()))
        self.expect_punct(";")
        cond = None if self.at_punct(";") else self.parse_expression()
        self.expect_punct(";")
        update: list = []
        if not self.at_punct(")"):
            update.append(self.parse_expression())
            while self.at_punct(","):
                self.advance()
                update.append(self.parse_expression())
        self.expect_punct(")")
        return n.For(init=init, cond=cond, update=update, body=self.parse_statement())

    def _parse_try(self) -> n.Try:
        self.advance()
        if self.at_punct("("):  # try-with-resources: resources as decls
            self.advance()
            while not self.at_punct(")"):
                d = self._try_parse_local_decl(consume_semi=False)
                if d is None:
                    self.parse_expression()
                if self.at_punct(";"):
                    self.advance()
            self.expect_punct(")")
        body = self.parse_block()
        catches: list[tuple[str, str, n.Block]] = []
        while self.at_ident("catch"):
            self.advance()
            self.expect_punct("(")
            if self.at_ident("final"):
                self.advance()
            ty = self.try_parse_type()
            if ty is None:
                raise self.fail("expected exception type in catch")
            while self.at_punct("|"):  # multi-catch
                self.advance()
                extra = self.try_parse_type()
                if extra is None:
                    raise self.fail("expected exception type after '|'")
            var = self.expect_ident().text
            self.expect_punct(")")
            catches.append((ty, var, self.parse_block()))
        finally_block = None
        if self.at_ident("finally"):
            self.advance()
            finally_block = self.parse_block()
        if not catches and finally_block is None:
            raise self.fail("try without catch or finally")
        return n.Try(body=body, catches=catches, finally_block=finally_block)

    def _parse_switch(self) -> n.Switch:
        self.advance()
        self.expect_punct("(")
        selector = self.parse_expression()
        self.expect_punct(")")
        self.expect_punct("{")
        cases: list[tuple[list, list]] = []
        labels: list = []
        stmts: list = []
        started = False
        while not self.at_punct("}"):
            if self.at_ident("case") or self.at_ident("default"):
                if started and stmts:
                    cases.append((labels, stmts))
                    labels, stmts = [], []
                started = True
                if self.advance().text == "case":
                    labels.append(self.parse_expression())
                self.expect_punct(":")
                continue
            if not started:
                raise self.fail("statement before first switch case")
            stmts.append(self.parse_statement())
        self.expect_punct("}")
        if started:
            cases.append((labels, stmts))
        return n.Switch(selector=selector, cases=cases)

    def _try_parse_local_decl(self, consume_semi: bool = True) -> n.LocalVarDecl | None:
        save = self.i
        if self.at_ident("final"):
            self.advance()
        ty = self.try_parse_type()
        if ty is None or not self.at_ident():
            self.i = save
            return None
        nxt = self.peek(1)
        if nxt is None or nxt.kind != "punct" or nxt.text not in ("=", ";", ",", "["):
            self.i = save
            return None
        declarators: list[tuple[str, object | None]] = []
        while True:
            name = self.expect_ident().text
            dims = ""
            while self.at_punct("[") and self.at_punct("]", off=1):
                self.advance()
                self.advance()
                dims += "[]"
            init = None
            if self.at_punct("="):
                self.advance()
                init = self.parse_initializer()
            declarators.append((name, init))
            if self.at_punct(","):
                self.advance()
                continue
            break
        if consume_semi:
            self.expect_punct(";")
        return n.LocalVarDecl(type_name=ty, declarators=declarators)

    def parse_initializer(self):
        if self.at_punct("{"):
            return self._parse_array_init()
        return self.parse_expression()

    def _parse_array_init(self) -> n.ArrayInit:
        self.expect_punct("{")
        elements = []
        while not self.at_punct("}"):
            elements.append(self.parse_initializer())
            if self.at_punct(","):
                self.advance()
        self.expect_punct("}")
        return n.ArrayInit(elements=elements)

    # -- expressions -------------------------------------------------------

    def parse_expression(self):
        return self._parse_assignment()

    def _parse_assignment(self):
        left = self._parse_ternary()
        t = self.peek()
        if t is not None and t.kind == "punct" and t.text in _ASSIGN_OPS:
            op = self.advance().text
            value = self._parse_assignment()
            return n.Assign(target=left, op=op, value=value)
        return left

    def _parse_ternary(self):
        cond = self._parse_binary(0)
        if self.at_punct("?"):
            self.advance()
            then = self.parse_expression()
            self.expect_punct(":")
            other = self._parse_ternary()
            return n.Ternary(cond=cond, then=then, other=other)
        return cond

    _PRECEDENCE = [
        ["||"],
        ["&&"],
        ["|"],
        ["^"],
        ["&"],
        ["==", "!="],
        ["<", ">", "<=", ">=", "instanceof"],
        ["<<", ">>", ">>>"],
        ["+", "-"],
        ["*", "/", "%"],
    ]
    _COMPARISON_OPS = {"==", "!=", "<", ">", "<=", ">="}

    def _parse_binary(self, level: int):
        if level >= len(self._PRECEDENCE):
            return self._parse_unary()
        left = self._parse_binary(level + 1)
        ops = self._PRECEDENCE[level]
        while True:
            t = self.peek()
            if t is None:
                return left
            if t.kind == "ident" and t.text == "instanceof" and "instanceof" in ops:
                self.advance()
                ty = self.try_parse_type()
                if ty is None:
                    raise self.fail("expected type after instanceof")
                left = n.InstanceOf(expr=left, type_name=ty)
                continue
            if t.kind == "punct" and t.text in ops:
                # '<' '>' can be generics noise; only treat as operator here
                op = self.advance().text
                right = self._parse_binary(level + 1)
                left = n.Binary(op=op, left=left, right=right)
                continue
            return left

    def _parse_unary(self):
        t = self.peek()
        if t is not None and t.kind == "punct":
            if t.text in ("!", "~", "+", "-"):
                self.advance()
                operand = self._parse_unary()
                if t.text in ("-", "+") and isinstance(operand, n.Literal) and operand.kind in ("int", "float"):
                    if t.text == "-":
                        operand.text = _negate_literal(operand.text)
                    return operand
                return n.Unary(op=t.text, operand=operand)
            if t.text in ("++", "--"):
                self.advance()
                return n.Unary(op=t.text, operand=self._parse_unary())
            if t.text == "(":
                cast = self._try_parse_cast()
                if cast is not None:
                    return cast
        return self._parse_postfix()

    def _try_parse_cast(self) -> n.Cast | None:
        save = self.i
        self.advance()  # '('
        ty = self.try_parse_type()
        if ty is not None and self.at_punct(")"):
            base = ty.replace("[]", "")
            simple = base.rsplit(".", 1)[-1]
            if simple in _PRIMITIVES or simple[0].isupper():
                nxt = self.peek(1)
                if nxt is not None and (
                    nxt.kind in ("ident", "number", "string", "char")
                    or (nxt.kind == "punct" and nxt.text in ("(", "!", "~"))
                ):
                    if not (nxt.kind == "ident" and nxt.text == "instanceof"):
                        self.advance()  # ')'
                        return n.Cast(type_name=ty, expr=self._parse_unary())
        self.i = save
        return None

    def _parse_postfix(self):
        expr = self._parse_primary()
        while True:
            if self.at_punct("."):
                if self.at_ident("new", 1):  # qualified new: unsupported
                    raise self.fail("qualified 'new' is not supported")
                self.advance()
                self.try_skip_generics()
                name = self.expect_ident().text
                if self.at_punct("("):
                    args = self._parse_args()
                    expr = n.Call(target=expr, method=name, args=args)
                else:
                    expr = _promote_field_access(expr, name)
                continue
            if self.at_punct("["):
                self.advance()
                idx = self.parse_expression()
                self.expect_punct("]")
                expr = n.Index(array=expr, index=idx)
                continue
            if self.at_punct("++") or self.at_punct("--"):
                op = self.advance().text
                expr = n.Unary(op=op, operand=expr, postfix=True)
                continue
            return expr

    def _parse_args(self) -> list:
        self.expect_punct("(")
        args = []
        while not self.at_punct(")"):
            args.append(self.parse_expression())
            if self.at_punct(","):
                self.advance()
        self.expect_punct(")")
        return args

    def _parse_primary(self):
        t = self.peek()
        if t is None:
            raise self.fail("expected expression")
        if t.kind == "number":
            self.advance()
            return _number_literal(t.text)
        if t.kind == "string":
            self.advance()
            return n.Literal(kind="string", text=_unescape(t.text[1:-1]))
        if t.kind == "char":
            self.advance()
            return n.Literal(kind="char", text=_unescape(t.text[1:-1]))
        if t.kind == "punct" and t.text == "(":
            self.advance()
            expr = self.parse_expression()
            self.expect_punct(")")
            return expr
        if t.kind == "punct" and t.text == "{":
            return self._parse_array_init()
        if t.kind != "ident":
            raise self.fail(f"unexpected token {t.text!r}")
        if t.text == "true" or t.text == "false":
            self.advance()
            return n.Literal(kind="bool", text=t.text)
        if t.text == "null":
            self.advance()
            return n.Literal(kind="null", text="null")
        if t.text == "this":
            self.advance()
            return n.This()
        if t.text == "super":
            self.advance()
            if self.at_punct("("):
                return n.Call(target=n.Super(), method="<init>", args=self._parse_args())
            return n.Super()
        if t.text == "new":
            return self._parse_new()
        name = self.advance().text
        if self.at_punct("("):
            return n.Call(target=None, method=name, args=self._parse_args())
        return n.Name(ident=name)

    def _parse_new(self):
        self.advance()  # 'new'
        ty = self.try_parse_type()
        if ty is None:
            # primitive arrays like new byte[16] are handled by
            # try_parse_type; reaching here means junk after 'new'
            raise self.fail("expected type after 'new'")
        base = ty.replace("[]", "")
        if ty.endswith("[]"):
            init = None
            if self.at_punct("{"):
                init = self._parse_array_init().elements
            return n.NewArray(type_name=base, dims=[], init=init)
        if self.at_punct("["):
            dims = []
            while self.at_punct("["):
                self.advance()
                if self.at_punct("]"):
                    self.advance()
                    continue
                dims.append(self.parse_expression())
                self.expect_punct("]")
            init = None
            if self.at_punct("{"):
                init = self._parse_array_init().elements
            return n.NewArray(type_name=base, dims=dims, init=init)
        args = self._parse_args() if self.at_punct("(") else []
        anon_body = None
        if self.at_punct("{"):
            self.advance()
            anon_body = self.parse_member_list()
            self.expect_punct("}")
        return n.New(type_name=base, args=args, anon_body=anon_body)


def _promote_field_access(expr, name: str):
    """Fold ``Name.x`` / dotted chains of plain names into TypeName
    receivers where the head looks like a class or package."""
    if isinstance(expr, n.Name) and expr.ident[0].isupper():
        return n.FieldAccess(target=n.TypeName(dotted=expr.ident), name=name)
    if isinstance(expr, n.TypeName):
        return n.FieldAccess(target=expr, name=name)
    if isinstance(expr, n.Name) and name[0].isupper():
        # package prefix: javax . crypto ... keep folding into TypeName
        return n.TypeName(dotted=f"{expr.ident}.{name}")
    if isinstance(expr, n.FieldAccess) and isinstance(expr.target, (n.Name, n.TypeName)):
        # a.b.C pattern: fold lowercase chains
        chain = _dotted_chain(expr)
        if chain is not None and name[0].isupper():
            return n.TypeName(dotted=f"{chain}.{name}")
    return n.FieldAccess(target=expr, name=name)


def _dotted_chain(expr) -> str | None:
    if isinstance(expr, n.Name):
        return expr.ident
    if isinstance(expr, n.FieldAccess):
        head = _dotted_chain(expr.target)
        if head is not None:
            return f"{head}.{expr.name}"
    if isinstance(expr, n.TypeName):
        return expr.dotted
    return None


def _number_literal(text: str) -> n.Literal:
    stripped = text.rstrip("fFdDlL")
    try:
        if stripped.lower().startswith("0x"):
            return n.Literal(kind="int", text=str(int(stripped, 16)))
        if "." in stripped or "e" in stripped.lower() or (
            text != stripped and text[-1] in "fFdD"
        ):
            return n.Literal(kind="float", text=repr(float(stripped)))
        return n.Literal(kind="int", text=str(int(stripped)))
    except ValueError:
        return n.Literal(kind="int", text=stripped or "0")


def _negate_literal(text: str) -> str:
    return text[1:] if text.startswith("-") else "-" + text


_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f",
            "0": "\0", "'": "'", '"': '"', "\\": "\\"}


def _unescape(body: str) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            if nxt == "u" and i + 5 < len(body):
                try:
                    out.append(chr(int(body[i + 2:i + 6], 16)))
                    i += 6
                    continue
                except ValueError:
                    pass
            out.append(_ESCAPES.get(nxt, nxt))
            i += 2
            continue
        out.append(c)
        i += 1
    return "".join(out)


def parse_unit(text: str) -> n.Unit:
    """Parse comment-stripped or raw unit text into an AST."""
    try:
        toks = java_tokens(strip_comments(text))
    except LexError as exc:
        raise ParseError(str(exc), exc.pos) from exc
    return _Parser(toks).parse_unit()
