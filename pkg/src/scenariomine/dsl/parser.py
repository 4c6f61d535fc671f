"""Parser for scenario programs.

Accepts the restricted Python subset the synthesis prompt allows: comments,
``name = fn(args)`` assignments with literal/list/keyword arguments, the
higher-order forms ``scenario_not(fn)(args)`` / ``reverse_relationship(fn)(args)``,
and one final ``output_scenario(...)`` call. Everything else (imports,
defs, loops, conditionals, attribute access, arithmetic) is rejected with a
machine-readable diagnostic.
"""

from __future__ import annotations

import ast as pyast
import re

from scenariomine.dsl import nodes as N
from scenariomine.dsl import registry as R

_FENCE_RE = re.compile(r"```(?:python)?\s*\n(.*?)```", re.DOTALL)


def extract_code_block(text: str) -> str:
    """Strip a fenced ``` block from LLM output; pass plain text through."""
    match = _FENCE_RE.search(text)
    return match.group(1) if match else text


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.diagnostics: list[N.Diagnostic] = []

    def fail(self, code, message, node=None, line=0, col=0):
        if node is not None:
            line = getattr(node, "lineno", line)
            col = getattr(node, "col_offset", col)
        self.diagnostics.append(N.Diagnostic(code, message, line, col))

    def parse(self) -> N.Program:
        try:
            module = pyast.parse(self.source)
        except SyntaxError as exc:
            offending = (exc.text or "").strip()
            raise N.ProgramParseError(
                [
                    N.Diagnostic(
                        "syntax-error",
                        f"{exc.msg}" + (f" (offending text: {offending!r})" if offending else ""),
                        exc.lineno or 0,
                        exc.offset or 0,
                    )
                ]
            ) from None
        statements: list[N.Statement] = []
        bound = set(R.PREBOUND_NAMES)
        for stmt in module.body:
            parsed = self._statement(stmt, bound)
            if parsed is not None:
                statements.append(parsed)
                if isinstance(parsed, N.Assignment):
                    bound.add(parsed.target)
        if not self.diagnostics:
            outputs = [s for s in statements if isinstance(s, N.OutputStatement)]
            if len(outputs) != 1:
                self.fail(
                    "output-statement",
                    f"expected exactly one output_scenario statement, found {len(outputs)}",
                    line=getattr(module.body[-1], "lineno", 0) if module.body else 0,
                )
            elif not isinstance(statements[-1], N.OutputStatement):
                self.fail(
                    "output-statement",
                    "output_scenario must be the final statement",
                    line=statements[-1].line,
                )
        if self.diagnostics:
            raise N.ProgramParseError(self.diagnostics)
        return N.Program(tuple(statements))

    def _statement(self, stmt, bound):
        if isinstance(stmt, (pyast.Import, pyast.ImportFrom)):
            self.fail("forbidden-construct", "imports not allowed", stmt)
            return None
        if isinstance(stmt, pyast.Assign):
            if len(stmt.targets) != 1 or not isinstance(stmt.targets[0], pyast.Name):
                self.fail("bad-assignment", "assignment target must be a single name", stmt)
                return None
            call = self._call(stmt.value, bound)
            if call is None:
                return None
            if call.callee.name == "output_scenario" and call.callee.wrapper is None:
                self.fail("bad-assignment", "output_scenario result cannot be assigned", stmt)
                return None
            return N.Assignment(stmt.targets[0].id, call, stmt.lineno)
        if isinstance(stmt, pyast.Expr):
            call = self._call(stmt.value, bound)
            if call is None:
                return None
            if call.callee.wrapper is None and call.callee.name == "output_scenario":
                return N.OutputStatement(call, stmt.lineno)
            self.fail(
                "bare-call",
                "only output_scenario may appear as a bare statement",
                stmt,
            )
            return None
        label = type(stmt).__name__
        names = {
            "FunctionDef": "function definitions not allowed",
            "AsyncFunctionDef": "function definitions not allowed",
            "For": "loops not allowed",
            "While": "loops not allowed",
            "If": "conditionals not allowed",
            "ClassDef": "class definitions not allowed",
        }
        self.fail("forbidden-construct", names.get(label, f"{label} statements not allowed"), stmt)
        return None

    def _call(self, expr, bound) -> N.CallExpr | None:
        if not isinstance(expr, pyast.Call):
            self.fail(
                "expected-call",
                f"expected a function call, got {type(expr).__name__}",
                expr,
            )
            return None
        callee = self._callee(expr, bound)
        if callee is None:
            return None
        args = []
        for arg in expr.args:
            parsed = self._arg(arg, bound)
            if parsed is None:
                return None
            args.append(parsed)
        kwargs = []
        for kw in expr.keywords:
            if kw.arg is None:
                self.fail("forbidden-construct", "** argument expansion not allowed", expr)
                return None
            parsed = self._arg(kw.value, bound)
            if parsed is None:
                return None
            kwargs.append((kw.arg, parsed))
        return N.CallExpr(callee, tuple(args), tuple(kwargs))

    def _callee(self, call, bound) -> N.Callee | None:
        func = call.func
        if isinstance(func, pyast.Name):
            name = func.id
            if name in R.WRAPPERS:
                self.fail(
                    "wrapper-usage",
                    f"{name}(fn) must be applied immediately: {name}(fn)(args)",
                    call,
                )
                return None
            if name not in R.ALL_FUNCTIONS:
                self.fail(
                    "unknown-function",
                    f"unknown function {name!r}; known functions: "
                    + ", ".join(sorted(R.ALL_FUNCTIONS) + list(R.WRAPPERS)),
                    call,
                )
                return None
            return N.Callee(name)
        if isinstance(func, pyast.Call):
            # higher-order form wrapper(fn)(args)
            inner = func
            if not isinstance(inner.func, pyast.Name) or inner.func.id not in R.WRAPPERS:
                self.fail("expected-call", "only scenario_not/reverse_relationship calls may be applied", call)
                return None
            wrapper = inner.func.id
            if len(inner.args) != 1 or inner.keywords or not isinstance(inner.args[0], pyast.Name):
                self.fail(
                    "wrapper-usage",
                    f"{wrapper} takes exactly one function name argument",
                    call,
                )
                return None
            target = inner.args[0].id
            if target not in R.WRAPPABLE:
                self.fail(
                    "unknown-function",
                    f"{wrapper} cannot wrap {target!r}; wrappable functions: "
                    + ", ".join(sorted(R.WRAPPABLE)),
                    call,
                )
                return None
            return N.Callee(target, wrapper)
        if isinstance(func, pyast.Attribute):
            self.fail("forbidden-construct", "attribute access not allowed", call)
            return None
        self.fail("expected-call", "unsupported call form", call)
        return None

    def _arg(self, expr, bound) -> N.Arg | None:
        if isinstance(expr, pyast.Name):
            if expr.id not in bound:
                self.fail("unbound-identifier", f"identifier {expr.id!r} is not bound", expr)
                return None
            return N.Ident(expr.id)
        if isinstance(expr, pyast.Constant):
            value = expr.value
            if value is None or isinstance(value, (str, bool, int, float)):
                return N.Literal(value)
            self.fail("bad-literal", f"unsupported literal {value!r}", expr)
            return None
        if isinstance(expr, pyast.UnaryOp) and isinstance(expr.op, pyast.USub):
            operand = expr.operand
            if isinstance(operand, pyast.Constant) and isinstance(operand.value, (int, float)):
                return N.Literal(-operand.value)
            self.fail("bad-literal", "unary minus only applies to numbers", expr)
            return None
        if isinstance(expr, pyast.List):
            items = []
            for item in expr.elts:
                parsed = self._arg(item, bound)
                if parsed is None:
                    return None
                items.append(parsed)
            return N.ListExpr(tuple(items))
        if isinstance(expr, pyast.Attribute):
            self.fail("forbidden-construct", "attribute access not allowed", expr)
            return None
        if isinstance(expr, pyast.BinOp):
            self.fail("forbidden-construct", "arithmetic not allowed", expr)
            return None
        if isinstance(expr, pyast.Call):
            self.fail("forbidden-construct", "nested calls are not allowed as arguments", expr)
            return None
        self.fail("bad-literal", f"unsupported argument form {type(expr).__name__}", expr)
        return None


def parse_program(source: str) -> N.Program:
    """Parse source text to a Program; raises ProgramParseError with
    diagnostics on any violation of the subset."""
    return _Parser(source).parse()
