"""AST node types for scenario programs plus the pretty-printer.

The surface syntax is the restricted assignment/call subset the synthesis
prompt asks for: comments, ``name = fn(...)`` statements, literal and list
arguments, the two higher-order wrappers, and a final output_scenario call.
Line numbers are carried for diagnostics but excluded from equality so a
parse -> pretty-print -> parse round trip is AST-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Literal:
    value: object  # str | int | float | bool | None


@dataclass(frozen=True)
class ListExpr:
    items: tuple


Arg = Union[Ident, Literal, ListExpr]


@dataclass(frozen=True)
class Callee:
    name: str
    wrapper: Optional[str] = None  # scenario_not | reverse_relationship


@dataclass(frozen=True)
class CallExpr:
    callee: Callee
    args: tuple = ()
    kwargs: tuple = ()  # ((name, Arg), ...)


@dataclass(frozen=True)
class Assignment:
    target: str
    call: CallExpr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class OutputStatement:
    call: CallExpr
    line: int = field(default=0, compare=False)


Statement = Union[Assignment, OutputStatement]


@dataclass(frozen=True)
class Program:
    statements: tuple

    @property
    def output(self) -> OutputStatement:
        return self.statements[-1]


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        return f"{self.code} at line {self.line}, column {self.column}: {self.message}"


class ProgramParseError(Exception):
    """Raised by the parser; carries machine-readable diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


def _format_arg(arg: Arg) -> str:
    if isinstance(arg, Ident):
        return arg.name
    if isinstance(arg, Literal):
        return repr(arg.value)
    if isinstance(arg, ListExpr):
        return "[" + ", ".join(_format_arg(a) for a in arg.items) + "]"
    raise TypeError(f"unexpected arg node {arg!r}")


def format_call(call: CallExpr) -> str:
    head = call.callee.name
    if call.callee.wrapper:
        head = f"{call.callee.wrapper}({call.callee.name})"
    parts = [_format_arg(a) for a in call.args]
    parts += [f"{name}={_format_arg(a)}" for name, a in call.kwargs]
    return f"{head}({', '.join(parts)})"


def format_program(program: Program) -> str:
    """Pretty-print back to source; parsing the result reproduces the AST."""
    lines = []
    for stmt in program.statements:
        if isinstance(stmt, Assignment):
            lines.append(f"{stmt.target} = {format_call(stmt.call)}")
        else:
            lines.append(format_call(stmt.call))
    return "\n".join(lines) + "\n"
