"""Static validation of parsed programs against the registry.

validate_program returns error diagnostics (empty means executable);
lint_program returns non-fatal warnings such as unused bindings.
"""

from __future__ import annotations

import math

from scenariomine.dsl import nodes as N
from scenariomine.dsl import registry as R

_PREBOUND_KINDS = {"log_dir": R.LOG_DIR, "output_dir": R.OUTPUT_DIR, "description": R.STRING}


def bind_arguments(spec: R.FunctionSpec, call: N.CallExpr):
    """Map a call's args/kwargs onto the spec parameters.

    Returns (bound: dict[param name -> Arg node], diagnostics).
    """
    diags: list[N.Diagnostic] = []
    bound: dict[str, N.Arg] = {}
    params = spec.params
    if len(call.args) > len(params):
        diags.append(
            N.Diagnostic(
                "arity",
                f"{spec.name} takes at most {len(params)} arguments, got {len(call.args)}",
            )
        )
        return bound, diags
    for param, arg in zip(params, call.args):
        bound[param.name] = arg
    names = {p.name for p in params}
    for name, arg in call.kwargs:
        if name not in names:
            diags.append(
                N.Diagnostic(
                    "unknown-keyword",
                    f"{spec.name} has no parameter {name!r}; parameters: "
                    + ", ".join(p.name for p in params),
                )
            )
            continue
        if name in bound:
            diags.append(
                N.Diagnostic("duplicate-argument", f"{spec.name}: parameter {name!r} given twice")
            )
            continue
        bound[name] = arg
    for param in params:
        if param.required and param.name not in bound:
            diags.append(
                N.Diagnostic(
                    "missing-argument", f"{spec.name}: missing required parameter {param.name!r}"
                )
            )
    return bound, diags


def _literal_number(arg) -> float | None:
    if isinstance(arg, N.Literal) and isinstance(arg.value, (int, float)) and not isinstance(arg.value, bool):
        return float(arg.value)
    return None


def _check_kind(spec_name: str, param: R.Param, arg: N.Arg) -> N.Diagnostic | None:
    where = f"{spec_name}: parameter {param.name!r}"
    if param.kind == R.SCENARIO:
        if isinstance(arg, N.Ident) and arg.name not in _PREBOUND_KINDS:
            return None
        return N.Diagnostic("type", f"{where} expects a scenario variable")
    if param.kind == R.SCENARIO_LIST:
        if isinstance(arg, N.ListExpr) and arg.items and all(
            isinstance(item, N.Ident) and item.name not in _PREBOUND_KINDS for item in arg.items
        ):
            return None
        return N.Diagnostic("type", f"{where} expects a non-empty list of scenario variables")
    if param.kind in (R.LOG_DIR, R.OUTPUT_DIR):
        expected = "log_dir" if param.kind == R.LOG_DIR else "output_dir"
        if isinstance(arg, N.Ident) and arg.name == expected:
            return None
        return N.Diagnostic("type", f"{where} expects the {expected} variable")
    if param.kind == R.STRING:
        if isinstance(arg, N.Literal) and isinstance(arg.value, str):
            return None
        if isinstance(arg, N.Ident) and arg.name == "description":
            return None
        return N.Diagnostic("type", f"{where} expects a string")
    if param.kind == R.NUMBER:
        if _literal_number(arg) is not None:
            return None
        return N.Diagnostic("type", f"{where} expects a number")
    if param.kind == R.INT:
        if isinstance(arg, N.Literal) and isinstance(arg.value, int) and not isinstance(arg.value, bool):
            return None
        return N.Diagnostic("type", f"{where} expects an integer")
    if param.kind == R.BOOL:
        if isinstance(arg, N.Literal) and isinstance(arg.value, bool):
            return None
        return N.Diagnostic("type", f"{where} expects a boolean")
    if param.kind == R.ENUM:
        if isinstance(arg, N.Literal) and arg.value in param.choices:
            return None
        shown = ", ".join(repr(c) for c in param.choices)
        return N.Diagnostic("enum", f"{where} must be one of: {shown}")
    raise AssertionError(f"unhandled param kind {param.kind}")


def _validate_call(call: N.CallExpr) -> list[N.Diagnostic]:
    spec = R.ALL_FUNCTIONS[call.callee.name]
    bound, diags = bind_arguments(spec, call)
    for param in spec.params:
        arg = bound.get(param.name)
        if arg is None:
            continue
        problem = _check_kind(spec.name, param, arg)
        if problem is not None:
            diags.append(problem)
    for low_name, high_name in spec.range_checks:
        low = _resolved_number(spec, bound, low_name)
        high = _resolved_number(spec, bound, high_name)
        if low is not None and high is not None and low > high:
            diags.append(
                N.Diagnostic(
                    "range",
                    f"{spec.name}: {low_name} ({low}) exceeds {high_name} ({high})",
                )
            )
    int_floors = {"min_number": 0, "min_objects": 1}
    for name, floor in int_floors.items():
        param = spec.param(name)
        if param is None:
            continue
        arg = bound.get(name)
        if isinstance(arg, N.Literal) and isinstance(arg.value, int) and arg.value < floor:
            diags.append(N.Diagnostic("range", f"{spec.name}: {name} must be >= {floor}"))
    return diags


def _resolved_number(spec, bound, name):
    arg = bound.get(name)
    if arg is not None:
        return _literal_number(arg)
    param = spec.param(name)
    if param is not None and not param.required and isinstance(param.default, (int, float)):
        return float(param.default)
    return None


def validate_program(program: N.Program) -> list[N.Diagnostic]:
    """Arity, keyword, enum-literal, and literal-range checks; empty iff the
    program is executable."""
    diags: list[N.Diagnostic] = []
    for stmt in program.statements:
        call = stmt.call
        for d in _validate_call(call):
            diags.append(N.Diagnostic(d.code, d.message, stmt.line, d.column))
    return diags


def lint_program(program: N.Program) -> list[N.Diagnostic]:
    """Non-fatal warnings: bindings that are never used."""
    used: set[str] = set()

    def walk(arg):
        if isinstance(arg, N.Ident):
            used.add(arg.name)
        elif isinstance(arg, N.ListExpr):
            for item in arg.items:
                walk(item)

    for stmt in program.statements:
        for arg in stmt.call.args:
            walk(arg)
        for _, arg in stmt.call.kwargs:
            walk(arg)
    warnings = []
    for stmt in program.statements:
        if isinstance(stmt, N.Assignment) and stmt.target not in used:
            warnings.append(
                N.Diagnostic("unused-binding", f"{stmt.target!r} is never used", stmt.line)
            )
    return warnings
