"""Deterministic execution of validated programs against a log.

Statements run in order in a single environment; the ScenarioSet handed to
output_scenario is the result. log_dir/output_dir are opaque tokens bound by
the host (the DSL never touches the filesystem); serialization is the host's
job. A per-call wall-time budget and a relationship-pair budget guard against
pathological generated programs; exceeding either is an execution error.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from scenariomine import core
from scenariomine.context import LogContext
from scenariomine.core import ScenarioSet
from scenariomine.dsl import nodes as N
from scenariomine.dsl import registry as R
from scenariomine.dsl.validator import bind_arguments


class _Token:
    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return f"<{self.name}>"


LOG_DIR_TOKEN = _Token("log_dir")
OUTPUT_DIR_TOKEN = _Token("output_dir")


@dataclass(frozen=True)
class ExecutionLimits:
    call_timeout_s: float = 30.0
    pair_budget: int = 10**7


@dataclass
class ExecutionResult:
    scenario: ScenarioSet
    description: str


class ExecutionError(Exception):
    def __init__(self, statement_index: int, line: int, message: str):
        self.statement_index = statement_index
        self.line = line
        self.diagnostic = N.Diagnostic("execution", message, line)
        super().__init__(f"statement {statement_index} (line {line}): {message}")


def _pair_count(value) -> int:
    if isinstance(value, ScenarioSet):
        return sum(len(e.timestamps) for e in value.entries.values())
    return 0


def _resolve(arg: N.Arg, env: dict):
    if isinstance(arg, N.Ident):
        return env[arg.name]
    if isinstance(arg, N.Literal):
        return arg.value
    if isinstance(arg, N.ListExpr):
        return [_resolve(item, env) for item in arg.items]
    raise TypeError(f"unexpected arg node {arg!r}")


def _call_cost(spec: R.FunctionSpec, values: dict) -> int:
    cost = 0
    scenario_pairs = []
    for param in spec.params:
        if param.kind == R.SCENARIO:
            scenario_pairs.append(_pair_count(values.get(param.name)))
        elif param.kind == R.SCENARIO_LIST:
            cost += sum(_pair_count(v) for v in values.get(param.name, []))
    if len(scenario_pairs) == 1:
        cost += scenario_pairs[0]
    elif len(scenario_pairs) >= 2:
        cost += scenario_pairs[0] * max(1, scenario_pairs[1])
    return cost


def _run_call(ctx: LogContext, call: N.CallExpr, env: dict, limits: ExecutionLimits):
    spec = R.ALL_FUNCTIONS[call.callee.name]
    bound, diags = bind_arguments(spec, call)
    if diags:
        raise ValueError(str(diags[0]))
    values = {}
    for param in spec.params:
        if param.name in bound:
            values[param.name] = _resolve(bound[param.name], env)
        elif not param.required:
            values[param.name] = param.default
    for param in spec.params:
        if param.kind == R.SCENARIO and not isinstance(values.get(param.name), ScenarioSet):
            raise TypeError(f"{spec.name}: {param.name} is not a scenario")
    cost = _call_cost(spec, values)
    if cost > limits.pair_budget:
        raise RuntimeError(
            f"{spec.name}: relationship-pair budget exceeded ({cost} > {limits.pair_budget})"
        )

    def invoke():
        if spec.name == "scenario_and":
            return core.scenario_and(values["scenario_dicts"])
        if spec.name == "scenario_or":
            return core.scenario_or(values["scenario_dicts"])
        if spec.name == "output_scenario":
            return values["scenario"]
        scenarios = [values[p.name] for p in spec.params if p.kind == R.SCENARIO]
        kwargs = {
            p.name: values[p.name]
            for p in spec.params
            if p.kind not in (R.SCENARIO, R.LOG_DIR, R.OUTPUT_DIR)
        }
        return spec.impl(ctx, *scenarios, **kwargs)

    started = time.monotonic()
    if call.callee.wrapper == "scenario_not":
        candidates = next(values[p.name] for p in spec.params if p.kind == R.SCENARIO)
        result = core.scenario_not(candidates, invoke())
    elif call.callee.wrapper == "reverse_relationship":
        result = core.reverse_relationship(invoke())
    else:
        result = invoke()
    elapsed = time.monotonic() - started
    if elapsed > limits.call_timeout_s:
        raise RuntimeError(f"{spec.name}: call exceeded {limits.call_timeout_s} s budget")
    return result, values


def execute_program(
    program: N.Program,
    ctx: LogContext,
    description: str = "",
    limits: ExecutionLimits = ExecutionLimits(),
) -> ExecutionResult:
    """Run a parsed, validated program; returns the output scenario and its
    description string. Deterministic: same program + same log = same result."""
    env: dict = {
        "log_dir": LOG_DIR_TOKEN,
        "output_dir": OUTPUT_DIR_TOKEN,
        "description": description,
    }
    result = None
    for index, stmt in enumerate(program.statements):
        try:
            value, values = _run_call(ctx, stmt.call, env, limits)
        except ExecutionError:
            raise
        except Exception as exc:
            raise ExecutionError(index, stmt.line, f"{stmt.call.callee.name}: {exc}") from exc
        if isinstance(stmt, N.Assignment):
            env[stmt.target] = value
        else:
            out_description = values.get("description", description)
            result = ExecutionResult(value, out_description if out_description else description)
    assert result is not None, "parser guarantees a final output statement"
    return result
