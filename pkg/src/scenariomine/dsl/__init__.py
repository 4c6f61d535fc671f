from scenariomine.dsl.interpreter import (
    ExecutionError,
    ExecutionLimits,
    ExecutionResult,
    execute_program,
)
from scenariomine.dsl.nodes import Diagnostic, Program, ProgramParseError, format_program
from scenariomine.dsl.parser import extract_code_block, parse_program
from scenariomine.dsl.registry import ATOMIC_FUNCTIONS, api_listing
from scenariomine.dsl.validator import lint_program, validate_program

__all__ = [
    "ATOMIC_FUNCTIONS",
    "Diagnostic",
    "ExecutionError",
    "ExecutionLimits",
    "ExecutionResult",
    "Program",
    "ProgramParseError",
    "api_listing",
    "execute_program",
    "extract_code_block",
    "format_program",
    "lint_program",
    "parse_program",
    "validate_program",
]
