"""Natural-language -> program synthesis client.

Builds the code-generation prompt (API listing + categories + description +
in-context examples), calls a chat-completion-style JSON endpoint, extracts
the fenced code block, and parses/validates it. On diagnostics the LLM is
re-prompted with the diagnostics appended verbatim, up to max_retries times.
Transports are injectable so tests run against scripted mocks.
"""

from __future__ import annotations

import json
import os
import urllib.request
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from scenariomine.core import CONCRETE_CATEGORIES, SUPER_CATEGORIES
from scenariomine.dsl import nodes as N
from scenariomine.dsl.parser import extract_code_block, parse_program
from scenariomine.dsl.registry import api_listing
from scenariomine.dsl.validator import validate_program

PROMPT_TEMPLATE = (
    "Please use the following functions to find instances of a referred object in "
    "an autonomous driving dataset. Be precise to the description, try to avoid "
    "returning false positives.\n"
    "\n"
    "API Listing: {api_listing}\n"
    "\n"
    "Categories: {categories}\n"
    "\n"
    "Define a single scenario for the description:{description}\n"
    "\n"
    "Here is a list of examples: {examples}. Only output code and comments as part "
    "of a Python block. Do not define any additional functions, or filepaths. Do "
    "not include imports. Assume the log_dir and output_dir variables are given. "
    "Wrap all code in one python block and do not provide alternatives. Output "
    "code even if the given functions are not expressive enough to find the "
    "scenario."
)

RETRY_TEMPLATE = (
    "{prompt}\n"
    "\n"
    "Your previous attempt failed with these diagnostics:\n"
    "{diagnostics}\n"
    "Fix the program and output it again as a single python block."
)

DEFAULT_EXAMPLE = """```python
# Description: accelerating vehicle near a pedestrian
vehicles = get_objects_of_category(log_dir, category="VEHICLE")
peds = get_objects_of_category(log_dir, category="PEDESTRIAN")
accelerating_vehicles = accelerating(vehicles, log_dir, min_accel=0.65)
near_peds = near_objects(accelerating_vehicles, peds, log_dir, distance_thresh=10)
output_scenario(near_peds, "accelerating vehicle near a pedestrian", log_dir, output_dir)
```"""

API_KEY_ENV = "SCENARIOMINE_LLM_API_KEY"

Transport = Callable[[dict], str]


@dataclass(frozen=True)
class SynthesisConfig:
    endpoint: str = ""
    model: str = ""
    max_retries: int = 3
    temperature: float = 0.0
    timeout_s: float = 60.0

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


@dataclass
class SynthesisOutcome:
    program: N.Program
    source: str
    attempts: int


class SynthesisFailure(Exception):
    """All attempts exhausted; carries the last diagnostics."""

    def __init__(self, attempts: int, diagnostics: Sequence[N.Diagnostic]):
        self.attempts = attempts
        self.diagnostics = list(diagnostics)
        detail = "; ".join(str(d) for d in self.diagnostics) or "no diagnostics"
        super().__init__(f"synthesis failed after {attempts} attempts: {detail}")


def build_prompt(
    description: str,
    listing: Optional[str] = None,
    examples: Optional[str] = None,
) -> str:
    """Instantiate the code-generation prompt for one description."""
    if not description:
        raise ValueError("description must be non-empty")
    categories = ", ".join(SUPER_CATEGORIES + CONCRETE_CATEGORIES)
    return PROMPT_TEMPLATE.format(
        api_listing=listing if listing is not None else api_listing(),
        categories=categories,
        description=description,
        examples=examples if examples is not None else DEFAULT_EXAMPLE,
    )


def http_transport(config: SynthesisConfig) -> Transport:
    """Minimal chat-completion JSON-over-HTTP transport; the API key comes
    from the SCENARIOMINE_LLM_API_KEY environment variable."""

    def call(request: dict) -> str:
        payload = json.dumps(request).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(API_KEY_ENV)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        req = urllib.request.Request(config.endpoint, data=payload, headers=headers)
        with urllib.request.urlopen(req, timeout=config.timeout_s) as resp:
            body = json.loads(resp.read().decode("utf-8"))
        return body["choices"][0]["message"]["content"]

    return call


def scripted_transport(responses: Sequence[str]) -> Transport:
    """Deterministic mock transport yielding canned responses in order."""
    replies = list(responses)
    state = {"i": 0}

    def call(request: dict) -> str:
        i = min(state["i"], len(replies) - 1)
        state["i"] += 1
        return replies[i]

    return call


def synthesize(
    description: str,
    config: SynthesisConfig,
    transport: Optional[Transport] = None,
    listing: Optional[str] = None,
    examples: Optional[str] = None,
) -> SynthesisOutcome:
    """Synthesize a valid Program for a description, retrying with error
    feedback; raises SynthesisFailure when retries are exhausted."""
    transport = transport or http_transport(config)
    base_prompt = build_prompt(description, listing, examples)
    prompt = base_prompt
    last_diags: list[N.Diagnostic] = []
    attempts = 0
    for _ in range(config.max_retries + 1):
        attempts += 1
        request = {
            "model": config.model,
            "temperature": config.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        reply = transport(request)
        source = extract_code_block(reply)
        try:
            program = parse_program(source)
        except N.ProgramParseError as exc:
            last_diags = exc.diagnostics
        else:
            diags = validate_program(program)
            if not diags:
                return SynthesisOutcome(program, source, attempts)
            last_diags = diags
        prompt = RETRY_TEMPLATE.format(
            prompt=base_prompt,
            diagnostics="\n".join(str(d) for d in last_diags),
        )
    raise SynthesisFailure(attempts, last_diags)
