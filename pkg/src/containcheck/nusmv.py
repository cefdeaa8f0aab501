"""Optional integration with an installed NuSMV binary: run a generated
.smv file and parse the checker's textual verdicts and counterexample
traces for cross-checking against the internal engine.
"""

from __future__ import annotations

import os
import re
import shutil
import subprocess
import tempfile
from dataclasses import dataclass

from . import ltl
from .checker import Lasso, Verdict

ENV_VAR = "NUSMV"
DEFAULT_TIMEOUT = 60.0

_SPEC_LINE = re.compile(r"^--\s+specification\s+(.*?)\s+is\s+(true|false)\s*$")
_STATE_LINE = re.compile(r"^->\s*State:\s*(\d+)\.(\d+)\s*<-\s*$")
_ASSIGN_LINE = re.compile(r"^\s*(\w+)\s*=\s*(\S+)\s*$")
_LOOP_LINE = re.compile(r"^--\s+Loop starts here\s*$")
_NOISE_PREFIXES = (
    "*** ",
    "WARNING",
    "-- as demonstrated",
    "Trace Description:",
    "Trace Type:",
)


@dataclass(frozen=True)
class ToolInfo:
    path: str
    version: str


class ToolNotFound(Exception):
    pass


class ToolRunError(Exception):
    def __init__(self, message: str, stdout: str = "", stderr: str = ""):
        super().__init__(message)
        self.stdout = stdout
        self.stderr = stderr


class OutputParseError(Exception):
    def __init__(self, line_number: int, line: str):
        super().__init__(f"unrecognized output at line {line_number}: {line!r}")
        self.line_number = line_number
        self.line = line


def detect(path_override: str | None = None) -> ToolInfo | None:
    """Locate the external checker: explicit override, then the NUSMV
    environment variable, then the system path. Absence is data, not an
    error."""
    candidates = []
    if path_override:
        candidates.append(path_override)
    elif os.environ.get(ENV_VAR):
        candidates.append(os.environ[ENV_VAR])
    else:
        for name in ("NuSMV", "nusmv"):
            found = shutil.which(name)
            if found:
                candidates.append(found)
                break
    for candidate in candidates:
        resolved = shutil.which(candidate) or (
            candidate if os.path.isfile(candidate) and os.access(candidate, os.X_OK) else None
        )
        if resolved is None:
            return None
        return ToolInfo(resolved, _probe_version(resolved))
    return None


def _probe_version(path: str) -> str:
    try:
        proc = subprocess.run(
            [path, "-help"], capture_output=True, text=True, timeout=10
        )
    except (OSError, subprocess.TimeoutExpired):
        return "unknown"
    match = re.search(r"NuSMV\s+([\w.]+)", proc.stdout + proc.stderr)
    return match.group(1) if match else "unknown"


def run_check(
    smv_text: str,
    timeout: float = DEFAULT_TIMEOUT,
    path_override: str | None = None,
) -> str:
    """Write the module to a temp file, run the external checker on it, and
    return its stdout. Raises ToolNotFound, ToolRunError on nonzero exit,
    and ToolRunError on timeout."""
    info = detect(path_override)
    if info is None:
        raise ToolNotFound("no NuSMV binary found (override, NUSMV env var, PATH)")
    with tempfile.NamedTemporaryFile(
        "w", suffix=".smv", delete=False, encoding="utf-8"
    ) as handle:
        handle.write(smv_text)
        temp_path = handle.name
    try:
        try:
            proc = subprocess.run(
                [info.path, temp_path],
                capture_output=True,
                text=True,
                timeout=timeout,
            )
        except subprocess.TimeoutExpired as exc:
            raise ToolRunError(f"external checker timed out after {timeout}s") from exc
        if proc.returncode != 0:
            raise ToolRunError(
                f"external checker exited with {proc.returncode}",
                stdout=proc.stdout,
                stderr=proc.stderr,
            )
        return proc.stdout
    finally:
        os.unlink(temp_path)


def parse_output(raw: str) -> list[Verdict]:
    """One verdict per '-- specification ... is true|false' line.

    Counterexample states are rebuilt from the delta-printed blocks by
    carrying unprinted variables forward; the loop begins at the state
    following the loop marker. A trailing repetition of the loop's first
    state (the checker's way of closing the loop) is dropped. Lines that do
    not belong to the known layout raise OutputParseError.
    """
    verdicts: list[Verdict] = []
    pending_formula: ltl.Formula | None = None
    states: list[dict[str, str]] = []
    loop_index: int | None = None
    in_trace = False

    def flush() -> None:
        nonlocal pending_formula, states, loop_index, in_trace
        if pending_formula is None:
            return
        if not states:
            raise OutputParseError(0, "counterexample trace missing after a false verdict")
        verdicts.append(
            Verdict(pending_formula, False, _build_lasso(states, loop_index))
        )
        pending_formula = None
        states = []
        loop_index = None
        in_trace = False

    for line_number, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        spec = _SPEC_LINE.match(stripped)
        if spec:
            flush()
            formula = ltl.parse_ltl(spec.group(1))
            if spec.group(2) == "true":
                verdicts.append(Verdict(formula, True))
            else:
                pending_formula = formula
                in_trace = True
            continue
        if _LOOP_LINE.match(stripped):
            if not in_trace:
                raise OutputParseError(line_number, line)
            loop_index = len(states)
            continue
        if _STATE_LINE.match(stripped):
            if not in_trace:
                raise OutputParseError(line_number, line)
            previous = dict(states[-1]) if states else {}
            states.append(previous)
            continue
        if in_trace and states and _ASSIGN_LINE.match(stripped):
            name, value = _ASSIGN_LINE.match(stripped).groups()
            states[-1][name] = value
            continue
        if not stripped or stripped == "..." or stripped.startswith(_NOISE_PREFIXES):
            continue
        if stripped.startswith("$") or stripped.startswith("Copyright"):
            continue
        if in_trace:
            raise OutputParseError(line_number, line)
        # Banner or other preamble outside any trace: tolerated.
    flush()
    return verdicts


def _build_lasso(states: list[dict[str, str]], loop_index: int | None) -> Lasso:
    if loop_index is None:
        loop_index = len(states) - 1
    names: list[str] = []
    for state in states:
        for name in state:
            if name not in names:
                names.append(name)
    rows = [tuple(state.get(name) for name in names) for state in states]
    loop_rows = rows[loop_index:]
    # The printed trace closes the loop by repeating its first state.
    if len(loop_rows) >= 2 and loop_rows[-1] == loop_rows[0]:
        loop_rows = loop_rows[:-1]
    return Lasso(tuple(names), tuple(rows[:loop_index]), tuple(loop_rows))
