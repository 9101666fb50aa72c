"""Python front end for the cluster simulator.

The heavy lifting lives in the C++ extension module ``spatzsim._core``; this
package wraps it with dict-in / dict-out conveniences. Configs use the same
JSON schema as the command-line tool.
"""

import json

from ._core import assemble_check, disassemble

__all__ = [
    "SimulationError",
    "assemble_check",
    "disassemble",
    "mixed",
    "run",
    "run_asm",
    "sweep",
]

from . import _core


class SimulationError(RuntimeError):
    """Raised when a simulation run fails; carries the CLI-style exit code."""

    def __init__(self, exit_code, log):
        super().__init__(log.strip() or "simulation failed (exit code %d)" % exit_code)
        self.exit_code = exit_code


def _dispatch(fn, config):
    text = config if isinstance(config, str) else json.dumps(config or {})
    code, report, log = fn(text)
    if code != 0:
        raise SimulationError(code, log)
    try:
        return json.loads(report)
    except ValueError:
        return report  # csv output comes back as plain text


def run(config=None):
    """Run one experiment (kernel or assembly). Returns the report as a dict
    for JSON output, or the raw text for CSV output."""
    return _dispatch(_core.run, config)


def sweep(config=None):
    """Run the kernel x mode sweep and return the combined report."""
    return _dispatch(_core.sweep, config)


def mixed(config):
    """Run the mixed kernel+scalar split/merge comparison."""
    return _dispatch(_core.mixed, config)


def run_asm(source, max_cycles=10_000_000):
    """Assemble and run a program from source text; returns the report dict."""
    return json.loads(_core.run_asm(source, max_cycles))
