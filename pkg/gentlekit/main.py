"""
Command-line entry point: python -m gentlekit <subcommand> [options] <input>
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError as PydanticValidationError

from gentlekit.commands.registry import CommandResult, get_command_registry
from gentlekit.config import get_settings
from gentlekit.core.logging import get_logger, setup_logging
from gentlekit.exceptions import EXIT_INPUT_ERROR, ValidationError, error_response_from_exception
from gentlekit.schemas import AnalysisRequest, Command, Report, SuiteName
from gentlekit.services.analysis_service import get_analysis_service

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Gentle and string algebras: syzygies, Cohen-Macaulay modules, blocks and angulations",
    )
    parser.add_argument("--log-level", default=None, help="Override GENTLEKIT_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--m", type=int, default=1, help="Angulation parameter m (default 1)")
        sub.add_argument("--char", dest="characteristic", type=int, default=None,
                         help=f"Field characteristic, 0 for the rationals (default {settings.field_char})")
        sub.add_argument("--cutoff", type=int, default=None, help="Syzygy cutoff (default 2*dim)")
        sub.add_argument("--max-letters", type=int, default=None,
                         help=f"Letter bound for string enumeration (default {settings.max_letters})")
        sub.add_argument("--seed", type=int, default=None, help=f"Seed (default {settings.seed})")
        sub.add_argument("--trials", type=int, default=None, help=f"Iso test trials (default {settings.trials})")
        sub.add_argument("--json", dest="json_output", action="store_true", help="Print the JSON report")
        sub.add_argument("--emit-bq", type=Path, default=None, help="Write the bound quiver to this path")

    for command, help_text in (
        (Command.ANALYZE, "classify and compute dimensions"),
        (Command.CM, "CM set against the fixed points of Omega^{m+1} tau"),
        (Command.BLOCKS, "block decomposition"),
        (Command.JACOBIAN, "Jacobian relations of a potential"),
        (Command.FROM_ANGULATION, "bound quiver of an angulation"),
    ):
        sub = subparsers.add_parser(command.value, help=help_text)
        sub.add_argument("input_path", type=Path, help=".bq or .ang file")
        common(sub)
        if command == Command.BLOCKS:
            sub.add_argument("--potential", action="store_true", help="Also verify the Jacobian relations")
        if command == Command.JACOBIAN:
            sub.add_argument("--potential-file", type=Path, default=None, help="Potential to use")

    suite = subparsers.add_parser(Command.SUITE.value, help="run a seeded property battery")
    common(suite)
    suite.add_argument("--suite", required=True, choices=[s.value for s in SuiteName])
    suite.add_argument("--count", type=int, default=None,
                       help=f"Instances to check (default {settings.suite_count})")
    suite.add_argument("--n", type=int, default=4, help="Disk parameter n (default 4)")
    return parser


def request_from_args(args: argparse.Namespace) -> AnalysisRequest:
    """Validate parsed arguments; unset options fall back to settings."""
    values = {key: value for key, value in vars(args).items()
              if value is not None and key not in ("log_level",)}
    try:
        return AnalysisRequest(**values)
    except PydanticValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or None
        raise ValidationError(first["msg"], details={"field": field}) from None


def render_text(report: Report) -> str:
    """Prose rendering of a report."""
    lines = [f"{report.tool} {report.version} {report.command}" + (f" {report.algebra}" if report.algebra else "")]
    run = report.run
    lines.append(f"  field {run.field}, cutoff {run.cutoff or '2*dim'}, trials {run.trials}, seed {run.seed}")
    if report.classification:
        c = report.classification
        kind = "gentle" if c.gentle else "string, not gentle" if c.string else "not a string algebra"
        lines.append(f"  {kind}; admissible: {c.admissible}")
        for violation in c.violations:
            lines.append(f"    violation {violation.tag}: {violation.witness}")
    if report.dimensions:
        d = report.dimensions
        lines.append(f"  dim {d.algebra}, Gorenstein dimension {_dimension(d.gorenstein)}, "
                     f"global dimension {_dimension(d.global_dimension)}")
    if report.saturated_cycles:
        lines.append(f"  saturated cycles: {', '.join(report.saturated_cycles)}")
    if report.angulation:
        a = report.angulation
        lines.append(f"  {a.model}: {len(a.diagonals)} arcs, {len(a.faces)} faces")
        lines.append(f"    gentle {a.gentle}, cycles of length m+2 {a.cycles_have_length_m_plus_2}, "
                     f"chains <= m-1 {a.chains_at_most_m_minus_1}, Gorenstein <= m {a.gorenstein_at_most_m}")
    if report.cm:
        lines.append(f"  CM modules ({report.cm.method}): {_listing(report.cm.cm_modules)}")
        lines.append(f"  fixed points of Omega^{report.cm.m + 1} tau: {_listing(report.cm.fixed_points)}")
        lines.append(f"  sets agree: {report.cm.sets_agree}")
    if report.blocks:
        b = report.blocks
        if b.decomposable:
            counts = ", ".join(f"{n} x {kind}" for kind, n in b.counts.items() if n)
            lines.append(f"  blocks: {counts}")
        else:
            lines.append(f"  no block decomposition ({b.rule}): {' '.join(b.witness)}")
    for j in report.jacobian:
        lines.append(f"  Jacobian relations in characteristic {j.characteristic}: "
                     f"{'equal' if j.equal else 'different'}")
        lines.extend(f"    missing {rel}" for rel in j.missing)
        lines.extend(f"    vanished {rel}" for rel in j.vanished)
    if report.suite:
        s = report.suite
        lines.append(f"  suite {s.name}: {s.passed}/{s.count} passed")
        lines.extend(f"    {f.instance}: {f.reason}" for f in s.failures)
    if report.emitted_bq:
        lines.append(report.emitted_bq.rstrip())
    lines.extend(f"  note: {caveat}" for caveat in report.caveats)
    lines.append(f"  verified: {report.verified}")
    return "\n".join(lines)


def _dimension(model) -> str:
    if model.kind == "finite":
        return str(model.value)
    if model.kind == "infinite" and model.period is not None:
        return f"infinite (period {model.period} from step {model.start})"
    return model.kind


def _listing(items: List[str]) -> str:
    return ", ".join(items) if items else "none"


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    json_output = args.json_output

    try:
        request = request_from_args(args)
    except ValidationError as e:
        result: CommandResult = CommandResult.error(error_response_from_exception(e), exit_code=EXIT_INPUT_ERROR)
    else:
        # registers the subcommands
        get_analysis_service()
        result = get_command_registry().dispatch(request)

    if json_output:
        print(json.dumps(result.to_dict(), indent=2))
    elif result.success:
        print(render_text(result.data))
    else:
        print(f"error: {result.error.error.message}", file=sys.stderr)
        if result.error.error.suggestion:
            print(f"hint: {result.error.error.suggestion}", file=sys.stderr)
    return result.exit_code
