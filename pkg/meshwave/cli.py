"""
The ``meshwave`` command line.

Each subcommand is a plain function whose keyword arguments chz parses from ``key=value`` pairs::

    meshwave simulate scenario=urban_proposed seed=7 replications=10 out=runs/urban
    meshwave compare baseline=urban_baseline proposed=urban_proposed out=-
    meshwave policy inputs=policy_inputs beta=0.05,0.10,0.20 argmax=true
    meshwave validate scenario=my_city.json

Exit codes: 0 ok, 2 bad scenario or arguments, 3 I/O failure, 4 scenarios that differ beyond mode.
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import chz
from chz.blueprint import (
    ConstructionException,
    EntrypointHelpException,
    ExtraneousBlueprintArg,
    InvalidBlueprintArg,
    MissingBlueprintArg,
)

from meshwave import engine, serialise
from meshwave import policy as policy_model
from meshwave.errors import MeshwaveError, MismatchedScenarios, ParseError
from meshwave.metrics import KPI_DIRECTIONS
from meshwave.rng import resolve_seed
from meshwave.scenario import BUNDLED, Mode, bundled_scenario, load_scenario

logger = logging.getLogger(__name__)

_ARGUMENT_ERRORS = (
    ConstructionException,
    ExtraneousBlueprintArg,
    InvalidBlueprintArg,
    MissingBlueprintArg,
)
IO_EXIT_CODE = 3

# decimals in text tables; anything not listed is an index
_DECIMALS = {
    "latency_mean": 2,
    "latency_p95": 2,
    "throughput": 2,
    "t_rec_mean": 2,
    "t_rec_single": 2,
    "t_rec_multi": 2,
    "control_overhead": 2,
    "broadcast_rate": 2,
    "loss": 4,
}
_UNITS = {
    "latency_mean": "ms",
    "latency_p95": "ms",
    "throughput": "Mbps",
    "t_rec_mean": "s",
    "t_rec_single": "s",
    "t_rec_multi": "s",
    "broadcast_rate": "Mbps",
}


def _configure_logging(log_level: str) -> None:
    logging.basicConfig(
        level=log_level.upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _resolve(name: str) -> Path:
    path = Path(name)
    if not path.exists() and name in BUNDLED:
        return bundled_scenario(name)
    return path


def format_value(name: str, value: float | None) -> str:
    if value is None:
        return "n/a"
    return f"{value:.{_DECIMALS.get(name, 3)}f}"


def _label(name: str) -> str:
    unit = _UNITS.get(name)
    return f"{name} ({unit})" if unit else name


def format_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Left-aligns the first column and right-aligns the rest."""
    widths = [max(len(r[i]) for r in [headers, *rows]) for i in range(len(headers))]

    def line(cells: Sequence[str]) -> str:
        first, *rest = cells
        parts = [first.ljust(widths[0])] + [c.rjust(w) for c, w in zip(rest, widths[1:])]
        return "  ".join(parts).rstrip()

    out = [line(headers), line(["-" * w for w in widths])]
    out.extend(line(r) for r in rows)
    return "\n".join(out)


def summary_table(summary: engine.KpiSummary) -> str:
    rows = []
    for name in KPI_DIRECTIONS:
        mean = summary.means[name]
        if mean is None:
            continue
        interval = summary.intervals.get(name)
        ci = f"±{format_value(name, interval.half_width)}" if interval is not None else ""
        rows.append([_label(name), format_value(name, mean), ci])
    return format_table(["Metric", "Mean", "95% CI"], rows)


def comparison_table(report: engine.ComparisonReport) -> str:
    rows = []
    for name in KPI_DIRECTIONS:
        base, new = report.baseline.means[name], report.proposed.means[name]
        if base is None and new is None:
            continue
        delta = report.deltas[name]
        rows.append(
            [
                _label(name),
                format_value(name, base),
                format_value(name, new),
                "n/a" if delta is None else f"{delta:+.1%}",
            ]
        )
    return format_table(["Metric", "Baseline", "Proposed", "Improvement"], rows)


def simulate(
    scenario: str,
    seed: int | None = None,
    replications: int | None = None,
    out: str = ".",
    jobs: int | None = None,
    log_level: str = "WARNING",
) -> int:
    """Run replications of one scenario; write run.json and samples.csv."""
    _configure_logging(log_level)
    config = load_scenario(_resolve(scenario))
    replication = engine.replicate(
        config, replications, seed=seed, jobs=jobs or engine.default_jobs()
    )

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    serialise.dump(engine.simulation_report(config, replication), out_dir / "run.json")
    with open(out_dir / "samples.csv", "w", newline="") as f:
        engine.write_samples_csv(replication.runs[0], f)
    logger.info("Wrote %s and %s", out_dir / "run.json", out_dir / "samples.csv")

    print(f"{config.description or scenario}: {config.mode.value} mode, seed {replication.seed}")
    print(summary_table(replication.summary))
    return 0


def compare(
    baseline: str,
    proposed: str,
    out: str = ".",
    seed: int | None = None,
    replications: int | None = None,
    jobs: int | None = None,
    attribution: bool = True,
    log_level: str = "WARNING",
) -> int:
    """Run a baseline and a proposed scenario on the same seeds and report improvements."""
    _configure_logging(log_level)
    base_config = load_scenario(_resolve(baseline))
    new_config = load_scenario(_resolve(proposed))
    if base_config.mode is new_config.mode:
        raise MismatchedScenarios(f"both scenarios are in {base_config.mode.value} mode")
    if base_config.mode is not Mode.BASELINE:
        raise MismatchedScenarios("baseline= must name the baseline-mode scenario")
    if engine.fingerprint(base_config) != engine.fingerprint(new_config):
        raise MismatchedScenarios(f"{baseline} and {proposed} differ beyond mode")

    seed = resolve_seed(seed, base_config.seed)
    jobs = jobs or engine.default_jobs()
    base_runs = engine.replicate(base_config, replications, seed=seed, jobs=jobs)
    new_runs = engine.replicate(new_config, replications, seed=seed, jobs=jobs)
    shares = engine.attribute_components(new_config, seed) if attribution else None
    report = engine.compare(base_runs.runs, new_runs.runs, attribution=shares, seed=seed)

    table = comparison_table(report)
    if out == "-":
        sys.stdout.write(serialise.dumps(report))
        print(table, file=sys.stderr)
        return 0
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    serialise.dump(report, out_dir / "comparison.json")
    logger.info("Wrote %s", out_dir / "comparison.json")
    print(table)
    return 0


def _parse_axis(name: str, text: str, cast: Callable[[str], Any]) -> tuple[Any, ...]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    try:
        return tuple(cast(item) for item in items)
    except ValueError:
        raise ParseError(f"bad {name} grid {text!r}") from None


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered not in ("true", "false"):
        raise ValueError(text)
    return lowered == "true"


def policy(
    inputs: str = "policy_inputs",
    beta: str | None = None,
    alpha_s: str | None = None,
    mandate: str | None = None,
    m_f: str | None = None,
    objective: str = "nsb",
    argmax: bool = False,
    out: str = "-",
    log_level: str = "WARNING",
) -> int:
    """Sweep subsidy, spectrum, mandate and multiplier settings; write the rows as CSV."""
    _configure_logging(log_level)
    model = policy_model.load_policy_inputs(_resolve(inputs))
    axes = {
        "beta": (beta, float),
        "alpha_s": (alpha_s, float),
        "mandate": (mandate, _parse_bool),
        "m_f": (m_f, float),
    }
    overrides = {
        axis: _parse_axis(axis, text, cast)
        for axis, (text, cast) in axes.items()
        if text is not None
    }
    grid = chz.replace(model.grid, **overrides)

    for note in policy_model.reference_discrepancies(model):
        print(f"note: {note}", file=sys.stderr)

    rows = policy_model.policy_sweep(model, grid, objective=objective)
    if argmax:
        rows = [r for r in rows if r.argmax]

    if out == "-":
        policy_model.write_sweep_csv(rows, sys.stdout)
        return 0
    with open(out, "w", newline="") as f:
        policy_model.write_sweep_csv(rows, f)
    logger.info("Wrote %d rows to %s", len(rows), out)
    return 0


def validate(scenario: str) -> int:
    """Check a scenario file and print its infrastructure counts."""
    config = load_scenario(_resolve(scenario))
    nodes = config.topology.nodes
    print(f"{scenario}: ok, {config.mode.value} mode, {len(nodes)} nodes, {config.n_steps} steps")
    return 0


COMMANDS: dict[str, Callable[..., int]] = {
    "simulate": simulate,
    "compare": compare,
    "policy": policy,
    "validate": validate,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return chz.dispatch_entrypoint(COMMANDS, argv=argv)
    except EntrypointHelpException as e:
        # an unknown command gets the same listing, prefixed with a warning
        unknown = bool(argv) and argv[0] != "--help" and argv[0] not in COMMANDS
        text = str(e)
        (sys.stderr if unknown else sys.stdout).write(text if text.endswith("\n") else f"{text}\n")
        return 2 if unknown else 0
    except _ARGUMENT_ERRORS as e:
        print("Error:", file=sys.stderr)
        print(str(e).rstrip("\n"), file=sys.stderr)
        return 2
    except MeshwaveError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return IO_EXIT_CODE


def cli() -> None:
    sys.exit(main())
