"""Command-line front end: load a source document, run analyses, report.

Exit codes: 0 on success, 2 on bad input (malformed JSON, invalid source,
inconsistent flags), 3 when a verification identity fails (which signals a
bug in the analysis chain, not bad input). The ground-set cap for
enumeration can be overridden with the SKA_ENUM_CAP environment variable.
"""

from __future__ import annotations

import json
import os
import random
import sys

import click

from . import analysis, structure
from .errors import SkaError
from .mmi import MmiResult, mmi
from .random_instances import random_hypergraphical, random_pin
from .rationals import format_rational, parse_rational
from .source_model import HypergraphicalSource, SourceModel, load_source
from .structure import t_max as compute_t_max

FORMAT_OPTION = click.option(
    "--format",
    "fmt",
    type=click.Choice(["text", "json"]),
    default="text",
    show_default=True,
    help="Report format.",
)


@click.group()
@click.version_option()
def main() -> None:
    """Analyze secret key agreement source models: MMI, optimal partitions,
    growth/loss rates, critical and excess edges."""


def _fail(message: str, code: int = 2) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _enum_cap() -> int | None:
    raw = os.environ.get("SKA_ENUM_CAP")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        _fail(f"SKA_ENUM_CAP must be an integer, got {raw!r}")
        raise AssertionError  # unreachable


def _load_valid(path: str) -> SourceModel:
    try:
        source = load_source(path)
    except (SkaError, OSError) as exc:
        _fail(str(exc))
        raise AssertionError
    report = source.validate()
    if not report.ok:
        _fail(f"{path} is not a valid source:\n{report}")
    return source


def _mmi(source: SourceModel) -> MmiResult:
    try:
        return mmi(source, cap=_enum_cap())
    except SkaError as exc:
        _fail(str(exc))
        raise AssertionError


def _parse_subset(raw: str) -> tuple[str, ...]:
    labels = tuple(part.strip() for part in raw.split(",") if part.strip())
    if not labels:
        _fail(f"empty subset {raw!r}")
    return labels


def _emit(fmt: str, payload: dict, text_lines: list[str]) -> None:
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            click.echo(line)


@main.command("mmi")
@click.argument("source_path", type=click.Path(exists=True, dir_okay=False))
@FORMAT_OPTION
def mmi_command(source_path: str, fmt: str) -> None:
    """MMI value, fundamental partition and optimality gap."""
    source = _load_valid(source_path)
    result = _mmi(source)
    _emit(
        fmt,
        result.to_json_dict(),
        [
            f"gamma: {format_rational(result.gamma)}",
            f"fundamental: {result.fundamental}",
            f"gap: {'inf' if result.gap is None else format_rational(result.gap)}",
            f"optimal partitions: {len(result.optimal_partitions)}",
        ],
    )


@main.command("partitions")
@click.argument("source_path", type=click.Path(exists=True, dir_okay=False))
@FORMAT_OPTION
def partitions_command(source_path: str, fmt: str) -> None:
    """All optimal partitions."""
    source = _load_valid(source_path)
    result = _mmi(source)
    lines = [f"gamma: {format_rational(result.gamma)}"]
    lines += [f"  {p}" for p in result.optimal_partitions]
    lines.append(f"fundamental: {result.fundamental}")
    _emit(fmt, result.to_json_dict(), lines)


@main.command("critical")
@click.argument("source_path", type=click.Path(exists=True, dir_okay=False))
@FORMAT_OPTION
def critical_command(source_path: str, fmt: str) -> None:
    """Critical edges (minimal subsets whose boost raises the MMI)."""
    source = _load_valid(source_path)
    result = _mmi(source)
    report = analysis.critical_edges(source, result)
    greedy = analysis.greedy_critical_edge(source, result)
    lines = [
        f"case: {report.case}",
        f"common size: {report.common_size}",
        "edges: " + " ".join("{" + ",".join(e) + "}" for e in report.edge_labels()),
        "greedy scan finds: {" + ",".join(greedy) + "}",
    ]
    _emit(fmt, report.to_json_dict(), lines)


@main.command("growth")
@click.argument("source_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--k", "k_max", type=int, default=None, help="Largest subset size (default: all users).")
@click.option("--set", "subset", type=str, default=None, help="Rate of one subset, e.g. --set 1,4.")
@FORMAT_OPTION
def growth_command(source_path: str, k_max: int | None, subset: str | None, fmt: str) -> None:
    """Growth rates: the whole curve, or one subset with --set."""
    source = _load_valid(source_path)
    result = _mmi(source)
    if subset is not None:
        labels = _parse_subset(subset)
        try:
            rate = analysis.growth_rate(source, result, labels)
        except SkaError as exc:
            _fail(str(exc))
            raise AssertionError
        _emit(
            fmt,
            {"subset": list(labels), "growth_rate": format_rational(rate)},
            [f"growth rate of {{{','.join(labels)}}}: {format_rational(rate)}"],
        )
        return
    try:
        curve = analysis.growth_curve(source, result, k_max)
    except SkaError as exc:
        _fail(str(exc))
        raise AssertionError
    lines = ["k  rate  witness"]
    for k, value in enumerate(curve.values):
        witness = ",".join(curve.witness_labels(k)) or "-"
        lines.append(f"{k}  {format_rational(value)}  {witness}")
    _emit(fmt, curve.to_json_dict(), lines)


@main.command("loss")
@click.argument("source_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--edge", required=True, type=str, help="Edge member labels, e.g. --edge 1,2.")
@FORMAT_OPTION
def loss_command(source_path: str, edge: str, fmt: str) -> None:
    """Loss rate of an edge the source carries."""
    source = _load_valid(source_path)
    result = _mmi(source)
    labels = _parse_subset(edge)
    try:
        rate = analysis.loss_rate(source, result, labels)
        excess = analysis.is_excess(source, result, labels)
    except SkaError as exc:
        _fail(str(exc))
        raise AssertionError
    _emit(
        fmt,
        {"edge": list(labels), "loss_rate": format_rational(rate), "excess": excess},
        [
            f"loss rate of {{{','.join(labels)}}}: {format_rational(rate)}",
            f"excess: {'yes' if excess else 'no'}",
        ],
    )


@main.command("excess")
@click.argument("source_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--edge", required=True, type=str, help="Edge member labels, e.g. --edge 1,2.")
@FORMAT_OPTION
def excess_command(source_path: str, edge: str, fmt: str) -> None:
    """Whether an edge is excess (its marginal removal is free)."""
    source = _load_valid(source_path)
    result = _mmi(source)
    labels = _parse_subset(edge)
    try:
        excess = analysis.is_excess(source, result, labels)
    except SkaError as exc:
        _fail(str(exc))
        raise AssertionError
    _emit(
        fmt,
        {"edge": list(labels), "excess": excess},
        [f"{{{','.join(labels)}}} is {'an excess' if excess else 'not an excess'} edge"],
    )


@main.command("tmax")
@click.argument("source_path", type=click.Path(exists=True, dir_okay=False))
@FORMAT_OPTION
def tmax_command(source_path: str, fmt: str) -> None:
    """Maximal optimal-partition blocks and their dichotomy case."""
    source = _load_valid(source_path)
    result = _mmi(source)
    report = compute_t_max(source, result)
    lines = [
        f"case: {report.case}",
        "t_max: " + " ".join("{" + ",".join(s) + "}" for s in report.t_max_labels()),
    ]
    if report.case == "T1":
        lines.append(f"coarsest optimal partition: {report.coarsest_optimal}")
    else:
        lines.append(
            "complements: "
            + " ".join("{" + ",".join(s) + "}" for s in report.complement_labels())
        )
    _emit(fmt, report.to_json_dict(), lines)


@main.command("unique")
@click.argument("source_path", type=click.Path(exists=True, dir_okay=False))
@FORMAT_OPTION
def unique_command(source_path: str, fmt: str) -> None:
    """Whether the fundamental partition is the only optimal partition."""
    source = _load_valid(source_path)
    result = _mmi(source)
    unique = structure.is_unique_optimal(source, result)
    _emit(
        fmt,
        {"unique_optimal": unique},
        [f"unique optimal partition: {'yes' if unique else 'no'}"],
    )


@main.command("validate")
@click.argument("source_path", type=click.Path(exists=True, dir_okay=False))
@FORMAT_OPTION
def validate_command(source_path: str, fmt: str) -> None:
    """Check the source's entropy function axioms."""
    try:
        source = load_source(source_path)
    except (SkaError, OSError) as exc:
        _fail(str(exc))
        raise AssertionError
    report = source.validate()
    _emit(fmt, report.to_json_dict(), [str(report)])
    if not report.ok:
        sys.exit(2)


@main.command("verify")
@click.argument("source_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--set", "subset", type=str, default=None, help="Verify one subset increment only.")
@click.option("--edge", type=str, default=None, help="Verify one edge decrement only.")
@click.option("--epsilon", type=str, default=None, help="Override the perturbation step (rational).")
@FORMAT_OPTION
def verify_command(
    source_path: str, subset: str | None, edge: str | None, epsilon: str | None, fmt: str
) -> None:
    """Replay growth/loss rates against real perturbations.

    By default every nonempty subset is verified in increment mode and every
    distinct edge of a hypergraphical source in decrement mode. Exits 3 when
    any identity fails.
    """
    source = _load_valid(source_path)
    result = _mmi(source)
    eps = None
    if epsilon is not None:
        try:
            eps = parse_rational(epsilon)
        except ValueError as exc:
            _fail(str(exc))
    jobs: list[tuple[tuple[str, ...], str]] = []
    if subset is not None:
        jobs.append((_parse_subset(subset), "increment"))
    if edge is not None:
        jobs.append((_parse_subset(edge), "decrement"))
    if not jobs:
        users = source.users
        for mask in range(1, 1 << users.n):
            jobs.append((users.labels_of(mask), "increment"))
        if isinstance(source, HypergraphicalSource):
            seen = set()
            for emask, e in zip(source.edge_masks, source.edges):
                if emask not in seen and source.has_edge(emask) > 0:
                    seen.add(emask)
                    jobs.append((users.labels_of(emask), "decrement"))
    verdicts = []
    for labels, mode in jobs:
        try:
            verdicts.append(analysis.perturbation_verify(source, result, labels, mode, epsilon=eps))
        except SkaError as exc:
            _fail(str(exc))
            raise AssertionError
    payload = {"verdicts": [v.to_json_dict() for v in verdicts], "ok": all(v.ok for v in verdicts)}
    _emit(fmt, payload, [v.describe() for v in verdicts])
    if not payload["ok"]:
        sys.exit(3)


@main.command("conjecture")
@click.argument("source_path", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--batch", type=int, default=0, show_default=True, help="Extra random instances to tally.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for the random batch.")
@click.option("--users", "batch_users", type=int, default=5, show_default=True, help="Users per random instance.")
@FORMAT_OPTION
def conjecture_command(
    source_path: str | None, batch: int, seed: int, batch_users: int, fmt: str
) -> None:
    """Tally the growth-rate guess (|S|-1)/(ell-1) over critical edges.

    Runs on the given source and/or a seeded random batch (alternating
    unit-weight pairwise networks and weighted hypergraphs). Violations are
    reported, never treated as failures.
    """
    if source_path is None and batch <= 0:
        _fail("give a source, --batch N, or both")
    reports = []
    if source_path is not None:
        source = _load_valid(source_path)
        result = _mmi(source)
        reports.append((source_path, analysis.conjecture_check(source, result)))
    rng = random.Random(seed)
    for index in range(batch):
        if index % 2 == 0:
            source = random_pin(rng, batch_users)
        else:
            source = random_hypergraphical(rng, batch_users)
        result = _mmi(source)
        reports.append((f"random[{index}]", analysis.conjecture_check(source, result)))
    holds = sum(r.counts[0] for _, r in reports)
    total = sum(r.counts[1] for _, r in reports)
    payload = {
        "instances": [
            {"name": name, **report.to_json_dict()} for name, report in reports
        ],
        "holds": holds,
        "total": total,
        "all_hold": holds == total,
    }
    lines = []
    for name, report in reports:
        h, t = report.counts
        lines.append(f"{name}: {h}/{t} critical edges match the guess")
        for entry in report.entries:
            mark = "ok" if entry.holds else "VIOLATION"
            lines.append(
                f"  {{{','.join(entry.edge)}}}: rate {format_rational(entry.rate)}"
                f" vs predicted {format_rational(entry.predicted)} [{mark}]"
            )
    lines.append(f"total: {holds}/{total}")
    _emit(fmt, payload, lines)


if __name__ == "__main__":
    main()
