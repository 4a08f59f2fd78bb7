"""Command-line surface.

Subcommands: `analyze` (metrics + region table at one threshold),
`sweep` (metrics across a threshold schedule, CSV directly plottable),
`matrix` (raw pairwise similarity dump), `extract` (C tree -> product
model file).

Exit codes: 0 success, 1 data/processing error, 2 usage error. Output is
plain text (no color), reproducible byte-for-byte for fixed inputs and
flags; tables round to --precision, CSV and structured output keep full
precision.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import __version__, ingest, metrics
from .errors import ConfigurationError, SplMetricsError
from .metrics import MetricsReport, SweepResult
from .model import ProductSet
from .partition import RegionPartition, region_order
from .relationship import make_model

FORMATS = ("table", "csv", "structured")


@dataclass(frozen=True)
class OutputSpec:
    """Where and how a command renders: format, destination, precision."""

    format: str = "table"
    destination: str | None = None  # None = standard output
    precision: int = 2

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ConfigurationError(f"unknown output format {self.format!r}")
        if self.precision < 0:
            raise ConfigurationError("precision must be >= 0")

    def emit(self, text: str) -> None:
        if self.destination:
            Path(self.destination).write_text(text, encoding="utf-8")
        else:
            click.echo(text, nl=False)


# ---------------------------------------------------------------------------
# shared option plumbing

def _model_options(default_model: str):
    def add(fn):
        fn = click.option(
            "--w-beh", type=float, default=0.5, show_default=True,
            help="Behavior (token) weight of the gradual model.")(fn)
        fn = click.option(
            "--w-sig", type=float, default=0.5, show_default=True,
            help="Signature (port) weight of the gradual model.")(fn)
        fn = click.option(
            "--model", "model_id", type=click.Choice(["exact", "gradual"]),
            default=default_model, show_default=True,
            help="Relationship model.")(fn)
        return fn
    return add


def _output_options(fn):
    fn = click.option("--workers", type=int, default=1, show_default=True,
                      help="Worker threads for matrix construction.")(fn)
    fn = click.option("-o", "--output", type=click.Path(dir_okay=False),
                      default=None, help="Write to file instead of stdout.")(fn)
    fn = click.option("--precision", type=int, default=2, show_default=True,
                      help="Decimal places in tables.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(FORMATS),
                      default="table", show_default=True)(fn)
    return fn


def _handle_data_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigurationError as exc:
            # bad knob values are usage errors (exit 2)
            raise click.UsageError(str(exc))
        except SplMetricsError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
    return wrapper


def _load_products(files) -> ProductSet:
    if len(files) < 2:
        raise click.UsageError(
            f"need at least 2 product model files, got {len(files)}")
    return ProductSet(ingest.load_product_model(f) for f in files)


# ---------------------------------------------------------------------------
# rendering helpers

def _fmt(value: float, precision: int) -> str:
    return f"{value:.{precision}f}"


def _pct(share: float) -> str:
    return f"{round(share * 100):d}%"


def _table(header: list[str], rows: list[list[str]], left: int = 1) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = []
    for row in [header] + rows:
        cells = [
            cell.ljust(widths[i]) if i < left else cell.rjust(widths[i])
            for i, cell in enumerate(row)
        ]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def _region_keys(partition_list: list[RegionPartition],
                 products: ProductSet) -> list[frozenset[int]]:
    observed = set()
    for part in partition_list:
        observed.update(part.regions)
    return region_order(len(products), observed)


def _region_label(footprint: frozenset[int], products: ProductSet) -> str:
    ids = [p.id for p in products]
    n = len(products)
    if len(footprint) == 1:
        return f"~{ids[min(footprint)]}"
    if n == 3:
        named = {
            frozenset({0, 1, 2}): "A",
            frozenset({0, 1}): "B",
            frozenset({0, 2}): "C",
            frozenset({1, 2}): "D",
        }
        if footprint in named:
            return named[footprint]
    if len(footprint) == n:
        return "all"
    return "+".join(ids[i] for i in sorted(footprint))


def _region_column(footprint: frozenset[int], products: ProductSet) -> str:
    ids = [p.id for p in products]
    return "+".join(ids[i] for i in sorted(footprint))


def _region_legend(products: ProductSet) -> str:
    ids = [p.id for p in products]
    lines = ["Region legend (~p = components only in that product):"]
    if len(products) == 3:
        lines.append(f"  A = shared by all three; B = {{{ids[0]}, {ids[1]}}}; "
                     f"C = {{{ids[0]}, {ids[2]}}}; D = {{{ids[1]}, {ids[2]}}}")
    else:
        lines.append("  'all' = shared by every product; other regions "
                     "are named by their product subset")
    return "\n".join(lines) + "\n"


def _report_header(report: MetricsReport, products: ProductSet) -> str:
    lines = [
        f"Model: {report.model_id}  threshold: {report.threshold:g}",
        "Products: " + ", ".join(
            f"{k + 1}={p.id} ({len(p)} components)"
            for k, p in enumerate(products)),
    ]
    return "\n".join(lines) + "\n"


def _region_rows(report: MetricsReport, products: ProductSet,
                 keys: list[frozenset[int]]) -> list[list[str]]:
    part = report.partition
    rows = []
    for fp in keys:
        rows.append([
            _region_label(fp, products),
            "+".join(products.products[i].id for i in sorted(fp)),
            str(part.cluster_count(fp)),
            str(part.component_count(fp)),
            _pct(part.share(fp)),
        ])
    return rows


def render_report_table(report: MetricsReport, products: ProductSet,
                        precision: int) -> str:
    keys = _region_keys([report.partition], products)
    out = [_report_header(report, products), _region_legend(products)]
    out.append(f"Regions (share = clusters in region / "
               f"{report.partition.total_clusters} total clusters):\n")
    out.append(_table(
        ["region", "products", "clusters", "components", "share"],
        _region_rows(report, products, keys), left=2))
    out.append("\nPer-product metrics:\n")
    out.append(_table(
        ["product", "components", "prr", "ir"],
        [[pm.product_id, str(pm.size), _fmt(pm.prr, precision),
          _fmt(pm.ir, precision)] for pm in report.per_product]))
    out.append(f"\nSoC: {report.soc_count} of {products.total_components} "
               f"component instances "
               f"(ratio {_fmt(report.soc_ratio, precision)})\n")
    return "".join(out)


def _csv_header(products: ProductSet, keys: list[frozenset[int]]) -> list[str]:
    ids = [p.id for p in products]
    header = ["N"]
    header += [f"prr_{pid}" for pid in ids]
    header += [f"ir_{pid}" for pid in ids]
    header += ["soc_ratio", "soc_count"]
    for fp in keys:
        name = _region_column(fp, products)
        header += [f"region_{name}_clusters", f"region_{name}_components",
                   f"region_{name}_share"]
    return header


def _csv_row(report: MetricsReport, keys: list[frozenset[int]]) -> list[str]:
    part = report.partition
    row = [repr(report.threshold)]
    row += [repr(pm.prr) for pm in report.per_product]
    row += [repr(pm.ir) for pm in report.per_product]
    row += [repr(report.soc_ratio), str(report.soc_count)]
    for fp in keys:
        row += [str(part.cluster_count(fp)), str(part.component_count(fp)),
                repr(part.share(fp))]
    return row


def _write_csv(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def render_report_csv(report: MetricsReport, products: ProductSet) -> str:
    keys = _region_keys([report.partition], products)
    return _write_csv(_csv_header(products, keys), [_csv_row(report, keys)])


def _report_payload(report: MetricsReport, products: ProductSet) -> dict:
    keys = _region_keys([report.partition], products)
    part = report.partition
    return {
        "threshold": report.threshold,
        "soc": {"count": report.soc_count, "ratio": report.soc_ratio},
        "metrics": [
            {"product": pm.product_id, "components": pm.size,
             "prr": pm.prr, "ir": pm.ir}
            for pm in report.per_product
        ],
        "total_clusters": part.total_clusters,
        "regions": [
            {
                "label": _region_label(fp, products),
                "products": [products.products[i].id for i in sorted(fp)],
                "clusters": part.cluster_count(fp),
                "components": part.component_count(fp),
                "share": part.share(fp),
            }
            for fp in keys
        ],
    }


def render_report_structured(report: MetricsReport,
                             products: ProductSet) -> str:
    payload = {"model": report.model_id}
    payload.update(_report_payload(report, products))
    return json.dumps(payload, indent=2) + "\n"


def render_sweep_table(result: SweepResult, products: ProductSet,
                       precision: int) -> str:
    keys = _region_keys([r.partition for r in result.rows], products)
    ids = [p.id for p in products]
    out = [f"Model: {result.rows[0].model_id}  "
           f"thresholds: {len(result.rows)}\n", _region_legend(products)]
    out.append("Regions by threshold (per cent of that row's clusters):\n")
    region_header = ["N"] + [_region_label(fp, products) for fp in keys]
    region_rows = [
        [f"{row.threshold:g}"] + [_pct(row.partition.share(fp)) for fp in keys]
        for row in result.rows
    ]
    out.append(_table(region_header, region_rows, left=0))
    out.append("\nMetrics by threshold:\n")
    metric_header = (["N"] + [f"prr_{pid}" for pid in ids]
                     + [f"ir_{pid}" for pid in ids]
                     + ["soc_count", "soc_ratio"])
    metric_rows = []
    for row in result.rows:
        cells = [f"{row.threshold:g}"]
        cells += [_fmt(pm.prr, precision) for pm in row.per_product]
        cells += [_fmt(pm.ir, precision) for pm in row.per_product]
        cells += [str(row.soc_count), _fmt(row.soc_ratio, precision)]
        metric_rows.append(cells)
    out.append(_table(metric_header, metric_rows, left=0))
    out.append("\n" + _crossover_text(result))
    return "".join(out)


def _crossover_text(result: SweepResult) -> str:
    lines = ["Crossover thresholds (largest N with prr > ir):"]
    for pid, threshold in result.crossover_thresholds().items():
        shown = "none within schedule" if threshold is None else f"{threshold:g}"
        lines.append(f"  {pid}: {shown}")
    overall = result.crossover_all()
    shown = "none within schedule" if overall is None else f"{overall:g}"
    lines.append(f"  all products: {shown}")
    return "\n".join(lines) + "\n"


def render_sweep_csv(result: SweepResult, products: ProductSet) -> str:
    keys = _region_keys([r.partition for r in result.rows], products)
    return _write_csv(_csv_header(products, keys),
                      [_csv_row(row, keys) for row in result.rows])


def render_sweep_structured(result: SweepResult,
                            products: ProductSet) -> str:
    payload = {
        "model": result.rows[0].model_id,
        "rows": [_report_payload(r, products) for r in result.rows],
        "crossovers": {
            "per_product": result.crossover_thresholds(),
            "all_products": result.crossover_all(),
        },
    }
    return json.dumps(payload, indent=2) + "\n"


# ---------------------------------------------------------------------------
# commands

@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(version=__version__, prog_name="splmetrics")
def main():
    """Measure the product-line potential of a set of legacy products."""
    logging.basicConfig(level=logging.WARNING, format="%(message)s",
                        stream=sys.stderr)


@main.command(name="analyze")
@click.argument("files", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@_model_options(default_model="exact")
@click.option("--threshold", type=float, default=1.0, show_default=True,
              help="Similarity threshold in [0, 1].")
@_output_options
@_handle_data_errors
def analyze_cmd(files, model_id, w_sig, w_beh, threshold, fmt, precision,
                output, workers):
    """Metrics and region table for >= 2 product model FILES."""
    spec = OutputSpec(fmt, output, precision)
    model = make_model(model_id, w_sig, w_beh)
    products = _load_products(files)
    report = metrics.analyze(products, model, threshold, workers=workers)
    if spec.format == "table":
        text = render_report_table(report, products, spec.precision)
    elif spec.format == "csv":
        text = render_report_csv(report, products)
    else:
        text = render_report_structured(report, products)
    spec.emit(text)


def _parse_schedule(raw: str) -> list[float]:
    try:
        return [float(part) for part in raw.split(",") if part.strip() != ""]
    except ValueError:
        raise click.UsageError(f"malformed threshold list: {raw!r}")


@main.command(name="sweep")
@click.argument("files", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@_model_options(default_model="gradual")
@click.option("--thresholds", "schedule", default=None,
              help="Comma-separated thresholds (default: built-in schedule).")
@_output_options
@_handle_data_errors
def sweep_cmd(files, model_id, w_sig, w_beh, schedule, fmt, precision,
              output, workers):
    """Metrics across a descending threshold schedule."""
    spec = OutputSpec(fmt, output, precision)
    model = make_model(model_id, w_sig, w_beh)
    products = _load_products(files)
    parsed = _parse_schedule(schedule) if schedule is not None else None
    result = metrics.sweep(products, model, parsed, workers=workers)
    if spec.format == "table":
        text = render_sweep_table(result, products, spec.precision)
    elif spec.format == "csv":
        text = render_sweep_csv(result, products)
        # keep the CSV stream clean; the summary goes to stderr
        click.echo(_crossover_text(result), err=True, nl=False)
    else:
        text = render_sweep_structured(result, products)
    spec.emit(text)


@main.command(name="matrix")
@click.argument("files", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@_model_options(default_model="gradual")
@click.option("--include-self", is_flag=True,
              help="Also emit same-product pairs (including the diagonal).")
@_output_options
@_handle_data_errors
def matrix_cmd(files, model_id, w_sig, w_beh, include_self, fmt, precision,
               output, workers):
    """Pairwise similarity dump (cross-product pairs by default)."""
    spec = OutputSpec(fmt, output, precision)
    model = make_model(model_id, w_sig, w_beh)
    products = _load_products(files)
    from .relationship import build_matrix
    matrix = build_matrix(products, model, workers=workers)
    refs = matrix.refs
    owners = [products.owner_index(ref) for ref in refs]
    rows = []
    for i in range(len(refs)):
        start = i if include_self else i + 1
        for j in range(start, len(refs)):
            if not include_self and owners[i] == owners[j]:
                continue
            rows.append((refs[i], refs[j], float(matrix.values[i, j])))
    header = ["product_a", "component_a", "product_b", "component_b",
              "similarity"]
    if spec.format == "csv":
        text = _write_csv(header, [
            [a.product, a.component, b.product, b.component, repr(sim)]
            for a, b, sim in rows
        ])
    elif spec.format == "structured":
        text = json.dumps({
            "model": matrix.model_id,
            "pairs": [
                {"product_a": a.product, "component_a": a.component,
                 "product_b": b.product, "component_b": b.component,
                 "similarity": sim}
                for a, b, sim in rows
            ],
        }, indent=2) + "\n"
    else:
        text = _table(header, [
            [a.product, a.component, b.product, b.component,
             _fmt(sim, spec.precision)]
            for a, b, sim in rows
        ], left=4)
    spec.emit(text)


@main.command(name="extract")
@click.argument("root", type=click.Path(exists=True, file_okay=False))
@click.option("--id", "product_id", required=True,
              help="Product id for the extracted model.")
@click.option("--name", default=None, help="Display name (defaults to id).")
@click.option("--extensions", default=",".join(ingest.DEFAULT_SOURCE_EXTENSIONS),
              show_default=True, help="Comma-separated source extensions.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Write the model file here instead of stdout.")
@_handle_data_errors
def extract_cmd(root, product_id, name, extensions, output):
    """Extract a product model from a C-like source tree."""
    exts = tuple(e if e.startswith(".") else f".{e}"
                 for e in extensions.split(",") if e.strip())
    product = ingest.extract_c_product(root, product_id, name=name,
                                       extensions=exts)
    OutputSpec(destination=output).emit(ingest.serialize_product_model(product))


if __name__ == "__main__":
    main()
