"""Deterministic artifact writers.

Rationals are written as "p/q" strings (integers without a denominator);
points as space-separated coordinates in one column. Optional decimal columns
carry a `_decimal` suffix and are lossy.
"""
import csv
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from checks.context import VerificationContext
from checks.registry import SuiteResult
from construction.free_space import BasisReport

logger = logging.getLogger(__name__)


def rational(value: Any) -> str:
    return str(Fraction(value))


def decimal(value: Any) -> str:
    return f"{float(Fraction(value)):.6f}"


def point(coordinates: Iterable[Any]) -> str:
    return " ".join(rational(c) for c in coordinates)


def parse_point(text: str) -> tuple[Fraction, ...]:
    """Inverse of `point`."""
    return tuple(Fraction(c) for c in text.split()) if text else ()


def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        count = 0
        for row in rows:
            writer.writerow(row)
            count += 1
    logger.info(f"✓ Wrote {path} ({count} rows)")
    return path


def write_blocks(context: VerificationContext, output_dir: Path) -> Path:
    def rows():
        chain = context.chain
        for n in range(1, chain.depth + 1):
            blocks = chain.stage(n)
            for label, points in (("M", blocks.m_points), ("C", blocks.c_points)):
                for x in points:
                    yield n, label, chain.birth_stage.get(x, ""), point(x[: blocks.width]), point(x)

    return write_table(output_dir / "blocks.csv", ("stage", "block", "birth_stage", "restriction", "point"), rows())


def write_order(context: VerificationContext, output_dir: Path) -> Path:
    order = context.order

    def rows():
        for segment in order.segments:
            for i in range(segment.start, segment.end + 1):
                yield i, segment.kind, segment.stage, i - segment.offset, point(order.point(i))

    return write_table(output_dir / "order.csv", ("i", "segment", "stage", "local_index", "point"), rows())


def write_fine_indices(context: VerificationContext, output_dir: Path) -> list[Path]:
    construction = context.construction

    def e_rows():
        for n in sorted(construction.e_indices):
            e = construction.e_indices[n]
            for i, ((j, k), x) in enumerate(zip(e.entries, e.points), start=1):
                yield n, i, j, k, point(e.order.points[j]), point(x)

    def g_rows():
        for n in sorted(construction.g_indices):
            g = construction.g_indices[n]
            for i, (z, norm, c) in enumerate(zip(g.shells, g.norms, g.points), start=1):
                yield n, i, norm, point(z), point(c)

    return [
        write_table(output_dir / "e_index.csv", ("stage", "i", "j", "k", "y", "point"), e_rows()),
        write_table(output_dir / "g_index.csv", ("stage", "i", "shell", "z", "point"), g_rows()),
    ]


def write_retractions(context: VerificationContext, output_dir: Path) -> Path:
    """Row i lists I(φ_i(I⁻¹(k))) for k = 1..#M."""
    tables = context.tables
    header = ("i",) + tuple(f"k{k}" for k in range(1, tables.shape[1] + 1))
    rows = ((i, *(int(v) + 1 for v in tables[i - 1])) for i in range(1, tables.shape[0] + 1))
    return write_table(output_dir / "retractions.csv", header, rows)


def write_lipschitz(context: VerificationContext, output_dir: Path, decimals: bool) -> Path:
    transferred = context.transferred if context.computed("transferred") else None
    header = ["i", "constant"] + (["transferred"] if transferred else [])
    if decimals:
        header += ["constant_decimal"]

    def rows():
        for i, value in enumerate(context.constants, start=1):
            row = [i, rational(value)]
            if transferred:
                row.append(rational(transferred.constants[i - 1]))
            if decimals:
                row.append(decimal(value))
            yield row

    return write_table(output_dir / "lipschitz.csv", header, rows())


def write_net(context: VerificationContext, output_dir: Path) -> Path:
    net, order = context.net, context.order
    cluster_of = {v: k for k, cluster in enumerate(net.clusters) for v in cluster}

    def rows():
        for i, m in enumerate(order.points, start=1):
            rho = net.rho[m]
            yield i, point(m), point(rho), cluster_of[rho] + 1, point(net.mu[m])

    return write_table(output_dir / "net.csv", ("i", "m", "rho", "cluster", "mu"), rows())


def write_projection_report(report: BasisReport, path: Path, decimals: bool) -> Path:
    header = ["molecule", "i", "norm", "projected_norm", "ratio", "residual"]
    if decimals:
        header += ["ratio_decimal", "residual_decimal"]

    def rows():
        for row in report.rows:
            values = [row.label, row.index, rational(row.norm), rational(row.projected_norm), rational(row.ratio), rational(row.residual)]
            if decimals:
                values += [decimal(row.ratio), decimal(row.residual)]
            yield values

    return write_table(path, header, rows())


def summary_document(
    run: str,
    config_data: dict,
    context: Optional[VerificationContext],
    results: Sequence[SuiteResult],
    exit_status: int,
    error: Optional[str] = None,
) -> dict:
    counts = {status: sum(r.status == status for r in results) for status in ("pass", "fail", "skipped")}
    document = {"run_id": run, "config": config_data, "exit_status": exit_status, "counts": counts}
    if error:
        document["error"] = error
    if context is not None:
        document["cardinalities"] = context.chain.cardinalities()
        document["boundaries"] = dict(context.order.boundaries)
        document["k_global"] = rational(context.k_global)
        if context.computed("net"):
            net = context.net
            document["net"] = {
                "a": rational(net.a),
                "clusters": len(net.clusters),
                "lip_mu": rational(net.forward),
                "lip_mu_inverse": rational(net.backward),
                "distortion": rational(net.distortion),
            }
        if context.computed("free_report"):
            # observed per molecule, never asserted
            document["residual_monotone"] = dict(context.free_report.monotone)
    document["suites"] = [r.as_dict() for r in results]
    return document


def write_summary(document: dict, output_dir: Path) -> Path:
    path = output_dir / "summary.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    logger.info(f"✓ Wrote {path}")
    return path
