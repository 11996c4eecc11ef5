"""render_figs: plot qteleport CSV sweeps as PNG or SVG charts.

Usage: render_figs <kind> <in.csv> <out.(png|svg)>

Kinds and their column schemas:
  fidelity        eps_c, eps_phi, F_plus, F_minus
                  (F_plus solid and F_minus dot-dashed versus eps_phi,
                  one curve pair per eps_c level)
  ent_vs_input    eps_c, eps_phi, eps_t  (eps_t versus eps_phi per eps_c)
  ent_vs_channel  eps_c, eps_phi, eps_t  (eps_t versus eps_c per eps_phi)

Exit codes: 0 on success, 1 on any error (unknown kind, unreadable CSV,
missing column, empty data, unsupported output extension).
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

# Fixed hash salt so SVG element ids, and with them the whole file body,
# are reproducible for identical input CSVs.
matplotlib.rcParams["svg.hashsalt"] = "render_figs"


class RenderError(Exception):
    """Any condition that should abort rendering with exit code 1."""


@dataclass(frozen=True)
class KindSchema:
    columns: tuple
    x_column: str
    level_column: str
    x_label: str
    y_label: str


KINDS = {
    "fidelity": KindSchema(
        columns=("eps_c", "eps_phi", "F_plus", "F_minus"),
        x_column="eps_phi", level_column="eps_c",
        x_label=r"$\varepsilon_\varphi$", y_label="F"),
    "ent_vs_input": KindSchema(
        columns=("eps_c", "eps_phi", "eps_t"),
        x_column="eps_phi", level_column="eps_c",
        x_label=r"$\varepsilon_\varphi$", y_label=r"$\varepsilon_t$"),
    "ent_vs_channel": KindSchema(
        columns=("eps_c", "eps_phi", "eps_t"),
        x_column="eps_c", level_column="eps_phi",
        x_label=r"$\varepsilon_c$", y_label=r"$\varepsilon_t$"),
}


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    csv_path: str
    out_path: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RenderError(
                f"unknown kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        suffix = Path(self.out_path).suffix.lower()
        if suffix not in (".png", ".svg"):
            raise RenderError(f"output must end in .png or .svg, got {self.out_path!r}")


def load_rows(csv_path: str, schema: KindSchema) -> list[dict]:
    """Read and validate the CSV; returns one {column: float} dict per row."""
    try:
        with open(csv_path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames
            if header is None:
                raise RenderError(f"{csv_path}: empty file, expected a header row")
            missing = [c for c in schema.columns if c not in header]
            if missing:
                raise RenderError(
                    f"{csv_path}: missing column(s) {', '.join(missing)} "
                    f"(header has {', '.join(header)})")
            rows = []
            for lineno, raw in enumerate(reader, start=2):
                try:
                    rows.append({c: float(raw[c]) for c in schema.columns})
                except (TypeError, ValueError):
                    raise RenderError(f"{csv_path}:{lineno}: non-numeric row {raw}")
    except OSError as exc:
        raise RenderError(f"cannot read {csv_path}: {exc}")
    if not rows:
        raise RenderError(f"{csv_path}: no data rows")
    return rows


def _series_by_level(rows: list[dict], schema: KindSchema) -> dict:
    """Group rows into per-level series, preserving CSV row order within a
    level and ordering levels from highest to lowest (top-to-bottom legend)."""
    series: dict = {}
    for row in rows:
        series.setdefault(row[schema.level_column], []).append(row)
    return {level: series[level] for level in sorted(series, reverse=True)}


def render(spec: PlotSpec) -> None:
    schema = KINDS[spec.kind]
    rows = load_rows(spec.csv_path, schema)
    series = _series_by_level(rows, schema)

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for level, pts in series.items():
        x = [p[schema.x_column] for p in pts]
        label = f"{schema.level_column} = {level:g}"
        if spec.kind == "fidelity":
            line, = ax.plot(x, [p["F_plus"] for p in pts], linestyle="-",
                            label=label)
            ax.plot(x, [p["F_minus"] for p in pts], linestyle="-.",
                    color=line.get_color())
        else:
            ax.plot(x, [p["eps_t"] for p in pts], linestyle="-", label=label)
    ax.set_xlabel(schema.x_label)
    ax.set_ylabel(schema.y_label)
    ax.legend()
    if spec.kind == "fidelity":
        ax.set_title("Teleportation fidelity branches (solid F+, dot-dashed F-)")
    else:
        ax.set_title("Entanglement of the delivered state")
    fig.tight_layout()
    try:
        fig.savefig(spec.out_path)
    except OSError as exc:
        raise RenderError(f"cannot write {spec.out_path}: {exc}")
    finally:
        plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figs",
        description="Render a qteleport CSV sweep as a PNG or SVG chart.")
    parser.add_argument("kind", help=f"one of: {', '.join(KINDS)}")
    parser.add_argument("csv_path", metavar="in.csv")
    parser.add_argument("out_path", metavar="out.(png|svg)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; this tool's contract is 0/1.
        return 0 if exc.code == 0 else 1
    try:
        spec = PlotSpec(args.kind, args.csv_path, args.out_path)
        render(spec)
    except RenderError as exc:
        print(f"render_figs: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
