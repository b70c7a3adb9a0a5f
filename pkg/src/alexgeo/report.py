"""Config-driven parameter sweeps with delimited output.

A sweep runs one gallery family over a list of sequence indices and writes,
per run, a CSV table (one row per index, the authoritative numbers), a JSON
manifest, a JSON column schema and one SVG plot per populated metric column.
Rows are computed independently: a failure inside one row marks that row
``failed`` and leaves the others intact. All randomness is derived from the
configured seed, so re-running a sweep reproduces every output byte for byte.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from importlib import metadata as _ilmd

import numpy as np

from .collar import adaptive_profile, radial_bound, tangential_bound
from .curvature import estimate_lower_bound
from .gallery import ExampleSpec, generate, ground_truth, wrapping_half_length
from .gh import ApproxMap, gh_bounds
from .metric_core import FiniteMetricSpace, metric_sample, radii_report

# families whose embedding winds around the origin of the first two
# coordinates, so the wrap column is meaningful
WRAPPING_FAMILIES = ("plane_minus_ball", "thin_cylinder", "thin_torus")

CSV_COLUMNS: tuple[tuple[str, str], ...] = (
    ("i", "sequence index of the row"),
    ("status", "ok, or failed when this row raised"),
    ("n_points", "vertex count of the generated sample"),
    ("n_edges", "edge count of the generated sample"),
    ("h", "mesh scale the generator aimed for"),
    ("diameter", "diameter of the farthest-point subsample"),
    ("inradius", "largest intrinsic distance to the boundary"),
    ("max_reach", "largest one-sided reach over boundary footpoints"),
    ("curv_k_lower", "largest k passing the quadruple test on the subsample"),
    ("collar_t0", "collar depth of the adaptive profile for this index"),
    ("collar_eps", "warp floor of the adaptive profile"),
    ("radial_bound", "lower bound for radial curvature in the collar"),
    ("radial_certified", "1 when the radial bound is certified"),
    ("tangential_bound", "lower bound for tangential curvature in the collar"),
    ("tangential_certified", "1 when the tangential bound is certified"),
    ("gh_point_lower", "lower GH bound against the one-point space"),
    ("gh_point_upper", "upper GH bound against the one-point space"),
    ("wrap_half_length", "half-length of the loop winding around the hole"),
    ("error", "exception text when status is failed"),
)

COLUMN_NAMES = tuple(name for name, _ in CSV_COLUMNS)

PLOT_COLUMNS = (
    "diameter",
    "inradius",
    "max_reach",
    "curv_k_lower",
    "radial_bound",
    "tangential_bound",
    "gh_point_lower",
    "gh_point_upper",
    "wrap_half_length",
)

MANIFEST_SCHEMA = "alexgeo-report/1"
TABLE_SCHEMA = "alexgeo-report-columns/1"

# per-row seed stride; any odd prime much larger than realistic index lists
SEED_STRIDE = 9973


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one sweep."""

    name: str = "sweep"
    family: str = "thin_torus"
    indices: tuple[int, ...] = (4, 8, 16)
    h: float | None = None
    seed: int = 0
    sample_cap: int = 600
    curvature: bool = True
    collar: bool = True
    gh: bool = True
    wrap: bool = True
    curvature_samples: int = 400
    params: tuple[tuple[str, str], ...] = ()

    def family_params(self) -> dict:
        out = {}
        for key, raw in self.params:
            try:
                out[key] = int(raw)
            except ValueError:
                try:
                    out[key] = float(raw)
                except ValueError:
                    out[key] = raw
        return out


_SECTIONS = {
    "experiment": ("name", "family", "indices", "h", "seed", "sample_cap"),
    "features": ("curvature", "collar", "gh", "wrap"),
    "curvature": ("samples",),
    "params": None,  # free-form family arguments
}


def config_to_ini(cfg: ExperimentConfig) -> str:
    cp = configparser.ConfigParser()
    cp["experiment"] = {
        "name": cfg.name,
        "family": cfg.family,
        "indices": ", ".join(str(i) for i in cfg.indices),
        "h": "auto" if cfg.h is None else repr(cfg.h),
        "seed": str(cfg.seed),
        "sample_cap": str(cfg.sample_cap),
    }
    cp["features"] = {
        "curvature": str(cfg.curvature).lower(),
        "collar": str(cfg.collar).lower(),
        "gh": str(cfg.gh).lower(),
        "wrap": str(cfg.wrap).lower(),
    }
    cp["curvature"] = {"samples": str(cfg.curvature_samples)}
    cp["params"] = dict(sorted(cfg.params))
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def save_config(cfg: ExperimentConfig, path: str) -> None:
    with open(path, "w") as f:
        f.write(config_to_ini(cfg))


def _bad(section: str, key: str, raw: str, want: str) -> ValueError:
    return ValueError(f"config [{section}] {key} = {raw!r}: expected {want}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate an INI sweep description.

    Unknown sections or keys are errors; a config written by
    `config_to_ini` parses back to an equal ExperimentConfig.
    """
    cp = configparser.ConfigParser()
    cp.read_string(text)
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ValueError(f"config: unknown section [{section}]")
        allowed = _SECTIONS[section]
        if allowed is not None:
            for key in cp[section]:
                if key not in allowed:
                    raise ValueError(f"config: unknown key {key!r} in [{section}]")
    cfg = ExperimentConfig()
    if cp.has_section("experiment"):
        sec = cp["experiment"]
        name = sec.get("name", cfg.name)
        family = sec.get("family", cfg.family)
        raw = sec.get("indices", None)
        if raw is None:
            indices = cfg.indices
        else:
            try:
                indices = tuple(int(tok) for tok in raw.split(",") if tok.strip())
            except ValueError:
                raise _bad("experiment", "indices", raw, "comma-separated integers")
            if not indices:
                raise _bad("experiment", "indices", raw, "at least one integer")
        raw = sec.get("h", "auto")
        if raw.strip().lower() == "auto":
            h = None
        else:
            try:
                h = float(raw)
            except ValueError:
                raise _bad("experiment", "h", raw, "a float or 'auto'")
        try:
            seed = int(sec.get("seed", str(cfg.seed)))
        except ValueError:
            raise _bad("experiment", "seed", sec.get("seed"), "an integer")
        try:
            cap = int(sec.get("sample_cap", str(cfg.sample_cap)))
        except ValueError:
            raise _bad("experiment", "sample_cap", sec.get("sample_cap"), "an integer")
        if cap < 4:
            raise _bad("experiment", "sample_cap", str(cap), "an integer >= 4")
        cfg = replace(
            cfg, name=name, family=family, indices=indices, h=h, seed=seed,
            sample_cap=cap,
        )
    if cp.has_section("features"):
        sec = cp["features"]
        vals = {}
        for key in ("curvature", "collar", "gh", "wrap"):
            if key in sec:
                try:
                    vals[key] = sec.getboolean(key)
                except ValueError:
                    raise _bad("features", key, sec.get(key), "a boolean")
        cfg = replace(cfg, **vals)
    if cp.has_section("curvature") and "samples" in cp["curvature"]:
        raw = cp["curvature"]["samples"]
        try:
            cfg = replace(cfg, curvature_samples=int(raw))
        except ValueError:
            raise _bad("curvature", "samples", raw, "an integer")
    if cp.has_section("params"):
        cfg = replace(cfg, params=tuple(sorted(cp["params"].items())))
    return cfg


def load_config(path: str) -> ExperimentConfig:
    with open(path) as f:
        return parse_config(f.read())


# ----------------------------------------------------------------- rows


def _blank_row(i: int) -> dict:
    row = {name: "" for name in COLUMN_NAMES}
    row["i"] = i
    row["status"] = "ok"
    return row


def _point_space() -> FiniteMetricSpace:
    return FiniteMetricSpace(np.zeros((1, 1)))


def _compute_row(cfg: ExperimentConfig, i: int) -> dict:
    row = _blank_row(i)
    seed = cfg.seed + SEED_STRIDE * i
    spec = ExampleSpec(cfg.family, i=i, h=cfg.h, params=cfg.family_params())
    m = generate(spec)
    row["n_points"] = m.n
    row["n_edges"] = len(m.edges)
    row["h"] = float(m.meta.get("h", m.mesh_scale))
    X, _ = metric_sample(m, cfg.sample_cap, seed=seed)
    row["diameter"] = X.diameter
    if m.boundary_mask.any():
        rep = radii_report(m)
        row["inradius"] = rep.inradius
        row["max_reach"] = rep.max_reach
    if cfg.curvature:
        est = estimate_lower_bound(
            X, n_samples=cfg.curvature_samples, seed=seed, mesh_scale=m.mesh_scale
        )
        row["curv_k_lower"] = est.k_lower
    if cfg.collar:
        truth = ground_truth(spec)
        k_minus = min(0.0, float(truth.get("interior_curv", 0.0)))
        lam = truth.get("lambda")
        prof = adaptive_profile(i, lambda_minus=None if lam is None else -float(lam))
        rad = radial_bound(prof)
        tan = tangential_bound(prof, k_minus)
        row["collar_t0"] = prof.t0
        row["collar_eps"] = prof.eps
        row["radial_bound"] = rad.value
        row["radial_certified"] = int(rad.certified)
        row["tangential_bound"] = tan.value
        row["tangential_certified"] = int(tan.certified)
    if cfg.gh:
        to_point = ApproxMap(X, _point_space(), np.zeros(X.n, dtype=int))
        b = gh_bounds(X, _point_space(), f=to_point)
        row["gh_point_lower"] = b.lower
        row["gh_point_upper"] = b.upper
    if cfg.wrap and cfg.family in WRAPPING_FAMILIES and m.points is not None:
        row["wrap_half_length"] = wrapping_half_length(m, 0)
    return row


def run_row(cfg: ExperimentConfig, i: int) -> dict:
    """One sweep row; never raises, failures are recorded in the row."""
    try:
        return _compute_row(cfg, i)
    except Exception as exc:  # noqa: BLE001 - row isolation is the contract
        row = _blank_row(i)
        row["status"] = "failed"
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row


# --------------------------------------------------------------- output


def _fmt(value) -> str:
    if value == "" or value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def write_rows_csv(rows: list[dict], path: str) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(COLUMN_NAMES)
        for row in rows:
            w.writerow([_fmt(row[name]) for name in COLUMN_NAMES])


def _write_schema(path: str) -> None:
    doc = {
        "schema": TABLE_SCHEMA,
        "columns": [{"name": n, "description": d} for n, d in CSV_COLUMNS],
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def _render_plots(cfg: ExperimentConfig, rows: list[dict], out_dir: str) -> list[str]:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = cfg.name
    written = []
    for col in PLOT_COLUMNS:
        xs, ys = [], []
        for row in rows:
            v = row[col]
            if row["status"] == "ok" and v != "" and math.isfinite(float(v)):
                xs.append(row["i"])
                ys.append(float(v))
        if not xs:
            continue
        fig, ax = plt.subplots(figsize=(4.0, 3.0))
        ax.plot(xs, ys, "o-")
        ax.set_xlabel("i")
        ax.set_ylabel(col)
        ax.set_title(f"{cfg.name}: {col}")
        fig.tight_layout()
        fname = f"{cfg.name}_{col}.svg"
        fig.savefig(
            os.path.join(out_dir, fname), format="svg", metadata={"Date": None}
        )
        plt.close(fig)
        written.append(fname)
    return written


def _version(dist: str) -> str:
    try:
        return _ilmd.version(dist)
    except _ilmd.PackageNotFoundError:
        return "unknown"


@dataclass
class ReportResult:
    rows: list[dict]
    files: list[str] = field(default_factory=list)
    n_failed: int = 0

    @property
    def exit_code(self) -> int:
        return 2 if self.n_failed else 0


def run_report(
    cfg: ExperimentConfig, out_dir: str, jobs: int = 1, plots: bool = True
) -> ReportResult:
    """Execute a sweep and write csv/schema/manifest/svg files into out_dir.

    Rows run in index order; with jobs > 1 they run in worker processes and
    are merged back in index order, so the outputs do not depend on jobs.
    """
    os.makedirs(out_dir, exist_ok=True)
    if jobs > 1 and len(cfg.indices) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(partial(run_row, cfg), cfg.indices))
    else:
        rows = [run_row(cfg, i) for i in cfg.indices]

    csv_name = f"{cfg.name}.csv"
    schema_name = f"{cfg.name}_columns.json"
    manifest_name = f"{cfg.name}_manifest.json"
    write_rows_csv(rows, os.path.join(out_dir, csv_name))
    _write_schema(os.path.join(out_dir, schema_name))
    plot_names = _render_plots(cfg, rows, out_dir) if plots else []

    files = [csv_name, schema_name] + plot_names
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "name": cfg.name,
        "family": cfg.family,
        "indices": list(cfg.indices),
        "seed": cfg.seed,
        "config": config_to_ini(cfg),
        "files": sorted(files),
        "rows": [
            {"i": r["i"], "status": r["status"], "error": r["error"]} for r in rows
        ],
        "versions": {
            "alexgeo": _version("alexgeo"),
            "numpy": np.__version__,
            "scipy": _version("scipy"),
            "matplotlib": _version("matplotlib"),
        },
    }
    with open(os.path.join(out_dir, manifest_name), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    n_failed = sum(1 for r in rows if r["status"] != "ok")
    return ReportResult(rows=rows, files=files + [manifest_name], n_failed=n_failed)
