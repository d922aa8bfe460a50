"""Command-line front end: every pipeline as a reproducible batch run.

Each subcommand samples or simulates with a pinned seed, writes its
artifacts (CSV with a header row, or JSON where the output is a nested
record), and drops a ``<command>.manifest.json`` next to them recording
the command, parameters, seed, package version, wall time and artifact
names.  Artifacts are deterministic functions of the configuration and
seed — including under ``--threads``, which only changes scheduling —
while manifests carry the (run-varying) timing fields.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__, acceptance, carousel, szego
from .airy import riccati_tw_cdf, tw_pde_solve
from .ensembles import (sample_beta_hermite, sample_circular_beta,
                        sample_schrodinger)
from .painleve import deformed_tw_table, tw2_cdf
from .rng import RngStream
from .stats import counts_histogram
from .tridiag import eigenvalues, semicircle_diagnostics, spectral_measure

SCHEMA = "betalab/1"


class ConfigError(ValueError):
    """Invalid flag combination or out-of-range parameter."""


class NumericalFailure(RuntimeError):
    """A pipeline reported a numerical failure (propagated to exit 3)."""


@dataclass
class RunConfig:
    """One validated batch run: the command plus every knob it reads."""

    command: str
    seed: int = 0
    beta: float = 2.0
    n: int = 0
    paths: int = 0
    grid: tuple[float, float, float] | None = None
    out: str = "."
    fmt: str = "csv"
    threads: int = 1
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt}")
        if not (-2**63 <= self.seed < 2**64):
            raise ConfigError("seed must fit in 64 bits")
        if self.threads < 1:
            raise ConfigError("need --threads >= 1")


def _parse_grid(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"grid must be numeric lo:hi:step, got {text!r}") \
            from exc
    if not (step > 0 and hi > lo):
        raise ConfigError("grid needs hi > lo and step > 0")
    return lo, hi, step


def _grid_points(grid: tuple[float, float, float]) -> np.ndarray:
    lo, hi, step = grid
    return lo + step * np.arange(int(math.floor((hi - lo) / step + 0.5)) + 1)


def _float_cell(v) -> str:
    return repr(float(v))


def _write_table(path: str, header: list[str], columns: list[np.ndarray],
                 fmt: str) -> None:
    """Columns to disk; CSV cells use shortest round-trip floats so the
    bytes are a pure function of the values."""
    if fmt == "json":
        payload = {name: [_jsonify(v) for v in col]
                   for name, col in zip(header, columns)}
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
        return
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([_float_cell(v) if isinstance(v, (float, np.floating))
                             else v for v in row])


def _jsonify(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def _artifact_name(base: str, fmt: str) -> str:
    return f"{base}.{fmt}" if fmt == "json" else f"{base}.csv"


def _out_path(config: RunConfig, name: str) -> str:
    import os
    os.makedirs(config.out, exist_ok=True)
    return os.path.join(config.out, name)


def _write_manifest(config: RunConfig, artifacts: list[str], headline: dict,
                    t0: float) -> None:
    manifest = {
        "schema": SCHEMA,
        "command": config.command,
        "parameters": {"beta": config.beta, "n": config.n,
                       "paths": config.paths, "grid": config.grid,
                       "format": config.fmt, "threads": config.threads,
                       **{k: _jsonify(v) if not isinstance(v, str) else v
                          for k, v in config.extras.items()}},
        "seed": config.seed,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "wall_time_s": round(time.time() - t0, 3),
        "artifacts": artifacts,
        "headline": {k: _jsonify(v) if not isinstance(v, (str, bool)) else v
                     for k, v in headline.items()},
    }
    with open(_out_path(config, f"{config.command}.manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")


# ----------------------------------------------------------------------
# subcommand bodies


def _cmd_sample(config: RunConfig) -> dict:
    model = config.extras["model"]
    stream = RngStream(config.seed, 0)
    name = _artifact_name("sample", config.fmt)
    if model == "beta-hermite":
        if config.n < 1:
            raise ConfigError("need --n >= 1")
        T = sample_beta_hermite(config.n, config.beta, stream)
        off = np.concatenate([T.offdiag, [np.nan]])
        _write_table(_out_path(config, name),
                     ["index", "diag", "offdiag"],
                     [np.arange(config.n), T.diag, off], config.fmt)
        head = {"model": model, "n": config.n}
    elif model == "circular-beta":
        if config.n < 1:
            raise ConfigError("need --n >= 1")
        coeffs = sample_circular_beta(config.n, config.beta, stream)
        _write_table(_out_path(config, name),
                     ["index", "re_alpha", "im_alpha"],
                     [np.arange(config.n), coeffs.alpha.real,
                      coeffs.alpha.imag], config.fmt)
        head = {"model": model, "n": config.n}
    elif model == "schrodinger":
        if config.n < 2:
            raise ConfigError("need --n >= 2")
        sigma = config.extras.get("sigma", 1.0)
        H = sample_schrodinger(config.n, sigma, "gaussian", stream)
        T = H.tridiagonal
        off = np.concatenate([T.offdiag, [np.nan]])
        _write_table(_out_path(config, name),
                     ["index", "diag", "offdiag"],
                     [np.arange(config.n), T.diag, off], config.fmt)
        head = {"model": model, "n": config.n, "sigma": sigma}
    else:
        raise ConfigError(f"unknown model {model!r}")
    return {"artifacts": [name], "headline": head}


def _cmd_spectrum(config: RunConfig) -> dict:
    if config.n < 1:
        raise ConfigError("need --n >= 1")
    stream = RngStream(config.seed, 0)
    T = sample_beta_hermite(config.n, config.beta, stream)
    name = _artifact_name("spectrum", config.fmt)
    if config.extras.get("weights"):
        meas = spectral_measure(T)
        _write_table(_out_path(config, name),
                     ["index", "eigenvalue", "weight"],
                     [np.arange(config.n), meas.points, meas.weights],
                     config.fmt)
        eigs = meas.points
    else:
        eigs = eigenvalues(T)
        _write_table(_out_path(config, name), ["index", "eigenvalue"],
                     [np.arange(config.n), eigs], config.fmt)
    diag = semicircle_diagnostics(eigs)
    return {"artifacts": [name],
            "headline": {"ks_semicircle": diag["ks_distance"],
                         "m2": diag["moments"][1]}}


def _cmd_tw(config: RunConfig) -> dict:
    if config.grid is None:
        raise ConfigError("tw needs --grid lo:hi:step")
    pts = _grid_points(config.grid)
    method = config.extras["method"]
    dt = config.extras.get("dt", 1e-3)
    artifacts = []
    headline: dict = {"method": method}
    if method == "riccati":
        if config.paths < 1:
            raise ConfigError("need --paths >= 1")
        table = riccati_tw_cdf(config.beta, np.inf, pts, config.paths,
                               RngStream(config.seed, 0), dt=dt,
                               threads=config.threads)
        name = _artifact_name("tw_riccati", config.fmt)
        _write_table(_out_path(config, name), ["t", "cdf", "ci_halfwidth"],
                     [pts, table.values, table.ci_halfwidth], config.fmt)
        artifacts.append(name)
        if not np.all(np.diff(table.values) >= 0):
            raise NumericalFailure("riccati cdf column is not monotone")
        headline["cdf_monotone"] = True
    elif method == "pde":
        table = tw_pde_solve(config.beta, (pts[0], max(pts[-1], 4.0)),
                             (-8.0, 8.0))
        keep = np.searchsorted(table.t_grid, pts)
        if np.max(np.abs(table.t_grid[keep] - pts)) > 1e-9:
            raise ConfigError("grid must align with the pde t-step 0.25")
        vals = table.values[keep, -1]
        name = _artifact_name("tw_pde", config.fmt)
        _write_table(_out_path(config, name), ["t", "cdf"], [pts, vals],
                     config.fmt)
        artifacts.append(name)
        headline["cdf_monotone"] = bool(np.all(np.diff(vals) >= 0))
    elif method == "painleve":
        if config.beta != 2.0:
            raise ConfigError("the closed-form curve is beta=2 only")
    else:
        raise ConfigError(f"unknown method {method!r}")
    if config.beta == 2.0:
        name = _artifact_name("tw_painleve", config.fmt)
        _write_table(_out_path(config, name), ["t", "cdf"],
                     [pts, tw2_cdf(np.clip(pts, -10.0, None))], config.fmt)
        artifacts.append(name)
    return {"artifacts": artifacts, "headline": headline}


def _cmd_spiked_tw(config: RunConfig) -> dict:
    if config.grid is None:
        raise ConfigError("spiked-tw needs --grid lo:hi:step")
    pts = _grid_points(config.grid)
    w = config.extras["w"]
    method = config.extras["method"]
    artifacts = []
    headline: dict = {"method": method, "w": w}
    if method == "riccati":
        if config.paths < 1:
            raise ConfigError("need --paths >= 1")
        table = riccati_tw_cdf(config.beta, w, pts, config.paths,
                               RngStream(config.seed, 0),
                               dt=config.extras.get("dt", 1e-3),
                               threads=config.threads)
        name = _artifact_name("spiked_riccati", config.fmt)
        _write_table(_out_path(config, name), ["t", "cdf", "ci_halfwidth"],
                     [pts, table.values, table.ci_halfwidth], config.fmt)
        artifacts.append(name)
    elif method != "product":
        raise ConfigError(f"unknown method {method!r}")
    if config.beta == 2.0:
        vals = deformed_tw_table(pts, np.array([w]))[:, 0]
        name = _artifact_name("spiked_product", config.fmt)
        _write_table(_out_path(config, name), ["t", "cdf"], [pts, vals],
                     config.fmt)
        artifacts.append(name)
    elif method == "product":
        raise ConfigError("the product form is beta=2 only")
    return {"artifacts": artifacts, "headline": headline}


def _cmd_sine(config: RunConfig) -> dict:
    lam = config.extras["lam"]
    if not lam > 0:
        raise ConfigError("need --lam > 0")
    if config.paths < 1:
        raise ConfigError("need --paths >= 1")
    counts = carousel.carousel_count_batch(
        lam, carousel.sine_beta(config.beta), carousel.MAX_DT,
        RngStream(config.seed, 0), config.paths)
    values, freq = counts_histogram(counts)
    name = _artifact_name("sine_counts", config.fmt)
    _write_table(_out_path(config, name), ["count", "frequency"],
                 [values, freq], config.fmt)
    mean = float(np.mean(counts))
    return {"artifacts": [name],
            "headline": {"mean_count": mean,
                         "intensity_target": lam / (2.0 * math.pi)}}


def _cmd_gap(config: RunConfig) -> dict:
    lam = config.extras["lam"]
    k = config.extras["k"]
    if not lam > 0:
        raise ConfigError("need --lam > 0")
    if config.paths < 1:
        raise ConfigError("need --paths >= 1")
    rec = carousel.gap_probability(config.beta, lam, k, config.paths,
                                   RngStream(config.seed, 0))
    rec["ci"] = list(rec["ci"])
    name = "gap.json"
    with open(_out_path(config, name), "w") as fh:
        json.dump({k2: _jsonify(v) if not isinstance(v, (dict, list, str))
                   else v for k2, v in rec.items()}, fh, indent=1)
        fh.write("\n")
    rate = config.beta * lam ** 2 / 64.0
    head = {"mc_estimate": rec["mc_estimate"]}
    if rec["mc_estimate"] > 0:
        head["neglog_over_rate"] = -math.log(rec["mc_estimate"]) / rate
    return {"artifacts": [name], "headline": head}


def _cmd_clt(config: RunConfig) -> dict:
    lam = config.extras["lam"]
    reps = config.extras["reps"]
    if not lam > 1:
        raise ConfigError("need --lam > 1")
    if reps < 2:
        raise ConfigError("need --reps >= 2")
    z = carousel.clt_statistic(config.beta, lam, reps,
                               RngStream(config.seed, 0))
    name = _artifact_name("clt_draws", config.fmt)
    _write_table(_out_path(config, name), ["z"], [z], config.fmt)
    var = float(np.var(z))
    target = 2.0 / (config.beta * math.pi ** 2)
    return {"artifacts": [name],
            "headline": {"variance": var, "target": target,
                         "ratio": var / target}}


def _cmd_schrodinger(config: RunConfig) -> dict:
    tau = config.extras["tau"]
    lam = config.extras["lam"]
    eps = config.extras["eps"]
    if not (tau > 0 and lam > 0 and eps > 0):
        raise ConfigError("need --tau, --lam, --eps > 0")
    if config.paths < 1:
        raise ConfigError("need --paths >= 1")
    rec = carousel.sch_statistics(tau, lam, eps, config.paths,
                                  RngStream(config.seed, 0))
    values, freq = counts_histogram(rec.pop("counts"))
    name = _artifact_name("schrodinger_counts", config.fmt)
    _write_table(_out_path(config, name), ["count", "frequency"],
                 [values, freq], config.fmt)
    rec["repulsion_ci"] = list(rec["repulsion_ci"])
    rep_name = "schrodinger.json"
    with open(_out_path(config, rep_name), "w") as fh:
        json.dump({k: _jsonify(v) if not isinstance(v, (dict, list, str))
                   else v for k, v in rec.items()}, fh, indent=1)
        fh.write("\n")
    return {"artifacts": [name, rep_name],
            "headline": {"repulsion_mc": rec["repulsion_mc"],
                         "repulsion_bound": rec["repulsion_bound"]}}


def _cmd_szego_check(config: RunConfig) -> dict:
    if config.n < 1:
        raise ConfigError("need --n >= 1")
    coeffs = sample_circular_beta(config.n, config.beta,
                                  RngStream(config.seed, 0))
    try:
        angles = szego.eigenangles(coeffs)
        path = szego.b_path(coeffs)
        rep = szego.dirac_spectrum_check(path, config.n, angles)
    except (szego.NumericalFailure, szego.BoundaryDegeneracy) as exc:
        raise NumericalFailure(str(exc)) from exc
    ang_name = _artifact_name("eigenangles", config.fmt)
    _write_table(_out_path(config, ang_name), ["index", "angle"],
                 [np.arange(config.n), angles], config.fmt)
    b_name = _artifact_name("bpath", config.fmt)
    _write_table(_out_path(config, b_name),
                 ["index", "re_b", "im_b"],
                 [np.arange(config.n), path.b.real, path.b.imag], config.fmt)
    rep_name = "dirac.json"
    with open(_out_path(config, rep_name), "w") as fh:
        json.dump({k: _jsonify(v) if not isinstance(v, (dict, list, str, bool))
                   else v for k, v in rep.items()}, fh, indent=1)
        fh.write("\n")
    return {"artifacts": [ang_name, b_name, rep_name],
            "headline": {"max_defect": rep["max_defect"],
                         "passed": rep["passed"]}}


def _cmd_verify(config: RunConfig) -> dict:
    names = config.extras.get("checks")
    if config.extras["suite"] != "acceptance":
        raise ConfigError("the only suite is 'acceptance'")
    results = acceptance.run_checks(names, threads=config.threads)
    print(acceptance.suite_report(results))
    records = []
    for r in results:
        rec = r.to_json()
        rec.pop("seconds")  # timing varies run to run; results must not
        records.append(rec)
    name = "verify_results.json"
    with open(_out_path(config, name), "w") as fh:
        json.dump(records, fh, indent=1)
        fh.write("\n")
    n_pass = sum(r.passed for r in results)
    if n_pass < len(results):
        raise NumericalFailure(
            f"{len(results) - n_pass} of {len(results)} checks failed")
    return {"artifacts": [name],
            "headline": {"passed": n_pass, "total": len(results)}}


_COMMANDS = {
    "sample": _cmd_sample,
    "spectrum": _cmd_spectrum,
    "tw": _cmd_tw,
    "spiked-tw": _cmd_spiked_tw,
    "sine": _cmd_sine,
    "gap": _cmd_gap,
    "clt": _cmd_clt,
    "schrodinger": _cmd_schrodinger,
    "szego-check": _cmd_szego_check,
    "verify": _cmd_verify,
}


def run(config: RunConfig) -> int:
    """Execute one validated run: artifacts, then the manifest."""
    t0 = time.time()
    body = _COMMANDS[config.command]
    out = body(config)
    _write_manifest(config, out["artifacts"], out["headline"], t0)
    return 0


# ----------------------------------------------------------------------
# report


def report(manifest_paths: list[str]) -> list[dict]:
    """One summary row per manifest, sorted by timestamp.

    A ``tw`` run whose artifact list carries both the Monte Carlo and the
    closed-form tables gets a ``sup_dev`` column joining the two.
    """
    import os
    rows = []
    for path in manifest_paths:
        try:
            with open(path) as fh:
                man = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"unreadable manifest {path}: {exc}") from exc
        row = {
            "command": man.get("command", "?"),
            "seed": man.get("seed"),
            "timestamp": man.get("timestamp", ""),
            "headline": man.get("headline", {}),
            "status": "ok",
        }
        if man.get("command") == "verify":
            head = man.get("headline", {})
            row["status"] = ("pass" if head.get("passed") == head.get("total")
                             else "fail")
        arts = man.get("artifacts", [])
        mc = next((a for a in arts if "riccati" in a), None)
        ref = next((a for a in arts if "painleve" in a or "product" in a), None)
        if mc and ref and mc.endswith(".csv") and ref.endswith(".csv"):
            base = os.path.dirname(path)
            t1, c1 = _read_cdf_csv(os.path.join(base, mc))
            t2, c2 = _read_cdf_csv(os.path.join(base, ref))
            if t1.size == t2.size and np.allclose(t1, t2):
                row["sup_dev"] = float(np.max(np.abs(c1 - c2)))
        rows.append(row)
    rows.sort(key=lambda r: r["timestamp"])
    return rows


def _read_cdf_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        it, ic = header.index("t"), header.index("cdf")
        t, c = [], []
        for line in reader:
            t.append(float(line[it]))
            c.append(float(line[ic]))
    return np.array(t), np.array(c)


def _format_report(rows: list[dict]) -> str:
    if not rows:
        return ""
    lines = []
    for r in rows:
        head = " ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                        for k, v in r["headline"].items())
        extra = f"  sup_dev={r['sup_dev']:.4g}" if "sup_dev" in r else ""
        lines.append(f"{r['timestamp']}  {r['command']:12s} "
                     f"seed={r['seed']}  {r['status']:4s}  {head}{extra}")
    return "\n".join(lines)


# ----------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betalab",
        description="random-matrix laboratory: sampling, operator-limit "
                    "simulation, closed-form cross-checks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, paths_default=None):
        p.add_argument("--seed", type=int, default=0,
                       help="64-bit stream seed (default 0)")
        p.add_argument("--beta", type=float, default=2.0)
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (speed only, never results)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"),
                       default="csv")
        if paths_default is not None:
            p.add_argument("--paths", type=int, default=paths_default)

    p = sub.add_parser("sample", help="one ensemble draw to disk")
    p.add_argument("--model", required=True,
                   choices=("beta-hermite", "circular-beta", "schrodinger"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=float, default=1.0,
                   help="noise amplitude (schrodinger model)")
    common(p)

    p = sub.add_parser("spectrum", help="eigenvalues (optionally the "
                                        "spectral measure) of one draw")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--weights", action="store_true",
                   help="also compute spectral-measure weights")
    common(p)

    p = sub.add_parser("tw", help="soft-edge distribution by one method")
    p.add_argument("--method", required=True,
                   choices=("riccati", "pde", "painleve"))
    p.add_argument("--grid", required=True, help="t grid as lo:hi:step")
    p.add_argument("--dt", type=float, default=1e-3)
    common(p, paths_default=10000)

    p = sub.add_parser("spiked-tw", help="rank-one-deformed edge law")
    p.add_argument("--method", required=True, choices=("riccati", "product"))
    p.add_argument("--w", type=float, required=True,
                   help="boundary coupling of the deformation")
    p.add_argument("--grid", required=True, help="t grid as lo:hi:step")
    p.add_argument("--dt", type=float, default=1e-3)
    common(p, paths_default=10000)

    p = sub.add_parser("sine", help="bulk point-process counts")
    p.add_argument("--lam", type=float, required=True, help="window length")
    common(p, paths_default=2000)

    p = sub.add_parser("gap", help="probability of at most k points")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--k", type=int, default=0)
    common(p, paths_default=20000)

    p = sub.add_parser("clt", help="normalized count fluctuations")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--reps", type=int, default=2000)
    common(p)

    p = sub.add_parser("schrodinger", help="critical bulk counting and "
                                           "repulsion statistics")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    common(p, paths_default=100000)

    p = sub.add_parser("szego-check", help="unitary spectrum: recursion, "
                                           "walk, boundary defects")
    p.add_argument("--n", type=int, required=True)
    common(p)

    p = sub.add_parser("verify", help="run the cross-validation suite")
    p.add_argument("--suite", default="acceptance")
    p.add_argument("--checks", default=None,
                   help="comma-separated subset of check names")
    common(p)

    p = sub.add_parser("report", help="summarize run manifests")
    p.add_argument("manifests", nargs="*", help="manifest JSON paths")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    extras = {}
    for key in ("model", "sigma", "weights", "method", "dt", "w", "lam",
                "k", "reps", "tau", "eps", "suite"):
        if hasattr(args, key):
            extras[key] = getattr(args, key)
    if getattr(args, "checks", None) is not None:
        extras["checks"] = args.checks.split(",")
    grid = _parse_grid(args.grid) if getattr(args, "grid", None) else None
    return RunConfig(command=args.command,
                     seed=args.seed,
                     beta=args.beta,
                     n=getattr(args, "n", 0),
                     paths=getattr(args, "paths", 0),
                     grid=grid,
                     out=args.out,
                     fmt=args.fmt,
                     threads=args.threads,
                     extras=extras)


def _fuse_grid_flag(argv: list[str]) -> list[str]:
    """Join ``--grid -5:2:0.25`` into one token; the bare value starts
    with a dash and the option parser would otherwise read it as a flag."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--grid" and i + 1 < len(argv):
            out.append("--grid=" + argv[i + 1])
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_fuse_grid_flag(list(argv)))
    try:
        if args.command == "report":
            rows = report(args.manifests)
            text = _format_report(rows)
            if text:
                print(text)
            return 0
        config = _config_from_args(args)
        return run(config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (NumericalFailure, carousel.LockingFailure,
            carousel.FitFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
