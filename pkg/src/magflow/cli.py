"""Config-driven entry point: classification runs and parameter sweeps.

A run is declared in a JSON file::

    {
      "model": {"kind": "constant", "K": -1.0, "b": 0.5,
                "chi": -2, "area": 12.566370614359172},
      "ensemble": {"count": 64, "seed": 0, "horizon": 200.0},
      "tolerances": {"integration": 1e-10, "green": 1e-9,
                     "gap_margin": 1e-4},
      "analyses": {"inequality": true, "conjugate": true, "gaps": true,
                   "contraction": true, "negativity": true},
      "output_dir": "out"
    }

Model kinds: ``constant`` (K, b, chi, area), ``torus`` (Lx, Ly, phi, b as
Fourier tables {"const": c, "cos": {"m,n": amp}, "sin": {...}}), and
``profile`` (kappa as a 1D Fourier table {"const": c, "omega": w,
"cos": {"j": amp}, "sin": {...}} plus k_bound). Every model accepts an
optional ``b_scale`` multiplying the intensity.

Adding a ``sweep`` section {"parameter": "model.b", "grid": [...]} turns
the run into a sweep: one classification per grid value, aggregated into
``sweep.csv``. Exit status: 0 when a verdict was reached (either way),
2 when Inconclusive, 1 on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

from .anosov import SamplingConfig, classify, ensemble_states
from .errors import ConfigError, MagflowError
from .flow import integrate_orbit
from .fourier import FourierSeries1D, FourierSeries2D
from .geometry import AbstractProfile, ConformalTorus, ConstantCurvature

SCHEMA_VERSION = 1


def _parse_coeffs_2d(table, key):
    out = {}
    for k, v in (table or {}).items():
        try:
            m, n = (int(p) for p in k.split(","))
        except Exception:
            raise ConfigError("bad mode key %r under %s (want 'm,n')" % (k, key), key)
        out[(m, n)] = float(v)
    return out


def _parse_coeffs_1d(table, key):
    out = {}
    for k, v in (table or {}).items():
        try:
            j = int(k)
        except Exception:
            raise ConfigError("bad harmonic key %r under %s (want integer)" % (k, key), key)
        out[j] = float(v)
    return out


def _series_2d(spec, Lx, Ly, key):
    spec = spec or {}
    return FourierSeries2D(
        Lx=Lx, Ly=Ly,
        const=float(spec.get("const", 0.0)),
        cos_coeffs=_parse_coeffs_2d(spec.get("cos"), key + ".cos"),
        sin_coeffs=_parse_coeffs_2d(spec.get("sin"), key + ".sin"),
    )


def build_model(spec: dict):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("model.kind is required", "model.kind")
    kind = spec["kind"]
    scale = float(spec.get("b_scale", 1.0))
    if kind == "constant":
        for k in ("K", "b", "chi", "area"):
            if k not in spec:
                raise ConfigError("model.%s is required for constant models" % k,
                                  "model." + k)
        try:
            return ConstantCurvature(
                K=float(spec["K"]), b=scale * float(spec["b"]),
                chi=int(spec["chi"]), area=float(spec["area"]),
            )
        except ValueError as exc:
            raise ConfigError("model: %s" % exc, "model")
    if kind == "torus":
        Lx = float(spec.get("Lx", 1.0))
        Ly = float(spec.get("Ly", 1.0))
        if Lx <= 0 or Ly <= 0:
            raise ConfigError("model periods must be positive", "model.Lx")
        phi = _series_2d(spec.get("phi"), Lx, Ly, "model.phi")
        b = _series_2d(spec.get("b"), Lx, Ly, "model.b")
        if scale != 1.0:
            b = FourierSeries2D(
                Lx=Lx, Ly=Ly, const=scale * b.const,
                cos_coeffs={k: scale * v for k, v in b.cos_coeffs.items()},
                sin_coeffs={k: scale * v for k, v in b.sin_coeffs.items()},
            )
        return ConformalTorus(phi=phi, b=b)
    if kind == "profile":
        kspec = spec.get("kappa")
        if not isinstance(kspec, dict):
            raise ConfigError("model.kappa table is required for profile models",
                              "model.kappa")
        if scale != 1.0:
            raise ConfigError("b_scale is not defined for profile models",
                              "model.b_scale")
        series = FourierSeries1D(
            const=float(kspec.get("const", 0.0)),
            omega=float(kspec.get("omega", 1.0)),
            cos_coeffs=_parse_coeffs_1d(kspec.get("cos"), "model.kappa.cos"),
            sin_coeffs=_parse_coeffs_1d(kspec.get("sin"), "model.kappa.sin"),
        )
        k_bound = spec.get("k_bound")
        if k_bound is None:
            k_bound = math.sqrt(max(0.0, -series.sampled_min()) + 1e-9)
        return AbstractProfile(kappa=series, k_bound=float(k_bound),
                               chi=spec.get("chi"), area=spec.get("area"))
    raise ConfigError("unknown model.kind %r" % kind, "model.kind")


def build_sampling(cfg: dict) -> SamplingConfig:
    ens = cfg.get("ensemble", {})
    tols = cfg.get("tolerances", {})
    ana = cfg.get("analyses", {})
    sc = SamplingConfig(
        ensemble_count=int(ens.get("count", 64)),
        seed=int(ens.get("seed", 0)),
        horizon=float(ens.get("horizon", 200.0)),
        integration_tol=float(tols.get("integration", 1e-10)),
        green_tol=float(tols.get("green", 1e-9)),
        gap_margin=float(tols.get("gap_margin", 1e-4)),
        check_inequality=bool(ana.get("inequality", True)),
        check_conjugate=bool(ana.get("conjugate", True)),
        check_gaps=bool(ana.get("gaps", True)),
        check_contraction=bool(ana.get("contraction", True)),
        check_negativity=bool(ana.get("negativity", True)),
    )
    if sc.ensemble_count < 1:
        raise ConfigError("ensemble.count must be >= 1", "ensemble.count")
    if sc.horizon <= 0:
        raise ConfigError("ensemble.horizon must be positive", "ensemble.horizon")
    for name, val in (("integration", sc.integration_tol), ("green", sc.green_tol),
                      ("gap_margin", sc.gap_margin)):
        if val <= 0:
            raise ConfigError("tolerances.%s must be strictly positive" % name,
                              "tolerances." + name)
    return sc


def validate_config(cfg: dict) -> None:
    if not isinstance(cfg, dict):
        raise ConfigError("top-level config must be an object", "")
    if "model" not in cfg:
        raise ConfigError("model section is required", "model")
    build_model(cfg["model"])
    build_sampling(cfg)
    sweep = cfg.get("sweep")
    if sweep is not None:
        if "parameter" not in sweep or "grid" not in sweep:
            raise ConfigError("sweep needs 'parameter' and 'grid'", "sweep")
        grid = sweep["grid"]
        if not isinstance(grid, list) or len(grid) < 1:
            raise ConfigError("sweep.grid must be a nonempty list", "sweep.grid")
        diffs = [b - a for a, b in zip(grid, grid[1:])]
        if any(d <= 0 for d in diffs) and any(d >= 0 for d in diffs) and len(grid) > 1:
            if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
                raise ConfigError("sweep.grid must be strictly monotone", "sweep.grid")


def _set_dotted(cfg: dict, path: str, value):
    parts = path.split(".")
    node = cfg
    for p in parts[:-1]:
        if p not in node or not isinstance(node[p], dict):
            raise ConfigError("sweep.parameter path %r not found" % path,
                              "sweep.parameter")
        node = node[p]
    node[parts[-1]] = value


def _json_dump(obj, path: Path):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_summary(path: Path, lines):
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def run(cfg: dict, workers: int = 1, echo=None) -> int:
    """Single classification run; writes report.json, summary.txt and
    per-orbit CSV series into the output directory."""
    validate_config(cfg)
    model = build_model(cfg["model"])
    sampling = build_sampling(cfg)
    outdir = Path(cfg.get("output_dir", "out"))
    outdir.mkdir(parents=True, exist_ok=True)

    report = classify(model, sampling, workers=workers)

    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "report": report.to_dict(),
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    _json_dump(payload, outdir / "report.json")

    lines = [
        "verdict: %s" % report.verdict,
        "reason:  %s" % report.reason,
    ]
    if report.inequality is not None:
        lines.append(
            "integral inequality: lhs = %.12g, rhs = %.12g, passes = %s"
            % (report.inequality["lhs"], report.inequality["rhs"],
               report.inequality["passes"])
        )
    for o in report.orbits:
        if o.conjugate_time is not None:
            lines.append("orbit %d: conjugate point at t = %.9g"
                         % (o.orbit_id, o.conjugate_time))
        elif o.gap is not None:
            lines.append(
                "orbit %d: gap = %.9g (converged=%s)"
                % (o.orbit_id, o.gap, o.gap_converged)
            )
        elif o.error:
            lines.append("orbit %d: error %s" % (o.orbit_id, o.error))
    _write_summary(outdir / "summary.txt", lines)

    if cfg.get("export_orbits", True) and not isinstance(model, AbstractProfile):
        states = ensemble_states(model, sampling.ensemble_count, sampling.seed)
        for i, v0 in enumerate(states[: int(cfg.get("export_orbit_limit", 8))]):
            trace = integrate_orbit(model, v0, sampling.horizon,
                                    sampling.integration_tol)
            trace.to_csv(outdir / ("orbit_%03d.csv" % i))

    if echo:
        echo("verdict: %s (%s)" % (report.verdict, report.reason))
    return 0 if report.verdict in ("NumericallyAnosov", "NotAnosov") else 2


def _sweep_point(args):
    base_cfg, param, value, workers = args
    cfg = copy.deepcopy(base_cfg)
    cfg.pop("sweep", None)
    _set_dotted(cfg, param, value)
    model = build_model(cfg["model"])
    sampling = build_sampling(cfg)
    report = classify(model, sampling, workers=1)
    gaps = [o.gap for o in report.orbits if o.gap is not None]
    cs = [o.contraction.c for o in report.orbits if o.contraction is not None]
    ineq = report.inequality or {}
    return {
        "parameter": value,
        "verdict": report.verdict,
        "min_gap": min(gaps) if gaps else "",
        "fitted_c": min(cs) if cs else "",
        "inequality_lhs": ineq.get("lhs", ""),
        "inequality_rhs": ineq.get("rhs", ""),
    }


def sweep(cfg: dict, workers: int = 1, echo=None) -> int:
    """Classification per grid value of the swept parameter; one CSV row
    per point in grid order."""
    validate_config(cfg)
    spec = cfg.get("sweep")
    if spec is None:
        raise ConfigError("sweep section missing", "sweep")
    param, grid = spec["parameter"], spec["grid"]
    outdir = Path(cfg.get("output_dir", "out"))
    outdir.mkdir(parents=True, exist_ok=True)

    jobs = [(cfg, param, v, 1) for v in grid]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]

    fields = ["parameter", "verdict", "min_gap", "fitted_c",
              "inequality_lhs", "inequality_rhs"]
    with open(outdir / "sweep.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v)
                             for k, v in row.items()})

    lines = ["%s = %r -> %s" % (param, r["parameter"], r["verdict"]) for r in rows]
    _write_summary(outdir / "summary.txt", lines)
    if echo:
        for ln in lines:
            echo(ln)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="magflow",
        description="Certify or refute uniform hyperbolicity of a magnetic "
                    "flow declared in a JSON config.",
    )
    parser.add_argument("config", help="path to the JSON run configuration")
    parser.add_argument("--output-dir", help="override the config output_dir")
    parser.add_argument("--workers", type=int, default=1,
                        help="parallel workers for sweep points and orbits")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)

    echo = print if args.verbose else None
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print("error: cannot read config %s: %s" % (args.config, exc),
              file=sys.stderr)
        return 1
    if args.output_dir:
        cfg["output_dir"] = args.output_dir
    try:
        if cfg.get("sweep") is not None:
            return sweep(cfg, workers=args.workers, echo=echo)
        return run(cfg, workers=args.workers, echo=echo)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return 1
    except MagflowError as exc:
        print("run failed: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
