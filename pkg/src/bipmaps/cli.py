"""Command-line entry point: sample maps, run verification suites, scaling tables.

All randomness comes from ``--seed``; replica ``i`` draws from the stream
``SeedSequence(seed, spawn_key=(i,))`` so results do not depend on ``--jobs``.
Outputs go to ``--out`` or, when it is omitted, to a default file name inside
``$BIPMAPS_OUT`` (current directory if unset).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import FORMAT_VERSION, __version__
from .bijection import double_sweep_diameter, forest_to_map
from .degrees import (
    DegreeSequence,
    FaceDegreeSequence,
    InvalidDegreeSequence,
    count_forests,
    count_labelled_forests,
    face_to_forest_degrees,
    family_generator,
    forest_to_face_degrees,
)
from .oracle import BudgetExceeded, EnumerationBudget, enumerate_forests, enumerate_labelled_forests
from .sampler import sample_labelled_forest
from .stats import check_spine_mean, default_jobs, replica_rng, scaling_table, within_factor
from .suites import SUITES

OUT_ENV = "BIPMAPS_OUT"
FAMILY_KEYS = ("p", "q", "alpha", "rho", "family_seed")


class ConfigError(ValueError):
    """Invalid command-line or persisted configuration."""


@dataclass
class ExperimentConfig:
    """Everything needed to re-run a command bit for bit."""

    command: str
    target: str | None = None
    degrees: str | None = None
    faces: str | None = None
    family: str | None = None
    n: int | None = None
    family_params: dict = field(default_factory=dict)
    seed: int = 0
    replicas: int | None = None
    jobs: int | None = None
    out: str | None = None
    format: str = "json"
    params: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        obj = json.loads(text)
        names = {f.name for f in fields(cls)}
        unknown = set(obj) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)


# -- degree-sequence sources ----------------------------------------------------

def _load_json_arg(text: str):
    p = Path(text)
    if not text.lstrip().startswith(("{", "[")) and p.exists():
        text = p.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse degree sequence JSON: {exc}") from None


def _family_params(cfg: ExperimentConfig) -> dict:
    prm = {k: v for k, v in cfg.family_params.items() if v is not None}
    if "family_seed" in prm:
        prm["seed"] = prm.pop("family_seed")
    return prm


def resolve_degrees(cfg: ExperimentConfig, required: bool = True) -> tuple[FaceDegreeSequence, DegreeSequence] | None:
    sources = [s for s in (cfg.degrees, cfg.faces, cfg.family) if s is not None]
    if len(sources) > 1:
        raise ConfigError("give only one of --degrees, --faces, --family")
    if cfg.degrees is not None:
        ds = DegreeSequence.from_json_obj(_load_json_arg(cfg.degrees))
        return forest_to_face_degrees(ds), ds
    if cfg.faces is not None:
        fds = FaceDegreeSequence.from_json_obj(_load_json_arg(cfg.faces))
        return fds, face_to_forest_degrees(fds)
    if cfg.family is not None:
        if cfg.n is None:
            raise ConfigError("--family needs --n")
        fds = family_generator(cfg.family, cfg.n, _family_params(cfg))
        return fds, face_to_forest_degrees(fds)
    if required:
        raise ConfigError("a degree sequence is required: use --degrees, --faces or --family")
    return None


# -- output helpers -------------------------------------------------------------

def _out_path(cfg: ExperimentConfig, default_name: str) -> Path:
    if cfg.out:
        return Path(cfg.out)
    return Path(os.environ.get(OUT_ENV, ".")) / default_name


def _rows_csv(rows: list[dict]) -> str:
    keys: list[str] = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (json.dumps(v) if isinstance(v, (dict, list, tuple)) else v) for k, v in r.items()})
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _sibling(path: Path, tag: str, ext: str) -> Path:
    return path.with_name(f"{path.stem}.{tag}.{ext}")


def _jobs(cfg: ExperimentConfig) -> int:
    return cfg.jobs if cfg.jobs else default_jobs()


# -- commands -------------------------------------------------------------------

def _forest_csv(lf) -> str:
    f = lf.forest
    rows = "".join(f"{x + 1},{int(f.parent[x]) + 1},{int(f.degrees[x])},{int(lf.labels[x])}\n"
                   for x in range(f.n_vertices))
    return "vertex,parent,children,label\n" + rows


def cmd_sample(cfg: ExperimentConfig) -> int:
    fds, ds = resolve_degrees(cfg)
    replicas = cfg.replicas or 1
    base = _out_path(cfg, "map." + cfg.format)
    summaries = []
    for i in range(replicas):
        rng = replica_rng(cfg.seed, i)
        lf = sample_labelled_forest(ds, rng)
        pm = forest_to_map(lf)
        m = pm.map
        path = base if replicas == 1 else base.with_name(f"{base.stem}-{i:04d}{base.suffix}")
        span = int(lf.labels.max() - lf.labels.min()) + 1
        summary = {
            "replica": i, "seed": cfg.seed, "vertices_forest": ds.n_vertices, "edges_forest": ds.n_edges,
            "sigma2": ds.global_variance, "max_degree": ds.max_degree, "roots": ds.roots,
            "map_edges": m.n_edges, "map_vertices": m.n_vertices, "map_faces": m.n_faces,
            "diameter_lower": double_sweep_diameter(m, rng),
            "diameter_upper": 2 * span,
        }
        if cfg.format == "csv":
            _write(path, "u,v\n" + m.edges_csv())
            _write(_sibling(path, "forest", "csv"), _forest_csv(lf))
            _write(_sibling(path, "summary", "csv"), _rows_csv([summary]))
        else:
            _write(path, _dump(m.to_json_obj()))
            _write(_sibling(path, "forest", "json"), _dump(lf.to_json_obj()))
            _write(_sibling(path, "summary", "json"), _dump(summary))
        summaries.append(summary)
        print(f"wrote {path}: " + ", ".join(f"{k}={v}" for k, v in summary.items() if k != "replica"))
    return 0


# flags that map onto suite keyword arguments
SUITE_REPLICA_KEY = {"uniformity": "trials", "spine": "draws"}


def cmd_verify(cfg: ExperimentConfig) -> int:
    name = cfg.target
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    kw = dict(cfg.params)
    kw["seed"] = cfg.seed
    kw["jobs"] = _jobs(cfg)
    if cfg.replicas is not None:
        kw[SUITE_REPLICA_KEY.get(name, "replicas")] = cfg.replicas
    if cfg.n is not None:
        kw["n"] = cfg.n
    if cfg.family is not None:
        prm = _family_params(cfg)
        family_generator(cfg.family, cfg.n or 1, prm)  # validate early
        kw["family"], kw["params"] = cfg.family, prm
        kw["families"] = ((cfg.family, prm),)
    res = SUITES[name](**kw)
    path = _out_path(cfg, f"verify-{name}.{cfg.format}")
    if cfg.format == "csv":
        if res.csv is not None:
            text = res.csv
        elif isinstance(res.report.get("rows"), list):
            text = _rows_csv(res.report["rows"])
        else:
            text = _rows_csv([{"suite": res.name, "ok": res.ok, "summary": res.summary}])
    else:
        text = _dump({"suite": res.name, "ok": res.ok, "summary": res.summary, "seed": cfg.seed,
                      "report": res.report})
    _write(path, text)
    verdict = "PASS" if res.ok else "FAIL"
    print(f"{name}: {verdict} ({res.summary})")
    if not res.ok:
        print(f"failing report: {path}", file=sys.stderr)
        return 1
    return 0


def cmd_scaling(cfg: ExperimentConfig) -> int:
    prm = dict(cfg.params)
    sizes = prm.pop("sizes", None) or [2**10, 2**12, 2**14]
    if any(int(s) < 1 for s in sizes):
        raise ConfigError("scaling sizes must be positive")
    family = cfg.family or "2p-angulation"
    fam_prm = _family_params(cfg)
    ladder = bool(prm.pop("ladder", False))
    rows = scaling_table(family, [int(s) for s in sizes], fam_prm, cfg.replicas or 30, cfg.seed,
                         _jobs(cfg), int(prm.pop("pairs", 200)), ladder=ladder,
                         holder_replicas=int(prm.pop("holder_replicas", 0)))
    path = _out_path(cfg, f"scaling.{cfg.format}")
    ok = True
    if len(rows) > 1:
        stable = {"diameter": within_factor([r["diameter_median"] for r in rows]),
                  "two_point": within_factor([r["two_point_median"] for r in rows])}
        ok = all(stable.values())
    else:
        stable = {}
    if cfg.format == "csv":
        _write(path, _rows_csv(rows))
    else:
        _write(path, _dump({"family": family, "params": fam_prm, "ladder": ladder, "seed": cfg.seed,
                            "rows": rows, "within_factor_2": stable}))
    for r in rows:
        print(f"n={r['n']} sigma={r['sigma']:.4g} rho={r['rho']} diam={r['diameter_median']:.3f} "
              f"two-point={r['two_point_median']:.3f}" + (f" holder={r['holder_slope']:.3f}" if "holder_slope" in r else ""))
    if stable:
        print("within factor 2: " + ", ".join(f"{k}={v}" for k, v in stable.items()))
    return 0 if ok else 1


def cmd_enumerate(cfg: ExperimentConfig) -> int:
    fds, ds = resolve_degrees(cfg)
    labelled = bool(cfg.params.get("labelled", False))
    budget = EnumerationBudget(max_vertices=int(cfg.params.get("max_vertices", 10)))
    try:
        if labelled:
            items = [lf.to_json_obj() for lf in enumerate_labelled_forests(ds, budget)]
            expected = count_labelled_forests(ds)
        else:
            items = [f.to_json_obj() for f in enumerate_forests(ds, budget)]
            expected = count_forests(ds)
    except BudgetExceeded as exc:
        raise ConfigError(str(exc)) from None
    path = _out_path(cfg, ("labelled-" if labelled else "") + f"forests.{cfg.format}")
    if cfg.format == "csv":
        _write(path, _rows_csv([{"index": i, **obj} for i, obj in enumerate(items)]))
    else:
        _write(path, _dump({"degrees": ds.to_json_obj(), "labelled": labelled, "count": len(items),
                            "closed_form": expected, "items": items}))
    ok = len(items) == expected
    print(f"enumerated {len(items)} {'labelled ' if labelled else ''}forests, closed form {expected}: "
          f"{'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_spine(cfg: ExperimentConfig) -> int:
    fds, ds = resolve_degrees(cfg)
    h = cfg.params.get("h")
    r = check_spine_mean(ds, cfg.replicas or 100_000, cfg.seed, None if h is None else int(h), _jobs(cfg))
    path = _out_path(cfg, f"spine.{cfg.format}")
    _write(path, _rows_csv([r]) if cfg.format == "csv" else _dump(r))
    print(f"mean xi-1 {r['mean']:.5f}, target {r['target']:.5f}, tolerance {r['tolerance']:.5f}: "
          f"{'PASS' if r['ok'] else 'FAIL'}")
    return 0 if r["ok"] else 1


COMMANDS = {"sample": cmd_sample, "verify": cmd_verify, "scaling": cmd_scaling,
            "enumerate": cmd_enumerate, "spine": cmd_spine}


# -- argument parsing -----------------------------------------------------------

def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _sizes(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s]
    except ValueError:
        raise argparse.ArgumentTypeError("sizes must be comma-separated integers") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common")
    g.add_argument("--seed", type=int, help="master seed (default 0)")
    g.add_argument("--replicas", type=int, help="number of independent replicas")
    g.add_argument("--jobs", type=int, help="worker processes (default: available CPUs)")
    g.add_argument("--out", help=f"output file (default inside ${OUT_ENV})")
    g.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    g.add_argument("--config", help="load an ExperimentConfig JSON; explicit flags override it")
    g.add_argument("--save-config", help="write the resolved config to this path")
    g.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="extra per-check parameter (JSON value), repeatable")
    s = common.add_argument_group("degree sequence")
    s.add_argument("--degrees", help="forest degree sequence as JSON or file: {\"rho\": r, \"counts\": {k: d}}")
    s.add_argument("--faces", help="face degree sequence as JSON or file: {\"rho\": r, \"face_counts\": {k: f}}")
    s.add_argument("--family", help="named family: 2p, 2p-angulation, quadrangulation, geometric, "
                                    "power-law, mixed, big-face")
    s.add_argument("--n", type=int, help="number of inner faces for --family")
    s.add_argument("--p", type=int, help="half face degree for 2p-angulations")
    s.add_argument("--q", type=float, help="geometric family parameter")
    s.add_argument("--alpha", type=float, help="power-law exponent")
    s.add_argument("--rho", type=int, help="boundary half-length")
    s.add_argument("--family-seed", type=int, help="seed for random families")

    ap = argparse.ArgumentParser(prog="bipmaps", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version",
                    version=f"bipmaps {__version__} (output format {FORMAT_VERSION})")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("sample", parents=[common], help="sample a labelled forest and its map")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite; exit 1 on FAIL")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--max-vertices", type=int, help="size limit for enumeration suites")
    v.add_argument("--sizes", type=_sizes, help="comma-separated sizes for size-ladder suites")
    sc = sub.add_parser("scaling", parents=[common], help="rescaled diameter and two-point tables")
    sc.add_argument("--sizes", type=_sizes, help="comma-separated sizes (default 1024,4096,16384)")
    sc.add_argument("--ladder", action="store_true", help="let p grow as floor(n^(1/4))")
    sc.add_argument("--pairs", type=int, help="two-point samples per map")
    sc.add_argument("--holder-replicas", type=int, help="also fit the label Hoelder slope")
    e = sub.add_parser("enumerate", parents=[common], help="list all forests of a degree sequence")
    e.add_argument("--labelled", action="store_true", help="enumerate labelled forests")
    e.add_argument("--max-vertices", type=int, help="refuse sequences above this size")
    sp = sub.add_parser("spine", parents=[common], help="spine urn mean check")
    sp.add_argument("--h", type=int, help="draw index (default min(edges, 16))")
    return ap


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        try:
            cfg = ExperimentConfig.from_json(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError, TypeError) as exc:
            raise ConfigError(f"cannot load config {args.config}: {exc}") from None
        if cfg.command != args.command:
            raise ConfigError(f"config is for {cfg.command!r}, not {args.command!r}")
    else:
        cfg = ExperimentConfig(command=args.command)
    if getattr(args, "suite", None):
        cfg.target = args.suite
    for key in ("degrees", "faces", "family", "n", "seed", "replicas", "jobs", "out", "format"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)
    for key in FAMILY_KEYS:
        val = getattr(args, key)
        if val is not None:
            cfg.family_params[key] = val
    extra = {k: getattr(args, k, None) for k in ("max_vertices", "sizes", "pairs", "holder_replicas", "h")}
    for flag in ("ladder", "labelled"):
        if getattr(args, flag, False):
            extra[flag] = True
    cfg.params.update({k: v for k, v in extra.items() if v is not None})
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        cfg.params[k.strip().replace("-", "_")] = _parse_value(v)
    if cfg.format not in ("json", "csv"):
        raise ConfigError("format must be json or csv")
    if cfg.replicas is not None and cfg.replicas < 1:
        raise ConfigError("replicas must be positive")
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.save_config:
            _write(Path(args.save_config), cfg.to_json() + "\n")
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, InvalidDegreeSequence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
