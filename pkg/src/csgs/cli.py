"""Command-line front end.

    csgs solve-single CONFIG [--out DIR]
    csgs solve-coupled CONFIG [--out DIR] [--allow-semitrivial]
    csgs verify [CONFIG] [--out DIR]
    csgs thresholds CONFIG [--out DIR]
    csgs sweep CONFIG [--out DIR]

CONFIG is a plain ``section.key=value`` file; ``#`` starts a comment and an
empty value means "unset".  Exit codes: 0 success, 1 configuration error,
2 nonconvergence, 3 non-vector classification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import GridError, ParameterError, ProjectionError, RegimeError
from .grid import RadialGrid
from .manifolds import ProblemParams
from .seeds import KINDS, InitialGuess

FORMAT_VERSION = 1

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED, EXIT_NONVECTOR = 0, 1, 2, 3

# key -> (parser, default); a default of REQUIRED must be supplied by the file
REQUIRED = object()
_int = lambda s: int(s)
KEYS = {
    "grid.r_max": (float, REQUIRED),
    "grid.n": (_int, REQUIRED),
    "problem.p": (float, REQUIRED),
    "problem.omega": (float, 1.0),
    "problem.b": (float, 0.0),
    "problem.alpha": (float, None),
    "solver.tol_gradient": (float, 1e-8),
    "solver.tol_manifold": (float, 1e-10),
    "solver.max_iter": (_int, 20000),
    "seed.kind": (str, "gaussian_pair"),
    "seed.rng_seed": (_int, None),
    "seed.amplitude_u": (float, None),
    "seed.amplitude_v": (float, None),
    "seed.width_u": (float, None),
    "seed.width_v": (float, None),
    "output.prefix": (str, None),
    "sweep.axis": (str, None),
    "sweep.values": (lambda s: [float(x) for x in s.split(",") if x.strip()], None),
    "verify.rng_seed": (_int, 0),
}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    values: dict
    source: str = "<defaults>"
    format_version: int = FORMAT_VERSION
    present: set = field(default_factory=set)

    def __getitem__(self, key):
        return self.values[key]

    def require(self, *keys):
        missing = [k for k in keys if self.values.get(k) is REQUIRED]
        if missing:
            raise ConfigError(f"{self.source}: missing required key {missing[0]}")

    def grid(self) -> RadialGrid:
        self.require("grid.n", "grid.r_max")
        try:
            return RadialGrid(self["grid.r_max"], self["grid.n"])
        except GridError as exc:
            raise ConfigError(f"{self.source}: {exc}") from exc

    def params(self, **overrides) -> ProblemParams:
        self.require("problem.p")
        kw = dict(p=self["problem.p"], omega=self["problem.omega"], b=self["problem.b"],
                  alpha=self["problem.alpha"], tol_gradient=self["solver.tol_gradient"],
                  tol_manifold=self["solver.tol_manifold"], max_iter=self["solver.max_iter"])
        kw.update(overrides)
        if not 2 < kw["p"] <= 3:
            kw["alpha"] = None  # the dilation exponent is only used for 2 < p <= 3
        try:
            return ProblemParams(**kw)
        except ParameterError as exc:
            raise ConfigError(f"{self.source}: {exc}") from exc

    def seed(self) -> InitialGuess:
        try:
            return InitialGuess(kind=self["seed.kind"], amplitude_u=self["seed.amplitude_u"],
                                amplitude_v=self["seed.amplitude_v"], width_u=self["seed.width_u"],
                                width_v=self["seed.width_v"], rng_seed=self["seed.rng_seed"])
        except ParameterError as exc:
            raise ConfigError(f"{self.source}: {exc}") from exc

    def resolved(self) -> dict:
        return {k: (None if v is REQUIRED else v) for k, v in sorted(self.values.items())}


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    values = {k: default for k, (_, default) in KEYS.items()}
    present = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in present:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        present.add(key)
        conv, default = KEYS[key]
        if val == "":
            values[key] = REQUIRED if default is REQUIRED else None
            continue
        try:
            values[key] = conv(val)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value {val!r} for {key}") from None
    if values["seed.kind"] not in KINDS:
        raise ConfigError(f"{source}: seed.kind must be one of {KINDS}")
    return RunConfig(values, source, FORMAT_VERSION, present)


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return parse_config("", "<defaults>")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, path)


# -- output ------------------------------------------------------------------------

def fmt(x: float) -> str:
    return format(float(x), ".17g")


def to_json(obj, indent=2, _level=0) -> str:
    """JSON text with every float written to 17 significant digits (non-finite -> null)."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def profile_csv(grid: RadialGrid, columns: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", *columns])
    for i, r in enumerate(grid.nodes):
        w.writerow([fmt(r), *(fmt(col[i]) for col in columns.values())])
    return buf.getvalue()


def read_profile(path: str) -> dict:
    """Read a profile CSV back into arrays keyed by column name."""
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], np.array(rows[1:], dtype=float)
    return {name: data[:, k] for k, name in enumerate(header)}


def _report_doc(cfg: RunConfig, result: dict) -> dict:
    return {"format_version": FORMAT_VERSION, "config": cfg.resolved(), "result": result}


def _prefix(cfg, default):
    return cfg["output.prefix"] or default


# -- subcommands -----------------------------------------------------------------

def cmd_solve_single(cfg: RunConfig, out: str) -> int:
    from .single_eq import solve_scalar

    grid = cfg.grid()
    cfg.require("problem.p")
    if not cfg["problem.p"] > 2:
        raise ConfigError("p out of solvable range for solve-single (need p > 2)")
    params = cfg.params()
    gs = solve_scalar(params.p, params.omega, grid, cfg.seed(), alpha=params.alpha,
                      tol_gradient=params.tol_gradient, tol_manifold=params.tol_manifold,
                      max_iter=params.max_iter)
    certified = gs.converged and gs.positive and abs(gs.relative_pohozaev) <= 1e-2
    result = {
        "classification": "scalar" if gs.converged else gs.status,
        "status": gs.status,
        "level": gs.level,
        "energy": gs.energy.as_dict(),
        "residuals": {"manifold": gs.manifold_residual, "gradient": gs.gradient_residual,
                      "pohozaev": gs.pohozaev_residual, "pohozaev_relative": gs.relative_pohozaev},
        "comparisons": None,
        "iterations": gs.iterations,
        "positive": gs.positive,
        "certified": certified,
        "parameters": {"p": gs.p, "omega": gs.omega, "alpha": gs.alpha, "regime": gs.regime},
        "grid": {"r_max": grid.r_max, "n": grid.n},
    }
    name = _prefix(cfg, "solve_single")
    atomic_write(os.path.join(out, name + ".json"), to_json(_report_doc(cfg, result)) + "\n")
    atomic_write(os.path.join(out, name + ".csv"), profile_csv(grid, {"u": gs.u.values}))
    print(f"level={fmt(gs.level)} status={gs.status} iterations={gs.iterations}")
    return EXIT_OK if certified else EXIT_NONCONVERGED


def cmd_solve_coupled(cfg: RunConfig, out: str, allow_semitrivial: bool = False) -> int:
    from .single_eq import thresholds
    from .solver import scalar_pair, solve_coupled

    grid = cfg.grid()
    cfg.require("problem.p")
    if not cfg["problem.p"] > 2:
        raise ConfigError("p out of solvable range for solve-coupled (need p > 2)")
    params = cfg.params()
    rep = solve_coupled(params, grid, cfg.seed())
    result = {
        "classification": rep.classification,
        "status": rep.status,
        "energy": rep.energy.as_dict(),
        "residuals": {"manifold": rep.manifold_residual, "gradient": rep.gradient_residual,
                      "pohozaev": rep.pohozaev_residual, "pohozaev_relative": rep.relative_pohozaev},
        "comparisons": rep.comparisons.as_dict() if rep.comparisons else None,
        "iterations": rep.iterations,
        "l2_norms": list(rep.l2_norms),
        "parameters": {"p": params.p, "omega": params.omega, "b": params.b, "alpha": params.alpha,
                       "regime": params.regime},
        "grid": {"r_max": grid.r_max, "n": grid.n},
    }
    if params.p > 3:
        result["thresholds"] = thresholds(params.p, params.omega, *scalar_pair(params, grid)).as_dict()
    name = _prefix(cfg, "solve_coupled")
    atomic_write(os.path.join(out, name + ".json"), to_json(_report_doc(cfg, result)) + "\n")
    atomic_write(os.path.join(out, name + ".csv"),
                 profile_csv(grid, {"u": rep.state.u.values, "v": rep.state.v.values}))
    print(f"classification={rep.classification} energy={fmt(rep.energy.total)} iterations={rep.iterations}")
    if rep.classification == "nonconverged":
        return EXIT_NONCONVERGED
    if rep.classification == "vector":
        return EXIT_OK
    if allow_semitrivial and rep.classification.startswith("semitrivial"):
        return EXIT_OK
    return EXIT_NONVECTOR


def cmd_verify(cfg: RunConfig, out: str) -> int:
    from .verify import run_property_suite

    rows = run_property_suite(rng_seed=cfg["verify.rng_seed"])
    for row in rows:
        print(row.line())
    table = [{"name": r.name, "measured": r.measured, "expected": r.expected, "tolerance": r.tolerance,
              "kind": r.kind, "passed": r.passed} for r in rows]
    all_pass = all(r.passed for r in rows)
    doc = _report_doc(cfg, {"all_passed": all_pass, "rows": table})
    atomic_write(os.path.join(out, _prefix(cfg, "verify") + ".json"), to_json(doc) + "\n")
    print(f"{sum(r.passed for r in rows)}/{len(rows)} checks passed")
    return EXIT_OK if all_pass else EXIT_NONCONVERGED


def cmd_thresholds(cfg: RunConfig, out: str) -> int:
    from .single_eq import thresholds
    from .solver import scalar_pair

    grid = cfg.grid()
    cfg.require("problem.p")
    if not cfg["problem.p"] > 3:
        raise ConfigError(f"thresholds need p > 3, got p={cfg['problem.p']}")
    params = cfg.params()
    gs1, gsw = scalar_pair(params, grid)
    if not (gs1.converged and gsw.converged):
        print("scalar solve did not converge", file=sys.stderr)
        return EXIT_NONCONVERGED
    th = thresholds(params.p, params.omega, gs1, gsw)
    doc = _report_doc(cfg, th.as_dict())
    atomic_write(os.path.join(out, _prefix(cfg, "thresholds") + ".json"), to_json(doc) + "\n")
    print(f"b_star={fmt(th.b_star)} regime={th.regime}")
    return EXIT_OK


SWEEP_COLUMNS = ["index", "axis", "value", "p", "omega", "b", "level", "classification", "manifold_residual",
                 "gradient_residual", "pohozaev_residual", "iterations", "status"]


def _sweep_row(cfg, grid, axis, index, value):
    key = {"b": "b", "omega": "omega", "p": "p"}[axis]
    params = cfg.params(**{key: value})
    if params.p <= 2:
        from .solver import flow_to_zero_check
        fc = flow_to_zero_check(params, grid, [cfg.seed()], with_certificate=False)
        rep = fc.reports[0]
        level = rep.energy.total
    else:
        from .solver import solve_coupled
        rep = solve_coupled(params, grid, cfg.seed(), compare=False)
        level = rep.energy.total
    return {"index": index, "axis": axis, "value": value, "p": params.p, "omega": params.omega, "b": params.b,
            "level": level, "classification": rep.classification, "manifold_residual": rep.manifold_residual,
            "gradient_residual": rep.gradient_residual, "pohozaev_residual": rep.pohozaev_residual,
            "iterations": rep.iterations, "status": rep.status}


def _threads() -> int:
    raw = os.environ.get("CSGS_THREADS")
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(f"CSGS_THREADS must be a positive integer, got {raw!r}") from None
        if n < 1:
            raise ConfigError(f"CSGS_THREADS must be a positive integer, got {raw!r}")
        return n
    return os.cpu_count() or 1


def _sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow([fmt(row[c]) if isinstance(row[c], float) else row[c] for c in SWEEP_COLUMNS])
    return buf.getvalue()


def cmd_sweep(cfg: RunConfig, out: str) -> int:
    axis, values = cfg["sweep.axis"], cfg["sweep.values"]
    if axis not in ("b", "omega", "p"):
        raise ConfigError(f"sweep.axis must be one of b, omega, p; got {axis!r}")
    if not values:
        raise ConfigError("sweep.values is empty")
    grid = cfg.grid()
    for v in values:  # validate every point before solving anything
        cfg.params(**{axis: v})
    name = _prefix(cfg, "sweep")
    csv_path = os.path.join(out, name + ".csv")
    sidecar = csv_path + ".progress.json"
    done = {}
    if os.path.exists(sidecar):
        with open(sidecar, encoding="utf-8") as fh:
            state = json.load(fh)
        if state.get("axis") == axis and state.get("values") == values:
            done = {int(k): v for k, v in state["rows"].items()}
    lock = threading.Lock()
    failures = {}

    def save():
        doc = {"format_version": FORMAT_VERSION, "axis": axis, "values": values,
               "rows": {str(k): done[k] for k in sorted(done)}}
        atomic_write(sidecar, to_json(doc) + "\n")

    def work(i):
        try:
            row = _sweep_row(cfg, grid, axis, i, values[i])
        except (ParameterError, ProjectionError, RegimeError, ArithmeticError) as exc:
            with lock:
                failures[i] = repr(exc)
            print(f"row {i} ({axis}={values[i]}) failed: {exc}", file=sys.stderr)
            return
        with lock:
            done[i] = row
            save()
        print(f"row {i}: {axis}={values[i]} level={fmt(row['level'])} {row['classification']}")

    todo = [i for i in range(len(values)) if i not in done]
    with ThreadPoolExecutor(max_workers=min(_threads(), max(len(todo), 1))) as pool:
        list(pool.map(work, todo))
    atomic_write(csv_path, _sweep_csv([done[i] for i in sorted(done)]))
    return EXIT_OK if not failures else EXIT_NONCONVERGED


# -- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csgs", description="Radial Chern-Simons-Schrodinger ground states")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, need in (("solve-single", True), ("solve-coupled", True), ("verify", False),
                       ("thresholds", True), ("sweep", True)):
        sp = sub.add_parser(name)
        sp.add_argument("config", nargs=None if need else "?", help="key=value configuration file")
        sp.add_argument("--out", default=".", help="output directory (default: current directory)")
        if name == "solve-coupled":
            sp.add_argument("--allow-semitrivial", action="store_true",
                            help="exit 0 for semitrivial limits as well as vector ones")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "solve-single":
            return cmd_solve_single(cfg, args.out)
        if args.command == "solve-coupled":
            return cmd_solve_coupled(cfg, args.out, args.allow_semitrivial)
        if args.command == "verify":
            return cmd_verify(cfg, args.out)
        if args.command == "thresholds":
            return cmd_thresholds(cfg, args.out)
        return cmd_sweep(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ProjectionError as exc:
        print(f"projection failed: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
