"""Command-line front end: table, sweep, contour, klyshko, oracle-check.

Every artifact starts with ``#`` metadata lines (version, command, resolved
config, tolerances) so identical configs produce identical bytes.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__, criteria, fock
from .errors import CatlabError, ConvergenceError, DomainError, TruncationError
from .numerics import Bracket, bisect
from .phase_space import CatState, ThermalChannel, char_normal, coefficients, log_char_normal_axis
from .photon import photon_probs

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3
EXIT_ORACLE_FAIL = 4

ORACLE_TOL = 1e-6
MAX_ORACLE_DIM = 400


@dataclass
class RunConfig:
    alpha: list = field(default_factory=lambda: [2.0])
    nbar: list = field(default_factory=lambda: [100.0])
    gamma: float = 1.0
    tau_max: float | None = None
    tol: float = criteria.TAU_TOL
    points: int = 101
    out: str | None = None
    format: str = "csv"
    jobs: int | None = None
    # subcommand-specific
    criterion: str = "vogel1"
    variable: str = "alpha"
    range: str | None = None
    n: int = 1
    taus: list | None = None

    def validate(self):
        if self.format not in ("csv", "json"):
            raise DomainError(f"format must be csv or json, got {self.format!r}")
        if any(a < 0 for a in self.alpha):
            raise DomainError("alpha must be >= 0")
        if any(nb < 0 for nb in self.nbar):
            raise DomainError("nbar must be >= 0")
        if self.gamma <= 0 or self.tol <= 0 or self.points < 2:
            raise DomainError("gamma and tol must be positive and points >= 2")
        if self.tau_max is not None and self.tau_max <= 0:
            raise DomainError("tau_max must be positive")
        if self.n < 0:
            raise DomainError("n must be >= 0")
        if self.criterion not in criteria.CRITERIA:
            raise DomainError(f"criterion must be one of {criteria.CRITERIA}")
        if self.variable not in ("alpha", "nbar"):
            raise DomainError("variable must be alpha or nbar")

    def single(self, name):
        vals = getattr(self, name)
        if len(vals) != 1:
            raise DomainError(f"this command takes a single --{name} value, got {vals}")
        return vals[0]

    def tau_max_for(self, nbar):
        if self.tau_max is not None:
            return self.tau_max
        tp = criteria.tau_nonclassical_depth(ThermalChannel(nbar))
        return 4.0 * tp if math.isfinite(tp) else 1.0

    def resolved_jobs(self):
        if self.jobs is not None:
            return max(1, self.jobs)
        env = os.environ.get("CATLAB_JOBS")
        return max(1, int(env)) if env else (os.cpu_count() or 1)


# --------------------------------------------------------------------------
# serialisation
# --------------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return f"{float(x):.12g}"
    return str(x)


def _json_value(x):
    if isinstance(x, (float, np.floating)) and not math.isfinite(x):
        return None
    if isinstance(x, np.generic):
        return x.item()
    return x


def render(columns, rows, meta, fmt):
    if fmt == "json":
        cols = {}
        for j, name in enumerate(columns):
            vals = [r[j] for r in rows]
            cols[name] = [_json_value(v) for v in vals]
            if any(isinstance(v, float) and math.isinf(v) for v in vals):
                cols[name + "_is_inf"] = [isinstance(v, float) and math.isinf(v) for v in vals]
        return json.dumps({"meta": meta, "columns": cols}, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    for key in sorted(meta):
        buf.write(f"# {key}: {json.dumps(meta[key], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _meta(command, cfg, **extra):
    conf = {k: v for k, v in asdict(cfg).items() if k not in ("out", "jobs")}
    meta = {
        "tool": f"catlab {__version__}",
        "command": command,
        "config": conf,
        "tolerances": {"tau_bisection": cfg.tol, "strict_inequality": criteria.EPS_STRICT},
    }
    meta.update(extra)
    return meta


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _threshold(criterion_id, alpha, nbar, tol):
    state, ch = CatState(alpha), ThermalChannel(nbar)
    if criterion_id == "fringe":
        return criteria.ThresholdResult(math.inf, (math.inf, math.inf), 0, "fringe")
    if criterion_id == "depth":
        return criteria.exact_depth_threshold(state, ch, tol)
    if criterion_id == "wigner_neg":
        return criteria.tau_wigner_numeric(state, ch, tol)
    if criterion_id == "vogel1":
        return criteria.tau_vogel(state, ch, tol)
    if criterion_id == "vogel2":
        return criteria.tau_vogel_second_order(state, ch, tol)
    return criteria.tau_klyshko(state, ch, tol)


def cmd_table(cfg: RunConfig):
    alpha, nbar = cfg.single("alpha"), cfg.single("nbar")
    ch = ThermalChannel(nbar, cfg.gamma)
    bound_w = criteria.tau_wigner_negativity(ch)
    bound_p = criteria.tau_nonclassical_depth(ch)
    rows = []
    for cid, method in (
        ("klyshko", "B(1) sign change"),
        ("vogel1", "sup Phi_t(u,0) > 1"),
        ("wigner_neg", "closed-form bound s_t = 0"),
        ("depth", "closed-form bound s_t = -1"),
        ("fringe", "asymptotic decay only"),
    ):
        row = _sweep_point((cid, alpha, nbar, cfg.tol))
        tau = {"wigner_neg": bound_w, "depth": bound_p}.get(cid, row[2])
        rows.append([cid, tau, *row[2:5], method, row[5]])
    extra = {"failed_rows": sum(bool(r[-1]) for r in rows)}
    if nbar == 0:
        extra["note"] = "zero-temperature channel: the closed-form bounds diverge and no operational threshold is reached"
    if alpha == 0:
        extra["note"] = "alpha = 0 is the vacuum, which is classical from the start"
    cols = ["criterion", "tau_star", "tau_numeric", "bracket_lo", "bracket_hi", "method", "reason"]
    return cols, rows, _meta("table", cfg, **extra)


def _parse_range(spec):
    if spec is None:
        raise DomainError("sweep needs --range start:stop:num or a comma list")
    if ":" in spec:
        start, stop, num = spec.split(":")
        return [float(x) for x in np.linspace(float(start), float(stop), int(num))]
    return [float(x) for x in spec.split(",")]


def _sweep_point(args):
    cid, alpha, nbar, tol = args
    try:
        res = _threshold(cid, alpha, nbar, tol)
        return [alpha, nbar, res.tau_star, res.bracket[0], res.bracket[1], ""]
    except CatlabError as exc:
        nan = float("nan")
        return [alpha, nbar, nan, nan, nan, str(exc).replace("\n", " ")]


def cmd_sweep(cfg: RunConfig):
    values = _parse_range(cfg.range)
    if cfg.variable == "alpha":
        tasks = [(cfg.criterion, a, nb, cfg.tol) for nb in cfg.nbar for a in values]
    else:
        tasks = [(cfg.criterion, a, nb, cfg.tol) for a in cfg.alpha for nb in values]
    jobs = cfg.resolved_jobs()
    if jobs == 1 or len(tasks) == 1:
        rows = [_sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))  # map keeps input order
    cols = ["alpha", "nbar", "tau_star", "bracket_lo", "bracket_hi", "reason"]
    return cols, rows, _meta("sweep", cfg, failed_rows=sum(bool(r[-1]) for r in rows))


def contour_points(state, ch, taus):
    """Roots u > 0 of Phi_t(u, 0) = 1 at each tau, as (tau, u, branch) rows."""
    rows = []
    for tau in taus:
        co = coefficients(ch, tau)
        if state.alpha == 0 or co.d == 0:
            continue
        u = criteria._vogel_scan_grid(state, co)[1:]
        g = log_char_normal_axis(state, co, u)
        idx = np.nonzero(np.sign(g[:-1]) != np.sign(g[1:]))[0]
        for branch, i in enumerate(idx):
            f = lambda x: float(log_char_normal_axis(state, co, x))  # noqa: E731
            br = Bracket(float(u[i]), float(u[i + 1]), int(np.sign(g[i]) or 1), -int(np.sign(g[i]) or 1))
            rows.append([float(tau), bisect(f, br, tol=1e-10).root, branch])
    return rows


def cmd_contour(cfg: RunConfig):
    alpha, nbar = cfg.single("alpha"), cfg.single("nbar")
    state, ch = CatState(alpha), ThermalChannel(nbar, cfg.gamma)
    tau_v = criteria.tau_vogel(state, ch, cfg.tol).tau_star
    # the contour closes at tau_V, so by default stop just past it
    tau_max = cfg.tau_max if cfg.tau_max is not None or not math.isfinite(tau_v) else 1.05 * tau_v
    if tau_max is None:
        tau_max = cfg.tau_max_for(nbar)
    taus = np.linspace(0.0, tau_max, cfg.points)[1:]
    rows = contour_points(state, ch, taus)
    return ["tau", "u", "branch"], rows, _meta("contour", cfg, tau_v=_json_value(tau_v))


def cmd_klyshko(cfg: RunConfig):
    alpha = cfg.single("alpha")
    state = CatState(alpha)
    rows, crossings = [], {}
    for nbar in cfg.nbar:
        ch = ThermalChannel(nbar, cfg.gamma)
        taus = np.linspace(0.0, cfg.tau_max_for(nbar), cfg.points)
        vals = []
        for tau in taus:
            try:
                val, reason = criteria.klyshko_B(state, coefficients(ch, tau), cfg.n), ""
            except ConvergenceError as exc:
                val, reason = float("nan"), str(exc)
            vals.append(val)
            rows.append([nbar, float(tau), val, reason])
        v = np.array(vals)
        flips = np.nonzero((v[:-1] < -criteria.EPS_STRICT) != (v[1:] < -criteria.EPS_STRICT))[0]
        crossings[_fmt(float(nbar))] = [[float(taus[i]), float(taus[i + 1])] for i in flips]
    meta = _meta("klyshko", cfg, crossings=crossings, failed_rows=sum(bool(r[-1]) for r in rows))
    return ["nbar", "tau", f"B{cfg.n}", "reason"], rows, meta


def oracle_check(alpha, nbar, taus, grid=(-1.0, -0.5, 0.0, 0.5, 1.0)):
    """Deviation between the analytic and Fock-space paths at each tau."""
    state, ch = CatState(alpha), ThermalChannel(nbar)
    pts = [complex(u, v) for u in grid for v in grid]
    rows = []
    for tau in taus:
        dim = fock.cutoff_for(alpha, nbar, tau)
        if dim > MAX_ORACLE_DIM:
            raise DomainError(
                f"oracle cutoff {dim} exceeds {MAX_ORACLE_DIM} at tau={tau}; "
                "lower --tau-max or --nbar, the Fock matrix would not fit the memory budget"
            )
        rho = fock.evolve(fock.cat_density_matrix(state, dim), ch, tau)
        co = coefficients(ch, tau)
        dp = float(np.max(np.abs(fock.oracle_photon_probs(rho) - photon_probs(state, co, dim - 1))))
        dchi = max(abs(fock.oracle_char_normal(rho, xi) - char_normal(state, co, xi)) for xi in pts)
        rows.append([float(tau), dim, dp, float(dchi), 1.0 - rho.trace, dp < ORACLE_TOL and dchi < ORACLE_TOL])
    return rows


def cmd_oracle_check(cfg: RunConfig):
    alpha, nbar = cfg.single("alpha"), cfg.single("nbar")
    taus = cfg.taus if cfg.taus is not None else [0.0, 0.5 * cfg.tau_max_for(nbar), cfg.tau_max_for(nbar)]
    rows = oracle_check(alpha, nbar, taus)
    cols = ["tau", "cutoff", "max_dp", "max_dchi", "trace_leak", "passed"]
    return cols, rows, _meta("oracle-check", cfg, threshold=ORACLE_TOL)


COMMANDS = {
    "table": cmd_table,
    "sweep": cmd_sweep,
    "contour": cmd_contour,
    "klyshko": cmd_klyshko,
    "oracle-check": cmd_oracle_check,
}


# --------------------------------------------------------------------------
# argument handling
# --------------------------------------------------------------------------

def _floats(text):
    try:
        return [float(x) for x in str(text).split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    # defaults are None so that config-file values are only overridden by explicit flags
    common.add_argument("--alpha", type=_floats, help="cat amplitude(s), comma separated")
    common.add_argument("--nbar", type=_floats, help="mean thermal occupation(s), comma separated")
    common.add_argument("--gamma", type=float, help="damping rate, used only with --t-max")
    common.add_argument("--tau-max", dest="tau_max", type=float, help="largest rescaled time gamma*t")
    common.add_argument("--t-max", dest="t_max", type=float, help="largest physical time (converted with gamma)")
    common.add_argument("--tol", type=float, help="bisection tolerance in tau")
    common.add_argument("--points", type=int, help="time-grid size")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--config", help="flat JSON file of RunConfig keys; flags take precedence")
    common.add_argument("--jobs", type=int, help="worker processes (fallback: $CATLAB_JOBS, then CPU count)")

    p = argparse.ArgumentParser(prog="catlab", description="Cat-state decoherence and nonclassicality thresholds.")
    p.add_argument("--version", action="version", version=f"catlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("table", parents=[common], help="threshold times for every criterion")
    sw = sub.add_parser("sweep", parents=[common], help="threshold time over a parameter range")
    sw.add_argument("--criterion", choices=criteria.CRITERIA)
    sw.add_argument("--variable", choices=("alpha", "nbar"))
    sw.add_argument("--range", help="start:stop:num or comma list")
    sub.add_parser("contour", parents=[common], help="Phi_t(u,0) = 1 contour in the (tau, u) plane")
    kl = sub.add_parser("klyshko", parents=[common], help="B(n) time series")
    kl.add_argument("--n", type=int)
    oc = sub.add_parser("oracle-check", parents=[common], help="analytic vs Fock-space comparison")
    oc.add_argument("--taus", type=_floats, help="times to compare at")
    return p


def resolve_config(args) -> RunConfig:
    values = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        names = {f.name for f in fields(RunConfig)}
        unknown = set(data) - names
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for name in (f.name for f in fields(RunConfig)):
        val = getattr(args, name, None)
        if val is not None:
            values[name] = val
    for key in ("alpha", "nbar", "taus"):
        if key in values and values[key] is not None and not isinstance(values[key], list):
            values[key] = [float(values[key])]
    cfg = RunConfig(**values)
    if getattr(args, "t_max", None) is not None:
        cfg.tau_max = cfg.gamma * args.t_max
    cfg.validate()
    return cfg


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        cols, rows, meta = COMMANDS[args.command](cfg)
    except (DomainError, TruncationError, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"catlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"catlab {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    text = render(cols, rows, meta, cfg.format)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if meta.get("failed_rows"):
        print(f"catlab {args.command}: {meta['failed_rows']} row(s) did not converge", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    if args.command == "oracle-check" and not all(r[-1] for r in rows):
        print("catlab oracle-check: deviation above tolerance", file=sys.stderr)
        return EXIT_ORACLE_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
