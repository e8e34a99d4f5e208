"""Batch front end: ``msfde run --config <ini> --out <dir>`` and ``msfde demo <name> --out <dir>``.

The config is an INI file with sections ``grid``, ``nu``, ``mu``, ``f``,
``g``, ``psi``, ``mc``, ``perturb`` and ``analyses``. List values use
bracket syntax, e.g. ``atoms = [[0, -1], [-1, 0.5]]``. Relative paths are
resolved against the config's directory.

Exit status: 0 on success, 1 on a config error (the message names the
offending key and line), 2 on a numerical error.
"""

import argparse
import ast
import configparser
import logging
import re
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import _quad
from .errors import AliasingError, GridAlignmentError, MsfdeError, PreconditionError
from .grid import FunctionTable, Grid
from .kernels import critical_rate, diffusion_kernel, exp_weighted_rho_integral, renewal_rho
from .measures import FiniteSignedMeasure
from .montecarlo import McConfig, compare, simulate
from .perturb import DEFAULT_BETAS, DEFAULT_DELTAS, ForcingSpec, classify_parts, spike_schedule
from .resolvent import estimate_v0, solve_resolvent
from .volterra_ms import ProblemInstance, consistency_check, mean_square

log = logging.getLogger("msfde")

ANALYSES = ("resolvent", "kernel", "meansquare", "classify", "simulate", "compare")
DEMOS = ("scalar", "pure-delay", "chirp", "spikes", "constant-g")
_NEEDS = {
    "resolvent": (),
    "kernel": ("resolvent",),
    "meansquare": ("resolvent", "kernel"),
    "classify": ("resolvent", "kernel"),
    "simulate": (),
    "compare": ("meansquare", "simulate"),
}
FMT = "%.16e"


class ConfigError(Exception):
    def __init__(self, key, message, line=None):
        where = f"{key} (line {line})" if line else key
        super().__init__(f"{where}: {message}")
        self.key = key
        self.line = line


class RunConfig:
    """Parsed INI file that remembers the line of every key."""

    def __init__(self, text, base_dir=Path(".")):
        self.base_dir = Path(base_dir)
        self.parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        self.parser.optionxform = str
        try:
            self.parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError("config", str(exc).replace("\n", " "), getattr(exc, "lineno", None)) from None
        self.lines = _line_map(text)

    @classmethod
    def from_path(cls, path):
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        return cls(text, path.parent)

    def line(self, section, key=None):
        return self.lines.get((section, key))

    def error(self, section, key, message):
        name = section if key is None else f"{section}.{key}"
        return ConfigError(name, message, self.line(section, key))

    def has(self, section, key=None):
        if key is None:
            return self.parser.has_section(section)
        return self.parser.has_option(section, key)

    def raw(self, section, key, default=None, required=False):
        if self.has(section, key):
            return self.parser.get(section, key)
        if required:
            raise ConfigError(f"{section}.{key}", "required key is missing", self.line(section))
        return default

    def number(self, section, key, default=None, required=False, kind=float):
        raw = self.raw(section, key, required=required)
        if raw is None:
            return default
        try:
            val = kind(ast.literal_eval(raw.strip()))
        except (ValueError, SyntaxError, TypeError):
            raise self.error(section, key, f"expected a number, got {raw!r}") from None
        return val

    def literal_list(self, section, key, default=()):
        raw = self.raw(section, key)
        if raw is None:
            return list(default)
        try:
            val = ast.literal_eval(raw.strip())
        except (ValueError, SyntaxError):
            raise self.error(section, key, f"expected a bracketed list, got {raw!r}") from None
        if not isinstance(val, (list, tuple)):
            raise self.error(section, key, "expected a bracketed list")
        return list(val)

    def names(self, section, key, default=()):
        raw = self.raw(section, key)
        if raw is None:
            return list(default)
        return [w for w in re.split(r"[\s,\[\]'\"]+", raw) if w]

    def path(self, section, key):
        return self.base_dir / self.raw(section, key, required=True).strip()


def _line_map(text):
    out, section = {}, None
    for no, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
            out[(section, None)] = no
        elif section and s and s[0] not in "#;" and ("=" in s or ":" in s):
            key = re.split(r"[=:]", s, maxsplit=1)[0].strip()
            out.setdefault((section, key), no)
    return out


# --------------------------------------------------------------------------
# config -> objects


def parse_grid(cfg):
    h = cfg.number("grid", "h", required=True)
    T = cfg.number("grid", "T", required=True)
    tau = cfg.number("grid", "tau", required=True)
    try:
        return Grid(h=h, T=T, tau=tau)
    except GridAlignmentError as exc:
        raise cfg.error("grid", "h", str(exc)) from None


def parse_measure(cfg, section, grid):
    if not cfg.has(section):
        return FiniteSignedMeasure.zero(grid.tau)
    atoms = cfg.literal_list(section, "atoms")
    density = cfg.literal_list(section, "density")
    try:
        m = FiniteSignedMeasure(grid.tau, tuple(tuple(a) for a in atoms), tuple(tuple(d) for d in density))
    except (TypeError, ValueError) as exc:
        key = "density" if "density" in str(exc) else "atoms"
        raise cfg.error(section, key, str(exc)) from None
    try:
        m.check_grid(grid)
    except GridAlignmentError as exc:
        key = "atoms" if "atom" in str(exc) else "density"
        raise cfg.error(section, key, str(exc)) from None
    return m


def parse_forcing(cfg, section):
    if not cfg.has(section):
        return ForcingSpec.zero()
    kind = (cfg.raw(section, "kind", "zero") or "zero").strip()
    num = lambda key, **kw: cfg.number(section, key, required=True, **kw)  # noqa: E731
    if kind == "zero":
        return ForcingSpec.zero()
    if kind == "constant":
        return ForcingSpec.constant(num("c"))
    if kind == "chirp":
        return ForcingSpec.chirp(num("alpha"), num("beta"))
    if kind == "exp_decay":
        return ForcingSpec.exp_decay(num("scale"), num("rate"))
    if kind == "csv":
        return ForcingSpec.from_csv(cfg.path(section, "path"))
    if kind == "spikes":
        if cfg.has(section, "schedule"):
            rows = cfg.literal_list(section, "schedule")
            try:
                return ForcingSpec.spikes({int(n): (float(a), float(hh)) for n, a, hh in rows})
            except (TypeError, ValueError):
                raise cfg.error(section, "schedule", "expected [[n, a_n, h_n], ...]") from None
        try:
            sched = spike_schedule(
                num("n_start", kind=int),
                num("n_stop", kind=int),
                cfg.number(section, "height_exp", 1.0),
                cfg.number(section, "area_exp", 1.0),
            )
        except ValueError as exc:
            raise cfg.error(section, "n_start", str(exc)) from None
        return ForcingSpec.spikes(sched)
    raise cfg.error(section, "kind", f"unknown forcing kind {kind!r}; expected one of {ForcingSpec.KINDS}")


def sample_forcing(cfg, section, spec, grid, key_on_error):
    try:
        return spec.sample(grid)
    except AliasingError as exc:
        raise cfg.error(*key_on_error, str(exc)) from None
    except GridAlignmentError as exc:
        raise cfg.error(section, "path", str(exc)) from None
    except OSError as exc:
        raise cfg.error(section, "path", f"cannot read forcing file: {exc.strerror}") from None
    except (ValueError, IndexError) as exc:
        raise cfg.error(section, "path", f"malformed forcing file: {exc}") from None


def parse_psi(cfg, grid):
    th = grid.t_history
    if not cfg.has("psi"):
        return FunctionTable(grid, -grid.n_tau, np.ones_like(th))
    kind = (cfg.raw("psi", "kind", "constant") or "constant").strip()
    if kind == "constant":
        vals = np.full_like(th, cfg.number("psi", "c", 1.0))
    elif kind == "exp":
        vals = np.exp(cfg.number("psi", "lambda", required=True) * th)
    elif kind == "cos_exp":
        re_, im = cfg.number("psi", "re", required=True), cfg.number("psi", "im", required=True)
        vals = np.exp(re_ * th) * np.cos(im * th)
    elif kind == "samples":
        path = cfg.path("psi", "path")
        try:
            data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        except (OSError, ValueError) as exc:
            raise cfg.error("psi", "path", f"cannot read history samples: {exc}") from None
        if data.shape[0] != grid.n_tau + 1 or np.max(np.abs(data[:, 0] - th)) > 1e-9 * max(1.0, grid.tau):
            raise cfg.error("psi", "path", f"times must be exactly the {grid.n_tau + 1} grid nodes of [-tau, 0]")
        vals = data[:, 1]
    else:
        raise cfg.error("psi", "kind", f"unknown psi kind {kind!r}; expected constant, samples, exp or cos_exp")
    return FunctionTable(grid, -grid.n_tau, vals)


def parse_analyses(cfg):
    run = cfg.names("analyses", "run", default=("resolvent", "kernel", "meansquare", "classify"))
    bad = [a for a in run if a not in ANALYSES]
    if bad:
        raise cfg.error("analyses", "run", f"unknown analyses {bad}; expected a subset of {list(ANALYSES)}")
    todo = set()

    def add(a):
        if a not in todo:
            todo.add(a)
            for b in _NEEDS[a]:
                add(b)

    for a in run:
        add(a)
    return [a for a in ANALYSES if a in todo], set(run)


# --------------------------------------------------------------------------
# outputs


def write_csv(path, header, columns):
    data = np.column_stack(columns)
    np.savetxt(path, data, fmt=FMT, delimiter=",", header=",".join(header), comments="", newline="\n")


def _describe_measure(m):
    return f"atoms={list(m.atoms)} density={list(m.density)}"


def _describe_forcing(spec):
    if spec.kind == "spikes":
        sched = spec.params["schedule"]
        return f"spikes on n={min(sched)}..{max(sched)}"
    return f"{spec.kind} {spec.params}" if spec.params else spec.kind


def execute(cfg, out_dir, progress=None):
    """Run every requested analysis; returns the report text.

    ``progress["stage"]`` tracks the analysis being run so that numerical
    errors can be attributed to it.
    """
    progress = {} if progress is None else progress
    progress["stage"] = "setup"
    grid = parse_grid(cfg)
    nu = parse_measure(cfg, "nu", grid)
    mu = parse_measure(cfg, "mu", grid)
    f_spec, g_spec = parse_forcing(cfg, "f"), parse_forcing(cfg, "g")
    psi = parse_psi(cfg, grid)
    todo, requested = parse_analyses(cfg)
    deltas = [float(d) for d in cfg.literal_list("perturb", "delta_set", DEFAULT_DELTAS)]
    betas = [float(b) for b in cfg.literal_list("perturb", "beta_grid", DEFAULT_BETAS)]
    check_h = cfg.number("perturb", "check_h")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    report = [
        "msfde report",
        f"grid: h={grid.h!r} T={grid.T!r} tau={grid.tau!r}",
        f"nu: {_describe_measure(nu)}",
        f"mu: {_describe_measure(mu)}",
        f"f: {_describe_forcing(f_spec)}",
        f"g: {_describe_forcing(g_spec)}",
        f"analyses: {', '.join(todo)}",
    ]

    inst = None
    if {"meansquare", "simulate"} & set(todo):
        f = sample_forcing(cfg, "f", f_spec, grid, ("grid", "h"))
        g = sample_forcing(cfg, "g", g_spec, grid, ("grid", "h"))
        inst = ProblemInstance(nu, mu, f, g, psi, grid)

    r = k = sol = est = rho = None
    if "resolvent" in todo:
        progress["stage"] = "resolvent"
        r = solve_resolvent(nu, grid)
        write_csv(out / "resolvent.csv", ["t", "r"], [grid.t, r.values])
        report += ["", "== Resolvent ==", estimate_v0(nu, r).describe()]

    if "kernel" in todo:
        progress["stage"] = "kernel"
        k = diffusion_kernel(mu, r)
        write_csv(out / "kernel.csv", ["t", "G", "G_sq"], [grid.t, k.G.values, k.G_sq.values])
        report += ["", "== Diffusion kernel ==", f"||G(r)||^2 = {k.l2_norm_sq:.10g} "
                   f"(truncated {k.l2_norm_sq_truncated:.10g}, tail {k.l2_tail_estimate:.3g})"]
        report += [f"warning: {w}" for w in k.warnings]
        try:
            alpha = critical_rate(k)
            report.append(f"critical rate alpha' = {alpha:.10g}")
        except PreconditionError as exc:
            report.append(f"critical rate alpha': not available ({exc})")
        rho = None
        if not k.is_trivial and not k.divergent:
            rho = renewal_rho(k)
            report.append(f"int rho (truncated) = {rho.l1_norm_truncated:.10g}")
            report.append(f"int rho (tail corrected) = {exp_weighted_rho_integral(rho, 0.0):.10g}")

    if "meansquare" in todo:
        progress["stage"] = "meansquare"
        sol = mean_square(inst, r, k)
        n_tau = grid.n_tau
        write_csv(
            out / "meansquare.csv",
            ["t", "x", "EX2", "EY2", "Z", "gamma"],
            [grid.t, sol.x.values[n_tau:], sol.EX2.values, sol.EY2.values, sol.Z.values, sol.gamma.values],
        )
        fit = _quad.fit_decay(grid.t, sol.EX2.values)
        path = "explicit mu = 0 formula" if sol.used_mu_zero_path else "Volterra system"
        report += ["", "== Mean square ==", f"route: {path}", f"EX2(T) = {sol.EX2.values[-1]:.10g}",
                   "EX2 decay fit: " + ("below numerical floor" if fit is None else f"{fit.rate:.6g}")]
        if sol.G_x_vanishes:
            report.append("note: G(x) vanishes on [0, T]; gamma reduces to r^2 * g^2")
        if rho is not None and not sol.used_mu_zero_path:
            report.append("consistency: " + consistency_check(sol, r, rho).describe())

    if "classify" in todo:
        progress["stage"] = "classify"
        cgrid = grid if check_h is None else _check_grid(cfg, grid, check_h)
        key = ("grid", "h") if check_h is None else ("perturb", "check_h")
        fc = sample_forcing(cfg, "f", f_spec, cgrid, key)
        gc = sample_forcing(cfg, "g", g_spec, cgrid, key)
        for d in deltas:
            try:
                cgrid.index(d, "delta")
            except GridAlignmentError as exc:
                raise cfg.error("perturb", "delta_set", str(exc)) from None
        try:
            rep = classify_parts(nu, r, k, fc, gc, deltas, betas)
        except ValueError as exc:
            if isinstance(exc, MsfdeError):
                raise
            raise cfg.error("perturb", "beta_grid", str(exc)) from None
        report += ["", "== Stability conditions ==", f"condition checks on step {cgrid.h!r}", rep.to_text()]

    if "simulate" in todo:
        progress["stage"] = "simulate"
        try:
            mc = McConfig(
                paths=cfg.number("mc", "paths", 1000, kind=int),
                seed=cfg.number("mc", "seed", 0, kind=int),
                psi_mode=est_mode(cfg),
            )
        except ValueError as exc:
            raise cfg.error("mc", "psi_mode" if "psi_mode" in str(exc) else "paths", str(exc)) from None
        est = simulate(inst, mc)
        write_csv(out / "mc.csv", ["t", "mc_mean_sq", "mc_std_err"], [grid.t, est.mean_sq.values, est.std_err.values])
        report += ["", "== Monte Carlo ==", f"paths={mc.paths} seed={mc.seed} psi_mode={mc.psi_mode}"]
        if est.exploded:
            report.append(f"explosion: |X| exceeded 1e150 at t = {est.blowup_time:g}")

    if "compare" in todo:
        progress["stage"] = "compare"
        cps = [float(c) for c in cfg.literal_list("mc", "checkpoints", (0.5, 1.0, 2.0, 5.0))]
        kappa = cfg.number("mc", "kappa", 5.0)
        for c in cps:
            try:
                grid.index(c, "checkpoint")
            except GridAlignmentError as exc:
                raise cfg.error("mc", "checkpoints", str(exc)) from None
            if c > grid.T:
                raise cfg.error("mc", "checkpoints", f"checkpoint {c} beyond T={grid.T}")
        if est_mode(cfg) == "random":
            report.append("note: random initial segment; Volterra values assume the deterministic segment")
        report.append(compare(est, sol, cps, kappa).describe())

    text = "\n".join(report) + "\n"
    (out / "report.txt").write_text(text)
    return text


def est_mode(cfg):
    return (cfg.raw("mc", "psi_mode", "deterministic") or "deterministic").strip()


def _check_grid(cfg, grid, check_h):
    try:
        return grid.refined(check_h)
    except GridAlignmentError as exc:
        raise cfg.error("perturb", "check_h", str(exc)) from None


def run(config_path, out_dir):
    """Execute a config file; returns the exit status."""
    try:
        cfg = RunConfig.from_path(config_path)
        return _run_cfg(cfg, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


def _run_cfg(cfg, out_dir):
    progress = {}
    try:
        execute(cfg, out_dir, progress)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (MsfdeError, FloatingPointError, OverflowError) as exc:
        stage = progress.get("stage", "setup")
        print(f"numerical error in analyses.run={stage}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return 0


def demo_text(name):
    return resources.files("msfde").joinpath("demos", f"{name}.ini").read_text()


def demo(name, out_dir):
    if name not in DEMOS:
        print(f"unknown demo {name!r}; valid names: {', '.join(DEMOS)}", file=sys.stderr)
        return 1
    return _run_cfg(RunConfig(demo_text(name)), out_dir)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="msfde", description="Mean-square stability of perturbed linear stochastic delay equations.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_demo = sub.add_parser("demo", help="run a canned example")
    p_demo.add_argument("name", help=f"one of {', '.join(DEMOS)}")
    p_demo.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return run(args.config, args.out)
    return demo(args.name, args.out)


if __name__ == "__main__":
    sys.exit(main())
