"""Command-line entry point: ``uavoffload {solve,sweep,simulate,benchmark,energy}``.

Exit codes: 0 success, 1 runtime failure, 2 configuration error. Warnings
and solver diagnostics go to stderr; results go to stdout or ``--out``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from . import analytic as an
from . import energy, microcell, montecarlo, optimizer
from .analytic import DesignVars, Scheme
from .config import RunConfig, load_config
from .phy import ConfigError, watt_to_dbm

log = logging.getLogger("uavoffload")

SCHEMA_VERSION = 1

SOLVE_FIELDS = (
    "scheme", "nu_bar", "nu_bar_bps", "theta", "theta_per_km2", "rho", "r_I", "r_U",
    "R_U_bar", "R_G_bar", "p_out", "outage_slack", "uav_slack", "mu", "iterations", "converged", "diagnostics",
)
SWEEP_FIELDS = (
    "axis", "label", "value", "scheme", "nu_bar", "nu_bar_bps", "theta", "rho", "r_I", "r_U", "mu",
    "lambda_max_per_km2", "sim_theta_U", "sim_theta_G", "gap_theta_U", "gap_theta_G",
)
SIM_FIELDS = (
    "kind", "realization", "n_users", "K_G", "K_U", "K_a_max", "mu",
    "theta_U_bound", "theta_U_adaptive", "theta_G", "nu_G", "outage",
)
BENCH_FIELDS = ("scheme", "M", "theta", "theta_per_km2", "nu_bar_bps", "d_micro", "r_micro", "rho_micro")
ENERGY_FIELDS = ("r_U", "theta_U", "theta_U_per_km2", "V_opt", "propulsion_power", "transmit_power",
                 "period", "bits_per_period", "energy_efficiency", "energy_efficiency_kbit_per_J", "mu")


def _fmt(v):
    # shortest round-trip representation keeps golden files stable
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return ";".join(str(x) for x in v)
    return str(v)


def write_csv(rows, fields, tag):
    buf = io.StringIO()
    buf.write(f"# uavoffload {tag} schema {SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([_fmt(row.get(f)) for f in fields])
    return buf.getvalue()


def write_json(payload, tag):
    doc = {"schema": f"uavoffload.{tag}", "schema_version": SCHEMA_VERSION}
    doc.update(payload)
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=True) + "\n"


def _mu_model(cfg: RunConfig):
    if not cfg.mu_auto:
        return None
    return montecarlo.mu_estimator(cfg.sim.mu_fields, cfg.seed, cfg.sim.ticks)


def _solution_row(sol: optimizer.Solution, params):
    r = sol.report
    hybrid = sol.vars.scheme is not Scheme.GBS_ONLY
    return {
        "scheme": sol.vars.scheme.value,
        "nu_bar": r.nu_bar,
        "nu_bar_bps": r.nu_bar * params.W,
        "theta": r.theta,
        "theta_per_km2": r.theta * 1e6,
        "rho": sol.vars.rho if sol.vars.scheme is Scheme.ORTHOGONAL else (1.0 if hybrid else 0.0),
        "r_I": sol.vars.r_I,
        "r_U": sol.vars.r_U if hybrid else None,
        "R_U_bar": r.R_U_bar,
        "R_G_bar": r.R_G_bar,
        "p_out": r.p_out,
        "outage_slack": params.P_out_max - r.p_out,
        "uav_slack": (r.R_U_bar - r.nu_bar) if hybrid else None,
        "mu": sol.mu if hybrid else None,
        "iterations": sol.iterations,
        "converged": sol.converged,
        "diagnostics": list(sol.diagnostics),
    }


def _design(cfg: RunConfig, params, mu_model):
    """Design to simulate: a fixed one from ``[run]`` or the optimum."""
    if cfg.design_r_I is not None:
        rho = cfg.design_rho if cfg.design_rho is not None else 0.5
        return DesignVars.at_optimal_radius(cfg.scheme, rho if cfg.scheme is Scheme.ORTHOGONAL else 1.0,
                                            cfg.design_r_I, params), None
    sol = optimizer.solve(cfg.scheme, params, cfg.settings, mu_model)
    return sol.vars, sol


def cmd_solve(cfg: RunConfig, fmt):
    params = cfg.params
    sol = optimizer.solve(cfg.scheme, params, cfg.settings, _mu_model(cfg))
    for d in sol.diagnostics:
        log.warning("solver: %s", d)
    row = _solution_row(sol, params.replace(mu=sol.mu))
    if fmt == "json":
        return write_json({"solution": row}, "solve")
    if fmt == "csv":
        return write_csv([row], SOLVE_FIELDS, "solve")
    lines = [
        f"scheme              {row['scheme']}",
        f"common throughput   {row['nu_bar']:.6g} bps/Hz  ({row['nu_bar_bps'] / 1e3:.4g} kbps per user)",
        f"spatial throughput  {row['theta_per_km2']:.6g} bps/Hz/km^2",
        f"bandwidth to UAV    rho = {row['rho']:.6g}",
        f"partition radius    r_I = {row['r_I']:.6g} m",
    ]
    if row["r_U"] is not None:
        lines.append(f"trajectory radius   r_U = {row['r_U']:.6g} m")
        lines.append(f"crowding factor     mu = {row['mu']:.6g}")
        lines.append(f"UAV-side slack      {row['uav_slack']:.3g} bps/Hz")
    lines.append(f"GBS outage          {row['p_out']:.6g} (cap {params.P_out_max:g})")
    lines.append(f"iterations          {row['iterations']}")
    return "\n".join(lines) + "\n" + write_json({"solution": row}, "solve")


def cmd_sweep(cfg: RunConfig, fmt, pool):
    axes = []
    if cfg.sweep_P_U:
        axes.append(("P_U", "P_U", cfg.sweep_P_U))
    if cfg.sweep_lambda:
        axes.append(("lambda", "lam", cfg.sweep_lambda))
    if cfg.sweep_P_G:
        axes.append(("P_G", "P_G", cfg.sweep_P_G))
    if not axes:
        raise ConfigError("[sweep]", "no sweep axis given (set P_U, lambda or P_G)")
    mu_model = _mu_model(cfg)
    jobs = [(axis, attr, value, label, scheme)
            for axis, attr, items in axes for value, label in items for scheme in cfg.sweep_schemes]

    def run(job):
        axis, attr, value, label, scheme = job
        params = cfg.params.replace(**{attr: value})
        sol = optimizer.solve(scheme, params, cfg.settings, mu_model)
        row = {"axis": axis, "label": label, "value": value, "scheme": scheme.value,
               "nu_bar": sol.nu_bar, "nu_bar_bps": sol.nu_bar * params.W, "theta": sol.theta,
               "rho": sol.vars.rho if scheme is Scheme.ORTHOGONAL else None,
               "r_I": sol.vars.r_I, "r_U": sol.vars.r_U if scheme is not Scheme.GBS_ONLY else None,
               "mu": sol.mu if scheme is not Scheme.GBS_ONLY else None}
        if cfg.sweep_lambda_max:
            lam = optimizer.max_density(scheme, params, cfg.nu_min, cfg.settings, mu_model)
            row["lambda_max_per_km2"] = lam * 1e6
        if cfg.sweep_simulate and scheme is not Scheme.GBS_ONLY:
            summ = montecarlo.simulate(sol.vars, params.replace(mu=sol.mu), cfg.sim.realizations,
                                       cfg.seed, cfg.sim.ticks, cfg.sim.V)
            row["sim_theta_U"] = summ.aggregates["theta_U_bound"][0]
            row["sim_theta_G"] = summ.aggregates["theta_G"][0]
            row["gap_theta_U"] = summ.relative_gap("theta_U_bound")
            row["gap_theta_G"] = summ.relative_gap("theta_G")
        return row

    rows = list(pool.map(run, jobs))
    if fmt == "json":
        return write_json({"rows": rows}, "sweep")
    return write_csv(rows, SWEEP_FIELDS, "sweep")


def cmd_simulate(cfg: RunConfig, fmt, threads):
    if cfg.scheme is Scheme.GBS_ONLY:
        raise ConfigError("[run] scheme", "simulate needs a hybrid scheme")
    params = cfg.params
    mu_model = _mu_model(cfg)
    vars, sol = _design(cfg, params, mu_model)
    if sol is not None:
        params = params.replace(mu=sol.mu)
    summ = montecarlo.simulate(vars, params, cfg.sim.realizations, cfg.seed, cfg.sim.ticks,
                               cfg.sim.V, threads=threads)
    rows = []
    for i, r in enumerate(summ.realizations):
        row = {k: getattr(r, k) for k in SIM_FIELDS[2:]}
        row.update(kind="realization", realization=i)
        rows.append(row)
    for kind, pick in (("mean", lambda n: summ.aggregates[n][0]), ("se", lambda n: summ.aggregates[n][1]),
                       ("analytic", lambda n: summ.analytic.get(n)),
                       ("rel_gap", lambda n: summ.relative_gap(n) if n in summ.analytic else None)):
        row = {"kind": kind}
        for n in SIM_FIELDS[2:]:
            if n in summ.aggregates or n in summ.analytic:
                row[n] = pick(n)
        rows.append(row)
    if fmt == "json":
        agg = {n: {"mean": m, "se": s, "analytic": summ.analytic.get(n),
                   "rel_gap": summ.relative_gap(n) if n in summ.analytic else None}
               for n, (m, s) in summ.aggregates.items()}
        design = {"scheme": vars.scheme.value, "rho": vars.rho, "r_I": vars.r_I, "r_U": vars.r_U}
        return write_json({"design": design, "mu": summ.mu, "seed": cfg.seed,
                           "realizations": [r for r in rows if r["kind"] == "realization"],
                           "aggregate": agg}, "simulate")
    return write_csv(rows, SIM_FIELDS, "simulate")


def cmd_benchmark(cfg: RunConfig, fmt, pool):
    mc = cfg.micro
    params = cfg.params.replace(P_G=mc.P_G, P_U=mc.P_micro)
    fields = montecarlo.generate_fields(params.lam, params.r_G, mc.realizations, cfg.seed)
    base = microcell.MicroLayout(1, params.r_G / 2, 100.0, 0.5, mc.H_micro, mc.G_micro, mc.P_micro)
    d_grid = tuple(x * params.r_G for x in mc.d_grid) if mc.d_grid else None
    rows = []
    for M in mc.M:
        res = microcell.optimize_layout(M, params, fields, d_grid, mc.r_grid, mc.rho_grid, base, pool)
        lay = res.layout
        rows.append({"scheme": "micro", "M": M, "theta": res.theta, "theta_per_km2": res.theta * 1e6,
                     "nu_bar_bps": res.nu_bar * params.W, "d_micro": lay.d_micro, "r_micro": lay.r_micro,
                     "rho_micro": lay.rho_micro})
    uav = optimizer.solve(Scheme.ORTHOGONAL, params, cfg.settings, _mu_model(cfg))
    rows.append({"scheme": "uav-orthogonal", "theta": uav.theta, "theta_per_km2": uav.theta * 1e6,
                 "nu_bar_bps": uav.nu_bar * params.W})
    gbs = optimizer.solve_gbs_only(params)
    rows.append({"scheme": "gbs-only", "theta": gbs.theta, "theta_per_km2": gbs.theta * 1e6,
                 "nu_bar_bps": gbs.nu_bar * params.W})
    if fmt == "json":
        return write_json({"rows": rows}, "benchmark")
    return write_csv(rows, BENCH_FIELDS, "benchmark")


def energy_example(cfg: RunConfig):
    """UAV energy-efficiency worked example at the configured fixed design."""
    params = cfg.params.replace(P_U=cfg.energy_P_U)
    r_I = cfg.energy_r_I_frac * params.r_G
    vars = DesignVars.at_optimal_radius(Scheme.ORTHOGONAL, cfg.energy_rho, r_I, params)
    if cfg.mu_auto:
        fields = montecarlo.generate_fields(params.lam, params.r_G, cfg.sim.mu_fields, cfg.seed)
        params = params.replace(mu=max(1.0, montecarlo.estimate_mu(fields, vars, params, cfg.sim.ticks)))
    theta_U = params.lam * an.uav_common_throughput(vars, params)
    return energy.energy_report(theta_U, vars, params, cfg.energy), params.mu


def cmd_energy(cfg: RunConfig, fmt):
    rep, mu = energy_example(cfg)
    row = {"r_U": rep.r_U, "theta_U": rep.theta_U, "theta_U_per_km2": rep.theta_U * 1e6, "V_opt": rep.V_opt,
           "propulsion_power": rep.propulsion_power, "transmit_power": rep.transmit_power,
           "period": rep.period, "bits_per_period": rep.bits_per_period,
           "energy_efficiency": rep.energy_efficiency,
           "energy_efficiency_kbit_per_J": rep.energy_efficiency / 1e3, "mu": mu}
    if fmt == "json":
        return write_json({"energy": row}, "energy")
    if fmt == "csv":
        return write_csv([row], ENERGY_FIELDS, "energy")
    return (
        f"trajectory radius    {rep.r_U:.2f} m\n"
        f"crowding factor      mu = {mu:.4f}\n"
        f"UAV spatial thr.     {rep.theta_U * 1e6:.4f} bps/Hz/km^2\n"
        f"optimal speed        {rep.V_opt:.2f} m/s\n"
        f"propulsion power     {rep.propulsion_power:.2f} W\n"
        f"transmit power       {rep.transmit_power:.3g} W ({watt_to_dbm(rep.transmit_power):.1f} dBm)\n"
        f"flight period        {rep.period:.2f} s\n"
        f"energy efficiency    {rep.energy_efficiency / 1e3:.1f} kbits/J\n"
    )


class _StderrHandler(logging.StreamHandler):
    # resolve sys.stderr at emit time so redirection after setup is honoured
    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


def _setup_logging(verbose):
    pkg = logging.getLogger("uavoffload")
    if not any(isinstance(h, _StderrHandler) for h in pkg.handlers):
        h = _StderrHandler()
        h.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
        pkg.addHandler(h)
    pkg.propagate = False
    pkg.setLevel(logging.INFO if verbose else logging.WARNING)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="sectioned key-value config file")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a config value (repeatable)")
    common.add_argument("--seed", type=int, help="master RNG seed")
    common.add_argument("--threads", type=int, help="worker threads (default: CPU count)")
    common.add_argument("--format", choices=("text", "csv", "json"), help="output format")
    common.add_argument("--out", help="write results to PATH instead of stdout")
    common.add_argument("--scheme", choices=[s.value for s in Scheme], help="scheme for solve/simulate")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="uavoffload", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="optimise one scheme")
    sub.add_parser("sweep", parents=[common], help="sweep P_U and/or user density over schemes")
    sub.add_parser("simulate", parents=[common], help="Monte Carlo validation of a design")
    sub.add_parser("benchmark", parents=[common], help="micro-cell offloading benchmark")
    sub.add_parser("energy", parents=[common], help="UAV energy-efficiency example")
    return p


DEFAULT_FORMAT = {"solve": "text", "energy": "text", "sweep": "csv", "simulate": "csv", "benchmark": "csv"}


def main(argv=None):
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    try:
        text = None
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(args.config, exc.strerror) from exc
        overrides = list(args.set) + ([f"run.scheme={args.scheme}"] if args.scheme else [])
        cfg = load_config(text, overrides, source=args.config or "<config>")
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.threads = args.threads or cfg.threads or os.cpu_count() or 1
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads", "must be >= 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for w in cfg.warnings:
        log.warning("%s", w)
    fmt = args.format or DEFAULT_FORMAT[args.command]
    if fmt == "text" and args.command in ("sweep", "simulate", "benchmark"):
        fmt = "csv"
    try:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            if args.command == "solve":
                out = cmd_solve(cfg, fmt)
            elif args.command == "sweep":
                out = cmd_sweep(cfg, fmt, pool)
            elif args.command == "simulate":
                out = cmd_simulate(cfg, fmt, cfg.threads)
            elif args.command == "benchmark":
                out = cmd_benchmark(cfg, fmt, pool)
            else:
                out = cmd_energy(cfg, fmt)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.error("%s: %s", type(exc).__name__, exc)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
