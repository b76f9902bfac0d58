"""Command-line interface.

Commands: ``gen``, ``diagnose``, ``sweep``, ``simulate``, ``lemmas-selftest``.
Options may come from a TOML file (``--config``): top-level keys or a table
named after the command; flags given on the command line take precedence.

Exit codes: 0 success, 2 validation error, 3 internal cross-check failure,
4 infeasible generation targets.
"""
import argparse
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np
import tomli_w

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import lemmas, serialize
from .diagnose import diagnose
from .errors import InfeasibleTargets, NumericalError, OutOfRange, ValidationError
from .models import DimensionSchedule, certify_assumptions, random_var1, random_varma11
from .montecarlo import (SweepTargets, empirical_covariances, empirical_rho1_plugin,
                         simulate, sweep_csv, triangular_array_run)
from .phi2 import bound_holds
from .stationary import solve_stationary

EXIT_OK, EXIT_VALIDATION, EXIT_CROSSCHECK, EXIT_INFEASIBLE = 0, 2, 3, 4

DEFAULTS = {
    "gen": {"kind": "var1", "p": None, "k": None, "mu": 0.5, "delta": 0.1, "zeta": 10.0,
            "seed": 0},
    "diagnose": {"model": None, "delta": 0.1, "zeta": 10.0, "mu": None, "n_max": 20,
                 "csv": None, "json": None},
    "sweep": {"kind": "var1", "schedule": "linear:2", "T": [5, 10, 20, 40], "k": 2,
              "delta": 0.1, "zeta": 10.0, "mu": 0.5, "seeds": None, "seed": 0, "n_max": 20,
              "bins": 10, "empirical": True, "jobs": 1},
    "simulate": {"model": None, "T": 1000, "seed": 0, "init": "exact_stationary"},
    "lemmas-selftest": {"instances": 500, "sizes": [1, 2, 5, 20], "seed": 0,
                        "tolerance_override": None},
}
COMMON = {"out": None, "quiet": False}


class UsageError(ValidationError):
    pass


@dataclass
class RunConfig:
    """Resolved parameters of one command invocation."""

    command: str
    params: dict = field(default_factory=dict)

    def to_toml(self):
        table = {k: v for k, v in self.params.items() if v is not None}
        return tomli_w.dumps({"command": self.command, self.command: table})

    @classmethod
    def from_toml(cls, text, command=None):
        data = tomllib.loads(text)
        command = command or data.get("command")
        if command not in DEFAULTS:
            raise UsageError("config does not name a known command")
        params = {k: v for k, v in data.items()
                  if not isinstance(v, dict) and k != "command"}
        params.update(data.get(command, {}))
        return cls(command, params)


def _int_list(text):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file with option values")
    common.add_argument("--out", help="output path")
    common.add_argument("--seed", type=int, help="unsigned 64-bit seed")
    common.add_argument("--quiet", action="store_true", default=None)

    parser = argparse.ArgumentParser(prog="rhomix", description=__doc__.splitlines()[0],
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a certified random model")
    p.add_argument("--kind", choices=["var1", "varma11"])
    p.add_argument("--p", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--mu", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--zeta", type=float)

    p = sub.add_parser("diagnose", parents=[common], help="phi2, bound and rho(n) report")
    p.add_argument("--model")
    p.add_argument("--delta", type=float)
    p.add_argument("--zeta", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--csv", help="write the rho(n) table here")
    p.add_argument("--json", help="write the full report as JSON here")

    p = sub.add_parser("sweep", parents=[common], help="triangular-array sweep to CSV")
    p.add_argument("--kind", choices=["var1", "varma11"])
    p.add_argument("--schedule", help="linear:c | power:c,a | fixed:p")
    p.add_argument("--T", type=_int_list)
    p.add_argument("--k", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--zeta", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--seeds", type=_int_list)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--bins", type=int)
    p.add_argument("--empirical", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--jobs", type=int)

    p = sub.add_parser("simulate", parents=[common], help="simulate a path to CSV")
    p.add_argument("--model")
    p.add_argument("--T", type=int)
    p.add_argument("--init", help="exact_stationary | burn_in[:m]")

    p = sub.add_parser("lemmas-selftest", parents=[common], help="randomized lemma suites")
    p.add_argument("--instances", type=int)
    p.add_argument("--sizes", type=_int_list)
    p.add_argument("--tolerance-override", dest="tolerance_override", type=float,
                   help=argparse.SUPPRESS)
    return parser


def resolve(args):
    """Merge defaults, config file and flags into a :class:`RunConfig`."""
    cmd = args.command
    params = dict(COMMON)
    params.update(DEFAULTS[cmd])
    if args.config:
        try:
            with open(args.config) as fh:
                data = tomllib.loads(fh.read())
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise UsageError("cannot read config %s: %s" % (args.config, exc)) from None
        # top-level keys are shared across commands and apply only where they exist;
        # keys in the command's own table must be known to it
        shared = {k for table in DEFAULTS.values() for k in table} | set(COMMON)
        top = {k: v for k, v in data.items() if not isinstance(v, dict) and k != "command"}
        table = data.get(cmd, {})
        unknown = (set(top) - shared) | (set(table) - set(params))
        if unknown:
            raise UsageError("unknown config key(s) for %s: %s" % (cmd, ", ".join(sorted(unknown))))
        params.update({k: v for k, v in top.items() if k in params})
        params.update(table)
    for key in params:
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    return RunConfig(cmd, params)


def _require(cond, msg):
    if not cond:
        raise UsageError(msg)


def validate(cfg):
    p = cfg.params
    seed = p.get("seed")
    _require(seed is None or (isinstance(seed, int) and 0 <= seed < 2**64),
             "seed must be an unsigned 64-bit integer")
    if cfg.command == "gen":
        _require(p["out"] is not None, "gen needs --out")
        _require(isinstance(p["p"], int) and p["p"] >= 1, "--p must be a positive integer")
        _require(isinstance(p["k"], int) and 0 <= p["k"] <= p["p"], "--k must satisfy 0 <= k <= p")
        if p["kind"] == "varma11":
            _require(1 <= p["k"] < p["p"], "factor models need 1 <= k < p")
        _require(0 < p["mu"] < 1, "--mu must lie in (0, 1)")
        _require(0 < p["delta"] < p["zeta"], "need 0 < delta < zeta")
    elif cfg.command == "diagnose":
        _require(p["model"] is not None, "diagnose needs --model")
        _require(0 < p["delta"] < p["zeta"], "need 0 < delta < zeta")
        _require(p["mu"] is None or 0 <= p["mu"] < 1, "--mu must lie in [0, 1)")
        _require(p["n_max"] >= 2, "--n-max must be at least 2")
    elif cfg.command == "sweep":
        _require(p["T"] and all(t >= 1 for t in p["T"]), "sweep needs a non-empty list of T >= 1")
        if p["seeds"] is None:
            p["seeds"] = [p["seed"]]
        _require(p["seeds"] and all(0 <= s < 2**64 for s in p["seeds"]), "bad seed list")
        _require(0 <= p["k"], "--k must be non-negative")
        _require(0 < p["mu"] < 1, "--mu must lie in (0, 1)")
        _require(0 < p["delta"] < p["zeta"], "need 0 < delta < zeta")
        _require(p["n_max"] >= 2 and p["bins"] >= 2 and p["jobs"] >= 1,
                 "--n-max, --bins must be >= 2 and --jobs >= 1")
        DimensionSchedule.parse(p["schedule"])
    elif cfg.command == "simulate":
        _require(p["model"] is not None, "simulate needs --model")
        _require(p["T"] >= 1, "--T must be positive")
    elif cfg.command == "lemmas-selftest":
        _require(p["instances"] >= 1 and p["sizes"] and all(n >= 1 for n in p["sizes"]),
                 "instances and sizes must be positive")
    return cfg


def _say(cfg, text):
    if not cfg.params.get("quiet"):
        sys.stdout.write(text)


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".rhomix-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_gen(cfg):
    p = cfg.params
    gen = random_var1 if p["kind"] == "var1" else random_varma11
    model = gen(p["p"], p["k"], p["mu"], p["delta"], p["zeta"], seed=p["seed"])
    gamma = solve_stationary(model)
    cert = certify_assumptions(model, p["delta"], p["zeta"], gamma,
                               mu=p["mu"] if p["kind"] == "varma11" else None)
    _atomic_write(p["out"], serialize.dumps(serialize.model_to_dict(model)))
    cert_path = cert_path_for(p["out"])
    _atomic_write(cert_path, serialize.dumps(cert.to_dict()))
    _say(cfg, "wrote %s and %s (certificate %s)\n"
         % (p["out"], cert_path, "passed" if cert.passed else "FAILED"))
    return EXIT_OK if cert.passed else EXIT_CROSSCHECK


def cert_path_for(model_path):
    root, ext = os.path.splitext(model_path)
    return root + ".cert.json"


def cmd_diagnose(cfg):
    p = cfg.params
    try:
        model = serialize.load_model(p["model"])
    except OSError as exc:
        raise UsageError("cannot read model file: %s" % exc) from None
    diag = diagnose(model, p["delta"], p["zeta"], mu=p["mu"], n_max=p["n_max"])
    text = diag.render()
    _say(cfg, text)
    if p["out"]:
        _atomic_write(p["out"], text)
    if p["csv"]:
        _atomic_write(p["csv"], diag.rho_csv())
    if p["json"]:
        _atomic_write(p["json"], serialize.dumps(diag.to_dict()))
    return EXIT_OK if diag.ok else EXIT_CROSSCHECK


def cmd_sweep(cfg):
    p = cfg.params
    targets = SweepTargets(k=p["k"], delta=p["delta"], zeta=p["zeta"], mu=p["mu"],
                           kind=p["kind"])
    rows = triangular_array_run(DimensionSchedule.parse(p["schedule"]), p["T"], targets,
                                p["seeds"], n_max=p["n_max"], empirical=p["empirical"],
                                bins=p["bins"], jobs=p["jobs"])
    text = sweep_csv(rows, p["n_max"])
    if p["out"]:
        _atomic_write(p["out"], text)
        _say(cfg, "wrote %d rows to %s\n" % (len(rows), p["out"]))
    else:
        _say(cfg, text)
    bad = [r for r in rows if not bound_holds(r["phi2_closed"], r["phi2_bound"], r["k"])]
    return EXIT_CROSSCHECK if bad else EXIT_OK


def cmd_simulate(cfg):
    p = cfg.params
    try:
        model = serialize.load_model(p["model"])
    except OSError as exc:
        raise UsageError("cannot read model file: %s" % exc) from None
    gamma = solve_stationary(model)
    run = simulate(model, gamma, p["T"], seed=p["seed"], init_mode=p["init"])
    header = ",".join("x%d" % (i + 1) for i in range(model.p))
    lines = [header] + [",".join(format(v, ".17g") for v in row) for row in run.path]
    text = "\n".join(lines) + "\n"
    if p["out"]:
        _atomic_write(p["out"], text)
        summary = "simulated T=%d p=%d init=%s seed=%d -> %s\n" % (
            run.T, run.p, run.init_mode, p["seed"], p["out"])
        if run.T >= run.p + 2:
            est = empirical_covariances(run)
            summary += "rho1_hat = %.10g\n" % empirical_rho1_plugin(est)
        _say(cfg, summary)
    else:
        _say(cfg, text)
    return EXIT_OK


def cmd_lemmas_selftest(cfg):
    p = cfg.params
    results = lemmas.run_all(instances=p["instances"], sizes=tuple(p["sizes"]),
                             seed=p["seed"], tol=p["tolerance_override"])
    lines = ["%-20s instances=%d passed=%d worst_violation=%.3e"
             % (r.name, r.instances, r.passed, r.worst_violation) for r in results]
    for r in results:
        if not r.ok and r.witness is not None:
            lines.append("witness for %s:" % r.name)
            for key, mat in r.witness.items():
                lines.append("  %s = %s" % (key, np.array2string(np.asarray(mat), precision=17,
                                                                  max_line_width=200)))
    text = "\n".join(lines) + "\n"
    _say(cfg, text)
    if p["out"]:
        _atomic_write(p["out"], text)
    return EXIT_OK if all(r.ok for r in results) else EXIT_CROSSCHECK


COMMANDS = {"gen": cmd_gen, "diagnose": cmd_diagnose, "sweep": cmd_sweep,
            "simulate": cmd_simulate, "lemmas-selftest": cmd_lemmas_selftest}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = validate(resolve(args))
        return COMMANDS[cfg.command](cfg)
    except InfeasibleTargets as exc:
        sys.stderr.write("rhomix: infeasible targets: %s\n" % exc)
        return EXIT_INFEASIBLE
    except ValidationError as exc:
        sys.stderr.write("rhomix: %s\n" % exc)
        return EXIT_VALIDATION
    except NumericalError as exc:
        sys.stderr.write("rhomix: numerical cross-check failed: %s\n" % exc)
        return EXIT_CROSSCHECK


if __name__ == "__main__":
    sys.exit(main())
