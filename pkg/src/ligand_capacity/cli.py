"""Command-line front end.

Every run prints (or writes) a report. JSON reports carry ``schema_version``,
the fully resolved ``config``, the ``seed`` and the ``result``; feeding a
report back through ``--config`` repeats the run. Exit status is 0 on
success, 1 on invalid input and 2 when a verification check fails.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

from . import channel, continuous, directed, iid, poisson, verify
from .channel import ChannelParams

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "LIGAND_CAPACITY_OUTPUT_DIR"

COMMANDS = ("capacity", "sweep", "rate", "directed-info", "verify", "check-conditions",
            "kabanov", "kabanov-converge", "simulate", "ode-check")


class UsageError(Exception):
    """Bad flag value; the message names the flag."""


@dataclass
class RunConfig:
    command: str
    alpha_l: float = 0.1
    alpha_h: float = 0.9
    beta: float = 0.5
    n: int = 8
    tol: float = 1e-9
    seed: int = 0
    grid: float = 0.05
    p_h: float = 0.5
    policy: str = "iid"
    p_l_given_u: float = 0.5
    p_l_given_b: float = 0.5
    optimize: bool = False
    initial: str = "U"
    horizon: int = 0
    trials: int = 1
    workers: int = 1
    inputs: str = ""
    alpha_l_values: list[float] = field(default_factory=list)
    alpha_h_values: list[float] = field(default_factory=list)
    beta_values: list[float] = field(default_factory=list)
    points: int = 11
    c: float = 1.0
    dt: list[float] = field(default_factory=list)
    grid_points: int = 50
    k_plus: float = 1.0
    k_minus: float = 1.0
    c_l: float = 0.5
    c_h: float = 2.0
    format: str = "json"
    output: str | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})

    def channel_params(self) -> ChannelParams:
        for flag, v in (("--alpha-l", self.alpha_l), ("--alpha-h", self.alpha_h), ("--beta", self.beta)):
            if not (0.0 <= v <= 1.0):
                raise UsageError(f"{flag}: must lie in [0, 1], got {v!r}")
        if self.alpha_l > self.alpha_h:
            raise UsageError(
                f"--alpha-l: alpha_L <= alpha_H required (got --alpha-l {self.alpha_l!r} > --alpha-h {self.alpha_h!r})"
            )
        return ChannelParams(self.alpha_l, self.alpha_h, self.beta)


def _require(cond: bool, message: str):
    if not cond:
        raise UsageError(message)


def _prob_flag(flag: str, v: float):
    _require(0.0 <= v <= 1.0, f"{flag}: must lie in [0, 1], got {v!r}")


def _initial(cfg: RunConfig, params: ChannelParams, policy=None):
    if cfg.initial in ("U", "B"):
        return channel.ReceptorState[cfg.initial]
    _require(cfg.initial == "stationary", f"--initial: expected U, B or stationary, got {cfg.initial!r}")
    _require(policy is not None and policy.policy_class in (directed.PolicyClass.IID, directed.PolicyClass.STATIONARY),
             "--initial: stationary start needs an iid or stationary policy")
    return directed.stationary_initial(params, policy)


# -- command handlers: each returns a JSON-ready dict --------------------------------

def _capacity_dict(res: iid.CapacityResult) -> dict:
    return {"value_bits_per_step": float(res.value_bits_per_step), "argmax_p_H": float(res.argmax_p_H),
            "optimizer_evals": int(res.optimizer_evals), "bracket_width": float(res.bracket_width),
            "diagnostic": res.diagnostic}


def cmd_capacity(cfg):
    _require(cfg.tol > 0, "--tol: must be positive")
    return _capacity_dict(iid.maximize_iid(cfg.channel_params(), cfg.tol))


def cmd_sweep(cfg):
    _require(cfg.tol > 0, "--tol: must be positive")
    _require(cfg.workers >= 1, "--workers: must be >= 1")
    if cfg.alpha_l_values or cfg.alpha_h_values or cfg.beta_values:
        al, ah, b = cfg.alpha_l_values, cfg.alpha_h_values, cfg.beta_values
        _require(bool(al) and bool(ah) and bool(b),
                 "--alpha-l-values: give all of --alpha-l-values, --alpha-h-values, --beta-values")
    else:
        _require(cfg.points >= 2, "--points: must be >= 2")
        grid = [k / (cfg.points - 1) for k in range(cfg.points)]
        al = ah = b = grid
    for flag, vals in (("--alpha-l-values", al), ("--alpha-h-values", ah), ("--beta-values", b)):
        for v in vals:
            _prob_flag(flag, v)
    rows = iid.capacity_sweep(al, ah, b, cfg.tol, cfg.workers)
    out = []
    for r in rows:
        d = {"alpha_L": r.alpha_L, "alpha_H": r.alpha_H, "beta": r.beta}
        if r.result is None:
            d.update(value_bits_per_step=None, argmax_p_H=None, optimizer_evals=None,
                     bracket_width=None, diagnostic=r.flag)
        else:
            d.update(_capacity_dict(r.result))
        out.append(d)
    return {"rows": out}


def cmd_rate(cfg):
    params = cfg.channel_params()
    _prob_flag("--p-h", cfg.p_h)
    out = {"rate_bits_per_step": iid.iid_rate(params, cfg.p_h)}
    if cfg.horizon:
        _require(cfg.horizon >= 2, "--horizon: must be >= 2")
        _require(cfg.trials >= 1, "--trials: must be >= 1")
        _require(cfg.workers >= 1, "--workers: must be >= 1")
        est = channel.estimate_rate_mc(params, cfg.p_h, cfg.horizon, cfg.trials, cfg.seed, cfg.workers)
        out.update(mc_rate_bits_per_step=est.rate_bits, mc_stderr=est.stderr,
                   mc_transitions=est.transitions, mc_diagnostics=list(est.diagnostics))
    return out


def cmd_directed_info(cfg):
    params = cfg.channel_params()
    _require(cfg.n >= 1, "--n: must be >= 1")
    try:
        cls = directed.PolicyClass(cfg.policy)
    except ValueError:
        raise UsageError(f"--policy: expected one of {[c.value for c in directed.PolicyClass]}, got {cfg.policy!r}")
    try:
        if cfg.optimize:
            _require(0.0 < cfg.grid <= 1.0, "--grid: must lie in (0, 1]")
            init = _initial(cfg, params, directed.IidPolicy(0.5) if cfg.initial == "stationary" else None)
            if cfg.initial == "stationary":
                raise UsageError("--initial: stationary start is not supported with --optimize")
            res = directed.max_feedback_di(params, cls, init, cfg.n, cfg.grid)
            return {"policy_class": cls.value, "per_symbol_bits": res.per_symbol_bits,
                    "theta": list(res.theta), "evaluations": res.evaluations}
        _prob_flag("--p-l-given-u", cfg.p_l_given_u)
        _prob_flag("--p-l-given-b", cfg.p_l_given_b)
        if cls is directed.PolicyClass.IID:
            pol = directed.IidPolicy(cfg.p_l_given_u)
        elif cls is directed.PolicyClass.STATIONARY:
            pol = directed.StationaryPolicy(cfg.p_l_given_u, cfg.p_l_given_b)
        elif cls is directed.PolicyClass.PREV_OUTPUT:
            pol = directed.PrevOutputPolicy((cfg.p_l_given_u,) * cfg.n, (cfg.p_l_given_b,) * cfg.n)
        else:
            raise UsageError("--policy: general policies can only be optimised (add --optimize)")
        res = directed.directed_information(params, pol, _initial(cfg, params, pol), cfg.n)
    except directed.EnumerationBudgetError as exc:
        raise UsageError(f"--n: {exc}")
    return {"total_bits": res.total_bits, "per_term_bits": list(res.per_term_bits),
            "per_symbol_bits": res.per_symbol_bits}


def cmd_verify(cfg):
    params = cfg.channel_params()
    _require(params.strict, "--alpha-l/--alpha-h/--beta: verification needs all three strictly inside (0, 1)")
    _require(1 <= cfg.n <= directed.OPTIMIZE_CAPS["prev-output"],
             f"--n: must lie in [1, {directed.OPTIMIZE_CAPS['prev-output']}]")
    _require(0.0 < cfg.grid <= 1.0, "--grid: must lie in (0, 1]")
    rep = verify.verify_theorem1(params, cfg.n, cfg.grid, cfg.seed)
    return {"passed": rep.passed,
            "checks": [{"name": c.name, "passed": c.passed, "measured": c.measured,
                        "tolerance": c.tolerance, "detail": c.detail} for c in rep.checks],
            "optima": rep.optima}


def cmd_check_conditions(cfg):
    rep = verify.check_conditions(cfg.channel_params())
    return {"strictly_interior": rep.strictly_interior, "strongly_irreducible": rep.strongly_irreducible,
            "strongly_aperiodic": rep.strongly_aperiodic, "R_B_columns_identical": rep.R_B_columns_identical,
            "R_U_case": rep.R_U_case.value if rep.R_U_case else None,
            "theorem1_applicable": rep.theorem1_applicable, "details": rep.details}


def cmd_kabanov(cfg):
    _require(cfg.c > 0, "--c: must be positive")
    nats = poisson.kabanov_capacity(cfg.c)
    return {"c": cfg.c, "capacity_nats_per_time": nats, "capacity_bits_per_time": nats / math.log(2)}


def cmd_kabanov_converge(cfg):
    _require(cfg.c >= 0, "--c: must be nonnegative")
    dts = cfg.dt or [0.2, 0.1, 0.05, 0.025, 0.0125]
    for d in dts:
        _require(d > 0 and d * (1 + cfg.c) <= 1, f"--dt: need 0 < dt and dt * (1 + c) <= 1, got {d!r}")
    _require(2 <= cfg.n <= poisson.BOUNDS_CAP, f"--n: must lie in [2, {poisson.BOUNDS_CAP}]")
    _require(cfg.grid_points >= 1, "--grid-points: must be >= 1")
    rows = poisson.kabanov_convergence(cfg.c, dts, cfg.n, cfg.grid_points)
    return {"rows": [{"dt": r.dt, "best_r": r.best_r, "best_s": r.best_s,
                      "rate_nats_per_time": r.rate_nats_per_time,
                      "lower_nats_per_time": r.lower_nats_per_time,
                      "upper_nats_per_time": r.upper_nats_per_time,
                      "kabanov_nats_per_time": r.kabanov_nats_per_time,
                      "gap_nats_per_time": r.gap,
                      "abs_gap_nats_per_time": r.abs_gap} for r in rows]}


def cmd_simulate(cfg):
    params = cfg.channel_params()
    _require(cfg.initial in ("U", "B"), "--initial: simulation starts from U or B")
    if cfg.inputs:
        _require(set(cfg.inputs) <= {"L", "H"}, "--inputs: use only the letters L and H")
        inputs = cfg.inputs
    else:
        _require(cfg.horizon >= 1, "--horizon: give --inputs or a positive --horizon")
        _prob_flag("--p-h", cfg.p_h)
        x, _ = channel._sample_iid(params, cfg.p_h, cfg.horizon, cfg.seed, 1, 0)
        inputs = "".join("LH"[v] for v in x)
    traj = channel.sample_trajectory(params, inputs, cfg.initial, cfg.seed)
    return {"inputs": inputs, "outputs": "".join("UB"[v] for v in traj.outputs),
            "fraction_bound": float(traj.outputs.mean())}


def cmd_ode_check(cfg):
    dts = cfg.dt or [0.1, 0.01, 0.001]
    for d in dts:
        _require(d > 0, f"--dt: must be positive, got {d!r}")
        _require(max(cfg.k_plus * cfg.c_h, cfg.k_plus * cfg.c_l, cfg.k_minus) * d <= 1.0,
                 f"--dt: {d!r} gives a transition probability above 1")
    try:
        rows = continuous.discretization_consistency(cfg.k_plus, cfg.k_minus, cfg.c_l, cfg.c_h, dts)
    except ValueError as exc:
        raise UsageError(f"--dt: {exc}")
    out = {"rows": [{"dt": r.dt, "alpha_L": r.params.alpha_L, "alpha_H": r.params.alpha_H,
                     "beta": r.params.beta, "max_deviation": r.max_deviation, "boundary": r.boundary}
                    for r in rows]}
    if len(rows) >= 2:
        out["loglog_slope"] = continuous.loglog_slope(rows)
    return out


HANDLERS = {
    "capacity": cmd_capacity, "sweep": cmd_sweep, "rate": cmd_rate,
    "directed-info": cmd_directed_info, "verify": cmd_verify,
    "check-conditions": cmd_check_conditions, "kabanov": cmd_kabanov,
    "kabanov-converge": cmd_kabanov_converge, "simulate": cmd_simulate,
    "ode-check": cmd_ode_check,
}


# -- serialisation -------------------------------------------------------------------

def _flatten(d: dict, prefix: str = "") -> dict:
    flat = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            flat.update(_flatten(v, key + "."))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for i, item in enumerate(v):
                flat.update(_flatten(item, f"{key}.{i}."))
        elif isinstance(v, list):
            for i, item in enumerate(v):
                flat[f"{key}.{i}"] = item
        else:
            flat[key] = v
    return flat


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(result: dict) -> str:
    if "rows" in result:
        summary = {k: v for k, v in result.items() if k != "rows"}
        rows = [{**r, **summary} for r in result["rows"]]
    else:
        rows = [result]
    flat = [_flatten(r) for r in rows]
    header = list(dict.fromkeys(k for r in flat for k in r))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in flat:
        w.writerow([_csv_cell(r.get(k)) for k in header])
    return buf.getvalue()


def run(cfg: RunConfig) -> tuple[int, str]:
    """Dispatch one command; returns (exit status, serialised report or error line)."""
    if cfg.command not in HANDLERS:
        return 1, f"error: unknown command {cfg.command!r}"
    if cfg.format not in ("json", "csv"):
        return 1, f"error: --format: expected json or csv, got {cfg.format!r}"
    try:
        result = HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        return 1, f"error: {exc}"
    except directed.EnumerationBudgetError as exc:
        return 1, f"error: --n: {exc}"
    status = 2 if cfg.command == "verify" and not result["passed"] else 0
    if cfg.format == "csv":
        return status, to_csv(result)
    report = {"schema_version": SCHEMA_VERSION, "command": cfg.command, "config": cfg.to_dict(),
              "seed": cfg.seed, "result": result}
    return status, json.dumps(report, indent=2) + "\n"


# -- argument parsing ----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ligand-capacity", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="re-run the config stored in a JSON report")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, channel_flags=True):
        if channel_flags:
            sp.add_argument("--alpha-l", type=float, default=0.1)
            sp.add_argument("--alpha-h", type=float, default=0.9)
            sp.add_argument("--beta", type=float, default=0.5)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--output", default=None)

    sp = sub.add_parser("capacity", help="maximise the iid rate")
    common(sp)
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = sub.add_parser("sweep", help="capacity over a parameter grid")
    common(sp, channel_flags=False)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--points", type=int, default=11)
    sp.add_argument("--alpha-l-values", type=_floats, default=[])
    sp.add_argument("--alpha-h-values", type=_floats, default=[])
    sp.add_argument("--beta-values", type=_floats, default=[])
    sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("rate", help="iid rate at one input law, optionally with Monte Carlo")
    common(sp)
    sp.add_argument("--p-h", type=float, default=0.5)
    sp.add_argument("--horizon", type=int, default=0)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("directed-info", help="directed information of a policy or the best in a class")
    common(sp)
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--policy", default="iid")
    sp.add_argument("--p-l-given-u", type=float, default=0.5)
    sp.add_argument("--p-l-given-b", type=float, default=0.5)
    sp.add_argument("--initial", default="U")
    sp.add_argument("--optimize", action="store_true")
    sp.add_argument("--grid", type=float, default=0.05)

    sp = sub.add_parser("verify", help="finite-horizon checks that feedback does not help")
    common(sp)
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--grid", type=float, default=0.05)

    sp = sub.add_parser("check-conditions", help="support-graph and R_i conditions")
    common(sp)

    sp = sub.add_parser("kabanov", help="Poisson-channel capacity")
    common(sp, channel_flags=False)
    sp.add_argument("--c", type=float, default=1.0)

    sp = sub.add_parser("kabanov-converge", help="discrete Markov-input rates as dt shrinks")
    common(sp, channel_flags=False)
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--dt", type=_floats, default=[])
    sp.add_argument("--n", type=int, default=12)
    sp.add_argument("--grid-points", type=int, default=50)

    sp = sub.add_parser("simulate", help="sample one receptor trajectory")
    common(sp)
    sp.add_argument("--inputs", default="")
    sp.add_argument("--p-h", type=float, default=0.5)
    sp.add_argument("--horizon", type=int, default=0)
    sp.add_argument("--initial", default="U")

    sp = sub.add_parser("ode-check", help="discrete chain against the binding ODE")
    common(sp, channel_flags=False)
    sp.add_argument("--dt", type=_floats, default=[])
    sp.add_argument("--k-plus", type=float, default=1.0)
    sp.add_argument("--k-minus", type=float, default=1.0)
    sp.add_argument("--c-l", type=float, default=0.5)
    sp.add_argument("--c-h", type=float, default=2.0)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = {k: v for k, v in vars(ns).items() if k != "config"}
    return RunConfig.from_dict(d)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a parse error already reported
        return exc.code if isinstance(exc.code, int) else 1
    if ns.config:
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: --config: {exc}", file=sys.stderr)
            return 1
        cfg = RunConfig.from_dict(data.get("config", data))
    elif ns.command is None:
        parser.print_usage(sys.stderr)
        print("error: a command is required", file=sys.stderr)
        return 1
    else:
        cfg = config_from_args(ns)

    status, text = run(cfg)
    if status == 1:
        print(text, file=sys.stderr)
        return status
    target = cfg.output
    if target is None and os.environ.get(OUTPUT_DIR_ENV):
        target = os.path.join(os.environ[OUTPUT_DIR_ENV], f"{cfg.command}.{cfg.format}")
    if target:
        with open(target, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
