"""Command-line runner: ``nlgreen <command> [flags]`` or ``python -m nlgreen``.

Every command writes UTF-8 CSV (stdout or ``--out``) preceded by ``#``
comment lines echoing the resolved configuration. ``--config FILE`` reads
``key=value`` lines for the same options; explicit flags win.

Exit status: 0 success, 1 domain/validation error, 2 numerical failure.
"""

import argparse
import sys

import numpy as np

from . import kernels as _k
from . import reduce as _red
from . import spectrum as _spec
from .calibrate import CalibrationResult, calibrate, log_error, table2_csv, table2_harness
from .cauchy import SampledTrajectory, numeric_green, verify_green
from .errors import NLGreenError, NumericalError
from .solver import BUILTIN_SOURCES, builtin_source, reference_solution, short_time_expansion

FMT = "%.9g"


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- parsing helpers


def _pair(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _axis(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")
    n = int(parts[2])
    if n < 3:
        raise argparse.ArgumentTypeError("axis needs at least 3 points")
    return float(parts[0]), float(parts[1]), n


def _params(items):
    out = {}
    for item in items or []:
        for chunk in item.split(","):
            key, sep, val = chunk.partition("=")
            if not sep:
                raise UsageError(f"--param expects key=value, got {chunk!r}")
            out[key.strip()] = float(val)
    return out


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def read_config(path):
    cfg = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            cfg[key.strip().replace("-", "_")] = val.strip()
    return cfg


# ---------------------------------------------------------------- output


class _Writer:
    def __init__(self, args, command):
        self.args = args
        self.command = command
        self.lines = [f"# nlgreen {command}"]
        for key in sorted(vars(args)):
            if key in ("func", "command", "out", "config"):
                continue
            self.lines.append(f"# {key}={_show(getattr(args, key))}")

    def comment(self, text):
        self.lines.append(f"# {text}")

    def row(self, *values):
        self.lines.append(",".join(_fmt(v) for v in values))

    def flush(self):
        text = "\n".join(self.lines) + "\n"
        if self.args.out:
            with open(self.args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return FMT % v


def _show(v):
    if isinstance(v, (list, tuple)):
        return ":".join(_show(x) for x in v) if v and not isinstance(v[0], str) else ",".join(map(str, v))
    if isinstance(v, float):
        return FMT % v
    return str(v)


# ---------------------------------------------------------------- commands


def cmd_kernels(args):
    out = _Writer(args, "kernels")
    out.row("id", "term", "params", "theorem2", "offset", "window")
    for spec in _k.list_kernels():
        params = ";".join(f"{k}={FMT % v}" for k, v in spec.defaults.items())
        out.row(spec.id, spec.term, params, spec.theorem2, spec.offset, _k.kernel_window(spec.id))
    out.flush()
    return 0


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command}: missing required option(s) " + ", ".join("--" + m for m in missing))


def _green_for(args):
    _need(args, "kernel")
    spec = _k.get_kernel(args.kernel)
    params = _params(args.param)
    tmax = args.tmax if args.tmax is not None else _k.kernel_window(args.kernel, params)
    if args.numeric:
        if not spec.theorem2:
            raise UsageError(f"{args.kernel}: N(0,0,t) != 0, the numeric construction does not apply")
        s = _k.kernel_jump(args.kernel, params)
        G = numeric_green(spec.nonlinearity(params), s, (0.0, tmax), args.step, args.tol)
    else:
        G = SampledTrajectory.from_function(lambda t: spec.closed_form(t, params), 0.0, tmax, args.step)
    return spec, params, G


def _report(spec, params, G):
    s = _k.kernel_jump(spec.id, params)
    return verify_green(G, spec.nonlinearity(params), s, spec.offset)


def cmd_green(args):
    spec, params, G = _green_for(args)
    out = _Writer(args, "green")
    status = 0
    if args.verify:
        rep = _report(spec, params, G)
        line = (
            f"verify: interior_residual={FMT % rep.interior_residual} jump_defect={FMT % rep.jump_defect} "
            f"value_defect={FMT % rep.value_defect} ok={str(rep.ok()).lower()}"
        )
        out.comment(line)
        print(line, file=sys.stderr)
        status = 0 if rep.ok() else 2
    out.row("t", "G")
    for t, g in zip(G.t, G.values):
        out.row(t, g)
    out.flush()
    return status


def cmd_verify(args):
    ids = [s.id for s in _k.list_kernels()] if args.kernel == "all" else [args.kernel]
    params = _params(args.param)
    out = _Writer(args, "verify")
    out.row("kernel", "interior_residual", "jump_defect", "value_defect", "slope_at_zero", "ok")
    failed = False
    for kid in ids:
        spec = _k.get_kernel(kid)
        p = params if args.kernel != "all" else {}
        tmax = args.tmax if args.tmax is not None else _k.kernel_window(kid, p)
        G = SampledTrajectory.from_function(lambda t: spec.closed_form(t, p), 0.0, tmax, args.step)
        rep = _report(spec, p, G)
        failed |= not rep.ok()
        out.row(kid, rep.interior_residual, rep.jump_defect, rep.value_defect, rep.slope_at_zero, rep.ok())
    out.flush()
    return 2 if failed else 0


def _family_nl(args):
    if args.family == "burgers":
        return _red.reduce_traveling("burgers", _red.TravelingWaveMap(args.v))
    if args.family == "heat":
        return _red.reduce_traveling("heat", _red.TravelingWaveMap(args.v), {"n": args.n})
    return _red.reduce_traveling("wave", _red.TravelingWaveMap(args.v, args.c), {"n": args.n, "alpha": args.alpha})


def cmd_solve(args):
    N = _k.kernel_nonlinearity(args.kernel, _params(args.param)) if args.kernel else _family_nl(args)
    f = builtin_source(args.source)
    window = (0.0, args.tmax)
    G = numeric_green(N, args.s, window, args.step, args.tol)
    coeffs = (args.a0,) + tuple(args.coeffs or ())
    w = short_time_expansion(G, f, coeffs)
    ref = reference_solution(N, f, window=window, tol=args.tol, h_out=args.step)
    er = log_error(w, ref)
    out = _Writer(args, "solve")
    out.comment(f"max_er={FMT % er.values.max()}")
    out.row("t", "w_green", "w_ref", "er")
    for row in zip(w.t, w.values, ref.values, er.values):
        out.row(*row)
    out.flush()
    return 0


def _cal_kwargs(args):
    return dict(
        bounds_s=args.bounds_s,
        bounds_a0=args.bounds_a0,
        tol=args.tol,
        expansion_order=args.expansion_order,
    )


def cmd_calibrate(args):
    N = _red.reduce_traveling("burgers", _red.TravelingWaveMap(args.v))
    res = calibrate(N, builtin_source(args.source), window=args.window, h=args.step, **_cal_kwargs(args))
    out = _Writer(args, "calibrate")
    out.comment(f"grid: {res.grid}; restart spread {FMT % res.restart_spread}")
    for line in table2_csv([(args.source, res)]).splitlines():
        out.lines.append(line)
    out.flush()
    return 0


def cmd_table2(args):
    rows = table2_harness(args.v, args.window, args.step, **_cal_kwargs(args))
    out = _Writer(args, "table2")
    for line in table2_csv(rows).splitlines():
        out.lines.append(line)
    out.flush()
    failed = any(not isinstance(r, CalibrationResult) for _, r in rows)
    return 2 if failed else 0


def cmd_spectrum(args):
    _need(args, "kind")
    sp = _spec.analytic_spectrum(args.kind, args.n, _params(args.param))
    out = _Writer(args, "spectrum")
    out.row("n", "re", "im")
    for n, w in zip(sp.indices, sp.frequencies):
        out.row(int(n), float(w.real), float(w.imag))
    out.flush()
    return 0


def cmd_lift(args):
    x = np.linspace(*args.x[:2], args.x[2])
    t = np.linspace(*args.t[:2], args.t[2])
    if args.family == "wave":
        tmap = _red.TravelingWaveMap(args.v, args.c)
        params = {"n": args.n, "alpha": args.alpha}
    else:
        tmap = _red.TravelingWaveMap(args.v)
        params = {"n": args.n} if args.family == "heat" else {}
    chi_max = float((x[:, None] - tmap.v * t[None, :]).max())
    h = min(x[1] - x[0], 1e-3)
    span = max(chi_max, 0.0) + 2 * h
    w = SampledTrajectory.from_function(
        lambda c: _red.closed_green(args.family, tmap, params, args.s, c), 0.0, span, h
    )
    field = _red.lift_to_xt(w, tmap, x, t)
    out = _Writer(args, "lift")
    if args.format == "grid":
        dims = zip(("x0", "dx", "nx", "t0", "dt", "nt"), (x[0], x[1] - x[0], x.size, t[0], t[1] - t[0], t.size))
        out.lines.append(",".join(f"{k}={_fmt(v)}" for k, v in dims))
        for i in range(x.size):
            out.row(*field[i])
    else:
        out.row("x", "t", "value")
        for i in range(x.size):
            for j in range(t.size):
                out.row(x[i], t[j], field[i, j])
    out.flush()
    return 0


# ---------------------------------------------------------------- parser


def build_parser():
    p = _Parser(prog="nlgreen", description="Nonlinear Green's functions: kernels, solvers, calibration, spectra.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="key=value file; flags override")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.set_defaults(func=func)
        return sp

    def kernel_opts(sp, allow_all=False):
        choices = sorted(_k.KERNELS) + (["all"] if allow_all else [])
        sp.add_argument("--kernel", default="all" if allow_all else None, choices=choices)
        sp.add_argument("--param", action="append", help="kernel parameter key=value (repeatable)")
        sp.add_argument("--tmax", type=float, help="window end (default: row's validity window)")
        sp.add_argument("--step", type=float, default=1e-3)

    def family_opts(sp, default=None):
        sp.add_argument("--family", choices=_red.FAMILIES, default=default)
        sp.add_argument("--v", type=float, default=1.0)
        sp.add_argument("--c", type=float, default=2.0)
        sp.add_argument("--n", type=int, default=3)
        sp.add_argument("--alpha", type=float, default=1.0)

    def cal_opts(sp):
        sp.add_argument("--v", type=float, default=1.0)
        sp.add_argument("--window", type=_pair, default=(0.0, 1.0))
        sp.add_argument("--step", type=float, default=1e-3)
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--bounds-s", type=_pair, default=(0.05, 5.0))
        sp.add_argument("--bounds-a0", type=_pair, default=(0.05, 5.0))
        sp.add_argument("--expansion-order", type=int, default=0)

    command("kernels", cmd_kernels, "list the kernel catalogue")

    sp = command("green", cmd_green, "sample a Green's function")
    kernel_opts(sp)
    sp.add_argument("--numeric", action="store_true", help="construct from the homogeneous Cauchy problem")
    sp.add_argument("--tol", type=float, default=1e-11)
    sp.add_argument("--verify", action="store_true")

    sp = command("verify", cmd_verify, "residual/jump/value report for closed forms")
    kernel_opts(sp, allow_all=True)

    sp = command("solve", cmd_solve, "first-order/K-term approximation vs reference")
    sp.add_argument("--kernel", choices=sorted(_k.KERNELS))
    sp.add_argument("--param", action="append")
    family_opts(sp, default="burgers")
    sp.add_argument("--source", default="delta", choices=sorted(BUILTIN_SOURCES))
    sp.add_argument("--s", type=float, default=1.0)
    sp.add_argument("--a0", type=float, default=1.0)
    sp.add_argument("--coeffs", type=_floats, help="a1,a2,... for the K-term expansion")
    sp.add_argument("--tmax", type=float, default=1.0)
    sp.add_argument("--step", type=float, default=1e-3)
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = command("calibrate", cmd_calibrate, "calibrate (s, a0) for one source (Burgers reduction)")
    sp.add_argument("--source", default="delta", choices=sorted(BUILTIN_SOURCES))
    cal_opts(sp)

    sp = command("table2", cmd_table2, "calibrate all six sources (Burgers reduction)")
    cal_opts(sp)

    sp = command("spectrum", cmd_spectrum, "analytic spectrum")
    sp.add_argument("--kind", choices=_spec.KINDS)
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--param", action="append", help="e.g. c2=64 for the quadratic kind")

    sp = command("lift", cmd_lift, "lift a traveling-wave Green's function to (x, t)")
    family_opts(sp, default="burgers")
    sp.add_argument("--s", type=float, default=0.5)
    sp.add_argument("--x", type=_axis, default=(0.0, 2.0, 201))
    sp.add_argument("--t", type=_axis, default=(0.0, 1.0, 101))
    sp.add_argument("--format", choices=("triples", "grid"), default="triples")
    return p


def _apply_config(parser, argv):
    """Re-parse with config-file values installed as defaults of the chosen subcommand."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    cfg = read_config(args.config)
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[args.command]
    dests = {a.dest: a for a in sub._actions if a.dest not in ("help", "config", "func")}
    unknown = sorted(set(cfg) - set(dests))
    if unknown:
        raise UsageError(f"unknown config key(s) for {args.command}: {', '.join(unknown)}")
    for key, raw in cfg.items():
        action = dests[key]
        if isinstance(action, argparse._StoreTrueAction):
            value = raw.lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):
            value = [raw]
        else:
            value = action.type(raw) if action.type else raw
            if action.choices is not None and value not in action.choices:
                raise UsageError(f"config {key}: invalid choice {raw!r}")
        action.default = value
    return parser.parse_args(argv)


def main(argv=None):
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except NumericalError as exc:
        print(f"nlgreen: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (NLGreenError, ValueError, OSError, argparse.ArgumentTypeError) as exc:
        print(f"nlgreen: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
