"""Command-line driver: ``srge <command> [options]``.

Commands emit CSV (default) or JSON tables.  Options may also come from a
key=value config file (``--config``, section ``[srge]``); flags given on
the command line win.  Exit codes: 0 success, 1 engine or domain error,
2 usage or parse error.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .benchmarks import compare_delta_z
from .core_types import Geometry, ModelParams, ModulatedPolynomial, StateSpecError, parse_state
from .ed_oracle import N_MAX, DenseState, charged_moment_ed, reduce, srre
from .moments_n1 import N1Request, delta_z1, f1_full
from .moments_n2 import N2Request, delta_z2, f2_full
from .resolved import (
    ApproximationDomainError,
    OddPowerError,
    charge_distribution,
    delta_s2_excited,
    delta_s2_numeric,
    extract_coefficients,
    gaussian_charge_distribution,
    prel_series,
    relative_fourier,
    s2_compact,
    s2_numeric,
    s2_series,
)
from .xx_lattice import (
    BranchTrackingError,
    CompositionError,
    MomentumState,
    diagonal_charged_moment,
    generalized_charged_moment,
    level2_lattice_states,
)

EXIT_OK, EXIT_ENGINE, EXIT_USAGE = 0, 1, 2

LATTICE_NAMES = ("ground", "dphi", "vertex", "level2_a", "level2_b")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing

def parse_grid(text: str, kind=float) -> list:
    """``a:b:step`` inclusive of b (within rounding), or a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [kind(parts[0])]
        if len(parts) == 2 and kind is int:
            a, b = (int(p) for p in parts)
            step = 1
        elif len(parts) == 3:
            a, b, step = (kind(p) for p in parts)
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"bad grid {text!r}; expected a:b:step") from None
    if step <= 0 or b < a:
        raise UsageError(f"grid {text!r} must have a positive step and a <= b")
    if kind is int:
        return list(range(a, b + 1, step))
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [a + i * step for i in range(count)]


def _grid(args, single, grid, kind=float, default=None):
    g = getattr(args, grid, None)
    v = getattr(args, single, None)
    if g is not None:
        return parse_grid(str(g), kind)
    if v is not None:
        return [kind(v)]
    if default is None:
        raise UsageError(f"--{single.replace('_', '-')} or --{grid.replace('_', '-')} is required")
    return list(default)


def _state(text, flag):
    if text is None:
        raise UsageError(f"{flag} is required")
    return parse_state(text)


def _workers() -> int:
    env = os.environ.get("SRGE_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"SRGE_THREADS must be an integer, got {env!r}") from None
        return max(1, n)
    return os.cpu_count() or 1


def _pmap(fn, items):
    """Ordered parallel map; output order follows input order."""
    items = list(items)
    n = min(_workers(), max(1, len(items)))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- output

def _num(x: float) -> str:
    return repr(float(x))


def _emit(args, header, rows, meta=None, extra=None):
    if args.format == "json":
        doc = {"command": args.command, "config": _config_echo(args), "columns": header,
               "rows": [dict(zip(header, r)) for r in rows]}
        if meta:
            doc["meta"] = meta
        if extra:
            doc.update(extra)
        text = json.dumps(doc, indent=2, default=_json_default) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_num(x) if isinstance(x, (float, np.floating)) else x for x in r])
        if meta:
            for k, v in meta.items():
                buf.write(f"# {k}={v}\n")
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o))


def _config_echo(args):
    skip = {"func", "output", "config"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _poly_dump(p: ModulatedPolynomial) -> dict:
    return {"phase_rate": p.phase_rate, "coeffs_re": p.coeffs.real.tolist(), "coeffs_im": p.coeffs.imag.tolist()}


# ---------------------------------------------------------------- commands

def cmd_cft_f1(args):
    params = ModelParams(args.beta)
    rs = _grid(args, "r", "r_grid")
    thetas = _grid(args, "theta", "theta_grid")
    rows, dumps = [], []
    if args.level2_combo:
        for r in rs:
            for t in thetas:
                v = complex(delta_z1(params, r, t))
                rows.append((r, t, v.real, v.imag))
        _emit(args, ["r", "theta", "re", "im"], rows, {"observable": "delta_z1"})
        return
    psi_in = _state(getattr(args, "in"), "--in")
    psi_out = _state(args.out, "--out")

    def one(r):
        req = N1Request(params, Geometry(1.0, r, math.e), psi_in, psi_out,
                        zero_momentum_convention=args.v_over_L is None, v_over_L=args.v_over_L or 0.0)
        return r, f1_full(req)

    for r, poly in _pmap(one, rs):
        dumps.append({"r": r, **_poly_dump(poly)})
        for t in thetas:
            v = poly(t)
            rows.append((r, t, v.real, v.imag))
    _write_dump(args, dumps)
    _emit(args, ["r", "theta", "re", "im"], rows, extra={"coefficients": dumps} if args.format == "json" else None)


def cmd_cft_f2(args):
    params = ModelParams(args.beta)
    rs = _grid(args, "r", "r_grid")
    thetas = _grid(args, "theta", "theta_grid")
    rows, dumps = [], []
    if args.level2_combo:
        for r in rs:
            for t in thetas:
                v = complex(delta_z2(params, r, t))
                rows.append((r, t, v.real, v.imag))
        _emit(args, ["r", "theta", "re", "im"], rows, {"observable": "delta_z2"})
        return
    if not args.states or len(args.states) != 4:
        raise UsageError("--states needs exactly four state specs")
    psi = tuple(parse_state(s) for s in args.states)

    def one(r):
        req = N2Request(params, Geometry(1.0, r, math.e), psi,
                        zero_momentum_convention=args.v_over_L is None, v_over_L=args.v_over_L or 0.0,
                        sign_convention=args.sign_convention)
        return r, f2_full(req)

    for r, poly in _pmap(one, rs):
        dumps.append({"r": r, **_poly_dump(poly)})
        for t in thetas:
            v = poly(t)
            rows.append((r, t, v.real, v.imag))
    _write_dump(args, dumps)
    _emit(args, ["r", "theta", "re", "im"], rows, extra={"coefficients": dumps} if args.format == "json" else None)


def _write_dump(args, dumps):
    if args.dump_coeffs:
        with open(args.dump_coeffs, "w") as fh:
            json.dump(dumps, fh, indent=2)


def _check_N(N, need4=False):
    if N is None:
        raise UsageError("--N is required")
    if N < 2 or N % 2:
        raise UsageError(f"--N must be an even integer >= 2, got {N}")
    if need4 and N % 4:
        raise UsageError(f"the lattice state dictionary needs N divisible by 4, got {N}")


def _lattice_states(args, N):
    names = args.states or ["ground"]
    for nm in names:
        if nm not in LATTICE_NAMES:
            raise UsageError(f"unknown lattice state {nm!r}; choose from {', '.join(LATTICE_NAMES)}")
    need4 = any(nm != "ground" for nm in names)
    _check_N(N, need4)
    if need4:
        table = level2_lattice_states(N)
        return [table[nm][0] for nm in names]
    return [MomentumState.ground(N)] * len(names)


def _ells(args, N):
    ells = _grid(args, "ell", "ell_range", int, default=range(1, N))
    for l in ells:
        if not 1 <= l <= N:
            raise UsageError(f"subsystem size {l} out of range 1..{N}")
    return ells


def cmd_lattice(args):
    N = args.N
    states = _lattice_states(args, N)
    n = args.n
    if len(states) not in (1, 2 * n):
        raise UsageError(f"--states takes one name (diagonal) or {2 * n} names")
    ells = _ells(args, N)
    thetas = _grid(args, "theta", "theta_grid")
    grid = [(l, t) for l in ells for t in thetas]

    def one(pt):
        l, t = pt
        if len(states) == 1:
            return diagonal_charged_moment(states[0], l, t, n)
        return generalized_charged_moment(states, l, t, n)

    vals = _pmap(one, grid)
    rows = [(N, l, t, n, v.real, v.imag) for (l, t), v in zip(grid, vals)]
    _emit(args, ["N", "ell", "theta", "n", "re", "im"], rows)


def cmd_compare(args):
    _check_N(args.N, need4=True)
    n = {"dz1": 1, "dz2": 2}[args.observable]
    thetas = _grid(args, "theta", "theta_grid")
    rows, summary = [], {}
    for t in thetas:
        cmp = compare_delta_z(args.N, t, n, args.r_min, args.r_max)
        for row in cmp.rows:
            rows.append((t, row.ell, row.r, row.cft.real, row.cft.imag, row.raw.real, row.raw.imag,
                         row.parity_avg.real, row.parity_avg.imag, row.abs_dev, row.rel_dev))
        summary[f"theta={t!r}"] = {"max_dev": cmp.max_dev(), "mean_dev": cmp.mean_dev(),
                                   "max_dev_re": cmp.max_dev("re"), "max_dev_im": cmp.max_dev("im"),
                                   "oscillation": cmp.oscillation}
    header = ["theta", "ell", "r", "cft_re", "cft_im", "raw_re", "raw_im", "avg_re", "avg_im", "abs_dev", "rel_dev"]
    if args.format == "json":
        _emit(args, header, rows, extra={"summary": summary})
    else:
        meta = {f"{k} {kk}": repr(vv) for k, v in summary.items() for kk, vv in v.items()}
        _emit(args, header, rows, meta)


def cmd_resolved(args):
    params = ModelParams(args.beta)
    if args.r is None:
        raise UsageError("--r is required")
    geom = Geometry.from_log_cutoff(args.r, args.log_cutoff)
    qs = parse_grid(args.q_window, int) if ":" in args.q_window else [int(args.q_window)]
    psi = _state(args.state, "--state")
    req1 = N1Request(params, geom, psi, psi)
    f1 = f1_full(req1)
    q = args.quantity
    meta = {"log_cutoff": args.log_cutoff, "beta": args.beta, "method": args.method}
    if args.method == "series":
        meta["order"] = "(log l')^-2"
    if q in ("prel", "gaussian"):
        if args.method == "exact" and q == "prel":
            vals = np.real_if_close(relative_fourier(f1, params, geom, qs, 1), tol=1e6)
        else:
            if q == "prel":
                c1 = _coeffs(f1, params)
                vals = prel_series(c1.c2.real, c1.c4.real, params, geom, qs)
            else:
                # the phase only shifts the mean; the width comes from the polynomial
                c1 = _coeffs(ModulatedPolynomial(0.0, f1.coeffs), params)
                dist = gaussian_charge_distribution(c1.c2.real, params, geom, qs, f1.phase_rate)
                vals = dist.values
                meta["mean"] = repr(dist.mean())
    elif q == "distribution":
        dist = charge_distribution(f1, params, geom, qs)
        vals = dist.values
        meta["mean"] = repr(dist.mean())
    else:
        f2 = f2_full(N2Request(params, geom, (psi,) * 4))
        if args.method == "exact":
            if q == "s2":
                vals = s2_numeric(f2, params, geom, qs)
            elif q == "delta-s2":
                vals = delta_s2_numeric(f2, f1, params, geom, qs)
            else:
                raise UsageError("s2-compact has no exact route; use --method series")
            vals = np.real_if_close(vals, tol=1e6)
        else:
            c1, c2 = _coeffs(f1, params), _coeffs(f2, params)
            f0, f2c, f4 = c2.c0.real, c2.c2.real, c2.c4.real
            if q == "s2":
                vals = s2_series(f0, f2c, f4, params, geom, qs)
            elif q == "delta-s2":
                vals = delta_s2_excited(f0, f2c, f4, c1.c2.real, c1.c4.real, params, geom, qs)
            else:
                vals = s2_compact(f0, f2c, c1.c2.real, params, geom, qs, args.g_a)
    vals = np.atleast_1d(vals)
    rows = []
    for qq, v in zip(qs, vals):
        v = complex(v)
        rows.append((qq, v.real) if abs(v.imag) < 1e-12 else (qq, v.real, v.imag))
    header = ["q", "value"] if all(len(r) == 2 for r in rows) else ["q", "re", "im"]
    rows = [r if len(r) == len(header) else (r[0], r[1], 0.0) for r in rows]
    _emit(args, header, rows, meta)


def _coeffs(p, params):
    try:
        return extract_coefficients(p, params.beta)
    except OddPowerError as exc:
        raise OddPowerError(f"{exc}; rerun with --method exact for the numeric Fourier route") from None


def cmd_oracle(args):
    N = args.N
    if N is not None and N > N_MAX:
        raise UsageError(f"the dense oracle is capped at N <= {N_MAX}")
    states = _lattice_states(args, N)
    n = args.n
    if len(states) == 1:
        states = states * (2 * n)
    if len(states) != 2 * n:
        raise UsageError(f"--states takes one name or {2 * n} names")
    dense = [DenseState.from_momentum_state(s) for s in states]
    ells = _grid(args, "ell", "ell_range", int, default=range(1, N))
    if any(not 1 <= l < N for l in ells):
        raise UsageError(f"oracle subsystem sizes must lie in 1..{N - 1}")
    if args.srre_q is not None:
        if n < 2:
            raise UsageError("--srre-q needs --n >= 2")
        g = DenseState.from_momentum_state(MomentumState.ground(N))
        rows = []
        for l in ells:
            rdms = [reduce(dense[2 * i], dense[2 * i + 1], l) for i in range(n)]
            v = srre(rdms, args.srre_q, ground=reduce(g, g, l))
            rows.append((N, l, args.srre_q, n, v.real, v.imag))
        _emit(args, ["N", "ell", "q", "n", "re", "im"], rows)
        return
    thetas = _grid(args, "theta", "theta_grid")
    rows = []
    for l in ells:
        for t in thetas:
            v = charged_moment_ed(dense, l, t, n)
            rows.append((N, l, t, n, v.real, v.imag))
    _emit(args, ["N", "ell", "theta", "n", "re", "im"], rows)


# ---------------------------------------------------------------- parser

def _shared(p, states_help="state names", states_nargs="+"):
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--r-grid", dest="r_grid", default=None, help="a:b:step")
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--theta-grid", dest="theta_grid", default=None, help="a:b:step")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--ell-range", dest="ell_range", default=None, help="a:b or a:b:step")
    p.add_argument("--in", dest="in", default=None, help="state spec L=[..];R=[..];n=..;m=..")
    p.add_argument("--out", dest="out", default=None, help="state spec")
    p.add_argument("--states", nargs=states_nargs, default=None, help=states_help)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--config", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="srge", description="Generalized charged moments of the compact boson and the XX chain.")
    ap.add_argument("--version", action="version", version=f"srge {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cft-f1", help="n = 1 CFT moments")
    _shared(p, "unused")
    p.add_argument("--level2-combo", action="store_true", help="emit the level-2 difference instead")
    p.add_argument("--v-over-L", dest="v_over_L", type=float, default=None)
    p.add_argument("--dump-coeffs", dest="dump_coeffs", default=None)
    p.set_defaults(func=cmd_cft_f1)

    p = sub.add_parser("cft-f2", help="n = 2 CFT moments")
    _shared(p, "four state specs")
    p.add_argument("--level2-combo", action="store_true")
    p.add_argument("--v-over-L", dest="v_over_L", type=float, default=None)
    p.add_argument("--sign-convention", dest="sign_convention", choices=("positive", "literal"), default=None)
    p.add_argument("--dump-coeffs", dest="dump_coeffs", default=None)
    p.set_defaults(func=cmd_cft_f2)

    p = sub.add_parser("lattice", help="XX-chain charged moments")
    _shared(p, f"lattice state names ({', '.join(LATTICE_NAMES)})")
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("compare", help="lattice versus CFT level-2 differences")
    _shared(p)
    p.add_argument("--observable", choices=("dz1", "dz2"), default=None)
    p.add_argument("--r-min", dest="r_min", type=float, default=None)
    p.add_argument("--r-max", dest="r_max", type=float, default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("resolved", help="charge distributions and resolved entropies")
    _shared(p)
    p.add_argument("--state", default=None, help="state spec")
    p.add_argument("--quantity", choices=("prel", "gaussian", "distribution", "s2", "delta-s2", "s2-compact"),
                   default=None)
    p.add_argument("--method", choices=("series", "exact"), default=None)
    p.add_argument("--log-cutoff", dest="log_cutoff", type=float, default=None)
    p.add_argument("--q-window", dest="q_window", default=None, help="a:b or a single q")
    p.add_argument("--g-a", dest="g_a", type=float, default=None)
    p.set_defaults(func=cmd_resolved)

    p = sub.add_parser("oracle", help="dense exact-diagonalization reference")
    _shared(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--srre-q", dest="srre_q", type=int, default=None)
    p.set_defaults(func=cmd_oracle)
    return ap


DEFAULTS = {
    "beta": 1.0, "format": "csv", "n": 1, "level2_combo": False, "observable": "dz1",
    "r_min": 0.15, "r_max": 0.85, "quantity": "prel", "method": "series", "log_cutoff": 10.0,
    "q_window": "-5:5", "g_a": 1.0, "sign_convention": "positive",
}


def _apply_config(args, parser_for_cmd):
    """Fill options left unset on the command line from the config file, then defaults."""
    if args.config:
        cp = configparser.ConfigParser()
        cp.optionxform = str  # keep N distinct from n
        try:
            with open(args.config) as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from None
        if not cp.has_section("srge"):
            raise UsageError(f"config {args.config!r} needs a [srge] section")
        actions = {a.dest: a for a in parser_for_cmd._actions}
        for key, raw in cp.items("srge"):
            dest = key.replace("-", "_")
            if dest not in actions or dest in ("help", "config"):
                raise UsageError(f"unknown config key {key!r}")
            if getattr(args, dest, None) not in (None, False):
                continue
            act = actions[dest]
            if act.nargs in ("+", "*"):
                value = raw.split()
            elif isinstance(act, argparse._StoreTrueAction):
                value = raw.strip().lower() in ("1", "true", "yes", "on")
            else:
                try:
                    value = act.type(raw) if act.type else raw
                except ValueError:
                    raise UsageError(f"bad value {raw!r} for config key {key!r}") from None
                if act.choices and value not in act.choices:
                    raise UsageError(f"config key {key!r} must be one of {act.choices}")
            setattr(args, dest, value)
    for k, v in DEFAULTS.items():
        if hasattr(args, k) and getattr(args, k) is None:
            setattr(args, k, v)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        _apply_config(args, sub)
        args.func(args)
    except (UsageError, StateSpecError) as exc:
        print(f"srge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError, BranchTrackingError, CompositionError,
            ApproximationDomainError, OddPowerError, np.linalg.LinAlgError) as exc:
        print(f"srge: {args.command}: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
