"""Command-line driver.

Every output carries the run configuration (a JSON header line for CSV, a
``config`` key for JSON).  No environment variables are read.

Exit codes: 0 success, 1 contract violation (including a failed
certificate), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import constructions
from .adversary import adversarial_bmo
from .errors import ContractError
from .moving import window_extrema, window_extrema_naive
from .norms import bmo_dyadic, certifiable_intervals, certify_sweep, lp_norm
from .selector import parse_selector, save_selector
from .signal import GridSpec, load_signal, make_signal, save_signal
from .sqfn import ScaleRange, default_range, s_inf, s_selector, s_sup, tail_bound


def _pair(text: str, cast=float):
    try:
        lo, hi = text.split(":")
        return cast(lo), cast(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None


def _scales(text: str) -> ScaleRange:
    lo, hi = _pair(text, int)
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty scale range {text!r}")
    return ScaleRange(lo, hi)


def _config(ns) -> dict:
    raw = {k: v for k, v in sorted(vars(ns).items()) if k != "func"}
    return json.loads(json.dumps(raw, default=str))


def _emit(ns, text: str) -> None:
    if ns.out in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(ns.out).write_text(text if text.endswith("\n") else text + "\n")


def _emit_json(ns, doc: dict) -> None:
    _emit(ns, json.dumps({"config": _config(ns), **doc}, default=str))


def _cells(signal, x_range):
    if x_range is None:
        return None
    x = signal.grid.points()
    return np.flatnonzero((x >= x_range[0]) & (x < x_range[1]))


def _result_out(ns, result):
    cfg = _config(ns)
    if ns.format == "json":
        _emit(ns, result.to_json(dump_terms=ns.dump_terms, config=cfg))
    else:
        _emit(ns, result.to_csv(header="config: " + json.dumps(cfg, default=str)))


def _range_for(ns, signal) -> ScaleRange:
    return ns.scales if ns.scales is not None else default_range(signal)


def cmd_compute(ns):
    f = load_signal(ns.signal)
    sel = parse_selector(ns.selector, f.grid.k_min)
    res = s_selector(f, sel, _range_for(ns, f), cells=_cells(f, ns.x_range),
                     dump_terms=ns.dump_terms, workers=ns.threads)
    _result_out(ns, res)


def cmd_sup(ns):
    f = load_signal(ns.signal)
    fn = s_inf if ns.lower else s_sup
    res = fn(f, _range_for(ns, f), cells=_cells(f, ns.x_range),
             dump_terms=ns.dump_terms, workers=ns.threads)
    _result_out(ns, res)


def _square(ns, f):
    scales = _range_for(ns, f)
    if ns.selector:
        return s_selector(f, parse_selector(ns.selector, f.grid.k_min), scales,
                          workers=ns.threads)
    return s_sup(f, scales, workers=ns.threads)


def cmd_bmo(ns):
    f = load_signal(ns.signal)
    res = _square(ns, f)
    lo, hi = ns.levels if ns.levels else (None, None)
    value, report = bmo_dyadic(res.values, f.grid, lo, hi)
    _emit_json(ns, {"bmo": value, "witness": report.to_dict(), "sup_norm_f": f.sup_norm})


def cmd_pnorm(ns):
    f = load_signal(ns.signal)
    res = _square(ns, f)
    num = lp_norm(res.values, f.grid, ns.p)
    den = lp_norm(f.values, f.grid, ns.p)
    _emit_json(ns, {"p": ns.p, "norm_S": num, "norm_f": den,
                    "ratio": num / den if den > 0 else 0.0})


def cmd_tail(ns):
    f = load_signal(ns.signal)
    _emit_json(ns, {"k_hi": ns.k_hi, "tail_bound": tail_bound(f, ns.k_hi)})


def cmd_construct(ns):
    if ns.which == "halfline":
        f, sel, _ = constructions.halfline_example(ns.W, ns.k_min)
    elif ns.which == "integer":
        f, sel = constructions.integer_example(ns.W)
    else:
        f, sel, _, _ = constructions.theorem1ii_example(ns.ell_max, ns.resolution)
    save_signal(f, ns.signal_out)
    save_selector(sel, ns.selector_out)
    _emit_json(ns, {"signal": ns.signal_out, "selector": ns.selector_out,
                    "grid": f.grid.to_dict(), "selector_kind": sel.kind})


def cmd_certify(ns):
    f = load_signal(ns.signal)
    lo, hi = ns.levels if ns.levels else (None, None)
    certs = certify_sweep(f, _range_for(ns, f), certifiable_intervals(f.grid, lo, hi))
    failed = [c for c in certs if not c.passed]
    doc = {
        "count": len(certs),
        "failures": len(failed),
        "max_ratio": max((c.ratio for c in certs), default=0.0),
        "max_l2_constant": max((c.l2_constant for c in certs), default=0.0),
        "certificates": [c.to_dict() for c in (certs if ns.all else failed)],
    }
    _emit_json(ns, doc)
    if failed:
        print(f"error: certificate: {len(failed)} of {len(certs)} intervals failed",
              file=sys.stderr)
        return 1
    return 0


def cmd_adversary(ns):
    f = load_signal(ns.signal)
    res = adversarial_bmo(f, _range_for(ns, f), window=ns.window, seed=ns.seed,
                          workers=ns.threads)
    if ns.selector_out:
        save_selector(res.selector, ns.selector_out)
    _emit_json(ns, {"selector": ns.selector_out, **res.report()})


def cmd_bench(ns):
    rng = np.random.default_rng(ns.seed)
    f = make_signal(rng.standard_normal(ns.length), GridSpec(0, 0, ns.length))
    window_extrema(f, 1)  # compile outside the timing
    rows = []
    for k in range(0, ns.span + 1):
        t0 = time.perf_counter()
        window_extrema_naive(f, k)
        t1 = time.perf_counter()
        window_extrema(f, k)
        t2 = time.perf_counter()
        rows.append((k, t1 - t0, t2 - t1))
    naive = sum(r[1] for r in rows)
    deque = sum(r[2] for r in rows)
    lines = [f"# config: {json.dumps(_config(ns))}", "k,naive_s,deque_s,speedup"]
    lines += [f"{k},{a:.6f},{b:.6f},{a / b:.1f}" for k, a, b in rows]
    lines.append(f"total,{naive:.6f},{deque:.6f},{naive / deque:.1f}")
    _emit(ns, "\n".join(lines))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ergosq", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, signal=True, scales=True):
        if signal:
            sp.add_argument("--signal", required=True, help="signal file (.json or .csv)")
        if scales:
            sp.add_argument("--scales", type=_scales, default=None,
                            help="scale range k_lo:k_hi (default: grid level to window level + 20)")
        sp.add_argument("--threads", type=int, default=1, help="worker threads across scales")
        sp.add_argument("--out", default="-", help="output path ('-' for stdout)")

    sp = sub.add_parser("compute", help="S_I f for a selector")
    common(sp)
    sp.add_argument("--selector", required=True,
                    help="left|right|centered|random:<seed>|file:<path>")
    sp.add_argument("--x-range", type=_pair, default=None, help="evaluate only at points in lo:hi")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--dump-terms", action="store_true", help="include per-scale terms (json)")
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("sup", help="supremal square function S f")
    common(sp)
    sp.add_argument("--lower", action="store_true", help="the pointwise infimum instead")
    sp.add_argument("--x-range", type=_pair, default=None)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--dump-terms", action="store_true")
    sp.set_defaults(func=cmd_sup)

    sp = sub.add_parser("bmo", help="dyadic BMO norm of S f (or S_I f)")
    common(sp)
    sp.add_argument("--selector", default=None)
    sp.add_argument("--levels", type=lambda t: _pair(t, int), default=None)
    sp.set_defaults(func=cmd_bmo)

    sp = sub.add_parser("pnorm", help="||S f||_p / ||f||_p")
    common(sp)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--selector", default=None)
    sp.set_defaults(func=cmd_pnorm)

    sp = sub.add_parser("tail", help="bound on the scales above k_hi")
    common(sp, scales=False)
    sp.add_argument("--k-hi", type=int, required=True)
    sp.set_defaults(func=cmd_tail)

    sp = sub.add_parser("construct", help="write a counterexample signal and selector")
    common(sp, signal=False, scales=False)
    sp.add_argument("which", choices=("halfline", "theorem1ii", "integer"))
    sp.add_argument("--W", type=int, default=20)
    sp.add_argument("--k-min", type=int, default=0, help="grid level (halfline)")
    sp.add_argument("--ell-max", type=int, default=10)
    sp.add_argument("--resolution", type=int, default=14)
    sp.add_argument("--signal-out", default="signal.json")
    sp.add_argument("--selector-out", default="selector.json")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("certify", help="L^inf -> BMO certificates over all dyadic I")
    common(sp)
    sp.add_argument("--levels", type=lambda t: _pair(t, int), default=None,
                    help="interval levels lo:hi (default: all that fit); cost grows with cells x intervals")
    sp.add_argument("--all", action="store_true", help="emit every certificate, not just failures")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("adversary", help="search a selector maximising BMO of S_I f")
    common(sp)
    sp.add_argument("--window", type=_pair, default=None, help="restrict intervals to lo:hi")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--selector-out", default=None)
    sp.set_defaults(func=cmd_adversary)

    sp = sub.add_parser("bench", help="naive vs deque timings for the sup extrema")
    common(sp, signal=False, scales=False)
    sp.add_argument("--length", type=int, default=1 << 16)
    sp.add_argument("--span", type=int, default=12)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_bench)
    return p


# range flags whose values may start with '-' (e.g. ``--scales -12:8``)
_RANGE_FLAGS = ("--scales", "--x-range", "--window", "--levels")


def _glue_ranges(argv):
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _RANGE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    ns = parser.parse_args(_glue_ranges(argv))
    try:
        return ns.func(ns) or 0
    except ContractError as exc:
        print(f"error: contract: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
