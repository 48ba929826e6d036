"""Command-line front end: ``pulsecomp <verb> [options]``.

Exit status is 0 on success, 2 on a usage error and 1 when a computation
fails. Data goes to stdout and diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Sequence as Seq

import numpy as np

from . import bench, expansion, shaped
from .errors import (
    MODEL_PARAMS,
    ErrorModel,
    ModelError,
    UnsupportedPulseError,
    apply_sequence,
    canonical_model_name,
    ideal_target,
)
from .linalg import fidelity, infidelity
from .sequences import FAMILIES, Sequence, SynthesisError, get_family

DIGITS = 12
VERBS = ("synth", "simulate", "terms", "path", "scan", "grid", "slope", "waveform-check", "convert")


class UsageError(Exception):
    pass


def num(x: float) -> str:
    return format(float(x) + 0.0, f".{DIGITS}g")  # + 0.0 folds -0 into 0


def _round(obj: Any) -> Any:
    """Round every float to the fixed number of significant digits."""
    if isinstance(obj, float):
        return float(num(obj))
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, np.floating):
        return float(num(float(obj)))
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_round(obj), sort_keys=True)


def _complex_rows(U: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in U]


def load_config(path: str | None = None) -> dict:
    path = path or os.environ.get("PULSE_CONFIG")
    if not path:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None


def _setting(args, cfg: dict, name: str, section: str | None, default):
    val = getattr(args, name, None)
    if val is not None:
        return val
    scope = cfg.get(section, {}) if section else cfg
    return scope.get(name, default)


# ---------------------------------------------------------------- parser
def _add_sequence(p: argparse.ArgumentParser, family_positional: bool = False) -> None:
    if family_positional:
        p.add_argument("family", help="sequence family name")
    else:
        p.add_argument("--family", help="sequence family name")
        p.add_argument("--sequence", help="sequence file (JSON or 'theta@phi ...' text)")
        p.add_argument("--stdin", action="store_true", help="read the sequence from stdin")
    p.add_argument("--theta", type=float, help="target rotation angle (radians)")
    p.add_argument("--degrees", action="store_true", help="read --theta in degrees")


def _add_model(p: argparse.ArgumentParser, default: str = "amplitude") -> None:
    p.add_argument("--model", default=default, help=f"error model (default {default})")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--addressed", action="store_true", help="simulate the addressed spin")


def _add_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pulsecomp", description="Compensating pulse sequence toolkit.")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    ap.add_argument("--config", help="JSON config file (default: $PULSE_CONFIG)")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("synth", help="emit a sequence as JSON")
    _add_sequence(p, family_positional=True)
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("simulate", help="propagate a sequence under an error model")
    _add_sequence(p)
    _add_model(p)

    p = sub.add_parser("terms", help="interaction-frame expansion terms")
    _add_sequence(p)
    _add_model(p)
    p.add_argument("--depth", type=int, choices=(2, 3), default=2)

    p = sub.add_parser("path", help="error-vector path as CSV")
    _add_sequence(p)
    _add_model(p)
    p.add_argument("--resolution", type=int, default=16)

    for verb in ("scan", "slope"):
        p = sub.add_parser(verb, help=f"infidelity {verb} over a log grid")
        _add_sequence(p)
        _add_model(p)
        _add_grid(p)

    p = sub.add_parser("grid", help="two-parameter infidelity grid")
    _add_sequence(p)
    _add_model(p, default="amplitude_detuning")
    _add_grid(p)

    p = sub.add_parser("waveform-check", help="residuals and propagation of a waveform")
    p.add_argument("file", help="samples CSV (t,u_x) or Fourier JSON")
    p.add_argument("--delta", type=float, action="append", help="detuning(s) to propagate at")
    p.add_argument("--steps", type=int)

    p = sub.add_parser("convert", help="convert between file formats")
    p.add_argument("file")
    p.add_argument("--to", required=True, choices=("json", "text", "csv"))
    p.add_argument("--samples", type=int, default=4096, help="samples when rendering Fourier")
    p.add_argument("--terms", type=int, default=16, help="Fourier modes when fitting samples")
    for p in sub.choices.values():
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        p.add_argument("--config", default=argparse.SUPPRESS)
    return ap


# ---------------------------------------------------------------- helpers
def _theta(args) -> float | None:
    if args.theta is None:
        return None
    return math.radians(args.theta) if args.degrees else args.theta


def _parse_sequence_text(text: str) -> Sequence:
    text = text.strip()
    if not text:
        raise UsageError("empty sequence input")
    if text.startswith("{"):
        return Sequence.from_dict(json.loads(text))
    return Sequence.from_text(text)


def _sequence(args) -> Sequence:
    sources = [args.family is not None, bool(args.sequence), bool(args.stdin)]
    if sum(sources) != 1:
        raise UsageError("give exactly one of --family, --sequence or --stdin")
    if args.family is not None:
        return _synth(args.family, _theta(args))
    try:
        text = sys.stdin.read() if args.stdin else Path(args.sequence).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    try:
        return _parse_sequence_text(text)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"malformed sequence: {exc}") from None


def _synth(family: str, theta: float | None) -> Sequence:
    if family.lower() not in FAMILIES:
        raise UsageError(f"unknown family {family!r}; choose from {', '.join(sorted(FAMILIES))}")
    if theta is None:
        raise UsageError("--theta is required with a family")
    return get_family(family)(theta)


def _model(args) -> ErrorModel:
    try:
        name = canonical_model_name(args.model)
    except ModelError as exc:
        raise UsageError(str(exc)) from None
    params = MODEL_PARAMS[name]
    kw: dict[str, Any] = {}
    if "eps" in params:
        kw["eps"] = args.eps
    if "delta" in params:
        kw["delta"] = args.delta
    if "addressed" in params:
        kw["addressed"] = args.addressed
    return ErrorModel(name, **kw)


def _log_grid(args, cfg: dict, section: str) -> np.ndarray:
    lo = _setting(args, cfg, "lo", section, 1e-4)
    hi = _setting(args, cfg, "hi", section, 1e-1)
    n = _setting(args, cfg, "n", section, 25)
    if not (0 < lo < hi) or n < 2:
        raise UsageError("grid needs 0 < lo < hi and n >= 2")
    return np.logspace(math.log10(lo), math.log10(hi), n)


def _load_waveform(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    if text.lstrip().startswith("{"):
        return shaped.Fourier.from_json(text)
    return shaped.Samples.from_csv(text)


# ---------------------------------------------------------------- verbs
def cmd_synth(args, cfg, out) -> None:
    s = _synth(args.family, _theta(args))
    if args.format == "text":
        out.write(s.to_text() + "\n")
    else:
        out.write(dumps(s.to_dict()) + "\n")


def cmd_simulate(args, cfg, out) -> None:
    s = _sequence(args)
    m = _model(args)
    U = apply_sequence(s, m)
    T = ideal_target(s, m)
    F, inf = fidelity(T, U), infidelity(T, U)
    if args.json:
        out.write(dumps({"unitary": _complex_rows(U), "fidelity": F, "infidelity": inf,
                         "model": m.to_dict(), "pulses": len(s)}) + "\n")
        return
    out.write("unitary\n")
    for row in U:
        out.write("  " + "  ".join(f"{num(z.real)}{'+' if z.imag >= 0 else '-'}{num(abs(z.imag))}j" for z in row) + "\n")
    out.write(f"fidelity {F:.{DIGITS}f}\n")
    out.write(f"infidelity {num(inf)}\n")


def cmd_terms(args, cfg, out) -> None:
    s = _sequence(args)
    t = expansion.interaction_terms(s, _model(args), depth=args.depth)
    names = ["omega1", "omega2", "omega3"]
    if args.json:
        d = {n: w.tolist() for n, w in zip(names, t.as_list())}
        d["truncation_estimate"] = t.truncation_estimate
        out.write(dumps(d) + "\n")
        return
    for n, w in zip(names, t.as_list()):
        out.write(f"{n} " + " ".join(num(x) for x in w) + f"  norm {num(np.linalg.norm(w))}\n")


def cmd_path(args, cfg, out) -> None:
    p = expansion.path(_sequence(args), _model(args), resolution=args.resolution)
    if args.json:
        out.write(dumps({
            "samples": [[t, v.tolist()] for t, v in p.samples],
            "closure_residual": p.closure_residual,
            "signed_area": p.signed_area.tolist(),
        }) + "\n")
    else:
        out.write(p.to_csv())


def cmd_scan(args, cfg, out) -> None:
    r = bench.scan(_sequence(args), _model(args), _log_grid(args, cfg, "scan"),
                   workers=_setting(args, cfg, "workers", None, None))
    out.write(dumps(r.to_dict()) + "\n" if args.json else r.to_csv())


def cmd_slope(args, cfg, out) -> None:
    s = _sequence(args)
    r = bench.scan(s, _model(args), _log_grid(args, cfg, "scan"),
                   workers=_setting(args, cfg, "workers", None, None))
    window = tuple(cfg.get("window", bench.FIT_WINDOW))
    f = bench.fit_order(r, window=window)
    if args.json:
        out.write(dumps({**f.to_dict(), "sequence": s.family, "model": r.model}) + "\n")
    else:
        out.write(f"slope {num(f.slope)}\nintercept {num(f.intercept)}\n"
                  f"r_squared {num(f.r_squared)}\nwindow {num(f.window[0])} {num(f.window[1])}\n")


def cmd_grid(args, cfg, out) -> None:
    s = _sequence(args)
    lo = _setting(args, cfg, "lo", "grid", -0.3)
    hi = _setting(args, cfg, "hi", "grid", 0.3)
    n = _setting(args, cfg, "n", "grid", 41)
    if not lo < hi or n < 2:
        raise UsageError("grid needs lo < hi and n >= 2")
    g = np.linspace(lo, hi, n)
    try:
        name = canonical_model_name(args.model)
    except ModelError as exc:
        raise UsageError(str(exc)) from None
    r = bench.grid2(s, name, g, g, workers=_setting(args, cfg, "workers", "grid", None))
    if args.json:
        out.write(dumps({"eps1": r.eps1, "eps2": r.eps2, "infidelity": r.values.tolist(),
                         "below_contour": int(r.mask.sum()), "model": r.model}) + "\n")
    else:
        out.write(r.to_csv())


def cmd_waveform_check(args, cfg, out) -> None:
    w = _load_waveform(args.file)
    steps = _setting(args, cfg, "steps", None, shaped.DEFAULT_STEPS)
    c, s_ = shaped.first_order_residuals(w)
    deltas = args.delta or [0.0]
    target = shaped.ideal(w)
    rows = [(d, infidelity(target, shaped.propagate(w, d, steps))) for d in deltas]
    angle = shaped.accumulated_angle(w, w.tau)
    if args.json:
        out.write(dumps({"tau": w.tau, "angle": angle, "residuals": [c, s_],
                         "infidelity": [[d, f] for d, f in rows]}) + "\n")
        return
    out.write(f"tau {num(w.tau)}\nangle {num(angle)}\nresidual_c {num(c)}\nresidual_s {num(s_)}\n")
    for d, f in rows:
        out.write(f"delta {num(d)} infidelity {num(f)}\n")


def cmd_convert(args, cfg, out) -> None:
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    stripped = text.lstrip()
    if stripped.startswith("{") and '"tau"' in stripped:
        w = shaped.Fourier.from_json(text)
        if args.to != "csv":
            raise UsageError("Fourier waveforms convert to csv only")
        out.write(w.render(args.samples).to_csv())
        return
    if stripped and not stripped.startswith("{") and "@" not in stripped:
        if args.to != "json":
            raise UsageError("sampled waveforms convert to json only")
        w = shaped.fourier_fit(shaped.Samples.from_csv(text), args.terms)
        out.write(dumps(json.loads(w.to_json())) + "\n")
        return
    if args.to == "csv":
        raise UsageError("csv output is for Fourier waveform input")
    s = _parse_sequence_text(text)
    out.write(s.to_text() + "\n" if args.to == "text" else dumps(s.to_dict()) + "\n")


COMMANDS = {
    "synth": cmd_synth,
    "simulate": cmd_simulate,
    "terms": cmd_terms,
    "path": cmd_path,
    "scan": cmd_scan,
    "slope": cmd_slope,
    "grid": cmd_grid,
    "waveform-check": cmd_waveform_check,
    "convert": cmd_convert,
}


def run(argv: Seq[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config)
        COMMANDS[args.verb](args, cfg, out)
    except (UsageError, SynthesisError, ModelError, UnsupportedPulseError, shaped.WaveformError) as exc:
        err.write(f"pulsecomp {args.verb}: {exc}\n")
        return 2
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        err.write(f"pulsecomp {args.verb}: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
