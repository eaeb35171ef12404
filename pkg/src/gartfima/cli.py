"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data or domain error, 3 estimator
did not converge (the best-effort result is still written).
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .acvf import artfima_acvf, full_acvf, gartfima_core_acvf
from .errors import DomainError
from .estimate import FitOptions, fit, select_orders
from .forecast import compare_models, one_step_forecasts
from .model import ModelFamily, ModelSpec, validate
from .montecarlo import monte_carlo
from .simulate import SimulationConfig, simulate
from .spectrum import spectral_density

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NONCONVERGED = 0, 1, 2, 3


class IngestError(DomainError):
    pass


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """17 significant digits, fixed scientific format."""
    return f"{float(x):.16e}"


def ingest_csv(path) -> np.ndarray:
    """Read a single numeric column, optionally headed.

    Rows with several comma-separated fields contribute their last field.
    Blank lines at the end are ignored; a non-numeric payload anywhere after
    the header is an error naming its (1-based) row.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"input file not found: {path}")
    lines = path.read_text().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    values = []
    for row, line in enumerate(lines, start=1):
        field = line.strip().split(",")[-1].strip().strip('"')
        try:
            val = float(field)
        except ValueError:
            if row == 1:
                continue
            raise IngestError(f"row {row}: non-numeric value {field!r}") from None
        if not math.isfinite(val):
            raise IngestError(f"row {row}: non-finite value {field!r}")
        values.append(val)
    if not values:
        raise IngestError(f"no numeric data in {path}")
    return np.array(values)


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise UsageError(message)


def _floats(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    return tuple(float(t) for t in text.split(","))


def _add_model(p):
    g = p.add_argument_group("model")
    g.add_argument("--model-json", help="JSON file with keys ar, ma, d, lambda, u, sigma2")
    g.add_argument("--d", type=float, default=None)
    g.add_argument("--lambda", dest="lam", type=float, default=None)
    g.add_argument("--u", type=float, default=None)
    g.add_argument("--ar", type=_floats, default=None, help="comma-separated phi_1..phi_p")
    g.add_argument("--ma", type=_floats, default=None, help="comma-separated theta_1..theta_q")
    g.add_argument("--sigma2", type=float, default=None)


def _model_from(args) -> ModelSpec:
    doc = {}
    if args.model_json:
        doc = json.loads(Path(args.model_json).read_text())
    spec = ModelSpec.from_dict(doc)
    over = {k: v for k, v in (("d", args.d), ("lam", args.lam), ("u", args.u), ("ar", args.ar),
                              ("ma", args.ma), ("sigma2", args.sigma2)) if v is not None}
    return spec.replace(**over)


def _fit_options(args) -> FitOptions:
    return FitOptions(restarts=args.restarts, max_evals=args.max_evals, band_frac=args.band_frac)


def _add_fit(p):
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--q", type=int, default=0)
    p.add_argument("--family", default="GARTFIMA", type=str.upper,
                   choices=[f.value for f in ModelFamily])
    p.add_argument("--band-frac", type=float, default=1.0)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--max-evals", type=int, default=2000)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gartfima", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("simulate", help="simulate a sample path (CSV column x)")
    _add_model(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burnin", type=int, default=500)
    p.add_argument("--trunc", type=int, default=1000)
    p.add_argument("--strict", action="store_true", help="reject |u| = 1")
    p.add_argument("-o", "--output")
    p.add_argument("--manifest")

    p = sub.add_parser("estimate", help="fit by NLS or Whittle (JSON)")
    p.add_argument("input")
    p.add_argument("--method", choices=["nls", "whittle"], default="nls")
    _add_fit(p)
    p.add_argument("-o", "--output")
    p.add_argument("--manifest")

    p = sub.add_parser("spectrum", help="spectral density on (0, pi] (CSV omega,f)")
    _add_model(p)
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--strict", action="store_true")
    p.add_argument("-o", "--output")
    p.add_argument("--manifest")

    p = sub.add_parser("acvf", help="autocovariance (CSV lag,gamma)")
    _add_model(p)
    p.add_argument("--h-max", type=int, default=32)
    p.add_argument("--route", choices=["auto", "series", "fft", "hypergeometric"], default="auto")
    p.add_argument("--strict", action="store_true")
    p.add_argument("-o", "--output")
    p.add_argument("--manifest")

    p = sub.add_parser("forecast", help="one-step forecasts and RMSE (JSON + residual CSV)")
    p.add_argument("input")
    _add_model(p)
    p.add_argument("--split", type=float, default=0.75)
    p.add_argument("--fit-method", choices=["nls", "whittle"], default=None,
                   help="estimate the model on the train segment instead of using model flags")
    _add_fit(p)
    p.add_argument("--residuals", help="residual CSV path (t,actual,predicted,residual)")
    p.add_argument("-o", "--output")
    p.add_argument("--manifest")

    p = sub.add_parser("compare", help="rank candidate models by test RMSE (JSON)")
    p.add_argument("input")
    p.add_argument("--candidates", default=None,
                   help="comma list FAMILY:p:q; default the ARFIMA, ARTFIMA, GARMA and GARTFIMA "
                        "families at --p/--q")
    p.add_argument("--split", type=float, default=0.75)
    p.add_argument("--method", choices=["nls", "whittle"], default="nls")
    _add_fit(p)
    p.add_argument("-o", "--output")
    p.add_argument("--manifest")

    p = sub.add_parser("montecarlo", help="estimator study (per-replication CSV + JSON summary)")
    _add_model(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--estimator", choices=["nls", "whittle"], default="nls")
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--burnin", type=int, default=500)
    p.add_argument("--trunc", type=int, default=1000)
    p.add_argument("--workers", type=int, default=None)
    _add_fit(p)
    p.add_argument("-o", "--output")
    p.add_argument("--summary")
    p.add_argument("--manifest")

    p = sub.add_parser("select-orders", help="AIC choice of (p, q) (JSON)")
    p.add_argument("input")
    p.add_argument("--p-max", type=int, default=3)
    p.add_argument("--q-max", type=int, default=2)
    p.add_argument("--family", default="GARTFIMA", type=str.upper,
                   choices=[f.value for f in ModelFamily])
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--max-evals", type=int, default=2000)
    p.add_argument("-o", "--output")
    p.add_argument("--manifest")
    return ap


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(text: str, path):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _write_manifest(args, seeds, inputs, outputs):
    options = {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(args).items()
               if k not in ("manifest",)}
    doc = {
        "subcommand": args.command,
        "options": options,
        "seeds": seeds,
        "version": __version__,
        "input_digest": {str(p): _digest(p) for p in inputs},
        "outputs": [str(o) for o in outputs if o],
    }
    text = _json(doc)
    target = args.manifest or (f"{args.output}.manifest.json" if getattr(args, "output", None) else None)
    if target:
        Path(target).write_text(text)
    else:
        sys.stderr.write(text)


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def argv_from_manifest(doc: dict) -> list:
    """Rebuild the argument vector recorded in a manifest.

    Replaying it reproduces the outputs of deterministic subcommands byte for byte.
    """
    sub = _subparser(build_parser(), doc["subcommand"])
    options = doc["options"]
    argv = [doc["subcommand"]]
    for action in sub._actions:
        if action.dest in ("help", "manifest") or action.dest not in options:
            continue
        val = options[action.dest]
        if not action.option_strings:
            argv.append(str(val))
        elif isinstance(action, argparse._StoreTrueAction):
            if val:
                argv.append(action.option_strings[-1])
        elif val is not None:
            if isinstance(val, list):
                val = ",".join(repr(float(v)) for v in val)
            argv += [action.option_strings[-1], str(val)]
    return argv


def _spec_checked(args, family=None) -> ModelSpec:
    spec = _model_from(args)
    validate(spec, family, strict=getattr(args, "strict", False)).raise_if_invalid()
    args.resolved_model = spec.to_dict()
    return spec


def cmd_simulate(args) -> int:
    spec = _spec_checked(args)
    cfg = SimulationConfig(args.n, seed=args.seed, burnin=args.burnin, trunc_len=args.trunc)
    x = simulate(spec, cfg, strict=args.strict)
    _emit(_csv("x", ([v] for v in x)), args.output)
    _write_manifest(args, [args.seed], [], [args.output])
    return EXIT_OK


def cmd_estimate(args) -> int:
    x = ingest_csv(args.input)
    res = fit(x, args.p, args.q, args.method, args.family, _fit_options(args))
    _emit(_json(res.to_dict()), args.output)
    _write_manifest(args, [], [args.input], [args.output])
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def cmd_spectrum(args) -> int:
    spec = _spec_checked(args)
    omega = np.pi * np.arange(1, args.points + 1) / args.points
    f = spectral_density(spec, omega)
    _emit(_csv("omega,f", zip(omega, f)), args.output)
    _write_manifest(args, [], [], [args.output])
    return EXIT_OK


def cmd_acvf(args) -> int:
    spec = _spec_checked(args)
    route = args.route
    if route == "series":
        if spec.ar or spec.ma:
            raise DomainError("series route covers the core process only (no ARMA part)")
        res = gartfima_core_acvf(spec.d, spec.lam, spec.u, spec.sigma2, args.h_max)
    elif route == "hypergeometric":
        if spec.u != 1 or spec.ar or spec.ma:
            raise DomainError("hypergeometric route needs u = 1 and no ARMA part")
        res = artfima_acvf(2 * spec.d, spec.lam, spec.sigma2, args.h_max)
    elif route == "fft":
        from .acvf import acvf_fft
        res = acvf_fft(spec, args.h_max)
    else:
        res = full_acvf(spec, args.h_max)
    _emit(_csv("lag,gamma", ((str(h), g) for h, g in enumerate(res.values))), args.output)
    _write_manifest(args, [], [], [args.output])
    return EXIT_OK


def cmd_forecast(args) -> int:
    x = ingest_csv(args.input)
    est = None
    if args.fit_method:
        from .forecast import split_index
        k = split_index(x.size, args.split)
        est = fit(x[:k], args.p, args.q, args.fit_method, args.family, _fit_options(args))
        spec = est.to_spec()
    else:
        spec = _spec_checked(args)
    rep = one_step_forecasts(spec, x, args.split)
    doc = rep.to_dict()
    doc["model"] = spec.to_dict()
    if est is not None:
        doc["estimate"] = est.to_dict()
    _emit(_json(doc), args.output)
    if args.residuals:
        t = np.arange(rep.split_index, x.size)
        rows = ((str(ti), a, p, a - p) for ti, a, p in zip(t, rep.actual, rep.predictions))
        Path(args.residuals).write_text(_csv("t,actual,predicted,residual", rows))
    _write_manifest(args, [], [args.input], [args.output, args.residuals])
    return EXIT_OK


def _parse_candidates(text, p, q):
    if not text:
        return [(f, p, q) for f in ("ARFIMA", "ARTFIMA", "GARMA", "GARTFIMA")]
    out = []
    for item in text.split(","):
        parts = item.strip().split(":")
        if len(parts) != 3:
            raise UsageError(f"bad candidate {item!r}; expected FAMILY:p:q")
        try:
            out.append((ModelFamily.parse(parts[0]), int(parts[1]), int(parts[2])))
        except ValueError as exc:
            raise UsageError(f"bad candidate {item!r}: {exc}") from None
    return out


def cmd_compare(args) -> int:
    x = ingest_csv(args.input)
    cands = _parse_candidates(args.candidates, args.p, args.q)
    rows = compare_models(x, cands, args.split, args.method, _fit_options(args))
    _emit(_json({"rows": [r.to_dict() for r in rows]}), args.output)
    _write_manifest(args, [], [args.input], [args.output])
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    spec = _spec_checked(args, args.family if args.family != "GARTFIMA" else None)
    summ = monte_carlo(spec, args.n, args.reps, args.estimator, args.base_seed,
                       p=args.p, q=args.q, family=args.family, options=_fit_options(args),
                       burnin=args.burnin, trunc_len=args.trunc, workers=args.workers)
    keys = [k for k in summ.estimates if k != "converged"]
    rows = ([str(s)] + [summ.estimates[k][i] for k in keys] + [str(bool(summ.estimates["converged"][i]))]
            for i, s in enumerate(summ.seeds))
    _emit(_csv(",".join(["seed"] + keys + ["converged"]), rows), args.output)
    if args.summary:
        Path(args.summary).write_text(_json(summ.to_dict()))
    else:
        sys.stderr.write(_json(summ.to_dict()))
    _write_manifest(args, summ.seeds, [], [args.output, args.summary])
    return EXIT_OK


def cmd_select_orders(args) -> int:
    x = ingest_csv(args.input)
    opts = FitOptions(restarts=args.restarts, max_evals=args.max_evals)
    p, q = select_orders(x, args.p_max, args.q_max, args.family, opts)
    _emit(_json({"p": p, "q": q}), args.output)
    _write_manifest(args, [], [args.input], [args.output])
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "spectrum": cmd_spectrum,
    "acvf": cmd_acvf,
    "forecast": cmd_forecast,
    "compare": cmd_compare,
    "montecarlo": cmd_montecarlo,
    "select-orders": cmd_select_orders,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"gartfima: error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"gartfima: {type(exc).__name__}: {exc}\n")
        return EXIT_DATA


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
