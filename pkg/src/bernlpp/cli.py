"""Command-line front end: analytic curves, simulations, and verification.

Every output embeds the package version, the fully resolved configuration
(sorted JSON) and the master seed, so re-running an output's own config
reproduces it byte for byte.  CSV uses '.' decimals and serializes
infinities as the literal string ``inf``.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .burke import exact_burke_factorization, mc_stationarity_check
from .errors import BernlppError, ConfigError
from .ldp import jstar, rate_I_detail, ustar
from .lmgf import lambda_boundary
from .mc import estimate_growth, estimate_lmgf, estimate_tail, left_tail_diagnostic
from .params import validate_params
from .shapes import gpp, gpp_boundary, gpp_restricted, variational_gpp
from .verify import run_all

_COMMANDS = (
    "shape",
    "rate",
    "lmgf",
    "simulate",
    "tail",
    "mgf-sim",
    "left-tail",
    "burke",
    "verify-all",
)

_CONFIG_KEYS = {
    "p", "u", "s", "t", "r", "xi", "n", "reps", "seed", "threads",
    "format", "out", "grid", "which", "full", "cutoff",
}


def _parse_values(spec: str) -> list[float]:
    """A value flag is a scalar or a range 'a..b:k' (k inclusive points)."""
    if ".." in spec:
        span, _, count = spec.partition(":")
        a, _, b = span.partition("..")
        if not count:
            raise ConfigError(f"range spec {spec!r} needs a point count, e.g. 0..2:40")
        try:
            return list(np.linspace(float(a), float(b), int(count)))
        except ValueError as exc:
            raise ConfigError(f"bad range spec {spec!r}") from exc
    try:
        return [float(spec)]
    except ValueError as exc:
        raise ConfigError(f"bad numeric value {spec!r}") from exc


_DEFAULTS = {"seed": 0, "format": "csv", "which": "iid", "cutoff": 80, "full": False}

_S = argparse.SUPPRESS  # absent flags stay absent, so config-file values survive


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bernlpp", description=__doc__)
    ap.add_argument("command", choices=_COMMANDS)
    ap.add_argument("--p", type=float, default=_S, help="bulk Bernoulli success probability")
    ap.add_argument("--u", type=float, default=_S, help="boundary parameter in (p, 1]")
    ap.add_argument("--s", type=str, default=_S, help="horizontal direction (scalar or a..b:k)")
    ap.add_argument("--t", type=str, default=_S, help="vertical direction (scalar or a..b:k)")
    ap.add_argument("--r", type=str, default=_S, help="deviation level (scalar or a..b:k)")
    ap.add_argument("--xi", type=str, default=_S, help="tilt parameter (scalar or a..b:k)")
    ap.add_argument("--n", type=str, default=_S, help="lattice scale N (scalar or a..b:k)")
    ap.add_argument("--reps", type=int, default=_S, help="Monte Carlo replicates")
    ap.add_argument("--seed", type=int, default=_S, help="master seed (default 0)")
    ap.add_argument("--threads", type=int, default=_S, help="worker count (results invariant)")
    ap.add_argument("--format", choices=("csv", "json"), default=_S, help="output format (default csv)")
    ap.add_argument("--out", type=str, default=_S, help="output path (stdout when omitted)")
    ap.add_argument("--grid", nargs="+", metavar="KEY=SPEC", default=_S, help="grid specs, e.g. s=0..2:40")
    ap.add_argument("--which", choices=("iid", "boundary", "hor", "ver"), default=_S)
    ap.add_argument("--full", action="store_true", default=_S, help="verify-all at the reference scales")
    ap.add_argument("--cutoff", type=int, default=_S, help="geometric cutoff for the burke check (default 80)")
    ap.add_argument("--config", type=str, default=None, help="JSON config file; flags win on conflict")
    return ap


def _load_config(args: argparse.Namespace) -> dict:
    cfg: dict = dict(_DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
        unknown = set(raw) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(raw)
    for key in _CONFIG_KEYS:
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    for spec in cfg.pop("grid", None) or []:
        key, eq, val = spec.partition("=")
        if eq != "=" or key not in ("s", "t", "r", "xi", "n"):
            raise ConfigError(f"bad grid spec {spec!r}")
        cfg[key] = val
    return cfg


def _values(cfg: dict, key: str, default: float | None = None) -> list[float]:
    if key not in cfg or cfg[key] is None:
        if default is None:
            raise ConfigError(f"missing required value --{key}")
        return [default]
    return _parse_values(str(cfg[key]))


def _scalar(cfg: dict, key: str, default=None):
    vals = _values(cfg, key, default)
    if len(vals) != 1:
        raise ConfigError(f"--{key} must be a scalar here")
    return vals[0]


def _params(cfg: dict):
    if "p" not in cfg:
        raise ConfigError("missing required value --p")
    return validate_params(float(cfg["p"]), cfg.get("u"))


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return repr(x)
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


class _Sink:
    """Writes one run's output with the embedded provenance header.

    The echoed config drops ``out`` and ``threads``: neither affects the
    computed values, so outputs stay byte-identical across target paths and
    worker counts.
    """

    def __init__(self, cfg: dict, fmt: str, out: str | None):
        self.cfg = {k: v for k, v in sorted(cfg.items()) if k not in ("out", "threads")}
        self.fmt = fmt
        self.out = out

    def _open(self):
        return open(self.out, "w") if self.out else sys.stdout

    def header_lines(self) -> list[str]:
        return [
            f"# bernlpp-version: {__version__}",
            f"# config: {json.dumps(self.cfg, sort_keys=True)}",
            f"# master-seed: {self.cfg.get('seed', 0)}",
        ]

    def write_rows(self, columns: list[str], rows: list[tuple]) -> None:
        fh = self._open()
        try:
            if self.fmt == "csv":
                for line in self.header_lines():
                    print(line, file=fh)
                print(",".join(columns), file=fh)
                for row in rows:
                    print(",".join(_fmt(v) for v in row), file=fh)
            else:
                doc = {
                    "version": __version__,
                    "config": self.cfg,
                    "master_seed": self.cfg.get("seed", 0),
                    "columns": columns,
                    "rows": [[None if isinstance(v, float) and math.isnan(v) else v for v in row] for row in rows],
                }
                print(json.dumps(_jsonable(doc), sort_keys=True), file=fh)
        finally:
            if self.out:
                fh.close()

    def write_record(self, record: dict) -> None:
        fh = self._open()
        try:
            doc = {"version": __version__, "config": self.cfg, "result": record}
            print(json.dumps(_jsonable(doc), sort_keys=True), file=fh)
        finally:
            if self.out:
                fh.close()


def _jsonable(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return _jsonable(float(obj))
    return obj


def _cmd_shape(cfg: dict, sink: _Sink) -> int:
    params = _params(cfg)
    which = cfg.get("which", "iid")
    rows = []
    for s in _values(cfg, "s", 1.0):
        for t in _values(cfg, "t", 1.0):
            try:
                if which == "iid":
                    res = variational_gpp(s, t, params.p)
                    rows.append((s, t, res.value, res.branch, res.minimizer_u))
                elif which == "boundary":
                    rows.append((s, t, gpp_boundary(s, t, params), "boundary", math.nan))
                else:
                    step = "e1" if which == "hor" else "e2"
                    val = gpp_restricted(s, t, params, step)
                    bval = gpp_boundary(s, t, params)
                    branch = "boundary_dominated" if val == bval and val != gpp(s, t, params.p).value else "bulk_dominated"
                    rows.append((s, t, val, branch, math.nan))
            except BernlppError:
                rows.append((s, t, math.nan, "error", math.nan))
    sink.write_rows(["s", "t", "value", "branch", "minimizer"], rows)
    return 0


def _cmd_rate(cfg: dict, sink: _Sink) -> int:
    params = _params(cfg)
    s = _scalar(cfg, "s", 1.0)
    t = _scalar(cfg, "t", 1.0)
    if "xi" in cfg:
        rows = []
        for xi in _values(cfg, "xi"):
            try:
                val = jstar(s, t, params.p, xi).value
                us = math.nan
                if xi > 0 and t * params.p < s * (1 - params.p):
                    us = ustar(s, t, params.p, xi)
                rows.append((xi, val, us))
            except BernlppError:
                rows.append((xi, math.nan, math.nan))
        sink.write_rows(["xi", "jstar", "u_star"], rows)
        return 0
    if "r" in cfg:
        rows = []
        for r in _values(cfg, "r"):
            det = rate_I_detail(s, t, params.p, r)
            rows.append((r, det.value, int(det.saturated)))
        sink.write_rows(["r", "rate", "saturated"], rows)
        return 0
    raise ConfigError("rate needs --xi and/or --r")


def _cmd_lmgf(cfg: dict, sink: _Sink) -> int:
    params = _params(cfg)
    if not params.has_boundary:
        raise ConfigError("lmgf requires --u")
    s = _scalar(cfg, "s", 1.0)
    t = _scalar(cfg, "t", 1.0)
    rows = []
    for xi in _values(cfg, "xi"):
        try:
            full = lambda_boundary(s, t, params, xi, "full")
            hor = lambda_boundary(s, t, params, xi, "hor")
            ver = lambda_boundary(s, t, params, xi, "ver")
            kp, km, ell = full.thresholds
            rows.append((xi, hor.value, ver.value, full.value, full.regime, kp, km, ell))
        except BernlppError:
            rows.append((xi, math.nan, math.nan, math.nan, "error", math.nan, math.nan, math.nan))
    sink.write_rows(
        ["xi", "lambda_hor", "lambda_ver", "lambda_full", "regime", "k_plus", "k_minus", "ell"], rows
    )
    return 0


def _mc_args(cfg: dict) -> tuple:
    params = _params(cfg)
    with_boundary = params.has_boundary
    s = _scalar(cfg, "s", 1.0)
    t = _scalar(cfg, "t", 1.0)
    if "reps" not in cfg:
        raise ConfigError("missing required value --reps")
    return params, with_boundary, s, t, int(cfg["reps"]), int(cfg.get("seed", 0)), cfg.get("threads")


def _cmd_simulate(cfg: dict, sink: _Sink) -> int:
    params, wb, s, t, reps, seed, threads = _mc_args(cfg)
    N = int(_scalar(cfg, "n"))
    est = estimate_growth(params, wb, s, t, N, reps, seed, threads)
    sink.write_record(asdict(est))
    return 0


def _cmd_tail(cfg: dict, sink: _Sink) -> int:
    params, wb, s, t, reps, seed, threads = _mc_args(cfg)
    N = int(_scalar(cfg, "n"))
    r = _scalar(cfg, "r")
    est = estimate_tail(params, wb, s, t, r, N, reps, seed, threads)
    sink.write_record(asdict(est))
    return 0


def _cmd_mgf_sim(cfg: dict, sink: _Sink) -> int:
    params, wb, s, t, reps, seed, threads = _mc_args(cfg)
    N = int(_scalar(cfg, "n"))
    xi = _scalar(cfg, "xi")
    est = estimate_lmgf(params, wb, s, t, xi, N, reps, seed, threads)
    sink.write_record(asdict(est))
    return 0


def _cmd_left_tail(cfg: dict, sink: _Sink) -> int:
    params, wb, s, t, reps, seed, threads = _mc_args(cfg)
    r = _scalar(cfg, "r")
    n_list = [int(v) for v in _values(cfg, "n")]
    rows = left_tail_diagnostic(params, wb, s, t, r, n_list, reps, seed, threads)
    sink.write_rows(
        ["N", "reps", "hits", "rate_estimate", "censored"],
        [(row.N, row.reps, row.hits, row.rate_estimate, int(row.censored)) for row in rows],
    )
    return 0


def _cmd_burke(cfg: dict, sink: _Sink) -> int:
    params = _params(cfg)
    record: dict = {"exact": asdict(exact_burke_factorization(params, int(cfg.get("cutoff", 80))))}
    if cfg.get("reps"):
        m = int(_scalar(cfg, "n", 64))
        record["mc"] = asdict(
            mc_stationarity_check(params, m, m, int(cfg["reps"]), int(cfg.get("seed", 0)))
        )
    sink.write_record(record)
    return 0


def _cmd_verify_all(cfg: dict, sink: _Sink) -> int:
    results = run_all(full=bool(cfg.get("full")), seed=int(cfg.get("seed", 7)), threads=cfg.get("threads"))
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.name}: {res.detail} ({res.seconds:.1f}s)")
    sink.write_record({"checks": [asdict(r) for r in results]})
    return 0 if all(r.passed for r in results) else 1


def main(argv: list[str] | None = None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _load_config(args)
        cfg["command"] = args.command
        sink = _Sink(cfg, cfg.get("format", "csv"), cfg.get("out"))
        handler = {
            "shape": _cmd_shape,
            "rate": _cmd_rate,
            "lmgf": _cmd_lmgf,
            "simulate": _cmd_simulate,
            "tail": _cmd_tail,
            "mgf-sim": _cmd_mgf_sim,
            "left-tail": _cmd_left_tail,
            "burke": _cmd_burke,
            "verify-all": _cmd_verify_all,
        }[args.command]
        return handler(cfg, sink)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BernlppError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
