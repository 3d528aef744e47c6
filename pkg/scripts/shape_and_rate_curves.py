#!/usr/bin/env python3
"""Sweep the analytic curves into plot-ready CSV files.

Writes three files under the output directory: the i.i.d. and boundary
shape surfaces on an (s, t) grid, the log-MGF / minimizer curve over xi,
and the rate-function curve over r.  Equivalent CLI one-liners are shown
in the README; this script is the scripted-experiment form.
"""

import argparse
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from bernlpp import gpp, gpp_boundary, jstar, rate_I, ustar, validate_params
from bernlpp.ldp import rate_I_detail


@dataclass
class SweepConfig:
    p: float = 0.25
    u: float = 0.5
    s: float = 1.0
    t: float = 1.0
    grid_points: int = 60
    xi_max: float = 3.0
    outdir: Path = Path("curves")


def write_shape_surface(cfg: SweepConfig) -> None:
    params = validate_params(cfg.p, cfg.u)
    path = cfg.outdir / "shape_surface.csv"
    with path.open("w") as fh:
        print("s,t,gpp,branch,gpp_boundary", file=fh)
        for s in np.linspace(0.05, 2.0, cfg.grid_points):
            for t in np.linspace(0.05, 2.0, cfg.grid_points):
                res = gpp(s, t, cfg.p)
                print(f"{s},{t},{res.value},{res.branch},{gpp_boundary(s, t, params)}", file=fh)
    print(f"wrote {path}")


def write_lmgf_curve(cfg: SweepConfig) -> None:
    path = cfg.outdir / "jstar_curve.csv"
    flat = cfg.t * cfg.p >= cfg.s * (1 - cfg.p)
    with path.open("w") as fh:
        print("xi,jstar,u_star", file=fh)
        for xi in np.linspace(0.0, cfg.xi_max, 150):
            val = jstar(cfg.s, cfg.t, cfg.p, xi).value
            us = "" if (flat or xi == 0) else ustar(cfg.s, cfg.t, cfg.p, xi)
            print(f"{xi},{val},{us}", file=fh)
    print(f"wrote {path}")


def write_rate_curve(cfg: SweepConfig) -> None:
    path = cfg.outdir / "rate_curve.csv"
    g0 = gpp(cfg.s, cfg.t, cfg.p).value
    with path.open("w") as fh:
        print("r,rate,saturated", file=fh)
        for r in np.linspace(g0, cfg.s, 150):
            det = rate_I_detail(cfg.s, cfg.t, cfg.p, r)
            print(f"{r},{det.value},{int(det.saturated)}", file=fh)
    print(f"wrote {path}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=0.25)
    ap.add_argument("--u", type=float, default=0.5)
    ap.add_argument("--s", type=float, default=1.0)
    ap.add_argument("--t", type=float, default=1.0)
    ap.add_argument("--outdir", type=Path, default=Path("curves"))
    args = ap.parse_args()
    cfg = SweepConfig(p=args.p, u=args.u, s=args.s, t=args.t, outdir=args.outdir)
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    write_shape_surface(cfg)
    write_lmgf_curve(cfg)
    write_rate_curve(cfg)
    print("sanity:", rate_I(cfg.s, cfg.t, cfg.p, gpp(cfg.s, cfg.t, cfg.p).value), "should be 0 at the shape")


if __name__ == "__main__":
    main()
