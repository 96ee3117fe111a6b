"""Local t^{beta/(2+beta)} rate of -log P[eta_(-xi,xi) > t] for Weibull-type clocks P[xi > u] = exp(-c u^beta)."""

import argparse

import numpy as np

from ibm_exit.asymptotics import xi_clock_constant, xi_clock_exponent
from ibm_exit.compose import xi_clock_tail


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--betas", default="0.5,1,2")
    args = ap.parse_args()
    print("beta,t_lo,t_hi,fitted,predicted")
    for beta in (float(b) for b in args.betas.split(",")):
        q = xi_clock_exponent(beta)
        ts = np.geomspace(1e3, 1e7, 9)
        logs = np.array([xi_clock_tail(lambda u: -args.c * np.asarray(u) ** beta, float(t)) for t in ts])
        for lo in range(0, 7, 2):
            sl = slice(lo, lo + 3)
            fit = np.polyfit(ts[sl] ** q, -logs[sl], 1)[0]
            print(f"{beta},{ts[lo]:.3g},{ts[lo + 2]:.3g},{fit:.5f},{xi_clock_constant(args.c, beta):.5f}")


if __name__ == "__main__":
    main()
