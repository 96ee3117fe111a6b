"""Ratio of the BTBM tail to its limit curve C(lambda) psi(z) int psi t^{1/6} exp(-rate t^{1/3})."""

import argparse
import math

import numpy as np

from ibm_exit import asymptotics as asy
from ibm_exit.compose import btbm_tail
from ibm_exit.spectral import build_basis, default_point, parse_domain


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--domain", default="interval:0,1")
    ap.add_argument("--t-max", type=float, default=1e7)
    args = ap.parse_args()
    dom = parse_domain(args.domain)
    basis = build_basis(dom)
    z = default_point(dom)
    print("t,log_p,ratio_to_limit,ratio_minus_one_times_t^(1/3)")
    for t in np.geomspace(10.0, args.t_max, 13):
        lp = btbm_tail(basis, z, float(t))
        r = math.exp(lp - asy.btbm_limit_curve(basis, z, float(t)))
        print(f"{t:.6g},{lp:.10g},{r:.8f},{(r - 1) * t ** (1 / 3):.5f}")


if __name__ == "__main__":
    main()
