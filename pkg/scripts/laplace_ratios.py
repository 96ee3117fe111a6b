"""Quadrature / closed form for the three model Laplace integrals along geometric grids."""

import math

import numpy as np

from ibm_exit import asymptotics as asy


def main():
    print("integral,parameter,ratio")
    for lam in 25.0 * 2.0 ** np.arange(8):
        r = math.exp(asy.integral_x_plus_xinv2(lam) - asy.asympt_x_plus_xinv2(lam))
        print(f"x+x^-2,{lam:g},{r:.8f}")
    for t in np.geomspace(1e2, 1e9, 15):
        r0 = math.exp(asy.gauss_clock_integral(1, 1, t) - asy.asympt_gauss_clock(1, 1, t))
        r1 = math.exp(asy.gauss_clock_integral(1, 1, t, power=1) - asy.asympt_u_gauss_clock(1, 1, t))
        print(f"gauss_clock,{t:.4g},{r0:.8f}")
        print(f"u_gauss_clock,{t:.4g},{r1:.8f}")


if __name__ == "__main__":
    main()
