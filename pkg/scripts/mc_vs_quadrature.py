"""Direct and conditional simulation against quadrature on a small t grid."""

import argparse
import math

from ibm_exit.compose import btbm_tail, ibm_tail
from ibm_exit.montecarlo import SimConfig, conditional_tail, direct_tail
from ibm_exit.spectral import build_basis, default_point, parse_domain


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--domain", default="interval:0,1")
    ap.add_argument("--n-paths", type=int, default=100_000)
    ap.add_argument("--dt", type=float, default=1e-4)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--t", default="0.25,0.5,1,2,4")
    args = ap.parse_args()
    dom = parse_domain(args.domain)
    basis = build_basis(dom)
    z = default_point(dom)
    print("process,t,quadrature,direct,direct_se,conditional,conditional_se")
    for process, fn in (("ibm", ibm_tail), ("btbm", btbm_tail)):
        for t in (float(v) for v in args.t.split(",")):
            q = math.exp(fn(basis, z, t))
            d = direct_tail(process, dom, z, t, SimConfig(dt=args.dt, n_paths=args.n_paths, seed=args.seed))
            c = conditional_tail(process, basis, z, t,
                                 SimConfig(n_paths=args.n_paths, seed=args.seed + 1, estimator="conditional"))
            print(f"{process},{t},{q:.6e},{d.p_hat:.6e},{d.std_err:.2e},{c.p_hat:.6e},{c.std_err:.2e}")


if __name__ == "__main__":
    main()
