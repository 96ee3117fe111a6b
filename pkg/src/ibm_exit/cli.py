"""Command-line front end.

Examples::

    ibm-exit tail --domain interval:0,1 --z 0.5 --process ibm --t 1e3:1e6:20
    ibm-exit asymptotic --constant C_z --domain interval:0,1 --z 0.5
    ibm-exit verify --quick

Options may also come from a JSON file given by ``--config``; explicit flags
override the file, which overrides the defaults.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import asymptotics as asy
from .compose import QuadConfig, QuadratureError, compare_tails, moment_compare, survival_curve
from .montecarlo import SimConfig, conditional_tail, direct_tail, worker_count
from .spectral import DomainError, build_basis, default_point, domain_from_json, parse_domain

COMMANDS = ("spectral", "survival", "tail", "simulate", "asymptotic", "compare", "verify")
CONSTANTS = {
    # name: (provenance label, needs z)
    "lambda_1": ("principal Dirichlet eigenvalue of Laplacian/2", False),
    "a1": ("ground-state coefficient psi(z) int psi", True),
    "C_z": ("IBM envelope theorem: 2C(z) <= scaled tail <= pi C(z)", True),
    "C_lambda": ("BTBM limit theorem: constant C(lambda_D)", False),
    "btbm_limit": ("BTBM limit theorem: C(lambda_D) psi(z) int psi", True),
    "ibm_rate": ("IBM exponent theorem: lim -t^(-1/3) log P", False),
    "btbm_rate": ("BTBM limit theorem: t^(1/3) rate", False),
    "xi_clock": ("random-interval clock theorem: rate constant K(c, beta)", False),
    "parabola_l": ("Brownian parabola constant l", False),
    "parabola_ibm": ("IBM parabola limit constant", False),
    "parabola_btbm": ("BTBM parabola limit constant", False),
}


class UsageError(ValueError):
    pass


# -- run specification ------------------------------------------------------------------


@dataclass
class TGrid:
    """Log-spaced grid of ``count`` points from ``t_min`` to ``t_max``, or explicit values."""

    t_min: float = 1.0
    t_max: float = 1.0
    count: int = 1
    values: tuple = ()

    def points(self) -> list:
        if self.values:
            return [float(v) for v in self.values]
        if self.count == 1:
            return [float(self.t_min)]
        return [float(t) for t in np.geomspace(self.t_min, self.t_max, self.count)]

    def validate(self):
        if self.count < 1:
            raise UsageError("t: count must be >= 1")
        if not (self.t_min > 0 and self.t_max > 0):
            raise UsageError("t: all times must be positive and finite")
        pts = self.points()
        if any(not (t > 0 and math.isfinite(t)) for t in pts):
            raise UsageError("t: all times must be positive and finite")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise UsageError("t: grid must be strictly ascending")


def parse_t(text: str) -> TGrid:
    """``a:b:n`` (log-spaced), ``a,b,c`` (explicit) or a single value."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            return TGrid(float(lo), float(hi), int(n))
        if "," in text:
            vals = tuple(float(v) for v in text.split(","))
            return TGrid(vals[0], vals[-1], len(vals), vals)
        v = float(text)
        return TGrid(v, v, 1)
    except ValueError:
        raise UsageError(f"t: cannot parse {text!r}; use t_min:t_max:count, a,b,c or a number") from None


@dataclass
class RunSpec:
    command: str
    domain: dict = field(default_factory=lambda: {"type": "interval", "a": 0.0, "b": 1.0})
    z: object = None
    t_grid: TGrid = field(default_factory=TGrid)
    process: str = "ibm"
    quad: QuadConfig = field(default_factory=QuadConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    output: str | None = None
    format: str = "csv"
    K: int | None = None
    constant: str | None = None
    params: dict = field(default_factory=dict)
    quick: bool = False
    only: tuple = ()
    workers: int | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"command: must be one of {COMMANDS}")
        if self.format not in ("csv", "json"):
            raise UsageError("format: must be csv or json")
        try:
            dom = domain_from_json(self.domain)
        except DomainError as exc:
            raise UsageError(f"domain: {exc}") from None
        if self.z is not None and not dom.contains(self.z):
            raise UsageError(f"z: {self.z!r} is not inside the domain")
        if self.process not in ("ibm", "btbm", "bm"):
            raise UsageError("process: must be ibm, btbm or bm")
        if self.K is not None and self.K < 1:
            raise UsageError("K: must be >= 1")
        self.t_grid.validate()
        if self.output:
            parent = os.path.dirname(os.path.abspath(self.output))
            if not os.access(parent, os.W_OK):
                raise UsageError(f"output: directory {parent} is not writable")

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunSpec":
        raw = json.loads(text)
        raw["t_grid"] = TGrid(**{**raw.get("t_grid", {}), "values": tuple(raw.get("t_grid", {}).get("values", ()))})
        raw["quad"] = QuadConfig(**raw.get("quad", {}))
        raw["sim"] = SimConfig(**raw.get("sim", {}))
        raw["only"] = tuple(raw.get("only", ()))
        if isinstance(raw.get("z"), list):
            raw["z"] = tuple(raw["z"])
        return cls(**raw)

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    def point(self):
        return self.z if self.z is not None else default_point(domain_from_json(self.domain))


# -- argument parsing --------------------------------------------------------------------


def _parse_z(text):
    vals = [float(v) for v in str(text).split(",")]
    return vals[0] if len(vals) == 1 else tuple(vals)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ibm-exit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunSpec fields")
    common.add_argument("--domain", help="interval:a,b | rectangle:s1,s2,... | disk:R | JSON object")
    common.add_argument("--z", help="starting point, comma separated for dimension > 1")
    common.add_argument("--K", type=int, help="spectral truncation order")
    common.add_argument("--output", "-o", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--workers", type=int, help="worker count (capped by IBM_EXIT_THREADS)")

    timed = argparse.ArgumentParser(add_help=False)
    timed.add_argument("--t", help="t_min:t_max:count (log-spaced), a,b,c, or a single time")
    timed.add_argument("--rel-tol", type=float)

    procs = argparse.ArgumentParser(add_help=False)
    procs.add_argument("--process", choices=("ibm", "btbm", "bm"))

    sub.add_parser("spectral", parents=[common], help="eigenvalues and coefficients")
    sub.add_parser("survival", parents=[common, timed], help="Brownian exit-time survival")
    sub.add_parser("tail", parents=[common, timed, procs], help="iterated exit-time tail by quadrature")
    sim = sub.add_parser("simulate", parents=[common, timed, procs], help="Monte Carlo tail estimates")
    sim.add_argument("--dt", type=float)
    sim.add_argument("--n-paths", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--estimator", choices=("direct", "conditional"))
    sim.add_argument("--no-bridge", action="store_true", default=None)
    asym = sub.add_parser("asymptotic", parents=[common], help="closed-form constants")
    asym.add_argument("--constant", choices=sorted(CONSTANTS))
    asym.add_argument("--c", type=float, help="tail constant c for xi_clock")
    asym.add_argument("--beta", type=float, help="tail exponent beta for xi_clock")
    asym.add_argument("--alpha", type=float, help="parabola exponent")
    asym.add_argument("--A", type=float, help="parabola aperture")
    asym.add_argument("--n", type=int, help="parabola dimension")
    asym.add_argument("--l", type=float, help="parabola constant l (default: computed)")
    cmp_ = sub.add_parser("compare", parents=[common, timed], help="IBM vs twice BTBM")
    cmp_.add_argument("--moments", help="comma separated powers p >= 1")
    ver = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    ver.add_argument("--quick", action="store_true", default=None)
    ver.add_argument("--only", help="comma separated criterion ids")
    return parser


def spec_from_args(args) -> RunSpec:
    """Merge flags over the config file over the defaults."""
    base = {"command": args.command}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = json.load(fh)
        cfg.pop("command", None)
        base.update(cfg)
    spec = RunSpec.from_json(json.dumps(base))
    g = lambda name: getattr(args, name, None)  # noqa: E731
    if g("domain"):
        try:
            spec.domain = parse_domain(args.domain).to_json()
        except (DomainError, ValueError) as exc:
            raise UsageError(f"domain: {exc}") from None
    if g("z") is not None:
        try:
            spec.z = _parse_z(args.z)
        except ValueError:
            raise UsageError(f"z: cannot parse {args.z!r}") from None
    if g("t"):
        spec.t_grid = parse_t(args.t)
    for name in ("process", "output", "format", "K", "constant", "workers"):
        if g(name) is not None:
            setattr(spec, name, g(name))
    if g("quick"):
        spec.quick = True
    if g("only"):
        spec.only = tuple(s.strip() for s in args.only.split(","))
    try:
        if g("rel_tol") is not None:
            spec.quad = dataclasses.replace(spec.quad, rel_tol=args.rel_tol)
        changes = {k: g(k) for k in ("dt", "n_paths", "seed", "estimator") if g(k) is not None}
        if g("no_bridge"):
            changes["bridge_correction"] = False
        if spec.workers is not None:
            changes["workers"] = spec.workers
        if changes:
            spec.sim = dataclasses.replace(spec.sim, **changes)
    except ValueError as exc:
        raise UsageError(f"config: {exc}") from None
    for key in ("c", "beta", "alpha", "A", "n", "l", "moments"):
        if g(key) is not None:
            spec.params[key] = g(key)
    if args.command == "simulate" and spec.process == "bm":
        raise UsageError("process: simulate supports ibm and btbm")
    spec.validate()
    return spec


# -- output ------------------------------------------------------------------------------


def _open_out(spec: RunSpec):
    return open(spec.output, "w", newline="") if spec.output else sys.stdout


def write_csv(spec: RunSpec, columns, rows, seed=None):
    fh = _open_out(spec)
    try:
        fh.write(f"# ibm_exit {__version__}\n")
        fh.write(f"# command: {spec.command}\n")
        fh.write(f"# seed: {seed if seed is not None else 'none'}\n")
        fh.write(f"# config_hash: {spec.config_hash()}\n")
        writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in row.items()})
    finally:
        if fh is not sys.stdout:
            fh.close()


def write_json(spec: RunSpec, payload):
    text = json.dumps(payload, indent=2, default=_json_default)
    if spec.output:
        with open(spec.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(spec, columns, rows, seed=None):
    rows = list(rows)
    if spec.format == "json":
        write_json(spec, {"config_hash": spec.config_hash(), "seed": seed, "rows": rows})
    else:
        write_csv(spec, columns, rows, seed)


# -- commands ----------------------------------------------------------------------------


def _basis(spec):
    return build_basis(domain_from_json(spec.domain), spec.K)


def cmd_spectral(spec):
    basis = _basis(spec)
    cols = ["k", "lambda", "coeff_at_z"]
    _emit(spec, cols, [dict(zip(cols, row)) for row in basis.to_csv_rows(spec.point())])


TAIL_COLUMNS = ["t", "log_p", "p", "err_est", "method", "process"]


def _curve_chunk(args):
    process, domain, K, z, ts, quad = args
    basis = build_basis(domain_from_json(domain), K)
    return list(survival_curve(process, basis, z, ts, quad).rows())


def cmd_survival(spec):
    spec.process = "bm"
    cmd_tail(spec)


def cmd_tail(spec):
    ts = spec.t_grid.points()
    nw = min(worker_count(spec.workers), len(ts)) if spec.process != "bm" else 1
    z = spec.point()
    if nw <= 1:
        rows = _curve_chunk((spec.process, spec.domain, spec.K, z, ts, spec.quad))
    else:
        # distinct t are independent; each worker gets single-point chunks, output keeps grid order
        jobs = [(spec.process, spec.domain, spec.K, z, [t], spec.quad) for t in ts]
        with ProcessPoolExecutor(max_workers=nw) as pool:
            rows = [r for chunk in pool.map(_curve_chunk, jobs) for r in chunk]
    _emit(spec, TAIL_COLUMNS, rows)


SIM_COLUMNS = ["t", "p_hat", "std_err", "n_paths", "estimator", "dt", "seed"]


def cmd_simulate(spec):
    basis = _basis(spec)
    z = spec.point()
    rows = []
    for t in spec.t_grid.points():
        if spec.sim.estimator == "direct":
            est = direct_tail(spec.process, basis.domain, z, t, spec.sim)
        else:
            est = conditional_tail(spec.process, basis, z, t, spec.sim)
        rows.append(est.to_dict())
    _emit(spec, SIM_COLUMNS, rows, seed=spec.sim.seed)


def asymptotic_value(name: str, spec: RunSpec) -> dict:
    if name not in CONSTANTS:
        raise UsageError(f"constant: must be one of {sorted(CONSTANTS)}")
    source, needs_z = CONSTANTS[name]
    p = spec.params
    if name.startswith("parabola"):
        alpha = p.get("alpha", 0.5)
        l = p.get("l") or asy.parabola_l(alpha, p.get("A", 1.0), p.get("n", 3))
        if name == "parabola_l":
            value = l
        else:
            ibm, btbm = asy.parabola_iterated_constants(alpha, l)
            value = ibm if name == "parabola_ibm" else btbm
    elif name == "xi_clock":
        value = asy.xi_clock_constant(p.get("c", 1.0), p.get("beta", 1.0))
    else:
        basis = _basis(spec)
        c = asy.EnvelopeConstants.from_basis(basis, spec.point())
        value = {
            "lambda_1": c.lambda_1,
            "a1": c.a1_of_z,
            "C_z": c.C_z,
            "C_lambda": c.C_lambda,
            "btbm_limit": c.C_lambda * c.a1_of_z,
            "ibm_rate": asy.ibm_rate(c.lambda_1),
            "btbm_rate": asy.btbm_rate(c.lambda_1),
        }[name]
    out = {"constant": name, "value": value, "source": source}
    if needs_z:
        out["z"] = spec.point()
    return out


def cmd_asymptotic(spec):
    if not spec.constant:
        raise UsageError("constant: required for the asymptotic command")
    write_json(spec, asymptotic_value(spec.constant, spec))


def cmd_compare(spec):
    basis = _basis(spec)
    z = spec.point()
    report = compare_tails(basis, z, spec.t_grid.points(), spec.quad).to_dict()
    if spec.params.get("moments"):
        powers = [float(v) for v in str(spec.params["moments"]).split(",")]
        pairs = moment_compare(basis, z, powers)
        report["moments"] = [{"p": q, "ibm": a, "btbm": b, "holds": a <= 2 * b} for q, (a, b) in zip(powers, pairs)]
    write_json(spec, report)
    return 0 if report["holds"] and all(m["holds"] for m in report.get("moments", [])) else 1


def cmd_verify(spec):
    from .acceptance import CRITERIA, run_criteria

    keys = list(spec.only) or list(CRITERIA)
    unknown = [k for k in keys if k not in CRITERIA]
    if unknown:
        raise UsageError(f"only: unknown criteria {unknown}")
    t0 = time.perf_counter()
    results = run_criteria(keys, quick=spec.quick, echo=lambda line: print(line, file=sys.stderr))
    report = {
        "version": __version__,
        "quick": spec.quick,
        "all_passed": all(r.passed for r in results),
        "runtime": time.perf_counter() - t0,
        "criteria": [r.to_dict() for r in results],
    }
    write_json(spec, report)
    return 0 if report["all_passed"] else 1


HANDLERS = {
    "spectral": cmd_spectral,
    "survival": cmd_survival,
    "tail": cmd_tail,
    "simulate": cmd_simulate,
    "asymptotic": cmd_asymptotic,
    "compare": cmd_compare,
    "verify": cmd_verify,
}


def run(spec: RunSpec) -> int:
    spec.validate()
    status = HANDLERS[spec.command](spec)
    return 0 if status is None else status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = spec_from_args(args)
        return run(spec)
    except UsageError as exc:
        parser.error(str(exc))
    except (QuadratureError, ArithmeticError, ValueError) as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, QuadratureError):
            payload.update(log_value=exc.log_value, rel_err=exc.rel_err)
        print(json.dumps(payload, default=_json_default), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
