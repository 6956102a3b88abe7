"""Command-line driver: every experiment as a reproducible subcommand.

Reports are JSON objects ``{subcommand, config, results, pass,
max_residual, runtime_ms}`` written to --out (default stdout); --csv adds
a tabular artifact where a subcommand produces one.  Exit codes: 0 for a
passing (or purely informational) run, 2 when a verification exceeds its
tolerance, 1 for usage or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from . import boole2d, conjugacy, ergostats, mgf, transfer
from .errors import BooleMapsError
from .maps1d import (
    Baker,
    Doubling,
    Gauss,
    Map1D,
    complex_fixed_points,
    map_from_dict,
    map_to_dict,
)
from .measures import (
    classify_ergodicity,
    density_from_dict,
    quasi_measure_from_fixed_point,
)

_MAP_ALIASES = {"classical_boole", "baker", "gauss", "doubling"}


def parse_map(spec: str) -> Map1D:
    spec = spec.strip()
    if spec.startswith("@"):
        with open(spec[1:], "r", encoding="utf-8") as fh:
            spec = fh.read()
    elif spec in _MAP_ALIASES:
        return map_from_dict({"type": spec})
    return map_from_dict(json.loads(spec))


def parse_density(spec: str):
    spec = spec.strip()
    if spec.startswith("{"):
        return density_from_dict(json.loads(spec))
    parts = spec.split(":")
    kind = parts[0]
    if kind == "cauchy":
        return density_from_dict({"variant": "cauchy", "center": float(parts[1]), "gamma": float(parts[2])})
    if kind == "alphabeta":
        return density_from_dict({"variant": "alphabeta", "alpha": float(parts[1]), "beta": float(parts[2])})
    if kind == "gauss":
        return density_from_dict({"variant": "gauss"})
    if kind == "lebesgue":
        return density_from_dict({"variant": "lebesgue"})
    if kind == "quasi":
        om = complex(float(parts[1]), float(parts[2]))
        k = complex(float(parts[3]), float(parts[4])) if len(parts) > 3 else complex(-1.0 / math.pi, 0.0)
        return density_from_dict({"variant": "quasi_measure", "omega": [om.real, om.imag], "k": [k.real, k.imag]})
    raise ValueError(f"cannot parse density spec {spec!r}")


def parse_interval(spec: str) -> tuple:
    lo, hi = (float(t) for t in spec.split(":"))
    return (lo, hi)


def parse_grid(spec: str) -> np.ndarray:
    lo, hi, n = spec.split(":")
    return np.linspace(float(lo), float(hi), int(n))


def make_observable(spec: str):
    if spec == "x":
        return (lambda x: np.asarray(x, dtype=float)), "x"
    if spec == "x2":
        return (lambda x: np.asarray(x, dtype=float) ** 2), "x2"
    if spec == "arctan":
        return np.arctan, "arctan"
    if spec.startswith("indicator:"):
        c = float(spec.split(":", 1)[1])
        return (lambda x: (np.asarray(x, dtype=float) > c).astype(float)), spec
    raise ValueError(f"unknown observable {spec!r}")


def _base_measure(name: str):
    if name == "lebesgue":
        return mgf.LebesgueOn01()
    if name == "2x":
        return mgf.DensityOn01(lambda x: 2.0 * np.asarray(x, dtype=float), label="2x")
    raise ValueError(f"unknown base measure {name!r}")


def _write_csv(path: str, header: list, rows: list) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# -- subcommand handlers -------------------------------------------------------
# each returns (results, passed, max_residual, csv_header, csv_rows)


def _cmd_verify_density(args):
    m = parse_map(args.map)
    d = parse_density(args.density)
    grid = parse_grid(args.grid)
    rep = transfer.verify_invariant_density(m, d, grid, args.tol)
    return rep.to_dict(), rep.passed, rep.max_rel_residual, None, None


def _cmd_fixed_points(args):
    m = parse_map(args.map)
    fps = complex_fixed_points(m)
    results = {
        "roots": [[w.real, w.imag] for w in fps.roots],
        "upper": [[w.real, w.imag] for w in fps.upper],
    }
    return results, None, None, None, None


def _cmd_quasi_measure(args):
    m = parse_map(args.map)
    qs = quasi_measure_from_fixed_point(m)
    grid = parse_grid(args.grid)
    out = []
    worst = 0.0
    all_pass = True
    for q in qs:
        entry = q.to_dict()
        entry["degenerate"] = q.degenerate
        if not q.degenerate:
            rep = transfer.verify_invariant_density(m, q, grid, args.tol)
            entry["max_rel_residual"] = rep.max_rel_residual
            worst = max(worst, rep.max_rel_residual)
            all_pass = all_pass and rep.passed
        out.append(entry)
    return {"quasi_measures": out}, all_pass, worst, None, None


def _cmd_classify(args):
    m = parse_map(args.map)
    cls = classify_ergodicity(m)
    return {"class": cls.value}, None, None, None, None


def _cmd_ulam(args):
    m = parse_map(args.map)
    if m.domain == "unit":
        part = transfer.UlamPartition.unit(args.m)
    else:
        part = transfer.UlamPartition.line(args.L, args.m)
    um = transfer.ulam_matrix(m, part, args.samples_per_cell, args.seed, threads=args.threads)
    sd = transfer.stationary_density(um)
    results = {**um.summary(), **sd.to_dict()}
    edges = np.asarray(part.edges)
    rows = [
        (edges[i], edges[i + 1], sd.masses[i], sd.density[i])
        for i in range(part.n_interior)
    ]
    return results, sd.increment <= 1e-8, sd.increment, ["cell_lo", "cell_hi", "mass", "density"], rows


def _cmd_conjugacy(args):
    c = conjugacy.CotangentConjugacy(args.gamma, args.a)
    comm = conjugacy.check_commutation(c)
    push = conjugacy.pushforward_density_check(c)
    worst = max(comm.max_residual, push.max_residual)
    results = {"commutation": comm.to_dict(), "pushforward": push.to_dict()}
    return results, worst <= args.tol, worst, None, None


def _cmd_mgf(args):
    m = parse_map(args.map)
    base = _base_measure(args.base)
    A = parse_interval(args.A)
    record = mgf.build_mgf_record(m, base, A, args.lam, args.n)
    fe = mgf.check_functional_equation(m, base, A, args.lam, args.n)
    n_tel = max(args.n, int(math.ceil(math.log(1e-10) / math.log(abs(args.lam)))) if args.lam else args.n)
    e25 = mgf.modified_measure_identity(m, base, A, args.lam, n=n_tel)
    # Cesaro shift identity at finite n
    n = args.n
    lhs = mgf.schur_average(m, base, mgf.preimage_step(m, A), n)
    rhs = (n + 1) / n * mgf.schur_average(m, base, A, n + 1) - mgf.measure_of(base, A) / n
    shift_residual = abs(lhs - rhs)
    results = {
        "record": record.to_dict(),
        "functional_equation_residual": fe.residual,
        "functional_equation_bound": fe.tail_bound,
        "telescoping_residual": e25,
        "cesaro_shift_residual": shift_residual,
    }
    passed = fe.passed and e25 <= 1e-9 and shift_residual <= 1e-12
    worst = max(fe.residual, e25, shift_residual)
    return results, passed, worst, None, None


def _cmd_abel(args):
    m = parse_map(args.map)
    base = _base_measure(args.base)
    A = parse_interval(args.A)
    rec = mgf.abel_limit(m, base, A)
    n_match = 64
    schur = mgf.schur_average(m, base, A, n_match)
    lam_match = 1.0 - 1.0 / n_match
    matched = [v for l, v in zip(rec.lambdas, rec.values) if abs(l - lam_match) < 1e-12]
    gap = abs(matched[0] - schur) if matched else math.inf
    results = {
        "abel": rec.to_dict(),
        "schur_64": schur,
        "matched_lambda": lam_match,
        "matched_gap": gap,
    }
    rows = [(l, v) for l, v in rec.rows()]
    return results, gap <= 2e-3, gap, ["lambda", "scaled_mgf"], rows


def _cmd_baker_expansion(args):
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    pts = []
    while len(pts) < args.points:
        x = float(rng.uniform(0.0, 1.0))
        if (x * 2**20) % 1.0 == 0.0:  # skip low dyadics: orbit degenerates
            continue
        pts.append(x)
    for x in pts:
        be = mgf.baker_expansion(x, args.s, args.n_terms)
        worst = max(worst, abs(be.value - (2.0 * x - x * x)))
    bound = mgf.baker_expansion(pts[0], args.s, args.n_terms).tail_bound
    allowance = bound + 1e-12  # rounding floor for the float orbit sums
    results = {"max_residual": worst, "tail_bound": bound, "points": len(pts)}
    return results, worst <= allowance, worst, None, None


def _cmd_twod_invariance(args):
    m = boole2d.SwappedBoole2D() if args.variant == "swapped" else boole2d.ProductBoole2D()
    rng = np.random.default_rng(args.seed)
    rows = []
    worst_abs = 0.0
    worst_signed = 0.0
    while len(rows) < args.samples:
        u, v = rng.uniform(-10.0, 10.0, 2)
        w = u * v
        if abs(w) < 1e-3 or abs(w + 4.0) < 1e-3:
            continue
        if isinstance(m, boole2d.SwappedBoole2D) and (u * u + 4 * u / v < 0 or v * v + 4 * v / u < 0):
            continue
        s_abs = boole2d.jacobian_sum(m, float(u), float(v))
        s_sgn = boole2d.signed_jacobian_sum(m, float(u), float(v))
        worst_abs = max(worst_abs, abs(s_abs - 1.0))
        worst_signed = max(worst_signed, abs(s_sgn - 1.0))
        rows.append((u, v, s_abs, s_sgn, 2))
    results = {
        "samples": len(rows),
        "max_abs_jacobian_sum_deviation": worst_abs,
        "max_signed_jacobian_sum_deviation": worst_signed,
    }
    return results, worst_abs <= args.tol, worst_abs, ["u", "v", "sum", "signed_sum", "branch_count"], rows


def _cmd_nd_preimages(args):
    sigma = tuple(int(t) for t in args.sigma.split(","))
    u = np.array([float(t) for t in args.u.split(",")])
    m = boole2d.PermutationBooleMap(len(sigma), sigma)
    r = boole2d.nd_preimages(m, u)
    results = {
        "weight_sum": r.weight_sum,
        "n_branches": r.n_branches,
        "certainty": r.certainty,
        "points": [list(p) for p in r.points],
        "weights": list(r.weights),
    }
    if r.incomplete_enumeration:
        return results, None, None, None, None
    dev = abs(r.weight_sum - 1.0)
    return results, dev <= args.tol, dev, None, None


def _cmd_birkhoff(args):
    m = parse_map(args.map)
    f, name = make_observable(args.observable)
    stats = ergostats.birkhoff_average(m, f, args.x0, args.n, seed=args.seed, observable=name)
    return stats.to_dict(), None, None, None, None


def _cmd_histogram(args):
    m = parse_map(args.map)
    lo, hi = parse_interval(args.window)
    h = ergostats.empirical_density(m, args.x0, args.n, (lo, hi), args.bins, seed=args.seed)
    return h.to_dict(), None, None, ["bin_lo", "bin_hi", "count", "normalized"], h.csv_rows()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boolemaps", description=__doc__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, seed_default=0):
        sp.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
        sp.add_argument("--csv", default=None, help="write the tabular artifact to this CSV path")
        sp.add_argument("--threads", type=int, default=1, help="worker cap for parallelizable sweeps")
        sp.add_argument("--seed", type=int, default=seed_default, help="RNG seed (bit-reproducible)")

    sp = sub.add_parser("verify-density", help="check T rho = rho on a grid")
    sp.add_argument("--map", required=True, help="map JSON, @file, or alias")
    sp.add_argument("--density", required=True, help="density JSON or shorthand like cauchy:0:1")
    sp.add_argument("--grid", default="-50:50:1000", help="lo:hi:n evaluation grid")
    sp.add_argument("--tol", type=float, default=1e-8)
    common(sp)
    sp.set_defaults(handler=_cmd_verify_density)

    sp = sub.add_parser("fixed-points", help="complex fixed points of a Boole-type map")
    sp.add_argument("--map", required=True)
    common(sp)
    sp.set_defaults(handler=_cmd_fixed_points)

    sp = sub.add_parser("quasi-measure", help="invariant quasi-measures from fixed points")
    sp.add_argument("--map", required=True)
    sp.add_argument("--grid", default="-50:50:1000")
    sp.add_argument("--tol", type=float, default=1e-8)
    common(sp)
    sp.set_defaults(handler=_cmd_quasi_measure)

    sp = sub.add_parser("classify", help="ergodicity class from (alpha, a)")
    sp.add_argument("--map", required=True)
    common(sp)
    sp.set_defaults(handler=_cmd_classify)

    sp = sub.add_parser("ulam", help="Ulam matrix and stationary density")
    sp.add_argument("--map", required=True)
    sp.add_argument("--m", type=int, default=128, help="interior cell count")
    sp.add_argument("--L", type=float, default=20.0, help="window half-width for line maps")
    sp.add_argument("--samples-per-cell", type=int, default=1000)
    common(sp, seed_default=1)
    sp.set_defaults(handler=_cmd_ulam)

    sp = sub.add_parser("conjugacy", help="cotangent conjugacy residuals")
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--a", type=float, default=0.0)
    sp.add_argument("--tol", type=float, default=1e-9)
    common(sp)
    sp.set_defaults(handler=_cmd_conjugacy)

    sp = sub.add_parser("mgf", help="generating-function identities at one (map, A, lambda)")
    sp.add_argument("--map", required=True, help="doubling or baker")
    sp.add_argument("--base", default="lebesgue", choices=["lebesgue", "2x"])
    sp.add_argument("--A", default="0:0.5", help="target interval lo:hi")
    sp.add_argument("--lam", type=float, default=0.5)
    sp.add_argument("--n", type=int, default=48)
    common(sp)
    sp.set_defaults(handler=_cmd_mgf)

    sp = sub.add_parser("abel", help="Abel limit schedule vs the Cesaro average")
    sp.add_argument("--map", required=True)
    sp.add_argument("--base", default="2x", choices=["lebesgue", "2x"])
    sp.add_argument("--A", default="0:0.5")
    common(sp)
    sp.set_defaults(handler=_cmd_abel)

    sp = sub.add_parser("baker-expansion", help="orbit-series expansion of 2x - x^2")
    sp.add_argument("--s", type=float, default=0.5)
    sp.add_argument("--n-terms", type=int, default=36)
    sp.add_argument("--points", type=int, default=100)
    common(sp, seed_default=5)
    sp.set_defaults(handler=_cmd_baker_expansion)

    sp = sub.add_parser("twod-invariance", help="inverse-branch Jacobian sums on random targets")
    sp.add_argument("--variant", default="swapped", choices=["swapped", "product"])
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--tol", type=float, default=1e-8)
    common(sp, seed_default=7)
    sp.set_defaults(handler=_cmd_twod_invariance)

    sp = sub.add_parser("nd-preimages", help="preimage weight sums of the permuted map")
    sp.add_argument("--sigma", required=True, help="0-based permutation, e.g. 1,0,2")
    sp.add_argument("--u", required=True, help="target vector, e.g. 0,0,0")
    sp.add_argument("--tol", type=float, default=1e-8)
    common(sp)
    sp.set_defaults(handler=_cmd_nd_preimages)

    sp = sub.add_parser("birkhoff", help="time average of an observable along an orbit")
    sp.add_argument("--map", required=True)
    sp.add_argument("--observable", default="x")
    sp.add_argument("--x0", type=float, default=0.41421356237)
    sp.add_argument("--n", type=int, default=10**6)
    common(sp)
    sp.set_defaults(handler=_cmd_birkhoff)

    sp = sub.add_parser("histogram", help="empirical density of an orbit window")
    sp.add_argument("--map", required=True)
    sp.add_argument("--x0", type=float, default=0.41421356237)
    sp.add_argument("--n", type=int, default=10**6)
    sp.add_argument("--window", default="0:1")
    sp.add_argument("--bins", type=int, default=100)
    common(sp)
    sp.set_defaults(handler=_cmd_histogram)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0
    t0 = time.perf_counter()
    try:
        results, passed, max_residual, csv_header, csv_rows = args.handler(args)
    except (BooleMapsError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    config = {
        k: v for k, v in vars(args).items()
        if k not in ("handler", "out", "csv") and not callable(v)
    }
    report = {
        "subcommand": args.subcommand,
        "config": config,
        "results": results,
        "pass": passed,
        "runtime_ms": runtime_ms,
    }
    if max_residual is not None:
        report["max_residual"] = max_residual
    payload = json.dumps(report, indent=2, default=float)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    if args.csv and csv_rows is not None:
        _write_csv(args.csv, csv_header, csv_rows)
    if passed is False:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
