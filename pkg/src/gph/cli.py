"""``gph ladder|hierarchy|symbolic|oracle``.

Exit codes: 0 pass, 1 tolerance failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, build_ensemble, single_field, threads
from .dense import MemoryGuardError, check_size, oracle_check_terms
from .ladder import conserved_integrals, drift_tolerance, ladder_report
from .operators import N_MAX, OperatorError, build_w, tensor
from .propagator import evolve, gaussian_ic, random_packet, soliton_ic
from .separable import Ensemble, apply_expr, ensemble_state, product_state, trace
from .spectral import GridSpec, normalize
from .syntax import parse, pretty_print

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _write(outdir: Path | None, name: str, text: str):
    if outdir is None:
        return
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / name).write_text(text, encoding="utf-8", newline="")


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def cmd_ladder(cfg: RunConfig, out=None) -> int:
    params = cfg.evolve_params()
    n_max = cfg.n_max()
    policy = cfg.drift_policy()
    phi = single_field(cfg)
    traj = evolve(phi, params)
    report = ladder_report(traj, n_max, params.kappa)
    outdir, fmts = cfg.output_dir(), cfg.formats()
    if "csv" in fmts:
        _write(outdir, "ladder.csv", report.to_csv())
    rows = report.check(policy)
    if "json" in fmts:
        doc = report.to_dict()
        doc["checks"] = [{"n": n, "drift": d, "tolerance": tol, "pass": ok} for n, d, tol, ok in rows]
        _write(outdir, "ladder.json", json.dumps(doc, sort_keys=True, indent=2))
    for n, d, tol, ok in rows:
        print(f"I_{n}  drift={d:.3e}  tol={tol:.0e}  {_verdict(ok)}", file=out)
    return EXIT_OK if all(ok for *_, ok in rows) else EXIT_FAIL


def _evolve_components(ens: Ensemble, params):
    with ThreadPoolExecutor(max_workers=threads()) as pool:
        trajs = list(pool.map(lambda comp: evolve(comp[1], params), ens.components))
    times = [t for t, _ in trajs[0]]
    return times, [[f for _, f in traj] for traj in trajs]


def _hierarchy_operators(cfg: RunConfig):
    h = cfg.raw["hierarchy"]
    ops = []
    orders = h.get("orders")
    if orders is None:
        j, extra = int(h.get("j", 1)), int(h.get("k_extra", 0))
        orders = [[n, j, j + n - 1 + extra] for n in range(1, int(h.get("n_max", 4)) + 1)]
    for entry in orders:
        try:
            n, j, k = (int(v) for v in entry)
        except (TypeError, ValueError):
            raise ConfigError(f"hierarchy.orders entries must be [n, j, k], got {entry!r}") from None
        if k < j + n - 1:
            raise ConfigError(f"k={k} too small for W_{n}^{j}")
        ops.append((f"W_{n}^{j}", build_w(n, j), k, (n,)))
    for seq in h.get("products") or []:
        seq = [int(v) for v in seq]
        expr, base, names = None, 1, []
        for n in seq:
            w = build_w(n, base)
            names.append(f"W_{n}^{base}")
            expr = w if expr is None else tensor(expr, w)
            base += n
        ops.append((" x ".join(names), expr, base - 1, tuple(seq)))
    return ops


def cmd_hierarchy(cfg: RunConfig, out=None) -> int:
    grid = cfg.grid()
    params = cfg.evolve_params()
    policy = cfg.drift_policy()
    agree_tol = float(cfg.raw["tolerances"]["route_agreement"])
    ens = build_ensemble(cfg.ensemble_entries(), grid)
    ops = _hierarchy_operators(cfg)
    times, fields = _evolve_components(ens, params)
    kappa = params.kappa
    n_need = max(max(levels) for *_, levels in ops)
    rows, summary, ok_all = [], [], True
    for name, expr, k, levels in ops:
        route_a, route_b = [], []
        for s in range(len(times)):
            snap = ens.with_fields([f[s] for f in fields])
            a = 0j
            for p, phi in snap.components:
                ints = conserved_integrals(phi, n_need, kappa)
                a += p * np.prod([ints[n - 1] for n in levels])
            route_a.append(complex(a))
            route_b.append(trace(apply_expr(expr, ensemble_state(snap, k), kappa)))
        ra, rb = np.array(route_a), np.array(route_b)
        disc = np.abs(ra - rb) / np.maximum(1.0, np.abs(ra))
        drift_a = np.abs(ra - ra[0]) / max(1.0, abs(ra[0]))
        drift_b = np.abs(rb - rb[0]) / max(1.0, abs(rb[0]))
        tol = max(drift_tolerance(n, policy) for n in levels)
        ok = bool(disc.max() < agree_tol and drift_a.max() < tol and drift_b.max() < tol)
        ok_all &= ok
        for s, t in enumerate(times):
            rows.append([name, k, t, ra[s], rb[s], disc[s], drift_a[s], drift_b[s]])
        summary.append({"operator": name, "k": k, "max_discrepancy": float(disc.max()),
                        "max_drift_a": float(drift_a.max()), "max_drift_b": float(drift_b.max()),
                        "drift_tolerance": tol, "agreement_tolerance": agree_tol, "pass": ok})
        print(f"{name:<22} k={k}  route gap={disc.max():.3e} (tol {agree_tol:.0e})  "
              f"drift a={drift_a.max():.3e} b={drift_b.max():.3e} (tol {tol:.0e})  {_verdict(ok)}", file=out)
    outdir, fmts = cfg.output_dir(), cfg.formats()
    if "csv" in fmts:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["operator", "k", "t", "re_route_a", "im_route_a", "re_route_b", "im_route_b",
                    "discrepancy", "drift_a", "drift_b"])
        for name, k, t, a, b, d, da, db in rows:
            w.writerow([name, k, repr(float(t)), repr(float(a.real)), repr(float(a.imag)), repr(float(b.real)), repr(float(b.imag)),
                        repr(float(d)), repr(float(da)), repr(float(db))])
        _write(outdir, "hierarchy.csv", buf.getvalue())
    if "json" in fmts:
        _write(outdir, "hierarchy.json", json.dumps({"operators": summary, "times": [float(t) for t in times]},
                                                    sort_keys=True, indent=2))
    return EXIT_OK if ok_all else EXIT_FAIL


def cmd_symbolic(n: int, j: int, parse_path=None, out=None) -> int:
    if not 1 <= n <= N_MAX or j < 1:
        print(f"error: need 1 <= n <= {N_MAX} and j >= 1", file=sys.stderr)
        return EXIT_USAGE
    expr = build_w(n, j)
    print(pretty_print(expr), file=out)
    print(f"terms: {expr.term_count}", file=out)
    if parse_path is None:
        return EXIT_OK
    p = Path(parse_path)
    if not p.is_file():
        print(f"error: file not found: {p}", file=sys.stderr)
        return EXIT_USAGE
    try:
        parsed = parse(p.read_text(encoding="utf-8"))
    except OperatorError as exc:
        print(f"error: {p}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if parsed == expr:
        print("EQUAL", file=out)
        return EXIT_OK
    print("DIFFERENT", file=out)
    print(f"parsed: {pretty_print(parsed)}", file=out)
    return EXIT_FAIL


def _oracle_states(grid: GridSpec, k: int, seed: int):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = normalize(soliton_ic(grid, 1.0, 0.5, 0.3))
    gauss = gaussian_ic(grid, center=0.2, width=1.0, velocity=0.7)
    rnd = random_packet(grid, np.random.default_rng(seed))
    mix = Ensemble(((0.4, gauss), (0.6, rnd)))
    return [("gaussian", product_state(gauss, k)), ("soliton", product_state(sol, k)),
            ("random", product_state(rnd, k)), ("mixture", ensemble_state(mix, k))]


def cmd_oracle(cfg: RunConfig, out=None) -> int:
    o = cfg.raw["oracle"]
    tol = float(cfg.raw["tolerances"]["oracle"])
    kappa = int(cfg.raw["evolve"]["kappa"])
    max_order = int(o.get("max_order", 3))
    if not 1 <= max_order <= 3:
        raise ConfigError("oracle.max_order must be in 1..3")
    plan = []
    for n in range(1, max_order + 1):
        n_points = int(o["n_points"]) if o.get("n_points") else (32 if n <= 2 else 16)
        k = int(o["k"]) if o.get("k") else n
        if k < n:
            raise ConfigError(f"oracle.k={k} too small for W_{n}")
        try:
            grid = GridSpec(n_points, float(o.get("half_length", 6.0)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        check_size(n_points, k)
        plan.append((n, k, grid))
    worst = 0.0
    report = []
    for n, k, grid in plan:
        for j in range(1, k - n + 2):
            expr = build_w(n, j)
            for label, state in _oracle_states(grid, k, int(cfg.raw.get("seed", 0))):
                gaps = oracle_check_terms(expr, state, kappa)
                worst = max(worst, max(gaps))
                report.append({"n": n, "j": j, "k": k, "grid": grid.n_points, "state": label,
                               "max_gap": max(gaps), "term_gaps": gaps})
                print(f"W_{n}^{j}  k={k}  grid={grid.n_points:<3} {label:<9} max gap={max(gaps):.3e}", file=out)
    ok = worst < tol
    print(f"worst gap {worst:.3e} (tol {tol:.0e})  {_verdict(ok)}", file=out)
    if "json" in cfg.formats():
        _write(cfg.output_dir(), "oracle.json",
               json.dumps({"checks": report, "worst": worst, "tolerance": tol, "pass": ok}, sort_keys=True, indent=2))
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gph", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry, e.g. --set evolve.dt=0.002")
        p.add_argument("--out", help="output directory for CSV/JSON reports")

    common(sub.add_parser("ladder", help="conserved integrals I_n along one NLS trajectory"))
    common(sub.add_parser("hierarchy", help="Tr W_n^j gamma^(k)(t) for an ensemble, two routes"))
    common(sub.add_parser("oracle", help="dense vs separable operator evaluation on coarse grids"))
    sp = sub.add_parser("symbolic", help="print W_n^j and optionally compare with a parsed file")
    sp.add_argument("-n", "--order", type=int, required=True)
    sp.add_argument("-j", "--base", type=int, default=1)
    sp.add_argument("--parse", dest="parse_path", metavar="FILE")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "symbolic":
            return cmd_symbolic(args.order, args.base, args.parse_path)
        overrides = list(args.set)
        if args.out:
            overrides.append(f"output.dir={json.dumps(args.out)}")
        cfg = RunConfig.load(args.config, overrides)
        command = {"ladder": cmd_ladder, "hierarchy": cmd_hierarchy, "oracle": cmd_oracle}[args.command]
        return command(cfg)
    except (ConfigError, MemoryGuardError, OperatorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
