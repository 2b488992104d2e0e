"""``holoforge`` command line: build, threshold, analytic, table1, growth,
verify-gates and distance. Numbers go to files under ``--out``; stdout gets
a short summary."""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional, Sequence

from . import analytic, gates
from .assembler import HeteroCodeSpec, assemble, black_hole
from .erasure import CRITERIA, ErasureCurve, pseudo_threshold, sweep
from .errors import HoloforgeError, VerificationError
from .io import (
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    exit_code,
    parse_grid,
    read_text,
    rows_to_csv,
    slug,
    table_csv,
    write_json,
    write_text,
)
from .seeds import compute_distance, seed, shorten
from .tiling import (
    closed_form_eigenvalues,
    count_physical_closed_form,
    growth_matrix,
    physical_sequence,
    ttn_saving,
)

TABLE_NUMERIC_LAYERS = (0, 2)
TABLE_GRID = "0.05:0.65:0.005"


def load_spec(path: str) -> HeteroCodeSpec:
    return HeteroCodeSpec.from_json(read_text(path))


def build_code(spec: HeteroCodeSpec):
    return black_hole(spec) if spec.black_hole else assemble(spec)


def threshold_pair(small: HeteroCodeSpec, large: HeteroCodeSpec, grid: Sequence[float], trials: int,
                   rng_seed: int, criterion: str, threads: int = 1) -> tuple[ErasureCurve, ErasureCurve, dict]:
    """Recovery curves of two builds and their crossing."""
    cs = build_code(small).code
    cl = build_code(large).code
    a = sweep(cs, grid, trials, rng_seed, criterion, threads, code_id=f"{small.label}-L{small.layers}")
    b = sweep(cl, grid, trials, rng_seed, criterion, threads, code_id=f"{large.label}-L{large.layers}")
    p_th, (lo, hi) = pseudo_threshold(a, b)
    report = {"small": {"label": a.code_id, "n": cs.n}, "large": {"label": b.code_id, "n": cl.n},
              "criterion": criterion, "trials": trials, "rng_seed": rng_seed,
              "p_threshold": p_th, "interval": [lo, hi]}
    return a, b, report


# -- subcommands ------------------------------------------------------------


def cmd_build(args, cfg: RunConfig) -> int:
    if len(cfg.spec_paths) != 1:
        raise ValueError("build takes exactly one --spec")
    spec = load_spec(cfg.spec_paths[0])
    built = build_code(spec)
    code = built.code
    summary = {"label": spec.label, "layers": spec.layers, "n": code.n, "k": code.k,
               "generators": len(code.generators), "css": code.is_css(), "spec": json.loads(spec.to_json())}
    out = cfg.ensure_out()
    stem = f"{slug(spec.label)}-L{spec.layers}"
    write_text(out / f"{stem}.code", built.to_text())
    write_json(out / f"{stem}.json", summary)
    print(f"{spec.label} L={spec.layers}: n={code.n} k={code.k} generators={len(code.generators)} "
          f"css={code.is_css()} -> {out / stem}.code")
    return EXIT_OK


def cmd_threshold(args, cfg: RunConfig) -> int:
    if len(cfg.spec_paths) != 2:
        raise ValueError("threshold needs two --spec files (smaller build first)")
    if not cfg.grid:
        raise ValueError("threshold needs --grid")
    small, large = (load_spec(p) for p in cfg.spec_paths)
    start = time.perf_counter()
    a, b, report = threshold_pair(small, large, cfg.grid, cfg.trials, cfg.rng_seed, cfg.criterion, cfg.threads)
    out = cfg.ensure_out()
    write_text(out / f"{slug(a.code_id)}.csv", a.to_csv())
    write_text(out / f"{slug(b.code_id)}.csv", b.to_csv())
    write_json(out / f"crossing-{slug(a.code_id)}-vs-{slug(b.code_id)}.json", report)
    lo, hi = report["interval"]
    print(f"{a.code_id} (n={report['small']['n']}) vs {b.code_id} (n={report['large']['n']}): "
          f"p_th = {report['p_threshold']:.4f} [{lo:.4f}, {hi:.4f}] in {time.perf_counter() - start:.1f}s")
    return EXIT_OK


def cmd_analytic(args, cfg: RunConfig) -> int:
    grid = cfg.grid or parse_grid("0:1:0.01")
    out = cfg.ensure_out()
    if args.pair:
        center, alternate = args.pair
        row = analytic.theory_row(center, alternate)
        write_json(out / f"analytic-{slug(row.code)}.json", row.as_dict())
        print(f"{row.code}: p_theory={row.p_theory:.4f} p_lower={row.p_lower:.4f} p_upper={row.p_upper:.4f}")
        return EXIT_OK
    f = analytic.seed_function(args.code, args.variant, child=args.child)
    fp = analytic.fixed_point(f)
    stem = slug(f.label.replace(":", "-"))
    write_text(out / f"analytic-{stem}.csv", rows_to_csv(["p", "F"], [(p, f(p)) for p in grid]))
    write_json(out / f"analytic-{stem}.json", {"label": f.label, "provenance": f.provenance, "fixed_point": fp})
    print(f"{f.label} ({f.provenance}): fixed point {fp:.6f}")
    return EXIT_OK


def cmd_table1(args, cfg: RunConfig) -> int:
    rows = []
    grid = cfg.grid or parse_grid(TABLE_GRID)
    for (center, alternate), theory in zip(analytic.TABLE_ROWS, analytic.table_one_theory()):
        q1, q2 = seed(center).n + 1, seed(alternate).n + 1
        row = theory.as_dict()
        row["n_layers"] = physical_sequence(q1, q2, 3)
        if args.numeric:
            small, large = (HeteroCodeSpec(center, alternate, L) for L in TABLE_NUMERIC_LAYERS)
            for crit in CRITERIA:
                try:
                    _, _, rep = threshold_pair(small, large, grid, cfg.trials, cfg.rng_seed, crit, cfg.threads)
                    row[f"p_numeric_{crit}"] = rep["p_threshold"]
                except HoloforgeError as exc:
                    row[f"p_numeric_{crit}"] = None
                    row[f"note_{crit}"] = str(exc)
        rows.append(row)
    out = cfg.ensure_out()
    write_json(out / "table1.json", {"rows": rows, "numeric_layers": list(TABLE_NUMERIC_LAYERS),
                                     "trials": cfg.trials if args.numeric else None,
                                     "rng_seed": cfg.rng_seed if args.numeric else None})
    write_text(out / "table1.csv", table_csv(rows))
    for r in rows:
        num = ""
        if args.numeric:
            num = "  numeric " + " ".join(
                f"{c}={r[f'p_numeric_{c}']:.3f}" if r[f"p_numeric_{c}"] is not None else f"{c}=none"
                for c in CRITERIA)
        print(f"{r['code']:<13} theory {r['p_theory']:.3f}  lower {r['p_lower']:.3f}  upper {r['p_upper']:.3f}"
              f"  n {r['n_layers']}{num}")
    return EXIT_OK


def cmd_growth(args, cfg: RunConfig) -> int:
    q1, q2, depth = args.q1, args.q2, args.depth
    m = growth_matrix(q1, q2)
    report = {
        "q1": q1, "q2": q2,
        "matrix": [list(r) for r in m.entries],
        "eigenvalues": list(m.eigenvalues()),
        "closed_form_eigenvalues": list(closed_form_eigenvalues(q1, q2)),
        "perron_fractions": list(m.perron_fractions()),
        "sequence": physical_sequence(q1, q2, depth),
        "ttn_sequence": physical_sequence(q1, q2, depth, mode="ttn"),
        "ttn_saving": [ttn_saving(q1, q2, d) for d in range(1, depth + 1)],
        "closed_form_center": [count_physical_closed_form(q1, q2, i, "center") for i in range(1, depth // 2 + 1)],
        "closed_form_intermediate": [count_physical_closed_form(q1, q2, i, "intermediate")
                                     for i in range(1, (depth + 1) // 2 + 1)],
    }
    out = cfg.ensure_out()
    write_json(out / f"growth-{q1}-{q2}.json", report)
    lam = report["eigenvalues"]
    print(f"{{{q1},{q2}}}: boundary {report['sequence']}  eigenvalues {lam[0]:.6f}, {lam[1]:.6f}  "
          f"TTN saving by depth " + " ".join(f"{s:.1%}" for s in report["ttn_saving"]))
    return EXIT_OK


def cmd_verify_gates(args, cfg: RunConfig) -> int:
    results = []
    for rule in gates.rule_set():
        chk = gates.verify_rule(rule)
        results.append({"rule": f"{rule.seed} {rule.config} {rule.gate} {rule.logical}", "gates": len(rule.circuit),
                        "mode": chk.mode, "ok": chk.ok, "witness": chk.witness})
    for name, chk in gates.transversal_checks().items():
        results.append({"rule": name, "mode": chk.mode, "ok": chk.ok, "witness": chk.witness})
    chk = gates.check_transformed_stabilizers()
    results.append({"rule": "five_qubit basis change signs", "mode": chk.mode, "ok": chk.ok, "witness": chk.witness})
    ccz = {}
    for sid in ("five_qubit", "steane"):
        piece = gates.pieceable_ccz(sid)
        chk = piece.verify()
        results.append({"rule": f"{sid} pieceable CCZ", "gates": len(piece.circuit), "mode": chk.mode,
                        "ok": chk.ok, "witness": chk.witness})
        ccz[sid] = [r.as_dict() for r in piece.reports]
    sym = gates.steane_symmetry_check()
    results.append({"rule": "steane cube rotation", "mode": "clifford", "ok": sym.ok,
                    "witness": " ".join(map(str, sym.permutation))})
    qrm_sym = gates.qrm_symmetry_search()
    ft = {name: scan.as_dict() for name, scan in gates.ft_report().items()}
    report = {"checks": results, "ccz_stages": ccz, "steane_reflected_order": list(sym.reflected_order),
              "qrm_swap_symmetry": None if qrm_sym is None else list(qrm_sym), "ft": ft}
    out = cfg.ensure_out()
    write_json(out / "verify-gates.json", report)
    failed = [r for r in results if not r["ok"]]
    for r in results:
        print(f"{'PASS' if r['ok'] else 'FAIL'}  {r['rule']}" + (f"  ({r['witness']})" if not r["ok"] else ""))
    for name, scan in ft.items():
        print(f"ft_ok={scan['ft_ok']!s:<5} {name}")
    return EXIT_OK if not failed else exit_code(VerificationError("gate verification failed"))


def cmd_distance(args, cfg: RunConfig) -> int:
    if cfg.spec_paths:
        spec = load_spec(cfg.spec_paths[0])
        code, label = build_code(spec).code, f"{spec.label} L={spec.layers}"
    else:
        code = seed(args.code)
        if args.child:
            code = shorten(code, 0)
        label = code.name
    d, exact = compute_distance(code, args.cap)
    out = cfg.ensure_out()
    write_json(out / f"distance-{slug(label)}.json", {"code": label, "n": code.n, "k": code.k,
                                                      "distance": d, "exact": exact, "cap": args.cap})
    print(f"{label}: d {'=' if exact else '>='} {d}")
    return EXIT_OK


COMMANDS = {
    "build": cmd_build, "threshold": cmd_threshold, "analytic": cmd_analytic, "table1": cmd_table1,
    "growth": cmd_growth, "verify-gates": cmd_verify_gates, "distance": cmd_distance,
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", action="append", default=[], help="code spec JSON file (repeatable)")
    common.add_argument("--grid", default="", help="erasure grid start:stop:step")
    common.add_argument("--trials", type=int, default=10000)
    common.add_argument("--seed", type=int, default=0, help="RNG seed")
    common.add_argument("--criterion", choices=CRITERIA, default="subsystem")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", default="results", help="output directory")

    parser = argparse.ArgumentParser(prog="holoforge", description="Heterogeneous holographic code construction and analysis.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="assemble a code from a spec")
    sub.add_parser("threshold", parents=[common], help="crossing of two builds' recovery curves")
    p = sub.add_parser("analytic", parents=[common], help="seed erasure functions and fixed points")
    p.add_argument("--code", default="five_qubit")
    p.add_argument("--variant", choices=analytic.VARIANTS, default="exact")
    p.add_argument("--child", action="store_true")
    p.add_argument("--pair", nargs=2, metavar=("CENTER", "ALTERNATE"))
    p = sub.add_parser("table1", parents=[common], help="threshold table (theory, optional numerics)")
    p.add_argument("--numeric", action="store_true", help="also run the Monte Carlo crossings")
    p = sub.add_parser("growth", parents=[common], help="boundary growth of a {q1,q2} tiling")
    p.add_argument("--q1", type=int, default=16)
    p.add_argument("--q2", type=int, default=8)
    p.add_argument("--depth", type=int, default=5)
    sub.add_parser("verify-gates", parents=[common], help="check push rules, CCZ and FT orderings")
    p = sub.add_parser("distance", parents=[common], help="code distance by bounded search")
    p.add_argument("--code", default="steane")
    p.add_argument("--child", action="store_true")
    p.add_argument("--cap", type=int, default=3)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.spec, parse_grid(args.grid) if args.grid else [], args.trials,
                        args.seed, args.criterion, args.out, args.threads)
        return COMMANDS[args.command](args, cfg)
    except HoloforgeError as exc:
        print(f"holoforge {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code(exc)
    except (ValueError, PermissionError) as exc:
        print(f"holoforge {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
