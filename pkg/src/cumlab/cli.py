"""Command-line front end: model ingestion, reports, figures.

Subcommands: delta, certify, edgeworth-triangles, berry-esseen, rg, selftest.
Reports land as CSV plus JSON in the output directory, with a rendered PNG
alongside unless figures are disabled.  Exit codes: 0 success, 2 validation
error, 3 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .cumulants import certify, certify_real, cumulant_magnitude_bound
from .differences import difference_budgets, sup_difference, avg_difference
from .edgeworth import triangle_report
from .masks import bits
from .normal_approx import clt_report, feller_bound
from .regular_graphs import (MAX_CORRECTION_ORDER, conjecture_gap,
                             count_regular_graphs, log_approx_by_order, log_bigint)
from .spaces import (CapExceededError, DEFAULT_LATTICE_CAP, DegenerateModelError,
                     ModelError, TabFn, load_model, standardized)
from .selftest import run_selftest

REPORT_SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CAP = 3


@dataclass
class RunConfig:
    """Resolved invocation: subcommand, paths, numeric parameters and caps."""

    subcommand: str
    out_dir: Path
    figures: bool
    lattice_cap: int
    state_cap: int
    params: dict


def _fmt(x) -> str:
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path: Path, obj: dict) -> None:
    payload = {"schema_version": REPORT_SCHEMA_VERSION, "version": __version__}
    payload.update(obj)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _load(cfg: RunConfig) -> TabFn:
    return load_model(cfg.params["model"], lattice_cap=cfg.lattice_cap)


def _subset_label(mask: int) -> str:
    return "+".join(str(j) for j in bits(mask)) if mask else "-"


def cmd_delta(cfg: RunConfig) -> int:
    f = _load(cfg)
    n = f.space.n
    kmax = cfg.params["max_size"] or n
    kmax = min(kmax, n)
    with_sup = cfg.params["with_sup"]
    rows = []
    for mask in sorted(range(1, 1 << n), key=lambda m: (bin(m).count("1"), m)):
        k = bin(mask).count("1")
        if k > kmax:
            continue
        row = [_subset_label(mask), k, avg_difference(f, mask)]
        if with_sup:
            row.append(sup_difference(f, mask))
        rows.append(row)
    header = ["subset", "size", "avg_difference"] + (["sup_difference"] if with_sup else [])
    write_csv(cfg.out_dir / "delta.csv", header, rows)
    budgets = difference_budgets(f)
    write_json(cfg.out_dir / "delta_summary.json", {
        "n": n, "budgets": budgets, "max_size": kmax})
    if cfg.figures:
        from .plotting import save_budget_figure
        save_budget_figure(cfg.out_dir / "delta.png", budgets)
    print(f"wrote {len(rows)} subset rows; budgets S_1..S_{n}: "
          + " ".join("%.6g" % b for b in budgets))
    return EXIT_OK


def cmd_certify(cfg: RunConfig) -> int:
    f = _load(cfg)
    scale = cfg.params["imag_scale"]
    if scale is not None:
        f = standardized(f, 1j * scale)
    m = cfg.params["m"]
    cert = certify_real(f, m) if cfg.params["real_variant"] else certify(f, m)
    write_json(cfg.out_dir / "certify.json", cert.to_json_dict())
    print(f"order m={cert.m}, n={cert.n}, variant={cert.variant}")
    if cert.alpha is None:
        print("hypothesis: INFEASIBLE (no alpha in (0, 1/100])")
    else:
        print(f"alpha={cert.alpha:.12g}  gamma={cert.gamma:.12g}")
        for t, ok in enumerate(cert.hypothesis_ok, start=1):
            print(f"  hypothesis t={t}: {'pass' if ok else 'FAIL'}")
        print(f"  |delta|={abs(cert.delta_actual):.6e} <= bound={cert.delta_bound:.6e}: "
              f"{'pass' if cert.delta_ok else 'FAIL'}")
        for i, ok in enumerate(cert.kappa_bounds_ok, start=2):
            bound = cumulant_magnitude_bound(cert.n, i, cert.alpha)
            print(f"  |kappa_{i}|={abs(cert.kappa[i - 1]):.6e} <= {bound:.6e}: "
                  f"{'pass' if ok else 'FAIL'}")
    print(f"certificate: {'PASS' if cert.passed else 'FAIL'}")
    if cfg.figures:
        from .plotting import save_certificate_figure
        save_certificate_figure(cfg.out_dir / "certify.png", cert)
    return EXIT_OK


def cmd_edgeworth(cfg: RunConfig) -> int:
    v, p, m = cfg.params["n"], cfg.params["p"], cfg.params["m"]
    rep = triangle_report(v, p, m)
    header = ["k", "sigma_pr"] + [f"series_m{j}" for j in range(m + 1)]
    rows = []
    for k in rep.realized():
        rows.append([int(k), float(rep.sigma_pr[k])]
                    + [float(rep.approximations[j, k]) for j in range(m + 1)])
    rows.append(["sup_error", ""] + [rep.sup_errors[j] for j in range(m + 1)])
    write_csv(cfg.out_dir / "edgeworth_triangles.csv", header, rows)
    write_json(cfg.out_dir / "edgeworth_triangles.json", {
        "n_vertices": v, "p": p, "m": m,
        "mu": rep.mu, "sigma": rep.sigma,
        "lambda": {str(r): rep.lam.get(r) for r in range(3, rep.lam.max_order + 1)},
        "sup_errors": list(rep.sup_errors),
        "argmax_k": list(rep.argmax_k)})
    if cfg.figures:
        from .plotting import save_triangle_figure
        save_triangle_figure(cfg.out_dir / "edgeworth_triangles.png", rep)
    print("sup errors by order: "
          + " ".join(f"m={j}:{e:.6g}" for j, e in enumerate(rep.sup_errors)))
    return EXIT_OK


def cmd_berry_esseen(cfg: RunConfig) -> int:
    f = _load(cfg)
    w = cfg.params["w"]
    try:
        rep = clt_report(f, w, cfg.params["tgrid"])
    except DegenerateModelError as exc:
        write_json(cfg.out_dir / "berry_esseen.json",
                   {"degenerate": "sigma=0", "detail": str(exc)})
        print("skipped: sigma=0")
        return EXIT_OK
    rows = []
    for i, t in enumerate(rep.ts):
        rows.append([float(t), float(rep.phi[i].real), float(rep.phi[i].imag),
                     float(rep.log_phi_defect[i]), float(rep.comparator[i]),
                     float(rep.ratios[i])])
    write_csv(cfg.out_dir / "berry_esseen.csv",
              ["t", "re_phi", "im_phi", "log_phi_defect", "comparator", "ratio"],
              rows)
    T_values = cfg.params["T"]
    bounds = {str(T): feller_bound(f, T, cfg.params["tgrid"]) for T in T_values}
    write_json(cfg.out_dir / "berry_esseen.json", {
        "n": rep.n, "sigma": rep.sigma, "w": rep.w,
        "envelope_a": rep.envelope_a, "t_max": rep.t_max,
        "max_ratio": float(np.max(rep.ratios)),
        "cdf_distance": rep.cdf_distance,
        "cdf_comparator": rep.cdf_comparator,
        "smoothing_bounds": bounds})
    if cfg.figures:
        from .plotting import save_clt_figure
        save_clt_figure(cfg.out_dir / "berry_esseen.png", rep)
    print(f"sigma={rep.sigma:.6g} a={rep.envelope_a:.6g} t_max={rep.t_max:.6g} "
          f"cdf distance={rep.cdf_distance:.6g} (comparator {rep.cdf_comparator:.6g})")
    return EXIT_OK


def cmd_rg(cfg: RunConfig) -> int:
    n, d, m = cfg.params["n"], cfg.params["d"], cfg.params["m"]
    exact = count_regular_graphs(n, d, max_states=cfg.state_cap)
    print(exact)
    if (n * d) % 2 == 1:
        print("note: d*n is odd, no regular graphs exist (handshake parity)")
    payload = {"n": n, "d": d, "exact_digits": str(exact)}
    asymptotic_ok = (not cfg.params["exact_only"]) and exact > 0 and 0 < d < n - 1
    if exact > 0:
        payload["log_exact"] = log_bigint(exact)
    if asymptotic_ok:
        by_m = log_approx_by_order(n, d, m)
        payload["log_approx_by_m"] = by_m
        payload["conjecture_gap"] = (conjecture_gap(n, d, exact)
                                     if m >= MAX_CORRECTION_ORDER else None)
        if cfg.figures:
            from .plotting import save_rg_figure
            save_rg_figure(cfg.out_dir / "rg.png", n, d, payload["log_exact"], by_m)
    else:
        payload["log_approx_by_m"] = None
        payload["conjecture_gap"] = None
    write_json(cfg.out_dir / "rg.json", payload)
    return EXIT_OK


def cmd_selftest(cfg: RunConfig) -> int:
    ok = run_selftest(seed=cfg.params["seed"])
    return EXIT_OK if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cumlab",
        description="Cumulant-series toolkit: differences, decompositions, "
                    "certified truncation, local limit reports, graph counts.",
        allow_abbrev=False)   # abbreviation would swallow subcommand flags like --m
    ap.add_argument("--out-dir", default=".", help="directory for reports")
    ap.add_argument("--no-figures", action="store_true",
                    help="skip PNG rendering next to the CSV/JSON output")
    ap.add_argument("--max-lattice", type=int, default=DEFAULT_LATTICE_CAP,
                    help="cap on the outcome lattice size")
    ap.add_argument("--max-states", type=int, default=2_000_000,
                    help="cap on memoized residual states for graph counting")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("delta", help="difference quantities of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--max-size", type=int, default=None,
                   help="largest subset size to tabulate")
    p.add_argument("--with-sup", action="store_true",
                   help="also tabulate the worst-case differences")

    p = sub.add_parser("certify", help="truncated cumulant-series certificate")
    p.add_argument("--model", required=True)
    p.add_argument("--m", type=int, required=True, help="truncation order")
    p.add_argument("--imag-scale", type=float, default=None,
                   help="replace f by i*t*(f - Ef)/sigma with this t")
    p.add_argument("--real-variant", action="store_true",
                   help="use the worst-case-difference hypothesis for real f")

    p = sub.add_parser("edgeworth-triangles",
                       help="corrected local approximation of triangle counts")
    p.add_argument("--n", type=int, required=True, help="number of vertices")
    p.add_argument("--p", type=float, required=True, help="edge probability")
    p.add_argument("--m", type=int, default=2, help="highest correction order")

    p = sub.add_parser("berry-esseen", help="characteristic-function diagnostics")
    p.add_argument("--model", required=True)
    p.add_argument("--w", type=float, required=True, help="decay rate in (0,1)")
    p.add_argument("--tgrid", type=int, default=256, help="grid size")
    p.add_argument("--T", type=float, nargs="*", default=[2.0, 5.0, 10.0],
                   help="smoothing-bound cutoffs")

    p = sub.add_parser("rg", help="labelled regular graph counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, default=MAX_CORRECTION_ORDER,
                   help="asymptotic correction order")
    p.add_argument("--exact-only", action="store_true")

    p = sub.add_parser("selftest", help="run the built-in property suite")
    p.add_argument("--seed", type=int, default=20240901)

    return ap


COMMANDS = {
    "delta": cmd_delta,
    "certify": cmd_certify,
    "edgeworth-triangles": cmd_edgeworth,
    "berry-esseen": cmd_berry_esseen,
    "rg": cmd_rg,
    "selftest": cmd_selftest,
}


def run(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else EXIT_OK
    params = vars(ns).copy()
    cfg = RunConfig(
        subcommand=params.pop("subcommand"),
        out_dir=Path(params.pop("out_dir")),
        figures=not params.pop("no_figures"),
        lattice_cap=params.pop("max_lattice"),
        state_cap=params.pop("max_states"),
        params=params,
    )
    try:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        return COMMANDS[cfg.subcommand](cfg)
    except json.JSONDecodeError as exc:
        print(f"error: malformed model JSON at line {exc.lineno} column {exc.colno}: "
              f"{exc.msg}", file=sys.stderr)
        return EXIT_VALIDATION
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
