"""Command-line front end.

Subcommands: eval | validate | classify | reduce | family | verify |
recover-weight.  Every subcommand accepts an optional key=value config file
(flags override file values).  With --out DIR the full report bundle is
written there: report.json, the CSV tables, and matching PNG figures.

Exit codes: 0 success, 1 validation/evaluation failure, 2 usage error,
3 inconclusive classification.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import figures, report
from .decide import INCONCLUSIVE, DecisionConfig, classify_equality
from .errors import BajlabError, ValidationError
from .families import build_family_pair, canonical_w
from .generator import DEFAULT_SAMPLES, GeneratorPair, OpenInterval, validate_pair
from .mean import bajraktarevic
from .numerics import chebyshev_nodes
from .reduction import recover_weight, reduce_problem, substitution_residual

_CONFIG_KEYS = {
    "f", "g", "h", "k", "domain", "x", "y", "alpha", "w", "grid", "samples",
    "nodes", "v0", "p_v0", "format", "out", "eq_tol", "fit_tol",
}


def load_config(path: str) -> dict:
    """Parses `key = value` lines; '#' starts a comment.

    Values may be quoted (f = "sin(x)") and the domain may use brackets
    (domain = [-1.3, 1.3]).
    """
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
            value = value[1:-1]
        values[key] = value
    return values


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser):
    if not getattr(args, "config", None):
        return
    try:
        values = load_config(args.config)
    except (OSError, ValueError) as err:
        parser.error(str(err))
    for key, text in values.items():
        if getattr(args, key, None) is not None:
            continue  # flags override the file
        if not hasattr(args, key):
            continue
        if key == "domain":
            parts = text.strip("[]").replace(",", " ").split()
            if len(parts) != 2:
                parser.error(f"config domain needs two numbers, got {text!r}")
            setattr(args, key, [float(parts[0]), float(parts[1])])
        elif key in ("x", "y", "alpha", "v0", "p_v0", "eq_tol", "fit_tol"):
            setattr(args, key, float(text))
        elif key in ("grid", "samples", "nodes"):
            setattr(args, key, int(text))
        else:
            setattr(args, key, text)


def _add_pair_args(sub, four: bool):
    sub.add_argument("--f", help="first generator expression")
    sub.add_argument("--g", help="second generator expression")
    if four:
        sub.add_argument("--h", help="first generator of the second pair")
        sub.add_argument("--k", help="second generator of the second pair")
    sub.add_argument("--domain", nargs=2, type=float, metavar=("LO", "HI"),
                     help="open interval endpoints")


def _add_common(sub, formats=("text", "json")):
    sub.add_argument("--config", help="key=value config file; flags override it")
    sub.add_argument("--format", choices=formats, help="stdout payload (default text)")
    sub.add_argument("--out", help="directory for the report bundle "
                                   "(JSON + CSV tables + PNG figures)")
    sub.add_argument("--samples", type=int, help=f"validation/fit nodes (default {DEFAULT_SAMPLES})")


def _add_tolerances(sub):
    sub.add_argument("--eq-tol", dest="eq_tol", type=float,
                     help="equality tolerance base, scaled by 1 + domain width "
                          "(default 1e-9)")
    sub.add_argument("--fit-tol", dest="fit_tol", type=float,
                     help="relative tolerance for all fits (default 1e-7)")


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bajlab",
        description="Evaluate two-variable Bajraktarevic means, decide whether two "
                    "generator pairs induce the same mean, and classify the mechanism.")
    subs = parser.add_subparsers(dest="command", metavar="command")

    p = subs.add_parser("eval", help="evaluate the mean of a pair at (x, y)")
    _add_pair_args(p, four=False)
    p.add_argument("--x", type=float, help="first argument")
    p.add_argument("--y", type=float, help="second argument")
    _add_common(p)

    p = subs.add_parser("validate", help="check g > 0 and the one-signed Wronskian")
    _add_pair_args(p, four=False)
    _add_common(p)

    p = subs.add_parser("classify", help="decide equality of two means and the mechanism")
    _add_pair_args(p, four=True)
    p.add_argument("--grid", type=int, help="grid nodes per axis (default 21)")
    _add_tolerances(p)
    _add_common(p, formats=("text", "json", "csv"))

    p = subs.add_parser("reduce", help="transport the problem to the ratio domain")
    _add_pair_args(p, four=True)
    p.add_argument("--grid", type=int, help="substitution-check grid (default 15)")
    p.add_argument("--nodes", type=int, help="table nodes for the CSVs (default 101)")
    _add_common(p, formats=("text", "json", "csv"))

    p = subs.add_parser("family", help="build the (s_alpha o w, c_alpha o w) pair")
    p.add_argument("--alpha", type=float, help="family parameter")
    p.add_argument("--w", help="inner monotone expression")
    p.add_argument("--domain", nargs=2, type=float, metavar=("LO", "HI"))
    _add_common(p, formats=("text", "json", "csv"))

    p = subs.add_parser("verify", help="per-assertion evidence map for an equal pair of means")
    _add_pair_args(p, four=True)
    p.add_argument("--grid", type=int, help="grid nodes per axis (default 21)")
    _add_tolerances(p)
    _add_common(p)

    p = subs.add_parser("recover-weight",
                        help="recover the weight function from mean values")
    _add_pair_args(p, four=True)
    p.add_argument("--v0", type=float, help="base point in the ratio domain "
                                            "(default: core midpoint)")
    p.add_argument("--p-v0", dest="p_v0", type=float,
                   help="weight normalization at v0 (default: transported value)")
    p.add_argument("--nodes", type=int, help="probe nodes (default 101)")
    _add_common(p, formats=("text", "json", "csv"))

    return parser


def _require(parser, args, names):
    missing = [n for n in names if getattr(args, n.replace("-", "_"), None) is None]
    if missing:
        parser.error("missing required arguments: " + ", ".join("--" + n for n in missing))


def _domain(args) -> OpenInterval:
    lo, hi = args.domain
    return OpenInterval(float(lo), float(hi))


def _build_pair(f, g, domain, samples) -> GeneratorPair:
    pair = GeneratorPair.from_expressions(f, g, domain)
    pair.require_valid(samples)
    return pair


def _emit(args, text_lines: list[str], doc: dict, csv_payload: str | None = None):
    fmt = args.format or "text"
    if fmt == "json":
        sys.stdout.write(report.json_dumps(doc))
    elif fmt == "csv" and csv_payload is not None:
        sys.stdout.write(csv_payload)
    else:
        print("\n".join(text_lines))


def _bundle_dir(args) -> Path | None:
    return Path(args.out) if args.out else None


def _write_report(out: Path, doc: dict):
    report.write_text(out / "report.json", report.json_dumps(doc))


# -- subcommand handlers ------------------------------------------------------


def _cmd_eval(parser, args) -> int:
    _require(parser, args, ["f", "g", "domain", "x", "y"])
    domain = _domain(args)
    samples = args.samples or DEFAULT_SAMPLES
    pair = _build_pair(args.f, args.g, domain, samples)
    a, b = domain.core()
    for name in ("x", "y"):
        v = getattr(args, name)
        if not a <= v <= b:
            raise BajlabError(f"--{name}={v} outside the core subinterval [{a:.6g}, {b:.6g}]")
    m = float(bajraktarevic(pair, args.x, args.y))
    doc = {"kind": "eval", "inputs": {**report.pair_inputs(pair), "x": args.x, "y": args.y},
           "mean": m}
    _emit(args, [report.format_float(m)], doc)
    out = _bundle_dir(args)
    if out:
        _write_report(out, doc)
    return 0


def _cmd_validate(parser, args) -> int:
    _require(parser, args, ["f", "g", "domain"])
    pair = GeneratorPair.from_expressions(args.f, args.g, _domain(args))
    rep = validate_pair(pair, args.samples or DEFAULT_SAMPLES)
    doc = {"kind": "validate", "inputs": report.pair_inputs(pair),
           "report": report.validation_json(rep)}
    lines = [
        f"ok: {str(rep.ok).lower()}",
        f"min g: {report.format_float(rep.min_g)}",
        f"min |W|: {report.format_float(rep.min_abs_wronskian)}",
        f"Wronskian sign: {rep.wronskian_sign:+d}",
        f"samples: {rep.samples_used}",
    ]
    _emit(args, lines, doc)
    out = _bundle_dir(args)
    if out:
        _write_report(out, doc)
    return 0 if rep.ok else 1


def _classify_pairs(parser, args):
    _require(parser, args, ["f", "g", "h", "k", "domain"])
    domain = _domain(args)
    samples = args.samples or DEFAULT_SAMPLES
    pair_a = _build_pair(args.f, args.g, domain, samples)
    pair_b = _build_pair(args.h, args.k, domain, samples)
    overrides = {}
    if getattr(args, "eq_tol", None) is not None:
        overrides["equality_tol_base"] = args.eq_tol
    if getattr(args, "fit_tol", None) is not None:
        overrides["fit_tolerance"] = args.fit_tol
        overrides["constancy_tolerance"] = args.fit_tol
    config = DecisionConfig(grid=args.grid or 21, samples=samples, **overrides)
    return pair_a, pair_b, config


def _classification_text(cls) -> list[str]:
    lines = [f"tag: {cls.tag}",
             f"max deviation: {report.format_float(cls.verdict.max_deviation)} "
             f"(tolerance {report.format_float(cls.verdict.tolerance)}, "
             f"grid {cls.verdict.grid_size}x{cls.verdict.grid_size})"]
    if cls.witness is not None:
        w = cls.witness
        status = "ok" if w.ok else f"failed (residual {w.residual:.3g})"
        lines.append(f"equivalence witness: {status}")
        if w.ok:
            lines.append(f"  (a, b, c, d) = ({report.format_float(w.a)}, {report.format_float(w.b)}, "
                         f"{report.format_float(w.c)}, {report.format_float(w.d)})")
    if cls.gamma is not None and cls.gamma.ok:
        lines.append(f"gamma: {report.format_float(cls.gamma.value)}")
    if cls.evidence:
        marks = ", ".join(f"{k}:{'pass' if cls.evidence[k]['passed'] else 'fail'}"
                          for k in ("ii", "iii", "iv", "v", "vi", "vii"))
        lines.append(f"assertions: {marks}")
    return lines


def _grid_table(pair_a, pair_b, grid):
    a, b = pair_a.domain.core()
    nodes = chebyshev_nodes(a, b, grid)
    X, Y = np.meshgrid(nodes, nodes, indexing="ij")
    x, y = X.ravel(), Y.ravel()
    ma = np.asarray(bajraktarevic(pair_a, x, y))
    mb = np.asarray(bajraktarevic(pair_b, x, y))
    return nodes, x, y, ma, mb


def _cmd_classify(parser, args) -> int:
    pair_a, pair_b, config = _classify_pairs(parser, args)
    cls = classify_equality(pair_a, pair_b, config)
    doc = {
        "kind": "classify",
        "inputs": {"f": pair_a.f.source, "g": pair_a.g.source,
                   "h": pair_b.f.source, "k": pair_b.g.source,
                   "domain": [pair_a.domain.lo, pair_a.domain.hi]},
        "grid": config.grid,
        "samples": config.samples,
        "classification": report.classification_json(cls),
    }
    out = _bundle_dir(args)
    csv_payload = None
    if out or args.format == "csv":
        nodes, x, y, ma, mb = _grid_table(pair_a, pair_b, config.grid)
        csv_payload = report.grid_csv(x, y, ma, mb)
    _emit(args, _classification_text(cls), doc, csv_payload)
    if out:
        _write_report(out, doc)
        report.write_text(out / "grid.csv", csv_payload)
        diff = (ma - mb).reshape(len(nodes), len(nodes))
        figures.deviation_heatmap(out / "deviation.png", nodes, diff,
                                  pair_a.describe(), pair_b.describe())
        if cls.w_table is not None:
            report.write_text(out / "canonical_w.csv",
                              report.table_csv(cls.w_table.xs, cls.w_table.values))
            figures.curve(out / "canonical_w.png", cls.w_table.xs, cls.w_table.values,
                          "w", "integrated Wronskian generator")
    return 3 if cls.tag == INCONCLUSIVE else 0


def _cmd_reduce(parser, args) -> int:
    _require(parser, args, ["f", "g", "h", "k", "domain"])
    domain = _domain(args)
    samples = args.samples or DEFAULT_SAMPLES
    pair_fg = _build_pair(args.f, args.g, domain, samples)
    pair_hk = _build_pair(args.h, args.k, domain, samples)
    reduced = reduce_problem(pair_fg, pair_hk, samples)
    grid = args.grid or 15
    res_qp, res_ps = substitution_residual(pair_fg, pair_hk, reduced, grid)
    n_nodes = args.nodes or 101
    a, b = reduced.J.core()
    us = chebyshev_nodes(a, b, n_nodes)
    columns = {name: np.asarray(fn.value(us))
               for name, fn in (("p", reduced.p), ("q", reduced.q),
                                ("phi", reduced.phi), ("psi", reduced.psi))}
    doc = {
        "kind": "reduce",
        "inputs": {"f": pair_fg.f.source, "g": pair_fg.g.source,
                   "h": pair_hk.f.source, "k": pair_hk.g.source,
                   "domain": [domain.lo, domain.hi]},
        "j": [reduced.J.lo, reduced.J.hi],
        "nodes": n_nodes,
        "substitution_residuals": {"qp": res_qp, "phipsi": res_ps,
                                   "grid": grid},
        "validation": {
            "qp": report.validation_json(validate_pair(reduced.pair_qp, samples)),
            "phipsi": report.validation_json(validate_pair(reduced.pair_phipsi, samples)),
        },
    }
    lines = [
        f"J: ({report.format_float(reduced.J.lo)}, {report.format_float(reduced.J.hi)})",
        f"substitution residual (q,p): {res_qp:.3e}",
        f"substitution residual (phi,psi): {res_ps:.3e}",
        f"tables: {n_nodes} nodes",
    ]
    csv_payload = report.wide_csv(["x", "p", "q", "phi", "psi"],
                                  [us, columns["p"], columns["q"],
                                   columns["phi"], columns["psi"]])
    _emit(args, lines, doc, csv_payload)
    out = _bundle_dir(args)
    if out:
        _write_report(out, doc)
        for name in ("p", "q", "phi", "psi"):
            report.write_text(out / f"{name}.csv", report.table_csv(us, columns[name]))
        figures.curve_panels(out / "reduced_functions.png", us, columns,
                             "transported functions on J")
    return 0


def _cmd_family(parser, args) -> int:
    _require(parser, args, ["alpha", "w", "domain"])
    domain = _domain(args)
    samples = args.samples or DEFAULT_SAMPLES
    pair = build_family_pair(args.alpha, args.w, domain, samples)
    w_table = canonical_w(pair)
    doc = {
        "kind": "family",
        "inputs": {"alpha": args.alpha, "w": args.w,
                   "domain": [domain.lo, domain.hi]},
        "f": pair.f.source,
        "g": pair.g.source,
        "validation": report.validation_json(validate_pair(pair, samples)),
        "w_nodes": int(len(w_table.xs)),
    }
    lines = [f"f = {pair.f.source}", f"g = {pair.g.source}",
             f"w table: {len(w_table.xs)} nodes on the core subinterval"]
    csv_payload = report.table_csv(w_table.xs, w_table.values)
    _emit(args, lines, doc, csv_payload)
    out = _bundle_dir(args)
    if out:
        _write_report(out, doc)
        report.write_text(out / "w.csv", csv_payload)
        xs = w_table.xs
        figures.overlay(out / "family_pair.png", xs,
                        {"f": np.asarray(pair.f.value(xs)),
                         "g": np.asarray(pair.g.value(xs))},
                        "x", f"family pair (alpha={args.alpha:g})")
        figures.curve(out / "family_w.png", xs, w_table.values, "w",
                      "integrated Wronskian generator")
    return 0


def _cmd_verify(parser, args) -> int:
    pair_a, pair_b, config = _classify_pairs(parser, args)
    cls = classify_equality(pair_a, pair_b, config)
    doc = {
        "kind": "verify",
        "inputs": {"f": pair_a.f.source, "g": pair_a.g.source,
                   "h": pair_b.f.source, "k": pair_b.g.source,
                   "domain": [pair_a.domain.lo, pair_a.domain.hi]},
        "tag": cls.tag,
        "evidence": report.evidence_json(cls.evidence),
    }
    lines = [f"tag: {cls.tag}"]
    if cls.evidence:
        for key in ("ii", "iii", "iv", "v", "vi", "vii"):
            entry = cls.evidence[key]
            lines.append(f"assertion {key}: {'pass' if entry['passed'] else 'fail'}")
    else:
        lines.append("means differ on the grid; no mechanism to verify")
    _emit(args, lines, doc)
    out = _bundle_dir(args)
    if out:
        _write_report(out, doc)
    return 3 if cls.tag == INCONCLUSIVE else 0


def _cmd_recover_weight(parser, args) -> int:
    _require(parser, args, ["f", "g", "h", "k", "domain"])
    domain = _domain(args)
    samples = args.samples or DEFAULT_SAMPLES
    pair_fg = _build_pair(args.f, args.g, domain, samples)
    pair_hk = _build_pair(args.h, args.k, domain, samples)
    reduced = reduce_problem(pair_fg, pair_hk, samples)
    a, b = reduced.J.core()
    v0 = args.v0 if args.v0 is not None else 0.5 * (a + b)
    if not a <= v0 <= b:
        raise BajlabError(f"--v0={v0} outside the core of J = [{a:.6g}, {b:.6g}]")
    p_v0 = args.p_v0 if args.p_v0 is not None else float(reduced.p.value(np.array([v0]))[0])
    n_nodes = args.nodes or 101

    def oracle(u, v):
        return float(bajraktarevic(reduced.pair_phipsi, u, v))

    us_all = chebyshev_nodes(a, b, n_nodes)
    keep = np.abs(us_all - v0) > 1e-9 * (b - a)
    us = us_all[keep]
    ps = np.array([recover_weight(oracle, v0, p_v0, float(u)) for u in us])
    doc = {
        "kind": "recover_weight",
        "inputs": {"f": pair_fg.f.source, "g": pair_fg.g.source,
                   "h": pair_hk.f.source, "k": pair_hk.g.source,
                   "domain": [domain.lo, domain.hi]},
        "j": [reduced.J.lo, reduced.J.hi],
        "v0": v0,
        "p_v0": p_v0,
        "nodes": int(len(us)),
    }
    lines = [f"J: ({report.format_float(reduced.J.lo)}, {report.format_float(reduced.J.hi)})",
             f"v0 = {report.format_float(v0)}, p(v0) = {report.format_float(p_v0)}",
             f"recovered weight at {len(us)} nodes"]
    csv_payload = report.table_csv(us, ps)
    _emit(args, lines, doc, csv_payload)
    out = _bundle_dir(args)
    if out:
        _write_report(out, doc)
        report.write_text(out / "recovered_weight.csv", csv_payload)
        figures.overlay(out / "recovered_weight.png", us,
                        {"recovered": ps,
                         "transported": np.asarray(reduced.p.value(us))},
                        "u", "weight recovery from mean values")
    return 0


_HANDLERS = {
    "eval": _cmd_eval,
    "validate": _cmd_validate,
    "classify": _cmd_classify,
    "reduce": _cmd_reduce,
    "family": _cmd_family,
    "verify": _cmd_verify,
    "recover-weight": _cmd_recover_weight,
}


def run_command(argv: list[str]) -> int:
    """Runs one subcommand; returns the process exit code."""
    parser = create_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    _apply_config(args, parser)
    if getattr(args, "grid", None) is not None and args.grid < 5:
        parser.error("--grid must be at least 5")
    if getattr(args, "samples", None) is not None and args.samples < 8:
        parser.error("--samples must be at least 8")
    for name in ("eq_tol", "fit_tol"):
        value = getattr(args, name, None)
        if value is not None and value <= 0:
            parser.error(f"--{name.replace('_', '-')} must be positive")
    try:
        return _HANDLERS[args.command](parser, args)
    except ValidationError as err:
        print(f"validation failure: {err}", file=sys.stderr)
        return 1
    except BajlabError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
