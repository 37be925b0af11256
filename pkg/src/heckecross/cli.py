"""``hx``: batch commands over scenario files.

    hx <command> <scenario.json> [--out DIR] [--format csv|json] [--tolerance 1e-9]

Tables go to stdout unless ``--out`` is given; reports always print a short
human-readable summary and write the full report when ``--out`` is given.
Exit status is 0 iff every check passed, 1 if a check or validation failed
and 2 for unusable input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import crossed as cx
from . import reps
from .bundles import h_good_conditions
from .errors import AxiomError, HxError, SchemaError
from .hecke import hecke_structure_table
from .identities import all_middles, run_all
from .scalars import GaussQ, format_gauss, format_rational
from .scenario import STAGES, Scenario, _group, _groupoid, from_spec, load_spec

COMMANDS = ("hecke-table", "check-action", "crossed-table", "verify-identities", "product-oracle", "reps-check")
TABLES = {"hecke-table", "crossed-table"}


def threads() -> int:
    raw = os.environ.get("HX_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        return max(1, int(raw))
    except ValueError:
        raise SchemaError(f"HX_THREADS must be an integer, got {raw!r}", witness=raw) from None


def ordered_map(fn: Callable, items: Sequence) -> list:
    """``map`` over a thread pool capped by HX_THREADS; results keep input order."""
    n = min(threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def fmt(z) -> str:
    if isinstance(z, GaussQ):
        return format_gauss(z)
    if isinstance(z, Fraction):
        return format_rational(z)
    if isinstance(z, (float, np.floating)):
        return repr(float(z))
    return str(z)


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (GaussQ, Fraction)):
        return fmt(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(c) for c in r])
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, ensure_ascii=False) + "\n"


class Output:
    """A command result: a table (header + rows) and/or a report dict, plus pass/fail."""

    def __init__(self, ok: bool, header=None, rows=None, report=None, summary: str = ""):
        self.ok = ok
        self.header = header
        self.rows = rows or []
        self.report = report
        self.summary = summary

    def render(self, form: str) -> str:
        if form == "csv":
            return to_csv(self.header, self.rows)
        if self.report is not None:
            return to_json(self.report)
        return to_json([dict(zip(self.header, r)) for r in self.rows])


# -- labels -----------------------------------------------------------------


def dc_label(S: cx.CrossedSystem, g: int) -> str:
    return f"Γ{S.G.label(g)}Γ"


def basis_label(S: cx.CrossedSystem, k: int) -> str:
    g, x, i, j = S.basis()[k]
    return f"{S.G.label(g)}|{S.groupoid.labels[x]}|{i},{j}"


def middle_label(S: cx.CrossedSystem, mid) -> str:
    X = S.groupoid
    if isinstance(mid, int):
        return f"1[{X.labels[mid]}]"
    a, x = mid
    i, j = next((i, j) for i, row in enumerate(a.data) for j, c in enumerate(row) if c)
    return f"E{i},{j}[{X.labels[x]}]"


def hecke_expr(S: cx.CrossedSystem, coeffs: dict) -> str:
    terms = [f"{fmt(c)}*{dc_label(S, g)}" for g, c in sorted(coeffs.items()) if c]
    return " + ".join(terms) if terms else "0"


# -- commands ---------------------------------------------------------------


def cmd_hecke_table(sc: Scenario, args) -> Output:
    S = sc.system
    P = S.pair
    table = hecke_structure_table(P)
    rows = []
    for (g, s), h in table.items():
        rows.append((dc_label(S, g), dc_label(S, s), hecke_expr(S, h.coeffs)))
    report = {
        "double_cosets": [
            {"rep": S.G.label(g), "L": P.L(g), "R": P.R(g), "delta": P.delta(g)} for g in P.dc_reps
        ],
        "products": [{"left": a, "right": b, "product": c} for a, b, c in rows],
    }
    return Output(True, ("left", "right", "product"), rows, report)


def _stage_rows(results: list[tuple[str, str, object]]) -> list[tuple]:
    return [(stage, status, "" if w is None else json.dumps(jsonable(w))) for stage, status, w in results]


def _stage_dicts(results) -> list[dict]:
    return [{"stage": stage, "status": status, "witness": w} for stage, status, w in results]


def label_witness(spec: dict, exc: AxiomError) -> dict | None:
    """Name the arrows/units and group elements of a goodness or intersection witness."""
    if exc.stage not in ("gamma_good", "gamma_intersection") or not exc.witness:
        return None
    G = _group(spec["group"])
    X = _groupoid(spec["groupoid"], G)
    w = exc.witness
    if exc.stage == "gamma_intersection":
        return {"unit": X.labels[w[0]], "g": G.label(w[1])}
    out = {"arrow": X.labels[w[0]], "h": G.label(w[1])}
    if len(w) > 2:
        out["entry"] = list(w[2])
    return out


def cmd_check_action(sc: Scenario | None, args, error: AxiomError | None = None) -> Output:
    if error is not None:
        failed = STAGES.index(error.stage)
        results = [(s, "pass", None) for s in STAGES[:failed]]
        results.append((error.stage, "FAIL", error.witness))
        results.extend((s, "skipped", None) for s in STAGES[failed + 1:])
        summary = f"{error.stage}: FAIL\n  {error}\n  witness: {json.dumps(jsonable(error.witness))}"
        labelled = getattr(error, "labelled_witness", None)
        if labelled:
            summary += f"\n  witness (labels): {labelled}"
        report = {
            "ok": False,
            "stage": error.stage,
            "message": str(error),
            "witness": error.witness,
            "witness_labels": labelled,
            "stages": _stage_dicts(results),
        }
        return Output(False, ("stage", "status", "witness"), _stage_rows(results), report, summary)
    S = sc.system
    results = [(s, "pass", None) for s in STAGES]
    conds = h_good_conditions(S.action, S.gamma)
    ok = all(conds.values())
    report = {
        "ok": ok,
        "stages": _stage_dicts(results),
        "goodness_conditions": conds,
        "free_on_units": S.free,
        "orbits": len(S.base.reps),
        "crossed_dimension": S.dim,
    }
    lines = [f"{s}: pass" for s in STAGES]
    lines.append("goodness conditions: " + ", ".join(f"{k}={'pass' if v else 'FAIL'}" for k, v in conds.items()))
    return Output(ok, ("stage", "status", "witness"), _stage_rows(results), report, "\n".join(lines))


def cmd_crossed_table(sc: Scenario, args) -> Output:
    S = sc.system
    basis = [cx.basis_element(S, k) for k in range(S.dim)]

    def row_block(k):
        return [(k, l, m, c) for l, bl in enumerate(basis) for m, c in sorted((basis[k] * bl).coords().items())]

    blocks = ordered_map(row_block, list(range(S.dim)))
    rows = [
        (basis_label(S, k), basis_label(S, l), basis_label(S, m), c) for block in blocks for (k, l, m, c) in block
    ]
    report = {
        "basis": [basis_label(S, k) for k in range(S.dim)],
        "products": [{"left": a, "right": b, "term": t, "coefficient": c} for a, b, t, c in rows],
    }
    return Output(True, ("left", "right", "term", "coefficient"), rows, report)


def cmd_verify(sc: Scenario, args) -> Output:
    S = sc.system
    S.basis()
    S.base
    checks = run_all(S, parallel=ordered_map)
    rows = [(c.suite, c.name, "pass" if c.ok else "FAIL", c.detail) for c in checks]
    ok = all(c.ok for c in checks)
    width = max(len(f"{c.suite}: {c.name}") for c in checks)
    lines = [f"{(c.suite + ': ' + c.name).ljust(width)}  {'pass' if c.ok else 'FAIL'}" + (f"  {c.detail}" if c.detail else "") for c in checks]
    passed = sum(c.ok for c in checks)
    lines.append(f"{passed}/{len(checks)} checks passed")
    report = {"ok": ok, "checks": [dict(zip(("suite", "check", "status", "detail"), r)) for r in rows]}
    return Output(ok, ("suite", "check", "status", "detail"), rows, report, "\n".join(lines))


def cmd_product_oracle(sc: Scenario, args) -> Output:
    S = sc.system
    P = S.pair
    S.basis()
    S.base
    mids = all_middles(S)
    jobs = [(g, s) for g in P.dc_reps for s in P.dc_reps]

    def one(job):
        g, s = job
        out = []
        for mid in mids:
            formula = cx.triple_product(S, g, mid, s)
            diff = (formula - cx.triple_product_by_conv(S, g, mid, s)).coords()
            out.append((dc_label(S, g), middle_label(S, mid), dc_label(S, s), len(formula.coords()), diff))
        return out

    rows, bad = [], []
    for block in ordered_map(one, jobs):
        for g, m, s, nnz, diff in block:
            rows.append((g, m, s, nnz, "pass" if not diff else "FAIL", len(diff)))
            if diff:
                bad.append({"g": g, "middle": m, "s": s, "diff": {basis_label(S, k): c for k, c in sorted(diff.items())}})
    ok = not bad
    summary = f"{len(rows) - len(bad)}/{len(rows)} triple products match the convolution" + (" (free form)" if S.free else "")
    if bad:
        summary += "\n" + "\n".join(f"  FAIL {b['g']} * {b['middle']} * {b['s']}: {b['diff']}" for b in bad[:10])
    report = {"ok": ok, "method": "free" if S.free else "third", "compared": len(rows), "mismatches": bad}
    return Output(ok, ("g", "middle", "s", "terms", "status", "diff_entries"), rows, report, summary)


def _pick_representation(sc: Scenario) -> str:
    if sc.representation:
        return sc.representation
    S = sc.system
    if reps.section_algebra(S).dim == 1:
        return "point"
    if all(len(S.pair.gamma_g(g)) == len(S.gamma) for g in S.G.elements):
        return "invariant_sections"
    return "regular"


def cmd_reps_check(sc: Scenario, args) -> Output:
    S = sc.system
    tol = args.tolerance
    kind = _pick_representation(sc)
    if kind == "point":
        pair = reps.point_pair(S)
    elif kind == "invariant_sections":
        pair = reps.invariant_section_pair(S)
    else:
        pair = reps.restrict_rep(S, reps.crossed_regular_rep(S), tol)
    cov = reps.check_covariant(pair, tol)
    first, second = reps.strange_identity_residuals(pair)
    measures = {
        "hecke_rep_residual": reps.hecke_rep_residual(S.pair, pair.mu),
        "pi_residual": pair.pi.homomorphism_residual(),
        "covariance_residual": cov.max_residual,
        "free_form_gap": cov.free_form_gap,
        "extra_identity_first": first,
        "extra_identity_second": second,
        "unit_span_gap": reps.unit_span_gap(pair, tol),
    }
    if cov.ok:
        # covariance was measured above; the residuals below replace the built-in checks
        Phi = reps.integrated_form(pair, tol, check=False)
        back = reps.restrict_rep(S, Phi, tol)
        measures["integrated_residual"] = Phi.homomorphism_residual()
        measures["restrict_after_integrate"] = reps.pair_distance(pair, back)
        measures["integrate_after_restrict"] = reps.rep_distance(Phi, reps.integrated_form(back, tol, check=False))
    rows = [(k, v, "pass" if v is None or v <= tol else "FAIL") for k, v in measures.items()]
    ok = cov.ok and all(r[2] == "pass" for r in rows)
    lines = [f"representation: {kind} (space dimension {pair.W.shape[1]})"]
    lines += [f"{k}: {'n/a' if v is None else f'{v:.3g}'}  {st}" for k, v, st in rows]
    if not cov.ok and cov.failing:
        lines.append(f"covariance fails at (g, s, x, (i, j)) = {cov.failing[0]}")
    report = {
        "ok": ok,
        "representation": kind,
        "tolerance": tol,
        "space_dimension": int(pair.W.shape[1]),
        "measures": measures,
        "failing": cov.failing[:20],
    }
    return Output(ok, ("measure", "value", "status"), rows, report, "\n".join(lines))


HANDLERS = {
    "hecke-table": cmd_hecke_table,
    "check-action": cmd_check_action,
    "crossed-table": cmd_crossed_table,
    "verify-identities": cmd_verify,
    "product-oracle": cmd_product_oracle,
    "reps-check": cmd_reps_check,
}


def run_command(cmd: str, path: str, out: str | None = None, form: str | None = None, tolerance: float = reps.TAU, stdout=None) -> int:
    """Run one command on one scenario file; returns the exit status."""
    stdout = stdout or sys.stdout
    args = argparse.Namespace(tolerance=tolerance)
    spec = load_spec(path)
    name = spec.get("name", Path(path).stem)
    try:
        sc = from_spec(spec, name=name)
    except AxiomError as exc:
        exc.labelled_witness = label_witness(spec, exc)
        if cmd != "check-action":
            print(f"{name}: validation failed at stage {exc.stage}: {exc}", file=stdout)
            print(f"  witness: {json.dumps(jsonable(exc.witness))}", file=stdout)
            if exc.labelled_witness:
                print(f"  witness (labels): {exc.labelled_witness}", file=stdout)
            return 1
        result = cmd_check_action(None, args, error=exc)
    else:
        result = HANDLERS[cmd](sc, args)
    form = form or ("csv" if cmd in TABLES else "json")
    text = result.render(form)
    if out:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        target = d / f"{name}.{cmd}.{form}"
        target.write_text(text, encoding="utf-8")
        if result.summary:
            print(result.summary, file=stdout)
        print(f"wrote {target}", file=stdout)
    elif cmd in TABLES:
        stdout.write(text)
    else:
        print(result.summary, file=stdout)
    return 0 if result.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hx", description="Hecke-pair crossed products over finite groupoids.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("scenario", help="scenario JSON file (bundled fixtures are found by file name)")
    p.add_argument("--out", metavar="DIR", help="write the table or report into DIR")
    p.add_argument("--format", choices=("csv", "json"), help="csv for tables and json for reports by default")
    p.add_argument("--tolerance", type=float, default=reps.TAU, help="numeric tolerance for representation checks")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run_command(args.command, args.scenario, args.out, args.format, args.tolerance)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.witness is not None:
            print(f"  witness: {json.dumps(jsonable(exc.witness))}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
