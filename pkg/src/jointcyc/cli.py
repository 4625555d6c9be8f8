"""Command-line front end: ``jointcyc <command> --job job.json --out dir``.

Exit status: 0 on success, 2 when a verdict is Uncertain (or a scan point is
Inconclusive), 1 on errors.  Error messages start with ``error[CODE]``.
Job and output formats are described in docs/formats.md.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .ideal import IllConditioned as VarietyIllConditioned
from .poly import (GaussianRational, MultiPolynomial, ParseError, deserialize, evaluate, parse,
                   serialize)
from .spaces import (DirichletType, Hardy, NotSymbolic, Unsupported, WeightedHvn, is_cyclic,
                     is_jointly_cyclic, maximal_domain)

EXIT_OK, EXIT_ERROR, EXIT_UNCERTAIN = 0, 1, 2
COMMANDS = ("check-cyclic", "scan-maxdomain", "gram-dump", "catalog-info")

# FLINT precision is process-global: numeric jobs of a batch run one at a time
# (the points of a single scan still run on the worker threads).
_NUMERIC_LOCK = threading.Lock()


class JobError(Exception):
    """A failure with a stable error code."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code

    def __str__(self):
        return f"error[{self.code}]: {self.args[0]}"


# ---------------------------------------------------------------------------
# job decoding


def space_from_json(obj: Dict[str, Any]):
    try:
        kind = obj["type"]
        if kind == "hardy":
            p = obj.get("p", 2)
            return Hardy(math.inf if p in ("inf", "infinity") else float(p), int(obj["d"]))
        if kind == "dirichlet":
            return DirichletType(Fraction(str(obj["t"])), int(obj["d"]))
        if kind == "weighted_hvn":
            from .numeric.weights import weight_from_json
            return WeightedHvn(weight_from_json(obj["weight"]), int(obj.get("n", 0)), int(obj.get("d", 1)))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise JobError("E_MALFORMED_JOB", f"bad space description {obj!r}: {exc}") from exc
    raise JobError("E_MALFORMED_JOB", f"unknown space type {obj.get('type')!r}")


def _polys(texts: Sequence[str], dim: int) -> List[MultiPolynomial]:
    out = []
    for t in texts:
        try:
            out.append(parse(t, dim) if isinstance(t, str) else deserialize(t, dim))
        except ParseError as exc:
            raise JobError("E_PARSE", f"cannot parse {t!r}: {exc}") from exc
        except ValueError as exc:
            raise JobError("E_PARSE", f"cannot read {t!r}: {exc}") from exc
    return out


def _dump(path: str, obj) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
    except OSError as exc:
        raise JobError("E_IO", f"cannot write {path}: {exc}") from exc


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise JobError("E_IO", f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# commands; each returns (exit status, summary object)


def cmd_check_cyclic(job, out_dir, threads, precision):
    space = space_from_json(job.get("space") or {})
    if isinstance(space, WeightedHvn):
        raise JobError("E_UNSUPPORTED", "check-cyclic needs a Hardy or Dirichlet-type space")
    texts = job.get("family")
    single = job.get("polynomial")
    if (texts is None) == (single is None):
        raise JobError("E_MALFORMED_JOB", "give exactly one of 'family' or 'polynomial'")
    polys = _polys(texts if texts is not None else [single], space.d)
    try:
        if single is not None:
            verdict = is_cyclic(space, polys[0])
        else:
            verdict = is_jointly_cyclic(space, polys, job.get("options"))
    except Unsupported as exc:
        raise JobError("E_UNSUPPORTED", str(exc)) from exc
    except VarietyIllConditioned as exc:
        raise JobError("E_NUMERIC", str(exc)) from exc
    except ValueError as exc:
        raise JobError("E_MALFORMED_JOB", str(exc)) from exc
    record = {"command": "check-cyclic", "space": job["space"], "kind": "single" if single is not None else "family",
              "input": [serialize(p) for p in polys], "verdict": verdict.to_json()}
    _dump(os.path.join(out_dir, "verdict.json"), record)
    print(f"{space.label()}: {verdict.status}")
    return (EXIT_UNCERTAIN if verdict.status == "Uncertain" else EXIT_OK), record


def _numeric_space(job):
    from .numeric.gram import WeightedSpace
    from .numeric.weights import NonDisjoint, weight_from_json
    try:
        w = weight_from_json(job["weight"])
        return WeightedSpace(w, int(job.get("n", 0)))
    except NonDisjoint as exc:
        raise JobError("E_UNSUPPORTED", str(exc)) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise JobError("E_MALFORMED_JOB", f"bad weight: {exc}") from exc


def _grid(job, precision):
    from .numeric.quadrature import QuadratureGrid
    digits = precision or int(job.get("precision", 70))
    if digits < 20:
        raise JobError("E_MALFORMED_JOB", "precision must be at least 20 digits")
    return QuadratureGrid(digits=digits)


def _truncation_bound(job) -> float:
    """Sum of the series coefficients that a truncated auto-coefficient weight leaves out."""
    wj = job.get("weight", {})
    if wj.get("type") != "series_auto" or wj.get("truncation") is None:
        return 0.0
    from .numeric.weights import weight_from_json
    full = weight_from_json(dict(wj, truncation=None))
    return float(sum(full.coefficients[int(wj["truncation"]):]))


def cmd_scan(job, out_dir, threads, precision):
    from .numeric.diagnostics import INCONCLUSIVE, SLOPE_HI, SLOPE_LO, boundary_grid, scan
    from .numeric.gram import PrecisionLoss
    space = _numeric_space(job)
    grid = _grid(job, precision)
    if "points" in job:
        pts = [complex(float(p[0]), float(p[1])) for p in job["points"]]
    elif "grid" in job:
        pts = boundary_grid(int(job["grid"]))
    else:
        raise JobError("E_MALFORMED_JOB", "scan job needs 'points' or 'grid'")
    th = job.get("thresholds", {})
    try:
        res = scan(space, pts, job.get("N_schedule", (10, 20, 30, 40, 50, 60)), grid,
                   float(th.get("slope_lo", SLOPE_LO)), float(th.get("slope_hi", SLOPE_HI)), threads)
    except PrecisionLoss as exc:
        raise JobError("E_NUMERIC", str(exc)) from exc
    except ValueError as exc:
        raise JobError("E_MALFORMED_JOB", str(exc)) from exc
    summary = res.summary()
    summary["series_truncation_bound"] = _truncation_bound(job)
    summary["precision_digits"] = grid.digits
    summary["command"] = "scan-maxdomain"
    _write_text(os.path.join(out_dir, "scan.csv"), res.csv_text())
    _dump(os.path.join(out_dir, "summary.json"), summary)
    for p in summary["points"]:
        print(f"w = {p['w'][0]:+.6f}{p['w'][1]:+.6f}i  lambda: {p['lambda']}  delta: {p['delta']}")
    incon = any(p["lambda"] == INCONCLUSIVE for p in summary["points"])
    return (EXIT_UNCERTAIN if incon else EXIT_OK), summary


def cmd_gram(job, out_dir, threads, precision):
    from .numeric.gram import PrecisionLoss, gram_matrix
    from .numeric.quadrature import working_precision
    space = _numeric_space(job)
    grid = _grid(job, precision)
    try:
        N = int(job["N"])
        gm = gram_matrix(space, N, grid)
    except PrecisionLoss as exc:
        raise JobError("E_NUMERIC", str(exc)) from exc
    except (KeyError, ValueError) as exc:
        raise JobError("E_MALFORMED_JOB", f"gram-dump needs a nonnegative 'N': {exc}") from exc
    with working_precision(grid.bits):
        entries = [[[x.real.mid().str(grid.digits, radius=False), x.imag.mid().str(grid.digits, radius=False)]
                    for x in row] for row in gm.entries]
    record = {"command": "gram-dump", "N": N, "n": space.n, "weight": space.weight.to_json(),
              "precision_digits": grid.digits, "hermitian": gm.hermitian,
              "condition_estimate": gm.condition_estimate(), "grid": grid.to_json(), "entries": entries}
    _dump(os.path.join(out_dir, "gram.json"), record)
    print(f"Gram matrix N = {N}, n = {space.n}, condition estimate {gm.condition_estimate():.6g}")
    return EXIT_OK, {"condition_estimate": gm.condition_estimate()}


def cmd_catalog(job, out_dir, threads, precision):
    space = space_from_json(job.get("space") or {})
    try:
        dom = maximal_domain(space)
    except NotSymbolic as exc:
        raise JobError("E_NOT_SYMBOLIC", str(exc)) from exc
    record = {"command": "catalog-info", "space": space.label(), "maximal_domain": dom.to_json()}
    _dump(os.path.join(out_dir, "catalog.json"), record)
    print(dom.kind)
    return EXIT_OK, record


HANDLERS = {"check-cyclic": cmd_check_cyclic, "scan-maxdomain": cmd_scan,
            "gram-dump": cmd_gram, "catalog-info": cmd_catalog}


def load_job(path: str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise JobError("E_IO", f"cannot read job {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise JobError("E_MALFORMED_JOB", f"job {path} is not valid JSON: {exc}") from exc


def run(job: Dict[str, Any], out_dir: str, threads: int = 1, precision: Optional[int] = None,
        command: Optional[str] = None) -> int:
    """Execute a job (or a batch ``{"jobs": [...]}``); returns the exit status."""
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise JobError("E_IO", f"cannot create {out_dir}: {exc}") from exc
    if not isinstance(job, dict):
        raise JobError("E_MALFORMED_JOB", "a job must be a JSON object")
    if "jobs" in job:
        jobs = job["jobs"]
        dirs = [os.path.join(out_dir, f"{k:03d}") for k in range(len(jobs))]

        def one(args):
            j, d = args
            try:
                return run(j, d, 1, precision), None
            except JobError as exc:
                return EXIT_ERROR, str(exc)

        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            results = list(pool.map(one, zip(jobs, dirs)))
        for (code, err), d in zip(results, dirs):
            if err:
                print(f"{d}: {err}", file=sys.stderr)
        codes = [c for c, _ in results]
        _dump(os.path.join(out_dir, "batch.json"), {"exit_codes": codes})
        return EXIT_ERROR if EXIT_ERROR in codes else (EXIT_UNCERTAIN if EXIT_UNCERTAIN in codes else EXIT_OK)
    cmd = command or job.get("command")
    if command and job.get("command") not in (None, command):
        raise JobError("E_MALFORMED_JOB", f"job is for {job.get('command')!r}, not {command!r}")
    if cmd not in HANDLERS:
        raise JobError("E_MALFORMED_JOB", f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")
    if cmd in ("scan-maxdomain", "gram-dump"):
        with _NUMERIC_LOCK:
            code, _ = HANDLERS[cmd](job, out_dir, threads, precision)
    else:
        code, _ = HANDLERS[cmd](job, out_dir, threads, precision)
    return code


# ---------------------------------------------------------------------------
# certificate replay


def _complex_point(rows) -> List[complex]:
    return [complex(float(a), float(b)) for a, b in rows]


def _exact_point(rows) -> List[GaussianRational]:
    return [GaussianRational(Fraction(a), Fraction(b)) for a, b in rows]


def _inside(kind: str, pt, slack: float = 1e-9) -> bool:
    if pt and isinstance(pt[0], GaussianRational):
        mods = [z.abs2() for z in pt]
        return all(m <= 1 for m in mods) if kind == "ClosedPolydisk" else all(m < 1 for m in mods)
    top = max(abs(z) for z in pt)
    return top <= 1 + slack if kind == "ClosedPolydisk" else top < 1


def verify_certificate(record: Dict[str, Any]) -> List[tuple]:
    """Replay the checks recorded in a verdict file: (name, passed) pairs."""
    checks: List[tuple] = []
    if record.get("command") == "scan-maxdomain":
        return _verify_scan(record)
    space = space_from_json(record["space"])
    kind = maximal_domain(space).kind
    d = space.d
    polys = [deserialize(t, d) for t in record["input"]]
    verdict = record["verdict"]
    cert = verdict["certificate"]
    status = verdict["status"]
    if "gcd" in cert:
        g = deserialize(cert["gcd"], d)
        cof = [deserialize(c, d) for c in cert["cofactors"]]
        checks.append(("family = gcd * cofactors", all(g * c == f for c, f in zip(cof, polys))))
        for k, pt in enumerate(cert.get("variety_points", [])):
            if "exact" in pt:
                x = _exact_point(pt["exact"])
                ok = all(evaluate(c, x).is_zero() for c in cof if not c.is_zero())
            else:
                x = _complex_point(pt["point"])
                ok = all(abs(complex(evaluate(c, x))) < 1e-7 for c in cof)
            checks.append((f"variety point {k} is a common zero of the cofactors", ok))
    wit = verdict.get("witness")
    if status in ("NotCyclic", "NotJointlyCyclic") and wit is not None:
        exact = None
        for pt in cert.get("variety_points", []):
            if "exact" in pt and _complex_point(pt["point"]) == _complex_point(wit):
                exact = _exact_point(pt["exact"])
        targets = polys  # zeros of the gcd are common zeros as well
        if exact is not None:
            checks.append(("witness is an exact common zero", all(evaluate(f, exact).is_zero() for f in targets)))
            checks.append(("witness lies in the maximal domain", _inside(kind, exact)))
        else:
            x = _complex_point(wit)
            checks.append(("witness residuals below 1e-7", all(abs(complex(evaluate(f, x))) < 1e-7 for f in targets)))
            checks.append(("witness lies in the maximal domain", _inside(kind, x)))
    if status == "JointlyCyclic" and "variety_points" in cert:
        pts = cert["variety_points"]
        ok = all(not _inside(kind, _exact_point(p["exact"]) if "exact" in p else _complex_point(p["point"]), -1e-7)
                 for p in pts)
        checks.append(("no cofactor zero in the maximal domain", ok))
    if not checks:
        checks.append(("record is well formed", status in ("Cyclic", "NotCyclic", "JointlyCyclic",
                                                           "NotJointlyCyclic", "Uncertain")))
    return checks


def _verify_scan(record) -> List[tuple]:
    from .numeric.diagnostics import classify_slope
    lo, hi = record["thresholds"]["slope_lo"], record["thresholds"]["slope_hi"]
    checks = []
    for p in record["points"]:
        if p["lambda"] != "Inconclusive" or p["monotone"]:
            checks.append((f"lambda classification at {p['w']}",
                           p["lambda"] == "Inconclusive" or classify_slope(p["lambda_slope"], lo, hi) == p["lambda"]))
    return checks


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jointcyc", description="Cyclicity of polynomial families and "
                                 "maximal-domain diagnostics for weighted spaces.")
    ap.add_argument("--verify", metavar="CERTIFICATE", help="replay the checks of a verdict or summary file")
    sub = ap.add_subparsers(dest="command")
    for name in ("run",) + COMMANDS:
        p = sub.add_parser(name, help="run a batch or single job" if name == "run" else f"{name} job")
        p.add_argument("--job", required=True, help="job file (JSON)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        p.add_argument("--precision", type=int, default=None, help="working precision in decimal digits")
    v = sub.add_parser("verify", help="replay the checks of a verdict or summary file")
    v.add_argument("certificate")
    return ap


def _verify_main(path: str) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            record = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error[E_IO]: cannot read certificate {path}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        checks = verify_certificate(record)
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error[E_MALFORMED_CERTIFICATE]: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for name, ok in checks:
        print(f"{'ok  ' if ok else 'FAIL'} {name}")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_ERROR


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verify:
        return _verify_main(args.verify)
    if args.command is None:
        build_parser().print_help()
        return EXIT_ERROR
    if args.command == "verify":
        return _verify_main(args.certificate)
    if args.threads < 1:
        print("error[E_MALFORMED_JOB]: --threads must be positive", file=sys.stderr)
        return EXIT_ERROR
    try:
        job = load_job(args.job)
        return run(job, args.out, args.threads, args.precision, None if args.command == "run" else args.command)
    except JobError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
