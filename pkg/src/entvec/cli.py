"""Command line interface: ``entvec witness|classify|normal-form|scan``.

Exit codes: 0 success, 1 other library error, 2 parse error, 3 invariant
violation, 4 numerical failure (singular marginal), 5 no admissible pairs,
6 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import sqrt
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import states
from .errors import (
    EntvecError, InvariantViolation, NoAdmissiblePairs, ParseError, SingularMarginal,
)
from .entropy import dimension_from_witness
from .normalform import normal_form
from .partitions import PartitionFamily, parse_family, single_parties
from .tensor import DensityMatrix, normalize
from .witness import (
    PairSet, dimensionality_vector_bound, entanglement_depth, k_separability_scan,
    format_value, not_decomposable, select_pairs, witness,
)

log = logging.getLogger("entvec")

QUESTIONS = ("decompose", "ksep", "depth", "dimension", "normalform")


# families -------------------------------------------------------------------

def _rho1_params(p: dict) -> states.Rho1Params:
    keys = ("pA", "pB", "pC", "pABC")
    missing = [k for k in keys if k not in p]
    if len(missing) > 1:
        raise ParseError(f"rho1 needs at least three of {keys}, missing {missing}")
    vals = {k: p[k] for k in keys if k in p}
    if missing:
        vals[missing[0]] = 1.0 - sum(vals.values())
    return states.Rho1Params(vals["pA"], vals["pB"], vals["pC"], vals["pABC"])


def _rho2(p: dict) -> DensityMatrix:
    alpha = p.get("alpha", 1 / sqrt(2))
    beta = p.get("beta", sqrt(max(1 - alpha ** 2, 0.0)))
    return states.rho2(states.Rho2Params(int(p.get("N", 5)), alpha, beta, p["p"], p["q"]))


@dataclass(frozen=True)
class Family:
    build: Callable[[dict], DensityMatrix]
    n_parties: Callable[[dict], int]
    required: tuple[str, ...] = ()


FAMILIES = {
    "ghz": Family(lambda p: states.ghz(int(p.get("n", 3)), int(p.get("d", 2))).density(),
                  lambda p: int(p.get("n", 3))),
    "psi_eps": Family(lambda p: states.psi_epsilon(p["eps"]).density(), lambda p: 3, ("eps",)),
    "rho1": Family(lambda p: states.rho1(_rho1_params(p)), lambda p: 3),
    "sigma": Family(lambda p: normalize(states.sigma_filtered(_rho1_params(p))), lambda p: 3),
    "rho2": Family(_rho2, lambda p: int(p.get("N", 5)), ("p", "q")),
    "rho3": Family(lambda p: states.rho3(states.Rho3Params(p["p"], p["q"])), lambda p: 3, ("p", "q")),
    "cj_global": Family(lambda p: states.cj_depolarizing(q=p["q"]), lambda p: 4, ("q",)),
    "cj_local": Family(lambda p: states.cj_depolarizing(p["q1"], p["q2"]), lambda p: 4, ("q1", "q2")),
}


def build_family(name: str, params: dict) -> DensityMatrix:
    if name not in FAMILIES:
        raise ParseError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    fam = FAMILIES[name]
    missing = [k for k in fam.required if k not in params]
    if missing:
        raise ParseError(f"family {name} needs parameters {missing}")
    return fam.build(params)


def parse_params(text: Optional[str]) -> dict:
    """``"pA=0.1,pB=0.2"`` -> {"pA": 0.1, "pB": 0.2}."""
    out = {}
    for item in (text or "").split(","):
        if not item.strip():
            continue
        key, sep, val = item.partition("=")
        if not sep:
            raise ParseError(f"bad parameter {item!r}; expected key=value")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise ParseError(f"parameter {key.strip()!r} is not a number: {val!r}") from None
    return out


# state I/O ------------------------------------------------------------------

def state_to_json(rho: DensityMatrix) -> dict:
    m = rho.entries
    return {
        "dims": list(rho.dims),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def state_from_json(doc: dict) -> DensityMatrix:
    if "family" in doc:
        params = {k: float(v) for k, v in doc.get("params", {}).items()}
        return build_family(doc["family"], params)
    try:
        dims = doc["dims"]
        arr = np.asarray(doc["matrix"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed state document: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ParseError("matrix must be a nested list of [re, im] pairs")
    return DensityMatrix(dims, arr[..., 0] + 1j * arr[..., 1])


def parse_state(spec: str) -> DensityMatrix:
    """A path to a JSON state file, or the JSON document itself."""
    path = Path(spec)
    try:
        text = path.read_text() if not spec.lstrip().startswith("{") and path.exists() else spec
    except OSError as exc:
        raise ParseError(f"cannot read state file {spec}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"state is neither a readable file nor JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("state document must be a JSON object")
    return state_from_json(doc)


def _state_from_args(args) -> DensityMatrix:
    if bool(args.state) == bool(args.family):
        raise ParseError("give exactly one of --state or --family")
    if args.state:
        return parse_state(args.state)
    return build_family(args.family, parse_params(args.params))


# questions ------------------------------------------------------------------

def _pairs_arg(text: Optional[str]):
    if text is None or text == "auto":
        return "auto"
    return PairSet.parse(text)


def _wdict(result):
    return None if result is None else result.to_dict()


def run_question(rho: DensityMatrix, question: str, *, families=(), pairs="auto",
                 tol: float = 1e-10) -> dict:
    """Answer one classification question; returns a JSON-ready report."""
    if question == "decompose":
        if not families:
            raise ParseError("decompose needs at least one --R family")
        out = []
        for fam in families:
            res = not_decomposable(rho, fam, pairs)
            out.append({
                "R": str(fam),
                "not_decomposable": res.not_decomposable,
                "verdict": (f"not decomposable over {{{fam}}}, W={format_value(res.result.value)}"
                            if res.not_decomposable else "no certificate"),
                "witness": _wdict(res.result),
            })
        return {"question": "decompose", "families": out}
    if question == "ksep":
        res = k_separability_scan(rho, pairs)
        return {
            "question": "ksep",
            "at_most_k": res.at_most,
            "gme": res.gme,
            "verdict": res.describe(),
            "witnesses": {str(k): _wdict(r) for k, r in sorted(res.results.items())},
        }
    if question == "depth":
        res = entanglement_depth(rho, pairs)
        return {
            "question": "depth",
            "depth": res.depth,
            "verdict": res.describe(),
            "witnesses": [_wdict(r) for r in res.results],
        }
    if question == "dimension":
        fams = families or [single_parties(rho.n_parties)]
        out = []
        for fam in fams:
            res = dimensionality_vector_bound(rho, fam, pairs)
            out.append({
                "R": str(fam),
                "dimensions": list(res.dims),
                "s2_bounds": list(res.s2),
                "verdict": "(" + ",".join(str(d) for d in res.dims) + ")",
                "witnesses": [_wdict(r) for r in res.results],
            })
        return {"question": "dimension", "families": out}
    if question == "normalform":
        nf, filters = normal_form(rho, tol=tol)
        return {
            "question": "normalform",
            "steps": filters.steps,
            "flatness": filters.flatness,
            "converged": filters.converged,
            "verdict": f"flatness {filters.flatness:.3g} after {filters.steps} sweeps",
            "filters": [[[float(z.real), float(z.imag)] for z in a.ravel()] for a in filters.operators],
        }
    raise ParseError(f"unknown question {question!r}; choose from {QUESTIONS}")


def _render(report: dict) -> str:
    q = report["question"]
    lines = []
    if "families" in report:
        for item in report["families"]:
            lines.append(f"{q} [{item['R']}]: {item['verdict']}")
            if "s2_bounds" in item:
                lines.append("  S2 lower bounds: " + ", ".join(f"{x:.6g}" for x in item["s2_bounds"]))
            ws = item.get("witnesses") or [item.get("witness")]
            for w in ws:
                if w is not None:
                    lines.append(f"  W_{w['j']} = {w['value']:.12g}  C = {w['C']}")
    else:
        lines.append(f"{q}: {report['verdict']}")
        ws = report.get("witnesses")
        if isinstance(ws, dict):
            ws = [w for _, w in sorted(ws.items())]
        for w in ws or []:
            if w is not None:
                lines.append(f"  W_{w['j']} = {w['value']:.12g}  C = {w['C']}")
    return "\n".join(lines)


# scans ----------------------------------------------------------------------

@dataclass(frozen=True)
class Sweep:
    name: str
    lo: float
    hi: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class ScanSpec:
    family: str
    fixed: dict
    sweeps: tuple[Sweep, ...]
    questions: tuple[str, ...]
    families: tuple[PartitionFamily, ...] = ()
    pairs: object = "auto"


def parse_grid(text: str) -> tuple[Sweep, ...]:
    """``"p=0:1:200,q=0:1:200"`` (name=min:max:steps)."""
    sweeps = []
    for item in text.split(","):
        if not item.strip():
            continue
        name, sep, rng = item.partition("=")
        parts = rng.split(":")
        if not sep or len(parts) != 3:
            raise ParseError(f"bad grid item {item!r}; expected name=min:max:steps")
        try:
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(f"bad numbers in grid item {item!r}") from None
        if steps < 1:
            raise ParseError(f"grid {name} needs at least one step")
        sweeps.append(Sweep(name.strip(), lo, hi, steps))
    if not 1 <= len(sweeps) <= 2:
        raise ParseError("a scan sweeps one or two parameters")
    return tuple(sweeps)


def _fam_tag(fam: PartitionFamily) -> str:
    return ";".join(fam.labels())


def scan_columns(spec: ScanSpec, n: int) -> list[str]:
    cols = [s.name for s in spec.sweeps]
    for q in spec.questions:
        if q == "ksep":
            cols += [f"W_ksep_k{k}" for k in range(1, n)] + ["ksep_at_most_k"]
        elif q == "depth":
            cols += [f"W_depth_m{m}" for m in range(n // 2)] + ["depth"]
        elif q == "decompose":
            for fam in spec.families:
                cols += [f"W_dec[{_fam_tag(fam)}]", f"notdec[{_fam_tag(fam)}]"]
        elif q == "dimension":
            for fam in spec.families or (single_parties(n),):
                tag = _fam_tag(fam)
                cols += [f"W_dim[{tag}]_j{j}" for j in range(1, len(fam) + 1)]
                cols += [f"dim[{tag}]_j{j}" for j in range(1, len(fam) + 1)]
        else:
            raise ParseError(f"question {q!r} cannot be scanned")
    return cols


def _w(result) -> float:
    return float("nan") if result is None else result.value


def _scan_point(args) -> list:
    spec, point, n = args
    params = dict(spec.fixed)
    params.update(point)
    row: list = [point[s.name] for s in spec.sweeps]
    try:
        rho = build_family(spec.family, params)
    except InvariantViolation:
        width = len(scan_columns(spec, n)) - len(row)
        return row + [float("nan")] * width
    for q in spec.questions:
        if q == "ksep":
            res = k_separability_scan(rho, spec.pairs)
            row += [_w(res.results[k]) for k in range(1, n)] + [res.at_most or 0]
        elif q == "depth":
            res = entanglement_depth(rho, spec.pairs, full=True)
            row += [_w(r) for r in res.results] + [res.depth or 0]
        elif q == "decompose":
            for fam in spec.families:
                res = not_decomposable(rho, fam, spec.pairs)
                row += [_w(res.result), int(res.not_decomposable)]
        elif q == "dimension":
            for fam in spec.families or (single_parties(n),):
                res = dimensionality_vector_bound(rho, fam, spec.pairs)
                row += [_w(r) for r in res.results] + list(res.dims)
    return row


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def scan_rows(spec: ScanSpec, jobs: int = 1):
    n = FAMILIES[spec.family].n_parties(spec.fixed)
    grids = [s.values() for s in spec.sweeps]
    points = []
    if len(grids) == 1:
        points = [{spec.sweeps[0].name: float(a)} for a in grids[0]]
    else:
        points = [{spec.sweeps[0].name: float(a), spec.sweeps[1].name: float(b)}
                  for a in grids[0] for b in grids[1]]
    work = [(spec, p, n) for p in points]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_scan_point, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        rows = [_scan_point(w) for w in work]
    return scan_columns(spec, n), rows


def run_scan(spec: ScanSpec, out, jobs: int = 1) -> int:
    """Write the scan as CSV to ``out`` (path or text stream); returns row count."""
    if spec.family not in FAMILIES:
        raise ParseError(f"unknown family {spec.family!r}")
    header, rows = scan_rows(spec, jobs)
    if hasattr(out, "write"):
        _write_csv(out, header, rows)
    else:
        with open(out, "w", newline="") as fh:
            _write_csv(fh, header, rows)
    return len(rows)


def _write_csv(fh, header, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])


# entry point ----------------------------------------------------------------

def _add_state_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--state", help="state file (JSON) or inline JSON document")
    p.add_argument("--family", help=f"named family: {', '.join(sorted(FAMILIES))}")
    p.add_argument("--params", help="family parameters, e.g. pA=0.1,pB=0.2,pABC=0.5")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entvec", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("witness", help="evaluate a single witness W_j(rho, C, R)")
    _add_state_args(p)
    p.add_argument("--R", required=True, help='partition family, e.g. "A|BC,B|AC"')
    p.add_argument("--C", default="auto", help='pairs, e.g. "000-111,000-110", or auto')
    p.add_argument("--j", type=int, help="entry index (default |R|)")
    p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("classify", help="run classification questions")
    _add_state_args(p)
    p.add_argument("--question", action="append", choices=QUESTIONS,
                   help="repeatable; default ksep, depth, dimension (+ decompose with --R)")
    p.add_argument("--R", action="append", default=[], help="family for decompose/dimension")
    p.add_argument("--C", default="auto")
    p.add_argument("--normal-form", action="store_true", help="map to the normal form first")
    p.add_argument("--tol", type=float, default=1e-10, help="normal-form flatness tolerance")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("normal-form", help="compute the local-filtering normal form")
    _add_state_args(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--out", help="write the normal form as a state file")

    p = sub.add_parser("scan", help="2-D parameter scan to CSV")
    p.add_argument("--family", required=True)
    p.add_argument("--params", help="fixed parameters")
    p.add_argument("--grid", required=True, help="name=min:max:steps[,name=min:max:steps]")
    p.add_argument("--question", action="append", choices=[q for q in QUESTIONS if q != "normalform"],
                   required=True)
    p.add_argument("--R", action="append", default=[])
    p.add_argument("--C", default="auto")
    p.add_argument("--out", default="-", help="CSV path, - for stdout")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, help="accepted for interface stability; scans are deterministic")
    return parser


def _main(args) -> int:
    if args.command == "scan":
        if args.family not in FAMILIES:
            raise ParseError(f"unknown family {args.family!r}; choose from {sorted(FAMILIES)}")
        n = FAMILIES[args.family].n_parties(parse_params(args.params))
        spec = ScanSpec(args.family, parse_params(args.params), parse_grid(args.grid),
                        tuple(args.question), tuple(parse_family(t, n) for t in args.R),
                        _pairs_arg(args.C))
        if args.out == "-":
            run_scan(spec, sys.stdout, args.jobs)
        else:
            rows = run_scan(spec, args.out, args.jobs)
            print(f"wrote {rows} rows to {args.out}")
        return 0

    rho = _state_from_args(args)
    if args.command == "witness":
        fam = parse_family(args.R, rho.n_parties)
        j = args.j or len(fam)
        pairs = _pairs_arg(args.C)
        if pairs == "auto":
            pairs = select_pairs(rho, fam, j)
        res = witness(rho, pairs, fam, j)
        if args.json:
            print(json.dumps(res.to_dict(), indent=2))
        else:
            print(f"W_{j} = {res.value:.12g}  (R = {fam}, C = {res.pairs})")
            print(f"S2 bound >= {res.s2_bound():.12g} bits; certified dimension >= "
                  f"{dimension_from_witness(res.value)}")
        return 0
    if args.command == "normal-form":
        nf, filters = normal_form(rho, tol=args.tol, max_iter=args.max_iter)
        print(f"sweeps {filters.steps}, flatness {filters.flatness:.3g}, converged {filters.converged}")
        if args.out:
            Path(args.out).write_text(json.dumps(state_to_json(nf)))
        return 0

    # classify
    families = [parse_family(t, rho.n_parties) for t in args.R]
    questions = args.question or (["ksep", "depth", "dimension"] + (["decompose"] if families else []))
    pairs = _pairs_arg(args.C)
    target = rho
    reports = []
    if args.normal_form:
        target, filters = normal_form(rho, tol=args.tol)
        reports.append({"question": "normalform", "steps": filters.steps, "flatness": filters.flatness,
                        "converged": filters.converged,
                        "verdict": f"flatness {filters.flatness:.3g} after {filters.steps} sweeps"})
    for q in questions:
        fams = families if q in ("decompose", "dimension") else ()
        reports.append(run_question(target, q, families=fams, pairs=pairs, tol=args.tol))
    if args.json:
        print(json.dumps(reports, indent=2, default=str))
    else:
        print("\n".join(_render(r) for r in reports))
    return 0


EXIT_CODES = (
    (ParseError, 2),
    (InvariantViolation, 3),
    (SingularMarginal, 4),
    (NoAdmissiblePairs, 5),
    (EntvecError, 1),
    (OSError, 6),
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _main(args)
    except tuple(e for e, _ in EXIT_CODES) as exc:
        code = next(c for e, c in EXIT_CODES if isinstance(exc, e))
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
