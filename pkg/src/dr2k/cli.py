"""Command-line front end.

Reads a JSON model document, dispatches one analysis, and prints either
a human-readable report or a machine-readable JSON result document.

Model document fields:

    model_type        "finite_map" | "two_graph" | "raw_matrices"
    labels            optional list of point/vertex names
    t1, t2            finite_map: arrays of point indices
    a1, a2            two_graph: nonnegative integer matrices (rows)
    m1, m2            raw_matrices: integer matrices (rows)
    invariant_subset  optional list of labels
    assumptions       optional {"P"|"ideal_sf"|"quotient_sf": "auto"|"assume"|"deny"}

Exit codes: 0 analysis completed (even when the finding is negative or
inconclusive), 2 input or validation error, 3 internal consistency
error (a machine-checked identity failed; never expected).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Optional

from . import __version__
from .errors import Dr2kError, InternalConsistencyError
from .exact_linalg import IntMatrix, lattice_of_columns, subspace_meets_positive_cone
from .finiteness import (
    CoboundaryLattice,
    MatrixConditionResult,
    Verdict,
    check_prop_C_equals_M,
    coboundary_lattice,
    condition_m,
    condition_m_bruteforce,
    recommended_k_bound,
    sf_verdict,
)
from .ktheory import K0Data, SesMorphism, block_row, ideal_morphism, k0_of_system, report_k0
from .models import (
    FiniteMapModel,
    Rank2MatrixSystem,
    TwoGraphModel,
    enumerate_invariant_subsets,
    matrix_system,
)

FINITE_MAP = "finite_map"
TWO_GRAPH = "two_graph"
RAW_MATRICES = "raw_matrices"


class DocumentError(Dr2kError, ValueError):
    """Malformed model document; message names the offending field."""


# ---------------------------------------------------------------------------
# Input parsing
# ---------------------------------------------------------------------------

def _int_list(value, where: str) -> list[int]:
    if not isinstance(value, list):
        raise DocumentError(f"{where}: expected a list")
    out = []
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, int):
            raise DocumentError(f"{where}[{i}]: expected an integer, got {x!r}")
        out.append(x)
    return out


def _int_matrix(value, where: str) -> IntMatrix:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise DocumentError(f"{where}: expected a list of rows")
    rows = [_int_list(r, f"{where}[{i}]") for i, r in enumerate(value)]
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise DocumentError(f"{where}: ragged rows {sorted(widths)}")
    return IntMatrix.from_rows(rows)


class ModelDocument:
    """Parsed and validated input file."""

    def __init__(self, raw: dict):
        if not isinstance(raw, dict):
            raise DocumentError("top level: expected a JSON object")
        self.model_type = raw.get("model_type")
        if self.model_type not in (FINITE_MAP, TWO_GRAPH, RAW_MATRICES):
            raise DocumentError(
                f"model_type: expected one of {FINITE_MAP!r}, {TWO_GRAPH!r}, "
                f"{RAW_MATRICES!r}, got {self.model_type!r}")
        known = {"model_type", "labels", "t1", "t2", "a1", "a2", "m1", "m2",
                 "invariant_subset", "assumptions"}
        for key in raw:
            if key not in known:
                raise DocumentError(f"{key}: unknown field")

        self.model: Optional[object] = None
        if self.model_type == FINITE_MAP:
            t1 = _int_list(self._require(raw, "t1"), "t1")
            t2 = _int_list(self._require(raw, "t2"), "t2")
            labels = self._labels(raw, len(t1), "p")
            self.model = FiniteMapModel(labels, tuple(t1), tuple(t2))
            self.system = matrix_system(self.model)
        elif self.model_type == TWO_GRAPH:
            a1 = _int_matrix(self._require(raw, "a1"), "a1")
            a2 = _int_matrix(self._require(raw, "a2"), "a2")
            labels = self._labels(raw, a1.rows, "v")
            self.model = TwoGraphModel(labels, a1, a2)
            self.system = matrix_system(self.model)
        else:
            m1 = _int_matrix(self._require(raw, "m1"), "m1")
            m2 = _int_matrix(self._require(raw, "m2"), "m2")
            labels = self._labels(raw, m1.rows, "x")
            self.system = Rank2MatrixSystem(m1.rows, m1, m2, labels=labels)

        self.subset_indices: Optional[tuple[int, ...]] = None
        if "invariant_subset" in raw:
            names = raw["invariant_subset"]
            if not isinstance(names, list) or not all(isinstance(x, str) for x in names):
                raise DocumentError("invariant_subset: expected a list of labels")
            position = {label: i for i, label in enumerate(self.system.labels)}
            bad = [x for x in names if x not in position]
            if bad:
                raise DocumentError(f"invariant_subset: unknown label {bad[0]!r}")
            self.subset_indices = tuple(sorted(position[x] for x in set(names)))

        self.assumptions: dict[str, str] = {}
        if "assumptions" in raw:
            amap = raw["assumptions"]
            if not isinstance(amap, dict):
                raise DocumentError("assumptions: expected an object")
            for key, value in amap.items():
                if key not in ("P", "ideal_sf", "quotient_sf"):
                    raise DocumentError(f"assumptions.{key}: unknown assumption")
                if not isinstance(value, str) or value.lower() not in ("auto", "assume", "deny"):
                    raise DocumentError(
                        f"assumptions.{key}: expected auto, assume or deny, got {value!r}")
                self.assumptions[key] = value.lower()

    @staticmethod
    def _require(raw: dict, key: str):
        if key not in raw:
            raise DocumentError(f"{key}: required for this model_type")
        return raw[key]

    @staticmethod
    def _labels(raw: dict, n: int, prefix: str) -> tuple[str, ...]:
        if "labels" not in raw:
            return tuple(f"{prefix}{i}" for i in range(n))
        labels = raw["labels"]
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise DocumentError("labels: expected a list of strings")
        if len(labels) != n:
            raise DocumentError(f"labels: {len(labels)} labels for {n} points")
        return tuple(labels)


def load_document(path: str) -> tuple[ModelDocument, str]:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise DocumentError(f"{path}: {exc.strerror or exc}") from exc
    digest = hashlib.sha256(data).hexdigest()
    try:
        raw = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DocumentError(f"{path}: not valid JSON ({exc})") from exc
    return ModelDocument(raw), digest


# ---------------------------------------------------------------------------
# Result serialization
# ---------------------------------------------------------------------------

def _matrix_rows(m: IntMatrix) -> list[list[int]]:
    return [list(r) for r in m.entries]


def _system_summary(system: Rank2MatrixSystem) -> dict:
    return {
        "n": system.n,
        "origin": system.origin,
        "labels": list(system.labels),
        "m1": _matrix_rows(system.m1),
        "m2": _matrix_rows(system.m2),
    }


def _condition_result(res: MatrixConditionResult) -> dict:
    out = {"holds": res.holds, "method": res.method}
    if res.bound is not None:
        out["bound"] = res.bound
    out["witness"] = None if res.witness is None else {
        "vector": list(res.witness.vector),
        "f": list(res.witness.f),
        "g": list(res.witness.g),
    }
    return out


def _ses_morphism_result(mor: SesMorphism) -> dict:
    return {
        "top_row": report_k0(mor.top),
        "bottom_row": report_k0(mor.bottom),
        "vertical_maps": {
            "left_lift": _matrix_rows(mor.v_left.lift),
            "mid_lift": _matrix_rows(mor.v_mid.lift),
            "right_lift": _matrix_rows(mor.v_right.lift),
        },
        "checks": {name: bool(ok) for name, ok in mor.checks},
        "middle_map_note": mor.middle_map_note,
    }


def _coboundary_result(cob: CoboundaryLattice, matches: bool, c_holds: bool) -> dict:
    return {
        "k_bound": cob.exponent_bound,
        "stabilized": cob.stabilized,
        "generator_count": len(cob.generator_log),
        "lattice_basis_columns": [list(c) for c in cob.lattice.basis.columns()],
        "equals_matrix_image": matches,
        "condition_C_holds": c_holds,
    }


def _verdict_result(verdict: Verdict) -> dict:
    return {
        "conclusion": verdict.conclusion,
        "checked": [
            {"condition": c.condition, "status": c.status,
             "required": c.required, "note": c.note}
            for c in verdict.checked
        ],
        "assumed": list(verdict.assumed),
        "narrative": verdict.narrative,
    }


def result_document(command: str, digest: str, result: dict) -> dict:
    return {
        "tool": "dr2k",
        "version": __version__,
        "command": command,
        "input_digest": f"sha256:{digest}",
        "result": result,
    }


def emit(doc: dict, fmt: str, human_lines: list[str]) -> None:
    if fmt == "machine":
        sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write("\n".join(human_lines) + "\n")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_k0(doc: ModelDocument, digest: str, args) -> int:
    data = k0_of_system(doc.system)
    report = report_k0(data)
    result = {"system": _system_summary(doc.system), "k0": report}
    lines = [f"dr2k {__version__} k0 (input sha256:{digest[:12]}...)",
             f"K0 = {report['group']}",
             f"  cokernel part: {report['cokernel_part']['group']}"
             f" on generators {', '.join(report['cokernel_part']['generators']) or '(none)'}",
             f"  kernel part: free of rank {report['kernel_part']['rank']}"]
    for col in report["kernel_part"]["basis_columns"]:
        lines.append(f"    kernel basis vector: {col}")
    verified = report["sequence"]["verified"]
    lines.append("  sequence 0 -> coker -> K0 -> ker -> 0 verified: "
                 + ", ".join(sorted(name for name, ok in verified.items() if ok)))
    emit(result_document("k0", digest, result), args.format, lines)
    return 0


def cmd_ideal(doc: ModelDocument, digest: str, args) -> int:
    if doc.subset_indices is None:
        raise DocumentError("invariant_subset: required for the ideal command")
    mor = ideal_morphism(doc.system, doc.subset_indices)
    result = {"system": _system_summary(doc.system),
              "subset": [doc.system.labels[i] for i in doc.subset_indices],
              "morphism": _ses_morphism_result(mor)}
    lines = [f"dr2k {__version__} ideal (input sha256:{digest[:12]}...)",
             f"subset: {{{', '.join(result['subset'])}}}",
             f"ideal row    K0 = {result['morphism']['top_row']['group']}",
             f"ambient row  K0 = {result['morphism']['bottom_row']['group']}"]
    for name, ok in mor.checks:
        lines.append(f"  check {name}: {'passed' if ok else 'FAILED'}")
    lines.append("note: " + mor.middle_map_note)
    emit(result_document("ideal", digest, result), args.format, lines)
    return 0


def cmd_condition_m(doc: ModelDocument, digest: str, args) -> int:
    res = condition_m(doc.system)
    result = {"system": _system_summary(doc.system), "condition_m": _condition_result(res)}
    lines = [f"dr2k {__version__} condition-m (input sha256:{digest[:12]}...)"]
    if res.holds:
        lines.append("condition (M) holds: the image lattice meets C(X, N) only at 0.")
    else:
        w = res.witness
        lines.append("condition (M) fails: witness "
                     f"v = {list(w.vector)} with f = {list(w.f)}, g = {list(w.g)}.")
    if args.brute_force:
        brute = condition_m_bruteforce(doc.system, args.bound, cap=args.max_enum)
        agree = not (brute.witness is not None and res.holds)
        result["brute_force"] = _condition_result(brute)
        result["agreement"] = agree
        lines.append(f"brute-force cross-check (bound {brute.bound}): "
                     + ("witness found" if brute.witness is not None else "no witness in box")
                     + ("; consistent with the LP route" if agree else "; CONTRADICTS the LP route"))
        if not agree:
            raise InternalConsistencyError(
                "brute force found a witness although the span LP claims (M) holds")
    emit(result_document("condition-m", digest, result), args.format, lines)
    return 0


def cmd_coboundary(doc: ModelDocument, digest: str, args) -> int:
    if not isinstance(doc.model, FiniteMapModel):
        raise DocumentError("model_type: the coboundary command needs a finite_map model")
    cob = coboundary_lattice(doc.model, args.k_bound)
    matches = cob.lattice == lattice_of_columns(block_row(doc.system))
    c_holds = subspace_meets_positive_cone(cob.lattice) is None
    result = {"system": _system_summary(doc.system),
              "coboundary": _coboundary_result(cob, matches, c_holds)}
    lines = [f"dr2k {__version__} coboundary (input sha256:{digest[:12]}...)",
             f"exponent bound {cob.exponent_bound} "
             f"({'stabilized' if cob.stabilized else 'below the recommended bound; lattice may be incomplete'})",
             f"coboundary subgroup basis columns: "
             f"{[list(c) for c in cob.lattice.basis.columns()] or '(zero lattice)'}",
             "coboundary subgroup = image lattice of (1-m1 | 1-m2): "
             + ("equality verified" if matches else "NOT equal"),
             f"condition (C) {'holds' if c_holds else 'fails'} for this model."]
    emit(result_document("coboundary", digest, result), args.format, lines)
    return 0


def cmd_verdict(doc: ModelDocument, digest: str, args) -> int:
    assumptions = dict(doc.assumptions)
    for key in args.assume or ():
        assumptions[key] = "assume"
    subset = doc.subset_indices or ()
    verdict = sf_verdict(doc.system, subset, assumptions)
    result = {"system": _system_summary(doc.system),
              "subset": [doc.system.labels[i] for i in subset],
              "verdict": _verdict_result(verdict)}
    lines = [f"dr2k {__version__} verdict (input sha256:{digest[:12]}...)",
             f"conclusion: {verdict.conclusion}"]
    if verdict.assumed:
        lines.append("assumed: " + ", ".join(verdict.assumed))
    lines.append(verdict.narrative)
    emit(result_document("verdict", digest, result), args.format, lines)
    return 0


def cmd_invariants(doc: ModelDocument, digest: str, args) -> int:
    source = doc.model if doc.model is not None else doc.system
    subsets = enumerate_invariant_subsets(source, cap=args.max_enum)
    listed = [[doc.system.labels[i] for i in s.indices] for s in subsets]
    result = {"system": _system_summary(doc.system),
              "count": len(subsets),
              "subsets": listed}
    lines = [f"dr2k {__version__} invariants (input sha256:{digest[:12]}...)",
             f"{len(subsets)} invariant subsets:"]
    for labels in listed:
        lines.append("  {" + ", ".join(labels) + "}")
    emit(result_document("invariants", digest, result), args.format, lines)
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dr2k",
        description="Exact K0 and stable-finiteness calculator for rank-2 "
                    "Deaconu-Renault dynamics.")
    parser.add_argument("--version", action="version", version=f"dr2k {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="model document (JSON)")
        p.add_argument("--format", choices=("human", "machine"), default="human")
        p.add_argument("--max-enum", type=int, default=40000, metavar="N",
                       help="cap for exhaustive enumerations (default 40000)")

    p = sub.add_parser("k0", help="K0 group with its verified exact sequence")
    common(p)
    p.set_defaults(func=cmd_k0)

    p = sub.add_parser("ideal", help="morphism of K0 sequences for an invariant subset")
    common(p)
    p.set_defaults(func=cmd_ideal)

    p = sub.add_parser("condition-m", help="decide the generalised matrix condition (M)")
    common(p)
    p.add_argument("--brute-force", action="store_true",
                   help="also run the exhaustive bounded oracle and compare")
    p.add_argument("--bound", type=int, default=6, metavar="B",
                   help="coefficient bound for --brute-force (default 6)")
    p.set_defaults(func=cmd_condition_m)

    p = sub.add_parser("coboundary",
                       help="coboundary subgroup and its equality with the (M) image lattice")
    common(p)
    p.add_argument("--k-bound", type=int, default=None, metavar="K",
                   help="exponent bound (default: lcm of orbit sizes)")
    p.set_defaults(func=cmd_coboundary)

    p = sub.add_parser("verdict", help="stable-finiteness verdict with audit trail")
    common(p)
    p.add_argument("--assume", action="append", choices=("P", "ideal_sf", "quotient_sf"),
                   metavar="HYPOTHESIS",
                   help="accept a hypothesis (P, ideal_sf or quotient_sf); repeatable")
    p.set_defaults(func=cmd_verdict)

    p = sub.add_parser("invariants", help="enumerate invariant subsets")
    common(p)
    p.set_defaults(func=cmd_invariants)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc, digest = load_document(args.file)
        return args.func(doc, digest, args)
    except InternalConsistencyError as exc:
        print(f"dr2k: internal consistency failure: {exc}", file=sys.stderr)
        return 3
    except Dr2kError as exc:
        print(f"dr2k: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
