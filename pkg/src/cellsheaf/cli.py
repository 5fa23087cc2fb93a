"""Command-line interface.

Subcommands parse a sheaf document, run the requested computation, and emit
a deterministic report (human-readable lines, or JSON with --json). Exit
codes: 0 all checks passed, 1 a semantic check failed, 2 usage or parse
error. Rational numbers are printed exactly, never as floats.
"""

from __future__ import annotations

import argparse
import json
import sys

from .document import (
    MAIN_SHEAF,
    RealizedDocument,
    parse_document,
    realize,
    render_document,
)
from .errors import (
    CellSheafError,
    DocumentError,
    EnumerationLimitError,
    FunctorialityError,
    NaturalityError,
    NotAntisymmetricError,
    NotOpenError,
    UnknownElementError,
    ValidationError,
)
from .morphism import classify
from .order import hasse_edges, quotient_to_poset
from .sheaf import (
    sections_over,
    stalk_at,
    verify_base_sheaf_axioms,
    verify_sheaf_axioms_extended,
)
from .topology import OpenSet


class Report:
    def __init__(self, command: str, seed: int):
        self.command = command
        self.seed = seed
        self.checks: list[dict] = []
        self.data: dict = {}
        self.error: str | None = None

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(
            {"name": name, "status": "pass" if passed else "fail", "detail": detail}
        )
        return passed

    @property
    def ok(self) -> bool:
        return self.error is None and all(c["status"] == "pass" for c in self.checks)

    def emit(self, as_json: bool) -> None:
        if as_json:
            payload = {
                "command": self.command,
                "seed": self.seed,
                "checks": self.checks,
                "data": self.data,
            }
            if self.error is not None:
                payload["error"] = self.error
            print(json.dumps(payload, indent=2))
            return
        print(f"command: {self.command}")
        print(f"seed: {self.seed}")
        if self.error is not None:
            print(f"error: {self.error}")
            return
        for c in self.checks:
            suffix = f" ({c['detail']})" if c["detail"] else ""
            print(f"check {c['name']}: {c['status']}{suffix}")
        for key, value in self.data.items():
            if key == "normalized_document":
                print("normalized document:")
                for line in value.rstrip("\n").split("\n"):
                    print(f"  {line}")
            else:
                print(f"{key}: {_human(value)}")
        print(f"result: {'PASS' if self.ok else 'FAIL'}")


def _human(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_human(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_human(v)}" for k, v in value.items()) + "}"
    return str(value)


def _matrix_json(m) -> list[list[str]]:
    return [[m.field.format(v) for v in row] for row in m.data]


def _load(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None


def _failure_name(exc: ValidationError) -> str:
    if isinstance(exc, NotAntisymmetricError):
        return "poset-antisymmetry"
    if isinstance(exc, FunctorialityError):
        return "functoriality"
    if isinstance(exc, NaturalityError):
        return "naturality"
    if isinstance(exc, NotOpenError):
        return "open-valid"
    return "document-valid"


def _realize_into(report: Report, args) -> RealizedDocument | None:
    """Realize the document, recording semantic failures as failed checks."""
    doc = parse_document(_load(args.file))
    try:
        realized = realize(doc, args.field)
    except ValidationError as exc:
        report.check(_failure_name(exc), False, str(exc))
        return None
    report.check("document-valid", True)
    return realized


def _main_sheaf(realized: RealizedDocument):
    if MAIN_SHEAF in realized.sheaves:
        return realized.sheaves[MAIN_SHEAF]
    if len(realized.sheaves) == 1:
        return next(iter(realized.sheaves.values()))
    raise DocumentError("document has no [sheaf] block")


def cmd_check(args) -> Report:
    report = Report("check", args.seed)
    doc = parse_document(_load(args.file))
    try:
        realized = realize(doc, args.field)
    except ValidationError as exc:
        report.check(_failure_name(exc), False, str(exc))
        return report
    report.check("document-valid", True)
    report.check("poset-antisymmetry", True,
                 f"{len(realized.poset)} elements")
    for name in sorted(realized.sheaves):
        sheaf = realized.sheaves[name]
        report.check(f"functoriality:{name}", True,
                     f"field {sheaf.field.name}")
        base_report = verify_base_sheaf_axioms(sheaf, args.max_elements)
        detail = base_report.summary()
        failures = base_report.failures()
        if failures:
            detail += "; first: " + failures[0].describe()
        report.check(f"basic-cover-exactness:{name}", base_report.ok, detail)
        ext_report = verify_sheaf_axioms_extended(
            sheaf, covers_per_open=50, seed=args.seed,
            max_elements=args.max_elements,
        )
        detail = ext_report.summary()
        failures = ext_report.failures()
        if failures:
            detail += "; first: " + failures[0].describe()
        report.check(f"open-cover-exactness:{name}", ext_report.ok, detail)
    for name in sorted(realized.morphisms):
        report.check(f"naturality:{name}", True)
    report.data["normalized_document"] = render_document(realized)
    return report


def _resolve_open(realized: RealizedDocument, spec: str) -> OpenSet:
    poset = realized.poset
    items = [t.strip() for t in spec.split(",") if t.strip()]
    if not items:
        raise DocumentError("empty --open specification")
    stars = [t[5:] for t in items if t.startswith("star:")]
    named = [t[4:] for t in items if t.startswith("set:")]
    plain = [t for t in items if not t.startswith(("star:", "set:"))]
    if plain and (stars or named):
        raise DocumentError(
            "--open mixes an explicit member list with star:/set: items")
    if plain:
        for x in plain:
            poset.index(x)
        return OpenSet(poset, frozenset(plain))
    members: frozenset = frozenset()
    for x in stars:
        poset.index(x)
        members |= poset.up_set(x)
    for name in named:
        if name not in realized.opens:
            raise DocumentError(f"document defines no open named {name!r}")
        members |= realized.opens[name].members
    return OpenSet(poset, members)


def cmd_sections(args) -> Report:
    report = Report("sections", args.seed)
    realized = _realize_into(report, args)
    if realized is None:
        return report
    sheaf = _main_sheaf(realized)
    try:
        U = _resolve_open(realized, args.open_spec)
    except ValidationError as exc:
        report.check("open-valid", False, str(exc))
        return report
    report.check("open-valid", True)
    space = sections_over(sheaf, U)
    report.data["open"] = list(U.sorted_members)
    report.data["field"] = sheaf.field.name
    report.data["dim"] = space.dim
    basis = []
    for section in space.basis_sections():
        basis.append({
            x: [sheaf.field.format(v) for v in section.components[x]]
            for x in U.sorted_members
        })
    report.data["basis"] = basis
    return report


def cmd_stalk(args) -> Report:
    report = Report("stalk", args.seed)
    realized = _realize_into(report, args)
    if realized is None:
        return report
    sheaf = _main_sheaf(realized)
    sheaf.base.index(args.point)
    stalk = stalk_at(sheaf, args.point, args.max_elements)
    report.check(
        "stalk-dimension",
        stalk.theorem_dim == stalk.oracle_dim,
        f"point value dim {stalk.theorem_dim}, direct limit dim {stalk.oracle_dim}",
    )
    report.check("stalk-witness-invertible", stalk.iso_witness.is_invertible())
    report.data["point"] = args.point
    report.data["dim"] = stalk.theorem_dim
    report.data["witness"] = _matrix_json(stalk.iso_witness)
    return report


def cmd_quotient(args) -> Report:
    report = Report("quotient", args.seed)
    doc = parse_document(_load(args.file))
    result = quotient_to_poset(doc.preorder)
    report.check("quotient-is-poset", result.quotient.is_poset())
    report.data["carrier"] = list(doc.preorder.elements)
    report.data["classes"] = [list(cls) for cls in result.classes]
    report.data["representatives"] = list(result.quotient.elements)
    report.data["hasse"] = [
        f"{a}<{b}" for a, b in hasse_edges(result.quotient)
    ]
    return report


def cmd_morphism(args) -> Report:
    report = Report("morphism", args.seed)
    doc = parse_document(_load(args.file))
    if not doc.morphism_specs:
        raise DocumentError("document defines no morphisms")
    name = args.name
    if name is None:
        if len(doc.morphism_specs) > 1:
            raise DocumentError(
                "document defines several morphisms; pick one with --name")
        name = next(iter(doc.morphism_specs))
    if name not in doc.morphism_specs:
        raise DocumentError(f"document defines no morphism named {name!r}")
    try:
        realized = realize(doc, args.field)
    except ValidationError as exc:
        report.check(_failure_name(exc), False, str(exc))
        return report
    report.check("document-valid", True)
    mor = realized.morphisms[name]
    report.check("naturality", True)
    flags = classify(mor)
    report.data["morphism"] = name
    report.data["injective"] = flags.injective
    report.data["surjective"] = flags.surjective
    report.data["isomorphism"] = flags.isomorphism
    report.data["components"] = {
        p: _matrix_json(mor.components[p]) for p in mor.source.base.elements
    }
    return report


_COMMANDS = {
    "check": cmd_check,
    "sections": cmd_sections,
    "stalk": cmd_stalk,
    "quotient": cmd_quotient,
    "morphism": cmd_morphism,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellsheaf",
        description="Exact computations with cellular sheaves on finite posets",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="sheaf document")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for sampled covers (default 0)")
    common.add_argument("--max-elements", type=int, default=20, dest="max_elements",
                        help="enumeration guard for open-set listings (default 20)")
    common.add_argument("--field", default=None,
                        help="override the document field: q or fp:<prime>")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common],
                   help="validate the document and verify the gluing laws")
    p_sections = sub.add_parser("sections", parents=[common],
                                help="basis of the sections over an open set")
    p_sections.add_argument(
        "--open", required=True, dest="open_spec",
        help="comma-separated star:<x> / set:<name> items, or explicit members",
    )
    p_stalk = sub.add_parser("stalk", parents=[common],
                             help="stalk dimensions and comparison witness")
    p_stalk.add_argument("--point", required=True)
    sub.add_parser("quotient", parents=[common],
                   help="poset quotient of the document's relation")
    p_mor = sub.add_parser("morphism", parents=[common],
                           help="naturality and classification of a morphism")
    p_mor.add_argument("--name", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    as_json = args.json
    try:
        report = _COMMANDS[args.command](args)
    except (DocumentError, UnknownElementError, EnumerationLimitError) as exc:
        report = Report(args.command, args.seed)
        report.error = str(exc)
        report.emit(as_json)
        return 2
    except CellSheafError as exc:
        report = Report(args.command, args.seed)
        report.check("document-valid", False, str(exc))
        report.emit(as_json)
        return 1
    report.emit(as_json)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
