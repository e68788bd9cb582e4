"""Command line front end.

    stringhom groups  --sphere N --max-degree D [--winding W]
    stringhom bracket --sphere N --max-degree D [--winding W] [--all]
    stringhom verify  --sphere N --max-degree D [--winding W]

Exit codes: 0 success, 1 verification mismatch, 2 usage error.
The default output format is read from STRINGHOM_FORMAT (text or json).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass

from .bracket import BracketEntry, bracket_table, lie_audit
from .closed_form import printed_group, theorem_bracket, theorem_group
from .gysin import ERASED, GroupTable, GysinNode, exactness_audit, solve
from .loop_algebra import CIRCLE, EVEN, ODD, SphereContext

SCHEMA = 1
FORMAT_ENV = "STRINGHOM_FORMAT"
log = logging.getLogger("stringhom")

_ASCII = str.maketrans({"⊗": "(x)", "·": "*", "γ": "gamma", "⊕": "+", "ℤ": "Z",
                        "Δ": "Delta", "∞": "inf", "₀": "0", "₁": "1", "₂": "2", "₃": "3",
                        "₄": "4", "₅": "5", "₆": "6", "₇": "7", "₈": "8", "₉": "9"})


def to_ascii(text: str) -> str:
    return text.translate(_ASCII)


@dataclass(frozen=True)
class RunConfig:
    sphere: int
    max_degree: int
    winding: int | None = None
    fmt: str = "text"
    out: str | None = None
    ascii: bool = False
    all_pairs: bool = False
    verbosity: int = 0

    def __post_init__(self):
        if self.sphere < 1:
            raise ValueError("--sphere must be >= 1")
        if self.max_degree < 0:
            raise ValueError("--max-degree must be >= 0")
        if self.winding is not None and self.winding < 0:
            raise ValueError("--winding must be >= 0")
        if (self.winding is None) == (self.sphere == 1):
            raise ValueError("--winding is required for --sphere 1 and only allowed there")
        if self.fmt not in ("text", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")

    @property
    def ctx(self) -> SphereContext:
        return SphereContext(self.sphere, self.winding or 0)


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def group_row(node: GysinNode) -> dict:
    g = node.group
    return {
        "degree": node.degree,
        "rank": g.rank,
        "invariant_factors": list(g.torsion) if g.resolved else None,
        "resolved_factors": list(g.torsion),
        "opaque_order": g.opaque_order,
        "torsion_order": g.torsion_order,
        "resolved": g.resolved,
        "generators": [gen.label for gen in node.generators],
    }


def bracket_row(e: BracketEntry, table: GroupTable) -> dict:
    return {
        "left": e.left_label,
        "right": e.right_label,
        "left_degree": e.left[0],
        "right_degree": e.right[0],
        "degree": e.degree,
        "coefficient": e.coefficient,
        "target": e.target_label(),
        "target_order": e.order,
        "vanishes": e.vanishes,
        "sign_exponent": e.sign_exponent,
    }


def document(cfg: RunConfig, groups: list[dict], brackets: list[dict], **extra) -> dict:
    doc = {"schema": SCHEMA, "sphere": cfg.sphere, "max_degree": cfg.max_degree,
           "winding_cutoff": cfg.winding, "groups": groups, "brackets": brackets}
    doc.update(extra)
    return doc


def render_json(doc: dict) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def _describe_row(row: dict) -> str:
    parts = [f"ℤ_{d}" for d in row["resolved_factors"]]
    if not row["resolved"]:
        parts.append(f"T(order={row['opaque_order']})")
    if row["rank"]:
        parts.append("ℤ" if row["rank"] == 1 else f"ℤ^{row['rank']}")
    return " ⊕ ".join(parts) or "0"


def render_text(doc: dict) -> str:
    lines = []
    head = f"S^{doc['sphere']}, degrees 0..{doc['max_degree']}"
    if doc["winding_cutoff"] is not None:
        head += f" (truncated at winding |w| <= {doc['winding_cutoff']})"
    lines.append(head)
    if doc["groups"]:
        lines.append(f"{'deg':>4}  group")
        for row in doc["groups"]:
            gens = ", ".join(row["generators"])
            lines.append(f"{row['degree']:>4}  {_describe_row(row):<32} {gens}")
    if doc.get("command") == "bracket":
        if not doc["brackets"]:
            lines.append("no brackets in range")
        for b in doc["brackets"]:
            order = "∞" if b["target_order"] is None else b["target_order"]
            verdict = "vanishes" if b["vanishes"] else "nonzero"
            lines.append(f"[{b['left']}, {b['right']}] ({b['left_degree']},{b['right_degree']} -> "
                         f"{b['degree']}) = {b['coefficient']}·{b['target']}  order {order}  {verdict}")
    for key in ("warnings", "mismatches"):
        for msg in doc.get(key, []):
            lines.append(f"{key[:-1]}: {msg}")
    if "ok" in doc:
        lines.append("verification passed" if doc["ok"] else "verification FAILED")
    return "\n".join(lines) + "\n"


def emit(cfg: RunConfig, doc: dict) -> None:
    text = render_json(doc) if cfg.fmt == "json" else render_text(doc)
    if cfg.ascii:
        text = to_ascii(text)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _solve(cfg: RunConfig) -> GroupTable:
    table = solve(cfg.ctx, cfg.max_degree)
    for line in table.audit_log:
        log.info(line)
    return table


def cmd_groups(cfg: RunConfig) -> int:
    table = _solve(cfg)
    emit(cfg, document(cfg, [group_row(n) for n in table.nodes], [], command="groups"))
    return 0


def cmd_bracket(cfg: RunConfig) -> int:
    table = _solve(cfg)
    entries = bracket_table(table)
    if not cfg.all_pairs:
        entries = [e for e in entries if not e.vanishes]
    emit(cfg, document(cfg, [], [bracket_row(e, table) for e in entries], command="bracket"))
    return 0


def _family_parameter(table: GroupTable, ref: tuple[int, int]) -> int | None:
    """Exponent indexing the generator family named in the bracket formulas."""
    g = table[ref[0]].generators[ref[1]]
    if g.provenance != ERASED:
        return None
    single = g.erased.single()
    if single is None or single[0] != 1:
        return None
    head = {CIRCLE: "a", ODD: "a", EVEN: "b"}[table.ctx.family]
    return single[1].power if single[1].head == head else None


def verify(cfg: RunConfig) -> dict:
    table = _solve(cfg)
    ctx = table.ctx
    mismatches: list[str] = []
    warnings: list[str] = []
    printed_diff = []
    for node in table.nodes:
        want = theorem_group(ctx, node.degree)
        got = node.group
        if not want.matches(got.rank, got.torsion_order):
            mismatches.append(f"degree {node.degree}: solver {got} (order {got.torsion_order}), "
                              f"closed form {want.describe()} (order {want.torsion_order})")
        printed = printed_group(ctx, node.degree)
        if printed is not None and not printed.matches(want.rank, want.torsion_order):
            printed_diff.append(node.degree)
    if ctx.family == EVEN:
        warnings.append("even spheres: the closed form uses |C_k| = prod_{i=1}^{k-1}(2i+1); "
                        "the derivation's one-off sum form is not used")
        if printed_diff:
            warnings.append("even spheres: the quoted closed form differs (free rank 2 and C_k in place "
                            "of C_{k+1} in degree k(2n-2)+n; e(v) is not a class of degree n) at degrees "
                            + ", ".join(map(str, printed_diff)))
    entries = bracket_table(table)
    if ctx.family == ODD and entries:
        warnings.append("odd spheres: the defining sign (-1)^(|α|-n) = -1 is absent from the quoted "
                        "bracket formula; coefficients compared up to sign")
    for e in entries:
        p, q = _family_parameter(table, e.left), _family_parameter(table, e.right)
        if p is None or q is None:
            if not e.vanishes:
                mismatches.append(f"[{e.left_label}, {e.right_label}]: nonzero outside the named families")
            continue
        want = theorem_bracket(ctx, p, q)
        coeff_ok = e.coefficient is not None and (
            abs(e.coefficient) == abs(want.coefficient) if ctx.family == ODD
            else e.coefficient == want.coefficient)
        if want.vanishes != e.vanishes or not coeff_ok or (want.order or None) != e.order:
            mismatches.append(f"[{e.left_label}, {e.right_label}]: solver {e.coefficient} of order "
                              f"{e.order} vanishes={e.vanishes}, closed form {want.coefficient} of "
                              f"order {want.order} vanishes={want.vanishes}")
    exact = exactness_audit(table)
    lie = lie_audit(entries, table)
    mismatches += [f"exactness: {v}" for v in exact.violations]
    mismatches += [f"lie: {v}" for v in lie.violations]
    return document(cfg, [group_row(n) for n in table.nodes], [bracket_row(e, table) for e in entries],
                    command="verify", ok=not mismatches, mismatches=mismatches, warnings=warnings,
                    checks={"exactness": exact.checks, "lie": lie.checks})


def cmd_verify(cfg: RunConfig) -> int:
    doc = verify(cfg)
    if cfg.fmt == "text":
        doc = dict(doc, groups=[], brackets=[])
    emit(cfg, doc)
    if not doc["ok"]:
        print(f"mismatch: {doc['mismatches'][0]}", file=sys.stderr)
        return 1
    return 0


COMMANDS = {"groups": cmd_groups, "bracket": cmd_bracket, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stringhom",
                                     description="Integral string homology and string bracket of spheres")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--sphere", type=int, required=True, help="sphere dimension n")
        p.add_argument("--max-degree", type=int, required=True)
        p.add_argument("--winding", type=int, default=None, help="winding cutoff (n = 1 only)")
        p.add_argument("--format", choices=("text", "json"),
                       default=os.environ.get(FORMAT_ENV, "text"))
        p.add_argument("--out", default=None)
        p.add_argument("--ascii", action="store_true")
        p.add_argument("--all", action="store_true", dest="all_pairs",
                       help="include vanishing brackets")
        p.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.sphere, args.max_degree, args.winding, args.format, args.out,
                        args.ascii, args.all_pairs, args.verbose)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"stringhom: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if cfg.verbosity else logging.WARNING,
                        format="%(name)s: %(message)s")
    return COMMANDS[args.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
