"""Command-line front end: every computation behind one `elemdiff` binary.

Artifacts go to stdout (or --out); errors leave as a JSON object on stderr
with a nonzero exit.  All randomness flows from --seed, so equal invocations
emit byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .config import (DEFAULT_COLUMN_BUDGET, DEFAULT_PRIME, DEFAULT_RANDOM_BOUND,
                     DEFAULT_SEED, RunConfig)
from .differentials import (eval_multiindex, eval_tree,
                            standard_identity_tree_terms)
from .errors import ElemdiffError, PreconditionError, SizeLimitError
from .groups import (character_table, conjugacy_classes, constraint_scan,
                     subgroup_classes, tree_fixed_character)
from .jets import Jet
from .labelling import dimension_labelled
from .multiindex import MultiIndex, enumerate_multi_indices, project_arities
from .relations import (block_basis, certify_relation, dimension_lw,
                        dimension_w)
from .trees import Tree, enumerate_trees


# ---------------------------------------------------------------------------
# emission

def _json_artifact(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _pick_format(config: RunConfig, default: str, supported) -> str:
    fmt = config.output_format or default
    if fmt not in supported:
        raise PreconditionError(f"format {fmt!r} not supported here (use {sorted(supported)})")
    return fmt


def _parse_parents(text: str) -> Tree:
    body = text.strip().strip("[]")
    if not body:
        raise PreconditionError("empty tree description")
    parents = [int(x) for x in body.replace(" ", "").split(",")]
    return Tree.from_parents(parents)


def _parents_text(tree: Tree) -> str:
    return "[" + ",".join(str(p) for p in tree.parent_list()) + "]"


def _load_jets(path: str) -> list:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise PreconditionError("inputs file must hold a list of jets")
    return [Jet.from_json_dict(obj) for obj in raw]


# ---------------------------------------------------------------------------
# handlers

def _cmd_trees_enum(args, config):
    trees = enumerate_trees(args.n)
    fmt = _pick_format(config, "text", {"text", "json"})
    if fmt == "text":
        return "".join(_parents_text(t) + "\n" for t in trees)
    return _json_artifact({"n": args.n, "count": len(trees),
                           "trees": [t.parent_list() for t in trees]})


def _orbit_representatives(n: int) -> list:
    from .trees import all_permutations, relabel
    reps = {}
    for t in enumerate_trees(n):
        best = min(relabel(t, s).entries for s in all_permutations(n))
        reps.setdefault(best, Tree(best))
    return [reps[k] for k in sorted(reps)]


def _cmd_trees_canon(args, config):
    reps = _orbit_representatives(args.n)
    fmt = _pick_format(config, "text", {"text", "json"})
    if fmt == "text":
        return "".join(_parents_text(t) + "\n" for t in reps)
    return _json_artifact({"n": args.n, "orbitCount": len(reps),
                           "representatives": [t.parent_list() for t in reps]})


def _cmd_mi_enum(args, config):
    mis = enumerate_multi_indices(args.n)
    fmt = _pick_format(config, "text", {"text", "json"})
    if fmt == "text":
        return "".join(m.text() + "\n" for m in mis)
    return _json_artifact({"n": args.n, "count": len(mis),
                           "multiIndices": [m.to_json_dict() for m in mis]})


def _cmd_mi_project(args, config):
    tree = _parse_parents(args.tree)
    mi = project_arities(tree)
    fmt = _pick_format(config, "text", {"text", "json"})
    if fmt == "text":
        return mi.text() + "\n"
    return _json_artifact(mi.to_json_dict())


def _cmd_eval_f(args, config):
    tree = _parse_parents(args.tree)
    inputs = _load_jets(args.inputs)
    if any(j.d != args.dim for j in inputs):
        raise PreconditionError("inputs disagree with --dim")
    result = eval_tree(tree, inputs, degree=config.degree_override)
    _pick_format(config, "json", {"json"})
    return _json_artifact(result.to_json_dict())


def _cmd_eval_g(args, config):
    mi = MultiIndex.parse(args.mi)
    inputs = _load_jets(args.inputs)
    result = eval_multiindex(mi, inputs)
    _pick_format(config, "json", {"json"})
    return _json_artifact(result.to_json_dict())


def _cmd_dim_w(args, config):
    if args.labels:
        ks = tuple(int(x) for x in args.labels.split(","))
        cert = dimension_labelled(args.dim, args.n, ks, config)
        head = {"kind": "labelled", "labels": list(ks)}
    elif args.linear:
        cert = dimension_lw(args.dim, args.n, config)
        head = {"kind": "linear"}
    else:
        cert = dimension_w(args.dim, args.n, config=config)
        head = {"kind": "all"}
    payload = {"d": args.dim, "n": args.n, **head, **cert.to_json_dict()}
    _pick_format(config, "json", {"json"})
    return _json_artifact(payload)


def _cmd_identity_s2d(args, config):
    if args.dim > 2:
        raise SizeLimitError("the alternating identity is desk scale for d <= 2")
    check_dim = args.check_dim if args.check_dim is not None else args.dim
    if check_dim > 3:
        raise SizeLimitError("certification is desk scale for check dimension <= 3")
    terms = standard_identity_tree_terms(args.dim)
    result = certify_relation(terms, check_dim, config)
    payload = {
        "arity": 2 * args.dim + 1,
        "identityDim": args.dim,
        "checkDim": check_dim,
        "holds": result.holds,
        "tuplesChecked": result.tuples_checked,
        "witness": result.witness.to_json_dict() if result.witness else None,
    }
    _pick_format(config, "json", {"json"})
    return _json_artifact(payload)


def _cmd_identity_certify(args, config):
    with open(args.relation, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    d = raw["d"]
    terms = []
    for item in raw["terms"]:
        tree = Tree.from_parents(item["tree"])
        coeff = Fraction(str(item["coeff"]))
        if "labels" in item and item["labels"] is not None:
            terms.append((coeff, (tree, tuple(item["labels"]))))
        else:
            terms.append((coeff, tree))
    result = certify_relation(terms, d, config, exhaustive=args.exhaustive)
    payload = {
        "d": d,
        "holds": result.holds,
        "tuplesChecked": result.tuples_checked,
        "witness": result.witness.to_json_dict() if result.witness else None,
    }
    _pick_format(config, "json", {"json"})
    return _json_artifact(payload)


def _cmd_char_table(args, config):
    rows = character_table(args.n)
    fmt = _pick_format(config, "csv", {"csv", "json"})
    labels = [cc.label for cc in conjugacy_classes(args.n)]
    if fmt == "json":
        return _json_artifact({
            "n": args.n,
            "classes": labels,
            "rows": {row.name: list(row.values) for row in rows},
        })
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["class"] + labels)
    for row in rows:
        writer.writerow([row.name] + list(row.values))
    return buf.getvalue()


def _cmd_groups_subgroups(args, config):
    subs = subgroup_classes(args.n)
    _pick_format(config, "json", {"json"})
    return _json_artifact({
        "n": args.n,
        "classCount": len(subs),
        "classes": [
            {
                "label": s.label,
                "order": s.order,
                "classSize": s.class_size,
                "fixesPoint": s.fixes_point,
                "generators": [list(g.images) for g in s.generators],
            }
            for s in subs
        ],
    })


def _cmd_groups_scan(args, config):
    reference = tree_fixed_character(5) if args.control else None
    report = constraint_scan(reference)
    _pick_format(config, "json", {"json"})
    return _json_artifact(report.to_json_dict())


def _cmd_block_basis(args, config):
    blocks = block_basis(args.dim, args.n, orbit_code=args.mi_orbit, config=config)
    _pick_format(config, "json", {"json"})
    return _json_artifact({
        "d": args.dim,
        "n": args.n,
        "orbit": args.mi_orbit,
        "blocks": [b.to_json_dict() for b in blocks],
        "totalDimension": sum(b.dimension for b in blocks),
    })


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elemdiff",
        description="Exact combinatorics of elementary differentials.",
    )
    # shared flags live on every leaf command so they can trail the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    common.add_argument("--column-budget", type=int, default=DEFAULT_COLUMN_BUDGET)
    common.add_argument("--threads", type=int, default=0,
                        help="0 = available parallelism (or ELEMDIFF_THREADS)")
    common.add_argument("--format", choices=["json", "csv", "text"], default=None)
    common.add_argument("--degree", type=int, default=None,
                        help="override the evaluation truncation degree")
    common.add_argument("--bound", type=int, default=DEFAULT_RANDOM_BOUND,
                        help="coefficient bound for random jets")
    common.add_argument("--out", default=None, help="write the artifact to a file")
    shared = [common]
    sub = parser.add_subparsers(dest="command", required=True)

    trees = sub.add_parser("trees").add_subparsers(dest="sub", required=True)
    t_enum = trees.add_parser("enum", parents=shared)
    t_enum.add_argument("--n", type=int, required=True)
    t_enum.set_defaults(handler=_cmd_trees_enum)
    t_canon = trees.add_parser("canon", parents=shared)
    t_canon.add_argument("--n", type=int, required=True)
    t_canon.set_defaults(handler=_cmd_trees_canon)

    mi = sub.add_parser("mi").add_subparsers(dest="sub", required=True)
    m_enum = mi.add_parser("enum", parents=shared)
    m_enum.add_argument("--n", type=int, required=True)
    m_enum.set_defaults(handler=_cmd_mi_enum)
    m_proj = mi.add_parser("project", parents=shared)
    m_proj.add_argument("--tree", required=True)
    m_proj.set_defaults(handler=_cmd_mi_project)

    ev = sub.add_parser("eval").add_subparsers(dest="sub", required=True)
    e_f = ev.add_parser("f", parents=shared)
    e_f.add_argument("--tree", required=True)
    e_f.add_argument("--inputs", required=True)
    e_f.add_argument("--dim", type=int, required=True)
    e_f.set_defaults(handler=_cmd_eval_f)
    e_g = ev.add_parser("g", parents=shared)
    e_g.add_argument("--mi", required=True)
    e_g.add_argument("--inputs", required=True)
    e_g.set_defaults(handler=_cmd_eval_g)

    dim = sub.add_parser("dim").add_subparsers(dest="sub", required=True)
    d_w = dim.add_parser("w", parents=shared)
    d_w.add_argument("--dim", type=int, required=True)
    d_w.add_argument("--n", type=int, required=True)
    d_w.add_argument("--linear", action="store_true")
    d_w.add_argument("--labels", default=None, help="k1,k2,... colour multiplicities")
    d_w.set_defaults(handler=_cmd_dim_w)

    ident = sub.add_parser("identity").add_subparsers(dest="sub", required=True)
    i_s = ident.add_parser("s2d", parents=shared)
    i_s.add_argument("--dim", type=int, required=True)
    i_s.add_argument("--check-dim", type=int, default=None)
    i_s.set_defaults(handler=_cmd_identity_s2d)
    i_c = ident.add_parser("certify", parents=shared)
    i_c.add_argument("--relation", required=True)
    i_c.add_argument("--exhaustive", action="store_true")
    i_c.set_defaults(handler=_cmd_identity_certify)

    char = sub.add_parser("char").add_subparsers(dest="sub", required=True)
    c_t = char.add_parser("table", parents=shared)
    c_t.add_argument("--n", type=int, default=5)
    c_t.set_defaults(handler=_cmd_char_table)

    groups = sub.add_parser("groups").add_subparsers(dest="sub", required=True)
    g_s = groups.add_parser("subgroups", parents=shared)
    g_s.add_argument("--n", type=int, default=5)
    g_s.set_defaults(handler=_cmd_groups_subgroups)
    g_c = groups.add_parser("scan", parents=shared)
    g_c.add_argument("--control", action="store_true",
                     help="use the raw tree character as the reference row")
    g_c.set_defaults(handler=_cmd_groups_scan)

    block = sub.add_parser("block").add_subparsers(dest="sub", required=True)
    b_b = block.add_parser("basis", parents=shared)
    b_b.add_argument("--dim", type=int, required=True)
    b_b.add_argument("--n", type=int, required=True)
    b_b.add_argument("--mi-orbit", required=True)
    b_b.set_defaults(handler=_cmd_block_basis)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig(
            seed=args.seed,
            prime=args.prime,
            column_budget=args.column_budget,
            degree_override=args.degree,
            output_format=args.format,
            threads=args.threads,
            random_bound=args.bound,
        )
        artifact = args.handler(args, config)
    except ElemdiffError as exc:
        sys.stderr.write(_json_artifact(
            {"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return 2
    except (ValueError, KeyError, OSError) as exc:
        sys.stderr.write(_json_artifact(
            {"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(artifact)
    else:
        sys.stdout.write(artifact)
    return 0
