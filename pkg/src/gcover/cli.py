"""Command-line entry point.

Subcommands:

  validate            check a parameterization against its target
  apply PATH          apply a ;-separated move path, printing each vertex
  orbit               list the bounded move-closure of the start vertex
  verify-relations    verify closure of every relation instance in bounds
  complex build       build the bounded 2-complex and print its counts
  complex verify      build, then check connectivity and pi1
  fiber               compute and check the fiber over the start's marking
  lifting STEP        check commuting lifting squares for a base edge
  export {dot,text}   dump the start vertex as DOT or text

Configuration is a single JSON document (--config):

  {
    "group":  {"kind": "cyclic"|"symmetric"|"dihedral", "k": int}
              or {"kind": "table", "path": file},
    "target": [[m, ...], ...]       boundary monodromies per component
                                    (element text or integer index),
    "bounds": {"max_cuts": int, "max_block_size": int,
               "vertex_budget": int, "coset_budget": int, "slack": int},
    "seed":   optional explicit start parameterization (text form),
    "sampling_seed": optional integer (default 0)
  }

Unknown top-level keys are rejected.  Exit codes: 0 = all checks passed,
1 = a check failed, 2 = usage or configuration error.

Move expression grammar (for `apply` and `lifting`):

  Z@b1   B@b3#2   F@c1   Finv@b3#k=2,y=<elem>   P@b3,x=<elem>
  T@c1,z=<elem>   GF@c1   GB@b3,I2=2..3,I3=4..4

A `!` suffix inverts a step where the inverse is itself parameter-free:
Z, B (formal inverses) and P (inverse element).  F, Finv, T and the
composites are inverted by writing the opposite move explicitly.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from .groups import GroupError, group_from_config
from .param import (ParamError, Target, TargetError, canonical_key,
                    canonicalize, parse_param, seed, serialize, to_dot,
                    validate)
from .moves import Bounds, MoveError, PathBuilder, do_GB, do_GF
from .relations import enumerate_all_instances, verify_closure
from .complex import (build_bounded, check_connected, enumerate_valid_vertices,
                      prove_bounded_loops)
from .fibration import (FibrationError, check_fiber, check_lifting_squares,
                        compute_fiber, project)


class UsageError(ValueError):
    pass


class CheckFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration

_CONFIG_KEYS = {"group", "target", "bounds", "seed", "sampling_seed"}
_BOUNDS_KEYS = {"max_cuts", "max_block_size", "vertex_budget",
                "coset_budget", "slack"}


def load_config(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise UsageError("cannot read config: %s" % e)
    except json.JSONDecodeError as e:
        raise UsageError("config is not valid JSON: %s" % e)
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise UsageError("unknown config keys: %s" % ", ".join(sorted(unknown)))
    if "group" not in cfg or "target" not in cfg:
        raise UsageError("config needs 'group' and 'target'")
    try:
        G = group_from_config(cfg["group"])
    except (GroupError, KeyError, TypeError, ValueError) as e:
        raise UsageError("bad group: %s" % e)
    comps = []
    for comp in cfg["target"]:
        row = []
        for m in comp:
            row.append(m % G.order if isinstance(m, int) else G.parse(str(m)))
        comps.append(tuple(row))
    t = Target(G, tuple(comps))
    bcfg = cfg.get("bounds", {})
    unknown = set(bcfg) - _BOUNDS_KEYS
    if unknown:
        raise UsageError("unknown bounds keys: %s" % ", ".join(sorted(unknown)))
    try:
        bounds = Bounds(**bcfg)
    except TypeError as e:
        raise UsageError("bad bounds: %s" % e)
    if bounds.max_cuts < 0 or bounds.max_block_size < 1 \
            or bounds.vertex_budget < 1 or bounds.coset_budget < 1 \
            or bounds.slack < 0:
        raise UsageError("bounds out of range")
    start = None
    if cfg.get("seed"):
        try:
            start = parse_param(G, cfg["seed"])
        except (ParamError, GroupError, ValueError) as e:
            raise UsageError("bad seed parameterization: %s" % e)
    return G, t, bounds, start, int(cfg.get("sampling_seed", 0))


def start_vertex(t: Target, start):
    p = start if start is not None else seed(t)
    return canonicalize(p)[0]


def short_key(key: bytes) -> str:
    return hashlib.sha256(key).hexdigest()[:12]


# ---------------------------------------------------------------------------
# move expressions

def _elem(G, text):
    try:
        return G.parse(text)
    except GroupError as e:
        raise UsageError(str(e))


def parse_move(G, token: str):
    """One move token -> ('step', step) or ('gf', cid) / ('gb', ...)."""
    token = token.strip()
    inverse = token.endswith("!")
    if inverse:
        token = token[:-1].strip()
    kind, at, rest = token.partition("@")
    if at != "@" or not rest:
        raise UsageError("bad move %r (expected KIND@ARGS)" % token)
    if kind == "Z":
        return ("step", ("Zinv" if inverse else "Z", rest))
    if kind == "B":
        bid, hs, pos = rest.partition("#")
        if hs != "#":
            raise UsageError("B needs a #position, e.g. B@b1#2")
        return ("step", ("Binv" if inverse else "B", bid, int(pos)))
    if inverse:
        raise UsageError("'!' is only supported for Z, B and P; "
                         "write the opposite move for %s" % kind)
    if kind == "F":
        return ("step", ("F", rest))
    if kind == "Finv":
        bid, hs, args = rest.partition("#")
        kv = _kv(args, {"k", "y"})
        return ("step", ("Finv", bid, int(kv["k"]), _elem(G, kv["y"])))
    if kind == "P":
        bid, kv = _head_kv(rest, {"x"})
        return ("step", ("P", bid, _elem(G, kv["x"])))
    if kind == "T":
        cid, kv = _head_kv(rest, {"z"})
        return ("step", ("T", cid, _elem(G, kv["z"])))
    if kind == "GF":
        return ("gf", rest)
    if kind == "GB":
        bid, kv = _head_kv(rest, {"I2", "I3"})
        return ("gb", bid, _range(kv["I2"]), _range(kv["I3"]))
    raise UsageError("unknown move kind %r" % kind)


def parse_move_inverted_p(G, parsed):
    """Apply the '!' suffix to a P step (inverse element)."""
    tag, step = parsed
    return (tag, (step[0], step[1], G.inv(step[2])))


def _kv(text: str, keys: set) -> dict:
    out = {}
    for part in text.split(","):
        k, eq, v = part.partition("=")
        if eq != "=" or k.strip() not in keys:
            raise UsageError("bad argument %r (expected %s)"
                             % (part, "/".join(sorted(keys))))
        out[k.strip()] = v.strip()
    if set(out) != keys:
        raise UsageError("missing arguments: need %s" % ", ".join(sorted(keys)))
    return out


def _range(text: str) -> tuple[int, int]:
    a, dots, b = text.partition("..")
    if dots != "..":
        raise UsageError("bad interval %r (expected a..b)" % text)
    return int(a), int(b)


def _head_kv(rest: str, keys: set):
    head, comma, args = rest.partition(",")
    if comma != ",":
        raise UsageError("missing arguments after %r" % head)
    kv = _kv(args, keys)
    return head.strip(), kv


def parse_path(G, expr: str):
    out = []
    for token in expr.split(";"):
        token = token.strip()
        if not token:
            continue
        inverse = token.endswith("!")
        parsed = parse_move(G, token)
        if inverse and parsed[0] == "step" and parsed[1][0] == "P":
            parsed = parse_move_inverted_p(G, parsed)
        out.append((token, parsed))
    if not out:
        raise UsageError("empty path expression")
    return out


def run_path(G, p, expr: str, out):
    """Apply expr from p, printing every intermediate vertex."""
    moves = parse_path(G, expr)
    pb = PathBuilder(p)
    for token, parsed in moves:
        if parsed[0] == "step":
            step = parsed[1]
            try:
                pb.do(*step)
            except MoveError as e:
                raise CheckFailure("step %s not applicable: %s" % (token, e))
        elif parsed[0] == "gf":
            cid = parsed[1]
            if cid not in pb.p.cuts:
                raise CheckFailure("step %s not applicable: no cut %s"
                                   % (token, cid))
            left = pb.p.cuts[cid][0][0]
            try:
                do_GF(pb, cid, left)
            except MoveError as e:
                raise CheckFailure("step %s not applicable: %s" % (token, e))
        else:
            _, bid, i2, i3 = parsed
            try:
                do_GB(pb, bid, i2, i3)
            except MoveError as e:
                raise CheckFailure("step %s not applicable: %s" % (token, e))
        key = canonical_key(pb.p)
        out.write("after %s  [%s]\n%s" % (token, short_key(key),
                                          serialize(pb.p)))
    return pb.p


# ---------------------------------------------------------------------------
# subcommands

def cmd_validate(args, out):
    G, t, bounds, start, _ = load_config(args.config)
    p = start_vertex(t, start)
    problems = validate(p, t)
    if problems:
        for msg in problems:
            out.write("invalid: %s\n" % msg)
        raise CheckFailure("%d validation problem(s)" % len(problems))
    out.write("valid  [%s]\n%s" % (short_key(canonical_key(p)), serialize(p)))


def cmd_apply(args, out):
    G, t, bounds, start, _ = load_config(args.config)
    p = start_vertex(t, start)
    run_path(G, p, args.path, out)


def cmd_orbit(args, out):
    G, t, bounds, start, _ = load_config(args.config)
    p = start_vertex(t, start)
    cx = build_bounded(t, bounds, start=p, with_cells=False)
    keys = sorted(cx.bounded_vertices)
    out.write("orbit size=%d\n" % len(keys))
    for k in keys:
        out.write("vertex [%s]\n" % short_key(k))
        if args.verbose:
            out.write(k.decode())


def cmd_verify_relations(args, out):
    G, t, bounds, start, _ = load_config(args.config)
    p = start_vertex(t, start)
    cx = build_bounded(t, bounds, start=p, with_cells=False)
    per_schema: dict[str, int] = {}
    failures = 0
    for k in sorted(cx.bounded_vertices):
        v = cx.vertices[k]
        for inst in enumerate_all_instances(v, bounds):
            per_schema[inst.schema] = per_schema.get(inst.schema, 0) + 1
            if not verify_closure(v, inst):
                failures += 1
                out.write("FAIL %s params=%r at [%s]\n"
                          % (inst.schema, inst.params, short_key(k)))
    total = sum(per_schema.values())
    for schema in sorted(per_schema, key=lambda s: int(s[1:])):
        out.write("%s: %d instances\n" % (schema, per_schema[schema]))
    out.write("total=%d failures=%d\n" % (total, failures))
    if failures:
        raise CheckFailure("%d relation instance(s) failed to close" % failures)


def cmd_complex_build(args, out):
    G, t, bounds, start, _ = load_config(args.config)
    p = start_vertex(t, start)
    cx = build_bounded(t, bounds, start=p, cell_closure=args.cell_closure)
    out.write("vertices=%d edges=%d cells=%d (bounded: vertices=%d edges=%d)\n"
              % (len(cx.vertices), len(cx.edges), len(cx.cells),
                 len(cx.bounded_vertices), len(cx.bounded_edges)))


def cmd_complex_verify(args, out):
    G, t, bounds, start, _ = load_config(args.config)
    p = start_vertex(t, start)
    cx = build_bounded(t, bounds, start=p, cell_closure=args.cell_closure)
    ok, rep = check_connected(t, bounds, cx)
    verdict, vrep = prove_bounded_loops(cx)
    out.write("vertices=%d connected=%s pi1=%s\n"
              % (rep["bfs_vertices"], "true" if ok else "false", verdict))
    if not ok:
        out.write("missing %d enumerated vertices from the move closure\n"
                  % rep["missing"])
    if vrep:
        out.write("loops: %s\n"
                  % " ".join("%s=%s" % kv for kv in sorted(vrep.items())))
    if not ok or verdict != "ProvenTrivial":
        raise CheckFailure("complex verification failed")


def cmd_fiber(args, out):
    G, t, bounds, start, _ = load_config(args.config)
    p = start_vertex(t, start)
    base = project(p)
    fiber = compute_fiber(base, t, anchor=p)
    rep = check_fiber(fiber, coset_budget=bounds.coset_budget)
    out.write("fiber %s: size=%d connected=%s pi1=%s\n"
              % (short_key(canonical_key(base)), rep["size"],
                 "true" if rep["connected"] else "false", rep["pi1"]))
    if not rep["connected"] or rep["pi1"] != "ProvenTrivial":
        raise CheckFailure("fiber check failed")


def cmd_lifting(args, out):
    G, t, bounds, start, _ = load_config(args.config)
    p = start_vertex(t, start)
    base = project(p)
    moves = parse_path(G, args.step)
    if len(moves) != 1 or moves[0][1][0] != "step":
        raise UsageError("lifting takes a single primitive move")
    token, (_, step) = moves[0]
    try:
        rep = check_lifting_squares(base, step, t)
    except (FibrationError, MoveError) as e:
        raise UsageError("bad base edge %s: %s" % (token, e))
    out.write("square %s: pairs=%d ok=%d fail=%d\n"
              % (token, rep["pairs"], rep["ok"], rep["fail"]))
    if rep["fail"]:
        raise CheckFailure("%d lifting square(s) failed" % rep["fail"])


def cmd_export(args, out):
    G, t, bounds, start, _ = load_config(args.config)
    p = start_vertex(t, start)
    out.write(to_dot(p) if args.format == "dot" else serialize(p))


# ---------------------------------------------------------------------------
# entry point

def build_parser():
    ap = argparse.ArgumentParser(
        prog="gcover",
        description="parameterizations of principal G-covers of genus-zero "
                    "surfaces: moves, relations and 2-complex checks")
    ap.add_argument("--threads", type=int, default=1,
                    help="worker threads for independent checks "
                         "(results are deterministic regardless)")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, help="validate the start parameterization")
    sp = add("apply", cmd_apply, help="apply a move path")
    sp.add_argument("path", help=";-separated move expressions")
    sp = add("orbit", cmd_orbit, help="bounded move closure of the start")
    sp.add_argument("--verbose", action="store_true",
                    help="print full vertex text, not just keys")
    add("verify-relations", cmd_verify_relations,
        help="verify closure of all relation instances in bounds")

    cpx = sub.add_parser("complex", help="bounded 2-complex operations")
    csub = cpx.add_subparsers(dest="sub", required=True)
    for name, fn in (("build", cmd_complex_build),
                     ("verify", cmd_complex_verify)):
        sp = csub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--cell-closure", action="store_true",
                        help="attach relation cells at every reached vertex, "
                             "not only at bounded ones (slower, finer)")
        sp.set_defaults(fn=fn)

    add("fiber", cmd_fiber,
        help="compute and check the fiber over the start's erased marking")
    sp = add("lifting", cmd_lifting, help="check lifting squares")
    sp.add_argument("step", help="a structural base move (Z/B/F family)")

    sp = sub.add_parser("export", help="dump the start vertex")
    sp.add_argument("format", choices=["dot", "text"])
    sp.add_argument("--config", required=True)
    sp.set_defaults(fn=cmd_export)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        args.fn(args, sys.stdout)
    except UsageError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except (TargetError, ParamError, GroupError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except CheckFailure as e:
        print("check failed: %s" % e, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
