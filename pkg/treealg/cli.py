import argparse
import json
import logging
import sys
from fractions import Fraction

import numpy as np

from treealg import serialize, settings
from treealg.errors import DegreeIdentityError, FormatError, TreealgError

'''
Command-line driver. Every subcommand prints a human-readable report followed
by one JSON block (with the conventions in force) and returns the exit code:
0 when every check passes, 1 when a verification fails, 2 on bad input.
'''

logger = logging.getLogger(__name__)

PASSED, FAILED, BAD_INPUT = 0, 1, 2


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _pair(text):
    values = _ints(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected i,j, got {text!r}")
    return tuple(values)


def _points(text):
    try:
        return [complex(x.replace(" ", "")) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated complex numbers, got {text!r}") from None


def _emit(lines, payload, ok):
    print("\n".join(lines))
    print(json.dumps({"passed": ok, **payload, "conventions": settings.conventions()}, indent=1, default=str))
    return PASSED if ok else FAILED


def _default_base(n):
    return [complex(k) for k in range(n)]


def cmd_check_flat(args):
    from treealg.connalg import is_flat
    conn = serialize.load(args.file, serialize.decode_connection)
    conventions = ["half", "standard"] if args.convention == "both" else [args.convention]
    lines, results = [], {}
    for convention in conventions:
        flat, witness = is_flat(conn, convention)
        results[convention] = flat
        lines.append(f"{convention}: {'flat' if flat else 'not flat'}")
        if witness is not None:
            pair, residual = witness
            lines.append(f"  witness pair {pair}: residual {residual[np.nonzero(residual)][0]}")
            results[f"{convention}_witness"] = list(pair)
    return _emit(lines, {"command": "check-flat", "flatness_convention": args.convention, **results},
                 all(v for k, v in results.items() if not k.endswith("_witness")))


def cmd_degree(args):
    from treealg.connalg import conn_degree
    from treealg.kzwzw import kz_degree_identity
    from treealg.liealg import sl2_rep
    if args.channel is not None:
        kz = serialize.load(args.file, serialize.decode_kz)
        try:
            computed, predicted = kz_degree_identity(kz, sl2_rep(kz.algebra, args.channel))
        except DegreeIdentityError as error:
            return _emit([str(error)], {"command": "degree", "channel": args.channel}, False)
        return _emit([f"channel {args.channel}: degree {computed}", f"Casimir prediction {predicted}"],
                     {"command": "degree", "channel": args.channel, "degree": str(computed),
                      "predicted": str(predicted)}, computed == predicted)
    conn = serialize.load(args.file, serialize.decode_connection)
    reference = serialize.load(args.reference, serialize.decode_connection) if args.reference else None
    degree = conn_degree(conn, reference)
    return _emit([f"degree {degree}"], {"command": "degree", "degree": None if degree is None else str(degree)},
                 degree is not None)


def cmd_gauge(args):
    from treealg.connalg import gauge_transform
    conn = serialize.load(args.file, serialize.decode_connection)
    g = serialize.load(args.gauge, serialize.decode_gauge)
    gauged = gauge_transform(conn, g)
    if args.out:
        serialize.dump(gauged, args.out, serialize.encode_connection)
    return _emit([f"gauged {conn} by a gauge of degree {g.degree}"],
                 {"command": "gauge", "out": args.out, "basis_degrees": [str(d) for d in gauged.basis_degrees]}, True)


def cmd_cocompose(args):
    from treealg.cooperad import cocompose
    f = serialize.load(args.file, serialize.decode_ratfunc)
    x = cocompose(f, args.partition, args.order)
    if args.out:
        serialize.dump(x, args.out, serialize.encode_trunctensor)
    return _emit([str(x.func)], {"command": "cocompose", "partition": args.partition, "order": args.order,
                                 "result": serialize.encode_trunctensor(x)}, True)


def cmd_kz(args):
    from treealg.kzwzw import kz_build
    from treealg.liealg import sl2, sl2_rep
    if args.algebra != "sl2":
        raise FormatError(f"unsupported algebra {args.algebra}", "--algebra")
    algebra = sl2()
    kz = kz_build(algebra, [sl2_rep(algebra, m) for m in args.weights], Fraction(args.level))
    serialize.dump(kz, args.out, serialize.encode_kz)
    return _emit([f"KZ connection of rank {kz.full.rank} on {kz.n} points written to {args.out}"],
                 {"command": "kz", "weights": args.weights, "level": args.level, "rank": kz.full.rank}, True)


def cmd_restrict(args):
    from treealg.kzwzw import kz_restrict
    from treealg.liealg import sl2_rep
    kz = serialize.load(args.file, serialize.decode_kz)
    conn = kz_restrict(kz, sl2_rep(kz.algebra, args.channel))
    if args.out:
        serialize.dump(kz, args.out, lambda k: {**serialize.encode_kz(k, conn), "channel": args.channel})
    return _emit([f"channel {args.channel}: rank {conn.rank}"],
                 {"command": "restrict", "channel": args.channel, "rank": conn.rank}, True)


def cmd_monodromy(args):
    from treealg.monodromy import circle_loop, transport
    conn = serialize.load(args.file, serialize.decode_connection)
    if args.path:
        path = serialize.load(args.path, serialize.decode_path)
    else:
        base = args.base or _default_base(conn.n_vars)
        path = circle_loop(base, *args.loop)
    result = transport(conn, path, tol=args.tol)
    lines = [f"monodromy after {result.step_count} steps, error estimate {result.error_estimate:.3e}"]
    lines.extend("  " + " ".join(f"{z:.12g}" for z in row) for row in result.matrix)
    return _emit(lines, {"command": "monodromy", **serialize.encode_monodromy(result)}, True)


def cmd_residue(args):
    from treealg.monodromy import monodromy_vs_residue
    conn = serialize.load(args.file, serialize.decode_connection)
    base = args.base or _default_base(conn.n_vars)
    comparison = monodromy_vs_residue(conn, args.pair, base, tol=args.tol)
    payload = {"command": "residue", "pair": list(args.pair), "transport_sign": comparison.sign,
               "supported": comparison.supported, "max_mismatch": comparison.max_mismatch}
    if not comparison.supported:
        lines = ["no constant simple-pole residue; raw monodromy:"]
        lines.extend("  " + " ".join(f"{z:.12g}" for z in row) for row in comparison.matrix)
        payload["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in comparison.matrix]
        return _emit(lines, payload, True)
    return _emit([f"largest eigenvalue mismatch {comparison.max_mismatch:.3e}"], payload,
                 comparison.max_mismatch <= args.threshold)


def cmd_regularity(args):
    from treealg.monodromy import regularity_probe
    conn = serialize.load(args.file, serialize.decode_connection)
    report = regularity_probe(conn, lines=args.lines, seed=args.seed)
    worst = report.worst
    lines = [f"{len(report.lines)} lines, seed {report.seed}: {'regular' if report.passed else 'irregular'}"]
    if worst is not None:
        lines.append(f"  largest pole order {worst.max_order} along a={worst.a}, b={worst.b}")
    return _emit(lines, {"command": "regularity", "lines": args.lines, "seed": args.seed,
                         "max_order": None if worst is None else worst.max_order}, report.passed)


def cmd_wzw(args):
    from treealg.kzwzw import wzw_instance
    from treealg.liealg import sl2
    data = wzw_instance(sl2(), args.weights, Fraction(args.level), args.max_arity)
    serialize.save_treefunctor(data, args.out)
    return _emit([f"{data} written to {args.out}"], {"command": "wzw", "labels": data.labels}, True)


def _load_gauges(path):
    def decode(obj):
        return {(tuple(entry["inputs"]), entry["infinity"]): serialize.decode_gauge(entry["gauge"]) for entry in obj}
    return serialize.load(path, decode)


def cmd_verify(args):
    from treealg.axioms import verify_iso, verify_pretree, verify_pta, verify_rationality, verify_treefunctor
    from treealg.kzwzw import wzw_algebra
    data = serialize.load_treefunctor(args.directory)
    if args.structure == "pretree":
        report = verify_pretree(data, args.order)
    elif args.structure == "treefunctor":
        report = verify_treefunctor(data, args.order)
    elif args.structure == "pta":
        report = verify_pta(wzw_algebra(data), args.order)
    elif args.structure == "rationality":
        report = verify_rationality({"data": data, "algebra": wzw_algebra(data)})
    else:
        if not args.other or not args.gauges:
            raise FormatError("iso needs --other and --gauges", "verify iso")
        report = verify_iso(data, serialize.load_treefunctor(args.other), _load_gauges(args.gauges), args.order)
    return _emit([report.summary()], {"command": "verify", "report": report.as_dict()}, report.passed)


def build_parser():
    parser = argparse.ArgumentParser(prog="treealg", description="Correlation-function co-operad toolkit")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-flat", help="check flatness of a connection")
    p.add_argument("file")
    p.add_argument("--convention", choices=["half", "paper", "standard", "both"], default="both")
    p.set_defaults(run=cmd_check_flat)

    p = sub.add_parser("degree", help="degree of a flat homogeneous connection")
    p.add_argument("file")
    p.add_argument("--channel", type=int, help="restrict a KZ file to this output weight first")
    p.add_argument("--reference", help="reference connection, default the trivial one")
    p.set_defaults(run=cmd_degree)

    p = sub.add_parser("gauge", help="apply a gauge map")
    p.add_argument("file")
    p.add_argument("--gauge", required=True)
    p.add_argument("--out")
    p.set_defaults(run=cmd_gauge)

    p = sub.add_parser("cocompose", help="structure map image of a rational function")
    p.add_argument("file")
    p.add_argument("--partition", type=_ints, required=True)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(run=cmd_cocompose)

    p = sub.add_parser("kz", help="build a KZ connection")
    p.add_argument("--algebra", default="sl2")
    p.add_argument("--weights", type=_ints, required=True, help="highest weights, twice the spins")
    p.add_argument("--level", default="1")
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_kz)

    p = sub.add_parser("restrict", help="restrict a KZ file to invariant maps into one channel")
    p.add_argument("file")
    p.add_argument("--channel", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(run=cmd_restrict)

    p = sub.add_parser("monodromy", help="parallel transport along a path or loop")
    p.add_argument("file")
    p.add_argument("--path")
    p.add_argument("--loop", type=_pair, default=(0, 1))
    p.add_argument("--base", type=_points)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(run=cmd_monodromy)

    p = sub.add_parser("residue", help="compare monodromy with the residue exponentials")
    p.add_argument("file")
    p.add_argument("--pair", type=_pair, default=(0, 1))
    p.add_argument("--base", type=_points)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--threshold", type=float, default=1e-8)
    p.set_defaults(run=cmd_residue)

    p = sub.add_parser("regularity", help="check regular singularities along random lines")
    p.add_argument("file")
    p.add_argument("--lines", type=int, default=settings.DEFAULT_LINES)
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    p.set_defaults(run=cmd_regularity)

    p = sub.add_parser("wzw", help="write the WZW tree functor over sl_2")
    p.add_argument("--weights", type=_ints, required=True)
    p.add_argument("--level", default="1")
    p.add_argument("--max-arity", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_wzw)

    p = sub.add_parser("verify", help="check tree functor axioms on a data directory")
    p.add_argument("structure", choices=["pretree", "treefunctor", "pta", "rationality", "iso"])
    p.add_argument("directory")
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--other", help="second data directory (iso)")
    p.add_argument("--gauges", help="gauge family file (iso)")
    p.set_defaults(run=cmd_verify)
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return BAD_INPUT if stop.code else PASSED
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.run(args)
    except (FormatError, TreealgError) as error:
        logger.error("%s", error)
        print(f"error: {error}", file=sys.stderr)
        return BAD_INPUT


def main():
    sys.exit(run())
