"""Command-line entry point: ``rampart <command> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .algebra import PartitionAlgebra, element_from_json
from .config import STRATEGIES, load_config
from .errors import CapExceededError, ValidationError
from .ramified import (
    CHAIN2,
    Poset,
    chain_poset,
    count_chain2,
    envelope,
    enumerate_basis,
    enumerate_ramified,
    prop_indices,
    prop_profile,
)
from . import setpart as sp
from .reptheory import (
    count_simples,
    factored_gram_det,
    gram_trivial,
    total_simples,
)
from .rings import det_exact, det_numeric
from .transfer import (
    EdgeHamiltonian,
    gnuplot_script,
    max_residual,
    parse_graph,
    partition_function,
    roots_csv,
    zeros,
)

EXIT_OK, EXIT_VALIDATION, EXIT_CAP = 0, 2, 3
SLOW_GRAM_N = 4


def _fmt_lam(lam) -> str:
    return "(" + ",".join(str(v) for v in lam) + ")"


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated integers, got {text!r}") from None


def _rational_list(text: str) -> list:
    out = []
    for x in text.split(","):
        try:
            v = Fraction(x.strip())
        except ValueError:
            raise ValidationError(f"expected comma-separated rationals, got {text!r}") from None
        out.append(int(v) if v.denominator == 1 else v)
    return out


def _load_poset(args) -> Poset:
    if args.poset_file:
        try:
            with open(args.poset_file) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot read poset file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"poset file line {exc.lineno}: {exc.msg}") from None
        try:
            d = int(data["d"])
            rel = [(int(a), int(b)) for a, b in data.get("relations", [])]
        except (KeyError, TypeError, ValueError):
            raise ValidationError('poset file must look like {"d": 3, "relations": [[1, 2], ...]}') from None
        return Poset.from_relations(d, rel)
    return chain_poset(args.chain)


def cmd_basis(args, cfg, out) -> int:
    poset = _load_poset(args)
    if args.plain is not None:
        m = args.plain
        rows = enumerate_ramified(sp.plain(m), poset, cap=cfg.basis_cap)
        print(f"ground\tplain:{m}", file=out)
        print(f"enumerated\t{len(rows)}", file=out)
        if poset == CHAIN2:
            print(f"formula\t{count_chain2(m)}", file=out)
        return EXIT_OK
    n = args.n
    if n is None:
        raise ValidationError("basis needs n (or --plain m)")
    basis = enumerate_basis(n, poset, cap=cfg.basis_cap)
    print(f"n\t{n}", file=out)
    print(f"total\t{len(basis)}", file=out)
    if poset == CHAIN2:
        sizes: dict = {}
        for a in basis:
            lam = prop_profile(a).lam
            sizes[lam] = sizes.get(lam, 0) + 1
        print("lambda\tsize", file=out)
        for lam in sorted(sizes, key=lambda x: (envelope(x), x)):
            print(f"{_fmt_lam(lam)}\t{sizes[lam]}", file=out)
    return EXIT_OK


def _read_text(path: str | None) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None


def cmd_mul(args, cfg, out) -> int:
    text = _read_text(args.file)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if isinstance(data, dict):
        if "a" not in data or "b" not in data:
            raise ValidationError('expected {"a": element, "b": element}')
        pair = [data["a"], data["b"]]
    elif isinstance(data, list) and len(data) == 2 and all(isinstance(x, list) for x in data):
        pair = data
    else:
        raise ValidationError("expected a pair of elements")
    first = element_from_json(pair[0])
    n = first.algebra.n
    q = _rational_list(args.q) if args.q else None
    alg = PartitionAlgebra(n, first.algebra.poset, q=q)
    a = element_from_json(pair[0], alg)
    b = element_from_json(pair[1], alg)
    json.dump((a * b).to_json(), out, indent=None)
    out.write("\n")
    return EXIT_OK


def cmd_gram_det(args, cfg, out) -> int:
    n = args.n
    if n < 0:
        raise ValidationError("n must be >= 0")
    if args.at:
        point = _rational_list(args.at)
        if len(point) != 2:
            raise ValidationError("--at needs Q1,Q2")
        G = gram_trivial(n)
        value = det_numeric(G.evaluate(point))
        print(value, file=out)
        return EXIT_OK
    if n >= SLOW_GRAM_N and not args.slow:
        raise CapExceededError(f"symbolic gram determinant at n={n} is a long computation; pass --slow")
    G = gram_trivial(n)
    strategy = args.strategy or cfg.det_strategy
    det = det_exact(G, strategy=strategy, threads=cfg.threads)
    print(det, file=out)
    if args.check:
        try:
            ok = det == factored_gram_det(n)
        except ValidationError:
            print("check\tno closed form", file=sys.stderr)
        else:
            print(f"check\t{'match' if ok else 'MISMATCH'}", file=sys.stderr)
            if not ok:
                return 1
    return EXIT_OK


def cmd_simples(args, cfg, out) -> int:
    n = args.n
    if n < 0:
        raise ValidationError("n must be >= 0")
    print("lambda\tenv\tsimples", file=out)
    for lam in sorted(prop_indices(n), key=lambda x: (envelope(x), x)):
        print(f"{_fmt_lam(lam)}\t{envelope(lam)}\t{count_simples(lam)}", file=out)
    print(f"total\t\t{total_simples(n)}", file=out)
    return EXIT_OK


def cmd_zeros(args, cfg, out) -> int:
    H = parse_graph(args.H)
    f = EdgeHamiltonian.from_half(args.q, _int_list(args.f))
    pf = partition_function(H, args.l, f, args.bc)
    tol = args.tol if args.tol is not None else cfg.root_tol
    roots = zeros(pf, tol)
    csv_text = roots_csv(roots)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
    else:
        out.write(csv_text)
    if args.gnuplot:
        if not args.out:
            raise ValidationError("--gnuplot needs --out for the data file")
        title = f"{args.H} x {args.bc} {args.l}, q={args.q}, f={args.f}"
        with open(args.gnuplot, "w") as fh:
            fh.write(gnuplot_script(args.out, title))
    info = sys.stderr if not args.out else out
    print(f"degree\t{pf.degree}", file=info)
    print(f"Z(1)\t{pf.at_one()}", file=info)
    print(f"max_residual\t{max_residual(pf, roots):.3e}", file=info)
    if args.poly:
        print(f"Z\t{pf.poly}", file=info)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rampart", description="Ramified partition algebra computations.")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: RAMPART_THREADS or 1)")
    p.add_argument("--config", default=None, help="key = value settings file")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("basis", help="basis sizes, per propagating index")
    b.add_argument("n", type=int, nargs="?")
    b.add_argument("--plain", type=int, default=None, metavar="M", help="count ramified partitions of a plain M-set")
    b.add_argument("--chain", type=int, default=2, metavar="D", help="chain poset depth (default 2)")
    b.add_argument("--poset-file", default=None, help='JSON {"d": D, "relations": [[s, t], ...]}, 1-based')
    b.set_defaults(func=cmd_basis)

    m = sub.add_parser("mul", help="multiply two JSON elements")
    m.add_argument("file", nargs="?", default=None, help="JSON file (default stdin)")
    m.add_argument("--q", default=None, help="numeric parameters Q1,Q2,... (default symbolic)")
    m.set_defaults(func=cmd_mul)

    g = sub.add_parser("gram-det", help="determinant of the lambda=() gram matrix")
    g.add_argument("n", type=int)
    g.add_argument("--strategy", choices=STRATEGIES, default=None)
    g.add_argument("--slow", action="store_true", help=f"allow the symbolic determinant for n >= {SLOW_GRAM_N}")
    g.add_argument("--at", default=None, metavar="Q1,Q2", help="evaluate at a numeric point instead")
    g.add_argument("--check", action="store_true", help="compare with the recorded closed form")
    g.set_defaults(func=cmd_gram_det)

    s = sub.add_parser("simples", help="simple module label counts (TSV)")
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_simples)

    z = sub.add_parser("zeros", help="partition function zeros in u = exp(beta)")
    z.add_argument("--H", required=True, help="layer graph: path:L, cycle:L or point")
    z.add_argument("--l", type=int, required=True, help="number of layers")
    z.add_argument("--q", type=int, required=True, help="number of spin states")
    z.add_argument("--f", required=True, help="f(0..q//2), comma separated; reflected evenly")
    z.add_argument("--bc", choices=("free", "periodic"), default="free")
    z.add_argument("--out", default=None, help="CSV output (re,im); default stdout")
    z.add_argument("--gnuplot", default=None, help="write a gnuplot script plotting --out")
    z.add_argument("--tol", type=float, default=None)
    z.add_argument("--poly", action="store_true", help="also print Z(u)")
    z.set_defaults(func=cmd_zeros)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, {"threads": args.threads})
        cfg.apply()
        return args.func(args, cfg, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CapExceededError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
