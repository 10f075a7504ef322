"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 inapplicable height,
3 bad reduction, 4 counting budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from . import lattice as lat
from . import numtheory as nt
from . import predictor as pr
from . import surface as sf
from .errors import BadReduction, BudgetExceeded, InapplicableHeight, K3FrobError

EXIT_OK, EXIT_INVALID, EXIT_INAPPLICABLE, EXIT_BAD_REDUCTION, EXIT_BUDGET = 0, 1, 2, 3, 4
CACHE_ENV = "K3FROB_CACHE"


def _emit(args, command, inputs, outputs, text_lines, provenance=None, started=None):
    if args.json:
        envelope = {
            "command": command,
            "inputs": inputs,
            "outputs": outputs,
            "provenance": dict(provenance or {}, elapsed_s=round(time.time() - (started or time.time()), 4)),
            "version": __version__,
        }
        print(json.dumps(envelope, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _uniqueness_notes(n, p):
    notes = []
    phi = nt.euler_phi(n)
    if n == 60:
        notes.append("note: for order 60 the K3 surface carrying such an automorphism is unique "
                     "in every characteristic other than 2")
    elif 10 < phi < 22 and p is not None and p % n == n - 1:
        notes.append(f"note: since p = -1 mod {n}, the K3 surface with a purely non-symplectic "
                     f"automorphism of order {n} is unique up to isomorphism (Artin invariant 1)")
    return notes


def cmd_predict(args):
    started = time.time()
    q = pr.PredictionQuery(args.order, args.prime, args.picard_min)
    inv = pr.predict(q)
    lines = [f"N = {args.order}, p = {args.prime} (p = {args.prime % args.order} mod {args.order}): "
             f"{inv.describe()}"]
    lines += _uniqueness_notes(args.order, args.prime)
    _emit(args, "predict", {"order": args.order, "prime": args.prime, "picard_min": args.picard_min},
          inv.to_dict(), lines, started=started)
    return EXIT_OK


def _group_sort_key(n, entry, residues):
    order = nt.mult_order(residues[0], n)
    supersingular = isinstance(entry, pr.FrobeniusInvariant) and entry.is_supersingular
    return (order, 0 if supersingular else 1)


def _plain(entry):
    if isinstance(entry, pr.FrobeniusInvariant):
        if entry.is_supersingular:
            if entry.artin_invariant is None:
                return "supersingular"
            return f"supersingular of Artin invariant {entry.artin_invariant}"
        return "ordinary" if entry.height == 1 else f"height {entry.height}"
    return pr.describe_entry(entry)


def cmd_table(args):
    started = time.time()
    n = args.order
    table = pr.congruence_table(n)
    groups = sorted(pr.group_table(table), key=lambda g: _group_sort_key(n, g[0], g[1]))
    lines = []
    for entry, residues in groups:
        lines.append(f"{_plain(entry)} if p ≡ {', '.join(map(str, residues))} modulo {n}")
    sample = next(iter(table.values()))
    if isinstance(sample, pr.FrobeniusInvariant) and sample.conditional:
        lines.append(f"(conditional: phi({n}) = {nt.euler_phi(n)} <= 10, "
                     f"assumes Picard rank >= {22 - nt.euler_phi(n)})")
    elif any(isinstance(e, pr.FrobeniusInvariant) and e.certified_artin for e in table.values()):
        lines.append("(Artin invariants certified: phi(N) > 10)")
    lines += _uniqueness_notes(n, None)
    outputs = {
        "groups": [{"invariant": e.to_dict() if isinstance(e, pr.FrobeniusInvariant)
                    else {"kind": "Inapplicable", "order": e[1]},
                    "description": _plain(e), "residues": res} for e, res in groups],
    }
    _emit(args, "table", {"order": n}, outputs, lines, started=started)
    return EXIT_OK


def _fmt_v(v):
    return "inf" if v == float("inf") else str(v)


def cmd_verify(args):
    started = time.time()
    spec = sf.load_surface(args.surface)
    cache_dir = args.cache or os.environ.get(CACHE_ENV)
    print(f"verifying {spec.label} at p = {args.prime}, r = 1..{args.max_degree}", file=sys.stderr)
    res = sf.verify(spec, args.prime, args.max_degree, method=args.method, cache_dir=cache_dir,
                    workers=args.threads, picard_lower_bound=args.picard_min)
    verdict = res.verdict
    lines = [f"surface {spec.label}, p = {args.prime}: predicted {verdict.predicted.describe()}",
             f"{'r':>3} {'W_r':>22} {'b_r':>16} {'v_r':>4} {'bound':>5}  status"]
    for rec, row in zip(res.records, verdict.rows):
        lines.append(f"{rec.r:>3} {rec.W:>22} {rec.b:>16} {_fmt_v(rec.v):>4} {row.bound:>5}  {row.status}")
    lines.append(f"verdict: {verdict.summary}")
    outputs = {"verdict": verdict.to_dict(),
               "records": [json.loads(rec.to_json()) for rec in res.records]}
    provenance = {"cache_dir": cache_dir, "cache_hits": res.cache_hits,
                  "methods": [rec.method for rec in res.records]}
    _emit(args, "verify", {"surface": spec.to_dict(), "prime": args.prime,
                           "max_degree": args.max_degree, "method": args.method},
          outputs, lines, provenance, started)
    return EXIT_OK


def cmd_admissible(args):
    orders = sorted(pr.admissible_orders(args.prime, args.sigma))
    lines = [f"orders dividing {args.prime}^{args.sigma} + 1 = {args.prime**args.sigma + 1}:",
             " ".join(map(str, orders))]
    _emit(args, "admissible", {"prime": args.prime, "sigma": args.sigma}, {"orders": orders}, lines)
    return EXIT_OK


def cmd_lattice(args):
    L = lat.builtin(args.name)
    disc = lat.discriminant(L)
    sig = lat.signature(L)
    lines = [f"{L.name}: rank {L.rank}, discriminant {disc}, signature {sig}, "
             f"{'even' if L.is_even else 'odd'}",
             json.dumps(L.to_json())]
    _emit(args, "lattice", {"name": args.name},
          {"name": L.name, "rank": L.rank, "discriminant": disc, "signature": list(sig),
           "even": L.is_even, "gram": L.to_json()}, lines)
    return EXIT_OK


def cmd_orbit(args):
    orb = nt.eigenvalue_orbit(args.order, args.prime, args.depth)
    lines = [f"{len(orb)} residues mod {args.order}: {' '.join(map(str, orb.sorted()))}",
             f"closed under: {', '.join(orb.closure)}"]
    _emit(args, "orbit", {"order": args.order, "prime": args.prime, "depth": args.depth},
          {"residues": orb.sorted(), "closure": list(orb.closure)}, lines)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="k3frob", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--json", action="store_true", help="emit a JSON report envelope")
        p.set_defaults(func=func)
        return p

    p = add("predict", cmd_predict, "height or Artin invariant from (N, p)")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--picard-min", type=int)

    p = add("table", cmd_table, "invariants for every residue class mod N")
    p.add_argument("--order", type=int, required=True)

    p = add("verify", cmd_verify, "check a prediction against point counts")
    p.add_argument("--surface", required=True, help="surface JSON file or bundled name (x66)")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--max-degree", type=int, default=1)
    p.add_argument("--method", choices=["auto", "brute", "orbit"], default="auto")
    p.add_argument("--cache", help=f"count cache directory (default ${CACHE_ENV})")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--picard-min", type=int)

    p = add("admissible", cmd_admissible, "orders dividing p^sigma + 1")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--sigma", type=int, required=True)

    p = add("lattice", cmd_lattice, "Gram matrix and invariants of U, E8 or K3")
    p.add_argument("--name", required=True, choices=["U", "E8", "K3"])

    p = add("orbit", cmd_orbit, "exponents +-p^-i mod N forced as eigenvalues")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InapplicableHeight as exc:
        print(f"error: InapplicableHeight: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except BadReduction as exc:
        print(f"error: BadReduction: {exc}", file=sys.stderr)
        return EXIT_BAD_REDUCTION
    except BudgetExceeded as exc:
        print(f"error: BudgetExceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (K3FrobError, FileNotFoundError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
