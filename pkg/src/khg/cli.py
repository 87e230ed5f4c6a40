"""`khg` command line: every subcommand prints one report and maps its
outcome onto the exit codes below.

    0  computed (property holds / object produced)
    1  property refuted (not dense, no factor, uncovered vertices, ...)
    2  usage or input-format error
    3  budget exhausted or outcome unknown
"""

from __future__ import annotations

import argparse
import json
from functools import reduce
from math import gcd
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .constructions import GenSpec, catalog, generate, write_sidecar
from .core import Hypergraph, KhgFormatError, read_khg, write_khg
from .denseness import NOTIONS, is_dense
from .embed import (DEFAULT_REACH_BUDGET, copies, count_copies, cover_check, embeddings,
                    good_pair_matrix, good_partner_exists, measure_hypotheses,
                    reachable_count)
from .lattice import robust_vectors, trans_decision
from .parallel import BudgetExceeded
from .partite import realisations
from .tiling import (SolveLimits, certificate_from_dict, factor_exists, max_tiling,
                     verify_certificate)

SCHEMA_VERSION = 1
OK, REFUTED, USAGE, UNKNOWN = 0, 1, 2, 3

# arguments that do not influence the result and stay out of the command echo
_NOT_ECHOED = {"format", "timing", "workers", "handler"}


class UsageError(Exception):
    pass


def rational(text: str) -> Fraction:
    """Exact rational from 'a/b' or a decimal such as '0.35'."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def load_graph(spec: str) -> Hypergraph:
    if spec.startswith("catalog:"):
        try:
            return catalog(spec[len("catalog:"):])
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"{spec}: no such file")
    try:
        return read_khg(path)
    except KhgFormatError as exc:
        raise UsageError(f"{spec}: {exc}") from None
    except UnicodeDecodeError:
        raise UsageError(f"{spec}: not a text file") from None


def parse_partition(text: str, n: int) -> list[list[int]]:
    """'0,1|2,3|4' -> [[0, 1], [2, 3], [4]]; the first class is V_0."""
    parts = []
    for chunk in text.split("|"):
        chunk = chunk.strip()
        try:
            parts.append([int(x) for x in chunk.split(",")] if chunk else [])
        except ValueError:
            raise UsageError(f"bad partition class {chunk!r}") from None
    flat = sorted(v for p in parts for v in p)
    if flat != list(range(n)):
        raise UsageError(f"partition must split 0..{n - 1} into disjoint classes")
    return parts


# -- subcommand handlers: return (result, exit code, exhaustive) ------------------

def _gen(args):
    if args.kind == "binomial":
        spec = GenSpec("binomial", {"n": args.n, "k": args.k, "p": str(args.p)}, args.seed)
        H = generate(spec)
    elif args.kind == "triangle-cone":
        spec = GenSpec("triangle_cone", {"n": args.n, "q": str(args.q)}, args.seed)
        H = generate(spec)
    elif args.kind == "cone-augment":
        base = load_graph(args.base)
        spec = GenSpec("cone_augment", {"base": args.base, "count": args.count})
        if args.count < 1:
            raise UsageError("--count must be at least 1")
        H = generate(spec, base)
    else:
        spec = GenSpec("catalog", {"name": args.name})
        try:
            H = generate(spec)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
    write_khg(H, args.output)
    sidecar = write_sidecar(spec, args.output)
    result = {"output": str(args.output), "sidecar": str(sidecar), "spec": json.loads(spec.to_json()),
              "k": H.k, "n": H.n, "m": H.m}
    if args.figure:
        from .plotting import degree_histogram
        result["figure"] = str(degree_histogram(H, args.figure))
    return result, OK, True


def _dense(args):
    H = load_graph(args.input)
    mode = "sampled" if args.mode in ("sample", "sampled") else "exact"
    if mode == "exact" and args.notion == "cherry":
        raise UsageError("the cherry notion has no exact mode; use --mode sample")
    if mode == "sampled" and args.seed is None:
        raise UsageError("--mode sample requires --seed")
    try:
        verdict = is_dense(H, args.p, args.mu, args.notion, mode, samples=args.samples,
                           seed=args.seed, degenerate=args.degenerate, workers=args.workers,
                           budget_bits=args.budget_bits, budget_n=args.budget_n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = verdict.to_dict()
    if args.figure and mode == "sampled":
        from .plotting import slack_trajectory
        result["figure"] = str(slack_trajectory(verdict.report.trajectory, args.figure))
    return result, OK if verdict.dense else REFUTED, mode == "exact"


def _partite(args):
    F = load_graph(args.input)
    reals = realisations(F)
    sizes = sorted({s for r in reals for s in r.sizes})
    result = {
        "k": F.k, "n": F.n, "m": F.m,
        "realisation_count": len(reals),
        "realisations": [[list(c) for c in r.classes] for r in reals[: args.show]],
        "size_set": sizes,
        "gcd": reduce(gcd, sizes) if sizes else None,
        "k_partite": bool(reals),
    }
    return result, OK if reals else REFUTED, True


def _trans(args):
    F = load_graph(args.input)
    if not 2 <= args.s <= F.k - 1:
        raise UsageError(f"--s must lie in [2, {F.k - 1}]")
    if F.n > 22:
        raise UsageError("pattern too large for bipartition enumeration (v(F) <= 22)")
    dec = trans_decision(F, args.s)
    return dec.to_dict(), OK if dec.in_trans else REFUTED, True


def _robust(args):
    H, F = load_graph(args.host), load_graph(args.pattern)
    parts = parse_partition(args.partition, H.n)
    rep = robust_vectors(H, parts, F, args.lam, args.labeled)
    result = rep.to_dict()
    if args.figure:
        from .plotting import robust_bars
        result["figure"] = str(robust_bars(rep.counts, rep.threshold, args.figure))
    return result, OK, True


def _copies(args):
    H, F = load_graph(args.host), load_graph(args.pattern)
    if args.labeled:
        shown = [list(e.mapping) for e in embeddings(F, H, args.limit).embeddings]
        total = count_copies(F, H, labeled=True)
    else:
        cps = copies(F, H)
        shown = [{"vertices": list(c.vertices), "edges": [list(e) for e in c.edges]}
                 for c in cps[: args.limit]]
        total = len(cps)
    return {"labeled": args.labeled, "count": total, "shown": shown}, OK, True


def _cover(args):
    H, F = load_graph(args.host), load_graph(args.pattern)
    unc = cover_check(F, H)
    return {"uncovered": list(unc), "covered_all": not unc}, REFUTED if unc else OK, True


def _goodpairs(args):
    H = load_graph(args.input)
    if args.vertex is not None:
        if not 0 <= args.vertex < H.n:
            raise UsageError(f"vertex must lie in [0, {H.n})")
        rep = good_partner_exists(H, args.vertex, args.eta, args.alpha, args.alpha_prime)
        result = rep.to_dict(H.k)
        code = OK if rep.partner is not None else REFUTED
    else:
        M = good_pair_matrix(H, args.eta)
        need = args.eta * H.n ** (H.k - 1)
        pairs = [[u, v] for u in range(H.n) for v in range(u + 1, H.n) if M[u][v] >= need]
        result = {"eta": str(args.eta), "required": str(need), "good_pairs": pairs,
                  "good_pair_count": len(pairs),
                  "hypotheses": measure_hypotheses(H, args.alpha, args.alpha_prime).to_dict(H.k)}
        if args.figure:
            from .plotting import good_pair_heatmap
            result["figure"] = str(good_pair_heatmap(M, need, args.figure))
        code = OK
    return result, code, True


def _reach(args):
    H, F = load_graph(args.host), load_graph(args.pattern)
    for w in (args.u, args.v):
        if not 0 <= w < H.n:
            raise UsageError(f"vertex {w} outside [0, {H.n})")
    if args.u == args.v:
        raise UsageError("--u and --v must differ")
    rep = reachable_count(H, F, args.u, args.v, args.i, args.limit, args.budget, args.workers)
    result = rep.to_dict()
    if args.beta is not None:
        need = args.beta * H.n ** (args.i * F.n - 1)
        result["required"] = str(need)
        result["reachable"] = rep.count >= need
        return result, OK if rep.count >= need else REFUTED, not rep.truncated
    return result, OK, not rep.truncated


def _limits(args) -> SolveLimits:
    return SolveLimits.from_env(args.nodes, args.seconds)


def _factor(args):
    H, F = load_graph(args.host), load_graph(args.pattern)
    res = factor_exists(F, H, _limits(args))
    result = res.to_dict(F)
    if args.output and res.certificate is not None:
        Path(args.output).write_text(
            json.dumps(res.certificate.to_dict(F), sort_keys=True, indent=2) + "\n", encoding="utf-8")
        result["certificate_file"] = str(args.output)
    code = {"yes": OK, "no": REFUTED}.get(res.status, UNKNOWN)
    return result, code, res.exhaustive


def _tile(args):
    H, F = load_graph(args.host), load_graph(args.pattern)
    res = max_tiling(F, H, _limits(args))
    return res.to_dict(F), OK if res.exhaustive else UNKNOWN, res.exhaustive


def _verify(args):
    H, F = load_graph(args.host), load_graph(args.pattern)
    try:
        data = json.loads(Path(args.certificate).read_text(encoding="utf-8"))
        cert = certificate_from_dict(data, F)
    except FileNotFoundError:
        raise UsageError(f"{args.certificate}: no such file") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{args.certificate}: malformed certificate ({exc})") from None
    try:
        ok = verify_certificate(F, H, cert)
    except (ValueError, TypeError, IndexError):
        ok = False
    return {"valid": ok}, OK if ok else REFUTED, True


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--workers", type=int, default=1, help="worker processes for exact kernels")
    common.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")

    parser = argparse.ArgumentParser(prog="khg", description="F-factors in quasi-random k-graphs")
    parser.add_argument("--version", action="version", version=f"khg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, handler, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    def host_pattern(p):
        p.add_argument("host", help="host .khg file or catalog:NAME")
        p.add_argument("pattern", help="pattern .khg file or catalog:NAME")

    g = cmd("gen", _gen, "generate a hypergraph")
    gsub = g.add_subparsers(dest="kind", required=True)
    gb = gsub.add_parser("binomial", parents=[common])
    gb.add_argument("--n", type=int, required=True)
    gb.add_argument("--k", type=int, default=3)
    gb.add_argument("--p", type=rational, required=True)
    gb.add_argument("--seed", type=int, required=True)
    gt = gsub.add_parser("triangle-cone", parents=[common])
    gt.add_argument("--n", type=int, required=True)
    gt.add_argument("--q", type=rational, default=Fraction(1, 2))
    gt.add_argument("--seed", type=int, required=True)
    ga = gsub.add_parser("cone-augment", parents=[common])
    ga.add_argument("base")
    ga.add_argument("--count", type=int, required=True)
    gc = gsub.add_parser("catalog", parents=[common])
    gc.add_argument("name")
    for p in (gb, gt, ga, gc):
        p.add_argument("-o", "--output", required=True)
        p.add_argument("--figure", help="write a degree histogram to this path")

    d = cmd("dense", _dense, "minimum discrepancy slack and density verdict")
    d.add_argument("input")
    d.add_argument("--notion", choices=NOTIONS, default="dot")
    d.add_argument("--p", type=rational, required=True)
    d.add_argument("--mu", type=rational, required=True)
    d.add_argument("--mode", choices=("exact", "sample", "sampled"), default="exact")
    d.add_argument("--samples", type=int, default=64)
    d.add_argument("--seed", type=int)
    d.add_argument("--degenerate", action="store_true", help="admit tuples with repeated entries")
    d.add_argument("--budget-bits", type=int, default=26)
    d.add_argument("--budget-n", type=int, default=20)
    d.add_argument("--figure", help="best-so-far slack curve (sampled mode)")

    p = cmd("partite", _partite, "k-partite realisations, S(F) and its gcd")
    p.add_argument("input")
    p.add_argument("--show", type=int, default=20, help="number of realisations listed")

    t = cmd("trans", _trans, "transferral decision from shadow-disjoint bipartitions")
    t.add_argument("input")
    t.add_argument("--s", type=int, default=2)

    r = cmd("robust", _robust, "copies of F per index vector")
    host_pattern(r)
    r.add_argument("--partition", required=True, help="classes like '0,1|2,3|4,5'; the first is V_0")
    r.add_argument("--lambda", dest="lam", type=int, default=1, help="copy-count threshold")
    r.add_argument("--labeled", action="store_true")
    r.add_argument("--figure")

    c = cmd("copies", _copies, "copies or embeddings of F in H")
    host_pattern(c)
    c.add_argument("--limit", type=int, default=50)
    c.add_argument("--labeled", action="store_true")

    cv = cmd("cover", _cover, "vertices of H in no copy of F")
    host_pattern(cv)

    gp = cmd("goodpairs", _goodpairs, "eta-good pairs")
    gp.add_argument("input")
    gp.add_argument("--eta", type=rational, required=True)
    gp.add_argument("--vertex", type=int)
    gp.add_argument("--alpha", type=rational)
    gp.add_argument("--alpha-prime", type=rational)
    gp.add_argument("--figure")

    rc = cmd("reach", _reach, "count reachability witness sets")
    host_pattern(rc)
    rc.add_argument("--u", type=int, required=True)
    rc.add_argument("--v", type=int, required=True)
    rc.add_argument("--i", type=int, default=1)
    rc.add_argument("--limit", type=int)
    rc.add_argument("--beta", type=rational)
    rc.add_argument("--budget", type=int, default=DEFAULT_REACH_BUDGET)

    for name, handler, text in (("factor", _factor, "decide whether H has an F-factor"),
                                ("tile", _tile, "maximum F-tiling")):
        s = cmd(name, handler, text)
        host_pattern(s)
        s.add_argument("--nodes", type=int)
        s.add_argument("--seconds", type=float)
        if name == "factor":
            s.add_argument("-o", "--output", help="write the certificate JSON here")

    v = cmd("verify", _verify, "check a tiling certificate")
    host_pattern(v)
    v.add_argument("certificate")
    return parser


def _echo(args) -> dict:
    out = {}
    for key, val in sorted(vars(args).items()):
        if key in _NOT_ECHOED:
            continue
        out[key] = str(val) if isinstance(val, Fraction) else val
    return out


def _table(result, prefix="") -> list[str]:
    lines = []
    for key in sorted(result):
        val = result[key]
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            lines.extend(_table(val, name + "."))
        elif isinstance(val, str):
            lines.append(f"{name}\t{val}")
        else:
            lines.append(f"{name}\t{json.dumps(val, sort_keys=True, separators=(',', ':'))}")
    return lines


def render(report: dict, fmt: str) -> str:
    if fmt == "table":
        return "\n".join(_table(report)) + "\n"
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def run(argv=None) -> tuple[dict | None, int]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return None, USAGE if exc.code else OK
    if getattr(args, "workers", 1) < 1:
        print("khg: error: --workers must be at least 1", file=sys.stderr)
        return None, USAGE
    start = time.perf_counter()
    try:
        result, code, exhaustive = args.handler(args)
    except (UsageError, ValueError) as exc:
        # parameter validation in the library raises ValueError
        print(f"khg: error: {exc}", file=sys.stderr)
        return None, USAGE
    except BudgetExceeded as exc:
        result, code, exhaustive = {"status": "refused", "reason": str(exc)}, UNKNOWN, False
    report = {"schema_version": SCHEMA_VERSION, "command": _echo(args),
              "result": result, "exhaustive": exhaustive, "exit_code": code}
    if args.timing:
        report["seconds"] = round(time.perf_counter() - start, 3)
    print(render(report, args.format), end="")
    return report, code


def main(argv=None) -> int:
    return run(argv)[1]


if __name__ == "__main__":
    sys.exit(main())
