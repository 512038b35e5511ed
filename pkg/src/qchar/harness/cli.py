"""Command line front end: verify, expand, mlde-find."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import resources
from pathlib import Path

from ..characters import CharacterLabel
from ..mlde import CoefficientBasis, NotFound, find_lode
from ..qseries import QExp
from .evaluator import Cache, CacheAuditError, Evaluator, default_cache_dir, evaluate_case
from .grammar import CorpusError, parse_corpus, parse_expr
from .registry import REGISTRY

SHIPPED = ("paper-core.idn", "jacobi-ct.idn", "mlde.idn", "psl.idn", "osp.idn")


class UsageError(Exception):
    pass


def shipped_corpus_dir() -> Path:
    return Path(str(resources.files("qchar") / "corpus"))


def resolve_corpus(arg: str) -> list[Path]:
    """A file, a directory of .idn files, 'shipped', or the name of a shipped file."""
    if arg == "shipped":
        return [shipped_corpus_dir() / name for name in SHIPPED]
    p = Path(arg)
    if p.is_dir():
        return sorted(p.glob("*.idn"))
    if p.is_file():
        return [p]
    candidate = shipped_corpus_dir() / p.name
    if candidate.is_file():
        return [candidate]
    if p.name in ("paper.idn", "paper"):
        return resolve_corpus("shipped")
    raise UsageError(f"no such corpus file: {arg}")


def _worker(args):
    case, order_default, cache_dir, audit, seed = args
    cache = Cache(cache_dir, 0.05 if audit else 0.0, seed)
    return evaluate_case(case, order_default, cache)


def run_verify(ns) -> int:
    files = []
    for f in ns.files or ["shipped"]:
        files.extend(resolve_corpus(f))
    cases = []
    seen = set()
    for path in files:
        try:
            parsed = parse_corpus(path.read_text())
        except CorpusError as exc:
            raise UsageError(f"{path}: {exc}") from exc
        for c in parsed:
            if c.id in seen:
                raise UsageError(f"{path}: duplicate case id {c.id!r}")
            seen.add(c.id)
            cases.append(c)
    cache_dir = None if ns.no_cache else str(ns.cache or default_cache_dir())
    work = [(c, ns.order_default, cache_dir, ns.audit, i) for i, c in enumerate(cases)]
    try:
        if ns.jobs > 1 and len(work) > 1:
            with ProcessPoolExecutor(max_workers=ns.jobs) as pool:
                results = list(pool.map(_worker, work))
        else:
            results = [_worker(w) for w in work]
    except CacheAuditError as exc:
        print(f"cache audit failed: {exc}", file=sys.stderr)
        return 3
    results.sort(key=lambda r: r.id)
    out = sys.stdout
    for r in results:
        if ns.format == "report":
            out.write(json.dumps(r.record(), sort_keys=True) + "\n")
        else:
            status = "PASS" if r.ok else "FAIL"
            detail = {"equal": f"equal below q^{r.order}"}.get(r.verdict, r.verdict)
            if r.witness:
                w = r.witness
                detail = f"first difference at q^{w['exponent']}: {w['lhs']} != {w['rhs']}"
            elif r.verdict == "insufficient":
                detail = f"insufficient: known below q^{r.available} only"
            elif r.message:
                detail = r.message
            out.write(f"{status} {r.id:<28} {detail}  ({r.seconds:.2f}s)\n")
    failed = [r for r in results if not r.ok]
    if ns.format == "human":
        out.write(f"{len(results) - len(failed)}/{len(results)} cases verified\n")
    return 0 if not failed else 1


def _target(text: str, order: Fraction, ev: Evaluator) -> QExp:
    if text.startswith(("ch:", "sch:")):
        try:
            label = CharacterLabel.parse(text)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return label.evaluate(order)
    try:
        node = parse_expr(text, REGISTRY.keys())
    except CorpusError as exc:
        raise UsageError(str(exc)) from exc
    return ev.series(node, order)


def run_expand(ns) -> int:
    ev = Evaluator(Cache(None))
    order = Fraction(ns.order)
    f = _target(ns.target, order, ev)
    if ns.format == "report":
        coeffs = []
        if not f.is_zero:
            e = f.valuation
            step = Fraction(1, f.step)
            while e < order and len(coeffs) < ns.count:
                c = f.coefficient(e)
                coeffs.append(str(c))
                e += step
        rec = {
            "target": ns.target,
            "order": str(order),
            "valuation": None if f.is_zero else str(f.valuation),
            "step": None if f.is_zero else f"1/{f.step}",
            "coefficients": coeffs,
        }
        print(json.dumps(rec, sort_keys=True))
    else:
        print(f.format(ns.count))
    return 0


def run_mlde_find(ns) -> int:
    ev = Evaluator(Cache(None))
    order = Fraction(ns.order)
    f = _target(ns.target, order + 2, ev)
    try:
        basis = CoefficientBasis.of(ns.basis)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = find_lode(f, ns.degree, basis, "raw" if ns.raw else "serre", order)
    if isinstance(res, NotFound):
        print(res.describe())
        return 1
    print(res.text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qchar", description="Exact q-series identity verification")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify a corpus of identities")
    v.add_argument("files", nargs="*", help="corpus files or directories (default: the shipped corpus)")
    v.add_argument("--order-default", type=int, default=30)
    v.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    v.add_argument("--cache", default=None, help="cache directory (env QCHAR_CACHE_DIR)")
    v.add_argument("--no-cache", action="store_true")
    v.add_argument("--audit", action="store_true", help="recompute 5%% of cache hits")
    v.add_argument("--format", choices=("human", "report"), default="human")
    v.set_defaults(run=run_verify)

    e = sub.add_parser("expand", help="expand an expression or character label")
    e.add_argument("target")
    e.add_argument("--order", type=int, required=True)
    e.add_argument("--count", type=int, default=10)
    e.add_argument("--format", choices=("human", "report"), default="human")
    e.set_defaults(run=run_expand)

    m = sub.add_parser("mlde-find", help="search for a monic MLDE")
    m.add_argument("target")
    m.add_argument("--degree", type=int, required=True)
    m.add_argument("--basis", required=True, help="comma separated generators, e.g. E4,E6")
    m.add_argument("--order", type=int, required=True)
    m.add_argument("--raw", action="store_true", help="raw q d/dq form instead of Serre form")
    m.set_defaults(run=run_mlde_find)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.run(ns)
    except UsageError as exc:
        print(f"qchar: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
