"""Evaluation of corpus cases with an on-disk cache."""

from __future__ import annotations

import hashlib
import json
import os
import random
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .. import __version__
from ..mlde import LODE, verify_lode
from ..qseries import QExp, QSeriesError, equality_to_order, max_denominator
from .grammar import BinOp, Call, Case, Neg, Node, Num, Pow, Str, pretty
from .registry import NEEDS_CALL, NEEDS_EVALUATOR, REGISTRY, bind

ENGINE_VERSION = f"qchar-{__version__}"
DEFAULT_PAD = Fraction(2)
MAX_RETRIES = 5


class CacheAuditError(RuntimeError):
    pass


class EvaluationError(RuntimeError):
    pass


def default_cache_dir() -> Path:
    env = os.environ.get("QCHAR_CACHE_DIR")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "qchar"


class Cache:
    """Content-addressed QExp store; writes go through a temp file and an atomic rename."""

    def __init__(self, root: Path | str | None, audit_rate: float = 0.0, seed: int | None = None):
        self.root = Path(root) if root is not None else None
        self.audit_rate = audit_rate
        self.rng = random.Random(seed)
        self.hits = 0
        self.misses = 0
        self.audited = 0
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(name: str, args: str, prec: Fraction) -> str:
        payload = json.dumps([ENGINE_VERSION, name, args, str(prec), max_denominator()])
        return hashlib.sha256(payload.encode()).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> QExp | None:
        if self.root is None:
            return None
        try:
            data = json.loads(self._path(key).read_text())
        except (OSError, ValueError):
            return None
        if data.get("engine") != ENGINE_VERSION:
            return None
        return QExp.from_record(data["value"])

    def put(self, key: str, value: QExp) -> None:
        if self.root is None:
            return
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps({"engine": ENGINE_VERSION, "value": value.to_record()}, sort_keys=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def lookup(self, key: str, compute):
        hit = self.get(key)
        if hit is not None:
            self.hits += 1
            if self.audit_rate and self.rng.random() < self.audit_rate:
                self.audited += 1
                fresh = compute()
                if fresh.to_record() != hit.to_record():
                    raise CacheAuditError(f"cache entry {key} differs from recomputation")
            return hit
        self.misses += 1
        value = compute()
        self.put(key, value)
        return value


class Evaluator:
    def __init__(self, cache: Cache | None = None):
        self.cache = cache or Cache(None)

    def eval(self, node: Node, prec) -> Any:
        prec = Fraction(prec)
        if isinstance(node, Num):
            return QExp.constant(node.value)
        if isinstance(node, Str):
            raise EvaluationError(f"string {node.value!r} is not a series")
        if isinstance(node, Neg):
            return -self.eval(node.operand, prec)
        if isinstance(node, Pow):
            base = self.eval(node.base, prec)
            return base.power(node.exponent)
        if isinstance(node, BinOp):
            a = self.eval(node.left, prec)
            b = self.eval(node.right, prec)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            return a * b.invert()
        if isinstance(node, Call):
            return self.call(node, prec)
        raise EvaluationError(f"cannot evaluate {node!r}")

    def call(self, node: Call, prec: Fraction) -> Any:
        b = REGISTRY.get(node.name)
        if b is None:
            raise EvaluationError(f"unknown builder {node.name!r}")
        args = bind(node)
        head = (self,) if node.name in NEEDS_EVALUATOR else ()
        tail = (node,) if node.name in NEEDS_CALL else ()
        if b.variadic:
            compute = lambda: b.fn(*head, prec, args, *tail)
        else:
            compute = lambda: b.fn(*head, prec, *args, *tail)
        if not b.cacheable or b.returns != "series":
            return compute()
        key = Cache.key(node.name, pretty(node), prec)
        return self.cache.lookup(key, compute)

    def series(self, node: Node, order: Fraction) -> QExp:
        """Evaluate with growing padding until the value is exact below ``order``."""
        pad = DEFAULT_PAD
        value = None
        for _ in range(MAX_RETRIES):
            value = self.eval(node, order + pad)
            if not isinstance(value, QExp):
                raise EvaluationError("expected a series")
            if value.prec is None or value.prec >= order:
                return value
            pad = pad * 2 + (order - value.prec)
        return value


@dataclass
class CaseResult:
    id: str
    kind: str
    order: int
    verdict: str
    witness: dict | None = None
    available: str | None = None
    message: str | None = None
    seconds: float = 0.0
    hits: int = 0
    misses: int = 0
    line: int = 0

    @property
    def ok(self) -> bool:
        return self.verdict == "equal"

    def record(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "order": self.order,
            "verdict": self.verdict,
            "witness": self.witness,
            "available": self.available,
            "message": self.message,
            "timing": {"seconds": round(self.seconds, 4), "cache_hits": self.hits,
                       "cache_misses": self.misses},
        }


def _frac_text(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def evaluate_case(case: Case, order_default: int = 30, cache: Cache | None = None) -> CaseResult:
    cache = cache or Cache(None)
    ev = Evaluator(cache)
    order = case.order if case.order is not None else order_default
    N = Fraction(order)
    h0, m0 = cache.hits, cache.misses
    t0 = time.perf_counter()
    res = CaseResult(case.id, case.kind, order, "error", line=case.line)
    try:
        if case.kind == "annihilates":
            op = ev.eval(case.lhs, N)
            if not isinstance(op, LODE):
                raise EvaluationError("left side of 'annihilates' must be an operator")
            f = ev.series(case.rhs, N + 2)
            verdict = verify_lode(op, f, N)
        else:
            lhs = ev.series(case.lhs, N)
            rhs = ev.series(case.rhs, N) if case.kind == "equal" else QExp.zero()
            verdict = equality_to_order(lhs, rhs, N)
        res.verdict = verdict.kind
        if verdict.kind == "first_difference":
            res.witness = {"exponent": _frac_text(verdict.exponent), "lhs": _frac_text(verdict.lhs),
                           "rhs": _frac_text(verdict.rhs)}
        if verdict.available is not None:
            res.available = _frac_text(verdict.available)
    except CacheAuditError:
        raise
    except (QSeriesError, ValueError, ArithmeticError, EvaluationError, RuntimeError) as exc:
        res.verdict = "error"
        res.message = f"{case.id}: {type(exc).__name__}: {exc}"
    res.seconds = time.perf_counter() - t0
    res.hits = cache.hits - h0
    res.misses = cache.misses - m0
    return res
