"""Point counts of Weierstrass elliptic K3 surfaces and slope analysis.

A surface is y^2 = x^3 + a4(t) x + a6(t) over the t-line with
deg a4 <= 8 and deg a6 <= 12; the fiber at infinity uses
a4*(s) = s^8 a4(1/s), a6*(s) = s^12 a6(1/s) at s = 0.

W_r is the number of points of this Weierstrass model over F_{p^r},
every fiber counted projectively (singular points included), and
b_r = W_r - 1 - p^{2r}. The fiber-component and singular-point
corrections separating W_r from the count of the smooth K3 are p^r
times integers, so the p-adic valuation of b_r still reads off the
smallest Frobenius slope on H^2 whenever that slope is below 1.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import ellcurve as ec
from . import numtheory as nt
from .errors import BadReduction, BudgetExceeded, InvalidQuery, MixedPrimes
from .gf import CHUNK, build_field, orbit_representatives
from .predictor import FrobeniusInvariant, Kind, PredictionQuery, predict

log = logging.getLogger(__name__)

A4_WEIGHT = 8
A6_WEIGHT = 12
FIBER_BRUTE_LIMIT = 10**6      # per-fiber brute force when p^d <= this
WHOLE_BRUTE_LIMIT = 10**9      # whole-surface brute force when p^{2r} <= this
MAX_SINGULAR_FIBERS = 24       # degree of the discriminant in weights (8, 12)

valuation = nt.valuation


@dataclass(frozen=True)
class SurfaceSpec:
    label: str
    N: Optional[int]
    a4: tuple[int, ...]
    a6: tuple[int, ...]
    bad_primes: tuple[int, ...] = ()

    def __post_init__(self):
        a4 = nt._trim(int(c) for c in self.a4)
        a6 = nt._trim(int(c) for c in self.a6)
        object.__setattr__(self, "a4", a4)
        object.__setattr__(self, "a6", a6)
        object.__setattr__(self, "bad_primes", tuple(sorted(int(x) for x in self.bad_primes)))
        if not a4 and not a6:
            raise InvalidQuery("a4 and a6 cannot both vanish")
        if len(a4) - 1 > A4_WEIGHT or len(a6) - 1 > A6_WEIGHT:
            raise InvalidQuery("K3 Weierstrass model needs deg a4 <= 8 and deg a6 <= 12")

    @property
    def infinity_model(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Coefficients of a4*(s), a6*(s) (reversed, padded polynomials)."""
        a4 = list(self.a4) + [0] * (A4_WEIGHT + 1 - len(self.a4))
        a6 = list(self.a6) + [0] * (A6_WEIGHT + 1 - len(self.a6))
        return tuple(reversed(a4)), tuple(reversed(a6))

    def infinity_fiber(self) -> tuple[int, int]:
        """(a4*(0), a6*(0)) as integers: the top-weight coefficients."""
        a4s, a6s = self.infinity_model
        return a4s[0], a6s[0]

    @classmethod
    def from_dict(cls, d: dict) -> "SurfaceSpec":
        return cls(label=d["label"], N=d.get("N"), a4=tuple(d.get("a4", ())),
                   a6=tuple(d.get("a6", ())), bad_primes=tuple(d.get("bad_primes", ())))

    def to_dict(self) -> dict:
        return {"label": self.label, "N": self.N, "a4": list(self.a4),
                "a6": list(self.a6), "bad_primes": list(self.bad_primes)}


def load_surface(source) -> SurfaceSpec:
    """Load a surface JSON file; a bare name such as ``x66`` picks a bundled one."""
    path = Path(source)
    if path.exists():
        return SurfaceSpec.from_dict(json.loads(path.read_text()))
    name = str(source)
    name = name if name.endswith(".json") else name + ".json"
    try:
        text = resources.files("k3frob.data").joinpath(name).read_text()
    except FileNotFoundError:
        raise FileNotFoundError(f"no surface file or bundled surface named {source!r}") from None
    return SurfaceSpec.from_dict(json.loads(text))


def x66() -> SurfaceSpec:
    return load_surface("x66")


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------

def _veval(ctx, coeffs, t) -> np.ndarray:
    acc = np.zeros(np.shape(t), dtype=np.int64)
    for c in reversed(coeffs):
        acc = ctx.vadd(ctx.vmul(acc, t), ctx.from_int(c))
    return acc


def _census_add(census, cls, n=1):
    census[cls.value] = census.get(cls.value, 0) + n


def _checksum(modulus, W) -> str:
    return hashlib.sha256(f"{list(modulus)}:{W}".encode()).hexdigest()[:16]


@dataclass
class CountRecord:
    label: str
    p: int
    r: int
    W: int
    b: int
    v: float | int
    method: str
    modulus: tuple[int, ...]
    singular_fibers: dict = field(default_factory=dict)
    timestamp: float = 0.0
    checksum: str = ""

    def to_json(self) -> str:
        d = asdict(self)
        d["v"] = "inf" if self.v == math.inf else self.v
        d["modulus"] = list(self.modulus)
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "CountRecord":
        d = json.loads(line)
        d["v"] = math.inf if d["v"] == "inf" else d["v"]
        d["modulus"] = tuple(d["modulus"])
        return cls(**d)


def _make_record(spec, ctx, W, method, census) -> CountRecord:
    p, r = ctx.p, ctx.r
    b = W - 1 - p ** (2 * r)
    return CountRecord(label=spec.label, p=p, r=r, W=W, b=b, v=valuation(b, p), method=method,
                       modulus=tuple(ctx.modulus), singular_fibers=dict(sorted(census.items())),
                       timestamp=time.time(), checksum=_checksum(ctx.modulus, W))


def _check_reduction(spec: SurfaceSpec, p: int):
    if p < 5:
        raise BadReduction(f"p = {p}: short Weierstrass counting needs p >= 5")
    if p in spec.bad_primes:
        raise BadReduction(f"{spec.label} has bad reduction at p = {p}")


def _brute_total(spec, ctx, workers) -> tuple[int, dict]:
    counter = ec.BruteCounter(ctx)
    memo: dict = {}
    census: dict = {}

    def fiber(a4, a6):
        key = (a4, a6)
        if key not in memo:
            fib = ec.classify_fiber(ctx, a4, a6)
            memo[key] = (counter.count(a4, a6), fib.fiber_class)
        n, cls = memo[key]
        if cls is not ec.FiberClass.GOOD:
            _census_add(census, cls)
        return n

    i4, i6 = spec.infinity_fiber()
    total = fiber(ctx.from_int(i4), ctx.from_int(i6))
    chunks = [np.arange(s, min(s + CHUNK, ctx.q), dtype=np.int64) for s in range(0, ctx.q, CHUNK)]

    def coeffs(ts):
        return _veval(ctx, spec.a4, ts), _veval(ctx, spec.a6, ts)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            evaluated = list(pool.map(coeffs, chunks))
    else:
        evaluated = [coeffs(ts) for ts in chunks]
    for a4s, a6s in evaluated:
        for a4, a6 in zip(a4s.tolist(), a6s.tolist()):
            total += fiber(a4, a6)
    return total, census


class _OrbitCounter:
    """Counts fibers over a subfield F_{p^d}, lifted to F_{p^r}."""

    def __init__(self, ctx, d, fiber_brute_limit):
        self.ctx = ctx
        self.F = ctx.subfield(d)
        self.d = d
        self.k = ctx.r // d
        self.brute = ec.BruteCounter(self.F) if self.F.q <= fiber_brute_limit else None
        self.by_key: dict = {}

    def good_count(self, a4, a6) -> int:
        n = self.brute.count(a4, a6) if self.brute else ec.count_points_hasse(self.F, a4, a6)
        return ec.lift_count(self.F.q, self.F.q + 1 - n, self.k)

    def singular(self, a4, a6, census):
        fib = ec.classify_fiber(self.F, a4, a6)
        lifted = ec.lift_count(self.F.q, fib.trace_symbol, self.k, fib.fiber_class)
        # over F_{p^r} a non-split node splits when the lift degree is even
        cls = fib.fiber_class
        if cls is ec.FiberClass.NONSPLIT and self.k % 2 == 0:
            cls = ec.FiberClass.SPLIT
        _census_add(census, cls, self.d)
        return lifted

    def total(self, a4s, a6s, census) -> int:
        """Sum of lifted counts over one representative per orbit, times d."""
        disc = ec.vdiscriminant_core(self.F, a4s, a6s)
        sing = disc == 0
        acc = 0
        for a4, a6 in zip(a4s[sing].tolist(), a6s[sing].tolist()):
            acc += self.singular(a4, a6, census)
        g4, g6 = a4s[~sing], a6s[~sing]
        if g4.size:
            keys = ec.visomorphism_keys(self.F, g4, g6)
            uniq, first, mult = np.unique(keys, axis=0, return_index=True, return_counts=True)
            for key, i, m in zip(map(tuple, uniq.tolist()), first.tolist(), mult.tolist()):
                if key not in self.by_key:
                    self.by_key[key] = self.good_count(int(g4[i]), int(g6[i]))
                acc += m * self.by_key[key]
        return acc * self.d


def _orbit_total(spec, ctx, workers, fiber_brute_limit) -> tuple[int, dict]:
    census: dict = {}
    counters = {d: _OrbitCounter(ctx, d, fiber_brute_limit) for d in nt.divisors(ctx.r)}
    i4, i6 = spec.infinity_fiber()
    total = counters[1].total(np.array([ctx.from_int(i4)]), np.array([ctx.from_int(i6)]), census)

    def work(chunk):
        reps, degs = chunk
        return [(d, _veval(ctx, spec.a4, reps[degs == d]), _veval(ctx, spec.a6, reps[degs == d]))
                for d in counters if (degs == d).any()]

    chunks = orbit_representatives(ctx)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = pool.map(work, chunks)
            for res in results:
                for d, a4s, a6s in res:
                    total += counters[d].total(a4s, a6s, census)
    else:
        for chunk in chunks:
            for d, a4s, a6s in work(chunk):
                total += counters[d].total(a4s, a6s, census)
    return total, census


def count_surface(spec: SurfaceSpec, p: int, r: int, method: str = "auto", workers: int = 1,
                  fiber_brute_limit: int = FIBER_BRUTE_LIMIT,
                  whole_brute_limit: int = WHOLE_BRUTE_LIMIT) -> CountRecord:
    """Count points of the Weierstrass model over F_{p^r}.

    ``method="brute"`` sums exhaustive counts of every fiber;
    ``method="orbit"`` counts one fiber per Frobenius orbit over its field of
    definition and lifts the trace; ``"auto"`` picks brute force when
    p^{2r} <= whole_brute_limit.
    """
    _check_reduction(spec, p)
    ctx = build_field(p, r)
    if method == "auto":
        method = "brute" if ctx.q**2 <= whole_brute_limit else "orbit"
    if method == "brute":
        if ctx.q**2 > whole_brute_limit:
            raise BudgetExceeded(f"brute count over F_{p}^{r} needs {ctx.q**2} evaluations")
        W, census = _brute_total(spec, ctx, workers)
    elif method == "orbit":
        W, census = _orbit_total(spec, ctx, workers, fiber_brute_limit)
    else:
        raise InvalidQuery(f"unknown method {method!r}")
    n_sing = sum(census.values())
    if n_sing > MAX_SINGULAR_FIBERS:
        log.warning("%s over F_%d^%d has %d singular fibers; the discriminant may vanish mod p",
                    spec.label, p, r, n_sing)
    return _make_record(spec, ctx, W, method, census)


# ---------------------------------------------------------------------------
# slopes
# ---------------------------------------------------------------------------

CONSISTENT = "consistent"
CERTIFYING = "certifying"
VIOLATING = "violating"


@dataclass(frozen=True)
class SlopeRow:
    r: int
    v: float | int
    bound: int
    exact: Optional[int]
    status: str


@dataclass(frozen=True)
class SlopeVerdict:
    predicted: FrobeniusInvariant
    p: int
    rows: tuple[SlopeRow, ...]

    @property
    def violating(self) -> bool:
        return any(row.status == VIOLATING for row in self.rows)

    @property
    def certifying(self) -> bool:
        return any(row.status == CERTIFYING for row in self.rows)

    @property
    def summary(self) -> str:
        pred = self.predicted
        if self.violating:
            bad = [row.r for row in self.rows if row.status == VIOLATING]
            return f"violating: valuation below the slope bound at r = {bad}"
        if pred.kind is Kind.FINITE_HEIGHT:
            if self.certifying:
                return f"certifying height {pred.height}"
            max_r = max((row.r for row in self.rows), default=0)
            if pred.height > max_r:
                return (f"consistent with height {pred.height}; "
                        "certification out of reach at desk scale")
            return f"consistent with height {pred.height}; no certifying degree observed"
        return f"consistent with {pred.describe()}; certification out of reach at desk scale"

    def to_dict(self) -> dict:
        return {"predicted": self.predicted.to_dict(), "p": self.p, "summary": self.summary,
                "rows": [{**asdict(row), "v": "inf" if row.v == math.inf else row.v}
                         for row in self.rows]}


def slope_bound(predicted: FrobeniusInvariant, r: int) -> tuple[int, Optional[int]]:
    """(lower bound on v_p(b_r), exact value expected when certifying or None)."""
    if predicted.kind is Kind.SUPERSINGULAR:
        return r, None
    h = predicted.height
    bound = r - r // h  # ceil(r (1 - 1/h))
    exact = r * (h - 1) // h if r % h == 0 else None
    return bound, exact


def slope_verdict(records: Sequence[CountRecord], predicted: FrobeniusInvariant) -> SlopeVerdict:
    primes = {rec.p for rec in records}
    if len(primes) > 1:
        raise MixedPrimes(f"records mix primes {sorted(primes)}")
    rows = []
    for rec in sorted(records, key=lambda rec: rec.r):
        bound, exact = slope_bound(predicted, rec.r)
        if rec.v < bound:
            status = VIOLATING
        elif exact is not None and rec.v == exact:
            status = CERTIFYING
        else:
            status = CONSISTENT
        rows.append(SlopeRow(rec.r, rec.v, bound, exact, status))
    return SlopeVerdict(predicted, primes.pop() if primes else 0, tuple(rows))


# ---------------------------------------------------------------------------
# cache and end-to-end verification
# ---------------------------------------------------------------------------

class CountCache:
    """Append-only JSON-lines store, one file per (label, p)."""

    def __init__(self, directory):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)

    def path(self, label: str, p: int) -> Path:
        return self.dir / f"{label}_p{p}.jsonl"

    def load(self, label: str, p: int) -> list[CountRecord]:
        path = self.path(label, p)
        if not path.exists():
            return []
        out = []
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            try:
                out.append(CountRecord.from_json(line))
            except (ValueError, KeyError, TypeError):
                log.warning("skipping unreadable cache line in %s", path)
        return out

    def get(self, label: str, p: int, r: int, modulus) -> Optional[CountRecord]:
        for rec in self.load(label, p):
            if rec.r == r and rec.modulus == tuple(modulus) and rec.checksum == _checksum(modulus, rec.W):
                return rec
        return None

    def append(self, rec: CountRecord) -> None:
        import fcntl

        with open(self.dir / ".lock", "w") as lock:
            fcntl.flock(lock, fcntl.LOCK_EX)
            try:
                with open(self.path(rec.label, rec.p), "a") as fh:
                    fh.write(rec.to_json() + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
            finally:
                fcntl.flock(lock, fcntl.LOCK_UN)


@dataclass
class VerifyResult:
    verdict: SlopeVerdict
    records: list[CountRecord]
    cache_hits: list[int] = field(default_factory=list)


def verify(spec: SurfaceSpec, p: int, max_r: int, method: str = "auto", cache_dir=None,
           workers: int = 1, picard_lower_bound: Optional[int] = None) -> VerifyResult:
    """Predict the Frobenius invariant of the reduction mod p and test it
    against point counts over F_{p^r}, r = 1..max_r."""
    _check_reduction(spec, p)
    if spec.N is None:
        raise InvalidQuery(f"{spec.label} declares no non-symplectic order")
    predicted = predict(PredictionQuery(spec.N, p, picard_lower_bound))
    cache = CountCache(cache_dir) if cache_dir else None
    records, hits = [], []
    for r in range(1, max_r + 1):
        rec = None
        if cache is not None:
            rec = cache.get(spec.label, p, r, build_field(p, r).modulus)
            if rec is not None:
                hits.append(r)
        if rec is None:
            rec = count_surface(spec, p, r, method=method, workers=workers)
            if cache is not None:
                cache.append(rec)
        records.append(rec)
    return VerifyResult(slope_verdict(records, predicted), records, hits)
