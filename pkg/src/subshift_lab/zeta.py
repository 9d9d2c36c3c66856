"""Dirichlet-series partial sums over the tree of words and complexity exponents."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .combinatorics import complete_first_returns, privileged_words, special_between, special_record
from .language import FactorOracle
from .weights import WeightFunction, default_weight

FAMILIES = ("zeta_k", "zeta_tilde_k", "zeta_D", "zeta_D_tilde")
_ALIASES = {
    "zeta": "zeta_k",
    "zeta1": "zeta_k",
    "zeta_tilde": "zeta_tilde_k",
    "zetaD": "zeta_D",
    "zetaD_tilde": "zeta_D_tilde",
}


def check_family(family: str) -> str:
    family = _ALIASES.get(family, family)
    if family not in FAMILIES:
        raise ValueError(f"unknown zeta family {family!r}; expected one of {FAMILIES}")
    return family


@dataclass(frozen=True)
class ZetaSeries:
    family: str
    k: int
    s: float
    N: int
    partial_sum: float
    diagnostic: float  # share of the sum coming from lengths in (N/10, N]
    coefficients: tuple[int, ...] = field(repr=False, default=())

    def as_row(self) -> dict:
        return {
            "family": self.family,
            "k": self.k,
            "s": self.s,
            "N": self.N,
            "partial_sum": self.partial_sum,
            "diagnostic": self.diagnostic,
        }


def branching_by_length(o: FactorOracle, N: int) -> dict[int, list[int]]:
    """``{a: [#v with |v| = n and a(v) = a for n ≤ N]}`` (only a ≥ 1 listed)."""
    o.check_length(N + 1)
    return {a: row[: N + 1] for a, row in o.branching_counts().items()}


def privileged_branching_by_length(o: FactorOracle, N: int) -> dict[int, list[int]]:
    """Same table for ã over privileged words; every return set must be complete."""
    key = ("privileged-branching", N)
    if key not in o.memo:
        table: dict[int, list[int]] = {}
        for rec in privileged_words(o, N):
            if not rec.complete:
                complete_first_returns(o, rec.word)  # raises with the open branch
            table.setdefault(rec.a_tilde, [0] * (N + 1))[len(rec.word)] += 1
        table.pop(0, None)
        o.memo[key] = table
    return o.memo[key]


def _coefficients(table: dict[int, list[int]], N: int, power) -> list[int]:
    return [sum(power(a) * row[n] for a, row in table.items()) for n in range(N + 1)]


def _pow(k: int):
    # 0^0 = 0: only words with a ≥ 1 ever appear in the tables, so plain powers are right
    return lambda a: a**k


def _sum(coefficients: list[int], weight: WeightFunction, s: float, N: int, half: bool = False):
    terms = [c * float(weight(n)) ** s for n, c in enumerate(coefficients) if c]
    lengths = [n for n, c in enumerate(coefficients) if c]
    total = math.fsum(terms)
    late = math.fsum(t for n, t in zip(lengths, terms) if n > N / 10)
    if half:
        total, late = total / 2, late / 2
    return total, (late / total if total else 0.0)


def zeta_partial(
    o: FactorOracle, weight: WeightFunction | None, family: str, k: int, s: float, N: int
) -> ZetaSeries:
    """Partial sum over words of length ≤ N, accumulated by ascending length with compensated summation."""
    weight = weight or default_weight()
    family = check_family(family)
    if s <= 0:
        raise ValueError("s must be positive")
    if k < 0:
        raise ValueError("k must be a natural number")
    table = branching_by_length(o, N) if family in ("zeta_k", "zeta_D") else privileged_branching_by_length(o, N)
    if family in ("zeta_D", "zeta_D_tilde"):
        coeff = _coefficients(table, N, lambda a: a * (a + 1))
        total, diag = _sum(coeff, weight, s, N, half=True)
        k = 0
    else:
        coeff = _coefficients(table, N, _pow(k))
        total, diag = _sum(coeff, weight, s, N)
    return ZetaSeries(family, k, float(s), N, total, diag, tuple(coeff))


@dataclass(frozen=True)
class SpectralCheck:
    kind: str
    s: float
    N: int
    zeta_D: float
    half_sum: float
    coefficients_equal: bool

    @property
    def ok(self) -> bool:
        return self.coefficients_equal and abs(self.zeta_D - self.half_sum) <= 1e-12 * max(1.0, abs(self.zeta_D))


def zeta_spectral(o: FactorOracle, weight: WeightFunction | None, kind: str, s: float, N: int) -> tuple[ZetaSeries, SpectralCheck]:
    """½Σ a(a+1)δ^s (kind rs) or its ã analogue (kind priv), checked against ½(ζ₂+ζ₁)."""
    weight = weight or default_weight()
    fam, base = ("zeta_D", "zeta_k") if kind == "rs" else ("zeta_D_tilde", "zeta_tilde_k")
    zd = zeta_partial(o, weight, fam, 0, s, N)
    z1 = zeta_partial(o, weight, base, 1, s, N)
    z2 = zeta_partial(o, weight, base, 2, s, N)
    # zeta_D coefficients are stored before halving: a(a+1) = a² + a per word
    same = all(d == a + b for d, a, b in zip(zd.coefficients, z1.coefficients, z2.coefficients))
    half = (z2.partial_sum + z1.partial_sum) / 2
    return zd, SpectralCheck(kind, float(s), N, zd.partial_sum, half, same)


@dataclass
class InequalityReport:
    N: int
    rows: list[dict]
    failures: list[dict]

    @property
    def ok(self) -> bool:
        return not self.failures


def _offending_words(o: FactorOracle, N: int, k: int, limit: int = 10) -> list[dict]:
    """Privileged u with ã(u)^k < Σ_{r∈S(u)} a(r)^k (possible only when k = 0 and |S(u)| ≥ 2)."""
    out = []
    for rec in privileged_words(o, N):
        if not rec.complete or not rec.word:
            continue
        rs = special_between(o, rec.word, rec.returns)
        rhs = sum(special_record(o, r).a ** k for r in rs)
        lhs = rec.a_tilde**k if rec.a_tilde else 0
        if lhs < rhs:
            out.append({"u": rec.word, "a_tilde_pow": lhs, "sum_a_pow": rhs, "S": list(rs)})
            if len(out) >= limit:
                break
    return out


def inequality_audit(
    o: FactorOracle,
    weight: WeightFunction | None,
    s_grid,
    N: int,
    ks=(1, 2, 3),
    rel_tol: float = 1e-12,
) -> InequalityReport:
    """Check ζ̃_k,N ≥ ζ_k,N for k in ``ks`` and ζ₁,N ≥ ½ζ̃₀,N − ½δ(0)^s for every s."""
    weight = weight or default_weight()
    rows, failures = [], []
    for s in s_grid:
        for k in ks:
            z = zeta_partial(o, weight, "zeta_k", k, s, N).partial_sum
            zt = zeta_partial(o, weight, "zeta_tilde_k", k, s, N).partial_sum
            ok = zt >= z * (1 - rel_tol)
            row = {"s": s, "k": k, "check": "tilde_ge_plain", "lhs": zt, "rhs": z, "ok": ok}
            rows.append(row)
            if not ok:
                failures.append(dict(row, offending=_offending_words(o, N, k)))
        z1 = zeta_partial(o, weight, "zeta_k", 1, s, N).partial_sum
        zt0 = zeta_partial(o, weight, "zeta_tilde_k", 0, s, N).partial_sum
        rhs = zt0 / 2 - float(weight(0)) ** s / 2
        ok = z1 >= rhs - rel_tol * max(1.0, abs(rhs))
        row = {"s": s, "k": 1, "check": "zeta1_ge_half_tilde0", "lhs": z1, "rhs": rhs, "ok": ok}
        rows.append(row)
        if not ok:
            failures.append(row)
    return InequalityReport(N, rows, failures)


# -- exponents ------------------------------------------------------------------

WHICH = ("beta", "beta_rs", "beta_pr")


@dataclass(frozen=True)
class ExponentEstimate:
    which: str
    value: float
    window: tuple[int, int]
    residual: float
    method: str

    def as_dict(self) -> dict:
        return {"which": self.which, "value": self.value, "window": list(self.window),
                "residual": self.residual, "method": self.method}


def privileged_counts(o: FactorOracle, N: int) -> list[int]:
    """p_pr(n) for n ≤ N: the return search only needs to reach length N."""
    counts = [0] * (N + 1)
    for rec in privileged_words(o, N, budget=N):
        counts[len(rec.word)] += 1
    return counts


def counting_function(o: FactorOracle, which: str, N: int) -> list[int]:
    if which == "beta":
        return o.complexities(N)
    if which == "beta_rs":
        return o.right_special_counts(N)
    if which == "beta_pr":
        return privileged_counts(o, N)
    raise ValueError(f"unknown exponent {which!r}; expected one of {WHICH}")


def exponent_estimate(o: FactorOracle, which: str, window: tuple[int, int] = (100, 2000)) -> ExponentEstimate:
    """Least-squares slope of log(count) against log(n) over the window.

    β fits p(n) directly.  β_rs and β_pr fit the cumulative counts
    Σ_{m≤n} p_rs(m), Σ_{m≤n} p_pr(m) and subtract 1, which is stable when the
    per-length counts are bounded.
    """
    lo, hi = window
    if lo < 1 or hi - lo < 2:
        raise ValueError(f"degenerate window {window}")
    counts = counting_function(o, which, hi)
    n = np.arange(lo, hi + 1)
    if which == "beta":
        y, shift, method = np.array(counts[lo : hi + 1], dtype=float), 0.0, "log-log fit of p(n)"
    else:
        cumulative = np.cumsum(counts)
        y, shift, method = cumulative[lo : hi + 1].astype(float), 1.0, "log-log fit of cumulative count, minus 1"
    if np.any(y <= 0):
        raise ValueError(f"degenerate window {window}: zero counts")
    x = np.log(n)
    (slope, intercept), res, *_ = np.polyfit(x, np.log(y), 1, full=True)
    residual = float(res[0]) if len(res) else 0.0
    return ExponentEstimate(which, float(slope) - shift, (lo, hi), residual, method)


def write_csv(series: list[ZetaSeries], extra: list[dict] | None = None) -> str:
    """CSV with columns family, k, s, N, partial_sum, diagnostic (plus any extra columns)."""
    fields = ["family", "k", "s", "N", "partial_sum", "diagnostic"]
    extra = extra or [{} for _ in series]
    for e in extra:
        for key in e:
            if key not in fields:
                fields.append(key)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for z, e in zip(series, extra):
        row = z.as_row()
        row["partial_sum"] = repr(z.partial_sum)
        row["diagnostic"] = repr(z.diagnostic)
        row.update(e)
        writer.writerow(row)
    return buf.getvalue()
