"""Ultrametrics, the explicit graph-metric formulas, their inf/sup over choice functions,
the Lipschitz criterion and the bounded-powers verdict."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import words
from .combinatorics import find_power, longest_runs, max_power, power_witness, repulsiveness_index
from .graph import PRIVILEGED, RIGHT_SPECIAL, ChoiceFunction, LazyPoint, check_kind, choice_function, tau_root
from .language import FactorOracle
from .weights import WeightFunction, default_weight


class Indistinguishable(ValueError):
    pass


def meet(xi: LazyPoint, eta: LazyPoint, depth: int) -> str:
    """Longest common prefix ξ∧η, looked for within the first ``depth`` symbols."""
    n = min(64, depth)
    while True:
        a, b = xi.prefix(n), eta.prefix(n)
        c = words.common_prefix(a, b)
        if len(c) < n:
            return c
        if n >= depth:
            raise Indistinguishable(f"indistinguishable at depth {depth}")
        n = min(2 * n, depth)


def priv_meet(xi: LazyPoint, eta: LazyPoint, depth: int) -> str:
    """Longest common privileged prefix ξ⩘η."""
    return words.longest_privileged_prefix(meet(xi, eta, depth))


def _meet(xi, eta, kind, depth) -> str:
    return meet(xi, eta, depth) if kind == RIGHT_SPECIAL else priv_meet(xi, eta, depth)


def ultrametric(xi: LazyPoint, eta: LazyPoint, weight: WeightFunction, kind: str, depth: int):
    """δ(|ξ∧η|) or δ(|ξ⩘η|); 0 for identical points."""
    kind = check_kind(kind)
    if xi == eta:
        return weight(0) * 0
    return weight(len(_meet(xi, eta, kind, depth)))


def d_inf(xi: LazyPoint, eta: LazyPoint, weight: WeightFunction, kind: str, depth: int):
    return ultrametric(xi, eta, weight, kind, depth)


@dataclass(frozen=True)
class MetricValue:
    """A metric value: ``value`` is exact or a truncated sum; ``tail`` bounds what was left out."""

    value: Fraction | float
    tail: Fraction | float | None
    status: str
    depth: int

    @property
    def upper(self):
        return None if self.tail is None else self.value + self.tail

    def as_dict(self) -> dict:
        return {"value": self.value, "tail_bound": self.tail if self.tail is not None else "no bound",
                "status": self.status, "depth": self.depth}


def geometric_ratio(weight: WeightFunction, ell):
    """g = c̄·δ(ℓ+1): each further privileged prefix shrinks the weight by at least this factor."""
    if ell is None or ell <= 0:
        return None
    g = weight.c_upper * weight(ell + 1)
    return g if g < 1 else None


def geometric_bound(weight: WeightFunction, ell):
    """Σ_{k≥1} (c̄·δ(ℓ+1))^k, the Lipschitz bound for repulsiveness index ℓ (``None`` if divergent)."""
    g = geometric_ratio(weight, ell)
    return None if g is None else g / (1 - g)


def _tail_after(weight, g, length: int, include_self: bool):
    """Bound on Σ δ over privileged prefixes after (and possibly including) one of the given length."""
    if g is None or length < 1:
        return None
    d = weight(length)
    return d / (1 - g) if include_self else d * g / (1 - g)


def _is_own_tau_point(point: LazyPoint, tau: ChoiceFunction) -> bool:
    return point.key[0] == "tau" and point.key[1] == tau.name


def _beta_sum_exact(point: LazyPoint, tau: ChoiceFunction, weight, kind: str, m: str):
    """Σ β·δ over the prefixes past the meet of a τ-image, which only involves prefixes of its root."""
    rho = tau_root(point)
    total = weight(0) * 0
    if kind == PRIVILEGED:
        chain = words.privileged_prefixes(rho)
        for k, L in enumerate(chain):
            if len(m) < L < len(rho):
                nxt = chain[k + 1] if k + 1 < len(chain) else None
                if nxt is None or tau.extend(rho[:L], nxt) != rho[:nxt]:
                    total += weight(L)
    else:
        for i, ext in enumerate(tau.oracle.extension_profile(rho)):
            if i > len(m) and len(ext) >= 2 and tau.decide(rho[:i]) != rho[i]:
                total += weight(i)
    return total


def _beta_sum_truncated(point: LazyPoint, tau: ChoiceFunction, weight, kind: str, m: str, depth: int, g):
    """Truncated Σ β·δ for a general point, with a tail bound (privileged kind only)."""
    w = point.prefix(depth)
    total = weight(0) * 0
    if kind == PRIVILEGED:
        chain = words.privileged_prefixes(w)
        start = chain.index(len(m))
        for k in range(start + 1, len(chain) - 1):
            L, nxt = chain[k], chain[k + 1]
            if tau.extend(w[:L], nxt) != w[:nxt]:
                total += weight(L)
        if len(chain) - 1 > start:
            tail = _tail_after(weight, g, chain[-1], include_self=True)
        else:
            tail = _tail_after(weight, g, len(m), include_self=False)
        return total, tail
    profile = tau.oracle.extension_profile(w)
    for i in range(len(m) + 1, len(w)):
        if len(profile[i]) >= 2 and tau.decide(w[:i]) != w[i]:
            total += weight(i)
    return total, None


def d_tau(
    xi: LazyPoint,
    eta: LazyPoint,
    tau: ChoiceFunction,
    weight: WeightFunction,
    kind: str,
    depth: int,
    ell=None,
) -> MetricValue:
    """Explicit formula for d_τ (kind rs) or d̃_τ (kind priv).

    Exact for τ-images of ``tau``.  Other points get the formula evaluated
    directly (continuous extension), truncated at ``depth``, with a tail bound
    from the repulsiveness index ``ell`` when one applies.
    """
    kind = check_kind(kind)
    depth = min(depth, tau.oracle.certified_depth)
    if xi == eta:
        return MetricValue(weight(0) * 0, weight(0) * 0, "exact", depth)
    m = _meet(xi, eta, kind, depth)
    value, tail, status = weight(len(m)), weight(0) * 0, "exact"
    g = geometric_ratio(weight, ell) if kind == PRIVILEGED else None
    for p in (xi, eta):
        if _is_own_tau_point(p, tau):
            value += _beta_sum_exact(p, tau, weight, kind, m)
            continue
        status = "continuous-extension"
        part, part_tail = _beta_sum_truncated(p, tau, weight, kind, m, depth, g)
        value += part
        tail = None if tail is None or part_tail is None else tail + part_tail
    if tail is None:
        status = "lower-bound"
    return MetricValue(value, tail, status, depth)


def d_sup(xi: LazyPoint, eta: LazyPoint, weight: WeightFunction, kind: str, depth: int, ell=None) -> MetricValue:
    """Supremum over choice functions: every β set to 1, second sum over η's own prefixes."""
    kind = check_kind(kind)
    if xi == eta:
        return MetricValue(weight(0) * 0, weight(0) * 0, "exact", depth)
    m = _meet(xi, eta, kind, depth)
    value, tail = weight(len(m)), weight(0) * 0
    g = geometric_ratio(weight, ell) if kind == PRIVILEGED else None
    for p in (xi, eta):
        w = p.prefix(depth)
        if kind == PRIVILEGED:
            chain = words.privileged_prefixes(w)
            start = chain.index(len(m))
            for L in chain[start + 1 :]:
                value += weight(L)
            part_tail = _tail_after(weight, g, chain[-1], include_self=False)
        else:
            for i, ext in enumerate(p.oracle.extension_profile(w[: p.oracle.certified_depth])):
                if i > len(m) and len(ext) >= 2:
                    value += weight(i)
            part_tail = None
        tail = None if tail is None or part_tail is None else tail + part_tail
    return MetricValue(value, tail, "truncated" if tail is not None else "lower-bound", depth)


@dataclass
class MetricReport:
    xi: str
    eta: str
    depth: int
    ell: Fraction | None
    d: Fraction | float
    d_tilde: Fraction | float
    d_inf: Fraction | float
    d_tilde_inf: Fraction | float
    d_sup: MetricValue
    d_tilde_sup: MetricValue
    d_tau: dict[str, MetricValue] = field(default_factory=dict)
    d_tilde_tau: dict[str, MetricValue] = field(default_factory=dict)

    def sandwich_ok(self) -> bool:
        """d ≤ d̃ and d̃_inf ≤ d̃_τ ≤ d̃_sup + tail for every evaluated τ."""
        ok = self.d <= self.d_tilde
        sup = self.d_tilde_sup.upper
        for v in self.d_tilde_tau.values():
            ok &= self.d_tilde_inf <= v.value
            if sup is not None:
                ok &= v.value <= sup and (v.upper is None or v.upper <= sup)
        return bool(ok)

    def as_dict(self) -> dict:
        return {
            "xi": self.xi,
            "eta": self.eta,
            "truncation_depth": self.depth,
            "ell": self.ell,
            "d": self.d,
            "d_tilde": self.d_tilde,
            "d_inf": self.d_inf,
            "d_tilde_inf": self.d_tilde_inf,
            "d_tilde_sup": self.d_tilde_sup.as_dict(),
            "d_sup": self.d_sup.as_dict(),
            "d_tau": {k: v.as_dict() for k, v in sorted(self.d_tau.items())},
            "d_tilde_tau": {k: v.as_dict() for k, v in sorted(self.d_tilde_tau.items())},
            "sandwich_ok": self.sandwich_ok(),
        }


def metric_report(
    o: FactorOracle,
    xi: LazyPoint,
    eta: LazyPoint,
    taus: list[ChoiceFunction],
    weight: WeightFunction,
    depth: int,
    ell=None,
) -> MetricReport:
    depth = min(depth, o.certified_depth)
    return MetricReport(
        xi.label,
        eta.label,
        depth,
        ell,
        ultrametric(xi, eta, weight, RIGHT_SPECIAL, depth),
        ultrametric(xi, eta, weight, PRIVILEGED, depth),
        d_inf(xi, eta, weight, RIGHT_SPECIAL, depth),
        d_inf(xi, eta, weight, PRIVILEGED, depth),
        d_sup(xi, eta, weight, RIGHT_SPECIAL, depth),
        d_sup(xi, eta, weight, PRIVILEGED, depth, ell),
        {t.name: d_tau(xi, eta, t, weight, RIGHT_SPECIAL, depth) for t in taus},
        {t.name: d_tau(xi, eta, t, weight, PRIVILEGED, depth, ell) for t in taus},
    )


def chain_growth_ok(lengths: list[int], ell) -> bool:
    """|ξ̃_{n+1}| ≥ (ℓ+1)|ξ̃_n| along a chain of privileged prefix lengths (from the first letter on)."""
    return all(Fraction(b) >= (ell + 1) * a for a, b in zip(lengths[1:], lengths[2:]))


def phi0_ratio(o: FactorOracle, weight: WeightFunction, depth: int):
    """max over privileged u with |u| ≤ depth of δ(|u|)/δ(|φ⁽⁰⁾(u)|)."""
    from .combinatorics import phi0, privileged_words

    return max(weight(len(r.word)) / weight(len(phi0(o, r.word))) for r in privileged_words(o, depth))


# -- Lipschitz profile -----------------------------------------------------------


def point_ratios(lengths: list[int], weight: WeightFunction, depth: int) -> list:
    """r(ξ, m) = δ(|ξ̃_m|)^{-1} Σ_{m<n, |ξ̃_n| ≤ depth} δ(|ξ̃_n|) for every chain index m."""
    lengths = [L for L in lengths if L <= depth]
    out, suffix = [], weight(0) * 0
    for L in reversed(lengths):
        out.append(suffix / weight(L))
        suffix += weight(L)
    return out[::-1]


@dataclass(frozen=True)
class SamplePoint:
    label: str
    kind: str  # "tau", "orbit" or "adversarial"
    lengths: tuple[int, ...]  # privileged prefix lengths of the materialized prefix
    materialized: int


def sample_points(
    o: FactorOracle,
    depth: int,
    seeds=(0, 1, 2, 3),
    offsets: int = 8,
) -> list[SamplePoint]:
    """Points for the Lipschitz profile: τ(ε) images, orbit shifts and points at maximal power runs."""
    out = []
    reach = min(depth, o.certified_depth)
    for tau in [choice_function(o)] + [choice_function(o, "hash", s) for s in seeds]:
        w = tau.extend("", reach)
        out.append(SamplePoint(f"tau[{tau.name}](ε)", "tau", tuple(words.privileged_prefixes(w)), len(w)))
    limit = depth if o.point is not None else len(o.text)
    for k in range(offsets):
        w = _shifted(o, k, depth, limit)
        if w:
            out.append(SamplePoint(f"shift {k}", "orbit", tuple(words.privileged_prefixes(w)), len(w)))
    ref = _shifted(o, 0, 2 * depth, limit)
    chain = words.privileged_prefixes(ref)
    periods = sorted({b - a for a, b in zip(chain[1:], chain[2:])})
    for P, (length, start) in sorted(longest_runs(ref, periods).items()):
        if length >= 2 * P:
            w = _shifted(o, start, depth, limit)
            out.append(SamplePoint(f"power run P={P} at {start}", "adversarial", tuple(words.privileged_prefixes(w)), len(w)))
    return out


def _shifted(o: FactorOracle, offset: int, length: int, limit: int) -> str:
    if o.point is None:
        return o.text[offset : offset + min(length, limit)]
    return o.point_prefix(offset + length)[offset:]


@dataclass(frozen=True)
class LipschitzProfile:
    depth: int
    values: tuple  # max over samples of r(ξ, m), indexed by m
    argmax: tuple[str, ...]

    @property
    def max(self):
        return max(self.values) if self.values else 0

    def as_dict(self) -> dict:
        peak = max(range(len(self.values)), key=lambda m: self.values[m]) if self.values else None
        return {
            "depth": self.depth,
            "profile": self.max,
            "peak_m": peak,
            "peak_sample": self.argmax[peak] if peak is not None else None,
            "values": list(self.values),
        }


def lipschitz_profile(
    o: FactorOracle, weight: WeightFunction, depth: int, samples: list[SamplePoint] | None = None
) -> LipschitzProfile:
    samples = sample_points(o, depth) if samples is None else samples
    values, argmax = [], []
    for s in samples:
        for m, r in enumerate(point_ratios(list(s.lengths), weight, depth)):
            if m == len(values):
                values.append(r)
                argmax.append(s.label)
            elif r > values[m]:
                values[m] = r
                argmax[m] = s.label
    return LipschitzProfile(depth, tuple(values), tuple(argmax))


def lipschitz_ratio(o: FactorOracle, weight: WeightFunction, m: int, depth: int, samples=None):
    """max over sample points of r(ξ, m); 0 when no point has a privileged prefix past index m within depth."""
    values = lipschitz_profile(o, weight, depth, samples).values
    return values[m] if m < len(values) else weight(0) * 0


@dataclass(frozen=True)
class AdversarialRatio:
    q: int
    exponent: int
    base_length: int | None
    offset: int | None
    ratio: Fraction | float | None
    bound: Fraction | float
    searched: int
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.ratio is not None and self.ratio >= self.bound

    def as_dict(self) -> dict:
        return {
            "q": self.q, "p": self.exponent, "base_length": self.base_length, "offset": self.offset,
            "ratio": self.ratio, "bound": self.bound, "searched": self.searched, "ok": self.ok, "note": self.note,
        }


def adversarial_ratio(
    o: FactorOracle, weight: WeightFunction, q: int, max_search: int = 1 << 23
) -> AdversarialRatio:
    """Point with prefix v_p for p = 2q+1 and its ratio r(ξ, ind(v_q)), compared with c_·q.

    The power u^p is searched in prefixes of the reference point of doubling
    length up to ``max_search`` symbols.
    """
    p = 2 * q + 1
    bound = weight.c_lower * q
    search = 1024
    while True:
        length = min(search, max_search)
        ref = o.point_prefix(length) if o.point is not None else o.text[:length]
        hit = find_power(ref, p)
        if hit is not None:
            break
        if length >= max_search or (o.point is None and length >= len(o.text)):
            return AdversarialRatio(q, p, None, None, None, bound, length, f"no power of exponent {p} in the first {length} symbols")
        search *= 2
    u, start = hit
    wit = power_witness(o, u, p, search=length)
    point = ref[start:]
    chain = words.privileged_prefixes(point[: len(wit.chain[-1])])
    m = chain.index(len(wit.chain[q - 1]))
    ratio = point_ratios(chain, weight, len(wit.chain[-1]))[m]
    return AdversarialRatio(q, p, len(u), start, ratio, bound, length)


# -- verdict ----------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    verdict: str
    evidence: dict


def bounded_powers_verdict(
    o: FactorOracle,
    weight: WeightFunction | None = None,
    depth: int | None = None,
    profile_depth: int = 1 << 16,
    base_depth: int = 16,
    seeds=(0, 1, 2, 3),
) -> Verdict:
    """Heuristic classification into bounded / unbounded / inconclusive, with the evidence used.

    unbounded: max_power strictly grows between depth/4 and depth, and the
    Lipschitz profile more than doubles between ``base_depth`` and some
    doubled depth up to ``profile_depth``.
    bounded: ℓ_depth > 0 and stable between depth/2 and depth, and the profile
    stays below the geometric bound at every depth examined.
    """
    weight = weight or default_weight()
    depth = o.certified_depth if depth is None else depth
    o.check_length(depth)
    if depth < 8:
        return Verdict("inconclusive", {"reason": f"depth {depth} too small", "depth": depth})
    ells = {N: repulsiveness_index(o, N).value for N in (depth // 4, depth // 2, depth)}
    powers = {N: max_power(o, N)[0] for N in (max(depth // 16, 1), depth // 4, depth)}
    ell = ells[depth]
    bound = geometric_bound(weight, ell)
    profile_depth = max(profile_depth, 2 * base_depth)
    samples = sample_points(o, profile_depth, seeds)
    trend, D = [], base_depth
    while D <= profile_depth:
        trend.append((D, lipschitz_profile(o, weight, D, samples).max))
        D *= 2
    base = trend[0][1]
    doubled = next(((D, v) for D, v in trend[1:] if v > 2 * base), None)
    growing = powers[depth] > powers[depth // 4]
    stable = ell is not None and ell > 0 and ells[depth // 2] is not None and ells[depth // 2] <= Fraction(6, 5) * ell
    dominated = bound is not None and all(v <= bound for _, v in trend)
    evidence = {
        "depth": depth,
        "repulsiveness": {str(N): v for N, v in sorted(ells.items())},
        "max_power": {str(N): v for N, v in sorted(powers.items())},
        "max_power_growing": growing,
        "repulsiveness_stable": stable,
        "geometric_bound": bound,
        "profile_trend": [{"depth": D, "profile": v} for D, v in trend],
        "profile_doubling": None if doubled is None else {"base_depth": base_depth, "base": base, "depth": doubled[0], "profile": doubled[1]},
        "profile_dominated": dominated,
        "samples": len(samples),
    }
    if growing and doubled is not None:
        return Verdict("unbounded", evidence)
    if stable and dominated:
        return Verdict("bounded", evidence)
    return Verdict("inconclusive", evidence)
