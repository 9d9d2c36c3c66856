"""Right-special and privileged word structure of a subshift language."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import words
from .language import FactorOracle


class ReturnBudgetExceeded(ValueError):
    """A return search reached its length budget with a branch still open."""

    def __init__(self, word: str, branch: str, budget: int):
        super().__init__(f"return budget exceeded: branch {branch!r} of {word!r} still open at length {budget}")
        self.word = word
        self.branch = branch
        self.budget = budget


@dataclass(frozen=True)
class SpecialRecord:
    word: str
    a: int
    right_extensions: tuple[str, ...]

    @property
    def right_special(self) -> bool:
        return self.a >= 1


@dataclass(frozen=True)
class PrivilegedRecord:
    word: str
    order: int
    parent: str | None
    returns: tuple[str, ...]
    complete: bool = True

    @property
    def a_tilde(self) -> int:
        return len(self.returns) - 1


@dataclass(frozen=True)
class PowerWitness:
    base: str
    exponent: int
    chain: tuple[str, ...]
    stub: str


@dataclass(frozen=True)
class BalanceVerdict:
    balanced: bool
    checked: int
    counterexample: tuple[str, tuple[str, ...]] | None = None
    skipped: tuple[str, ...] = ()


@dataclass(frozen=True)
class Repulsiveness:
    """ℓ_N with a minimizing pair (w, W), w a proper prefix and suffix of W."""

    N: int
    value: Fraction | None
    short: str | None
    long: str | None


@dataclass(frozen=True)
class RankProfile:
    lengths: list[int]
    max_a_tilde: list[int]
    fits: dict = field(default_factory=dict)
    incomplete: int = 0


def special_record(o: FactorOracle, v: str) -> SpecialRecord:
    ext = o.right_extensions(v)
    return SpecialRecord(v, len(ext) - 1, ext)


def _search_returns(o: FactorOracle, u: str, budget: int) -> tuple[list[str], list[str]]:
    """Closed returns and branches still open at ``budget`` (breadth-first)."""
    if not u:
        return [x for x in o.right_extensions("")], []
    o.check_length(budget)
    state = o.automaton.walk(u)
    if state < 0:
        raise ValueError(f"{u!r} is not a factor")
    nxt, sort = o.automaton.next, o.alphabet.sort
    closed, open_ = [], []
    queue = deque([(u, state)])
    while queue:
        w, st = queue.popleft()
        if len(w) >= budget:
            open_.append(w)
            continue
        for x in sort(nxt[st]):
            wx = w + x
            if wx.endswith(u):
                closed.append(wx)
            else:
                queue.append((wx, nxt[st][x]))
    return closed, open_


def complete_first_returns(o: FactorOracle, u: str, budget: int | None = None) -> tuple[str, ...]:
    """All complete first returns to ``u`` of length ≤ budget, sorted by length then alphabet."""
    budget = o.certified_depth if budget is None else budget
    key = ("returns", u, budget)
    if key not in o.memo:
        o.memo[key] = _search_returns(o, u, budget)
    closed, open_ = o.memo[key]
    if open_:
        raise ReturnBudgetExceeded(u, open_[0], budget)
    return _sorted_words(o, closed)


def _sorted_words(o: FactorOracle, ws) -> tuple[str, ...]:
    return tuple(sorted(ws, key=lambda w: (len(w), o.alphabet.word_key(w))))


def privileged_order(o: FactorOracle, u: str) -> int | None:
    """Order of ``u`` as a privileged word, ``None`` when ``u`` is a factor that is not privileged."""
    if not o.is_factor(u):
        raise ValueError(f"{u!r} is not a factor")
    return words.privileged_order(u)


def privileged_record(o: FactorOracle, u: str, budget: int | None = None) -> PrivilegedRecord:
    order = privileged_order(o, u)
    if order is None:
        raise ValueError(f"{u!r} is not privileged")
    budget = o.certified_depth if budget is None else budget
    if not u:
        closed, open_ = _search_returns(o, u, budget)
    else:
        key = ("returns", u, budget)
        if key not in o.memo:
            o.memo[key] = _search_returns(o, u, budget)
        closed, open_ = o.memo[key]
    return PrivilegedRecord(u, order, words.privileged_parent(u), _sorted_words(o, closed), not open_)


def privileged_words(o: FactorOracle, max_len: int, budget: int | None = None) -> list[PrivilegedRecord]:
    """Every privileged word of length ≤ max_len, grown as a tree of returns from ε.

    Records whose return search hit the budget carry ``complete=False``; their
    returns of length ≤ budget are still all present, so no child is lost.
    """
    o.check_length(max_len)
    out, queue = [], deque([""])
    while queue:
        u = queue.popleft()
        rec = privileged_record(o, u, budget)
        out.append(rec)
        queue.extend(r for r in rec.returns if len(r) <= max_len)
    return sorted(out, key=lambda r: (len(r.word), o.alphabet.word_key(r.word)))


def special_between(o: FactorOracle, u: str, returns=None) -> tuple[str, ...]:
    """S(u): right-special r with u ⪯ r ≺ u′ for some complete first return u′."""
    if not words.is_privileged(u):
        raise ValueError(f"{u!r} is not privileged")
    returns = complete_first_returns(o, u) if returns is None else returns
    found = set()
    for r in returns:
        profile = o.extension_profile(r)
        for i in range(len(u), len(r)):
            if len(profile[i]) >= 2:
                found.add(r[:i])
    return _sorted_words(o, found)


def phi0(o: FactorOracle, u: str) -> str:
    """Shortest right-special word having ``u`` as a prefix."""
    if not words.is_privileged(u):
        raise ValueError(f"{u!r} is not privileged")
    w = u
    while len(w) < o.certified_depth:
        ext = o.right_extensions(w)
        if len(ext) >= 2:
            return w
        w += ext[0]
    raise ValueError(f"no right-special extension of {u!r} within certified depth {o.certified_depth}")


def phi1(o: FactorOracle, edge: tuple[str, str]) -> tuple[str, str]:
    """Map a privileged horizontal edge to the right-special edge at u₁∧u₂."""
    u1, u2 = edge
    if u1 == u2:
        raise ValueError("edge endpoints must be distinct")
    if not (words.is_privileged(u1) and words.is_privileged(u2)) or not u1 or not u2:
        raise ValueError("edge endpoints must be non-empty privileged words")
    p1, p2 = words.privileged_parent(u1), words.privileged_parent(u2)
    if p1 != p2:
        raise ValueError(f"{u1!r} and {u2!r} are not returns of the same privileged word")
    if not (o.is_factor(u1) and o.is_factor(u2)):
        raise ValueError("edge endpoints must be factors")
    c = len(words.common_prefix(u1, u2))
    return u1[: c + 1], u2[: c + 1]


def is_right_special_balanced(o: FactorOracle, depth: int) -> BalanceVerdict:
    """Check |S(u)| = 1 for every privileged u with |u| ≤ depth whose returns fit the certified range."""
    checked, skipped = 0, []
    for rec in privileged_words(o, depth):
        if not rec.complete:
            skipped.append(rec.word)
            continue
        s = special_between(o, rec.word, rec.returns)
        checked += 1
        if len(s) != 1:
            return BalanceVerdict(False, checked, (rec.word, s), tuple(skipped))
    return BalanceVerdict(True, checked, None, tuple(skipped))


def is_palindrome(w: str) -> bool:
    return words.is_palindrome(w)


def palindromic_complexity(o: FactorOracle, n: int) -> int:
    return sum(1 for w in o.factors(n) if words.is_palindrome(w))


def privileged_complexity(o: FactorOracle, n: int) -> int:
    return sum(1 for w in o.factors(n) if words.is_privileged(w))


# -- periodic runs ---------------------------------------------------------------


def longest_runs(text: str, periods) -> dict[int, tuple[int, int]]:
    """For each period P: (length, start) of the longest factor of ``text`` with period P.

    The length is at least P (any window of length P trivially has period P).
    """
    arr = np.frombuffer(text.encode("utf-32-le"), dtype=np.uint32)
    out = {}
    for P in periods:
        if P <= 0 or P >= len(arr):
            continue
        eq = np.concatenate(([False], arr[:-P] == arr[P:], [False]))
        edges = np.flatnonzero(eq[1:] != eq[:-1])
        if len(edges) == 0:
            out[P] = (P, 0)
            continue
        starts, ends = edges[::2], edges[1::2]
        lengths = ends - starts
        k = int(np.argmax(lengths))
        out[P] = (int(lengths[k]) + P, int(starts[k]))
    return out


def _run_table(o: FactorOracle, N: int) -> dict[int, tuple[int, int]]:
    key = ("runs", N)
    if key not in o.memo:
        o.memo[key] = longest_runs(o.text, range(1, N))
    return o.memo[key]


def repulsiveness_index(o: FactorOracle, N: int) -> Repulsiveness:
    """ℓ_N = min (|W|−|w|)/|w| over factors W, |W| ≤ N, with w a proper prefix and suffix of W.

    A factor with period P and length L has the border of length L−P, so the
    minimum is reached on the longest factor of each period, capped at N.
    """
    o.check_length(N)
    best = None
    for P, (length, start) in _run_table(o, N).items():
        L = min(length, N)
        if L <= P:
            continue
        value = Fraction(P, L - P)
        if best is None or value < best[0] or (value == best[0] and L < best[1]):
            best = (value, L, start, P)
    if best is None:
        return Repulsiveness(N, None, None, None)
    value, L, start, P = best
    W = o.text[start : start + L]
    return Repulsiveness(N, value, W[: L - P], W)


def max_power(o: FactorOracle, N: int) -> tuple[int, str]:
    """Largest integer p with u^p ∈ ℒ and |u^p| ≤ N, and the shortest such base (leftmost occurrence)."""
    o.check_length(N)
    if N == 0:
        return 0, ""
    best = (1, o.text[:1])
    for P, (length, start) in sorted(_run_table(o, N).items()):
        p = min(length, N) // P
        if p > best[0]:
            best = (p, o.text[start : start + P])
    return best


def max_power_bruteforce(text: str, N: int) -> int:
    """Reference scan: largest p with some u^p a factor of ``text`` of length ≤ N."""
    best = 1 if text and N else 0
    for i in range(len(text)):
        pi = words.prefix_function(text[i : i + N])
        for k, b in enumerate(pi, start=1):
            best = max(best, k // (k - b))
    return best


def _chain_words(w: str) -> list[str]:
    return [w[:n] for n in words.privileged_prefixes(w)]


def power_witness(o: FactorOracle, u: str, p: int, search: int | None = None) -> PowerWitness:
    """Privileged words v₁ ≺ … ≺ v_p tracking the power u^p.

    ``u^p`` is located in the scanned window, or in a prefix of the reference
    point of length ``search``.  From that occurrence v_p is the first
    privileged prefix longer than u^p and v₁…v_{p−1} are its predecessors.
    """
    if p < 2:
        raise ValueError("a power witness needs p ≥ 2")
    if not u:
        raise ValueError("the base must be non-empty")
    target = u * p
    text = o.text
    i = text.find(target)
    if i < 0 and search:
        text = o.point_prefix(search)
        i = text.find(target)
    if i < 0:
        raise ValueError(f"{format_power(u, p)} not found in the searched prefix")
    tail = text[i:]
    lengths = words.privileged_prefixes(tail)
    beyond = [k for k, n in enumerate(lengths) if n > len(target)]
    if not beyond:
        raise ValueError("privileged chain escapes the searched prefix before passing u^p")
    k = beyond[0]
    if k < p:
        raise ValueError("fewer than p non-empty privileged prefixes below v_p")
    chain = tuple(tail[: lengths[j]] for j in range(k - p + 1, k + 1))
    stub = chain[-2][(p - 1) * len(u) :]
    witness = PowerWitness(u, p, chain, stub)
    check_power_witness(witness)
    return witness


def check_power_witness(w: PowerWitness) -> None:
    u, p, chain, stub = w.base, w.exponent, w.chain, w.stub
    if len(chain) != p or not u.startswith(stub):
        raise AssertionError("malformed power witness")
    for j in range(1, p):
        if chain[j - 1] != u * j + stub:
            raise AssertionError(f"v_{j} is not u^{j}ũ")
    for j in range(1, p):
        prev, nxt = chain[j - 1], chain[j]
        if not (nxt.startswith(prev) and nxt.endswith(prev) and words.count_occurrences(prev, nxt) == 2):
            raise AssertionError(f"v_{j + 1} is not a complete first return to v_{j}")
    if not (chain[-1].startswith(u * p) and len(chain[-1]) > p * len(u)):
        raise AssertionError("u^p is not a proper prefix of v_p")


def format_power(u: str, p: int) -> str:
    return f"({u})^{p}" if len(u) > 1 else f"{u}^{p}"


def find_power(point: str, p: int, periods=None) -> tuple[str, int] | None:
    """Leftmost shortest base u with u^p occurring in ``point``, searched over candidate periods.

    Without explicit periods, the candidates are the gaps between consecutive
    privileged prefixes of ``point``.
    """
    if periods is None:
        lengths = words.privileged_prefixes(point)
        periods = sorted({b - a for a, b in zip(lengths[1:], lengths[2:])})
    for P, (length, start) in sorted(longest_runs(point, periods).items()):
        if length >= p * P:
            return point[start : start + P], start
    return None


def rank_profile(o: FactorOracle, N: int) -> RankProfile:
    """Running maximum of ã over privileged words of length ≤ n, with log-power fits."""
    recs = privileged_words(o, N)
    per_len = [0] * (N + 1)
    incomplete = 0
    for r in recs:
        if not r.complete:
            incomplete += 1
        per_len[len(r.word)] = max(per_len[len(r.word)], r.a_tilde)
    lengths, maxima, running = [], [], per_len[0]
    for n in range(1, N + 1):
        running = max(running, per_len[n])
        lengths.append(n)
        maxima.append(running)
    fits = {}
    xs = np.array(lengths[1:], dtype=float)
    ys = np.array(maxima[1:], dtype=float)
    if len(xs) >= 2:
        for b in (1, 2, 3):
            x = np.log(xs) ** b
            coef, res, *_ = np.polyfit(x, ys, 1, full=True)
            fits[b] = {
                "slope": float(coef[0]),
                "intercept": float(coef[1]),
                "residual": float(res[0]) if len(res) else 0.0,
            }
    return RankProfile(lengths, maxima, fits, incomplete)


def count_privileged_factors(u: str) -> int:
    """Number of distinct privileged factors of ``u``, ε included."""
    return sum(1 for f in words.distinct_factors(u) if words.is_privileged(f))
