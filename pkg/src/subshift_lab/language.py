"""Factor oracles for concrete minimal subshifts.

A :class:`FactorOracle` answers membership, extension and counting questions
about the language of a subshift up to a certified length.  Internally it
scans a window of a point of the subshift (a fixed point of a substitution, a
characteristic Sturmian word, or a user sample) through a suffix automaton.

Subshift definitions can be ingested from JSON documents::

    {"type": "substitution", "rules": {"0": "01", "1": "10"}, "seed": "0", "depth": 100}
    {"type": "sturmian", "cf": [1], "cyclic": true, "depth": 100}
    {"type": "sturmian", "cf": "n", "depth": 100}          # a_n = n
    {"type": "sample", "text": "0100101001001...", "depth": 20}

An optional ``"alphabet"`` list fixes the symbol order used for every
lexicographic tie-break downstream; otherwise symbols are sorted.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

MAX_WINDOW = 1 << 22


class UncertifiedLength(ValueError):
    """A query needs the language beyond the oracle's certified depth."""


class UncertifiedDepth(ValueError):
    """The requested depth cannot be certified from the available data."""

    def __init__(self, depth: int, reason: str):
        super().__init__(f"uncertified depth {depth}: {reason}")
        self.depth = depth


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise ValueError("an aperiodic subshift needs at least two symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"repeated symbols in alphabet {self.symbols}")
        if any(len(s) != 1 for s in self.symbols):
            raise ValueError("symbols must be single characters")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def rank(self, symbol: str) -> int:
        return self.symbols.index(symbol)

    def sort(self, letters) -> tuple[str, ...]:
        return tuple(sorted(letters, key=self.symbols.index))

    def word_key(self, w: str) -> tuple[int, ...]:
        return tuple(self.symbols.index(x) for x in w)


class SuffixAutomaton:
    """Online suffix automaton of a growing text.

    Every state stands for a set of factors sharing their end positions, so
    they also share their one-letter right extensions: the outgoing
    transitions.
    """

    __slots__ = ("link", "length", "next", "first_end", "last", "size")

    def __init__(self, text: str = ""):
        self.link = [-1]
        self.length = [0]
        self.next: list[dict[str, int]] = [{}]
        self.first_end = [0]
        self.last = 0
        self.size = 0
        for ch in text:
            self.extend(ch)

    def extend(self, ch: str) -> None:
        link, length, nxt, first_end = self.link, self.length, self.next, self.first_end
        cur = len(length)
        length.append(length[self.last] + 1)
        link.append(0)
        nxt.append({})
        first_end.append(self.size)
        p = self.last
        while p != -1 and ch not in nxt[p]:
            nxt[p][ch] = cur
            p = link[p]
        if p != -1:
            q = nxt[p][ch]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = len(length)
                length.append(length[p] + 1)
                link.append(link[q])
                nxt.append(dict(nxt[q]))
                first_end.append(first_end[q])
                while p != -1 and nxt[p].get(ch) == q:
                    nxt[p][ch] = clone
                    p = link[p]
                link[q] = link[cur] = clone
        self.last = cur
        self.size += 1

    def walk(self, w: str, state: int = 0) -> int:
        """State reached by reading ``w``, or -1 if ``w`` is not a factor."""
        nxt = self.next
        for ch in w:
            state = nxt[state].get(ch, -1)
            if state < 0:
                return -1
        return state

    def _interval_counts(self, max_len: int, keep=None) -> np.ndarray:
        diff = np.zeros(max_len + 2, dtype=np.int64)
        length, link = self.length, self.link
        for v in range(1, len(length)):
            if keep is not None and not keep(v):
                continue
            lo = length[link[v]] + 1
            hi = min(length[v], max_len)
            if lo <= hi:
                diff[lo] += 1
                diff[hi + 1] -= 1
        counts = np.cumsum(diff)[: max_len + 1]
        return counts

    def factor_counts(self, max_len: int) -> list[int]:
        """Number of distinct factors of each length 0..max_len."""
        counts = self._interval_counts(max_len)
        counts[0] = 1
        return [int(c) for c in counts]

    def branching_counts(self, max_len: int) -> dict[int, list[int]]:
        """For each value a ≥ 1: number of factors of each length with a+1 extensions."""
        degrees = {len(d) for d in self.next} - {0, 1}
        out = {}
        for deg in sorted(degrees):
            counts = self._interval_counts(max_len, keep=lambda v, d=deg: len(self.next[v]) == d)
            counts[0] = 1 if len(self.next[0]) == deg else 0
            out[deg - 1] = [int(c) for c in counts]
        return out


@dataclass(frozen=True)
class SturmianSpec:
    """Continued-fraction data ``a_1, a_2, ...`` of a Sturmian subshift.

    ``coefficients`` are used as given (repeated forever when ``cyclic``);
    ``rule="n"`` means ``a_n = n``.
    """

    coefficients: tuple[int, ...] = ()
    cyclic: bool = False
    rule: str | None = None

    def __post_init__(self):
        if self.rule is not None and self.rule != "n":
            raise ValueError(f"unknown coefficient rule {self.rule!r}")
        if self.rule is None and not self.coefficients:
            raise ValueError("no continued-fraction coefficients supplied")
        if any(int(a) < 1 for a in self.coefficients):
            raise ValueError("continued-fraction coefficients must be positive")

    def coefficient(self, n: int) -> int:
        """``a_n`` for n ≥ 1; IndexError when a finite list is exhausted."""
        if n < 1:
            raise ValueError("coefficients are indexed from 1")
        if self.rule == "n":
            return n
        if self.cyclic:
            return self.coefficients[(n - 1) % len(self.coefficients)]
        if n > len(self.coefficients):
            raise IndexError(n)
        return self.coefficients[n - 1]

    def standard_words(self, count: int) -> list[str]:
        """``[s_0, ..., s_{count-1}]`` with s_n = s_{n-1}^{a_n} s_{n-2}."""
        s = ["0", "0" * (self.coefficient(1) - 1) + "1"]
        while len(s) < count:
            n = len(s)
            s.append(s[-1] * self.coefficient(n) + s[-2])
        return s[:count]

    def characteristic_prefix(self, length: int) -> str:
        """Prefix of the limit of the standard words, built without overshooting."""
        prev, cur, n = "0", "0" * (self.coefficient(1) - 1) + "1", 1
        while len(cur) < length:
            n += 1
            a = self.coefficient(n)
            reps = min(a, -(-length // len(cur)))
            nxt = cur * reps
            if reps == a:
                nxt += prev
            prev, cur = cur, nxt
            if reps < a:
                break
        return cur[:length]


@dataclass(eq=False)
class FactorOracle:
    """Exact view of the language ℒ up to ``certified_depth``.

    ``text`` is the scanned window (a prefix of a point of the subshift, or
    the sample itself).  ``point`` produces prefixes of that point of any
    length, when the source allows it.
    """

    alphabet: Alphabet
    source: str
    text: str
    certified_depth: int
    certificate: dict
    point: Callable[[int], str] | None = None
    definition: dict = field(default_factory=dict)
    automaton: SuffixAutomaton | None = None

    def __post_init__(self):
        if self.automaton is None:
            self.automaton = SuffixAutomaton(self.text)
        self._counts = self.automaton.factor_counts(self.certified_depth)
        self._branching = None
        self._factor_sets: dict[int, frozenset[str]] = {}
        # memo for derived per-word data (complete first returns and the like)
        self.memo: dict = {}

    @property
    def certified(self) -> bool:
        return self.source != "sample"

    def check_length(self, n: int) -> None:
        if n > self.certified_depth:
            raise UncertifiedLength(
                f"uncertified length {n} (certified depth {self.certified_depth})"
            )

    def is_factor(self, w: str) -> bool:
        self.check_length(len(w))
        return self.automaton.walk(w) >= 0

    def right_extensions(self, w: str) -> tuple[str, ...]:
        """Letters x with wx ∈ ℒ, in alphabet order."""
        self.check_length(len(w) + 1)
        state = self.automaton.walk(w)
        if state < 0:
            raise ValueError(f"{w!r} is not a factor")
        return self.alphabet.sort(self.automaton.next[state])

    def extension_profile(self, w: str) -> list[tuple[str, ...]]:
        """Right extensions of every prefix ``w[:i]``, i = 0..|w|-1, in one pass."""
        self.check_length(len(w))
        nxt, sort = self.automaton.next, self.alphabet.sort
        state, out = 0, []
        for ch in w:
            out.append(sort(nxt[state]))
            state = nxt[state].get(ch, -1)
            if state < 0:
                raise ValueError(f"{w!r} is not a factor")
        return out

    def is_right_special(self, w: str) -> bool:
        return len(self.right_extensions(w)) >= 2

    def complexity(self, n: int) -> int:
        self.check_length(n)
        return self._counts[n]

    def complexities(self, max_len: int | None = None) -> list[int]:
        max_len = self.certified_depth if max_len is None else max_len
        self.check_length(max_len)
        return self._counts[: max_len + 1]

    def branching_counts(self) -> dict[int, list[int]]:
        """``{a: [#words of length n with a(v) = a]}`` for n below the certified depth."""
        if self._branching is None:
            self._branching = self.automaton.branching_counts(self.certified_depth - 1)
        return self._branching

    def right_special_counts(self, max_len: int | None = None) -> list[int]:
        max_len = self.certified_depth - 1 if max_len is None else max_len
        self.check_length(max_len + 1)
        rows = self.branching_counts().values()
        return [sum(row[n] for row in rows) for n in range(max_len + 1)]

    def factors(self, n: int) -> list[str]:
        """All factors of length n, in lexicographic order of the alphabet."""
        self.check_length(n)
        if n not in self._factor_sets:
            nxt = self.automaton.next
            level = [("", 0)]
            for _ in range(n):
                level = [(w + ch, st) for w, st in level for ch, st in nxt[st].items()]
            self._factor_sets[n] = frozenset(w for w, _ in level)
        return sorted(self._factor_sets[n], key=self.alphabet.word_key)

    def occurrence(self, w: str) -> int:
        """Start of the first occurrence of ``w`` in the scanned window."""
        i = self.text.find(w)
        if i < 0:
            raise ValueError(f"{w!r} does not occur in the scanned window")
        return i

    def point_prefix(self, length: int) -> str:
        """Prefix of the oracle's reference point; may exceed the certified depth."""
        if self.point is None:
            if length > len(self.text):
                raise UncertifiedLength(f"sample has only {len(self.text)} symbols")
            return self.text[:length]
        return self.point(length)

    def summary(self) -> dict:
        return {
            "source": self.source,
            "alphabet": list(self.alphabet.symbols),
            "certified_depth": self.certified_depth,
            "certificate": self.certificate,
            "definition": self.definition,
        }


def is_factor(o: FactorOracle, w: str) -> bool:
    return o.is_factor(w)


def complexity(o: FactorOracle, n: int) -> int:
    return o.complexity(n)


# -- certification ---------------------------------------------------------


def _stabilize(point: Callable[[int], str], depth: int, start: int, cap: int = MAX_WINDOW):
    """Grow a prefix window until doubling it leaves all counts ≤ depth unchanged."""
    sam = SuffixAutomaton()
    window = max(start, depth + 1)
    text = point(window)
    for ch in text:
        sam.extend(ch)
    counts = sam.factor_counts(depth)
    while True:
        if 2 * window > cap:
            raise UncertifiedDepth(depth, f"factor sets did not stabilize below {cap} symbols")
        bigger = point(2 * window)
        for ch in bigger[window:]:
            sam.extend(ch)
        doubled = sam.factor_counts(depth)
        log.debug("window %d -> %d stable=%s", window, 2 * window, counts == doubled)
        if doubled == counts:
            return bigger, sam, {"method": "window-doubling", "window": window, "scanned": 2 * window}
        window, counts = 2 * window, doubled


def _check_aperiodic(counts: Sequence[int]) -> None:
    for n, p in enumerate(counts):
        if p <= n:
            raise ValueError(f"periodic language: p({n}) = {p} ≤ {n}")


# -- substitutions -------------------------------------------------------------


def _is_primitive(rules: Mapping[str, str], alphabet: Alphabet) -> bool:
    k = len(alphabet)
    m = np.zeros((k, k), dtype=bool)
    for a in alphabet:
        for b in rules[a]:
            m[alphabet.rank(b), alphabet.rank(a)] = True
    power = m.copy()
    # Wielandt: a primitive k×k matrix has a positive power of exponent ≤ (k-1)²+1
    for _ in range((k - 1) ** 2 + 1):
        if power.all():
            return True
        power = (power.astype(np.int64) @ m.astype(np.int64)) > 0
    return bool(power.all())


def _fixed_point_generator(rules: Mapping[str, str], seed: str) -> Callable[[int], str]:
    # find the least power of the substitution whose image of seed starts with seed
    heads, x = [], seed
    while x not in heads:
        heads.append(x)
        x = rules[x][0]
    if x != seed:
        raise ValueError(f"no fixed point starting with {seed!r}: seed is not on a cycle of first letters")
    period = len(heads)

    def apply(w: str) -> str:
        return "".join(rules[c] for c in w)

    word = seed
    for _ in range(64):
        grown = word
        for _ in range(period):
            grown = apply(grown)
        if len(grown) > len(word):
            break
        word = grown
    else:
        raise ValueError(f"no fixed point constructible from {seed!r}: images do not grow")
    cache = [seed]

    def point(length: int) -> str:
        w = cache[0]
        while len(w) < length:
            for _ in range(period):
                w = apply(w)
        cache[0] = w
        return w[:length]

    return point


def substitution_oracle(
    rules: Mapping[str, str],
    seed: str,
    depth: int,
    alphabet: Sequence[str] | None = None,
) -> FactorOracle:
    """Oracle for the subshift of a primitive substitution, read off a fixed point."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    symbols = tuple(alphabet) if alphabet else tuple(sorted(rules))
    if len(symbols) < 2:
        raise ValueError("not primitive: a one-letter substitution generates a periodic subshift")
    alpha = Alphabet(symbols)
    if set(rules) != set(symbols) or any(not rules[a] or set(rules[a]) - set(symbols) for a in rules):
        raise ValueError("rules must map every symbol to a non-empty word over the alphabet")
    if seed not in rules:
        raise ValueError(f"seed {seed!r} is not a symbol")
    if not _is_primitive(rules, alpha):
        raise ValueError("not primitive: no power of the substitution matrix is positive")
    point = _fixed_point_generator(rules, seed)
    text, sam, cert = _stabilize(point, depth, start=max(4 * depth, 64))
    counts = sam.factor_counts(depth)
    _check_aperiodic(counts)
    definition = {"type": "substitution", "rules": dict(sorted(rules.items())), "seed": seed, "depth": depth}
    return FactorOracle(alpha, "substitution", text, depth, cert, point, definition, sam)


# -- Sturmian ------------------------------------------------------------------


def sturmian_oracle(spec: SturmianSpec, depth: int) -> FactorOracle:
    """Oracle for the Sturmian subshift with the given continued-fraction data.

    The scanned window is the first standard word s_m with q_m ≥ 2·depth that
    already shows exactly n+1 factors of every length n ≤ depth.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    words = spec.standard_words(2)
    needed = 2 * depth
    while True:
        if len(words[-1]) >= max(needed, 2):
            counts = SuffixAutomaton(words[-1]).factor_counts(depth)
            if all(p == n + 1 for n, p in enumerate(counts)):
                break
            needed = 2 * len(words[-1])
        try:
            a = spec.coefficient(len(words))
        except IndexError:
            raise UncertifiedDepth(
                depth,
                f"insufficient coefficients: need a standard word with q_m ≥ {max(needed, 2)}, "
                f"the supplied {len(spec.coefficients)} coefficients reach q_{len(words) - 1} = {len(words[-1])}"
            ) from None
        words.append(words[-1] * a + words[-2])
        if len(words[-1]) > MAX_WINDOW:
            raise UncertifiedDepth(depth, f"standard words exceed {MAX_WINDOW} symbols")
    m = len(words) - 1
    text = words[-1]
    sam = SuffixAutomaton(text)
    cert = {"method": "exact-count", "standard_word": m, "q_m": len(text)}
    # window-doubling audit on top of the exact count, when the next coefficients exist
    try:
        doubled = spec.characteristic_prefix(2 * len(text))
    except IndexError:
        doubled = ""
    if len(doubled) == 2 * len(text) and doubled.startswith(text):
        for ch in doubled[len(text):]:
            sam.extend(ch)
        cert["doubling_stable"] = sam.factor_counts(depth) == counts
        text = doubled
    definition = {"type": "sturmian", "depth": depth}
    if spec.rule:
        definition["cf"] = spec.rule
    else:
        definition["cf"] = list(spec.coefficients)
        definition["cyclic"] = spec.cyclic
    return FactorOracle(Alphabet(("0", "1")), "sturmian", text, depth, cert, spec.characteristic_prefix, definition, sam)


# -- samples -------------------------------------------------------------------


def sample_oracle(text: str, depth: int, alphabet: Sequence[str] | None = None) -> FactorOracle:
    """Oracle whose language is the set of substrings of ``text`` (uncertified)."""
    if len(text) < depth:
        raise UncertifiedDepth(depth, f"sample of length {len(text)} is too short")
    if len(text) < 4 * depth:
        log.warning("sample of length %d is short for depth %d; factor sets may be incomplete", len(text), depth)
    alpha = Alphabet(tuple(alphabet) if alphabet else tuple(sorted(set(text))))
    if set(text) - set(alpha.symbols):
        raise ValueError("sample uses symbols outside the alphabet")
    cert = {
        "method": "sample",
        "note": "sample-based, not stabilized",
        "adequate_length": len(text) >= 4 * depth,
    }
    definition = {"type": "sample", "text": text, "depth": depth}
    return FactorOracle(alpha, "sample", text, depth, cert, None, definition)


# -- JSON ingestion ------------------------------------------------------------

_KEYS = {
    "substitution": {"type", "rules", "seed", "depth", "alphabet"},
    "sturmian": {"type", "cf", "cyclic", "depth"},
    "sample": {"type", "text", "depth", "alphabet"},
}


def sturmian_spec_from_json(cf, cyclic: bool = False) -> SturmianSpec:
    if isinstance(cf, str):
        return SturmianSpec(rule=cf)
    if not isinstance(cf, list) or not all(isinstance(a, int) for a in cf):
        raise ValueError("cf must be a list of positive integers or the rule 'n'")
    return SturmianSpec(tuple(cf), cyclic=bool(cyclic))


def oracle_from_json(doc: Mapping, depth: int | None = None) -> FactorOracle:
    """Build an oracle from a subshift definition document."""
    if not isinstance(doc, Mapping) or "type" not in doc:
        raise ValueError("missing subshift spec")
    kind = doc["type"]
    if kind not in _KEYS:
        raise ValueError(f"subshift.type: unknown type {kind!r}")
    unknown = set(doc) - _KEYS[kind]
    if unknown:
        raise ValueError(f"subshift.{sorted(unknown)[0]}: unknown key")
    depth = doc.get("depth", depth)
    if not isinstance(depth, int) or depth < 0:
        raise ValueError("subshift.depth: a non-negative integer is required")
    if kind == "substitution":
        return substitution_oracle(doc["rules"], doc["seed"], depth, doc.get("alphabet"))
    if kind == "sturmian":
        return sturmian_oracle(sturmian_spec_from_json(doc["cf"], doc.get("cyclic", False)), depth)
    return sample_oracle(doc["text"], depth, doc.get("alphabet"))


def random_factors(o: FactorOracle, count: int, max_len: int, rng) -> list[str]:
    """Random factors drawn from random windows of the scanned text."""
    o.check_length(max_len)
    out = []
    for _ in range(count):
        n = rng.randint(0, max_len)
        i = rng.randrange(0, len(o.text) - n + 1)
        out.append(o.text[i : i + n])
    return out


def iter_words(alphabet: Alphabet, n: int) -> Iterator[str]:
    """All words of length n over the alphabet (brute-force helper)."""
    for t in itertools.product(alphabet.symbols, repeat=n):
        yield "".join(t)
