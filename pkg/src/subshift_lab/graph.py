"""Tree of words, horizontal edges, choice functions and approximation graphs."""

from __future__ import annotations

import hashlib
import heapq
import itertools
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

from . import words
from .combinatorics import complete_first_returns, privileged_words
from .language import FactorOracle
from .weights import WeightFunction, default_weight

RIGHT_SPECIAL = "rs"
PRIVILEGED = "priv"
KINDS = (RIGHT_SPECIAL, PRIVILEGED)


def check_kind(kind: str) -> str:
    aliases = {"right-special": RIGHT_SPECIAL, "privileged": PRIVILEGED}
    kind = aliases.get(kind, kind)
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
    return kind


@dataclass(frozen=True)
class TreeOfWords:
    depth: int
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def parent(self, v: str) -> str | None:
        return v[:-1] if v else None

    def leaves(self) -> list[str]:
        return [v for v in self.vertices if len(v) == self.depth]


def build_tree(o: FactorOracle, depth: int) -> TreeOfWords:
    o.check_length(depth)
    vertices = [w for n in range(depth + 1) for w in o.factors(n)]
    edges = [(w[:-1], w) for w in vertices if w]
    return TreeOfWords(depth, tuple(vertices), tuple(edges))


@dataclass(frozen=True)
class HorizontalEdge:
    kind: str
    source: str
    target: str
    meet: str
    length: Fraction | float

    def opposite(self) -> HorizontalEdge:
        return HorizontalEdge(self.kind, self.target, self.source, self.meet, self.length)


def _right_special_words(o: FactorOracle, depth: int) -> list[str]:
    return [w for n in range(depth + 1) for w in o.factors(n) if len(o.right_extensions(w)) >= 2]


def horizontal_edges(
    o: FactorOracle, depth: int, kind: str, weight: WeightFunction | None = None
) -> list[HorizontalEdge]:
    """All ordered horizontal edges whose meet has length ≤ depth."""
    kind = check_kind(kind)
    weight = weight or default_weight()
    out = []
    if kind == RIGHT_SPECIAL:
        o.check_length(depth + 1)
        for r in _right_special_words(o, depth):
            ends = [r + x for x in o.right_extensions(r)]
            out.extend(HorizontalEdge(kind, a, b, r, weight(len(r))) for a, b in itertools.permutations(ends, 2))
    else:
        for rec in privileged_words(o, depth):
            rets = complete_first_returns(o, rec.word)
            out.extend(
                HorizontalEdge(kind, a, b, rec.word, weight(len(rec.word))) for a, b in itertools.permutations(rets, 2)
            )
    return out


class LazyPoint:
    """A right-infinite word of the subshift, materialized on demand.

    ``extend(n)`` must return the prefix of length n (or raise when n is beyond
    what the source can certify); ``key`` identifies the point exactly.
    """

    def __init__(self, oracle: FactorOracle, key: tuple, extend: Callable[[int], str], label: str = ""):
        self.oracle = oracle
        self.key = key
        self._extend = extend
        self._prefix = ""
        self.label = label or repr(key)

    def prefix(self, n: int) -> str:
        if n > len(self._prefix):
            self._prefix = self._extend(n)
        return self._prefix[:n]

    def __eq__(self, other) -> bool:
        return isinstance(other, LazyPoint) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"LazyPoint({self.label})"


def orbit_point(o: FactorOracle, offset: int) -> LazyPoint:
    """Shift of the oracle's reference point by ``offset`` symbols."""

    def extend(n: int) -> str:
        if offset + n <= len(o.text):
            return o.text[offset : offset + n]
        return o.point_prefix(offset + n)[offset:]

    return LazyPoint(o, ("orbit", offset), extend, f"shift {offset}")


@dataclass(eq=False)
class ChoiceFunction:
    """Node-decision choice function: at each right-special word pick one extension.

    Because a decision depends only on the node, τ(w) = τ(v) whenever τ(v)
    passes through w, so condition (ii) holds by construction.
    """

    oracle: FactorOracle
    strategy: str = "lexmin"
    seed: int | None = None
    _decisions: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.strategy not in ("lexmin", "hash"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "hash" and self.seed is None:
            raise ValueError("seeded-hash strategy needs a seed")

    @property
    def name(self) -> str:
        return "lexmin" if self.strategy == "lexmin" else f"hash:{self.seed}"

    def _pick(self, w: str, ext: tuple[str, ...]) -> str:
        if len(ext) == 1 or self.strategy == "lexmin":
            return ext[0]
        if w not in self._decisions:
            h = hashlib.blake2b(f"{self.seed}:{w}".encode(), digest_size=8).digest()
            self._decisions[w] = ext[int.from_bytes(h, "big") % len(ext)]
        return self._decisions[w]

    def decide(self, w: str) -> str:
        """The letter following ``w`` on τ(w)."""
        return self._pick(w, self.oracle.right_extensions(w))

    def extend(self, v: str, length: int) -> str:
        """Prefix of τ(v) of the given length."""
        o = self.oracle
        o.check_length(max(length, len(v)))
        state = o.automaton.walk(v)
        if state < 0:
            raise ValueError(f"{v!r} is not a factor")
        nxt, sort = o.automaton.next, o.alphabet.sort
        w = v
        while len(w) < length:
            x = self._pick(w, sort(nxt[state]))
            w += x
            state = nxt[state][x]
        return w[:length]

    def root(self, w: str) -> str:
        """Shortest prefix ρ of ``w`` with τ(ρ) = τ(w)."""
        cut = 0
        for i, ext in enumerate(self.oracle.extension_profile(w)):
            if len(ext) >= 2 and self._pick(w[:i], ext) != w[i]:
                cut = i + 1
        return w[:cut]

    def point(self, v: str) -> LazyPoint:
        """τ(v) as a lazy point, keyed by its root."""
        rho = self.root(v)
        label = f"τ[{self.name}]({words.format_word(rho)})"
        return LazyPoint(self.oracle, ("tau", self.name, rho), lambda n: self.extend(rho, n), label)


def choice_function(o: FactorOracle, strategy: str = "lexmin", seed: int | None = None) -> ChoiceFunction:
    return ChoiceFunction(o, strategy, seed)


def tau_root(point: LazyPoint) -> str | None:
    return point.key[2] if point.key[0] == "tau" else None


@dataclass
class ApproxGraph:
    """Truncation of Γ_τ (kind rs) or Γ̃_τ (kind priv) to meets of length ≤ depth.

    Vertices are identified by the root of the τ-image, which is exact: two
    τ-images coincide iff their roots do.  ``generators`` records, per vertex,
    every word of the truncation whose τ-image was merged into it.
    """

    kind: str
    depth: int
    tau: ChoiceFunction
    vertices: list[str]
    edges: list[HorizontalEdge]
    generators: dict[str, list[str]]
    dropped_edges: int = 0

    def __post_init__(self):
        self.adjacency: dict[str, list[tuple[str, Fraction]]] = {v: [] for v in self.vertices}
        for e in self.edges:
            self.adjacency[e.source].append((e.target, e.length))

    def point(self, vertex: str) -> LazyPoint:
        return self.tau.point(vertex)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen, stack = {self.vertices[0]}, [self.vertices[0]]
        while stack:
            for y, _ in self.adjacency[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.vertices)


def _vertex_words(o: FactorOracle, depth: int, kind: str) -> list[str]:
    if kind == RIGHT_SPECIAL:
        return _right_special_words(o, depth)
    return [r.word for r in privileged_words(o, depth)]


def build_approx_graph(
    tau: ChoiceFunction, depth: int, kind: str, weight: WeightFunction | None = None
) -> ApproxGraph:
    kind = check_kind(kind)
    weight = weight or default_weight()
    o = tau.oracle
    generators: dict[str, list[str]] = {}
    for u in _vertex_words(o, depth, kind):
        generators.setdefault(tau.root(u), []).append(u)
    key = lambda w: (len(w), o.alphabet.word_key(w))
    vertices = sorted(generators, key=key)
    vset = set(vertices)
    edges, dropped, roots = [], 0, {}
    for e in horizontal_edges(o, depth, kind, weight):
        for end in (e.source, e.target):
            if end not in roots:
                roots[end] = tau.root(end)
        s, t = roots[e.source], roots[e.target]
        if s in vset and t in vset:
            edges.append(HorizontalEdge(kind, s, t, e.meet, e.length))
        else:
            dropped += 1
    edges.sort(key=lambda e: (key(e.source), key(e.target), key(e.meet)))
    return ApproxGraph(kind, depth, tau, vertices, edges, generators, dropped)


def graph_distance(g: ApproxGraph, x, y) -> Fraction:
    """Shortest-path distance between two vertices (roots or τ-points) of ``g``."""
    x = tau_root(x) if isinstance(x, LazyPoint) else x
    y = tau_root(y) if isinstance(y, LazyPoint) else y
    if x not in g.adjacency or y not in g.adjacency:
        raise ValueError("both endpoints must be vertices of the graph")
    if x == y:
        return Fraction(0)
    dist = {x: Fraction(0)}
    counter = itertools.count()
    heap = [(Fraction(0), next(counter), x)]
    done = set()
    while heap:
        d, _, v = heapq.heappop(heap)
        if v in done:
            continue
        if v == y:
            return d
        done.add(v)
        for w, length in g.adjacency[v]:
            nd = d + length
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, next(counter), w))
    raise ValueError("vertices are disconnected in the truncated graph")


def _dot_label(length) -> str:
    if isinstance(length, Fraction):
        return str(length)
    return f"{length:.12g}"


def to_dot(g: ApproxGraph) -> str:
    """Deterministic DOT rendering: one node per cylinder root, one edge per ordered pair."""
    ids = {v: f"v{i}" for i, v in enumerate(g.vertices)}
    name = "Gamma_tilde" if g.kind == PRIVILEGED else "Gamma"
    lines = [f"digraph {name} {{", f'  label="{g.kind} depth={g.depth} tau={g.tau.name}";']
    for v in g.vertices:
        merged = ",".join(words.format_word(u) for u in g.generators[v])
        lines.append(f'  {ids[v]} [label="{words.format_word(v)}", generators="{merged}"];')
    for e in g.edges:
        lines.append(
            f'  {ids[e.source]} -> {ids[e.target]} [label="|m|={len(e.meet)} l={_dot_label(e.length)}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def check_condition_ii(tau: ChoiceFunction, v: str, w: str, length: int) -> bool:
    """If τ(v) passes through w, then τ(w) and τ(v) agree on their first ``length`` symbols."""
    tv = tau.extend(v, max(length, len(w)))
    if not tv.startswith(w) or len(w) <= len(v):
        return True
    return tau.extend(w, length) == tv[:length]

