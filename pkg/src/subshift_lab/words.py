"""Pure functions on finite words.

Words are plain ``str`` objects whose characters are alphabet symbols.  Nothing
in this module needs a language: being a palindrome, being privileged and the
chain of privileged prefixes are intrinsic properties of the word itself.
"""

from __future__ import annotations

import os


def is_prefix(v: str, u: str) -> bool:
    return u.startswith(v)


def is_proper_prefix(v: str, u: str) -> bool:
    return len(v) < len(u) and u.startswith(v)


def is_suffix(v: str, u: str) -> bool:
    return u.endswith(v)


def common_prefix(u: str, v: str) -> str:
    """Longest common prefix ``u ∧ v``."""
    return os.path.commonprefix([u, v])


def is_palindrome(w: str) -> bool:
    return w == w[::-1]


def count_occurrences(pattern: str, text: str) -> int:
    """Number of (possibly overlapping) occurrences of a non-empty pattern."""
    n, i = 0, text.find(pattern)
    while i >= 0:
        n += 1
        i = text.find(pattern, i + 1)
    return n


def privileged_prefixes(w: str) -> list[int]:
    """Lengths of the privileged prefixes of ``w``, shortest first.

    The list always starts with 0 (the empty word).  Each privileged prefix
    after the first letter is the complete first return to the previous one
    that is a prefix of ``w``, i.e. it ends where the previous one occurs for
    the second time.
    """
    lengths = [0]
    if not w:
        return lengths
    lengths.append(1)
    p, start = w[:1], 1
    while True:
        j = w.find(p, start)
        if j < 0:
            return lengths
        # the next prefix cannot reoccur before the current one does
        start = j
        p = w[: j + len(p)]
        lengths.append(len(p))


def privileged_order(w: str) -> int | None:
    """Order of ``w`` as a privileged word, or ``None`` if it is not privileged."""
    chain = privileged_prefixes(w)
    return len(chain) - 1 if chain[-1] == len(w) else None


def is_privileged(w: str) -> bool:
    return privileged_prefixes(w)[-1] == len(w)


def privileged_parent(w: str) -> str | None:
    """The privileged word ``w`` is a complete first return to (``None`` for ε)."""
    chain = privileged_prefixes(w)
    if chain[-1] != len(w):
        raise ValueError(f"{w!r} is not privileged")
    return w[: chain[-2]] if len(chain) > 1 else None


def longest_privileged_prefix(w: str) -> str:
    return w[: privileged_prefixes(w)[-1]]


def prefix_function(w: str) -> list[int]:
    """KMP failure function: ``pi[i]`` is the longest proper border of ``w[:i+1]``."""
    pi = [0] * len(w)
    k = 0
    for i in range(1, len(w)):
        while k and w[i] != w[k]:
            k = pi[k - 1]
        if w[i] == w[k]:
            k += 1
        pi[i] = k
    return pi


def smallest_period(w: str) -> int:
    if not w:
        return 0
    return len(w) - prefix_function(w)[-1]


def distinct_factors(w: str) -> set[str]:
    """All distinct factors of ``w``, the empty word included."""
    out = {""}
    for i in range(len(w)):
        for j in range(i + 1, len(w) + 1):
            out.add(w[i:j])
    return out


def format_word(w: str) -> str:
    return w if w else "ε"
