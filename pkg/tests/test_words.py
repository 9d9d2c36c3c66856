from hypothesis import given
from hypothesis import strategies as st

import brute
from subshift_lab import words

binary = st.text(alphabet="ab", max_size=14)


def test_privileged_prefixes_of_fibonacci_prefix():
    assert words.privileged_prefixes("101101011011") == [0, 1, 3, 6, 11]


def test_privileged_order_small():
    assert words.privileged_order("") == 0
    assert words.privileged_order("1") == 1
    assert words.privileged_order("101") == 2
    assert words.privileged_order("10") is None


def test_parent():
    assert words.privileged_parent("") is None
    assert words.privileged_parent("0110") == "0"


def test_palindrome():
    assert words.is_palindrome("0110")
    assert not words.is_palindrome("10")


def test_format_empty_word():
    assert words.format_word("") == "ε"


@given(binary)
def test_privileged_matches_recursive_definition(w):
    assert words.is_privileged(w) == brute.is_privileged(w)


@given(binary)
def test_privileged_order_matches_recursive_definition(w):
    if brute.is_privileged(w):
        assert words.privileged_order(w) == brute.privileged_order(w)


@given(binary)
def test_every_palindrome_is_privileged(w):
    if words.is_palindrome(w):
        assert words.is_privileged(w)


@given(binary)
def test_smallest_period(w):
    p = words.smallest_period(w)
    assert all(w[i] == w[i + p] for i in range(len(w) - p))
    assert all(any(w[i] != w[i + q] for i in range(len(w) - q)) for q in range(1, p))


@given(binary)
def test_longest_privileged_prefix_is_privileged_prefix(w):
    v = words.longest_privileged_prefix(w)
    assert w.startswith(v) and brute.is_privileged(v)
    assert not any(brute.is_privileged(w[:k]) for k in range(len(v) + 1, len(w) + 1))
