"""Privileged words, approximation graphs, Connes-type metrics and zeta partial sums for minimal subshifts."""

__version__ = "0.1.0"
