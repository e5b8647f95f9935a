"""Combining wordclass taggers: component taggers, voting, pairwise and
stacked combiners, and the evaluation harness."""

__version__ = "0.1.0"
