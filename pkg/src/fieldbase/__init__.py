"""Searchable number-field table engine.

Stores field records with their arithmetic invariants, answers range and
ramification queries through an index-scan + post-filter pipeline, tracks
provable completeness of query results, and evaluates mass-heuristic
predictions and slope-content root discriminants in exact rational
arithmetic.
"""

__version__ = "0.1.0"
