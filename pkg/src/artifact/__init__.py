"""Finite-combinatorics workbench for algebras of relations.

Subpackages cover: finite graphs with exact chromatic number and girth,
atom structures and their complex algebras with axiom checking, concrete
set algebras of n-ary relations, rainbow and Monk-style atom structure
constructions, network games (atomic, pebble, representability), and
guarded-fragment translations.
"""

__version__ = "0.1.0"
