"""Scheme search: exhaustive (small fields), degree-four (GF(256)) and the GF(16) census."""

from __future__ import annotations

from .degree_four import degree_four_search
from .exhaustive import SearchConfig, SearchInterrupted, SearchResult, exhaustive_search

__all__ = ["SearchConfig", "SearchInterrupted", "SearchResult", "degree_four_search", "exhaustive_search"]
