"""Lexical tf-idf retrieval over knowledge chunks."""
from __future__ import annotations

import math
from collections import Counter
from typing import Protocol, Sequence

from farmtwin.explain.chunking import KnowledgeChunk, terms


class EmptyQueryError(ValueError):
    pass


class Retriever(Protocol):
    def retrieve(self, query: str, k: int) -> list[tuple[KnowledgeChunk, float]]: ...


class TfidfIndex:
    """Cosine similarity over raw term counts weighted by ln(1 + n_chunks / df)."""

    def __init__(self, chunks: Sequence[KnowledgeChunk]):
        if not chunks:
            raise ValueError("index needs at least one chunk")
        self.chunks = list(chunks)
        df = Counter()
        for c in self.chunks:
            df.update(c.term_counts.keys())
        n = len(self.chunks)
        self.idf = {t: math.log(1.0 + n / m) for t, m in df.items()}
        self._vectors = [self._weigh(c.term_counts) for c in self.chunks]
        self._norms = [_norm(v) for v in self._vectors]

    def _weigh(self, counts: Counter) -> dict[str, float]:
        return {t: tf * self.idf[t] for t, tf in counts.items() if t in self.idf}

    def score(self, query: str) -> list[float]:
        q_terms = terms(query)
        if not q_terms:
            raise EmptyQueryError("query is empty after normalization")
        q = self._weigh(Counter(q_terms))
        qn = _norm(q)
        out = []
        for vec, vn in zip(self._vectors, self._norms):
            if qn == 0 or vn == 0:
                out.append(0.0)
                continue
            dot = math.fsum(w * vec[t] for t, w in q.items() if t in vec)
            out.append(dot / (qn * vn))
        return out

    def retrieve(self, query: str, k: int = 4) -> list[tuple[KnowledgeChunk, float]]:
        if k < 1:
            raise ValueError("k must be >= 1")
        scored = sorted(zip(self.chunks, self.score(query)), key=lambda cs: (-cs[1], cs[0].chunk_id))
        return scored[:k]


def _norm(vec: dict[str, float]) -> float:
    return math.sqrt(math.fsum(w * w for w in vec.values()))
