"""Split knowledge documents into overlapping token windows."""
from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_CHUNK_SIZE = 200
DEFAULT_OVERLAP = 40


def normalize(token: str) -> str:
    """Lowercase and drop punctuation and symbol characters."""
    return "".join(ch for ch in token.lower() if unicodedata.category(ch)[0] not in "PS")


def terms(text: str) -> list[str]:
    return [t for t in (normalize(tok) for tok in text.split()) if t]


@dataclass(frozen=True)
class KnowledgeChunk:
    source: str
    ordinal: int
    text: str
    term_counts: Counter = field(compare=False, repr=False, hash=False, default=None)

    def __post_init__(self):
        if not self.text:
            raise ValueError("chunk text must be nonempty")
        if self.term_counts is None:
            object.__setattr__(self, "term_counts", Counter(terms(self.text)))

    @property
    def chunk_id(self) -> tuple[str, int]:
        return (self.source, self.ordinal)

    @property
    def label(self) -> str:
        return f"{self.source}#{self.ordinal}"


def chunk_document(
    name: str, text: str, chunk_size: int = DEFAULT_CHUNK_SIZE, overlap: int = DEFAULT_OVERLAP
) -> list[KnowledgeChunk]:
    if not (chunk_size > overlap >= 0):
        raise ValueError("need chunk_size > overlap >= 0")
    tokens = text.split()
    if not tokens:
        raise ValueError(f"document {name!r} is empty")
    stride = chunk_size - overlap
    return [
        KnowledgeChunk(name, i, " ".join(tokens[start : start + chunk_size]))
        for i, start in enumerate(range(0, len(tokens), stride))
    ]


def load_documents(directory) -> list[tuple[str, str]]:
    """(name, text) for every .md/.txt file in ``directory``, sorted by name."""
    path = Path(directory)
    if not path.is_dir():
        raise FileNotFoundError(f"knowledge base directory not found: {directory}")
    docs = [
        (p.name, p.read_text(encoding="utf-8"))
        for p in sorted(path.iterdir())
        if p.suffix in (".md", ".txt") and p.is_file()
    ]
    if not docs:
        raise FileNotFoundError(f"no .md or .txt documents in {directory}")
    return docs


def default_kb_dir() -> Path:
    return Path(__file__).resolve().parent.parent / "kb"
