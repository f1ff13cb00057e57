"""Question answering over one ledger decision."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from farmtwin.explain.backends import BackendError, ChatBackend
from farmtwin.explain.chunking import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_OVERLAP,
    chunk_document,
    default_kb_dir,
    load_documents,
)
from farmtwin.explain.prompt import PromptContext, assemble_prompt
from farmtwin.explain.retrieval import Retriever, TfidfIndex
from farmtwin.ledger import Ledger

DEFAULT_K = 4


@dataclass(frozen=True)
class Explanation:
    answer_text: str
    used_chunk_ids: tuple[tuple[str, int], ...]
    backend_id: str
    prompt_echo: PromptContext

    def to_dict(self) -> dict:
        return {
            "answer_text": self.answer_text,
            "used_chunk_ids": [list(c) for c in self.used_chunk_ids],
            "backend_id": self.backend_id,
            "prompt_echo": self.prompt_echo.to_dict(),
        }


def build_index(
    directory=None, chunk_size: int = DEFAULT_CHUNK_SIZE, overlap: int = DEFAULT_OVERLAP
) -> TfidfIndex:
    """Index every document of a knowledge-base directory (the shipped one by default)."""
    chunks = []
    for name, text in load_documents(directory or default_kb_dir()):
        chunks.extend(chunk_document(name, text, chunk_size, overlap))
    return TfidfIndex(chunks)


def retrieval_query(question: str, tile_id: int, drone_id: Optional[int]) -> str:
    query = f"{question} tile {tile_id}"
    if drone_id is not None:
        query += f" drone {drone_id}"
    return query


def answer(
    question: str,
    decision_id: int,
    ledger: Ledger,
    index: Retriever,
    backend: ChatBackend,
    k: int = DEFAULT_K,
) -> Explanation:
    record, snapshot = ledger.get_decision(decision_id)
    query = retrieval_query(question, record.trigger.tile_id, record.selected_drone_id)
    retrieved = index.retrieve(query, k)
    prompt = assemble_prompt(question, record, snapshot, retrieved)
    try:
        text = backend.complete(prompt)
    except BackendError as exc:
        exc.prompt = prompt
        raise
    return Explanation(text, tuple(prompt.chunk_ids), backend.backend_id, prompt)
