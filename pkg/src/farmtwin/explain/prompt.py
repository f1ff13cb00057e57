"""Grounded prompt layout: role preamble, retrieved knowledge, runtime JSON, question."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from farmtwin.explain.chunking import KnowledgeChunk
from farmtwin.ledger import StatusSnapshot, encode
from farmtwin.planner import DecisionRecord

SYSTEM_TEXT = (
    "You explain decisions made autonomously by a digital twin of a farm that "
    "dispatches inspection drones. You do not make or change decisions. Answer "
    "the question using only the knowledge excerpts and the runtime decision "
    "record below. Quote numbers exactly as they appear in the runtime record "
    "and say so when the provided context does not contain the answer."
)

NO_KNOWLEDGE = "(no knowledge retrieved)"


@dataclass(frozen=True)
class PromptContext:
    system_text: str
    knowledge_section: tuple[KnowledgeChunk, ...]
    runtime_section: str
    question: str

    @property
    def chunk_ids(self) -> list[tuple[str, int]]:
        return [c.chunk_id for c in self.knowledge_section]

    def knowledge_text(self) -> str:
        if not self.knowledge_section:
            return NO_KNOWLEDGE
        return "\n\n".join(f"[{c.label}]\n{c.text}" for c in self.knowledge_section)

    def user_text(self) -> str:
        return (
            f"## Knowledge\n{self.knowledge_text()}\n\n"
            f"## Runtime\n{self.runtime_section}\n\n"
            f"## Question\n{self.question}\n"
        )

    def render(self) -> str:
        return f"{self.system_text}\n\n{self.user_text()}"

    def to_dict(self) -> dict:
        return {
            "system_text": self.system_text,
            "knowledge_section": [{"chunk_id": list(c.chunk_id), "text": c.text} for c in self.knowledge_section],
            "runtime_section": self.runtime_section,
            "question": self.question,
        }


def runtime_json(record: DecisionRecord, snapshot: StatusSnapshot) -> str:
    return encode({"decision": record.to_dict(), "snapshot": snapshot.to_dict()})


def assemble_prompt(
    question: str,
    record: DecisionRecord,
    snapshot: StatusSnapshot,
    retrieved: Sequence[Union[KnowledgeChunk, tuple[KnowledgeChunk, float]]],
) -> PromptContext:
    chunks = tuple(r[0] if isinstance(r, tuple) else r for r in retrieved)
    return PromptContext(SYSTEM_TEXT, chunks, runtime_json(record, snapshot), question)
