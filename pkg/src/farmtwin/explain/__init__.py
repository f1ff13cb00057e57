"""Retrieval-augmented explanations of ledger decisions."""
from farmtwin.explain.backends import BackendError, RemoteChatBackend, StubBackend
from farmtwin.explain.chunking import KnowledgeChunk, chunk_document
from farmtwin.explain.grounding import GroundingReport, grounding_check
from farmtwin.explain.pipeline import Explanation, answer, build_index
from farmtwin.explain.prompt import PromptContext, assemble_prompt
from farmtwin.explain.retrieval import TfidfIndex
from farmtwin.explain.stub import stub_answer

__all__ = [
    "BackendError",
    "Explanation",
    "GroundingReport",
    "KnowledgeChunk",
    "PromptContext",
    "RemoteChatBackend",
    "StubBackend",
    "TfidfIndex",
    "answer",
    "assemble_prompt",
    "build_index",
    "chunk_document",
    "grounding_check",
    "stub_answer",
]
