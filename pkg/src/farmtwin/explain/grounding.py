"""Flag numbers in an answer that do not occur in the prompt it was given."""
from __future__ import annotations

import re
from dataclasses import dataclass

NUMBER = re.compile(r"(?<![\w.])-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?")


def numeric_literals(text: str) -> list[str]:
    return NUMBER.findall(text)


@dataclass(frozen=True)
class GroundingReport:
    checked: tuple[str, ...]
    ungrounded: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.ungrounded

    def to_dict(self) -> dict:
        return {"checked": list(self.checked), "ungrounded": list(self.ungrounded), "passed": self.passed}


def check_text(answer_text: str, prompt_text: str) -> GroundingReport:
    known = set(numeric_literals(prompt_text))
    known_values = {float(x) for x in known}
    found = numeric_literals(answer_text)
    bad = [x for x in found if x not in known and float(x) not in known_values]
    return GroundingReport(tuple(found), tuple(bad))


def grounding_check(explanation) -> GroundingReport:
    return check_text(explanation.answer_text, explanation.prompt_echo.render())
