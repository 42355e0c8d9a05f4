import random
import sys
from pathlib import Path

import pytest

# make tests/oracles.py importable regardless of invocation directory
sys.path.insert(0, str(Path(__file__).resolve().parent))

from podselect.corpus import Document, Sentence, Token

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def make_sentence(index: int, words: list[str], offset: int = 0) -> Sentence:
    """Build a Sentence whose raw text is the words joined by single spaces.

    Token and sentence spans are byte offsets, matching the tokenizer.
    """
    tokens = []
    position = 0
    parts = []
    for i, word in enumerate(words):
        if i:
            parts.append(" ")
            position += 1
        width = len(word.encode("utf-8"))
        tokens.append(Token(text=word, byte_span=(position, position + width)))
        parts.append(word)
        position += width
    raw = "".join(parts)
    return Sentence(index=index, tokens=tuple(tokens), raw_text=raw,
                    span=(offset, offset + position))


def make_doc(sentence_words: list[list[str]], episode_id: str = "ep-test") -> Document:
    sentences = []
    offset = 0
    for index, words in enumerate(sentence_words):
        sentence = make_sentence(index, words, offset)
        offset = sentence.span[1] + 1
        sentences.append(sentence)
    total = sum(len(s.tokens) for s in sentences)
    return Document(episode_id=episode_id, sentences=tuple(sentences), total_tokens=total)


def random_sentences(rng: random.Random, sentence_count: int, vocab: list[str],
                     min_len: int = 2, max_len: int = 6) -> list[list[str]]:
    return [
        [rng.choice(vocab) for _ in range(rng.randint(min_len, max_len))]
        for _ in range(sentence_count)
    ]


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance gate's one-line verdicts after the run."""
    lines = getattr(sys.modules.get("test_acceptance"), "ACCEPTANCE_LINES", None)
    if not lines:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
