"""Episode data model, ingestion, sentence segmentation, and tokenization.

Everything downstream (filtering, selection, scoring) consumes the types
defined here, so the contracts are kept deliberately small: immutable
records, lossless segmentation spans, and tokens that always point back
at the bytes they came from.
"""

from __future__ import annotations

import csv
import json
import logging
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Iterator

from .errors import ConfigError, EmptyDocumentError, RecordParseError

logger = logging.getLogger(__name__)

_EPISODE_FIELDS = ("id", "show_id", "transcript", "description",
                   "show_description", "duration_seconds")


def _load_wordlist(name: str) -> frozenset[str]:
    """Read a bundled one-token-per-line list, skipping blanks and comments."""
    text = resources.files("podselect").joinpath(f"data/{name}").read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


ABBREVIATIONS = _load_wordlist("abbreviations.txt")
ENGLISH_STOPWORDS = _load_wordlist("english_stopwords.txt")


@dataclass(frozen=True)
class Episode:
    """One podcast episode as ingested, before any processing."""

    id: str
    show_id: str = ""
    transcript_text: str = ""
    description: str = ""
    show_description: str = ""
    duration_seconds: float | None = None

    def to_record(self) -> dict:
        record = {
            "id": self.id,
            "show_id": self.show_id,
            "transcript": self.transcript_text,
            "description": self.description,
            "show_description": self.show_description,
        }
        if self.duration_seconds is not None:
            record["duration_seconds"] = self.duration_seconds
        return record


@dataclass(frozen=True)
class Token:
    """A normalized token plus the byte span it was cut from."""

    text: str
    byte_span: tuple[int, int]


@dataclass(frozen=True)
class Sentence:
    index: int
    tokens: tuple[Token, ...]
    raw_text: str
    # byte offsets of raw_text within the source transcript
    span: tuple[int, int] = (0, 0)

    def token_texts(self) -> list[str]:
        return [t.text for t in self.tokens]


@dataclass(frozen=True)
class Document:
    """A segmented, tokenized transcript ready for selection."""

    episode_id: str
    sentences: tuple[Sentence, ...]
    total_tokens: int

    def token_texts(self) -> list[str]:
        out: list[str] = []
        for sentence in self.sentences:
            out.extend(t.text for t in sentence.tokens)
        return out


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    strip_edge_punct: bool = True
    stem: bool = False
    drop_stopwords: bool = False


DEFAULT_TOKENIZER = TokenizerConfig()


def _parse_record(record: dict, line_number: int) -> Episode:
    if not isinstance(record, dict):
        raise RecordParseError(line_number, "record is not an object")
    episode_id = record.get("id")
    if not isinstance(episode_id, str) or not episode_id:
        raise RecordParseError(line_number, "missing or empty 'id'")
    transcript = record.get("transcript")
    if not isinstance(transcript, str):
        raise RecordParseError(line_number, "missing 'transcript'")
    duration = record.get("duration_seconds")
    if duration is not None:
        try:
            duration = float(duration)
        except (TypeError, ValueError):
            raise RecordParseError(line_number, "duration_seconds is not a number")
        if duration < 0:
            raise RecordParseError(line_number, "duration_seconds is negative")
    return Episode(
        id=episode_id,
        show_id=str(record.get("show_id") or ""),
        transcript_text=transcript,
        description=str(record.get("description") or ""),
        show_description=str(record.get("show_description") or ""),
        duration_seconds=duration,
    )


def load_episodes(
    path,
    fmt: str = "jsonl",
    errors: list[RecordParseError] | None = None,
    strict: bool = False,
) -> Iterator[Episode]:
    """Lazily read episodes from a JSONL or TSV file.

    Malformed records are never silently dropped: each one is logged with
    its line number and, when ``errors`` is given, appended to it. With
    ``strict=True`` the first bad record raises instead.
    """
    if fmt not in ("jsonl", "tsv"):
        raise ConfigError(f"unknown corpus format: {fmt!r}")

    def report(err: RecordParseError):
        if strict:
            raise err
        logger.warning("skipping record: %s", err)
        if errors is not None:
            errors.append(err)

    with open(path, "r", encoding="utf-8", newline="") as handle:
        if fmt == "jsonl":
            for line_number, line in enumerate(handle, 1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    report(RecordParseError(line_number, f"invalid JSON ({exc.msg})"))
                    continue
                try:
                    yield _parse_record(record, line_number)
                except RecordParseError as err:
                    report(err)
        else:
            reader = csv.DictReader(handle, delimiter="\t")
            header = reader.fieldnames or []
            missing = {"id", "transcript"} - set(header)
            if missing:
                raise ConfigError(
                    "TSV header lacks required columns: " + ", ".join(sorted(missing))
                )
            for row in reader:
                record = {k: row.get(k) for k in _EPISODE_FIELDS if row.get(k) not in (None, "")}
                try:
                    yield _parse_record(record, reader.line_num)
                except RecordParseError as err:
                    report(err)


# --- sentence segmentation ---------------------------------------------------

_TERMINALS = ".!?"
_CLOSERS = "\"'”’)]"


def _is_abbreviation_guard(text: str, dot_index: int) -> bool:
    """True when the period at dot_index ends an abbreviation, not a sentence."""
    start = dot_index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start:dot_index]
    # ignore any opening punctuation stuck to the word, e.g. '("Dr'
    while word and (unicodedata.category(word[0]).startswith("P")
                    or unicodedata.category(word[0]).startswith("S")):
        word = word[1:]
    if not word:
        return False
    if len(word) == 1 and word.isalpha():
        return True  # initials such as "J. Smith"
    return word.lower() in ABBREVIATIONS


def segment_spans(text: str) -> list[tuple[int, int]]:
    """Character spans of sentences, trimmed of surrounding whitespace.

    A boundary is a run of terminal punctuation (. ! ?), optionally followed
    by closing quotes or brackets, followed by whitespace. Lone periods are
    kept inside the sentence when the preceding word is a known abbreviation
    or a single letter. The gaps between returned spans are whitespace only,
    so the original text can always be reassembled from them.
    """
    spans: list[tuple[int, int]] = []
    n = len(text)
    seg_start = 0
    i = 0
    while i < n:
        if text[i] in _TERMINALS:
            run_end = i + 1
            while run_end < n and text[run_end] in _TERMINALS:
                run_end += 1
            close_end = run_end
            while close_end < n and text[close_end] in _CLOSERS:
                close_end += 1
            guarded = (run_end - i == 1) and text[i] == "." and _is_abbreviation_guard(text, i)
            if close_end < n and text[close_end].isspace() and not guarded:
                spans.append((seg_start, close_end))
                seg_start = close_end
                i = close_end
                continue
            i = run_end
        else:
            i += 1
    if seg_start < n:
        spans.append((seg_start, n))

    trimmed: list[tuple[int, int]] = []
    for start, end in spans:
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if end > start:
            trimmed.append((start, end))
    return trimmed


def segment_sentences(text: str) -> list[str]:
    """Split a transcript into sentence strings. See segment_spans."""
    return [text[s:e] for s, e in segment_spans(text)]


# --- tokenization ------------------------------------------------------------

_UNIT_RE = re.compile(r"\S+")


def _is_edge_strippable(ch: str) -> bool:
    cat = unicodedata.category(ch)
    return cat.startswith("P") or cat.startswith("S")


def _s_stem(word: str) -> str:
    """Light plural stemmer: ies->y, drop trailing es/s with guard endings."""
    if len(word) > 4 and word.endswith("ies") and word[-4] not in "ae":
        return word[:-3] + "y"
    if len(word) > 3 and word.endswith("es") and word[-3] not in "aeo":
        return word[:-1]
    if len(word) > 3 and word.endswith("s") and word[-2] not in "su":
        return word[:-1]
    return word


def _byte_offset_table(text: str) -> list[int] | None:
    """Cumulative UTF-8 byte offsets per char index, or None for pure ASCII."""
    if text.isascii():
        return None
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def _to_byte_span(table: list[int] | None, start: int, end: int) -> tuple[int, int]:
    if table is None:
        return (start, end)
    return (table[start], table[end])


def tokenize(text: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> list[Token]:
    """Whitespace tokenization with edge punctuation stripping.

    Tokens that normalize to the empty string are dropped. Each token's
    byte_span locates, in the given text, the characters the token was
    built from (before case folding or stemming).
    """
    table = _byte_offset_table(text)
    tokens: list[Token] = []
    for match in _UNIT_RE.finditer(text):
        start, end = match.start(), match.end()
        if config.strip_edge_punct:
            while start < end and _is_edge_strippable(text[start]):
                start += 1
            while end > start and _is_edge_strippable(text[end - 1]):
                end -= 1
        if start >= end:
            continue
        value = text[start:end]
        if config.lowercase:
            value = value.lower()
        if config.drop_stopwords and value in ENGLISH_STOPWORDS:
            continue
        if config.stem:
            value = _s_stem(value)
        if not value:
            continue
        tokens.append(Token(text=value, byte_span=_to_byte_span(table, start, end)))
    return tokens


def build_document(episode: Episode, config: TokenizerConfig = DEFAULT_TOKENIZER) -> Document:
    """Segment and tokenize an episode transcript.

    Sentences that tokenize to nothing are dropped; the survivors are
    reindexed contiguously from zero. Raises EmptyDocumentError when no
    sentence yields tokens.
    """
    text = episode.transcript_text
    table = _byte_offset_table(text)
    sentences: list[Sentence] = []
    for start, end in segment_spans(text):
        raw = text[start:end]
        tokens = tokenize(raw, config)
        if not tokens:
            continue
        sentences.append(
            Sentence(
                index=len(sentences),
                tokens=tuple(tokens),
                raw_text=raw,
                span=_to_byte_span(table, start, end),
            )
        )
    if not sentences:
        raise EmptyDocumentError(f"episode {episode.id!r}: transcript has no usable sentences")
    total = sum(len(s.tokens) for s in sentences)
    return Document(episode_id=episode.id, sentences=tuple(sentences), total_tokens=total)


def write_episodes(episodes: Iterable[Episode], handle) -> int:
    """Serialize episodes as JSONL onto an open text handle. Returns count."""
    count = 0
    for episode in episodes:
        handle.write(json.dumps(episode.to_record(), ensure_ascii=False) + "\n")
        count += 1
    return count
