"""Corpus filtering: description cleanup, rejection rules, and the dataset split.

The filter applies six rules in a fixed order and an episode is rejected by
the first rule it trips. Length, duplication, show-overlap, profanity, and
language checks look at the raw description; the final token-count check
looks at the cleaned description, since cleanup is what that rule exists
to feed.
"""

from __future__ import annotations

import bisect
import json
import logging
import math
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import ENGLISH_STOPWORDS, Episode, segment_sentences, tokenize, _load_wordlist
from .errors import ConfigError

logger = logging.getLogger(__name__)

# rule identifiers, in evaluation order
RULE_DESC_TOO_SHORT = "desc_too_short"
RULE_DESC_TOO_LONG = "desc_too_long"
RULE_DUPLICATE = "duplicate_description"
RULE_SHOW_SIMILAR = "similar_to_show_description"
RULE_PROFANITY = "profanity"
RULE_NON_ENGLISH = "non_english"
RULE_TOO_FEW_TOKENS = "desc_too_few_tokens"

ALL_RULES = (
    RULE_DESC_TOO_SHORT,
    RULE_DESC_TOO_LONG,
    RULE_DUPLICATE,
    RULE_SHOW_SIMILAR,
    RULE_PROFANITY,
    RULE_NON_ENGLISH,
    RULE_TOO_FEW_TOKENS,
)

DEFAULT_SPONSOR_PHRASES = (
    "sponsored by",
    "sponsorship",
    "brought to you by",
    "use promo code",
    "promo code",
    "use code",
    "discount code",
    "visit our sponsor",
)

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_HANDLE_RE = re.compile(r"(?<!\w)@\w+")
_FOLLOW_RE = re.compile(r"\bfollow\s+(?:us|me)\b[^.!?\n]*[.!?]?", re.IGNORECASE)


def clean_description(raw: str, sponsor_phrases: Sequence[str] = DEFAULT_SPONSOR_PHRASES) -> str:
    """Strip promotional boilerplate from an episode description.

    Removes URLs, @handles, "follow us ..." clauses, and any sentence
    containing a sponsorship phrase, then collapses whitespace. Text that
    matches nothing comes back unchanged apart from whitespace collapsing.
    """
    text = _URL_RE.sub(" ", raw)
    text = _HANDLE_RE.sub(" ", text)
    text = _FOLLOW_RE.sub(" ", text)
    phrases = [p.lower() for p in sponsor_phrases]
    kept_parts: list[str] = []
    for line in text.split("\n"):
        for sentence in segment_sentences(line):
            lowered = sentence.lower()
            if any(p in lowered for p in phrases):
                continue
            kept_parts.append(sentence)
    return re.sub(r"\s+", " ", " ".join(kept_parts)).strip()


def load_profanity_list(path=None) -> frozenset[str]:
    """Load a one-token-per-line blocklist; defaults to the bundled placeholder."""
    if path is None:
        return _load_wordlist("profanity_placeholder.txt")
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return frozenset(
                line.strip().lower()
                for line in handle
                if line.strip() and not line.strip().startswith("#")
            )
    except OSError as exc:
        raise ConfigError(f"cannot read profanity list {path!r}: {exc}") from exc


def contains_profanity(text: str, wordlist: frozenset[str]) -> bool:
    """Whole-token, case-insensitive blocklist match. No substring matching."""
    return any(token.text in wordlist for token in tokenize(text))


def detect_english(text: str, min_ratio: float = 0.2) -> tuple[bool, float]:
    """Stopword-ratio language check.

    Returns (is_english, ratio) where ratio is the fraction of tokens found
    in the bundled English stopword list. Raises ValueError when the text
    has no tokens, since the ratio is undefined there.
    """
    tokens = tokenize(text)
    if not tokens:
        raise ValueError("cannot detect language of text with no tokens")
    hits = sum(1 for t in tokens if t.text in ENGLISH_STOPWORDS)
    ratio = hits / len(tokens)
    return ratio >= min_ratio, ratio


def _shingles(tokens: list[str], size: int = 3) -> frozenset[tuple[str, ...]]:
    if not tokens:
        return frozenset()
    if len(tokens) < size:
        # short texts get one shingle covering everything, so identical
        # short inputs still compare as equal sets
        return frozenset([tuple(tokens)])
    return frozenset(tuple(tokens[i:i + size]) for i in range(len(tokens) - size + 1))


def _jaccard(a: frozenset, b: frozenset) -> float:
    if not a or not b:
        return 0.0
    return len(a & b) / len(a | b)


def description_similarity(a: str, b: str) -> float:
    """Jaccard similarity over 3-token shingles of the normalized tokens."""
    sa = _shingles([t.text for t in tokenize(a)])
    sb = _shingles([t.text for t in tokenize(b)])
    return _jaccard(sa, sb)


@dataclass(frozen=True)
class FilterConfig:
    desc_min_chars: int = 20
    desc_max_chars: int = 750
    duplicate_sim_threshold: float = 0.9
    show_desc_sim_threshold: float = 0.9
    desc_min_tokens: int = 10
    english_min_stopword_ratio: float = 0.2
    profanity_list_path: str | None = None
    sponsor_phrases: tuple[str, ...] = DEFAULT_SPONSOR_PHRASES

    def __post_init__(self):
        if self.desc_min_chars >= self.desc_max_chars:
            raise ConfigError("desc_min_chars must be below desc_max_chars")
        for name in ("duplicate_sim_threshold", "show_desc_sim_threshold",
                     "english_min_stopword_ratio"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be within [0, 1], got {value}")
        if self.desc_min_tokens < 0:
            raise ConfigError("desc_min_tokens must be non-negative")


@dataclass
class FilterReport:
    input_count: int = 0
    kept_count: int = 0
    rejected_by_rule: dict[str, int] = field(default_factory=dict)
    # episode id -> ordered list of triggered rules. With first-match
    # short-circuiting each list holds exactly one rule.
    reasons: dict[str, list[str]] = field(default_factory=dict)

    def add_rejection(self, episode_id: str, rule: str):
        self.rejected_by_rule[rule] = self.rejected_by_rule.get(rule, 0) + 1
        self.reasons.setdefault(episode_id, []).append(rule)

    def to_json(self) -> str:
        payload = {
            "input": self.input_count,
            "kept": self.kept_count,
            "rejected_by_rule": {
                rule: self.rejected_by_rule[rule]
                for rule in ALL_RULES
                if rule in self.rejected_by_rule
            },
            "reasons": {eid: rules[0] for eid, rules in self.reasons.items()},
        }
        return json.dumps(payload, ensure_ascii=False, indent=2)


class _DuplicateIndex:
    """Shingle-set index with size blocking.

    Jaccard(A, B) >= t forces t <= |A| / |B| <= 1 / t, so candidates are
    narrowed to kept sets whose size falls inside that band before any
    pairwise comparison. Keeps the dedup pass well under O(n^2) on
    realistic corpora.
    """

    def __init__(self, threshold: float):
        self.threshold = threshold
        self._sizes: list[int] = []          # sorted shingle-set sizes
        self._by_size: list[frozenset] = []  # sets, aligned with _sizes

    def is_duplicate(self, shingles: frozenset) -> bool:
        if not shingles or not self._sizes:
            return False
        size = len(shingles)
        low = math.ceil(size * self.threshold)
        high = math.floor(size / self.threshold)
        start = bisect.bisect_left(self._sizes, low)
        end = bisect.bisect_right(self._sizes, high)
        for i in range(start, end):
            if _jaccard(shingles, self._by_size[i]) >= self.threshold:
                return True
        return False

    def add(self, shingles: frozenset):
        position = bisect.bisect_left(self._sizes, len(shingles))
        self._sizes.insert(position, len(shingles))
        self._by_size.insert(position, shingles)


def filter_corpus(
    episodes: Iterable[Episode],
    config: FilterConfig = FilterConfig(),
) -> tuple[list[Episode], FilterReport]:
    """Apply the rejection rules in order; an episode stops at its first hit.

    Length bounds run first, then duplicate detection as a corpus-wide pass
    over the length survivors, then the per-episode checks. Returns the kept
    episodes in input order plus a full report.
    """
    wordlist = load_profanity_list(config.profanity_list_path)
    report = FilterReport()
    episodes = list(episodes)
    report.input_count = len(episodes)

    # rule 1: description length bounds (raw characters)
    survivors: list[Episode] = []
    for episode in episodes:
        length = len(episode.description)
        if length < config.desc_min_chars:
            report.add_rejection(episode.id, RULE_DESC_TOO_SHORT)
        elif length > config.desc_max_chars:
            report.add_rejection(episode.id, RULE_DESC_TOO_LONG)
        else:
            survivors.append(episode)

    # rule 2: near-duplicate descriptions, first occurrence wins
    index = _DuplicateIndex(config.duplicate_sim_threshold)
    deduped: list[Episode] = []
    for episode in survivors:
        shingles = _shingles([t.text for t in tokenize(episode.description)])
        if index.is_duplicate(shingles):
            report.add_rejection(episode.id, RULE_DUPLICATE)
            continue
        index.add(shingles)
        deduped.append(episode)

    # rules 3..6, evaluated per episode in order
    kept: list[Episode] = []
    for episode in deduped:
        if description_similarity(episode.description, episode.show_description) \
                >= config.show_desc_sim_threshold:
            report.add_rejection(episode.id, RULE_SHOW_SIMILAR)
            continue
        if contains_profanity(episode.description, wordlist) \
                or contains_profanity(episode.show_description, wordlist):
            report.add_rejection(episode.id, RULE_PROFANITY)
            continue
        try:
            is_english, _ = detect_english(episode.description,
                                           config.english_min_stopword_ratio)
        except ValueError:
            is_english = False  # no tokens at all, cannot be confirmed English
        if not is_english:
            report.add_rejection(episode.id, RULE_NON_ENGLISH)
            continue
        cleaned = clean_description(episode.description, config.sponsor_phrases)
        if len(tokenize(cleaned)) < config.desc_min_tokens:
            report.add_rejection(episode.id, RULE_TOO_FEW_TOKENS)
            continue
        kept.append(episode)

    report.kept_count = len(kept)
    return kept, report


@dataclass(frozen=True)
class SplitAssignment:
    seed: int
    assignments: dict[str, str]  # episode id -> train | validation | test

    def counts(self) -> dict[str, int]:
        out = {"train": 0, "validation": 0, "test": 0}
        for split in self.assignments.values():
            out[split] += 1
        return out

    def to_jsonl(self) -> str:
        lines = [
            json.dumps({"id": eid, "split": split}, ensure_ascii=False)
            for eid, split in self.assignments.items()
        ]
        return "\n".join(lines) + ("\n" if lines else "")


def split_dataset(
    episode_ids: Sequence[str],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> SplitAssignment:
    """Seeded shuffle then slice into train/validation/test buckets.

    Bucket sizes are floor(ratio * n) with the remainder going to train.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"split ratios must sum to 1, got {ratios}")
    ids = list(episode_ids)
    if len(set(ids)) != len(ids):
        raise ConfigError("duplicate episode ids in split input")
    if len(ids) < 3:
        raise ConfigError("need at least 3 episodes to populate all split buckets")
    rng = random.Random(seed)
    rng.shuffle(ids)
    n = len(ids)
    n_val = math.floor(ratios[1] * n)
    n_test = math.floor(ratios[2] * n)
    n_train = n - n_val - n_test
    assignments: dict[str, str] = {}
    for position, eid in enumerate(ids):
        if position < n_train:
            assignments[eid] = "train"
        elif position < n_train + n_val:
            assignments[eid] = "validation"
        else:
            assignments[eid] = "test"
    return SplitAssignment(seed=seed, assignments=assignments)
