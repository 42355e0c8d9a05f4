import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from podselect.corpus import (Episode, TokenizerConfig, build_document,
                              load_episodes, segment_sentences, segment_spans,
                              tokenize)
from podselect.errors import ConfigError, EmptyDocumentError, RecordParseError


def write_lines(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


class TestLoadEpisodes:
    def test_three_well_formed_records(self, tmp_path):
        records = [
            {"id": f"ep{i}", "show_id": "s1", "transcript": f"text {i}",
             "description": "d", "show_description": "sd", "duration_seconds": 60 + i}
            for i in range(3)
        ]
        path = tmp_path / "eps.jsonl"
        write_lines(path, [json.dumps(r) for r in records])
        episodes = list(load_episodes(path))
        assert [e.id for e in episodes] == ["ep0", "ep1", "ep2"]
        assert episodes[1].transcript_text == "text 1"
        assert episodes[2].duration_seconds == 62.0

    def test_missing_id_reported_with_line_number(self, tmp_path):
        path = tmp_path / "eps.jsonl"
        write_lines(path, [
            json.dumps({"id": "ep1", "transcript": "a"}),
            json.dumps({"transcript": "no id here"}),
            json.dumps({"id": "ep3", "transcript": "c"}),
        ])
        errors = []
        episodes = list(load_episodes(path, errors=errors))
        assert [e.id for e in episodes] == ["ep1", "ep3"]
        assert len(errors) == 1
        assert errors[0].line_number == 2

    def test_invalid_json_and_missing_transcript(self, tmp_path):
        path = tmp_path / "eps.jsonl"
        write_lines(path, [
            "{not json",
            json.dumps({"id": "ep2"}),
            json.dumps({"id": "ep3", "transcript": "ok"}),
        ])
        errors = []
        episodes = list(load_episodes(path, errors=errors))
        assert [e.id for e in episodes] == ["ep3"]
        assert [e.line_number for e in errors] == [1, 2]

    def test_strict_mode_raises(self, tmp_path):
        path = tmp_path / "eps.jsonl"
        write_lines(path, [json.dumps({"transcript": "x"})])
        with pytest.raises(RecordParseError):
            list(load_episodes(path, strict=True))

    def test_empty_file_yields_nothing(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        assert list(load_episodes(path)) == []

    def test_negative_duration_rejected(self, tmp_path):
        path = tmp_path / "eps.jsonl"
        write_lines(path, [json.dumps({"id": "e", "transcript": "t",
                                       "duration_seconds": -5})])
        errors = []
        assert list(load_episodes(path, errors=errors)) == []
        assert len(errors) == 1

    def test_tsv_round_trip(self, tmp_path):
        path = tmp_path / "eps.tsv"
        path.write_text(
            "id\tshow_id\ttranscript\tdescription\tshow_description\tduration_seconds\n"
            "ep1\ts1\thello there\tdesc one\tshow desc\t120\n"
            "ep2\ts1\tsecond text\tdesc two\tshow desc\t\n",
            encoding="utf-8",
        )
        episodes = list(load_episodes(path, fmt="tsv"))
        assert [e.id for e in episodes] == ["ep1", "ep2"]
        assert episodes[0].duration_seconds == 120.0
        assert episodes[1].duration_seconds is None

    def test_tsv_missing_required_column(self, tmp_path):
        path = tmp_path / "eps.tsv"
        path.write_text("id\tdescription\nep1\td\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            list(load_episodes(path, fmt="tsv"))

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            list(load_episodes(tmp_path / "x.csv", fmt="csv"))


class TestSegmentation:
    def test_hand_segmented_fixture(self, fixtures_dir):
        cases = json.loads((fixtures_dir / "segmentation_cases.json").read_text("utf-8"))
        assert len(cases) == 50
        for case in cases:
            assert segment_sentences(case["text"]) == case["sentences"], case["text"]

    def test_abbreviation_not_split(self):
        assert segment_sentences("Dr. Smith arrived.") == ["Dr. Smith arrived."]

    def test_unpunctuated_transcript_is_one_sentence(self):
        text = "so we kept talking for an hour about nothing in particular"
        assert segment_sentences(text) == [text]

    def test_spans_cover_text_with_whitespace_gaps(self):
        text = "  One here. Two there!  Three? "
        spans = segment_spans(text)
        previous_end = 0
        for start, end in spans:
            assert text[previous_end:start].strip() == ""
            assert start < end
            previous_end = end
        assert text[previous_end:].strip() == ""

    @given(st.text(alphabet="aB .!?\n\t'\"", max_size=80))
    @settings(max_examples=200)
    def test_reassembly_from_spans(self, text):
        spans = segment_spans(text)
        rebuilt = []
        cursor = 0
        for start, end in spans:
            gap = text[cursor:start]
            assert gap.strip() == ""
            rebuilt.append(gap)
            rebuilt.append(text[start:end])
            cursor = end
        rebuilt.append(text[cursor:])
        assert "".join(rebuilt) == text


class TestTokenize:
    def test_basic_normalization(self):
        assert [t.text for t in tokenize("The cat sat.")] == ["the", "cat", "sat"]

    def test_edge_punctuation_stripped(self):
        assert [t.text for t in tokenize("Hello, WORLD!!")] == ["hello", "world"]

    def test_pure_punctuation_dropped(self):
        assert tokenize("!!! ... ???") == []

    def test_internal_punctuation_kept(self):
        assert [t.text for t in tokenize("can't x-ray")] == ["can't", "x-ray"]

    def test_byte_spans_point_at_sources(self):
        text = "Hello, WORLD!! again"
        for token in tokenize(text):
            start, end = token.byte_span
            assert text.encode("utf-8")[start:end].decode("utf-8").lower() == token.text

    def test_byte_spans_with_multibyte_chars(self):
        text = "café ouvert! déjà vu"
        data = text.encode("utf-8")
        tokens = tokenize(text)
        assert [t.text for t in tokens] == ["café", "ouvert", "déjà", "vu"]
        for token in tokens:
            start, end = token.byte_span
            assert data[start:end].decode("utf-8").lower() == token.text

    def test_lowercase_flag_off(self):
        tokens = tokenize("The CAT", TokenizerConfig(lowercase=False))
        assert [t.text for t in tokens] == ["The", "CAT"]

    def test_stemming_flag(self):
        tokens = tokenize("dogs carries classes focus",
                          TokenizerConfig(stem=True))
        assert [t.text for t in tokens] == ["dog", "carry", "classe", "focus"]

    def test_stopword_dropping_flag(self):
        tokens = tokenize("the cat and the hat", TokenizerConfig(drop_stopwords=True))
        assert [t.text for t in tokens] == ["cat", "hat"]


class TestBuildDocument:
    def test_round_trip_offsets(self):
        episode = Episode(id="e1", transcript_text="One here. And two there! Short?")
        doc = build_document(episode)
        data = episode.transcript_text.encode("utf-8")
        for sentence in doc.sentences:
            start, end = sentence.span
            assert data[start:end].decode("utf-8") == sentence.raw_text

    def test_round_trip_offsets_multibyte(self):
        episode = Episode(id="e1", transcript_text="El café abre. ¿Vamos ya?")
        doc = build_document(episode)
        data = episode.transcript_text.encode("utf-8")
        for sentence in doc.sentences:
            start, end = sentence.span
            assert data[start:end].decode("utf-8") == sentence.raw_text

    def test_tokenless_sentences_dropped_and_reindexed(self):
        episode = Episode(id="e1", transcript_text="Real words here. !!! More words now.")
        doc = build_document(episode)
        assert [s.index for s in doc.sentences] == [0, 1]
        assert [s.raw_text for s in doc.sentences] == ["Real words here.", "More words now."]

    def test_total_tokens(self):
        episode = Episode(id="e1", transcript_text="One two three. Four five.")
        doc = build_document(episode)
        assert doc.total_tokens == 5
        assert doc.token_texts() == ["one", "two", "three", "four", "five"]

    def test_empty_transcript_raises(self):
        with pytest.raises(EmptyDocumentError):
            build_document(Episode(id="e1", transcript_text="... !!!"))

    def test_deterministic(self):
        episode = Episode(id="e1", transcript_text="Same text. Every time!")
        assert build_document(episode) == build_document(episode)
