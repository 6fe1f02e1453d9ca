"""Tests for dataset parsing, label encoding, and round-trips."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixsent import corpus
from mixsent.corpus import Dataset, Sentence
from mixsent.errors import DataError, ParseError


class TestLabels:
    def test_fixed_encoding(self):
        assert corpus.encode_label("negative") == 0
        assert corpus.encode_label("neutral") == 1
        assert corpus.encode_label("positive") == 2

    def test_decode_inverts_encode(self):
        for label in corpus.LABELS:
            assert corpus.decode_label(corpus.encode_label(label)) == label

    def test_unknown_label_rejected(self):
        with pytest.raises(DataError, match="unknown label"):
            corpus.encode_label("Positive")

    def test_out_of_range_index_rejected(self):
        with pytest.raises(DataError):
            corpus.decode_label(3)
        with pytest.raises(DataError):
            corpus.decode_label(-1)


class TestSentence:
    def test_fields_coerced_to_tuples(self):
        s = Sentence("1", ["a", "b"], ["lang1", "lang2"], "positive")
        assert s.tokens == ("a", "b")
        assert s.lang_tags == ("lang1", "lang2")

    def test_tag_length_mismatch_rejected(self):
        with pytest.raises(DataError, match="2 tokens but 1 language tags"):
            Sentence("1", ["a", "b"], ["lang1"], None)

    def test_empty_token_rejected(self):
        with pytest.raises(DataError, match="empty token"):
            Sentence("1", ["a", ""], None, None)

    def test_bad_label_rejected(self):
        with pytest.raises(DataError, match="unknown label"):
            Sentence("1", ["a"], None, "happy")

    def test_absent_label_and_tags_allowed(self):
        s = Sentence("1", ["a"])
        assert s.label is None and s.lang_tags is None


class TestDataset:
    def test_duplicate_id_rejected(self):
        with pytest.raises(DataError, match="duplicate sentence id '7'"):
            Dataset([Sentence("7", ["a"]), Sentence("7", ["b"])], "train")

    def test_unknown_split_rejected(self):
        with pytest.raises(DataError, match="unknown split"):
            Dataset([], "validation")

    def test_len_and_iter(self):
        d = Dataset([Sentence("1", ["a"]), Sentence("2", ["b"])], "dev")
        assert len(d) == 2
        assert [s.id for s in d] == ["1", "2"]


class TestParseConll:
    def write(self, tmp_path, text):
        path = tmp_path / "data.conll"
        path.write_text(text, encoding="utf-8")
        return str(path)

    def test_labeled_block(self, tmp_path):
        path = self.write(tmp_path, "meta 7 positive\nhave\tlang1\nfun\tlang1\n\n")
        d = corpus.parse_conll(path)
        assert len(d) == 1
        s = d.sentences[0]
        assert s.id == "7"
        assert s.tokens == ("have", "fun")
        assert s.lang_tags == ("lang1", "lang1")
        assert s.label == "positive"

    def test_empty_file(self, tmp_path):
        d = corpus.parse_conll(self.write(tmp_path, ""))
        assert len(d) == 0

    def test_unlabeled_block(self, tmp_path):
        d = corpus.parse_conll(self.write(tmp_path, "meta 9\nok\tother\n\n"))
        assert d.sentences[0].label is None

    def test_block_order_preserved(self, tmp_path):
        text = "meta 1 negative\na\tlang1\n\nmeta 2 neutral\nb\tlang2\n\n"
        d = corpus.parse_conll(self.write(tmp_path, text))
        assert [s.id for s in d] == ["1", "2"]

    def test_missing_final_blank_line(self, tmp_path):
        d = corpus.parse_conll(self.write(tmp_path, "meta 1 neutral\na\tlang1"))
        assert d.sentences[0].tokens == ("a",)

    def test_token_line_before_meta(self, tmp_path):
        with pytest.raises(ParseError, match=r":1: token line before any 'meta'"):
            corpus.parse_conll(self.write(tmp_path, "have\tlang1\n"))

    def test_unknown_label(self, tmp_path):
        with pytest.raises(ParseError, match=r":1: unknown label 'pos'"):
            corpus.parse_conll(self.write(tmp_path, "meta 7 pos\n"))

    def test_meta_inside_open_block(self, tmp_path):
        text = "meta 1 neutral\na\tlang1\nmeta 2 neutral\n"
        with pytest.raises(ParseError, match=r":3: new 'meta'"):
            corpus.parse_conll(self.write(tmp_path, text))

    def test_malformed_token_line(self, tmp_path):
        with pytest.raises(ParseError, match=r":2: expected 'token<TAB>langtag'"):
            corpus.parse_conll(self.write(tmp_path, "meta 1 neutral\nno tag here\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="missing.conll"):
            corpus.parse_conll(str(tmp_path / "missing.conll"))

    def test_token_named_meta_is_not_a_header(self, tmp_path):
        d = corpus.parse_conll(self.write(tmp_path, "meta 1 neutral\nmeta\tlang1\n\n"))
        assert d.sentences[0].tokens == ("meta",)


class TestParseTsv:
    def write(self, tmp_path, text):
        path = tmp_path / "data.tsv"
        path.write_text(text, encoding="utf-8")
        return str(path)

    def test_single_row(self, tmp_path):
        d = corpus.parse_tsv(self.write(tmp_path, "5\tte quiero mucho\tpositive\n"))
        s = d.sentences[0]
        assert s.id == "5"
        assert s.tokens == ("te", "quiero", "mucho")
        assert s.label == "positive"
        assert s.lang_tags is None

    def test_unlabeled_row(self, tmp_path):
        d = corpus.parse_tsv(self.write(tmp_path, "5\thello there\n"))
        assert d.sentences[0].label is None

    def test_missing_column(self, tmp_path):
        with pytest.raises(ParseError, match=":1:"):
            corpus.parse_tsv(self.write(tmp_path, "just text no tabs\n"))

    def test_too_many_columns(self, tmp_path):
        with pytest.raises(ParseError, match=":1:"):
            corpus.parse_tsv(self.write(tmp_path, "1\ta\tpositive\textra\n"))

    def test_unknown_label(self, tmp_path):
        with pytest.raises(ParseError, match="unknown label"):
            corpus.parse_tsv(self.write(tmp_path, "1\ta\tgood\n"))

    def test_empty_file(self, tmp_path):
        assert len(corpus.parse_tsv(self.write(tmp_path, ""))) == 0


class TestStats:
    def test_empty_dataset(self):
        result = corpus.stats(Dataset([], "train"))
        assert result["total"] == 0
        assert result["labels"] == {"negative": 0, "neutral": 0, "positive": 0}

    def test_counts(self):
        d = Dataset(
            [
                Sentence("1", ["a"], None, "positive"),
                Sentence("2", ["b"], None, "positive"),
                Sentence("3", ["c"], None, "negative"),
                Sentence("4", ["d"], None, None),
            ],
            "dev",
        )
        result = corpus.stats(d)
        assert result["split"] == "dev"
        assert result["total"] == 4
        assert result["unlabeled"] == 1
        assert result["labels"] == {"negative": 1, "neutral": 0, "positive": 2}


IDS = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789_", min_size=1, max_size=8)
TOKENS = st.text(min_size=1, max_size=10).filter(
    lambda t: not any(c.isspace() for c in t)
)
TAGS = st.sampled_from(("lang1", "lang2", "other"))
MAYBE_LABEL = st.none() | st.sampled_from(corpus.LABELS)


@st.composite
def tagged_sentences(draw):
    sid = draw(IDS)
    tokens = draw(st.lists(TOKENS, min_size=1, max_size=6))
    tags = draw(st.lists(TAGS, min_size=len(tokens), max_size=len(tokens)))
    return Sentence(sid, tokens, tags, draw(MAYBE_LABEL))


@st.composite
def untagged_sentences(draw):
    sid = draw(IDS)
    tokens = draw(st.lists(TOKENS, min_size=1, max_size=6))
    return Sentence(sid, tokens, None, draw(MAYBE_LABEL))


def unique_datasets(sentence_strategy):
    return st.lists(
        sentence_strategy, min_size=0, max_size=5, unique_by=lambda s: s.id
    ).map(lambda sentences: Dataset(sentences, "train"))


class TestRoundTrip:
    @settings(max_examples=100)
    @given(dataset=unique_datasets(tagged_sentences()))
    def test_conll_write_then_parse_identity(self, dataset, tmp_path_factory):
        path = str(tmp_path_factory.mktemp("rt") / "d.conll")
        corpus.write_conll(dataset, path)
        assert corpus.parse_conll(path) == dataset

    @settings(max_examples=100)
    @given(dataset=unique_datasets(untagged_sentences()))
    def test_tsv_write_then_parse_identity(self, dataset, tmp_path_factory):
        path = str(tmp_path_factory.mktemp("rt") / "d.tsv")
        corpus.write_tsv(dataset, path)
        assert corpus.parse_tsv(path) == dataset
