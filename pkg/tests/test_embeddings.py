"""Tests for vector-file parsing, table union, lookup, and char init."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixsent import embeddings as emb
from mixsent.corpus import Dataset, Sentence
from mixsent.errors import ConfigError, DataError, DimensionError, ParseError


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def toy_table(tokens, dim=3, base=1.0):
    vocab = {tok: i for i, tok in enumerate(tokens)}
    matrix = base * np.arange(len(tokens) * dim, dtype=np.float64).reshape(len(tokens), dim)
    return emb.EmbeddingTable(vocab, matrix)


class TestLoadGlove:
    def test_two_line_file(self, tmp_path):
        path = write(tmp_path, "v.txt", "hola 1.0 2.0 3.0\nadios 4.0 5.0 6.0\n")
        table = emb.load_vectors(path, "glove_text")
        assert len(table) == 2
        assert table.dim == 3
        np.testing.assert_array_equal(table.matrix[table.vocab["adios"]], [4.0, 5.0, 6.0])
        assert not table.trainable

    def test_dimension_inconsistency_names_line(self, tmp_path):
        path = write(tmp_path, "v.txt", "a 1.0 2.0 3.0\nb 1.0 2.0\n")
        with pytest.raises(ParseError, match=r":2: expected 3 vector components, found 2"):
            emb.load_vectors(path, "glove_text")

    def test_non_numeric_component(self, tmp_path):
        path = write(tmp_path, "v.txt", "a 1.0 x 3.0\n")
        with pytest.raises(ParseError, match=":1: non-numeric"):
            emb.load_vectors(path, "glove_text")

    def test_empty_file_rejected(self, tmp_path):
        path = write(tmp_path, "v.txt", "")
        with pytest.raises(ParseError, match="empty vector file"):
            emb.load_vectors(path, "glove_text")

    def test_duplicate_token_first_kept(self, tmp_path):
        path = write(tmp_path, "v.txt", "a 1.0\na 2.0\n")
        with pytest.warns(UserWarning, match="duplicate token 'a'"):
            table = emb.load_vectors(path, "glove_text")
        assert table.matrix[table.vocab["a"]][0] == 1.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="nope.txt"):
            emb.load_vectors(str(tmp_path / "nope.txt"), "glove_text")

    def test_unknown_format(self, tmp_path):
        path = write(tmp_path, "v.txt", "a 1.0\n")
        with pytest.raises(ConfigError, match="unknown vector format"):
            emb.load_vectors(path, "word2vec_bin")


class TestLoadFasttext:
    def test_header_and_rows(self, tmp_path):
        path = write(tmp_path, "v.vec", "2 3\nme 1 2 3\nyo 4 5 6\n")
        table = emb.load_vectors(path, "fasttext_vec")
        assert len(table) == 2
        assert table.dim == 3

    def test_row_narrower_than_header(self, tmp_path):
        path = write(tmp_path, "v.vec", "1 300\na " + " ".join(["0.5"] * 299) + "\n")
        with pytest.raises(ParseError, match="expected 300 vector components, found 299"):
            emb.load_vectors(path, "fasttext_vec")

    def test_count_mismatch_rejected(self, tmp_path):
        path = write(tmp_path, "v.vec", "3 2\na 1 2\nb 3 4\n")
        with pytest.raises(ParseError, match="declares 3 rows, found 2"):
            emb.load_vectors(path, "fasttext_vec")

    def test_bad_header(self, tmp_path):
        path = write(tmp_path, "v.vec", "hello 1 2 3\n")
        with pytest.raises(ParseError, match=":1: expected 'count dim' header"):
            emb.load_vectors(path, "fasttext_vec")

    def test_empty_file_missing_header(self, tmp_path):
        path = write(tmp_path, "v.vec", "")
        with pytest.raises(ParseError, match="missing 'count dim' header"):
            emb.load_vectors(path, "fasttext_vec")

    def test_declared_empty_table_keeps_header_dim(self, tmp_path):
        path = write(tmp_path, "v.vec", "0 300\n")
        table = emb.load_vectors(path, "fasttext_vec")
        assert len(table) == 0
        assert table.dim == 300


class TestBuildShared:
    def test_disjoint_union(self):
        shared, collisions = emb.build_shared([toy_table(["a"]), toy_table(["b"])])
        assert len(shared) == 2
        assert collisions == 0

    def test_collision_first_wins(self):
        first = toy_table(["me", "you"], base=1.0)
        second = toy_table(["me", "tu"], base=100.0)
        shared, collisions = emb.build_shared([first, second])
        assert collisions == 1
        assert len(shared) == 3
        np.testing.assert_array_equal(
            shared.matrix[shared.vocab["me"]], first.matrix[first.vocab["me"]]
        )

    def test_empty_second_table_equals_first(self):
        first = toy_table(["a", "b"])
        empty = emb.EmbeddingTable({}, np.zeros((0, 3)))
        shared, collisions = emb.build_shared([first, empty])
        assert collisions == 0
        assert shared.vocab == first.vocab
        np.testing.assert_array_equal(shared.matrix, first.matrix)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError, match=r"\[2, 3\]"):
            emb.build_shared([toy_table(["a"], dim=3), toy_table(["b"], dim=2)])

    def test_no_tables(self):
        with pytest.raises(DataError, match="no embedding tables"):
            emb.build_shared([])

    @settings(max_examples=100)
    @given(
        st.lists(
            st.lists(
                st.text(alphabet="abcdef", min_size=1, max_size=3),
                unique=True,
                max_size=8,
            ),
            min_size=1,
            max_size=4,
        )
    )
    def test_union_size_accounting(self, vocabs):
        tables = [toy_table(tokens) for tokens in vocabs]
        shared, collisions = emb.build_shared(tables)
        union = set().union(*(set(v) for v in vocabs))
        assert len(shared) == len(union)
        assert len(shared) == sum(len(v) for v in vocabs) - collisions


class TestLookup:
    def test_in_vocab_row(self):
        table = toy_table(["a", "b"])
        vec, oov = emb.lookup_word(table, "b")
        assert not oov
        np.testing.assert_array_equal(vec, table.matrix[1])

    def test_oov_zero_vector(self):
        table = toy_table(["a"])
        vec, oov = emb.lookup_word(table, "zzz")
        assert oov
        np.testing.assert_array_equal(vec, np.zeros(3))

    def test_lookup_is_pure(self):
        table = toy_table(["a"])
        first, _ = emb.lookup_word(table, "a")
        second, _ = emb.lookup_word(table, "a")
        np.testing.assert_array_equal(first, second)

    def test_returned_vector_is_a_copy(self):
        table = toy_table(["a"])
        vec, _ = emb.lookup_word(table, "a")
        vec[0] = 999.0
        assert table.matrix[0, 0] != 999.0


def tiny_corpus(texts):
    sentences = [Sentence(str(i), text.split()) for i, text in enumerate(texts)]
    return Dataset(sentences, "train")


class TestInitCharTable:
    def test_rows_for_seen_chars_plus_unk(self):
        table = emb.init_char_table(tiny_corpus(["ab", "ba"]), d_c=4, seed=1)
        assert len(table) == 3
        assert emb.UNK_CHAR in table.chars
        assert table.matrix.shape == (3, 4)
        assert table.trainable

    def test_same_seed_identical(self):
        corpus = tiny_corpus(["ab c", "de"])
        first = emb.init_char_table(corpus, d_c=8, seed=42)
        second = emb.init_char_table(corpus, d_c=8, seed=42)
        np.testing.assert_array_equal(first.matrix, second.matrix)

    def test_different_seed_differs(self):
        corpus = tiny_corpus(["ab"])
        first = emb.init_char_table(corpus, d_c=8, seed=1)
        second = emb.init_char_table(corpus, d_c=8, seed=2)
        assert not np.array_equal(first.matrix, second.matrix)

    def test_entries_within_radius(self):
        table = emb.init_char_table(tiny_corpus(["abcdefgh"]), d_c=16, r=0.05, seed=3)
        assert np.all(np.abs(table.matrix) <= 0.05)

    def test_layout_independent_of_sentence_order(self):
        first = emb.init_char_table(tiny_corpus(["ab", "cd"]), d_c=4, seed=5)
        second = emb.init_char_table(tiny_corpus(["cd", "ab"]), d_c=4, seed=5)
        assert first.chars == second.chars
        np.testing.assert_array_equal(first.matrix, second.matrix)

    def test_unknown_char_falls_back_to_unk_row(self):
        table = emb.init_char_table(tiny_corpus(["ab"]), d_c=4, seed=1)
        assert emb.char_index(table, "z") == table.chars[emb.UNK_CHAR]
        assert emb.char_index(table, "a") == table.chars["a"]
