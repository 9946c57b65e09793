import numpy as np
import pytest

from divan.corpus import Poem, StopwordSet
from divan.errors import DataError
from divan.textprep import (
    ZWNJ,
    PrepConfig,
    load_lemma_dictionary,
    normalize,
    preprocess_poem,
    reduce_token,
    remove_stopwords,
    stem,
    tokenize,
)

# character pool for randomized normalize/stem checks
_POOL = list("اآبپتثجچحخدذرزسشصضطظعغفقکگلمنوهی") + ["ي", "ك", "ً", "َ", "ّ"]
_POOL += list("،؛؟«»!?.,:;()[]") + [" ", ZWNJ] + list("abc123")


class TestNormalize:
    def test_folds_arabic_kaf(self):
        assert normalize("كتاب") == "کتاب"

    def test_folds_arabic_yeh(self):
        assert normalize("علي") == "علی"

    def test_punctuation_and_whitespace(self):
        assert normalize("سلام،  دنیا") == "سلام دنیا"

    def test_empty(self):
        assert normalize("") == ""

    def test_keeps_zwnj(self):
        assert normalize("سایه‌ای") == "سایه" + ZWNJ + "ای"

    def test_strips_diacritics(self):
        assert normalize("سَرد") == "سرد"

    def test_persian_quotes_become_spaces(self):
        assert normalize("«آغاز بهار»") == "آغاز بهار"

    def test_idempotent_on_random_strings(self):
        rng = np.random.default_rng(202)
        for _ in range(300):
            n = int(rng.integers(0, 40))
            text = "".join(_POOL[int(i)] for i in rng.integers(0, len(_POOL), size=n))
            once = normalize(text)
            assert normalize(once) == once


class TestTokenize:
    def test_zwnj_compound_stays_whole(self):
        assert tokenize("سایه‌ای از پرسشی") == ["سایه‌ای", "از", "پرسشی"]

    def test_empty(self):
        assert tokenize("") == []

    def test_duplicates_preserved(self):
        assert tokenize("الف ب الف") == ["الف", "ب", "الف"]


class TestRemoveStopwords:
    def test_removes_default_member(self, stopwords):
        assert remove_stopwords(["بر", "لبانم"], stopwords) == ["لبانم"]

    def test_empty_list(self, stopwords):
        assert remove_stopwords([], stopwords) == []

    def test_identity_when_clean(self, stopwords):
        tokens = ["ستاره", "دریا"]
        assert remove_stopwords(tokens, stopwords) == tokens


class TestStem:
    @pytest.mark.parametrize(
        "token,expected",
        [
            ("سایه‌ای", "سایه"),
            ("پرسشی", "پرسش"),
            ("لبانم", "لبان"),
            ("کتاب", "کتاب"),
            ("کتاب‌ها", "کتاب"),
            ("دیوارها", "دیوار"),
            ("دست‌های", "دست"),
            ("سنگین‌تر", "سنگین"),
            ("مهمترین", "مهم"),
            ("می‌خوانمش", "خوانم"),
            ("خانه‌ای", "خانه"),
        ],
    )
    def test_known_reductions(self, token, expected):
        assert stem(token) == expected

    def test_never_lengthens_or_empties(self):
        rng = np.random.default_rng(99)
        letters = "اآبپتثجچحخدذرزسشصضطظعغفقکگلمنوهی"
        suffixes = ["", "ها", "های", "هایی", "تر", "ترین", "م", "ت", "ش", "مان", "تان", "شان",
                    "ی", ZWNJ + "ای", ZWNJ + "ی", ZWNJ + "ام", ZWNJ + "اش"]
        for _ in range(500):
            n = int(rng.integers(1, 8))
            base = "".join(letters[int(i)] for i in rng.integers(0, len(letters), size=n))
            token = base + suffixes[int(rng.integers(0, len(suffixes)))]
            out = stem(token)
            assert out
            assert len(out) <= len(token)

    def test_single_letter_suffix_token_survives(self):
        assert stem("ش") == "ش"
        assert stem("ی") == "ی"


class TestReduceToken:
    def test_stem_mode(self, prep_config):
        assert reduce_token("سایه‌ای", prep_config) == "سایه"

    def test_no_matching_suffix(self, prep_config):
        assert reduce_token("کتاب", prep_config) == "کتاب"

    def test_lemmatize_mode(self, stopwords):
        config = PrepConfig(stopwords=stopwords, reduction_mode="lemmatize",
                            lemma_dictionary={"دونده": "دو"})
        assert reduce_token("دونده", config) == "دو"
        assert reduce_token("ناشناخته", config) == "ناشناخته"

    def test_none_mode(self, stopwords):
        config = PrepConfig(stopwords=stopwords, reduction_mode="none")
        assert reduce_token("سایه‌ای", config) == "سایه‌ای"

    def test_lemmatize_requires_dictionary(self, stopwords):
        with pytest.raises(ValueError, match="lemma dictionary"):
            PrepConfig(stopwords=stopwords, reduction_mode="lemmatize")

    def test_unknown_mode_rejected(self, stopwords):
        with pytest.raises(ValueError, match="reduction mode"):
            PrepConfig(stopwords=stopwords, reduction_mode="porter")

    def test_empty_token_rejected(self, prep_config):
        with pytest.raises(ValueError):
            reduce_token("", prep_config)


class TestPreprocessPoem:
    def test_worked_example_tail(self, prep_config):
        poem = Poem(index=0, title="نمونه", verses=("بر لبانم سایه‌ای از پرسشی مرموز",))
        out = preprocess_poem(poem, prep_config)
        assert out.flat_tokens[-3:] == ("سایه", "پرسش", "مرموز")

    def test_all_stopword_poem_keeps_verse_slots(self, prep_config):
        poem = Poem(index=1, title="هیچ", verses=("از به با تا", "که را تا هم"))
        out = preprocess_poem(poem, prep_config)
        assert out.verses == ((), ())
        assert out.flat_tokens == ()

    def test_none_mode_is_normalized_split(self):
        config = PrepConfig(stopwords=StopwordSet(frozenset()), reduction_mode="none")
        poem = Poem(index=0, title="x", verses=("ستاره،  دریا و ماه",))
        out = preprocess_poem(poem, config)
        assert out.verses == (("ستاره", "دریا", "و", "ماه"),)

    def test_verse_boundaries_conserved(self, corpus, prep_config):
        for book in corpus.books:
            for poem in book.poems:
                out = preprocess_poem(poem, prep_config)
                assert len(out.verses) == len(poem.verses)
                assert sum(len(v) for v in out.verses) == len(out.flat_tokens)

    def test_output_never_contains_stopwords(self, all_tokenized, stopwords):
        for poem in all_tokenized:
            for token in poem.flat_tokens:
                assert token not in stopwords
                assert token != ""

    def test_stem_surface_filtered_after_reduction(self, prep_config):
        # "همه‌ی" strips to the stop word "همه" and must not survive.
        poem = Poem(index=0, title="x", verses=("همه‌ی ستاره",))
        out = preprocess_poem(poem, prep_config)
        assert out.flat_tokens == ("ستاره",)


class TestLemmaDictionary:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "lemmas.tsv"
        path.write_text("دونده\tدو\n# comment\nمی‌خوانم\tخواندن\n", encoding="utf-8")
        mapping = load_lemma_dictionary(path)
        assert mapping["دونده"] == "دو"
        assert len(mapping) == 2

    def test_bad_arity(self, tmp_path):
        path = tmp_path / "lemmas.tsv"
        path.write_text("دونده دو\n", encoding="utf-8")
        with pytest.raises(DataError, match="surface<TAB>lemma"):
            load_lemma_dictionary(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_lemma_dictionary(tmp_path / "nope.tsv")
