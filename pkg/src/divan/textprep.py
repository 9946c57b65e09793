"""Verse normalization, tokenization, stop-word filtering, and stemming.

The reduction step is a rule-based Persian suffix stripper.  It is
deliberately simple: suffixes are removed outermost-first (attached
clitics, then the indefinite/relative ``ی``, then plural/comparative
endings), at most two strips per token, and a token is never emptied.
Crude stems for complicated words are an accepted failure mode; the
alternative "lemmatize" mode consults an explicit surface→lemma table.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import TYPE_CHECKING, Mapping

from .errors import DataError

if TYPE_CHECKING:
    from .corpus import Poem, StopwordSet

__all__ = [
    "ZWNJ",
    "PrepConfig",
    "TokenizedPoem",
    "load_lemma_dictionary",
    "normalize",
    "preprocess_poem",
    "reduce_token",
    "remove_stopwords",
    "stem",
    "tokenize",
]

ZWNJ = "‌"  # zero-width non-joiner; kept inside compounds

_ARABIC_FOLDS = str.maketrans({"ي": "ی", "ك": "ک"})  # ي→ی, ك→ک
_DIACRITICS = re.compile("[ً-ْ]")
_WHITESPACE = re.compile(r"\s+")


@lru_cache(maxsize=None)
def _blank_if_punct(char: str) -> str:
    return " " if unicodedata.category(char).startswith("P") else char


def normalize(text: str) -> str:
    """Fold Arabic yeh/kaf, drop diacritics, blank punctuation, squeeze spaces."""
    text = text.translate(_ARABIC_FOLDS)
    text = _DIACRITICS.sub("", text)
    text = "".join(_blank_if_punct(ch) for ch in text)
    return _WHITESPACE.sub(" ", text).strip()


def tokenize(verse: str) -> list[str]:
    """Split a normalized verse on spaces; ZWNJ-joined compounds stay whole."""
    return verse.split()


def remove_stopwords(tokens: list[str], stopwords: "StopwordSet") -> list[str]:
    """Order-preserving exact-match stop-word filter."""
    return [t for t in tokens if t not in stopwords]


# Suffix layers, outermost first.  Within a layer, longest match wins.
# Layer 1: attached clitics -- possessive pronouns and ZWNJ-joined enclitics.
# Layer 2: indefinite/relative yeh.
# Layer 3: plural and comparative/superlative endings.
_SUFFIX_LAYERS = (
    (ZWNJ + "ای", ZWNJ + "ام", ZWNJ + "اش", "مان", "تان", "شان", ZWNJ + "ی", "م", "ت", "ش"),
    ("ی",),
    ("هایی", "ترین", "های", "ها", "تر"),
)
_MAX_STRIPS = 2
_VERB_PREFIX = "می" + ZWNJ


def _strip_one(token: str, suffixes: tuple[str, ...]) -> str | None:
    for suffix in suffixes:
        if token.endswith(suffix):
            rest = token[: -len(suffix)].rstrip(ZWNJ)
            if rest:
                return rest
    return None


def stem(token: str) -> str:
    """Suffix-strip a token; never lengthens it and never returns empty."""
    token = token.strip(ZWNJ)
    if token.startswith(_VERB_PREFIX) and len(token) - len(_VERB_PREFIX) >= 2:
        token = token[len(_VERB_PREFIX):]
    strips = 0
    for layer in _SUFFIX_LAYERS:
        if strips >= _MAX_STRIPS:
            break
        stripped = _strip_one(token, layer)
        if stripped is not None:
            token = stripped
            strips += 1
    return token


@dataclass(frozen=True)
class PrepConfig:
    """How verses are reduced to analysis tokens."""

    stopwords: "StopwordSet"
    reduction_mode: str = "stem"  # stem | lemmatize | none
    lemma_dictionary: Mapping[str, str] | None = None

    def __post_init__(self):
        if self.reduction_mode not in ("stem", "lemmatize", "none"):
            raise ValueError(f"unknown reduction mode: {self.reduction_mode!r}")
        if self.reduction_mode == "lemmatize" and self.lemma_dictionary is None:
            raise ValueError("lemmatize mode requires a lemma dictionary")


def reduce_token(token: str, config: PrepConfig) -> str:
    """Reduce one normalized token according to the configured mode."""
    if not token:
        raise ValueError("cannot reduce an empty token")
    if config.reduction_mode == "none":
        return token
    if config.reduction_mode == "lemmatize":
        if config.lemma_dictionary is None:
            raise ValueError("lemmatize mode requires a lemma dictionary")
        return config.lemma_dictionary.get(token, token)
    return stem(token)


@dataclass(frozen=True)
class TokenizedPoem:
    """Per-verse token lists after the full preprocessing pipeline."""

    poem_index: int
    verses: tuple[tuple[str, ...], ...]

    @property
    def flat_tokens(self) -> tuple[str, ...]:
        return tuple(t for verse in self.verses for t in verse)


def preprocess_poem(poem: "Poem", config: PrepConfig) -> TokenizedPoem:
    """normalize → tokenize → stop-word filter → reduce → re-filter, per verse.

    Stop words are filtered both before and after reduction because
    stripping can surface a stop word (e.g. a bare copula).  Verses that
    end up empty keep their slot so verse boundaries survive.
    """
    stopwords = config.stopwords
    verses = []
    for raw in poem.verses:
        tokens = remove_stopwords(tokenize(normalize(raw)), stopwords)
        tokens = [reduce_token(t, config) for t in tokens]
        verses.append(tuple(t for t in tokens if t not in stopwords))
    return TokenizedPoem(poem_index=poem.index, verses=tuple(verses))


def load_lemma_dictionary(path: str | Path) -> dict[str, str]:
    """Read a UTF-8 TSV of ``surface<TAB>lemma`` rows; both sides normalized."""
    file_path = Path(path)
    if not file_path.is_file():
        raise DataError(f"lemma dictionary not found: {file_path}")
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(file_path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"{file_path}:{lineno}: expected 'surface<TAB>lemma'")
        surface, lemma = normalize(parts[0]), normalize(parts[1])
        if not surface or not lemma:
            raise DataError(f"{file_path}:{lineno}: empty surface or lemma")
        mapping[surface] = lemma
    return mapping
