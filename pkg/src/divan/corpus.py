"""Poetry corpus data model and loaders.

A corpus is a directory with one subdirectory per book and one UTF-8
``.txt`` file per poem.  The first line of a poem file is its title; every
remaining non-blank line is one verse.  Books are ordered by directory
name and poems by file name, so indices are reproducible across machines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import DataError
from .textprep import normalize

__all__ = [
    "Book",
    "Corpus",
    "Poem",
    "StopwordSet",
    "load_corpus",
    "load_stopwords",
]


@dataclass(frozen=True)
class Poem:
    """A single poem: a title plus an ordered list of verses (raw lines)."""

    index: int
    title: str
    verses: tuple[str, ...]

    def __post_init__(self):
        if not self.verses:
            raise DataError(f"poem {self.index!r} ({self.title!r}) has no verses")
        for verse in self.verses:
            if not verse.strip():
                raise DataError(f"poem {self.index!r} ({self.title!r}) has a blank verse")


@dataclass(frozen=True)
class Book:
    """An ordered collection of poems with contiguous 0-based indices."""

    title: str
    poems: tuple[Poem, ...]

    def __post_init__(self):
        if not self.poems:
            raise DataError(f"book {self.title!r} has no poems")
        indices = [p.index for p in self.poems]
        if indices != list(range(len(self.poems))):
            raise DataError(f"book {self.title!r} has non-contiguous poem indices: {indices}")


@dataclass(frozen=True)
class Corpus:
    """All books of one corpus; immutable after construction."""

    corpus_id: str
    books: tuple[Book, ...]

    def __post_init__(self):
        if not self.books:
            raise DataError(f"corpus {self.corpus_id!r} has no books")
        titles = [b.title for b in self.books]
        if len(set(titles)) != len(titles):
            raise DataError(f"corpus {self.corpus_id!r} has duplicate book titles")

    @property
    def poems(self) -> tuple[Poem, ...]:
        return tuple(p for b in self.books for p in b.poems)


@dataclass(frozen=True)
class StopwordSet:
    """Normalized stop-word tokens; supports ``in`` and deterministic iteration."""

    tokens: frozenset[str] = field(default_factory=frozenset)

    def __contains__(self, token: str) -> bool:
        return token in self.tokens

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        # Sorted so that anything derived from iteration order is reproducible
        # across processes regardless of hash randomization.
        return iter(sorted(self.tokens))


def load_corpus(root_path: str | Path) -> Corpus:
    """Read a corpus directory into a :class:`Corpus`.

    Books come from subdirectories (lexicographic order), poems from the
    ``.txt`` files inside each (lexicographic order, indices assigned 0..n-1).
    """
    root = Path(root_path)
    if not root.is_dir():
        raise DataError(f"corpus directory not found: {root}")

    books = []
    for book_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        poem_files = sorted(book_dir.glob("*.txt"))
        if not poem_files:
            raise DataError(f"empty book directory: {book_dir}")
        poems = []
        for index, poem_file in enumerate(poem_files):
            try:
                text = poem_file.read_text(encoding="utf-8")
            except UnicodeDecodeError as exc:
                raise DataError(f"poem file is not valid UTF-8: {poem_file}") from exc
            lines = text.splitlines()
            title = lines[0].strip() if lines else ""
            verses = tuple(line.strip() for line in lines[1:] if line.strip())
            if not verses:
                raise DataError(f"poem file has no verse lines: {poem_file}")
            poems.append(Poem(index=index, title=title, verses=verses))
        books.append(Book(title=book_dir.name, poems=tuple(poems)))

    if not books:
        raise DataError(f"corpus directory has no book subdirectories: {root}")
    return Corpus(corpus_id=root.name, books=tuple(books))


def _parse_stopword_lines(lines: list[str]) -> frozenset[str]:
    tokens = set()
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        token = normalize(line)
        if token:
            tokens.add(token)
    return frozenset(tokens)


def load_stopwords(path: str | Path | None = None) -> StopwordSet:
    """Load a stop-word list; without ``path`` return the built-in default.

    File format: UTF-8, one token per line, ``#`` lines are comments.
    Tokens are normalized and deduplicated.
    """
    if path is None:
        text = (resources.files("divan") / "data" / "stopwords.txt").read_text(encoding="utf-8")
        tokens = _parse_stopword_lines(text.splitlines())
        if not tokens:
            raise DataError("built-in stop-word list is empty")
        return StopwordSet(tokens)

    file_path = Path(path)
    if not file_path.is_file():
        raise DataError(f"stop-word file not found: {file_path}")
    try:
        text = file_path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"stop-word file is not valid UTF-8: {file_path}") from exc
    tokens = _parse_stopword_lines(text.splitlines())
    if not tokens:
        raise DataError(f"empty stop-word file: {file_path}")
    return StopwordSet(tokens)
