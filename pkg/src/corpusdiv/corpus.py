"""Corpus ingestion: tokenization, annotated formats, filters, frequency tables.

Corpora are stored column-wise (parallel lists of surface / lemma / UPOS
strings plus sentence end offsets) so that a 40M-token corpus fits in a few
hundred MB. Surface strings are interned, which makes every later counting
pass a pointer-compare in the common case. Loaded corpora are immutable
snapshots: no operation here or elsewhere mutates one in place.
"""

from __future__ import annotations

import io
import os
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from sys import intern
from typing import IO, Iterable, Iterator, Sequence
from unicodedata import category

from .errors import AnnotationLevelError, CorpusFormatError, EmptyCorpusError

# The 17 Universal POS tags.
UPOS_TAGS = frozenset({
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
})


@dataclass(frozen=True)
class NormalizationConfig:
    """Knobs applied by the built-in tokenizer."""

    lowercase: bool = True


@dataclass(frozen=True)
class AnnotatedToken:
    surface: str
    lemma: str | None = None
    upos: str | None = None


class AnnotatedCorpus:
    """An ordered token sequence grouped into sentences.

    ``surfaces`` always holds one entry per token. ``lemmas`` and ``upos``
    are either None (surface-only corpus) or lists parallel to ``surfaces``.
    ``sentence_bounds[i]`` is the end offset (exclusive) of sentence i.
    """

    __slots__ = ("surfaces", "lemmas", "upos", "sentence_bounds",
                 "language", "label", "lowercased", "_counts")

    def __init__(
        self,
        surfaces: list[str],
        sentence_bounds: list[int],
        *,
        lemmas: list[str] | None = None,
        upos: list[str | None] | None = None,
        language: str = "und",
        label: str = "",
        lowercased: bool | None = None,
    ):
        if lemmas is not None and len(lemmas) != len(surfaces):
            raise ValueError("lemma layer length does not match token count")
        if upos is not None and len(upos) != len(surfaces):
            raise ValueError("upos layer length does not match token count")
        if sentence_bounds and sentence_bounds[-1] != len(surfaces):
            raise ValueError("last sentence bound must equal token count")
        self.surfaces = surfaces
        self.lemmas = lemmas
        self.upos = upos
        self.sentence_bounds = sentence_bounds
        self.language = language
        self.label = label
        self.lowercased = lowercased
        self._counts: Counter[str] | None = None

    @classmethod
    def from_sentences(
        cls,
        sentences: Iterable[Sequence[AnnotatedToken]],
        *,
        language: str = "und",
        label: str = "",
        lowercased: bool | None = None,
    ) -> "AnnotatedCorpus":
        """Build a corpus from token objects; lemma/upos layers are created
        when every token carries a lemma."""
        surfaces: list[str] = []
        lemmas: list[str | None] = []
        upos: list[str | None] = []
        bounds: list[int] = []
        for sent in sentences:
            for tok in sent:
                surfaces.append(intern(tok.surface))
                lemmas.append(tok.lemma)
                upos.append(tok.upos)
            bounds.append(len(surfaces))
        lemmatized = bool(surfaces) and all(l is not None for l in lemmas)
        return cls(
            surfaces, bounds,
            lemmas=lemmas if lemmatized else None,  # type: ignore[arg-type]
            upos=upos if lemmatized else None,
            language=language, label=label, lowercased=lowercased,
        )

    @property
    def annotation_level(self) -> str:
        return "lemmatized" if self.lemmas is not None else "surface-only"

    @property
    def n_sentences(self) -> int:
        return len(self.sentence_bounds)

    def __len__(self) -> int:
        return len(self.surfaces)

    def __iter__(self) -> Iterator[AnnotatedToken]:
        lemmas = self.lemmas
        upos = self.upos
        for i, surface in enumerate(self.surfaces):
            yield AnnotatedToken(
                surface,
                lemmas[i] if lemmas is not None else None,
                upos[i] if upos is not None else None,
            )

    def sentence_spans(self) -> Iterator[tuple[int, int]]:
        start = 0
        for end in self.sentence_bounds:
            yield start, end
            start = end

    def surface_counts(self) -> Counter[str]:
        """Type -> occurrence count over surfaces, computed once and cached.
        Safe because corpora are immutable."""
        if self._counts is None:
            self._counts = Counter(self.surfaces)
        return self._counts

    def require_tokens(self, what: str = "metric computation") -> None:
        if not self.surfaces:
            raise EmptyCorpusError(f"empty corpus: {what} needs at least one token")

    def require_lemmas(self, what: str) -> None:
        if self.lemmas is None:
            raise AnnotationLevelError(
                f"{what} needs a lemmatized corpus; this one is surface-only"
            )


def _open_binary(source: IO[bytes] | bytes | str | Path) -> IO[bytes]:
    if isinstance(source, (str, Path)):
        return open(source, "rb")
    if isinstance(source, bytes):
        return io.BytesIO(source)
    return source


def _decoded_lines(stream: IO[bytes]) -> Iterator[tuple[int, str]]:
    """Yield (line_number, text) pairs, raising on invalid UTF-8 with the
    absolute byte offset of the offending byte."""
    offset = 0
    for lineno, raw in enumerate(stream, start=1):
        try:
            yield lineno, raw.decode("utf-8")
        except UnicodeDecodeError as err:
            raise CorpusFormatError(
                f"invalid UTF-8 at byte offset {offset + err.start} (line {lineno})"
            ) from err
        offset += len(raw)


def _is_punct(ch: str) -> bool:
    return category(ch).startswith("P")


def _split_chunk(chunk: str, lowercase: bool) -> tuple[str, ...]:
    """Detach leading/trailing punctuation characters (Unicode category P)
    from a whitespace-separated chunk, each as its own token."""
    start, end = 0, len(chunk)
    while start < end and _is_punct(chunk[start]):
        start += 1
    while end > start and _is_punct(chunk[end - 1]):
        end -= 1
    core = chunk[start:end]
    if start == 0 and end == len(chunk):
        return (intern(core.lower() if lowercase else core),)
    parts = list(chunk[:start])
    if core:
        parts.append(core.lower() if lowercase else core)
    parts.extend(chunk[end:])
    return tuple(intern(p) for p in parts)


def load_plain_text(
    source: IO[bytes] | bytes | str | Path,
    config: NormalizationConfig | None = None,
    *,
    language: str = "und",
    label: str = "",
) -> AnnotatedCorpus:
    """Read UTF-8 plain text, one sentence per line, through the built-in
    tokenizer (whitespace split + punctuation detachment)."""
    config = config or NormalizationConfig()
    lowercase = config.lowercase
    surfaces: list[str] = []
    bounds: list[int] = []
    # Chunk -> token tuple cache; vocabulary is tiny relative to token count,
    # so the hot path is one dict hit per chunk.
    cache: dict[str, tuple[str, ...]] = {}
    stream = _open_binary(source)
    try:
        for _, line in _decoded_lines(stream):
            chunks = line.split()
            if not chunks:
                continue
            for chunk in chunks:
                toks = cache.get(chunk)
                if toks is None:
                    toks = cache[chunk] = _split_chunk(chunk, lowercase)
                surfaces += toks
            bounds.append(len(surfaces))
    finally:
        if stream is not source:
            stream.close()
    if not surfaces:
        raise EmptyCorpusError("input contains no tokens")
    return AnnotatedCorpus(
        surfaces, bounds, language=language, label=label, lowercased=lowercase
    )


def _check_upos(tag: str, lineno: int) -> str:
    if tag not in UPOS_TAGS:
        raise CorpusFormatError(f"line {lineno}: unknown UPOS tag {tag!r}")
    return tag


def load_annotated(
    source: IO[bytes] | bytes | str | Path,
    format: str,
    *,
    lowercase: bool = False,
    language: str = "und",
    label: str = "",
) -> AnnotatedCorpus:
    """Read a lemma+UPOS annotated corpus.

    format="conllu": standard 10-column CoNLL-U. Comment lines are skipped,
    multiword-token ranges (id "3-4") and empty nodes (id "3.1") are skipped,
    blank lines end sentences. A "_" lemma falls back to the surface form.

    format="tsv3": one token per line, "surface<TAB>lemma<TAB>upos", blank
    line ends a sentence.

    With lowercase=True, surfaces and lemmas are case folded on load;
    the default keeps the file's casing so that the surface sequence equals
    the input FORM column.
    """
    if format not in ("conllu", "tsv3"):
        raise ValueError(f"unknown annotated format {format!r}")
    surfaces: list[str] = []
    lemmas: list[str] = []
    upos: list[str | None] = []
    bounds: list[int] = []
    stream = _open_binary(source)
    try:
        for lineno, line in _decoded_lines(stream):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                if len(surfaces) > (bounds[-1] if bounds else 0):
                    bounds.append(len(surfaces))
                continue
            if format == "conllu":
                if line.startswith("#"):
                    continue
                cols = line.split("\t")
                if len(cols) != 10:
                    raise CorpusFormatError(
                        f"line {lineno}: expected 10 tab-separated fields, got {len(cols)}"
                    )
                tok_id, form, lemma, tag = cols[0], cols[1], cols[2], cols[3]
                if "-" in tok_id or "." in tok_id:
                    continue  # multiword range / empty node
            else:
                cols = line.split("\t")
                if len(cols) != 3:
                    raise CorpusFormatError(
                        f"line {lineno}: expected 3 tab-separated fields, got {len(cols)}"
                    )
                form, lemma, tag = cols
            if not form:
                raise CorpusFormatError(f"line {lineno}: empty surface form")
            if not lemma:
                raise CorpusFormatError(f"line {lineno}: missing lemma")
            if not tag or tag == "_":
                raise CorpusFormatError(f"line {lineno}: missing UPOS tag")
            _check_upos(tag, lineno)
            if lemma == "_":
                lemma = form
            if lowercase:
                form = form.lower()
                lemma = lemma.lower()
            surfaces.append(intern(form))
            lemmas.append(intern(lemma))
            upos.append(tag)
    finally:
        if stream is not source:
            stream.close()
    if len(surfaces) > (bounds[-1] if bounds else 0):
        bounds.append(len(surfaces))
    if not surfaces:
        raise EmptyCorpusError("input contains no tokens")
    return AnnotatedCorpus(
        surfaces, bounds, lemmas=lemmas, upos=upos,
        language=language, label=label, lowercased=lowercase,
    )


def exclude_tokens(corpus: AnnotatedCorpus, blocklist: Iterable[str]) -> AnnotatedCorpus:
    """Return a copy with all tokens whose surface is in ``blocklist``
    removed. Sentence grouping is preserved (a fully excluded sentence stays
    as an empty sentence). Matching is exact on the stored surface."""
    block = frozenset(blocklist)
    if not block:
        return corpus
    surfaces: list[str] = []
    lemmas: list[str] | None = [] if corpus.lemmas is not None else None
    upos: list[str | None] | None = [] if corpus.upos is not None else None
    bounds: list[int] = []
    for start, end in corpus.sentence_spans():
        for i in range(start, end):
            s = corpus.surfaces[i]
            if s in block:
                continue
            surfaces.append(s)
            if lemmas is not None:
                lemmas.append(corpus.lemmas[i])  # type: ignore[index]
            if upos is not None:
                upos.append(corpus.upos[i])  # type: ignore[index]
        bounds.append(len(surfaces))
    return AnnotatedCorpus(
        surfaces, bounds, lemmas=lemmas, upos=upos,
        language=corpus.language, label=corpus.label,
        lowercased=corpus.lowercased,
    )


class FrequencyTable:
    """Type -> count with a deterministic ranking: descending count, ties
    broken by ascending lexicographic order of the type."""

    __slots__ = ("entries", "total_tokens", "ranking", "lowercase", "_ranks")

    def __init__(
        self,
        entries: dict[str, int],
        *,
        ranking: list[str] | None = None,
        lowercase: bool | None = None,
    ):
        self.entries = entries
        self.total_tokens = sum(entries.values())
        if ranking is None:
            ranking = sorted(entries, key=lambda t: (-entries[t], t))
        self.ranking = ranking
        self.lowercase = lowercase
        self._ranks: dict[str, int] | None = None

    def __len__(self) -> int:
        return len(self.entries)

    def rank_of(self, word: str) -> int | None:
        """1-based rank, or None for out-of-vocabulary types."""
        if self._ranks is None:
            self._ranks = {t: i for i, t in enumerate(self.ranking, start=1)}
        return self._ranks.get(word)

    def to_tsv(self, out: IO[str] | str | Path) -> None:
        close = False
        if isinstance(out, (str, Path)):
            out = open(out, "w", encoding="utf-8", newline="\n")
            close = True
        try:
            out.write(f"#total_tokens={self.total_tokens}\n")
            if self.lowercase is not None:
                out.write(f"#lowercase={'true' if self.lowercase else 'false'}\n")
            for t in self.ranking:
                out.write(f"{t}\t{self.entries[t]}\n")
        finally:
            if close:
                out.close()

    @classmethod
    def from_tsv(cls, source: IO[bytes] | bytes | str | Path) -> "FrequencyTable":
        entries: dict[str, int] = {}
        ranking: list[str] = []
        total: int | None = None
        lowercase: bool | None = None
        stream = _open_binary(source)
        try:
            for lineno, line in _decoded_lines(stream):
                line = line.rstrip("\n").rstrip("\r")
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, value = line[1:].partition("=")
                    if key == "total_tokens":
                        total = int(value)
                    elif key == "lowercase":
                        lowercase = value == "true"
                    continue
                cols = line.split("\t")
                if len(cols) != 2:
                    raise CorpusFormatError(
                        f"line {lineno}: expected 'type<TAB>count', got {len(cols)} fields"
                    )
                word, count_s = cols
                try:
                    count = int(count_s)
                except ValueError:
                    raise CorpusFormatError(f"line {lineno}: count {count_s!r} is not an integer")
                if count <= 0:
                    raise CorpusFormatError(f"line {lineno}: count must be positive")
                if word in entries:
                    raise CorpusFormatError(f"line {lineno}: duplicate type {word!r}")
                entries[word] = count
                ranking.append(word)
        finally:
            if stream is not source:
                stream.close()
        if total is None:
            raise CorpusFormatError("missing '#total_tokens=' header")
        table = cls(entries, ranking=ranking, lowercase=lowercase)
        if table.total_tokens != total:
            raise CorpusFormatError(
                f"header says {total} tokens but counts sum to {table.total_tokens}"
            )
        return table


def build_frequency_table(corpus: AnnotatedCorpus) -> FrequencyTable:
    """Count token surfaces into a deterministically ranked table."""
    corpus.require_tokens("frequency table")
    return FrequencyTable(dict(corpus.surface_counts()), lowercase=corpus.lowercased)
