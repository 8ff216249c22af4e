"""Sentence extraction from clinical-style notes.

Raw note text plus a disease-term lexicon go in; deduplicated, length-capped
sentence records tagged with specialty and note metadata come out. All
operations are pure and deterministic, so extraction can run in parallel per
document as long as the final record order is re-imposed.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field

# Punctuation that may terminate a sentence. A newline acts the same way.
_TERMINALS = ".?!;"

# Whitespace-delimited chunks (lowercased, trailing period included) that never
# end a sentence.
ABBREVIATIONS = frozenset({"dr.", "pt.", "vs.", "e.g.", "i.e.", "mg.", "ml.", "hr."})

# Word = maximal run of letters/digits; everything else is a separator.
_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

MAX_TERM_WORDS = 6
DEFAULT_MAX_TOKENS = 512


class CorpusError(ValueError):
    """Malformed corpus or lexicon input."""


@dataclass(frozen=True)
class NoteDocument:
    """One raw note: opaque id, note-type tag, and full text."""

    doc_id: str
    note_type: str
    text: str


class Lexicon:
    """A specialty's disease phrases, normalized to lowercase word tuples.

    Each term has 1-6 words; terms are unique and non-empty.
    """

    def __init__(self, specialty: str, phrases):
        if not specialty:
            raise CorpusError("lexicon requires a non-empty specialty name")
        if any(c.isspace() for c in specialty):
            # cohort names are space-joined specialty tokens
            raise CorpusError(f"specialty name must be a single token, got {specialty!r}")
        terms: dict[tuple[str, ...], None] = {}
        for phrase in phrases:
            words = tuple(tokenize(phrase))
            if not words:
                raise CorpusError(f"empty lexicon term in {specialty!r}: {phrase!r}")
            if len(words) > MAX_TERM_WORDS:
                raise CorpusError(
                    f"lexicon term {phrase!r} has {len(words)} words (max {MAX_TERM_WORDS})"
                )
            terms[words] = None
        self.specialty = specialty
        self.terms = frozenset(terms)
        by_length: dict[int, set[tuple[str, ...]]] = {}
        for term in self.terms:
            by_length.setdefault(len(term), set()).add(term)
        self._by_length = by_length

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term) -> bool:
        return tuple(term) in self.terms

    def terms_of_length(self, length: int) -> frozenset:
        return frozenset(self._by_length.get(length, ()))

    @classmethod
    def load(cls, path, specialty: str) -> "Lexicon":
        """Read a lexicon file: one phrase per line, '#' starts a comment."""
        phrases = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if line:
                    phrases.append(line)
        return cls(specialty, phrases)


@dataclass(frozen=True)
class SentenceRecord:
    """One extracted sentence with its matched disease term and note metadata."""

    sentence_id: str
    text: str
    tokens: tuple[str, ...]
    matched_term: str
    specialty: str
    note_type: str
    doc_id: str
    label: str | None = None

    def with_label(self, label: str) -> "SentenceRecord":
        return SentenceRecord(
            self.sentence_id,
            self.text,
            self.tokens,
            self.matched_term,
            self.specialty,
            self.note_type,
            self.doc_id,
            label,
        )


def sentence_id(text: str) -> str:
    """Stable 128-bit content hash of the raw sentence text, lowercase hex."""
    return hashlib.md5(text.encode("utf-8")).hexdigest()


def _ends_with_abbreviation(text: str, period_index: int) -> bool:
    # Chunk = characters from the previous whitespace up to and including the
    # period; "e.g." style multi-dot abbreviations are covered because the scan
    # stops at whitespace, not at dots.
    start = period_index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start : period_index + 1].lower() in ABBREVIATIONS


def sentencize(text: str) -> list[str]:
    """Split text into sentences on terminal punctuation or newlines.

    A candidate break is accepted only when followed by whitespace and then an
    uppercase letter or digit, or by end of input. Periods closing a known
    abbreviation never split. Every non-whitespace character of the input lands
    in exactly one returned sentence.
    """
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in _TERMINALS or ch == "\n":
            if ch == "." and _ends_with_abbreviation(text, i):
                i += 1
                continue
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            # At least one whitespace character must precede the next
            # sentence's capital/digit; a newline terminal is itself
            # whitespace, and end of input needs none.
            if j >= n or (
                (j > i + 1 or ch == "\n") and (text[j].isupper() or text[j].isdigit())
            ):
                piece = text[start : i + 1].strip()
                if piece:
                    sentences.append(piece)
                start = i + 1
                i = j
                continue
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def tokenize(sentence: str) -> list[str]:
    """Lowercased words with punctuation stripped, original order preserved."""
    return _WORD_RE.findall(sentence.lower())


def match_lexicon(tokens, lexicon: Lexicon) -> list[tuple[str, int]]:
    """Find lexicon terms as contiguous token runs.

    Conflicts resolve longest-match-first, then leftmost; a token belongs to at
    most one match. Returns (term, start_index) pairs sorted by start index.
    """
    tokens = list(tokens)
    taken = [False] * len(tokens)
    matches: list[tuple[str, int]] = []
    for length in range(MAX_TERM_WORDS, 0, -1):
        terms = lexicon.terms_of_length(length)
        if not terms:
            continue
        for start in range(0, len(tokens) - length + 1):
            if any(taken[start : start + length]):
                continue
            gram = tuple(tokens[start : start + length])
            if gram in terms:
                matches.append((" ".join(gram), start))
                for k in range(start, start + length):
                    taken[k] = True
    matches.sort(key=lambda m: m[1])
    return matches


@dataclass
class ExtractionResult:
    """Extracted records plus counters for anything skipped along the way."""

    records: list[SentenceRecord] = field(default_factory=list)
    skipped_empty_docs: int = 0
    dropped_overlong: int = 0
    duplicates_merged: int = 0

    def summary(self) -> dict:
        return {
            "records": len(self.records),
            "skipped_empty_docs": self.skipped_empty_docs,
            "dropped_overlong": self.dropped_overlong,
            "duplicates_merged": self.duplicates_merged,
        }


def extract_sentences(
    docs, lexicon: Lexicon, max_tokens: int = DEFAULT_MAX_TOKENS
) -> ExtractionResult:
    """Extract one record per (unique sentence text, matched term) pair.

    Sentences longer than ``max_tokens`` words are excluded. Documents with
    empty text are skipped and counted rather than raised. Output order is
    deterministic: document order, then sentence position, then match position.
    """
    result = ExtractionResult()
    seen: set[tuple[str, str]] = set()
    for doc in docs:
        if not doc.text or not doc.text.strip():
            result.skipped_empty_docs += 1
            continue
        for sentence in sentencize(doc.text):
            tokens = tokenize(sentence)
            if not tokens:
                continue
            matches = match_lexicon(tokens, lexicon)
            if not matches:
                continue
            if len(tokens) > max_tokens:
                result.dropped_overlong += 1
                continue
            for term, _start in matches:
                key = (sentence, term)
                if key in seen:
                    result.duplicates_merged += 1
                    continue
                seen.add(key)
                result.records.append(
                    SentenceRecord(
                        sentence_id=sentence_id(sentence),
                        text=sentence,
                        tokens=tuple(tokens),
                        matched_term=term,
                        specialty=lexicon.specialty,
                        note_type=doc.note_type,
                        doc_id=doc.doc_id,
                    )
                )
    return result


def load_corpus(path) -> list[NoteDocument]:
    """Read a JSON-lines corpus: one {"doc_id", "note_type", "text"} per line."""
    docs: list[NoteDocument] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            doc_id = obj.get("doc_id", "")
            if not doc_id:
                raise CorpusError(f"{path}:{lineno}: missing or empty doc_id")
            if doc_id in seen_ids:
                raise CorpusError(f"{path}:{lineno}: duplicate doc_id {doc_id!r}")
            seen_ids.add(doc_id)
            docs.append(
                NoteDocument(doc_id=doc_id, note_type=obj.get("note_type", ""), text=obj.get("text", ""))
            )
    return docs


def write_records(records, path) -> None:
    """Write sentence records as JSON lines; the label field is omitted when absent."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj = {
                "sentence_id": rec.sentence_id,
                "text": rec.text,
                "tokens": list(rec.tokens),
                "matched_term": rec.matched_term,
                "specialty": rec.specialty,
                "note_type": rec.note_type,
                "doc_id": rec.doc_id,
            }
            if rec.label is not None:
                obj["label"] = rec.label
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def read_records(path) -> list[SentenceRecord]:
    records: list[SentenceRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            records.append(
                SentenceRecord(
                    sentence_id=obj["sentence_id"],
                    text=obj["text"],
                    tokens=tuple(obj["tokens"]),
                    matched_term=obj["matched_term"],
                    specialty=obj["specialty"],
                    note_type=obj["note_type"],
                    doc_id=obj["doc_id"],
                    label=obj.get("label"),
                )
            )
    return records
