"""Tokenizer, sentence splitter, and future-tense marker counts.

The three markers are the literal word tokens ``will`` and ``shall`` and the
two-token phrase ``going to`` (matched within one sentence).  No
part-of-speech filtering is applied, so noun uses ("last will") count, and
contractions ("we'll") do not.  Hyphens are token separators, so a written
"going-to" produces the adjacent tokens ``going``, ``to`` and does match.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

try:
    from promises._countcore import count_markers as _count_markers

    KERNEL_BACKEND = "cython"
except ImportError:  # compiled kernel not built; pure fallback is exact
    from promises._countpure import count_markers as _count_markers

    KERNEL_BACKEND = "python"

if TYPE_CHECKING:
    from promises.corpus import Corpus

_PUNCT = ".!?"
_MARKERS = ("will", "shall")


@dataclass(frozen=True)
class FutureCounts:
    """Per-document tallies of the three markers and of marked sentences."""

    will: int = 0
    shall: int = 0
    going_to: int = 0
    future_sentences: int = 0

    def total(self) -> int:
        return self.will + self.shall + self.going_to

    def __add__(self, other: "FutureCounts") -> "FutureCounts":
        return FutureCounts(
            self.will + other.will,
            self.shall + other.shall,
            self.going_to + other.going_to,
            self.future_sentences + other.future_sentences,
        )


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class CountRow:
    entity: str
    year: int
    counts: FutureCounts


def split_sentences(text: str) -> list[Sentence]:
    """Split *text* into sentences of case-folded word tokens.

    Sentences end at '.', '!' or '?' followed by whitespace or end of input;
    no abbreviation dictionary is used, so "U. S." style abbreviations
    over-split (a documented limitation that does not affect the will/shall
    token counts).  Fragments with no tokens are dropped.
    """
    sentences = []
    for frag in _fragments(text):
        toks = _tokens(frag)
        if toks:
            sentences.append(Sentence(tuple(toks)))
    return sentences


def count_future(text: str) -> FutureCounts:
    """Count the three future-tense markers and marked sentences in *text*."""
    return FutureCounts(*_count_markers(text))


def counts_from_sentences(sentences: Iterable[Sentence]) -> FutureCounts:
    """Recompute FutureCounts from pre-split sentences.

    Slow reference path; used to cross-check the counting kernels.
    """
    will = shall = going_to = fs = 0
    for sent in sentences:
        marker = False
        prev_going = False
        for tok in sent.tokens:
            if tok == "will":
                will += 1
                marker = True
            elif tok == "shall":
                shall += 1
                marker = True
            elif tok == "to" and prev_going:
                going_to += 1
                marker = True
            prev_going = tok == "going"
        if marker:
            fs += 1
    return FutureCounts(will, shall, going_to, fs)


def aggregate_counts(corpus: "Corpus") -> list[CountRow]:
    """One CountRow per document, in the corpus's canonical order."""
    return [
        CountRow(doc.entity, doc.year, count_future(doc.text))
        for doc in corpus.docs
    ]


def grand_total(rows: Iterable[CountRow]) -> FutureCounts:
    total = FutureCounts()
    for row in rows:
        total = total + row.counts
    return total


def write_counts_csv(rows: Iterable[CountRow], fh, include_total: bool = False) -> None:
    """Write ``entity,year,will,shall,going_to,future_sentences`` rows."""
    rows = list(rows)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["entity", "year", "will", "shall", "going_to", "future_sentences"])
    for row in rows:
        c = row.counts
        writer.writerow([row.entity, row.year, c.will, c.shall, c.going_to, c.future_sentences])
    if include_total:
        t = grand_total(rows)
        writer.writerow(["TOTAL", "", t.will, t.shall, t.going_to, t.future_sentences])


def read_counts_csv(fh) -> list[CountRow]:
    reader = csv.DictReader(fh)
    needed = ("entity", "year", "will", "shall", "going_to", "future_sentences")
    missing = [c for c in needed if c not in set(reader.fieldnames or ())]
    if missing:
        raise ValueError(f"counts CSV is missing column(s): {', '.join(missing)}")
    rows = []
    for rec in reader:
        if rec["entity"] == "TOTAL":
            continue
        rows.append(
            CountRow(
                rec["entity"],
                int(rec["year"]),
                FutureCounts(
                    int(rec["will"]),
                    int(rec["shall"]),
                    int(rec["going_to"]),
                    int(rec["future_sentences"]),
                ),
            )
        )
    return rows


def _fragments(text: str):
    """Sentence fragments per the splitting rule (punctuation retained)."""
    start = 0
    n = len(text)
    for i, c in enumerate(text):
        if c in _PUNCT and (i + 1 == n or text[i + 1].isspace()):
            yield text[start : i + 1]
            start = i + 1
    if start < n:
        yield text[start:]


def _tokens(fragment: str) -> list[str]:
    """Maximal alphabetic runs with internal apostrophes, lowercased."""
    toks = []
    buf: list[str] = []
    n = len(fragment)
    for i, c in enumerate(fragment):
        if c.isalpha():
            buf.append(c)
        elif c == "'" and buf and i + 1 < n and fragment[i + 1].isalpha():
            buf.append(c)
        elif buf:
            toks.append("".join(buf).lower())
            buf.clear()
    if buf:
        toks.append("".join(buf).lower())
    return toks
