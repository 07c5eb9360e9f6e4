"""Pure-Python marker counting kernel.

Fallback for :mod:`promises._countcore`; both implement the same contract:

* a token is a maximal run of alphabetic characters, with apostrophes kept
  when they sit between two alphabetic characters ("we'll" is one token);
* tokens are matched case-insensitively against the marker words
  ``will``, ``shall`` and the two-token phrase ``going to``;
* a sentence ends at '.', '!' or '?' followed by whitespace or end of input;
* ``future_sentences`` counts sentences containing at least one marker.

ASCII-only text (the overwhelmingly common case for filings) goes through a
regex fast path; anything else is scanned character by character so that the
alphabet is exactly ``str.isalpha``.
"""

from __future__ import annotations

import re

# On ASCII input these are exactly equivalent to the character scan below.
_ASCII_SENT_RE = re.compile(r"[.!?](?=\s|\Z)")
_ASCII_TOKEN_RE = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)*")

_MARKER_WORDS = ("will", "shall", "going", "to")

# Longest marker word is 5 chars; anything longer can be classified "other"
# without materializing the token.
_BUF_CAP = 6


def count_markers(text: str) -> tuple[int, int, int, int]:
    """Return ``(will, shall, going_to, future_sentences)`` for *text*."""
    if text.isascii():
        return _count_ascii(text)
    return _count_scan(text)


def _count_ascii(text: str) -> tuple[int, int, int, int]:
    will = shall = going_to = fs = 0
    for frag in _ASCII_SENT_RE.split(text):
        marker = False
        prev_going = False
        for tok in _ASCII_TOKEN_RE.findall(frag):
            tok = tok.lower()
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
    return will, shall, going_to, fs


def _count_scan(text: str) -> tuple[int, int, int, int]:
    will = shall = going_to = fs = 0
    marker = False
    prev_going = False
    buf: list[str] = []
    overflow = False
    i = 0
    n = len(text)

    def close_token() -> None:
        nonlocal will, shall, going_to, marker, prev_going, overflow
        if not buf and not overflow:
            return
        kind = None
        if not overflow:
            tok = "".join(buf).lower()
            if tok in _MARKER_WORDS:
                kind = tok
        if kind == "will":
            will += 1
            marker = True
        elif kind == "shall":
            shall += 1
            marker = True
        elif kind == "to" and prev_going:
            going_to += 1
            marker = True
        prev_going = kind == "going"
        buf.clear()
        overflow = False

    while i < n:
        c = text[i]
        if c.isalpha():
            if len(buf) < _BUF_CAP and not overflow:
                buf.append(c)
            else:
                overflow = True
            i += 1
            continue
        if c == "'" and (buf or overflow) and i + 1 < n and text[i + 1].isalpha():
            if len(buf) < _BUF_CAP and not overflow:
                buf.append(c)
            else:
                overflow = True
            i += 1
            continue
        close_token()
        if c in ".!?" and (i + 1 == n or text[i + 1].isspace()):
            if marker:
                fs += 1
            marker = False
            prev_going = False
        i += 1
    close_token()
    if marker:
        fs += 1
    return will, shall, going_to, fs
