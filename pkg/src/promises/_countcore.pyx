# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled single-pass marker counting kernel.

Semantics match :func:`promises._countpure.count_markers` exactly; that
module documents the tokenization and sentence rules.  This version scans
the string once with no intermediate allocations.
"""

from cpython.unicode cimport (
    Py_UNICODE_ISALPHA,
    Py_UNICODE_ISSPACE,
    Py_UNICODE_TOLOWER,
)

DEF BUF_CAP = 6

# U+0130 is the only codepoint whose full lowercase mapping is multi-char;
# Py_UNICODE_TOLOWER would fold it to 'i' where str.lower() does not, so it
# is stored as a sentinel that can never match a marker word.
DEF NO_MATCH = 0xFFFF


def count_markers(str text):
    """Return ``(will, shall, going_to, future_sentences)`` for *text*."""
    cdef Py_ssize_t i = 0, n = len(text)
    cdef long long will = 0, shall = 0, going_to = 0, fs = 0
    cdef Py_UCS4 buf[BUF_CAP]
    cdef int blen = 0
    cdef bint overflow = 0, prev_going = 0, marker = 0
    cdef Py_UCS4 c
    cdef int kind  # 0 other, 1 will, 2 shall, 3 going, 4 to

    while i < n:
        c = text[i]
        if Py_UNICODE_ISALPHA(c):
            if blen < BUF_CAP and not overflow:
                buf[blen] = NO_MATCH if c == 0x0130 else Py_UNICODE_TOLOWER(c)
                blen += 1
            else:
                overflow = 1
            i += 1
            continue
        if (c == u"'" and (blen > 0 or overflow)
                and i + 1 < n and Py_UNICODE_ISALPHA(<Py_UCS4>text[i + 1])):
            if blen < BUF_CAP and not overflow:
                buf[blen] = c
                blen += 1
            else:
                overflow = 1
            i += 1
            continue
        # token boundary
        if blen > 0 or overflow:
            kind = 0 if overflow else _classify(buf, blen)
            if kind == 1:
                will += 1
                marker = 1
            elif kind == 2:
                shall += 1
                marker = 1
            elif kind == 4 and prev_going:
                going_to += 1
                marker = 1
            prev_going = kind == 3
            blen = 0
            overflow = 0
        if ((c == u'.' or c == u'!' or c == u'?')
                and (i + 1 == n or Py_UNICODE_ISSPACE(<Py_UCS4>text[i + 1]))):
            if marker:
                fs += 1
            marker = 0
            prev_going = 0
        i += 1

    if blen > 0 or overflow:
        kind = 0 if overflow else _classify(buf, blen)
        if kind == 1:
            will += 1
            marker = 1
        elif kind == 2:
            shall += 1
            marker = 1
        elif kind == 4 and prev_going:
            going_to += 1
            marker = 1
    if marker:
        fs += 1
    return will, shall, going_to, fs


cdef inline int _classify(Py_UCS4 *buf, int blen):
    if blen == 4:
        if buf[0] == u'w' and buf[1] == u'i' and buf[2] == u'l' and buf[3] == u'l':
            return 1
    elif blen == 5:
        if buf[0] == u's' and buf[1] == u'h' and buf[2] == u'a' and buf[3] == u'l' and buf[4] == u'l':
            return 2
        if buf[0] == u'g' and buf[1] == u'o' and buf[2] == u'i' and buf[3] == u'n' and buf[4] == u'g':
            return 3
    elif blen == 2:
        if buf[0] == u't' and buf[1] == u'o':
            return 4
    return 0
