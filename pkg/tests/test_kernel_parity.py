"""The compiled kernel, the pure fallback, and the sentence-level reference
must agree on every input."""

import pytest
from hypothesis import given, settings, strategies as st

from promises import futuretense
from promises._countpure import count_markers as pure_count
from promises.futuretense import counts_from_sentences, split_sentences

try:
    from promises._countcore import count_markers as core_count
except ImportError:
    core_count = None

_ANY_TEXT = st.text(max_size=200)
_ASCIIISH = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyzWILSHAGONT '.!?;,-\n\té—ß",
    max_size=200,
)


@given(_ANY_TEXT)
@settings(max_examples=300)
def test_pure_matches_sentence_reference(text):
    ref = counts_from_sentences(split_sentences(text))
    assert pure_count(text) == (ref.will, ref.shall, ref.going_to, ref.future_sentences)


@pytest.mark.skipif(core_count is None, reason="compiled kernel not built")
@given(_ANY_TEXT)
@settings(max_examples=300)
def test_core_matches_pure(text):
    assert core_count(text) == pure_count(text)


@pytest.mark.skipif(core_count is None, reason="compiled kernel not built")
@given(_ASCIIISH)
@settings(max_examples=300)
def test_core_matches_pure_marker_heavy(text):
    assert core_count(text) == pure_count(text)


@pytest.mark.skipif(core_count is None, reason="compiled kernel not built")
def test_turkish_dotted_capital_i_never_matches():
    # full lowercase of U+0130 is "i" + combining dot, so W-İ-L-L is not "will"
    text = "WİLL and will"
    assert core_count(text) == pure_count(text) == (1, 0, 0, 1)


def test_selected_backend_is_exposed():
    assert futuretense.KERNEL_BACKEND in ("cython", "python")
    if core_count is not None:
        assert futuretense.KERNEL_BACKEND == "cython"
