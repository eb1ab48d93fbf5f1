import unicodedata

import pytest

from dialectmap import segments
from dialectmap.model import CONSONANT, VOWEL


@pytest.mark.parametrize(
    "token,cls",
    [
        ("d", CONSONANT),
        ("ɛ", VOWEL),
        ("i", VOWEL),
        ("x", CONSONANT),
        ("ʔ", CONSONANT),
        ("ɹ", CONSONANT),
        ("ə", VOWEL),
        ("æ", VOWEL),
        ("ʁ", CONSONANT),
        ("ŋ", CONSONANT),
    ],
)
def test_base_characters(token, cls):
    assert segments.classify(token) == cls


@pytest.mark.parametrize(
    "token,cls",
    [
        ("ɛː", VOWEL),  # length mark
        ("tʰ", CONSONANT),  # aspiration
        ("ɔ̃", VOWEL),  # nasalization (combining tilde)
        ("n̩", CONSONANT),  # syllabic consonant
        ("dʲ", CONSONANT),  # palatalization
    ],
)
def test_diacritics_do_not_decide_class(token, cls):
    assert segments.classify(token) == cls


def test_unknown_base_character_is_an_error():
    with pytest.raises(segments.UnknownSegmentError) as err:
        segments.classify("7")
    assert "7" in str(err.value)


def test_nfc_and_nfd_inputs_classify_alike():
    composed = "é"  # U+00E9
    decomposed = unicodedata.normalize("NFD", composed)
    assert composed != decomposed
    assert segments.classify(composed) == segments.classify(decomposed) == VOWEL
    assert segments.segment(decomposed).token == composed  # stored NFC


def test_override_hook():
    table = segments.SegmentClassTable()
    assert table.classify("w") == CONSONANT
    table.add_override("w", VOWEL)
    assert table.classify("w") == VOWEL
    # base-character entries unaffected
    assert table.classify("wː") == CONSONANT


def test_editable_base_table():
    table = segments.SegmentClassTable()
    with pytest.raises(segments.UnknownSegmentError):
        table.classify("ω")
    table.add_base("ω", VOWEL)
    assert table.classify("ω") == VOWEL
