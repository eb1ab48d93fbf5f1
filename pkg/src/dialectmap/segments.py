"""Vowel/consonant classification of IPA segment tokens.

A segment token is one base character plus its attached diacritics
(length marks, nasalization, devoicing, ...). The class of the whole
token is the class of its base character, looked up in an editable table
of IPA base characters. Unknown base characters raise; silent defaults
would corrupt the vowel/consonant alignment constraint downstream.
"""

from __future__ import annotations

import unicodedata

from .model import CONSONANT, VOWEL, Segment

# IPA base characters. Diacritics and suprasegmentals are intentionally
# absent: they never decide the class.
VOWEL_BASES = set("aeiouy" "æɐɑɒɘəɚɛɜɝɞɤɪɨɯɵøœɶɔʉʊʌʏ")

CONSONANT_BASES = set(
    "bcdfghjklmnpqrstvwxz"
    "çðħŋł"
    "ɓɗʄɠʛ"  # implosives
    "ɕɖɟɢɣɥɦɧ"
    "ɫɬɭɮɰɱɲɳɴ"
    "ɸɹɺɻɽɾ"
    "ʀʁʂʃʈʋʍʎ"
    "ʐʑʒʔʕʙʜʝʞʟ"
    "ʠʡʢʘ"
    "ǀǁǂǃ"  # clicks
    "βθχ"
    "ɡ"  # script g
)


class UnknownSegmentError(ValueError):
    """The base character of a segment token is not in the class table."""

    def __init__(self, token, base):
        self.token = token
        self.base = base
        super().__init__(
            f"unknown base character {base!r} in segment {token!r}; "
            "extend the segment class table if this is a valid segment"
        )


def base_character(token: str) -> str:
    """First character of the NFD form that is not a diacritic or modifier."""
    for ch in unicodedata.normalize("NFD", token):
        if unicodedata.category(ch) not in ("Mn", "Lm", "Sk"):
            return ch
    raise UnknownSegmentError(token, None)


class SegmentClassTable:
    """Editable vowel/consonant table keyed on IPA base characters.

    ``overrides`` maps full tokens to a class and wins over the base-character
    lookup; it is the extension hook for semivowel-style exceptions.
    """

    def __init__(self, vowels=None, consonants=None, overrides=None):
        self.vowels = set(VOWEL_BASES if vowels is None else vowels)
        self.consonants = set(CONSONANT_BASES if consonants is None else consonants)
        self.overrides = dict(overrides or {})

    def add_base(self, ch: str, cls: str):
        if cls == VOWEL:
            self.vowels.add(ch)
            self.consonants.discard(ch)
        elif cls == CONSONANT:
            self.consonants.add(ch)
            self.vowels.discard(ch)
        else:
            raise ValueError(f"unknown class {cls!r}")

    def add_override(self, token: str, cls: str):
        if cls not in (VOWEL, CONSONANT):
            raise ValueError(f"unknown class {cls!r}")
        self.overrides[unicodedata.normalize("NFC", token)] = cls

    def classify(self, token: str) -> str:
        token = unicodedata.normalize("NFC", token)
        if token in self.overrides:
            return self.overrides[token]
        base = base_character(token)
        if base in self.vowels:
            return VOWEL
        if base in self.consonants:
            return CONSONANT
        raise UnknownSegmentError(token, base)

    def segment(self, token: str) -> Segment:
        token = unicodedata.normalize("NFC", token)
        return Segment(token, self.classify(token))


DEFAULT_TABLE = SegmentClassTable()


def classify(token: str) -> str:
    return DEFAULT_TABLE.classify(token)


def segment(token: str) -> Segment:
    return DEFAULT_TABLE.segment(token)
