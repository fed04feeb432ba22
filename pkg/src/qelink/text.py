"""Shared text normalization: the same rules index entity labels and split questions."""

import re
import unicodedata

# Tokens are maximal alphanumeric runs; punctuation and whitespace are boundaries
# and are dropped ("swift's" -> "swift", "s"; "iron-man" -> "iron", "man").
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def normalize(text):
    """Lowercase NFC form of a string."""
    return unicodedata.normalize("NFC", text).lower()


def tokenize(text):
    """Split text into normalized tokens with character offsets.

    The string is NFC-normalized first, so the half-open [start, end) spans
    refer to the NFC form of the input; for already-composed text they are
    offsets into the raw string. Tokens are additionally lowercased.
    """
    nfc = unicodedata.normalize("NFC", text)
    return [(m.group(0).lower(), m.start(), m.end()) for m in _TOKEN_RE.finditer(nfc)]


def tokens_of(text):
    """Normalized tokens of a string without offsets."""
    return [t for t, _, _ in tokenize(text)]
