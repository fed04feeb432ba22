from qelink.text import normalize, tokenize, tokens_of


def test_lowercase_and_split():
    assert tokens_of("Taylor Swift") == ["taylor", "swift"]


def test_punctuation_is_a_boundary():
    assert tokens_of("iron-man") == ["iron", "man"]
    assert tokens_of("taylor swift's albums?") == ["taylor", "swift", "s", "albums"]


def test_offsets_point_into_raw_string():
    text = "Who directed Iron Man?"
    toks = tokenize(text)
    for tok, start, end in toks:
        assert normalize(text[start:end]) == tok
    assert [t for t, _, _ in toks] == ["who", "directed", "iron", "man"]


def test_digits_are_tokens():
    assert tokens_of("1989 album") == ["1989", "album"]


def test_unicode_nfc():
    # Decomposed e + combining acute normalizes to the composed form.
    assert tokens_of("Pokémon") == [normalize("Pokémon")]
