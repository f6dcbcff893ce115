import pytest

from snipscan.lexing import LexError, java_tokens, loose_tokens, simple_tokens, strip_comments


def test_strip_line_comment():
    src = "a = 1; // trailing\nb = 2;"
    expected = "a = 1; " + " " * len("// trailing") + "\nb = 2;"
    assert strip_comments(src) == expected


def test_strip_block_comment_keeps_offsets():
    src = "x /* gone\nstill gone */ y"
    out = strip_comments(src)
    assert out.index("y") == src.index("y")
    assert "gone" not in out


def test_comment_marker_inside_string_survives():
    src = 'String u = "http://host/path"; // real comment'
    out = strip_comments(src)
    assert "http://host/path" in out
    assert "real comment" not in out


def test_prose_apostrophe_does_not_eat_line():
    out = strip_comments("it doesn't // matter\nnext")
    assert "doesn't" in out
    assert "matter" not in out


def test_char_literal_recognized():
    toks = java_tokens("char c = 'x';")
    assert [t.kind for t in toks] == ["ident", "ident", "punct", "char", "punct"]


def test_simple_tokens_splits_punctuation():
    assert simple_tokens('Cipher.getInstance("AES")') == [
        "Cipher", ".", "getInstance", "(", '"', "AES", '"', ")",
    ]


def test_java_tokens_rejects_unterminated_string():
    with pytest.raises(LexError):
        java_tokens('String s = "unterminated')


def test_loose_tokens_never_raises():
    toks = loose_tokens('weird § "unterminated')
    assert [t.text for t in toks] == ["weird", "unterminated"]


def test_operator_greediness():
    texts = [t.text for t in java_tokens("a >>= b >> c >= d")]
    assert texts == ["a", ">>=", "b", ">>", "c", ">=", "d"]
