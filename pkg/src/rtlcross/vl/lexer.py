"""Hand-rolled lexer for the supported Verilog subset."""

from __future__ import annotations

from rtlcross.vl.tokens import KEYWORDS, T, Token


class LexError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col


_SIMPLE_OPS: list[tuple[str, T]] = [
    # Longest first so maximal munch falls out of a linear scan.
    (">>>", T.ARSHIFT),
    ("===", T.CASE_EQ),
    ("!==", T.CASE_NEQ),
    ("<<", T.LSHIFT),
    (">>", T.RSHIFT),
    ("&&", T.LAND),
    ("||", T.LOR),
    ("==", T.EQ),
    ("!=", T.NEQ),
    ("<=", T.LE),
    (">=", T.GE),
    ("+", T.PLUS),
    ("-", T.MINUS),
    ("*", T.STAR),
    ("/", T.SLASH),
    ("%", T.PERCENT),
    ("&", T.AMP),
    ("|", T.PIPE),
    ("^", T.CARET),
    ("~", T.TILDE),
    ("!", T.BANG),
    ("<", T.LT),
    (">", T.GT),
    ("?", T.QUESTION),
    (":", T.COLON),
    ("@", T.AT),
    ("#", T.HASH),
    ("(", T.LPAREN),
    (")", T.RPAREN),
    ("[", T.LBRACKET),
    ("]", T.RBRACKET),
    ("{", T.LBRACE),
    ("}", T.RBRACE),
    (";", T.SEMI),
    (",", T.COMMA),
    (".", T.DOT),
    ("=", T.ASSIGN_OP),
]


def tokenize(text: str) -> list[Token]:
    """Tokenize Verilog source. Raises LexError on malformed input."""
    tokens: list[Token] = []
    i = 0
    n = len(text)
    line = 1
    col = 1

    def advance(count: int) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]

        if ch in " \t\r\n":
            advance(1)
            continue

        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                advance(1)
            continue

        if text.startswith("/*", i):
            start_line, start_col = line, col
            advance(2)
            while i < n and not text.startswith("*/", i):
                advance(1)
            if i >= n:
                raise LexError("unterminated block comment", start_line, start_col)
            advance(2)
            continue

        # Attribute instances carry synthesis hints we do not act on.
        # "(*" followed (after whitespace) by ")" is the sensitivity star
        # of "always @(*)", not an attribute.
        if text.startswith("(*", i):
            k = i + 2
            while k < n and text[k] in " \t":
                k += 1
            if k < n and text[k] == ")":
                tokens.append(Token(T.LPAREN, "(", line, col))
                advance(1)
                continue
            start_line, start_col = line, col
            advance(2)
            while i < n and not text.startswith("*)", i):
                advance(1)
            if i >= n:
                raise LexError("unterminated attribute", start_line, start_col)
            advance(2)
            continue

        if ch == "`":
            start_line, start_col = line, col
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            directive = text[i + 1 : j]
            if directive in ("timescale", "default_nettype"):
                # Harmless for a two-state functional model; skip the line.
                while i < n and text[i] != "\n":
                    advance(1)
                continue
            raise LexError(f"unsupported directive `{directive}", start_line, start_col)

        if ch == '"':
            start_line, start_col = line, col
            j = i + 1
            buf: list[str] = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j : j + 2])
                    j += 2
                elif text[j] == "\n":
                    raise LexError("unterminated string", start_line, start_col)
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                raise LexError("unterminated string", start_line, start_col)
            advance(j + 1 - i)
            tokens.append(Token(T.STRING, "".join(buf), start_line, start_col))
            continue

        if ch == "$":
            start_line, start_col = line, col
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            if j == i + 1:
                raise LexError("stray '$'", start_line, start_col)
            name = text[i:j]
            advance(j - i)
            tokens.append(Token(T.SYS_IDENT, name, start_line, start_col))
            continue

        if ch == "\\":
            # Escaped identifier: backslash to the next whitespace.
            start_line, start_col = line, col
            j = i + 1
            while j < n and text[j] not in " \t\r\n":
                j += 1
            if j == i + 1:
                raise LexError("empty escaped identifier", start_line, start_col)
            name = text[i + 1 : j]
            advance(j - i)
            tokens.append(Token(T.IDENT, name, start_line, start_col))
            continue

        if ch.isdigit() or (ch == "'" and i + 1 < n and text[i + 1].lower() in "bodhs"):
            tok = _lex_number(text, i, line, col)
            advance(len(tok.value))
            tokens.append(tok)
            continue

        if ch.isalpha() or ch == "_":
            start_line, start_col = line, col
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_$"):
                j += 1
            word = text[i:j]
            advance(j - i)
            ttype = KEYWORDS.get(word, T.IDENT)
            tokens.append(Token(ttype, word, start_line, start_col))
            continue

        matched = False
        for op_text, op_type in _SIMPLE_OPS:
            if text.startswith(op_text, i):
                tokens.append(Token(op_type, op_text, line, col))
                advance(len(op_text))
                matched = True
                break
        if matched:
            continue

        raise LexError(f"unexpected character {ch!r}", line, col)

    tokens.append(Token(T.EOF, "", line, col))
    return tokens


def _lex_number(text: str, i: int, line: int, col: int) -> Token:
    """Lex a sized/based/plain numeric literal starting at text[i].

    The token value is the raw spelling (whitespace between size and base
    is not permitted here; the common corpus never uses it). Digit
    validation against the base happens in the parser where context decides
    whether x/z/? digits are acceptable.
    """
    n = len(text)
    j = i
    # Optional size prefix.
    while j < n and (text[j].isdigit() or text[j] == "_"):
        j += 1
    if j < n and text[j] == "'":
        j += 1
        if j < n and text[j].lower() == "s":
            j += 1
        if j >= n or text[j].lower() not in "bodh":
            raise LexError("malformed based literal", line, col)
        j += 1
        digits_start = j
        while j < n and (text[j].isalnum() or text[j] in "_?"):
            j += 1
        if j == digits_start:
            raise LexError("based literal has no digits", line, col)
        return Token(T.NUMBER, text[i:j], line, col)
    # Plain decimal (possibly with separators). A trailing '.' would start
    # a real literal, which the subset rejects; let the parser see the dot.
    return Token(T.NUMBER, text[i:j], line, col)
