from __future__ import annotations

import re
from dataclasses import dataclass

_BASED_RE = r"(?:\d[\d_]*\s*)?'[sS]?[bBoOdDhH]\s*[0-9a-fA-F_xXzZ?]+"
_TOKEN_RE = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<based>(?:{_BASED_RE})(?![A-Za-z0-9_'])|'[01xXzZ](?![A-Za-z0-9_']))
  | (?P<dstr>"(?:[^"\\\n]|\\.)*")
  | (?P<sstr>'[^'\n]*')
  | (?P<int>\d[\d_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_$]*)
  | (?P<sysid>\$[A-Za-z_][A-Za-z0-9_$]*)
  | (?P<op>\|->|\|=>|===|!==|\#\#|==|!=|<=|>=|&&|\|\||\+\+|\+=|-=|[()\[\]{{}}:;,@<>!+\-=.*/&|^~?\#$%])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, sysid, int, str, op, bad, eof
    text: str
    start: int
    end: int
    value: int | str | None = None

    def is_(self, *texts: str) -> bool:
        return self.kind in ("ident", "op") and self.text in texts


def _based_value(text: str) -> int | None:
    body = text.replace("_", "").replace(" ", "").replace("\t", "")
    if len(body) == 2 and body[0] == "'":
        return {"0": 0, "1": 1}.get(body[1])  # '0 / '1 fill literals; x/z unsupported
    size, _, rest = body.partition("'")
    rest = rest.lstrip("sS")
    base = {"b": 2, "o": 8, "d": 10, "h": 16}[rest[0].lower()]
    digits = rest[1:]
    if any(c in "xXzZ?" for c in digits):
        return None
    try:
        value = int(digits, base)
    except ValueError:
        return None
    if size:
        value &= (1 << int(size)) - 1 if int(size) > 0 else 0
    return value


def tokenize(source: str) -> list[Token]:
    """Split SVA text into tokens. Never raises: unlexable characters become ``bad`` tokens."""
    toks: list[Token] = []
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            if source.startswith("/*", pos):
                toks.append(Token("bad", source[pos:], pos, n))
                break
            toks.append(Token("bad", source[pos], pos, pos + 1))
            pos += 1
            continue
        kind = m.lastgroup
        text = m.group()
        start, end = m.span()
        pos = end
        if kind in ("ws", "comment"):
            continue
        if kind == "int":
            toks.append(Token("int", text, start, end, int(text.replace("_", ""))))
        elif kind == "based":
            toks.append(Token("int", text, start, end, _based_value(text)))
        elif kind == "dstr":
            toks.append(Token("str", text, start, end, text[1:-1]))
        elif kind == "sstr":
            toks.append(Token("str", text, start, end, text[1:-1]))
        else:
            toks.append(Token(kind, text, start, end))
    toks.append(Token("eof", "", n, n))
    return toks
