from __future__ import annotations

import re

_FENCE = re.compile(r"^[ \t]*```[^\n`]*\n(.*?)^[ \t]*```", re.S | re.M)
_GENERATE = re.compile(r"\bgenerate\b.*?\bendgenerate\b", re.S)
# a declaration, not the keyword inside `assert property (...)`
_PROPERTY = re.compile(
    r"(?<!assert )(?<!cover )\bproperty\s*\(?\s*[A-Za-z_]\w*\s*\)?\s*;.*?(?:\bendproperty\b|\bend\s+property\b)", re.S
)
_TRAILING_ASSERT = re.compile(r"\s*(?:\w+\s*:\s*)?assert\s+property\s*\([^;]*\)\s*;")


def extract_sva(response) -> list[str]:
    """Candidate SVA snippets from an LLM reply.

    Fenced code blocks win; otherwise ``generate ... endgenerate`` regions and
    ``property ... endproperty`` spans (``end property`` accepted), each
    extended over a directly following ``assert property (...);``.
    """
    raw = response if isinstance(response, str) else response.raw
    fenced = [m.group(1) for m in _FENCE.finditer(raw)]
    fenced = [b for b in fenced if b.strip()]
    if fenced:
        return fenced
    blocks: list[tuple[int, int]] = [m.span() for m in _GENERATE.finditer(raw) if "property" in m.group(0)]
    pos = 0
    while m := _PROPERTY.search(raw, pos):
        inside = next((b for a, b in blocks if a <= m.start() < b), None)
        if inside is not None:
            pos = inside
            continue
        end = m.end()
        tail = _TRAILING_ASSERT.match(raw, end)
        if tail:
            end = tail.end()
        blocks.append((m.start(), end))
        pos = end
    return [raw[a:b] for a, b in sorted(blocks)]
