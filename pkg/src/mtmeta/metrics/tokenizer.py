"""mteval-v13a compatible tokenization (the WMT/sacreBLEU default)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

_RULES = (
    # isolate ASCII punctuation and symbols
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),
    # period and comma, unless preceded / followed by a digit
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),
    # dash preceded by a digit
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),
)


@dataclass(frozen=True)
class TokenizedSegment:
    original: str
    tokens: tuple[str, ...]


@lru_cache(maxsize=2**16)
def _tokens(line: str, lowercase: bool) -> tuple[str, ...]:
    line = line.replace("<skipped>", "")
    line = line.replace("-\n", "")
    line = line.replace("\n", " ")
    if "&" in line:
        line = line.replace("&quot;", '"')
        line = line.replace("&amp;", "&")
        line = line.replace("&lt;", "<")
        line = line.replace("&gt;", ">")
    line = f" {line} "
    for pattern, repl in _RULES:
        line = pattern.sub(repl, line)
    if lowercase:
        line = line.lower()
    return tuple(line.split())


def tokenize(segment: str, lowercase: bool = False) -> TokenizedSegment:
    """Split ``segment`` into v13a tokens.

    >>> tokenize("Hello, world!").tokens
    ('Hello', ',', 'world', '!')
    """
    return TokenizedSegment(segment, _tokens(segment, lowercase))
