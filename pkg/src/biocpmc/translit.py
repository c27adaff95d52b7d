"""Unicode to ASCII folding for the ``ascii`` encoding variant.

Each character goes through three stages, first hit wins:

1. the explicit table (typographic punctuation, Greek letters, symbols);
2. NFKD compatibility decomposition with combining marks dropped, keeping
   whatever ASCII comes out (stray non-ASCII pieces of the decomposition are
   looked up in the table once more);
3. ``"?"``.

The table can be replaced or extended from a file of ``U+XXXX<TAB>replacement``
lines, see :func:`load_table`.
"""

from __future__ import annotations

import unicodedata
from pathlib import Path
from typing import Dict, Mapping, Optional

REPLACEMENT_CHAR = "?"

_GREEK = [
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta",
    "iota", "kappa", "lambda", "mu", "nu", "xi", "omicron", "pi", "rho",
    None, "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega",
]


def _build_default_table() -> Dict[int, str]:
    t: Dict[int, str] = {}
    for i, name in enumerate(_GREEK):
        if name is None:  # U+03A2 is unassigned; U+03C2 is final sigma
            continue
        t[0x0391 + i] = name
        t[0x03B1 + i] = name
    t[0x03C2] = "sigma"
    # symbol variants that NFKD would otherwise map to Greek letters
    t.update({0x00B5: "mu", 0x03D1: "theta", 0x03D5: "phi", 0x03D6: "pi",
              0x03F0: "kappa", 0x03F1: "rho", 0x03F5: "epsilon", 0x2126: "omega"})

    for cp in (0x2018, 0x2019, 0x201A, 0x201B, 0x2032, 0x2039, 0x203A, 0x00B4, 0x02B9, 0x02BC):
        t[cp] = "'"
    for cp in (0x201C, 0x201D, 0x201E, 0x201F, 0x2033, 0x00AB, 0x00BB, 0x02BA):
        t[cp] = '"'
    for cp in (0x2010, 0x2011, 0x2012, 0x2013, 0x2014, 0x2015, 0x2212, 0x2043, 0xFE58, 0xFE63, 0xFF0D):
        t[cp] = "-"
    for cp in (0x00A0, 0x2000, 0x2001, 0x2002, 0x2003, 0x2004, 0x2005, 0x2006,
               0x2007, 0x2008, 0x2009, 0x200A, 0x202F, 0x205F, 0x3000):
        t[cp] = " "
    for cp in (0x00AD, 0x200B, 0x200C, 0x200D, 0x2060, 0xFEFF):
        t[cp] = ""
    t.update({
        0x2026: "...",
        0x00D7: "x",
        0x00B0: " degrees",
        0x00B1: "+/-",
        0x2213: "-/+",
        0x00F7: "/",
        0x2044: "/",
        0x2215: "/",
        0x2264: "<=",
        0x2265: ">=",
        0x2260: "!=",
        0x2248: "~",
        0x223C: "~",
        0x2192: "->",
        0x2190: "<-",
        0x2194: "<->",
        0x21D2: "=>",
        0x2022: "*",
        0x00B7: ".",
        0x22C5: ".",
        0x2219: ".",
        0x00A7: "S",
        0x00B6: "P",
        0x00A9: "(c)",
        0x00AE: "(R)",
        0x2030: "o/oo",
        0x221E: "infinity",
        0x00DF: "ss",
        0x00C6: "AE",
        0x00E6: "ae",
        0x0152: "OE",
        0x0153: "oe",
        0x00D8: "O",
        0x00F8: "o",
        0x0141: "L",
        0x0142: "l",
        0x0110: "D",
        0x0111: "d",
        0x00D0: "D",
        0x00F0: "d",
        0x00DE: "Th",
        0x00FE: "th",
        0x0131: "i",
        0x2020: "+",
        0x2021: "++",
        0x00A1: "!",
        0x00BF: "?",
        0x00A2: "c",
        0x00A3: "GBP",
        0x20AC: "EUR",
        0x00A5: "JPY",
        0x2122: "(TM)",
        0x2116: "No",
        0x212B: "A",
    })
    return t


DEFAULT_TABLE: Mapping[int, str] = _build_default_table()


class TranslitTable:
    """Code point to ASCII replacement mapping.

    Every replacement must be pure ASCII, otherwise ``ValueError`` is raised.
    """

    def __init__(self, entries: Optional[Mapping[int, str]] = None):
        entries = dict(DEFAULT_TABLE if entries is None else entries)
        for cp, rep in entries.items():
            if not rep.isascii():
                raise ValueError(f"replacement for U+{cp:04X} is not ASCII: {rep!r}")
        self.entries: Dict[int, str] = entries
        self._cache: Dict[str, str] = {}

    def extended(self, overrides: Mapping[int, str]) -> "TranslitTable":
        merged = dict(self.entries)
        merged.update(overrides)
        return TranslitTable(merged)

    def fold_char(self, ch: str) -> str:
        if ch.isascii():
            return ch
        hit = self._cache.get(ch)
        if hit is not None:
            return hit
        rep = self.entries.get(ord(ch))
        if rep is None:
            rep = self._decompose(ch)
        self._cache[ch] = rep
        return rep

    def _decompose(self, ch: str) -> str:
        decomposed = unicodedata.normalize("NFKD", ch)
        if decomposed == ch and unicodedata.combining(ch):
            return ""
        out = []
        for d in decomposed:
            if d.isascii():
                out.append(d)
            elif unicodedata.combining(d):
                continue
            elif ord(d) in self.entries:
                out.append(self.entries[ord(d)])
        if not out:
            return REPLACEMENT_CHAR
        return "".join(out)

    def to_ascii(self, text: str) -> str:
        if text.isascii():
            return text
        return "".join(self.fold_char(ch) for ch in text)


def load_table(path, base: Optional[TranslitTable] = None) -> TranslitTable:
    """Read a table override file and merge it over *base* (default table).

    Format: one mapping per line, ``U+XXXX<TAB>replacement``, UTF-8. Blank
    lines and lines starting with ``#`` are skipped. The replacement may be
    empty to delete a character.
    """
    overrides: Dict[int, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        code, sep, rep = line.partition("\t")
        code = code.strip()
        if not sep or not code.upper().startswith("U+"):
            raise ValueError(f"{path}:{lineno}: expected 'U+XXXX<TAB>replacement'")
        try:
            cp = int(code[2:], 16)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad code point {code!r}") from None
        overrides[cp] = rep
    return (base or _default).extended(overrides)


_default = TranslitTable()


def to_ascii(text: str, table: Optional[TranslitTable] = None) -> str:
    """Fold *text* to pure ASCII. Never raises; ASCII input comes back unchanged."""
    return (table or _default).to_ascii(text)
