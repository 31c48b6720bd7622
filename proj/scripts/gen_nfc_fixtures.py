#!/usr/bin/env python3
"""Regenerates tests/support/nfc_fixtures.inc: (input, expected-NFC) pairs
frozen from the Python unicodedata reference implementation."""

import random
import unicodedata

CASES = [
    "śvetodhāvati",            # IAST word, fully decomposed
    "śvetodhāvati",                        # already composed
    "ṝ",                       # dot-below + macron -> one scalar
    "ṝ",                       # marks out of canonical order
    "devāḥ",                   # devāḥ decomposed
    "devāḥ",
    "x̄̄y",                      # double macron: second stays
    "á̧",                       # acute then cedilla (reorders)
    "क़",                        # ka + nukta: composition excluded
    "Å",                              # Angstrom sign -> Å (singleton)
    "q̣̇ṩ",          # marks in both orders
    "plain ascii words",
    "ā ī ū ṛ ṝ ḷ ḹ ṃ ḥ ś ṣ ñ ṅ ṭ ḍ",
]

ALPHABET = list("aiueoktpnsrmv") + ["̄", "̣", "́", "̇"]


def esc(s: str) -> str:
    out = []
    for b in s.encode("utf-8"):
        if b in (0x22, 0x5C):
            out.append("\\" + chr(b))
        elif 0x20 <= b < 0x7F:
            out.append(chr(b))
        else:
            out.append("\\%03o" % b)
    return '"' + "".join(out) + '"'


def main():
    rng = random.Random(20260809)
    cases = list(CASES)
    for _ in range(40):
        cases.append("".join(rng.choice(ALPHABET) for _ in range(rng.randint(1, 12))))
    with open("tests/support/nfc_fixtures.inc", "w") as f:
        f.write("// Generated by scripts/gen_nfc_fixtures.py; reference values\n")
        f.write("// computed with the Python unicodedata NFC implementation.\n")
        for c in cases:
            f.write("{%s, %s},\n" % (esc(c), esc(unicodedata.normalize("NFC", c))))
    print("wrote", len(cases), "fixtures")


if __name__ == "__main__":
    main()
