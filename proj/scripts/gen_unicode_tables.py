#!/usr/bin/env python3
"""Regenerates include/translist/unicode_nfc_tables.hpp from the Python
unicodedata database.

Covers code points below U+3000: canonical decompositions, combining
classes, and primary composite pairs. That range includes every script the
segmenter ingests (Latin with IAST diacritics, Devanagari); code points
outside it pass through normalization untouched.
"""

import sys
import unicodedata

LIMIT = 0x3000


def canonical_decomposition(cp):
    """Canonical (not compatibility) decomposition as a list of code points."""
    d = unicodedata.decomposition(chr(cp))
    if not d or d.startswith("<"):
        return None
    return [int(f, 16) for f in d.split()]


def main(out_path):
    decomps = []   # (cp, a, b)  b == 0 for singleton decompositions
    ccc = []       # (cp, class)
    comps = []     # (a, b, composed)

    for cp in range(0x80, LIMIT):
        d = canonical_decomposition(cp)
        if d:
            if len(d) == 1:
                decomps.append((cp, d[0], 0))
            elif len(d) == 2:
                decomps.append((cp, d[0], d[1]))
            else:
                raise AssertionError("canonical decomposition longer than 2")
            # A pair recomposes iff NFC maps the decomposition back to cp
            # (this filters the composition-exclusion set).
            if len(d) == 2:
                seq = "".join(chr(x) for x in d)
                if unicodedata.normalize("NFC", seq) == chr(cp):
                    comps.append((d[0], d[1], cp))
        c = unicodedata.combining(chr(cp))
        if c:
            ccc.append((cp, c))

    comps.sort(key=lambda t: (t[0], t[1]))

    with open(out_path, "w") as f:
        w = f.write
        w("// Generated by scripts/gen_unicode_tables.py from Unicode %s data.\n"
          % unicodedata.unidata_version)
        w("// Do not edit by hand.\n")
        w("#pragma once\n\n#include <cstdint>\n\n")
        w("namespace translist::detail {\n\n")
        w("struct NfcDecomp { char32_t cp, first, second; };\n")
        w("struct NfcComp { char32_t first, second, composed; };\n")
        w("struct NfcCcc { char32_t cp; std::uint8_t ccc; };\n\n")

        w("inline constexpr NfcDecomp kNfcDecompTable[] = {\n")
        for cp, a, b in decomps:
            w("    {0x%04X, 0x%04X, 0x%04X},\n" % (cp, a, b))
        w("};\n\n")

        w("inline constexpr NfcComp kNfcCompTable[] = {\n")
        for a, b, c in comps:
            w("    {0x%04X, 0x%04X, 0x%04X},\n" % (a, b, c))
        w("};\n\n")

        w("inline constexpr NfcCcc kNfcCccTable[] = {\n")
        for cp, c in ccc:
            w("    {0x%04X, %d},\n" % (cp, c))
        w("};\n\n")
        w("}  // namespace translist::detail\n")

    print("decomps=%d comps=%d ccc=%d" % (len(decomps), len(comps), len(ccc)))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else
         "include/translist/unicode_nfc_tables.hpp")
