// Copyright 2026 The translist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <algorithm>
#include <vector>

#include "translist/unicode_nfc_tables.hpp"

namespace translist {

namespace detail {

inline const NfcDecomp* nfc_find_decomp(char32_t cp) {
    auto it = std::lower_bound(std::begin(kNfcDecompTable), std::end(kNfcDecompTable), cp,
                               [](const NfcDecomp& d, char32_t c) { return d.cp < c; });
    return (it != std::end(kNfcDecompTable) && it->cp == cp) ? &*it : nullptr;
}

inline int nfc_ccc(char32_t cp) {
    auto it = std::lower_bound(std::begin(kNfcCccTable), std::end(kNfcCccTable), cp,
                               [](const NfcCcc& e, char32_t c) { return e.cp < c; });
    return (it != std::end(kNfcCccTable) && it->cp == cp) ? it->ccc : 0;
}

inline char32_t nfc_compose_pair(char32_t a, char32_t b) {
    auto it = std::lower_bound(
        std::begin(kNfcCompTable), std::end(kNfcCompTable), std::pair<char32_t, char32_t>{a, b},
        [](const NfcComp& e, const std::pair<char32_t, char32_t>& k) {
            return e.first != k.first ? e.first < k.first : e.second < k.second;
        });
    return (it != std::end(kNfcCompTable) && it->first == a && it->second == b) ? it->composed
                                                                                : 0;
}

inline void nfc_decompose_into(char32_t cp, std::vector<char32_t>& out) {
    if (const NfcDecomp* d = nfc_find_decomp(cp)) {
        nfc_decompose_into(d->first, out);
        if (d->second) nfc_decompose_into(d->second, out);
    } else {
        out.push_back(cp);
    }
}

}  // namespace detail

// Canonical composition (NFC) for code points below U+3000; code points
// outside that range pass through unchanged. The covered range includes
// all IAST Latin diacritics and Devanagari.
inline std::vector<char32_t> nfc(const std::vector<char32_t>& in) {
    using namespace detail;

    // Decompose.
    std::vector<char32_t> buf;
    buf.reserve(in.size() + 8);
    for (char32_t cp : in) nfc_decompose_into(cp, buf);

    // Canonical ordering: bubble combining marks into nondecreasing ccc order.
    for (std::size_t i = 1; i < buf.size(); ++i) {
        int ci = nfc_ccc(buf[i]);
        if (ci == 0) continue;
        std::size_t j = i;
        while (j > 0) {
            int cj = nfc_ccc(buf[j - 1]);
            if (cj == 0 || cj <= ci) break;
            std::swap(buf[j - 1], buf[j]);
            --j;
        }
    }

    // Compose. A character combines with the last starter when nothing
    // between them blocks it: either it directly follows the starter, or
    // the preceding character is a mark with strictly smaller ccc.
    std::vector<char32_t> out;
    out.reserve(buf.size());
    std::ptrdiff_t starter = -1;
    for (char32_t cp : buf) {
        int ccc = nfc_ccc(cp);
        if (starter >= 0) {
            bool adjacent = static_cast<std::ptrdiff_t>(out.size()) - 1 == starter;
            bool unblocked = adjacent || (ccc > 0 && nfc_ccc(out.back()) < ccc);
            if (unblocked) {
                if (char32_t comp = nfc_compose_pair(out[starter], cp)) {
                    out[starter] = comp;
                    continue;
                }
            }
        }
        if (ccc == 0) starter = static_cast<std::ptrdiff_t>(out.size());
        out.push_back(cp);
    }
    return out;
}

}  // namespace translist
