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
//
// Lattice construction: character nodes plus auxiliary word nodes coming
// from n-grams, vocabulary matching, or an ingested candidate-space record,
// and enumeration of directed word-node paths through a chunk.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "translist/errors.hpp"
#include "translist/symbols.hpp"

namespace translist {

enum class SpanKind : std::uint8_t { Char, Word };

// A lattice node: token text plus head/tail symbol indices (inclusive).
struct Span {
    std::string text;
    std::size_t head = 0;
    std::size_t tail = 0;
    SpanKind kind = SpanKind::Word;

    bool operator==(const Span&) const = default;
    auto key() const { return std::tie(head, tail, text); }
    bool operator<(const Span& o) const { return key() < o.key(); }
};

struct Lattice {
    std::vector<Span> chars;  // chars[i].head == i
    std::vector<Span> words;  // deduplicated, sorted by (head, tail, text)

    std::size_t num_nodes() const { return chars.size() + words.size(); }

    // chars first, then words; this is the encoder's node order.
    std::vector<Span> nodes() const {
        std::vector<Span> out = chars;
        out.insert(out.end(), words.begin(), words.end());
        return out;
    }
};

inline std::vector<Span> char_nodes(const SymbolSequence& seq) {
    std::vector<Span> out;
    out.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i)
        out.push_back({utf8_encode(seq.symbols[i]), i, i, SpanKind::Char});
    return out;
}

namespace detail {

inline void sort_dedup_words(std::vector<Span>& words) {
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
}

}  // namespace detail

// Every contiguous n-gram with 2 <= n <= n_max that stays inside a chunk.
inline std::vector<Span> ngram_nodes(const SymbolSequence& seq, int n_max) {
    if (n_max < 2) throw Error("ngram_nodes: n_max must be >= 2");
    std::vector<Span> out;
    for (auto [start, end] : seq.chunks()) {
        std::size_t len = end - start;
        for (std::size_t n = 2; n <= static_cast<std::size_t>(n_max) && n <= len; ++n)
            for (std::size_t h = start; h + n <= end; ++h)
                out.push_back({seq.substr_utf8(h, h + n - 1), h, h + n - 1, SpanKind::Word});
    }
    detail::sort_dedup_words(out);
    return out;
}

// One span per exact-substring occurrence of each vocabulary word within a
// chunk. Single-symbol words are allowed: as word nodes they carry their
// own lexical embedding even where a char node shares the position.
inline std::vector<Span> vocab_nodes(const SymbolSequence& seq,
                                     const std::set<std::string>& vocab) {
    std::vector<Span> out;
    for (const std::string& word : vocab) {
        std::vector<char32_t> w = utf8_decode(word);
        if (w.empty()) continue;
        for (auto [start, end] : seq.chunks()) {
            if (end - start < w.size()) continue;
            for (std::size_t h = start; h + w.size() <= end; ++h) {
                if (std::equal(w.begin(), w.end(), seq.symbols.begin() + h))
                    out.push_back({word, h, h + w.size() - 1, SpanKind::Word});
            }
        }
    }
    detail::sort_dedup_words(out);
    return out;
}

namespace detail {

inline std::size_t edit_distance(const std::vector<char32_t>& a,
                                 const std::vector<char32_t>& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// Chunk index containing symbol i.
inline std::size_t chunk_index_of(const SymbolSequence& seq, std::size_t i) {
    std::size_t c = 0;
    for (std::size_t b : seq.chunk_boundaries) {
        if (i < b) break;
        ++c;
    }
    return c;
}

inline bool window_in_one_chunk(const SymbolSequence& seq, std::size_t head,
                                std::size_t tail) {
    return chunk_index_of(seq, head) == chunk_index_of(seq, tail);
}

}  // namespace detail

struct AttachResult {
    std::vector<Span> spans;
    std::vector<std::string> warnings;  // dropped nodes
};

// Ingests a candidate record against the surface sequence. Nodes whose
// claimed span matches their text are kept verbatim; misaligned nodes are
// rectified to the closest match (exact occurrences first, then the
// |text|+-1 window with minimum edit distance). Nodes whose best distance
// exceeds ceil(|text|/2) are dropped with a warning.
inline AttachResult attach_candidates(const SymbolSequence& seq, const CandidateRecord& rec) {
    AttachResult result;
    std::vector<Span> spans;
    for (const CandidateNode& node : rec.nodes) {
        std::vector<char32_t> text = utf8_decode(node.text);
        if (text.empty()) continue;
        std::size_t n = seq.size();
        auto claimed_head = static_cast<std::size_t>(node.head);
        auto claimed_tail = static_cast<std::size_t>(node.tail);

        // Verbatim if the claimed window reads exactly the text.
        if (claimed_tail < n && claimed_tail - claimed_head + 1 == text.size() &&
            detail::window_in_one_chunk(seq, claimed_head, claimed_tail) &&
            std::equal(text.begin(), text.end(), seq.symbols.begin() + claimed_head)) {
            spans.push_back({node.text, claimed_head, claimed_tail, SpanKind::Word});
            continue;
        }

        // Exact occurrences elsewhere: nearest head wins, ties to the left.
        std::size_t best_head = n;
        long best_dist = -1;
        if (text.size() <= n) {
            for (std::size_t h = 0; h + text.size() <= n; ++h) {
                if (!detail::window_in_one_chunk(seq, h, h + text.size() - 1)) continue;
                if (!std::equal(text.begin(), text.end(), seq.symbols.begin() + h)) continue;
                long dist = std::labs(static_cast<long>(h) - static_cast<long>(claimed_head));
                if (best_dist < 0 || dist < best_dist) {
                    best_dist = dist;
                    best_head = h;
                }
            }
        }
        if (best_dist >= 0) {
            spans.push_back(
                {node.text, best_head, best_head + text.size() - 1, SpanKind::Word});
            continue;
        }

        // Fuzzy: windows of |text|-1, |text|, |text|+1 symbols, minimum edit
        // distance; ties break to smaller head, then smaller window.
        std::size_t best_ed = SIZE_MAX, fuzzy_head = 0, fuzzy_len = 0;
        for (std::size_t h = 0; h < n; ++h) {
            for (std::size_t len :
                 {text.size() > 1 ? text.size() - 1 : 1, text.size(), text.size() + 1}) {
                if (len == 0 || h + len > n) continue;
                if (!detail::window_in_one_chunk(seq, h, h + len - 1)) continue;
                std::vector<char32_t> window(seq.symbols.begin() + h,
                                             seq.symbols.begin() + h + len);
                std::size_t ed = detail::edit_distance(text, window);
                if (ed < best_ed || (ed == best_ed && (h < fuzzy_head ||
                                     (h == fuzzy_head && len < fuzzy_len)))) {
                    best_ed = ed;
                    fuzzy_head = h;
                    fuzzy_len = len;
                }
            }
        }
        std::size_t budget = (text.size() + 1) / 2;
        if (best_ed == SIZE_MAX || best_ed > budget) {
            result.warnings.push_back("dropped candidate '" + node.text +
                                      "': no window within edit distance " +
                                      std::to_string(budget));
            continue;
        }
        spans.push_back({node.text, fuzzy_head, fuzzy_head + fuzzy_len - 1, SpanKind::Word});
    }
    detail::sort_dedup_words(spans);
    result.spans = std::move(spans);
    return result;
}

inline Lattice build_lattice(const SymbolSequence& seq, std::vector<Span> words) {
    Lattice lat;
    lat.chars = char_nodes(seq);
    detail::sort_dedup_words(words);
    lat.words = std::move(words);
    return lat;
}

using Path = std::vector<Span>;

struct PathEnumeration {
    std::vector<Path> paths;
    bool truncated = false;
};

// Enumerates word-node sequences covering [start, end] (inclusive symbol
// indices). Consecutive nodes satisfy next.head == prev.tail + 1, or
// next.head == prev.tail when juncture overlap is allowed (one surface
// symbol shared as the last of prev and the first of next, as sandhi
// merges produce; both words must extend beyond the shared symbol, so
// next.head > prev.head and next.tail > prev.tail). Enumeration is
// depth-first over nodes sorted by (head, tail, text) and stops at `cap`
// paths, setting the truncation flag.
inline PathEnumeration enumerate_paths(const Lattice& lattice, std::size_t start,
                                       std::size_t end, std::size_t cap = 10000,
                                       bool allow_overlap = true) {
    if (cap < 1) throw Error("enumerate_paths: cap must be >= 1");
    std::vector<const Span*> nodes;
    for (const Span& w : lattice.words)
        if (w.head >= start && w.tail <= end) nodes.push_back(&w);
    // lattice.words is sorted already; keep that order for determinism.

    PathEnumeration out;
    Path current;
    std::function<bool(std::size_t, std::size_t)> extend =
        [&](std::size_t prev_head, std::size_t prev_tail) -> bool {
        // returns false when the cap was hit
        if (prev_tail == end) {
            if (out.paths.size() >= cap) {
                out.truncated = true;
                return false;
            }
            out.paths.push_back(current);
            return true;
        }
        for (const Span* w : nodes) {
            bool ok = w->head == prev_tail + 1 ||
                      (allow_overlap && w->head == prev_tail && w->head > prev_head);
            if (!ok || w->tail <= prev_tail) continue;
            current.push_back(*w);
            bool cont = extend(w->head, w->tail);
            current.pop_back();
            if (!cont) return false;
        }
        return true;
    };
    for (const Span* w : nodes) {
        if (w->head != start) continue;
        current.push_back(*w);
        if (!extend(w->head, w->tail)) {
            current.pop_back();
            break;
        }
        current.pop_back();
    }
    if (out.paths.empty() && !out.truncated)
        throw NoPath("no word-node path covers [" + std::to_string(start) + "," +
                     std::to_string(end) + "]");
    return out;
}

inline std::string path_text(const Path& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out.push_back(' ');
        out += path[i].text;
    }
    return out;
}

}  // namespace translist
