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
// Gold-segmentation alignment: every surface symbol receives a label of
// 0-3 symbols over the alphabet plus `_` (word boundary), so that the
// concatenated labels reproduce the segmentation. The vocabulary over
// observed labels adds the empty label and UNK as reserved entries.

#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "translist/errors.hpp"
#include "translist/symbols.hpp"

namespace translist {

inline constexpr char32_t kBoundarySymbol = U'_';
inline constexpr int kMaxLabelSymbols = 3;
inline constexpr const char* kUnkLabelText = "<unk>";

using AlignedLabels = std::vector<std::string>;  // one label string per symbol
using LabelSequence = std::vector<int>;          // one vocab id per symbol

namespace detail {

// Minimum-edit-distance alignment of source symbols against gold symbols
// (spaces already mapped to `_`). Backtracking preference: identity
// diagonal, then insertion, then substitution diagonal, then deletion.
// Insertions attach to the preceding source symbol; leading insertions go
// to the first one.
inline std::vector<std::vector<char32_t>> align_parts(const std::vector<char32_t>& src,
                                                      const std::vector<char32_t>& gold) {
    std::size_t n = src.size(), m = gold.size();
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1));
    for (std::size_t i = 0; i <= n; ++i) dp[i][0] = static_cast<int>(i);
    for (std::size_t j = 0; j <= m; ++j) dp[0][j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j) {
            int sub = dp[i - 1][j - 1] + (src[i - 1] == gold[j - 1] ? 0 : 1);
            dp[i][j] = std::min({sub, dp[i - 1][j] + 1, dp[i][j - 1] + 1});
        }

    enum class Move : char { Diag, Insert, Delete };
    std::vector<Move> moves;
    std::size_t i = n, j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && src[i - 1] == gold[j - 1] && dp[i][j] == dp[i - 1][j - 1]) {
            moves.push_back(Move::Diag);
            --i, --j;
        } else if (j > 0 && dp[i][j] == dp[i][j - 1] + 1) {
            moves.push_back(Move::Insert);
            --j;
        } else if (i > 0 && j > 0 && dp[i][j] == dp[i - 1][j - 1] + 1) {
            moves.push_back(Move::Diag);
            --i, --j;
        } else {
            moves.push_back(Move::Delete);
            --i;
        }
    }
    std::reverse(moves.begin(), moves.end());

    std::vector<std::vector<char32_t>> parts(n);
    std::ptrdiff_t cur = -1;
    std::vector<char32_t> leading;
    std::size_t si = 0, gj = 0;
    for (Move mv : moves) {
        switch (mv) {
            case Move::Diag:
                cur = static_cast<std::ptrdiff_t>(si);
                parts[si].push_back(gold[gj]);
                ++si, ++gj;
                break;
            case Move::Delete:
                cur = static_cast<std::ptrdiff_t>(si);
                ++si;
                break;
            case Move::Insert:
                if (cur < 0)
                    leading.push_back(gold[gj]);
                else
                    parts[cur].push_back(gold[gj]);
                ++gj;
                break;
        }
    }
    if (!leading.empty() && !parts.empty())
        parts[0].insert(parts[0].begin(), leading.begin(), leading.end());

    return parts;
}

// Rebalances over-long parts by shifting symbols along the chain toward
// the nearest position with spare capacity; concatenation order is
// preserved at each shift. Throws when no capacity remains.
inline void redistribute_parts(std::vector<std::vector<char32_t>>& parts) {
    auto over = [&]() -> std::ptrdiff_t {
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (parts[i].size() > kMaxLabelSymbols) return static_cast<std::ptrdiff_t>(i);
        return -1;
    };
    for (std::ptrdiff_t p = over(); p >= 0; p = over()) {
        std::ptrdiff_t q = -1;
        std::ptrdiff_t len = static_cast<std::ptrdiff_t>(parts.size());
        for (std::ptrdiff_t d = 1; d < len; ++d) {
            if (p - d >= 0 && parts[p - d].size() < kMaxLabelSymbols) {
                q = p - d;
                break;
            }
            if (p + d < len && parts[p + d].size() < kMaxLabelSymbols) {
                q = p + d;
                break;
            }
        }
        if (q < 0)
            throw AlignError("gold segmentation does not fit the per-symbol label budget");
        if (q < p) {
            for (std::ptrdiff_t i = q + 1; i <= p; ++i) {
                parts[i - 1].push_back(parts[i].front());
                parts[i].erase(parts[i].begin());
            }
        } else {
            for (std::ptrdiff_t i = q - 1; i >= p; --i) {
                parts[i + 1].insert(parts[i + 1].begin(), parts[i].back());
                parts[i].pop_back();
            }
        }
    }
}

}  // namespace detail

// Aligns a gold segmentation to the source symbols, producing one label of
// at most 3 symbols per source symbol. Throws AlignError when the sentence
// cannot fit the label budget.
inline AlignedLabels align_gold(const SymbolSequence& source, const std::string& gold) {
    if (gold.empty()) throw AlignError("empty gold segmentation");
    std::vector<char32_t> gold_syms = utf8_decode(gold);
    for (char32_t& cp : gold_syms)
        if (cp == U' ') cp = kBoundarySymbol;

    auto parts = detail::align_parts(source.symbols, gold_syms);
    detail::redistribute_parts(parts);

    AlignedLabels labels;
    labels.reserve(parts.size());
    for (const auto& part : parts) labels.push_back(utf8_encode(part));
    return labels;
}

struct LabelVocab {
    std::vector<std::string> labels;     // index = id; [0] = "", [1] = UNK
    std::map<std::string, int> index;

    static constexpr int kEpsilonId = 0;
    static constexpr int kUnkId = 1;

    int size() const { return static_cast<int>(labels.size()); }

    int id_of(const std::string& label) const {
        auto it = index.find(label);
        return it == index.end() ? kUnkId : it->second;
    }

    const std::string& text_of(int id) const { return labels[static_cast<std::size_t>(id)]; }

    LabelSequence encode(const AlignedLabels& aligned) const {
        LabelSequence out;
        out.reserve(aligned.size());
        for (const std::string& label : aligned) out.push_back(id_of(label));
        return out;
    }
};

// Vocabulary over all observed labels plus reserved epsilon and UNK;
// observed labels ordered by descending frequency, ties lexicographic.
inline LabelVocab build_label_vocab(const std::vector<AlignedLabels>& corpus) {
    if (corpus.empty()) throw EmptyCorpus("no aligned sentences");
    std::map<std::string, long> freq;
    for (const AlignedLabels& sent : corpus)
        for (const std::string& label : sent) ++freq[label];
    freq.erase("");  // epsilon is reserved, never duplicated

    std::vector<std::pair<std::string, long>> order(freq.begin(), freq.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });

    LabelVocab vocab;
    vocab.labels = {"", kUnkLabelText};
    for (auto& [label, count] : order) vocab.labels.push_back(label);
    for (std::size_t i = 0; i < vocab.labels.size(); ++i)
        vocab.index[vocab.labels[i]] = static_cast<int>(i);
    return vocab;
}

inline void save_label_vocab(const LabelVocab& vocab, std::ostream& out) {
    for (const std::string& label : vocab.labels) out << label << '\n';
}

inline LabelVocab load_label_vocab(std::istream& in) {
    LabelVocab vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        vocab.labels.push_back(line);
    }
    if (vocab.labels.size() < 2 || vocab.labels[0] != "" ||
        vocab.labels[1] != kUnkLabelText)
        throw FormatError("label vocabulary file lacks reserved entries");
    for (std::size_t i = 2; i < vocab.labels.size(); ++i)
        if (utf8_decode(vocab.labels[i]).size() > kMaxLabelSymbols)
            throw FormatError("label vocabulary entry " + std::to_string(i) +
                              " exceeds " + std::to_string(kMaxLabelSymbols) + " symbols");
    for (std::size_t i = 0; i < vocab.labels.size(); ++i)
        vocab.index[vocab.labels[i]] = static_cast<int>(i);
    return vocab;
}

// Concatenates per-symbol labels back into segmented text: `_` becomes a
// space, UNK falls back to the raw surface symbol, chunk boundaries insert
// a space, duplicates collapse what remains.
inline std::string decode_labels(const SymbolSequence& source, const LabelSequence& labels,
                                 const LabelVocab& vocab) {
    if (labels.size() != source.size())
        throw Error("decode_labels: label count " + std::to_string(labels.size()) +
                    " != symbol count " + std::to_string(source.size()));
    std::vector<char32_t> out;
    auto push_boundary = [&] {
        if (!out.empty() && out.back() != U' ') out.push_back(U' ');
    };
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (source.boundary_before(i)) push_boundary();
        int id = labels[i];
        if (id == LabelVocab::kUnkId) {
            out.push_back(source.symbols[i]);
            continue;
        }
        for (char32_t cp : utf8_decode(vocab.text_of(id))) {
            if (cp == kBoundarySymbol)
                push_boundary();
            else
                out.push_back(cp);
        }
    }
    while (!out.empty() && out.back() == U' ') out.pop_back();
    return utf8_encode(out);
}

// Word sequence of a decoded chunk (labels restricted to one chunk).
inline std::vector<std::string> decoded_words(const std::string& segmented) {
    std::vector<std::string> words;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= segmented.size(); ++i) {
        if (i == segmented.size() || segmented[i] == ' ') {
            if (i > start) words.push_back(segmented.substr(start, i - start));
            start = i + 1;
        }
    }
    return words;
}

}  // namespace translist
