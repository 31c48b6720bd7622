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
// Text normalization and corpus / candidate-space ingestion. All indexing
// elsewhere in the library is in terms of the NFC scalar sequence produced
// here: one scalar per phoneme character, whitespace reduced to chunk
// boundaries.

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "translist/errors.hpp"
#include "translist/unicode_nfc.hpp"
#include "translist/utf8.hpp"

namespace translist {

inline bool is_space_cp(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' ||
           cp == U'\f';
}

// Normalized symbol sequence of one sentence. Whitespace never appears
// among the symbols; chunk_boundaries[k] is the index of the first symbol
// of chunk k+1 (never 0, strictly increasing).
struct SymbolSequence {
    std::vector<char32_t> symbols;
    std::vector<std::size_t> chunk_boundaries;

    std::size_t size() const { return symbols.size(); }

    // Half-open [start, end) symbol ranges, one per chunk.
    std::vector<std::pair<std::size_t, std::size_t>> chunks() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        std::size_t start = 0;
        for (std::size_t b : chunk_boundaries) {
            out.emplace_back(start, b);
            start = b;
        }
        out.emplace_back(start, symbols.size());
        return out;
    }

    bool boundary_before(std::size_t i) const {
        for (std::size_t b : chunk_boundaries)
            if (b == i) return true;
        return false;
    }

    std::string substr_utf8(std::size_t head, std::size_t tail) const {
        std::string out;
        for (std::size_t i = head; i <= tail && i < symbols.size(); ++i)
            utf8_append(out, symbols[i]);
        return out;
    }

    // Surface text with single spaces at chunk boundaries.
    std::string to_utf8() const {
        std::string out;
        std::size_t next_b = 0;
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            if (next_b < chunk_boundaries.size() && chunk_boundaries[next_b] == i) {
                out.push_back(' ');
                ++next_b;
            }
            utf8_append(out, symbols[i]);
        }
        return out;
    }

    bool operator==(const SymbolSequence&) const = default;
};

// NFC-composes text so each IAST phoneme letter is one scalar, collapsing
// whitespace runs into single chunk boundaries.
inline SymbolSequence normalize(std::string_view text) {
    std::vector<char32_t> cps = nfc(utf8_decode(std::string(text)));
    SymbolSequence seq;
    bool pending_boundary = false;
    for (char32_t cp : cps) {
        if (is_space_cp(cp)) {
            pending_boundary = !seq.symbols.empty();
            continue;
        }
        if (pending_boundary) {
            seq.chunk_boundaries.push_back(seq.symbols.size());
            pending_boundary = false;
        }
        seq.symbols.push_back(cp);
    }
    if (seq.symbols.empty()) throw EmptyInput("input is empty after normalization");
    return seq;
}

// NFC + single-space normalization for already-segmented text (gold
// segmentations, path renderings).
inline std::string normalize_text(std::string_view text) {
    std::vector<char32_t> cps = nfc(utf8_decode(std::string(text)));
    std::string out;
    bool pending_space = false;
    for (char32_t cp : cps) {
        if (is_space_cp(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        utf8_append(out, cp);
    }
    return out;
}

struct SentenceRecord {
    std::string id;
    SymbolSequence source;
    std::optional<std::string> gold;  // normalized, single-spaced

    bool operator==(const SentenceRecord&) const = default;
};

// One line of the corpus TSV: `id<TAB>source[<TAB>gold]`.
inline SentenceRecord parse_corpus_line(std::string_view line, std::size_t lineno = 0) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '\t') {
            fields.emplace_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    auto where = [lineno] { return lineno ? " at line " + std::to_string(lineno) : ""; };
    if (fields.size() != 2 && fields.size() != 3)
        throw FormatError("corpus line has " + std::to_string(fields.size()) +
                          " fields, want 2 or 3" + where());
    SentenceRecord rec;
    rec.id = fields[0];
    rec.source = normalize(fields[1]);
    if (fields.size() == 3) {
        std::string gold = normalize_text(fields[2]);
        if (gold.empty()) throw FormatError("empty gold segmentation" + where());
        rec.gold = std::move(gold);
    }
    return rec;
}

inline std::string serialize_record(const SentenceRecord& rec) {
    std::string out = rec.id + "\t" + rec.source.to_utf8();
    if (rec.gold) out += "\t" + *rec.gold;
    return out;
}

inline std::vector<SentenceRecord> load_corpus(std::istream& in) {
    std::vector<SentenceRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        out.push_back(parse_corpus_line(line, lineno));
    }
    return out;
}

struct CandidateNode {
    std::string text;  // normalized
    long head = 0;
    long tail = 0;

    bool operator==(const CandidateNode&) const = default;
};

struct CandidateRecord {
    std::string id;
    std::vector<CandidateNode> nodes;
};

namespace detail {

inline long parse_offset(std::string_view s, std::size_t lineno) {
    if (s.empty()) throw FormatError("empty offset field at line " + std::to_string(lineno));
    long v = 0;
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-') {
        neg = true;
        i = 1;
        if (s.size() == 1)
            throw FormatError("non-integer offset at line " + std::to_string(lineno));
    }
    if (s.size() - i > 12)
        throw FormatError("offset out of range at line " + std::to_string(lineno));
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9')
            throw FormatError("non-integer offset '" + std::string(s) + "' at line " +
                              std::to_string(lineno));
        v = v * 10 + (s[i] - '0');
    }
    return neg ? -v : v;
}

}  // namespace detail

// One record of the candidate-space file: a `#id` header line followed by
// one `text<TAB>head<TAB>tail` line per node; a blank line ends the record.
inline CandidateRecord parse_candidate_record(std::string_view block,
                                              std::size_t first_lineno = 1) {
    CandidateRecord rec;
    std::istringstream in{std::string(block)};
    std::string line;
    std::size_t lineno = first_lineno - 1;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) break;
        if (!have_header) {
            if (line[0] != '#')
                throw FormatError("candidate record must start with '#id' at line " +
                                  std::to_string(lineno));
            rec.id = line.substr(1);
            have_header = true;
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == '\t') {
                fields.emplace_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (fields.size() != 3)
            throw FormatError("candidate node line has " + std::to_string(fields.size()) +
                              " fields, want 3, at line " + std::to_string(lineno));
        CandidateNode node;
        node.text = normalize_text(fields[0]);
        if (node.text.empty() || node.text.find(' ') != std::string::npos)
            throw FormatError("bad candidate text at line " + std::to_string(lineno));
        node.head = detail::parse_offset(fields[1], lineno);
        node.tail = detail::parse_offset(fields[2], lineno);
        if (node.head < 0 || node.tail < 0 || node.head > node.tail)
            throw OffsetError("inverted or negative span (" + std::to_string(node.head) +
                              "," + std::to_string(node.tail) + ") at line " +
                              std::to_string(lineno));
        rec.nodes.push_back(std::move(node));
    }
    if (!have_header) throw FormatError("empty candidate record");
    return rec;
}

// Whole candidate-space file, keyed by sentence id.
inline std::map<std::string, CandidateRecord> load_candidate_file(std::istream& in) {
    std::map<std::string, CandidateRecord> out;
    std::string line, block;
    std::size_t lineno = 0, block_start = 1;
    auto flush = [&] {
        if (block.empty()) return;
        CandidateRecord rec = parse_candidate_record(block, block_start);
        out[rec.id] = std::move(rec);
        block.clear();
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            block_start = lineno + 1;
            continue;
        }
        if (block.empty()) block_start = lineno;
        block += line;
        block += '\n';
    }
    flush();
    return out;
}

}  // namespace translist
