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
// Path ranking for corrupted predictions: when a chunk's predicted words
// are not all present in its candidate solution space, candidate paths
// through the chunk are scored with
//
//   S = LL / (rho * |W|)
//
// (model log-likelihood over per-character labels, char-LM perplexity of
// the path text, word-count penalty) and the best path replaces the
// prediction. Raw mode divides the (negative) log-likelihood verbatim;
// because a larger penalty then moves S toward zero, i.e. up, the default
// `Prob` mode substitutes the per-character geometric-mean probability
// exp(LL/L) so that both penalty terms act downward. Both modes ship.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "translist/charlm.hpp"
#include "translist/encoder.hpp"
#include "translist/labels.hpp"
#include "translist/lattice.hpp"

namespace translist {

enum class PrcpMode { Off, Raw, Prob };

struct PathScore {
    double log_likelihood = 0.0;
    double rho = 0.0;
    int num_words = 0;
    double score = 0.0;
    std::string text;  // the path's segmented rendering
};

// True iff some predicted word is absent from the chunk's candidate node
// text set (an empty candidate set corrupts any non-empty prediction).
inline bool detect_corrupted(const std::vector<std::string>& predicted_words,
                             const std::set<std::string>& candidate_texts) {
    for (const std::string& w : predicted_words)
        if (!candidate_texts.count(w)) return true;
    return false;
}

// Sum of per-character label log-probabilities under the model for a path
// rendered over the chunk [start, end]. `logits` are the sentence's char
// logits; labels come from aligning the path text to the chunk surface,
// falling back to UNK for out-of-vocabulary labels. Throws AlignError when
// the path cannot be aligned within the label budget.
inline double path_loglikelihood(const Tensor& logits, const SymbolSequence& sentence,
                                 std::size_t start, std::size_t end,
                                 const std::string& text, const LabelVocab& vocab) {
    SymbolSequence chunk;
    chunk.symbols.assign(sentence.symbols.begin() + static_cast<std::ptrdiff_t>(start),
                         sentence.symbols.begin() + static_cast<std::ptrdiff_t>(end) + 1);
    AlignedLabels aligned = align_gold(chunk, text);
    LabelSequence ids = vocab.encode(aligned);
    double ll = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        std::vector<double> lsm = log_softmax_row(logits, static_cast<int>(start + i));
        ll += lsm[static_cast<std::size_t>(ids[i])];
    }
    return ll;
}

inline double score_path(double ll, double rho, int num_words, PrcpMode mode,
                         std::size_t chunk_len) {
    if (rho <= 0.0) throw Error("score_path: rho must be positive");
    if (num_words < 1) throw Error("score_path: num_words must be >= 1");
    double numerator = mode == PrcpMode::Prob
                           ? std::exp(ll / static_cast<double>(chunk_len))
                           : ll;
    return numerator / (rho * static_cast<double>(num_words));
}

struct ChunkRerank {
    bool applied = false;       // a path replaced the prediction
    bool truncated = false;     // enumeration hit the cap
    std::size_t paths_scored = 0;
    std::size_t paths_skipped = 0;  // unalignable paths
    std::vector<std::string> words;
    PathScore best;
};

// Scores every enumerated candidate path through the chunk and returns the
// argmax-S path's words; ties break to fewer words, then lexicographic
// path text. NoPath (or every path unalignable) keeps the original
// prediction: `applied` stays false.
inline ChunkRerank rerank_chunk(const Tensor& logits, const SymbolSequence& sentence,
                                const Lattice& lattice, std::size_t start, std::size_t end,
                                const LabelVocab& vocab, const CharLM& lm, PrcpMode mode,
                                std::size_t path_cap = 10000, bool allow_overlap = true) {
    ChunkRerank out;
    if (mode == PrcpMode::Off) return out;
    PathEnumeration en;
    try {
        en = enumerate_paths(lattice, start, end, path_cap, allow_overlap);
    } catch (const NoPath&) {
        return out;
    }
    out.truncated = en.truncated;

    bool have_best = false;
    PathScore best;
    std::vector<std::string> best_words;
    std::size_t chunk_len = end - start + 1;
    for (const Path& path : en.paths) {
        PathScore ps;
        ps.text = path_text(path);
        ps.num_words = static_cast<int>(path.size());
        try {
            ps.log_likelihood =
                path_loglikelihood(logits, sentence, start, end, ps.text, vocab);
        } catch (const AlignError&) {
            ++out.paths_skipped;
            continue;
        }
        ps.rho = lm.perplexity(ps.text);
        ps.score = score_path(ps.log_likelihood, ps.rho, ps.num_words, mode, chunk_len);
        ++out.paths_scored;
        bool better = !have_best || ps.score > best.score ||
                      (ps.score == best.score &&
                       (ps.num_words < best.num_words ||
                        (ps.num_words == best.num_words && ps.text < best.text)));
        if (better) {
            best = ps;
            have_best = true;
        }
    }
    if (!have_best) return out;

    out.applied = true;
    out.best = best;
    out.words = decoded_words(best.text);
    return out;
}

}  // namespace translist
