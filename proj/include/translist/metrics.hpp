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
// Word-level macro precision / recall / F and perfect match, plus the
// character-level per-rule P/R/F used for sandhi-rule analysis.

#pragma once

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "translist/labels.hpp"

namespace translist {

struct SentenceEval {
    double precision = 0.0;  // fractions in [0,1]
    double recall = 0.0;
    double f1 = 0.0;
    bool exact = false;
};

inline double harmonic_f(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

// Multiset word matching: repeated words count as many times as they
// co-occur. Empty prediction scores zero precision.
inline SentenceEval eval_sentence(const std::vector<std::string>& pred,
                                  const std::vector<std::string>& gold) {
    std::map<std::string, long> gold_counts;
    for (const std::string& w : gold) ++gold_counts[w];
    long matched = 0;
    for (const std::string& w : pred) {
        auto it = gold_counts.find(w);
        if (it != gold_counts.end() && it->second > 0) {
            ++matched;
            --it->second;
        }
    }
    SentenceEval ev;
    ev.precision = pred.empty() ? 0.0 : static_cast<double>(matched) / pred.size();
    ev.recall = gold.empty() ? 0.0 : static_cast<double>(matched) / gold.size();
    ev.f1 = harmonic_f(ev.precision, ev.recall);
    ev.exact = pred == gold;
    return ev;
}

enum class MacroFMode {
    MeanOfF,      // mean of per-sentence F
    HarmonicOfPR  // harmonic mean of macro P and macro R
};

struct EvalReport {
    std::vector<SentenceEval> sentences;
    double macro_p = 0.0;  // percentages in [0,100]
    double macro_r = 0.0;
    double macro_f = 0.0;
    double perfect_match = 0.0;
    MacroFMode f_mode = MacroFMode::MeanOfF;
};

inline EvalReport eval_corpus(std::vector<SentenceEval> sentences,
                              MacroFMode f_mode = MacroFMode::MeanOfF) {
    if (sentences.empty()) throw EmptyCorpus("eval_corpus: no sentences");
    EvalReport rep;
    rep.f_mode = f_mode;
    double sp = 0.0, sr = 0.0, sf = 0.0;
    long exact = 0;
    for (const SentenceEval& ev : sentences) {
        sp += ev.precision;
        sr += ev.recall;
        sf += ev.f1;
        if (ev.exact) ++exact;
    }
    double n = static_cast<double>(sentences.size());
    rep.macro_p = 100.0 * sp / n;
    rep.macro_r = 100.0 * sr / n;
    rep.macro_f = f_mode == MacroFMode::MeanOfF
                      ? 100.0 * sf / n
                      : harmonic_f(rep.macro_p, rep.macro_r);
    rep.perfect_match = 100.0 * static_cast<double>(exact) / n;
    rep.sentences = std::move(sentences);
    return rep;
}

// A character-level rewrite rule: a surface symbol and the label it should
// expand to (`_` marks the word boundary inside the expansion).
struct CharRule {
    std::string surface;    // one symbol, UTF-8
    std::string expansion;  // label text
};

struct RulePrf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t gold_locations = 0;
    std::size_t pred_locations = 0;
};

// Locations are (sentence, symbol) pairs where the surface symbol matches
// and the aligned label equals the rule's expansion; P/R/F over the gold
// and predicted location sets. Zero predicted locations reports P = 0.
inline RulePrf rule_prf(const std::vector<SymbolSequence>& sources,
                        const std::vector<AlignedLabels>& gold,
                        const std::vector<AlignedLabels>& pred, const CharRule& rule) {
    char32_t surface = utf8_decode(rule.surface).at(0);
    std::set<std::pair<std::size_t, std::size_t>> s_g, s_p;
    for (std::size_t s = 0; s < sources.size(); ++s) {
        for (std::size_t i = 0; i < sources[s].size(); ++i) {
            if (sources[s].symbols[i] != surface) continue;
            if (s < gold.size() && i < gold[s].size() && gold[s][i] == rule.expansion)
                s_g.insert({s, i});
            if (s < pred.size() && i < pred[s].size() && pred[s][i] == rule.expansion)
                s_p.insert({s, i});
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> inter;
    std::set_intersection(s_g.begin(), s_g.end(), s_p.begin(), s_p.end(),
                          std::back_inserter(inter));
    RulePrf out;
    out.gold_locations = s_g.size();
    out.pred_locations = s_p.size();
    double m = static_cast<double>(inter.size());
    out.precision = s_p.empty() ? 0.0 : m / static_cast<double>(s_p.size());
    out.recall = s_g.empty() ? 0.0 : m / static_cast<double>(s_g.size());
    out.f1 = harmonic_f(out.precision, out.recall);
    return out;
}

inline void print_report(const EvalReport& rep, std::ostream& out) {
    out << std::fixed << std::setprecision(2);
    out << "  P      R      F      PM\n";
    out << "  " << std::setw(6) << rep.macro_p << " " << std::setw(6) << rep.macro_r << " "
        << std::setw(6) << rep.macro_f << " " << std::setw(6) << rep.perfect_match << "\n";
}

inline std::string report_keyvalues(const EvalReport& rep) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(6);
    out << "precision = " << rep.macro_p << "\n";
    out << "recall = " << rep.macro_r << "\n";
    out << "f1 = " << rep.macro_f << "\n";
    out << "perfect_match = " << rep.perfect_match << "\n";
    out << "sentences = " << rep.sentences.size() << "\n";
    return out.str();
}

}  // namespace translist
