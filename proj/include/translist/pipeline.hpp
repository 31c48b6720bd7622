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
// End-to-end workflows shared by the CLI and the test suites: training,
// segmentation (with optional path-ranking rectification), evaluation and
// attention inspection.

#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "translist/checkpoint.hpp"
#include "translist/config.hpp"
#include "translist/encoder.hpp"
#include "translist/labels.hpp"
#include "translist/lattice.hpp"
#include "translist/metrics.hpp"
#include "translist/prcp.hpp"

namespace translist {

// External resources a lattice source may need.
struct LatticeResources {
    std::set<std::string> vocab_words;                 // lattice = vocab
    std::map<std::string, CandidateRecord> candidates; // lattice = candidates*
};

struct SentenceLattice {
    Lattice lattice;
    std::vector<Span> candidate_spans;  // rectified candidate nodes, for PRCP
    bool candidates_missing = false;    // fell back to n-grams
};

// Builds the word-node set for one sentence per the configured source,
// falling back to n-grams (with a warning) when a candidate record is
// missing for the sentence id.
inline SentenceLattice build_sentence_lattice(const SentenceRecord& rec,
                                              const RunConfig& cfg,
                                              const LatticeResources& res,
                                              std::ostream* log = nullptr) {
    SentenceLattice out;
    std::vector<Span> words;
    auto add_candidates = [&]() -> bool {
        auto it = res.candidates.find(rec.id);
        if (it == res.candidates.end()) return false;
        AttachResult attached = attach_candidates(rec.source, it->second);
        if (log)
            for (const std::string& w : attached.warnings)
                *log << "warning: sentence " << rec.id << ": " << w << "\n";
        out.candidate_spans = attached.spans;
        words.insert(words.end(), attached.spans.begin(), attached.spans.end());
        return true;
    };

    switch (cfg.lattice) {
        case LatticeSource::Ngrams:
            words = ngram_nodes(rec.source, cfg.n_max);
            break;
        case LatticeSource::Vocab:
            words = vocab_nodes(rec.source, res.vocab_words);
            break;
        case LatticeSource::Candidates:
            if (!add_candidates()) {
                out.candidates_missing = true;
                if (log)
                    *log << "warning: no candidate record for sentence " << rec.id
                         << ", falling back to n-grams\n";
                words = ngram_nodes(rec.source, cfg.n_max);
            }
            break;
        case LatticeSource::CandidatesPlusNgrams: {
            bool have = add_candidates();
            std::vector<Span> ng = ngram_nodes(rec.source, cfg.n_max);
            words.insert(words.end(), ng.begin(), ng.end());
            out.candidates_missing = !have;
            break;
        }
    }
    out.lattice = build_lattice(rec.source, std::move(words));
    return out;
}

struct TrainStats {
    std::size_t sentences = 0;
    std::size_t skipped = 0;  // unalignable gold
    std::vector<double> epoch_loss;
    std::vector<EvalReport> dev_reports;
};

struct SegmentOptions {
    std::optional<PrcpMode> prcp_override;
    bool chars_only = false;  // ablation: drop word nodes from the lattice
};

struct Checkpoint;
inline EvalReport evaluate_corpus(Checkpoint& ckpt, const std::vector<SentenceRecord>& corpus,
                                  const LatticeResources& res, std::ostream* log = nullptr,
                                  const SegmentOptions& opts = {});

// Trains a model from scratch on gold-segmented records. Sentences whose
// gold cannot be aligned within the label budget are skipped with a
// warning; more than half skipped aborts.
inline Checkpoint train_model(const std::vector<SentenceRecord>& corpus,
                              const RunConfig& cfg, const LatticeResources& res,
                              TrainStats* stats_out = nullptr, std::ostream* log = nullptr,
                              const std::vector<SentenceRecord>* dev = nullptr,
                              double early_stop_dev_pm = -1.0) {
    cfg.validate();
    struct Prepared {
        const SentenceRecord* rec;
        SentenceLattice sl;
        AlignedLabels aligned;
    };
    std::vector<Prepared> prepared;
    TrainStats stats;
    std::vector<std::string> gold_texts;
    for (const SentenceRecord& rec : corpus) {
        if (!rec.gold) throw EmptyCorpus("training corpus requires a gold column");
        ++stats.sentences;
        Prepared p;
        p.rec = &rec;
        try {
            p.aligned = align_gold(rec.source, *rec.gold);
        } catch (const AlignError& e) {
            ++stats.skipped;
            if (log)
                *log << "warning: skipping sentence " << rec.id << ": " << e.what() << "\n";
            continue;
        }
        p.sl = build_sentence_lattice(rec, cfg, res, log);
        gold_texts.push_back(*rec.gold);
        prepared.push_back(std::move(p));
    }
    if (prepared.empty()) throw EmptyCorpus("no alignable training sentences");
    if (stats.skipped * 2 > stats.sentences)
        throw AlignError("more than half of the training corpus is unalignable (" +
                         std::to_string(stats.skipped) + "/" +
                         std::to_string(stats.sentences) + ")");

    std::vector<AlignedLabels> label_corpus;
    for (const Prepared& p : prepared) label_corpus.push_back(p.aligned);
    LabelVocab label_vocab = build_label_vocab(label_corpus);

    TokenVocab chars, words;
    for (const Prepared& p : prepared) {
        for (const Span& s : p.sl.lattice.chars) chars.add(s.text);
        for (const Span& s : p.sl.lattice.words) words.add(s.text);
    }

    std::mt19937_64 rng(cfg.seed);
    Checkpoint ckpt;
    ckpt.config = cfg;
    ckpt.label_vocab = label_vocab;
    ckpt.model = ModelParams::init(cfg.encoder_config(), std::move(chars), std::move(words),
                                   label_vocab.size(), rng);
    ckpt.charlm = CharLM::fit(gold_texts, cfg.charlm_order);

    std::vector<TrainSentence> train_set;
    for (const Prepared& p : prepared) {
        TrainSentence ts;
        ts.lattice = p.sl.lattice;
        ts.labels = label_vocab.encode(p.aligned);
        train_set.push_back(std::move(ts));
    }

    AdamConfig adam;
    adam.lr = cfg.lr;
    long step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double loss_acc = 0.0;
        for (const TrainSentence& ts : train_set) {
            loss_acc += train_step(ckpt.model, {ts}, adam, step, rng);
        }
        double mean_loss = loss_acc / static_cast<double>(train_set.size());
        stats.epoch_loss.push_back(mean_loss);
        if (log) *log << "epoch " << (epoch + 1) << " loss " << mean_loss << "\n";
        if (dev && !dev->empty()) {
            EvalReport rep = evaluate_corpus(ckpt, *dev, res, nullptr, {});
            stats.dev_reports.push_back(rep);
            if (log)
                *log << "epoch " << (epoch + 1) << " dev F " << rep.macro_f << " PM "
                     << rep.perfect_match << "\n";
            if (early_stop_dev_pm >= 0.0 && rep.perfect_match >= early_stop_dev_pm) break;
        }
    }
    if (stats_out) *stats_out = stats;
    return ckpt;
}

struct ChunkLog {
    std::size_t chunk_index = 0;
    std::size_t paths_scored = 0;
    bool truncated = false;
    std::string replaced;  // original chunk text
    std::string chosen;    // rectified chunk text
};

struct SegmentOutcome {
    std::string id;
    std::string text;
    std::vector<ChunkLog> rectified;  // PRCP activations
    bool prcp_active = false;
};

// Segments one sentence with a frozen model: lattice, forward, per-char
// argmax, label decode; when PRCP is enabled and candidate spans exist,
// corrupted chunks are re-ranked against the candidate path space.
inline SegmentOutcome segment_sentence(Checkpoint& ckpt, const SentenceRecord& rec,
                                       const LatticeResources& res,
                                       std::ostream* log = nullptr,
                                       const SegmentOptions& opts = {}) {
    const RunConfig& cfg = ckpt.config;
    SentenceLattice sl = build_sentence_lattice(rec, cfg, res, log);
    if (opts.chars_only) {
        sl.lattice.words.clear();
        sl.candidate_spans.clear();
    }
    Tensor logits = encode_logits(ckpt.model, sl.lattice);

    LabelSequence ids(rec.source.size());
    for (std::size_t i = 0; i < rec.source.size(); ++i)
        ids[i] = argmax_row(logits, static_cast<int>(i));

    SegmentOutcome out;
    out.id = rec.id;
    PrcpMode mode = opts.prcp_override.value_or(cfg.prcp);

    // Decode per chunk so PRCP can replace individual chunks.
    std::vector<std::string> chunk_texts;
    auto chunk_ranges = rec.source.chunks();
    for (auto [start, end] : chunk_ranges) {
        SymbolSequence chunk_seq;
        chunk_seq.symbols.assign(rec.source.symbols.begin() + static_cast<std::ptrdiff_t>(start),
                                 rec.source.symbols.begin() + static_cast<std::ptrdiff_t>(end));
        LabelSequence chunk_ids(ids.begin() + static_cast<std::ptrdiff_t>(start),
                                ids.begin() + static_cast<std::ptrdiff_t>(end));
        chunk_texts.push_back(decode_labels(chunk_seq, chunk_ids, ckpt.label_vocab));
    }

    if (mode != PrcpMode::Off && !sl.candidate_spans.empty()) {
        out.prcp_active = true;
        Lattice cand_lattice = build_lattice(rec.source, sl.candidate_spans);
        for (std::size_t c = 0; c < chunk_ranges.size(); ++c) {
            auto [start, end] = chunk_ranges[c];
            if (end == start) continue;
            std::set<std::string> cand_texts;
            for (const Span& s : sl.candidate_spans)
                if (s.head >= start && s.tail < end) cand_texts.insert(s.text);
            std::vector<std::string> pred_words = decoded_words(chunk_texts[c]);
            if (!detect_corrupted(pred_words, cand_texts)) continue;
            ChunkRerank rr = rerank_chunk(logits, rec.source, cand_lattice, start, end - 1,
                                          ckpt.label_vocab, ckpt.charlm, mode,
                                          static_cast<std::size_t>(cfg.path_cap),
                                          cfg.juncture_overlap);
            if (!rr.applied) continue;
            ChunkLog cl;
            cl.chunk_index = c;
            cl.paths_scored = rr.paths_scored;
            cl.truncated = rr.truncated;
            cl.replaced = chunk_texts[c];
            cl.chosen = rr.best.text;
            chunk_texts[c] = rr.best.text;
            out.rectified.push_back(std::move(cl));
            if (log)
                *log << "prcp: sentence " << rec.id << " chunk " << c << ": '"
                     << out.rectified.back().replaced << "' -> '"
                     << out.rectified.back().chosen << "' (" << rr.paths_scored
                     << " paths, mode " << to_string(mode) << ")\n";
        }
    }

    std::string text;
    for (std::size_t c = 0; c < chunk_texts.size(); ++c) {
        if (c && !chunk_texts[c].empty() && !text.empty()) text.push_back(' ');
        text += chunk_texts[c];
    }
    out.text = text;
    return out;
}

inline std::vector<SegmentOutcome> segment_corpus(Checkpoint& ckpt,
                                                  const std::vector<SentenceRecord>& corpus,
                                                  const LatticeResources& res,
                                                  std::ostream* log = nullptr,
                                                  const SegmentOptions& opts = {}) {
    std::vector<SegmentOutcome> out;
    out.reserve(corpus.size());
    for (const SentenceRecord& rec : corpus)
        out.push_back(segment_sentence(ckpt, rec, res, log, opts));
    return out;
}

inline EvalReport evaluate_corpus(Checkpoint& ckpt, const std::vector<SentenceRecord>& corpus,
                                  const LatticeResources& res, std::ostream* log,
                                  const SegmentOptions& opts) {
    std::vector<SentenceEval> evals;
    for (const SentenceRecord& rec : corpus) {
        if (!rec.gold) throw EmptyCorpus("evaluation requires a gold column");
        SegmentOutcome seg = segment_sentence(ckpt, rec, res, log, opts);
        evals.push_back(eval_sentence(decoded_words(seg.text), decoded_words(*rec.gold)));
    }
    return eval_corpus(std::move(evals), ckpt.config.metric_f);
}

// Attention dump: per sentence, the node inventory and per-layer/head
// attention rows with the mask values. Fixed column format:
//   node <idx> <kind> <head> <tail> <text>
//   attn <layer> <head> <row idx> <alpha...>
//   mask <layer> <head> <row idx> <mask...>
inline void inspect_sentence(Checkpoint& ckpt, const SentenceRecord& rec,
                             const LatticeResources& res, std::ostream& out,
                             std::ostream* log = nullptr) {
    SentenceLattice sl = build_sentence_lattice(rec, ckpt.config, res, log);
    EncodedBatch detail;
    encode_logits(ckpt.model, sl.lattice, &detail, /*keep_attention=*/true);
    out << "sentence\t" << rec.id << "\t" << rec.source.to_utf8() << "\n";
    const auto& nodes = detail.nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        out << "node\t" << i << "\t" << (nodes[i].kind == SpanKind::Char ? "char" : "word")
            << "\t" << nodes[i].head << "\t" << nodes[i].tail << "\t" << nodes[i].text
            << "\n";
    int heads = ckpt.model.cfg.heads;
    out.precision(10);
    for (std::size_t m = 0; m < detail.attention.size(); ++m) {
        int layer = static_cast<int>(m) / heads;
        int head = static_cast<int>(m) % heads;
        const Tensor& a = detail.attention[m];
        for (int i = 0; i < a.rows; ++i) {
            out << "attn\t" << layer << "\t" << head << "\t" << i;
            for (int j = 0; j < a.cols; ++j) out << "\t" << a.at(i, j);
            out << "\n";
        }
        const Tensor& mk = detail.mask[m];
        for (int i = 0; i < mk.rows; ++i) {
            out << "mask\t" << layer << "\t" << head << "\t" << i;
            for (int j = 0; j < mk.cols; ++j) out << "\t" << mk.at(i, j);
            out << "\n";
        }
    }
    out << "\n";
}

// `surface<TAB>expansion` per line, '#' comments allowed.
inline std::vector<CharRule> load_rules(std::istream& in) {
    std::vector<CharRule> rules;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw FormatError("rules file line " + std::to_string(lineno) +
                              ": expected surface<TAB>expansion");
        CharRule rule;
        rule.surface = normalize_text(line.substr(0, tab));
        rule.expansion = normalize_text(line.substr(tab + 1));
        if (utf8_decode(rule.surface).size() != 1)
            throw FormatError("rules file line " + std::to_string(lineno) +
                              ": surface must be one symbol");
        rules.push_back(std::move(rule));
    }
    return rules;
}

}  // namespace translist
