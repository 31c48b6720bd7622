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
// The lattice encoder: char+word node embeddings, pairwise span position
// encodings, soft-masked multi-head self-attention, feed-forward block and
// the per-character classification head.
//
// Soft-masked attention reweights the usual scaled-dot-product scores with
// a mask in [0,1] derived from span geometry:
//
//   alpha_ij = M_ij exp(e_ij) / sum_k M_ik exp(e_ik)
//   M_ij     = squash( (x_i Wq)(s_ij Wr)^T / sqrt(d) )
//   s_ij     = ReLU( w_s * [p_hh ++ p_ht ++ p_th ++ p_tt] )
//
// where the p_* are sinusoidal encodings of the four signed head/tail
// distances between nodes i and j. The squash is a logistic by default
// (the raw dot product is unbounded); `RawClamped` uses max(0, raw)
// instead, and `Off` disables masking entirely (vanilla attention).

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "translist/labels.hpp"
#include "translist/lattice.hpp"
#include "translist/tensor.hpp"

namespace translist {

enum class MaskMode { Logistic, RawClamped, Off };

struct EncoderConfig {
    int d_model = 128;  // node embedding size
    int d_head = 128;   // per-head projection size, divisible by 4
    int heads = 4;
    int layers = 1;
    int d_ff = 384;
    double dropout = 0.3;
    int d_max = 512;  // span distances clamp to [-d_max, d_max]
    MaskMode mask_mode = MaskMode::Logistic;

    void validate() const {
        if (d_model < 1 || d_head < 1 || heads < 1 || layers < 1 || d_ff < 1)
            throw ConfigError("encoder dimensions must be positive");
        if (d_head % 4 != 0) throw ConfigError("d_head must be divisible by 4");
        if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0,1)");
        if (d_max < 1) throw ConfigError("d_max must be positive");
    }
};

struct SpanDistances {
    long hh = 0;  // head[i] - head[j]
    long ht = 0;  // head[i] - tail[j]
    long th = 0;  // tail[i] - head[j]
    long tt = 0;  // tail[i] - tail[j]
};

inline SpanDistances span_distances(const Span& i, const Span& j) {
    auto d = [](std::size_t a, std::size_t b) {
        return static_cast<long>(a) - static_cast<long>(b);
    };
    return {d(i.head, j.head), d(i.head, j.tail), d(i.tail, j.head), d(i.tail, j.tail)};
}

namespace detail {

// Sinusoid position vector of size `dim` for a signed distance.
inline void sinusoid_into(double distance, int dim, double* out) {
    for (int u = 0; u < dim; ++u) {
        double exponent = static_cast<double>(u - (u % 2)) / static_cast<double>(dim);
        double angle = distance / std::pow(10000.0, exponent);
        out[u] = (u % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
}

}  // namespace detail

// The concatenated sinusoid block [p_hh ++ p_ht ++ p_th ++ p_tt] of one
// node pair's distances, clamped to [-d_max, d_max].
inline void span_sinusoid_row(const SpanDistances& d, int d_head, int d_max, double* row) {
    int quarter = d_head / 4;
    auto clamp = [d_max](long v) {
        return static_cast<double>(
            std::clamp(v, -static_cast<long>(d_max), static_cast<long>(d_max)));
    };
    detail::sinusoid_into(clamp(d.hh), quarter, row);
    detail::sinusoid_into(clamp(d.ht), quarter, row + quarter);
    detail::sinusoid_into(clamp(d.th), quarter, row + 2 * quarter);
    detail::sinusoid_into(clamp(d.tt), quarter, row + 3 * quarter);
}

// All ordered node pairs, flattened to (n*n) x d_head; row i*n+j is (i,j).
// Self-pairs use all-zero distances (a word's own ht/th offsets carry no
// cross-node information).
inline Tensor span_sinusoid_table(const std::vector<Span>& nodes, int d_head, int d_max) {
    int n = static_cast<int>(nodes.size());
    Tensor table(n * n, d_head);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            SpanDistances d = i == j ? SpanDistances{} : span_distances(nodes[i], nodes[j]);
            span_sinusoid_row(d, d_head, d_max,
                              &table.data[(static_cast<std::size_t>(i) * n + j) * d_head]);
        }
    return table;
}

// Vocabulary over node symbols / word texts, id 0 reserved for UNK.
struct TokenVocab {
    std::map<std::string, int> index;
    std::vector<std::string> tokens{"<unk>"};

    int add(const std::string& token) {
        auto [it, inserted] = index.try_emplace(token, static_cast<int>(tokens.size()));
        if (inserted) tokens.push_back(token);
        return it->second;
    }
    int id_of(const std::string& token) const {
        auto it = index.find(token);
        return it == index.end() ? 0 : it->second;
    }
    int size() const { return static_cast<int>(tokens.size()); }

    static TokenVocab from_tokens(const std::vector<std::string>& list) {
        TokenVocab v;
        for (const std::string& t : list)
            if (t != "<unk>") v.add(t);
        return v;
    }
};

class ModelParams {
public:
    EncoderConfig cfg;
    TokenVocab char_vocab;
    TokenVocab word_vocab;
    int label_count = 0;

    ModelParams() = default;

    // Fresh parameters: uniform inits for projections and embeddings,
    // zero for biases and the classification head, ones for norm gains.
    static ModelParams init(const EncoderConfig& cfg, TokenVocab chars, TokenVocab words,
                            int label_count, std::mt19937_64& rng) {
        cfg.validate();
        if (label_count < 2) throw ConfigError("label vocabulary too small");
        ModelParams mp;
        mp.cfg = cfg;
        mp.char_vocab = std::move(chars);
        mp.word_vocab = std::move(words);
        mp.label_count = label_count;

        auto uniform = [&rng](int r, int c, double a) {
            Tensor t(r, c);
            std::uniform_real_distribution<double> dist(-a, a);
            for (double& v : t.data) v = dist(rng);
            return t;
        };
        auto xavier = [&](int r, int c) {
            return uniform(r, c, std::sqrt(6.0 / static_cast<double>(r + c)));
        };
        double emb_a = std::sqrt(3.0 / static_cast<double>(cfg.d_model));

        mp.add("char_emb", uniform(mp.char_vocab.size(), cfg.d_model, emb_a));
        mp.add("word_emb", uniform(mp.word_vocab.size(), cfg.d_model, emb_a));
        mp.add("w_s", Tensor::scalar(1.0));
        for (int l = 0; l < cfg.layers; ++l) {
            std::string lp = "layer" + std::to_string(l) + ".";
            for (int h = 0; h < cfg.heads; ++h) {
                std::string hp = lp + "head" + std::to_string(h) + ".";
                mp.add(hp + "wq", xavier(cfg.d_model, cfg.d_head));
                mp.add(hp + "wk", xavier(cfg.d_model, cfg.d_head));
                mp.add(hp + "wv", xavier(cfg.d_model, cfg.d_head));
                mp.add(hp + "wr", xavier(cfg.d_head, cfg.d_head));
            }
            mp.add(lp + "wo", xavier(cfg.heads * cfg.d_head, cfg.d_model));
            mp.add(lp + "ln1_g", Tensor(1, cfg.d_model, 1.0));
            mp.add(lp + "ln1_b", Tensor(1, cfg.d_model, 0.0));
            mp.add(lp + "ff_w1", xavier(cfg.d_model, cfg.d_ff));
            mp.add(lp + "ff_b1", Tensor(1, cfg.d_ff, 0.0));
            mp.add(lp + "ff_w2", xavier(cfg.d_ff, cfg.d_model));
            mp.add(lp + "ff_b2", Tensor(1, cfg.d_model, 0.0));
            mp.add(lp + "ln2_g", Tensor(1, cfg.d_model, 1.0));
            mp.add(lp + "ln2_b", Tensor(1, cfg.d_model, 0.0));
        }
        mp.add("cls_w", Tensor(cfg.d_model, label_count, 0.0));
        mp.add("cls_b", Tensor(1, label_count, 0.0));
        return mp;
    }

    Param& param(const std::string& name) {
        auto it = index_.find(name);
        if (it == index_.end()) throw Error("unknown parameter '" + name + "'");
        return params_[static_cast<std::size_t>(it->second)];
    }
    const Param& param(const std::string& name) const {
        return const_cast<ModelParams*>(this)->param(name);
    }

    std::vector<Param*> all_params() {
        std::vector<Param*> out;
        out.reserve(params_.size());
        for (Param& p : params_) out.push_back(&p);
        return out;
    }

    template <typename Fn>
    void for_each_param(Fn&& fn) const {
        for (const Param& p : params_) fn(p);
    }

    // Used by checkpoint loading, which recreates parameters in file order.
    void add(const std::string& name, Tensor value) {
        index_[name] = static_cast<int>(params_.size());
        params_.emplace_back(name, std::move(value));
    }
    bool has(const std::string& name) const { return index_.count(name) > 0; }

private:
    std::vector<Param> params_;
    std::map<std::string, int> index_;
};

// One parameter bound onto a tape; harvest() pulls tape gradients back
// into the parameter's accumulator after backward().
struct TapeBinding {
    std::vector<std::pair<Param*, VarId>> bound;

    VarId bind(Tape& tape, Param& p) {
        VarId id = tape.leaf(p.value, true);
        bound.emplace_back(&p, id);
        return id;
    }
    void harvest(Tape& tape) {
        for (auto& [p, id] : bound) {
            const Tensor& g = tape.grad(id);
            if (g.size() == 0) continue;
            for (std::size_t i = 0; i < g.size(); ++i) p->grad.data[i] += g.data[i];
        }
    }
};

struct EncodeOptions {
    bool train = false;
    bool keep_attention = false;
};

struct EncodedBatch {
    std::vector<Span> nodes;  // chars first, then words
    int num_chars = 0;
    VarId logits = -1;                     // num_chars x label_count, on the tape
    std::vector<Tensor> attention;         // per layer*head, n x n (keep_attention)
    std::vector<Tensor> mask;              // per layer*head (keep_attention)
    int mask_fallbacks = 0;
};

// Runs the network over a lattice on the caller's tape. `binding` receives
// every parameter leaf so training can harvest gradients; rng is consumed
// only when opts.train and dropout > 0.
inline EncodedBatch encoder_forward(Tape& tape, TapeBinding& binding, ModelParams& mp,
                                    const Lattice& lattice, const EncodeOptions& opts,
                                    std::mt19937_64& rng) {
    const EncoderConfig& cfg = mp.cfg;
    EncodedBatch out;
    out.nodes = lattice.nodes();
    out.num_chars = static_cast<int>(lattice.chars.size());
    int n = static_cast<int>(out.nodes.size());
    if (n == 0) throw Error("encoder_forward: empty lattice");

    std::vector<int> char_ids, word_ids;
    for (const Span& s : lattice.chars) char_ids.push_back(mp.char_vocab.id_of(s.text));
    for (const Span& s : lattice.words) word_ids.push_back(mp.word_vocab.id_of(s.text));

    VarId char_table = binding.bind(tape, mp.param("char_emb"));
    VarId x = tape.embedding_rows(char_table, char_ids);
    if (!word_ids.empty()) {
        VarId word_table = binding.bind(tape, mp.param("word_emb"));
        VarId xw = tape.embedding_rows(word_table, word_ids);
        x = tape.concat_rows({x, xw});
    }
    bool use_dropout = opts.train && cfg.dropout > 0.0;
    if (use_dropout) x = tape.dropout(x, cfg.dropout, rng);

    // Pairwise span encoding, shared across layers and heads.
    VarId s_enc = -1;
    if (cfg.mask_mode != MaskMode::Off) {
        VarId table = tape.constant(span_sinusoid_table(out.nodes, cfg.d_head, cfg.d_max));
        VarId w_s = binding.bind(tape, mp.param("w_s"));
        s_enc = tape.relu(tape.scale_by(table, w_s));
    }

    double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(cfg.d_head));
    for (int l = 0; l < cfg.layers; ++l) {
        std::string lp = "layer" + std::to_string(l) + ".";
        std::vector<VarId> head_outputs;
        for (int h = 0; h < cfg.heads; ++h) {
            std::string hp = lp + "head" + std::to_string(h) + ".";
            VarId q = tape.matmul(x, binding.bind(tape, mp.param(hp + "wq")));
            VarId k = tape.matmul(x, binding.bind(tape, mp.param(hp + "wk")));
            VarId v = tape.matmul(x, binding.bind(tape, mp.param(hp + "wv")));
            VarId e = tape.scale(tape.matmul(q, tape.transpose(k)), inv_sqrt_d);
            VarId alpha;
            VarId mask = -1;
            if (cfg.mask_mode == MaskMode::Off) {
                alpha = tape.softmax_rows(e);
            } else {
                VarId swr = tape.matmul(s_enc, binding.bind(tape, mp.param(hp + "wr")));
                VarId raw = tape.pair_dot(q, swr, inv_sqrt_d);
                mask = cfg.mask_mode == MaskMode::Logistic ? tape.logistic(raw)
                                                           : tape.relu(raw);
                alpha = tape.masked_softmax_rows(e, mask);
            }
            if (opts.keep_attention) {
                out.attention.push_back(tape.value(alpha));
                out.mask.push_back(mask >= 0 ? tape.value(mask) : Tensor());
            }
            head_outputs.push_back(tape.matmul(alpha, v));
        }
        VarId z = head_outputs.size() == 1 ? head_outputs[0]
                                           : tape.concat_cols(head_outputs);
        VarId attn = tape.matmul(z, binding.bind(tape, mp.param(lp + "wo")));
        if (use_dropout) attn = tape.dropout(attn, cfg.dropout, rng);
        x = tape.layer_norm(tape.add(x, attn), binding.bind(tape, mp.param(lp + "ln1_g")),
                            binding.bind(tape, mp.param(lp + "ln1_b")));
        VarId ff = tape.relu(
            tape.add_rowvec(tape.matmul(x, binding.bind(tape, mp.param(lp + "ff_w1"))),
                            binding.bind(tape, mp.param(lp + "ff_b1"))));
        ff = tape.add_rowvec(tape.matmul(ff, binding.bind(tape, mp.param(lp + "ff_w2"))),
                             binding.bind(tape, mp.param(lp + "ff_b2")));
        x = tape.layer_norm(tape.add(x, ff), binding.bind(tape, mp.param(lp + "ln2_g")),
                            binding.bind(tape, mp.param(lp + "ln2_b")));
    }

    VarId chars_only = tape.slice_rows(x, 0, out.num_chars);
    out.logits = tape.add_rowvec(tape.matmul(chars_only, binding.bind(tape, mp.param("cls_w"))),
                                 binding.bind(tape, mp.param("cls_b")));
    out.mask_fallbacks = tape.mask_fallbacks();
    return out;
}

// Inference helper: frozen forward, returns the logits tensor.
inline Tensor encode_logits(ModelParams& mp, const Lattice& lattice,
                            EncodedBatch* detail_out = nullptr,
                            bool keep_attention = false) {
    Tape tape;
    TapeBinding binding;
    std::mt19937_64 rng(0);  // unused: no dropout outside training
    EncodeOptions opts;
    opts.keep_attention = keep_attention;
    EncodedBatch enc = encoder_forward(tape, binding, mp, lattice, opts, rng);
    Tensor logits = tape.value(enc.logits);
    if (detail_out) {
        *detail_out = enc;
        detail_out->logits = -1;  // tape-local id would dangle
    }
    return logits;
}

inline int argmax_row(const Tensor& t, int row) {
    int best = 0;
    for (int j = 1; j < t.cols; ++j)
        if (t.at(row, j) > t.at(row, best)) best = j;
    return best;
}

inline std::vector<double> log_softmax_row(const Tensor& t, int row) {
    double mx = t.at(row, 0);
    for (int j = 1; j < t.cols; ++j) mx = std::max(mx, t.at(row, j));
    double sum = 0.0;
    for (int j = 0; j < t.cols; ++j) sum += std::exp(t.at(row, j) - mx);
    double lse = mx + std::log(sum);
    std::vector<double> out(static_cast<std::size_t>(t.cols));
    for (int j = 0; j < t.cols; ++j) out[static_cast<std::size_t>(j)] = t.at(row, j) - lse;
    return out;
}

struct TrainSentence {
    Lattice lattice;
    LabelSequence labels;  // one id per char node
};

// One optimizer step over a batch: mean cross-entropy over every char
// position in the batch, gradient accumulation across sentences, then a
// single adaptive-moment update.
inline double train_step(ModelParams& mp, const std::vector<TrainSentence>& batch,
                         const AdamConfig& adam, long& step, std::mt19937_64& rng) {
    std::size_t total_chars = 0;
    for (const TrainSentence& s : batch) total_chars += s.labels.size();
    if (total_chars == 0) throw Error("train_step: empty batch");

    double loss_sum = 0.0;
    for (const TrainSentence& s : batch) {
        Tape tape;
        TapeBinding binding;
        EncodeOptions opts;
        opts.train = true;
        EncodedBatch enc = encoder_forward(tape, binding, mp, s.lattice, opts, rng);
        if (static_cast<int>(s.labels.size()) != enc.num_chars)
            throw Error("train_step: label/char count mismatch");
        VarId ce = tape.cross_entropy_sum(enc.logits, s.labels);
        loss_sum += tape.value(ce).data[0];
        tape.backward(ce, 1.0 / static_cast<double>(total_chars));
        binding.harvest(tape);
    }
    std::vector<Param*> params = mp.all_params();
    adam_step(params, adam, step);
    return loss_sum / static_cast<double>(total_chars);
}

}  // namespace translist
