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
// Order-k count language model over symbols with Witten-Bell interpolation
// down to a uniform floor; supplies the perplexity term of path scoring.
// Spaces in segmented text are scored as `_`; contexts are padded with a
// BOS sentinel that is never predicted.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "translist/errors.hpp"
#include "translist/labels.hpp"
#include "translist/symbols.hpp"

namespace translist {

class CharLM {
public:
    static constexpr char32_t kBos = 0xFFFFFFF0;  // outside Unicode range

    // Counts all orders <= k over the training texts (segmented,
    // space -> `_`). The prediction vocabulary is the set of observed
    // symbols; BOS appears only in contexts.
    static CharLM fit(const std::vector<std::string>& corpus, int order = 6) {
        if (order < 1) throw Error("CharLM: order must be >= 1");
        if (corpus.empty()) throw EmptyCorpus("CharLM: empty training corpus");
        CharLM lm;
        lm.order_ = order;
        bool any = false;
        for (const std::string& text : corpus) {
            std::vector<char32_t> syms = to_symbols(text);
            if (syms.empty()) continue;
            any = true;
            for (char32_t s : syms) lm.vocab_.insert(s);
            for (std::size_t t = 0; t < syms.size(); ++t) {
                for (int len = 0; len < order; ++len) {
                    std::vector<char32_t> ctx = context_at(syms, t, len);
                    auto& entry = lm.counts_[ctx];
                    ++entry.total;
                    ++entry.next[syms[t]];
                }
            }
        }
        if (!any) throw EmptyCorpus("CharLM: no usable training text");
        return lm;
    }

    int order() const { return order_; }
    std::size_t vocab_size() const { return vocab_.size(); }

    // Interpolated probability of `symbol` after `context` (most recent
    // symbol last). Recursion over shorter suffixes ends at 1/|V|.
    double prob(const std::vector<char32_t>& context, char32_t symbol) const {
        std::size_t keep = std::min(context.size(), static_cast<std::size_t>(order_ - 1));
        std::vector<char32_t> ctx(context.end() - static_cast<std::ptrdiff_t>(keep),
                                  context.end());
        return prob_rec(ctx, symbol);
    }

    double sequence_logprob(const std::string& text) const {
        std::vector<char32_t> syms = to_symbols(text);
        double lp = 0.0;
        std::vector<char32_t> history(static_cast<std::size_t>(order_ - 1), kBos);
        for (char32_t s : syms) {
            lp += std::log(prob(history, s));
            history.push_back(s);  // prob() only looks at the last order-1
        }
        return lp;
    }

    // exp(-logprob / length); 1 exactly when every step has probability 1.
    double perplexity(const std::string& text) const {
        std::vector<char32_t> syms = to_symbols(text);
        if (syms.empty()) throw Error("CharLM::perplexity: empty text");
        return std::exp(-sequence_logprob(text) / static_cast<double>(syms.size()));
    }

    // --- serialization (checkpoint section) ---

    void save(std::ostream& out) const {
        out << "order " << order_ << "\n";
        out << "vocab " << vocab_.size() << "\n";
        for (char32_t s : vocab_) out << static_cast<std::uint32_t>(s) << "\n";
        out << "contexts " << counts_.size() << "\n";
        for (const auto& [ctx, entry] : counts_) {
            out << ctx.size();
            for (char32_t s : ctx) out << ' ' << static_cast<std::uint32_t>(s);
            out << ' ' << entry.total << ' ' << entry.next.size();
            for (const auto& [sym, cnt] : entry.next)
                out << ' ' << static_cast<std::uint32_t>(sym) << ' ' << cnt;
            out << "\n";
        }
    }

    static CharLM load(std::istream& in) {
        CharLM lm;
        std::string tag;
        std::size_t n = 0;
        if (!(in >> tag >> lm.order_) || tag != "order")
            throw CheckpointError("CharLM section: bad order line");
        if (!(in >> tag >> n) || tag != "vocab")
            throw CheckpointError("CharLM section: bad vocab line");
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t s;
            in >> s;
            lm.vocab_.insert(static_cast<char32_t>(s));
        }
        if (!(in >> tag >> n) || tag != "contexts")
            throw CheckpointError("CharLM section: bad contexts line");
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t clen = 0, nnext = 0;
            if (!(in >> clen)) throw CheckpointError("CharLM section: truncated");
            std::vector<char32_t> ctx(clen);
            for (auto& s : ctx) {
                std::uint32_t v;
                in >> v;
                s = static_cast<char32_t>(v);
            }
            Entry entry;
            in >> entry.total >> nnext;
            for (std::size_t j = 0; j < nnext; ++j) {
                std::uint32_t sym;
                long cnt;
                in >> sym >> cnt;
                entry.next[static_cast<char32_t>(sym)] = cnt;
            }
            if (!in) throw CheckpointError("CharLM section: truncated");
            lm.counts_[ctx] = std::move(entry);
        }
        return lm;
    }

    bool operator==(const CharLM& o) const {
        return order_ == o.order_ && vocab_ == o.vocab_ && counts_ == o.counts_;
    }

private:
    struct Entry {
        long total = 0;
        std::map<char32_t, long> next;
        bool operator==(const Entry&) const = default;
    };

    static std::vector<char32_t> to_symbols(const std::string& text) {
        std::vector<char32_t> syms = utf8_decode(text);
        for (char32_t& s : syms)
            if (s == U' ') s = kBoundarySymbol;
        return syms;
    }

    static std::vector<char32_t> context_at(const std::vector<char32_t>& syms,
                                            std::size_t t, int len) {
        std::vector<char32_t> ctx;
        ctx.reserve(static_cast<std::size_t>(len));
        for (int back = len; back >= 1; --back) {
            std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(t) - back;
            ctx.push_back(idx < 0 ? kBos : syms[static_cast<std::size_t>(idx)]);
        }
        return ctx;
    }

    double prob_rec(const std::vector<char32_t>& ctx, char32_t symbol) const {
        if (ctx.empty()) {
            double lower = 1.0 / static_cast<double>(vocab_.size());
            auto it = counts_.find(ctx);
            if (it == counts_.end()) return lower;
            return wb(it->second, symbol, lower);
        }
        std::vector<char32_t> shorter(ctx.begin() + 1, ctx.end());
        double lower = prob_rec(shorter, symbol);
        auto it = counts_.find(ctx);
        if (it == counts_.end() || it->second.total == 0) return lower;
        return wb(it->second, symbol, lower);
    }

    // Witten-Bell: (c(ctx,s) + T(ctx) * p_lower) / (c(ctx) + T(ctx))
    static double wb(const Entry& entry, char32_t symbol, double lower) {
        auto it = entry.next.find(symbol);
        double c = it == entry.next.end() ? 0.0 : static_cast<double>(it->second);
        double types = static_cast<double>(entry.next.size());
        return (c + types * lower) / (static_cast<double>(entry.total) + types);
    }

    int order_ = 6;
    std::set<char32_t> vocab_;
    std::map<std::vector<char32_t>, Entry> counts_;
};

}  // namespace translist
