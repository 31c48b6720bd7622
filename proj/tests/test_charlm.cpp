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

#include <cmath>
#include <random>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "translist/charlm.hpp"

using namespace translist;

TEST_CASE("single-symbol corpus is a probability-one model") {
    CharLM lm = CharLM::fit({"aaaa"}, 6);
    CHECK(lm.vocab_size() == 1);
    CHECK(lm.prob({U'a', U'a'}, U'a') == Catch::Approx(1.0).margin(1e-15));
    CHECK(lm.sequence_logprob("aaaa") == Catch::Approx(0.0).margin(1e-12));
    CHECK(lm.perplexity("aaaaaaaa") == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("fit is deterministic") {
    std::vector<std::string> corpus = {"ab ba", "aab", "b ab"};
    std::ostringstream a, b;
    CharLM::fit(corpus, 4).save(a);
    CharLM::fit(corpus, 4).save(b);
    CHECK(a.str() == b.str());
}

TEST_CASE("alternating corpus drives the conditional toward certainty") {
    std::string text;
    for (int i = 0; i < 500; ++i) text += "ab";
    CharLM lm = CharLM::fit({text}, 3);
    // p(b|a) = (c + T * lower) / (c + T) with c = 500 and one continuation type
    double p = lm.prob({U'a'}, U'b');
    CHECK(p > 0.99);
    CHECK(p < 1.0);
    // and the complementary probability is small but positive
    CHECK(lm.prob({U'a'}, U'a') > 0.0);
    CHECK(lm.prob({U'a'}, U'a') < 0.01);
}

TEST_CASE("sequence_logprob matches hand-built Witten-Bell arithmetic") {
    // corpus "aab", order 2, vocabulary {a, b}
    CharLM lm = CharLM::fit({"aab"}, 2);
    // unigram level: total 3, types 2, lower = 1/2:
    //   p1(a) = (2 + 2*0.5) / (3 + 2) = 0.6
    //   p1(b) = (1 + 2*0.5) / (3 + 2) = 0.4
    // bigram contexts:
    //   ctx BOS: total 1, types {a}: p(a|BOS) = (1 + 1*0.6) / (1 + 1) = 0.8
    //   ctx a: total 2, types {a, b}:
    //     p(a|a) = (1 + 2*0.6) / (2 + 2) = 0.55
    //     p(b|a) = (1 + 2*0.4) / (2 + 2) = 0.45
    CHECK(lm.prob({}, U'a') == Catch::Approx(0.6).margin(1e-12));
    CHECK(lm.prob({}, U'b') == Catch::Approx(0.4).margin(1e-12));
    CHECK(lm.prob({U'a'}, U'a') == Catch::Approx(0.55).margin(1e-12));
    CHECK(lm.prob({U'a'}, U'b') == Catch::Approx(0.45).margin(1e-12));
    double expected = std::log(0.8) + std::log(0.55) + std::log(0.45);
    CHECK(lm.sequence_logprob("aab") == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("per-context distributions sum to one") {
    std::vector<std::string> corpus = {"ab ba ab", "baab a", "abba"};
    CharLM lm = CharLM::fit(corpus, 4);
    std::vector<char32_t> symbols = {U'a', U'b', kBoundarySymbol};
    std::vector<std::vector<char32_t>> contexts = {
        {}, {U'a'}, {U'b'}, {kBoundarySymbol}, {U'a', U'b'}, {U'b', U'a', U'a'},
        {CharLM::kBos, CharLM::kBos, U'a'}, {U'x'}};
    for (const auto& ctx : contexts) {
        double sum = 0.0;
        for (char32_t s : symbols) sum += lm.prob(ctx, s);
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("probabilities stay within (0, 1]") {
    CharLM lm = CharLM::fit({"ab ba", "bb aa"}, 3);
    for (char32_t s : {U'a', U'b', U'z', kBoundarySymbol}) {
        double p = lm.prob({U'a', U'b'}, s);
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("uniform model perplexity equals the alphabet size") {
    // four symbols drawn iid; a large sample scores close to ln 4
    std::mt19937_64 rng(2024);
    const std::string alphabet = "abcd";
    auto draw = [&](std::size_t len) {
        std::string s;
        for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % 4];
        return s;
    };
    std::vector<std::string> corpus;
    for (int i = 0; i < 50; ++i) corpus.push_back(draw(2000));
    CharLM lm = CharLM::fit(corpus, 3);
    CHECK(lm.perplexity(draw(10000)) == Catch::Approx(4.0).margin(0.1));
}

TEST_CASE("uniform floor catches unseen symbols") {
    CharLM lm = CharLM::fit({"abab"}, 2);
    double p = lm.prob({U'a'}, U'z');
    CHECK(p > 0.0);
    CHECK(p < 0.5);
    CHECK(std::isfinite(lm.sequence_logprob("zzz")));
}

TEST_CASE("appending a certain symbol does not raise perplexity") {
    std::string text;
    for (int i = 0; i < 200; ++i) text += "ab";
    CharLM lm = CharLM::fit({text}, 3);
    // after "...ab", 'a' is near-certain: adding it lowers mean surprisal
    double before = lm.perplexity("abab");
    double after = lm.perplexity("ababa");
    CHECK(after <= before + 1e-12);
}

TEST_CASE("spaces are scored as the boundary symbol") {
    CharLM lm = CharLM::fit({"a b", "a b"}, 3);
    CHECK(lm.sequence_logprob("a b") == lm.sequence_logprob("a_b"));
}

TEST_CASE("serialization round-trips exactly") {
    CharLM lm = CharLM::fit({"śvetaḥ dhāvati", "aśva iti"}, 5);
    std::ostringstream out;
    lm.save(out);
    std::istringstream in(out.str());
    CharLM again = CharLM::load(in);
    CHECK(again == lm);
    CHECK(again.sequence_logprob("aśva") == lm.sequence_logprob("aśva"));
}

TEST_CASE("empty corpus is rejected") {
    CHECK_THROWS_AS(CharLM::fit({}, 3), EmptyCorpus);
    CHECK_THROWS_AS(CharLM::fit({""}, 3), EmptyCorpus);
}
