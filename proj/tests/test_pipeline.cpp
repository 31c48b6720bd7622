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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "support/toy_corpus.hpp"
#include "translist/translist.hpp"

using namespace translist;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_run_config() {
    RunConfig cfg;
    cfg.lattice = LatticeSource::Candidates;
    cfg.candidate_file = "(in-memory)";
    cfg.d_model = 16;
    cfg.d_head = 8;
    cfg.heads = 2;
    cfg.layers = 1;
    cfg.d_ff = 32;
    cfg.dropout = 0.1;
    cfg.lr = 0.003;
    cfg.epochs = 3;
    cfg.seed = 11;
    cfg.charlm_order = 4;
    return cfg;
}

toy::ToyCorpus small_corpus(std::size_t n, std::uint64_t seed) {
    toy::ToyOptions opt;
    opt.sentences = n;
    opt.lexicon_size = 8;
    opt.seed = seed;
    return toy::make_toy_corpus(opt);
}

LatticeResources resources_for(const toy::ToyCorpus& corpus) {
    LatticeResources res;
    res.candidates = corpus.candidates;
    return res;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("config files parse with overrides and reject unknown keys") {
    RunConfig cfg;
    std::istringstream in(
        "# comment\n"
        "lattice = candidates+ngrams\n"
        "n_max = 3\n"
        "dropout = 0.25\n"
        "prcp = prob\n"
        "mask = raw-clamped\n"
        "juncture_overlap = off\n"
        "candidate_file = cands.txt\n");
    parse_config_stream(cfg, in);
    CHECK(cfg.lattice == LatticeSource::CandidatesPlusNgrams);
    CHECK(cfg.n_max == 3);
    CHECK(cfg.dropout == 0.25);
    CHECK(cfg.prcp == PrcpMode::Prob);
    CHECK(cfg.mask == MaskMode::RawClamped);
    CHECK_FALSE(cfg.juncture_overlap);

    apply_config_entry(cfg, "epochs", "7");
    CHECK(cfg.epochs == 7);

    std::istringstream bad("no_such_key = 1\n");
    CHECK_THROWS_AS(parse_config_stream(cfg, bad), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "epochs", "x"), ConfigError);
}

TEST_CASE("config snapshots round-trip through text") {
    RunConfig cfg = tiny_run_config();
    cfg.prcp = PrcpMode::Raw;
    cfg.metric_f = MacroFMode::HarmonicOfPR;
    std::ostringstream out;
    write_config(cfg, out);
    RunConfig back;
    std::istringstream in(out.str());
    parse_config_stream(back, in);
    std::ostringstream out2;
    write_config(back, out2);
    CHECK(out.str() == out2.str());
}

TEST_CASE("config validation rejects inconsistent settings") {
    RunConfig cfg;
    cfg.lattice = LatticeSource::Vocab;  // no vocab_file
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig();
    cfg.d_head = 6;  // not divisible by 4
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig();
    cfg.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("candidate fallback to n-grams is reported") {
    toy::ToyCorpus corpus = small_corpus(3, 21);
    RunConfig cfg = tiny_run_config();
    LatticeResources res;  // empty: every id is missing
    std::ostringstream log;
    SentenceLattice sl = build_sentence_lattice(corpus.records[0], cfg, res, &log);
    CHECK(sl.candidates_missing);
    CHECK_FALSE(sl.lattice.words.empty());  // n-gram fallback
    CHECK(log.str().find("falling back") != std::string::npos);
}

TEST_CASE("train_model requires gold and enough alignable sentences") {
    toy::ToyCorpus corpus = small_corpus(3, 23);
    corpus.records[0].gold.reset();
    RunConfig cfg = tiny_run_config();
    cfg.epochs = 0;
    CHECK_THROWS_AS(train_model(corpus.records, cfg, resources_for(corpus)), EmptyCorpus);
}

TEST_CASE("epochs zero trains nothing but produces a usable checkpoint") {
    toy::ToyCorpus corpus = small_corpus(4, 25);
    RunConfig cfg = tiny_run_config();
    cfg.epochs = 0;
    TrainStats stats;
    Checkpoint ckpt = train_model(corpus.records, cfg, resources_for(corpus), &stats);
    CHECK(stats.epoch_loss.empty());
    CHECK(stats.skipped == 0);
    // the untrained head ties everywhere; segmentation must still run
    // deterministically (argmax resolves to the epsilon label)
    SegmentOutcome a = segment_sentence(ckpt, corpus.records[0], resources_for(corpus));
    SegmentOutcome b = segment_sentence(ckpt, corpus.records[0], resources_for(corpus));
    CHECK(a.text == b.text);
}

TEST_CASE("training loss decreases epoch over epoch on the toy corpus") {
    toy::ToyCorpus corpus = small_corpus(8, 27);
    RunConfig cfg = tiny_run_config();
    cfg.epochs = 4;
    cfg.dropout = 0.0;
    TrainStats stats;
    Checkpoint ckpt = train_model(corpus.records, cfg, resources_for(corpus), &stats);
    REQUIRE(stats.epoch_loss.size() == 4);
    CHECK(stats.epoch_loss.back() < stats.epoch_loss.front());
    EvalReport rep = evaluate_corpus(ckpt, corpus.records, resources_for(corpus), nullptr,
                                     {});
    CHECK(rep.macro_f > 0.0);
}

TEST_CASE("checkpoints round-trip bit-for-bit") {
    toy::ToyCorpus corpus = small_corpus(5, 29);
    RunConfig cfg = tiny_run_config();
    cfg.epochs = 2;
    Checkpoint ckpt = train_model(corpus.records, cfg, resources_for(corpus));

    fs::path dir = fs::path("tmp_pipeline");
    fs::create_directories(dir);
    save_checkpoint_file(ckpt, (dir / "a.tlst").string());
    Checkpoint loaded = load_checkpoint_file((dir / "a.tlst").string());
    save_checkpoint_file(loaded, (dir / "b.tlst").string());
    CHECK(slurp(dir / "a.tlst") == slurp(dir / "b.tlst"));

    // loaded checkpoints segment identically across loads
    Checkpoint loaded2 = load_checkpoint_file((dir / "a.tlst").string());
    LatticeResources res = resources_for(corpus);
    for (const SentenceRecord& rec : corpus.records) {
        SegmentOutcome s1 = segment_sentence(loaded, rec, res);
        SegmentOutcome s2 = segment_sentence(loaded2, rec, res);
        CHECK(s1.text == s2.text);
    }
}

TEST_CASE("segmentation is deterministic for a frozen checkpoint") {
    toy::ToyCorpus corpus = small_corpus(5, 31);
    RunConfig cfg = tiny_run_config();
    cfg.epochs = 1;
    Checkpoint ckpt = train_model(corpus.records, cfg, resources_for(corpus));
    LatticeResources res = resources_for(corpus);
    auto a = segment_corpus(ckpt, corpus.records, res);
    auto b = segment_corpus(ckpt, corpus.records, res);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].text == b[i].text);
}

TEST_CASE("two training runs with one seed are bit-identical") {
    toy::ToyCorpus corpus = small_corpus(4, 33);
    RunConfig cfg = tiny_run_config();
    cfg.epochs = 2;
    fs::path dir = fs::path("tmp_pipeline");
    fs::create_directories(dir);
    Checkpoint a = train_model(corpus.records, cfg, resources_for(corpus));
    Checkpoint b = train_model(corpus.records, cfg, resources_for(corpus));
    save_checkpoint_file(a, (dir / "runa.tlst").string());
    save_checkpoint_file(b, (dir / "runb.tlst").string());
    CHECK(slurp(dir / "runa.tlst") == slurp(dir / "runb.tlst"));
}

TEST_CASE("ablations run through the evaluation path") {
    toy::ToyCorpus corpus = small_corpus(4, 35);
    RunConfig cfg = tiny_run_config();
    cfg.epochs = 1;
    Checkpoint ckpt = train_model(corpus.records, cfg, resources_for(corpus));
    LatticeResources res = resources_for(corpus);

    SegmentOptions chars_only;
    chars_only.chars_only = true;
    EvalReport no_list = evaluate_corpus(ckpt, corpus.records, res, nullptr, chars_only);
    CHECK(no_list.sentences.size() == corpus.records.size());

    Checkpoint no_sma = ckpt;
    no_sma.model.cfg.mask_mode = MaskMode::Off;
    EvalReport rep = evaluate_corpus(no_sma, corpus.records, res, nullptr, {});
    CHECK(rep.sentences.size() == corpus.records.size());
}

TEST_CASE("attention inspection emits the fixed column format") {
    toy::ToyCorpus corpus = small_corpus(2, 37);
    RunConfig cfg = tiny_run_config();
    cfg.epochs = 0;
    Checkpoint ckpt = train_model(corpus.records, cfg, resources_for(corpus));
    std::ostringstream dump;
    inspect_sentence(ckpt, corpus.records[0], resources_for(corpus), dump);
    std::istringstream lines(dump.str());
    std::string line;
    std::size_t nodes = 0, attn_rows = 0, mask_rows = 0;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("node\t", 0) == 0) ++nodes;
        if (line.rfind("attn\t", 0) == 0) {
            ++attn_rows;
            // rows of the attention matrix sum to one
            std::istringstream f(line);
            std::string tag;
            int layer, head, row;
            f >> tag >> layer >> head >> row;
            double v, sum = 0.0;
            while (f >> v) sum += v;
            CHECK(sum == Catch::Approx(1.0).margin(1e-9));
        }
        if (line.rfind("mask\t", 0) == 0) ++mask_rows;
    }
    n = corpus.records[0].source.size();
    CHECK(nodes >= n);
    CHECK(attn_rows == nodes * 2);  // 2 heads, 1 layer
    CHECK(mask_rows == attn_rows);
}

TEST_CASE("sandhi-merged sentence segments back to its gold split") {
    // train on a tiny corpus containing the merged sentence and segment it
    // through its candidate record
    std::vector<SentenceRecord> corpus = {
        parse_corpus_line("f1\tśvetodhāvati\tśvetaḥ dhāvati"),
        parse_corpus_line("f2\tgacchati\tgacchati"),
        parse_corpus_line("f3\tsāsti\tsā asti"),
        parse_corpus_line("f4\taśvo dhāvati\taśvaḥ dhāvati"),
        parse_corpus_line("f5\tkimetat\tkim etat"),
    };
    LatticeResources res;
    {
        std::istringstream cands(
            "#f1\nśvetaḥ\t0\t4\ndhāvati\t5\t11\n\n"
            "#f2\ngacchati\t0\t7\n\n"
            "#f3\nsā\t0\t1\nasti\t1\t4\n\n"
            "#f4\naśvaḥ\t0\t3\ndhāvati\t4\t10\n\n"
            "#f5\nkim\t0\t2\netat\t3\t6\n\n");
        res.candidates = load_candidate_file(cands);
    }
    RunConfig cfg = tiny_run_config();
    cfg.epochs = 150;
    cfg.dropout = 0.0;
    cfg.lr = 0.005;
    Checkpoint ckpt = train_model(corpus, cfg, res);
    SegmentOutcome seg = segment_sentence(ckpt, corpus[0], res);
    CHECK(seg.text == "śvetaḥ dhāvati");
}

TEST_CASE("prcp off and prob modes diverge on a corrupted prediction") {
    // the candidate record for one sentence offers an alternative split and
    // omits the words the model actually predicts, so the prediction is
    // corrupted with respect to that candidate space: prob mode rewrites
    // the chunk, off mode keeps it
    toy::ToyCorpus corpus = small_corpus(8, 43);
    RunConfig cfg = tiny_run_config();
    cfg.epochs = 30;
    cfg.dropout = 0.0;
    cfg.lr = 0.005;
    LatticeResources res = resources_for(corpus);
    Checkpoint ckpt = train_model(corpus.records, cfg, res);

    // pick a sentence the model segments into >= 1 word, then build a
    // candidate space of n-gram pieces that excludes those words
    const SentenceRecord& victim = corpus.records[0];
    SegmentOutcome base = segment_sentence(ckpt, victim, res);

    LatticeResources twisted = res;
    CandidateRecord alt;
    alt.id = victim.id;
    auto chunks = victim.source.chunks();
    for (auto [start, end] : chunks) {
        // cover each chunk by two-symbol pieces plus a final piece; none of
        // these equals a full predicted word of length != 2
        std::size_t pos = start;
        while (pos < end) {
            std::size_t tail = std::min(end - 1, pos + 1);
            alt.nodes.push_back({victim.source.substr_utf8(pos, tail),
                                 static_cast<long>(pos), static_cast<long>(tail)});
            pos = tail + 1;
        }
    }
    twisted.candidates[victim.id] = alt;

    SegmentOptions off, prob;
    off.prcp_override = PrcpMode::Off;
    prob.prcp_override = PrcpMode::Prob;
    std::ostringstream log;
    SegmentOutcome seg_off = segment_sentence(ckpt, victim, twisted, nullptr, off);
    SegmentOutcome seg_prob = segment_sentence(ckpt, victim, twisted, &log, prob);

    CHECK(seg_off.rectified.empty());
    REQUIRE_FALSE(seg_prob.rectified.empty());
    CHECK(seg_off.text != seg_prob.text);
    CHECK(log.str().find("prcp:") != std::string::npos);

    // post-rectification, every chunk word is inside the candidate space
    std::set<std::string> cand_texts;
    for (const CandidateNode& n : alt.nodes) cand_texts.insert(n.text);
    for (const ChunkLog& cl : seg_prob.rectified)
        CHECK_FALSE(detect_corrupted(decoded_words(cl.chosen), cand_texts));
}

TEST_CASE("rules files load and reject malformed lines") {
    std::istringstream good("# sandhi rules for surface ā\nā\ta_a\nā\tā_a\n");
    std::vector<CharRule> rules = load_rules(good);
    REQUIRE(rules.size() == 2);
    CHECK(rules[0].surface == "ā");
    CHECK(rules[0].expansion == "a_a");

    std::istringstream bad("āā\ta_a\n");
    CHECK_THROWS_AS(load_rules(bad), FormatError);
    std::istringstream bad2("no-tab-here\n");
    CHECK_THROWS_AS(load_rules(bad2), FormatError);
}

#ifdef TRANSLIST_CLI
TEST_CASE("command line round trip: train, segment, eval, inspect") {
    toy::ToyCorpus corpus = small_corpus(6, 41);
    fs::path dir = fs::path("tmp_cli");
    fs::create_directories(dir);

    {
        std::ofstream train(dir / "train.tsv");
        for (const SentenceRecord& rec : corpus.records)
            train << serialize_record(rec) << "\n";
        std::ofstream cands(dir / "cands.txt");
        for (const auto& [id, rec] : corpus.candidates) {
            cands << "#" << id << "\n";
            for (const CandidateNode& n : rec.nodes)
                cands << n.text << "\t" << n.head << "\t" << n.tail << "\n";
            cands << "\n";
        }
        std::ofstream input(dir / "input.tsv");
        for (const SentenceRecord& rec : corpus.records)
            input << rec.id << "\t" << rec.source.to_utf8() << "\n";
        std::ofstream config(dir / "run.cfg");
        config << "lattice = candidates\ncandidate_file = " << (dir / "cands.txt").string()
               << "\nd_model = 16\nd_head = 8\nheads = 2\nd_ff = 32\nepochs = 2\n"
               << "dropout = 0.1\ncharlm_order = 3\nseed = 5\n";
    }

    std::string cli = TRANSLIST_CLI;
    auto run = [&](const std::string& args) {
        std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    std::string d = dir.string();
    CHECK(run("train --corpus " + d + "/train.tsv --config " + d + "/run.cfg --out " + d +
              "/model.tlst -q") == 0);
    CHECK(run("segment --model " + d + "/model.tlst --input " + d +
              "/input.tsv --output " + d + "/seg.tsv -q") == 0);
    CHECK(run("eval --model " + d + "/model.tlst --corpus " + d +
              "/train.tsv --report-kv " + d + "/report.kv -q") == 0);
    CHECK(run("inspect --model " + d + "/model.tlst --text abcab --output " + d +
              "/dump.tsv -q") == 0);

    // one output line per input line, ids preserved
    std::istringstream seg(slurp(dir / "seg.tsv"));
    std::string line;
    std::size_t count = 0;
    while (std::getline(seg, line)) {
        CHECK(line.find('\t') != std::string::npos);
        ++count;
    }
    CHECK(count == corpus.records.size());
    CHECK(slurp(dir / "report.kv").find("perfect_match") != std::string::npos);

    // usage and data errors map to exit codes 2 and 3
    CHECK(run("train --corpus " + d + "/train.tsv --set bogus=1 --out " + d +
              "/x.tlst") != 0);
    std::ofstream nogold(dir / "nogold.tsv");
    nogold << "s1\tabc\n";
    nogold.close();
    int code = std::system((cli + " train --corpus " + d + "/nogold.tsv --out " + d +
                            "/y.tlst -q > /dev/null 2>&1")
                               .c_str());
    CHECK(WEXITSTATUS(code) == 2);

    // TLST_SEED overrides the config seed: same env seed reproduces the
    // checkpoint byte for byte, a different one diverges
    auto train_env = [&](const std::string& seed, const std::string& out) {
        std::string cmd = "TLST_SEED=" + seed + " " + cli + " train --corpus " + d +
                          "/train.tsv --config " + d + "/run.cfg --out " + d + "/" + out +
                          " -q > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    CHECK(train_env("99", "seed99a.tlst") == 0);
    CHECK(train_env("99", "seed99b.tlst") == 0);
    CHECK(train_env("100", "seed100.tlst") == 0);
    CHECK(slurp(dir / "seed99a.tlst") == slurp(dir / "seed99b.tlst"));
    CHECK(slurp(dir / "seed99a.tlst") != slurp(dir / "seed100.tlst"));
}
#endif
