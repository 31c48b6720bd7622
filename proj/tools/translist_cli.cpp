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
// Command-line entry point: train / segment / eval / inspect.
// Exit codes: 0 ok, 2 configuration or usage error, 3 data error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "translist/translist.hpp"

namespace {

using namespace translist;

std::vector<SentenceRecord> load_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open corpus file: " + path);
    return load_corpus(in);
}

LatticeResources load_resources(const RunConfig& cfg, const std::string& candidate_path) {
    LatticeResources res;
    if (!cfg.vocab_file.empty()) {
        std::ifstream in(cfg.vocab_file);
        if (!in) throw FormatError("cannot open vocab file: " + cfg.vocab_file);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            res.vocab_words.insert(normalize_text(line));
        }
    }
    std::string cands = !candidate_path.empty() ? candidate_path : cfg.candidate_file;
    if (!cands.empty()) {
        std::ifstream in(cands);
        if (!in) throw FormatError("cannot open candidate file: " + cands);
        res.candidates = load_candidate_file(in);
    }
    return res;
}

RunConfig make_config(const std::string& config_path,
                      const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file: " + config_path);
        parse_config_stream(cfg, in);
    }
    for (const std::string& kv : overrides) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override must be key=value: " + kv);
        apply_config_entry(cfg, detail::trim(kv.substr(0, eq)),
                           detail::trim(kv.substr(eq + 1)));
    }
    if (const char* env_seed = std::getenv("TLST_SEED"))
        apply_config_entry(cfg, "seed", env_seed);
    return cfg;
}

int run_train(const std::string& corpus_path, const std::string& config_path,
              const std::vector<std::string>& overrides, const std::string& out_path,
              const std::string& dev_path, bool quiet) {
    RunConfig cfg = make_config(config_path, overrides);
    cfg.validate();
    std::vector<SentenceRecord> corpus = load_corpus_file(corpus_path);
    for (const SentenceRecord& rec : corpus)
        if (!rec.gold) throw ConfigError("training corpus is missing the gold column");
    std::vector<SentenceRecord> dev;
    if (!dev_path.empty()) dev = load_corpus_file(dev_path);
    LatticeResources res = load_resources(cfg, "");

    TrainStats stats;
    std::ostream* log = quiet ? nullptr : &std::cerr;
    Checkpoint ckpt = train_model(corpus, cfg, res, &stats, log,
                                  dev.empty() ? nullptr : &dev);
    save_checkpoint_file(ckpt, out_path);
    if (!quiet)
        std::cerr << "trained on " << (stats.sentences - stats.skipped) << "/"
                  << stats.sentences << " sentences, checkpoint written to " << out_path
                  << "\n";
    return 0;
}

int run_segment(const std::string& model_path, const std::string& input_path,
                const std::string& output_path, const std::string& candidate_path,
                const std::string& prcp_flag, bool quiet) {
    Checkpoint ckpt = load_checkpoint_file(model_path);
    std::vector<SentenceRecord> corpus = load_corpus_file(input_path);
    LatticeResources res = load_resources(ckpt.config, candidate_path);
    // A candidate file given on the command line activates the candidate
    // lattice even if the checkpoint was trained with another source.
    if (!candidate_path.empty() && ckpt.config.lattice == LatticeSource::Ngrams)
        ckpt.config.lattice = LatticeSource::Candidates;

    SegmentOptions opts;
    if (!prcp_flag.empty()) {
        RunConfig tmp;
        apply_config_entry(tmp, "prcp", prcp_flag);
        opts.prcp_override = tmp.prcp;
    }
    std::ostream* log = quiet ? nullptr : &std::cerr;
    std::vector<SegmentOutcome> outcomes = segment_corpus(ckpt, corpus, res, log, opts);

    std::ofstream file_out;
    std::ostream* out = &std::cout;
    if (!output_path.empty()) {
        file_out.open(output_path);
        if (!file_out) throw FormatError("cannot open output file: " + output_path);
        out = &file_out;
    }
    std::size_t rectified = 0;
    for (const SegmentOutcome& oc : outcomes) {
        *out << oc.id << "\t" << oc.text << "\n";
        rectified += oc.rectified.size();
    }
    if (!quiet)
        std::cerr << "segmented " << outcomes.size() << " sentences, prcp rectified "
                  << rectified << " chunks\n";
    return 0;
}

int run_eval(const std::string& model_path, const std::string& corpus_path,
             const std::string& candidate_path, const std::string& rules_path,
             const std::vector<std::string>& ablations, const std::string& kv_path,
             bool quiet) {
    Checkpoint ckpt = load_checkpoint_file(model_path);
    std::vector<SentenceRecord> corpus = load_corpus_file(corpus_path);
    LatticeResources res = load_resources(ckpt.config, candidate_path);
    if (!candidate_path.empty() && ckpt.config.lattice == LatticeSource::Ngrams)
        ckpt.config.lattice = LatticeSource::Candidates;
    std::ostream* log = quiet ? nullptr : &std::cerr;

    EvalReport report = evaluate_corpus(ckpt, corpus, res, log, {});
    std::cout << "full model\n";
    print_report(report, std::cout);

    for (const std::string& ab : ablations) {
        SegmentOptions opts;
        Checkpoint variant = ckpt;  // params shared by value copy
        if (ab == "no-SMA") {
            variant.model.cfg.mask_mode = MaskMode::Off;
        } else if (ab == "no-LIST") {
            opts.chars_only = true;
        } else if (ab == "no-PRCP") {
            opts.prcp_override = PrcpMode::Off;
        } else {
            throw ConfigError("unknown ablation: " + ab +
                              " (expected no-SMA, no-LIST or no-PRCP)");
        }
        EvalReport ab_report = evaluate_corpus(variant, corpus, res, log, opts);
        std::cout << "ablation " << ab << "\n";
        print_report(ab_report, std::cout);
    }

    if (!rules_path.empty()) {
        std::ifstream rin(rules_path);
        if (!rin) throw FormatError("cannot open rules file: " + rules_path);
        std::vector<CharRule> rules = load_rules(rin);

        std::vector<SymbolSequence> sources;
        std::vector<AlignedLabels> gold_labels, pred_labels;
        for (const SentenceRecord& rec : corpus) {
            SegmentOutcome seg = segment_sentence(ckpt, rec, res, log, {});
            try {
                AlignedLabels g = align_gold(rec.source, *rec.gold);
                AlignedLabels p = align_gold(rec.source, seg.text);
                sources.push_back(rec.source);
                gold_labels.push_back(std::move(g));
                pred_labels.push_back(std::move(p));
            } catch (const AlignError&) {
                continue;  // rule metrics only over alignable sentences
            }
        }
        std::cout << "rule                P      R      F      (gold/pred locations)\n";
        std::cout << std::fixed << std::setprecision(2);
        for (const CharRule& rule : rules) {
            RulePrf prf = rule_prf(sources, gold_labels, pred_labels, rule);
            std::string name = rule.surface + " -> " + rule.expansion;
            // pad by display width, not bytes
            std::size_t width = utf8_decode(name).size();
            name.append(width < 18 ? 18 - width : 1, ' ');
            std::cout << name << "  " << std::setw(6) << 100.0 * prf.precision << " "
                      << std::setw(6) << 100.0 * prf.recall << " " << std::setw(6)
                      << 100.0 * prf.f1 << "  (" << prf.gold_locations << "/"
                      << prf.pred_locations << ")\n";
        }
    }

    if (!kv_path.empty()) {
        std::ofstream kv(kv_path);
        if (!kv) throw FormatError("cannot open report file: " + kv_path);
        kv << report_keyvalues(report);
    }
    return 0;
}

int run_inspect(const std::string& model_path, const std::string& text,
                const std::string& input_path, const std::string& candidate_path,
                const std::string& output_path, bool quiet) {
    Checkpoint ckpt = load_checkpoint_file(model_path);
    LatticeResources res = load_resources(ckpt.config, candidate_path);
    if (!candidate_path.empty() && ckpt.config.lattice == LatticeSource::Ngrams)
        ckpt.config.lattice = LatticeSource::Candidates;

    std::vector<SentenceRecord> corpus;
    if (!text.empty()) {
        SentenceRecord rec;
        rec.id = "inline";
        rec.source = normalize(text);
        corpus.push_back(std::move(rec));
    } else if (!input_path.empty()) {
        corpus = load_corpus_file(input_path);
    } else {
        throw ConfigError("inspect needs --text or --input");
    }

    std::ofstream file_out;
    std::ostream* out = &std::cout;
    if (!output_path.empty()) {
        file_out.open(output_path);
        if (!file_out) throw FormatError("cannot open output file: " + output_path);
        out = &file_out;
    }
    std::ostream* log = quiet ? nullptr : &std::cerr;
    for (const SentenceRecord& rec : corpus) inspect_sentence(ckpt, rec, res, *out, log);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice-augmented Sanskrit word segmentation"};
    app.require_subcommand(1);
    app.fallthrough();
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "suppress progress logging");

    auto* train = app.add_subcommand("train", "train a model and write a checkpoint");
    std::string tr_corpus, tr_config, tr_out = "model.tlst", tr_dev;
    std::vector<std::string> tr_set;
    train->add_option("--corpus", tr_corpus, "training corpus (id<TAB>source<TAB>gold)")
        ->required();
    train->add_option("--config", tr_config, "key = value configuration file");
    train->add_option("--set", tr_set, "override a config entry, key=value");
    train->add_option("--out", tr_out, "checkpoint output path");
    train->add_option("--dev", tr_dev, "development corpus for per-epoch metrics");

    auto* segment = app.add_subcommand("segment", "segment sentences with a checkpoint");
    std::string sg_model, sg_input, sg_output, sg_cands, sg_prcp;
    segment->add_option("--model", sg_model, "checkpoint path")->required();
    segment->add_option("--input", sg_input, "input corpus (id<TAB>source)")->required();
    segment->add_option("--output", sg_output, "output path (default stdout)");
    segment->add_option("--candidates", sg_cands, "candidate-space file");
    segment->add_option("--prcp", sg_prcp, "override prcp mode: off, raw or prob");

    auto* evalc = app.add_subcommand("eval", "segment and score against gold");
    std::string ev_model, ev_corpus, ev_cands, ev_rules, ev_kv;
    std::vector<std::string> ev_ablate;
    evalc->add_option("--model", ev_model, "checkpoint path")->required();
    evalc->add_option("--corpus", ev_corpus, "corpus with gold column")->required();
    evalc->add_option("--candidates", ev_cands, "candidate-space file");
    evalc->add_option("--rules", ev_rules, "character-rule inventory file");
    evalc->add_option("--ablate", ev_ablate, "repeatable: no-SMA, no-LIST, no-PRCP");
    evalc->add_option("--report-kv", ev_kv, "write machine-readable key/value report");

    auto* inspect = app.add_subcommand("inspect", "dump attention matrices");
    std::string in_model, in_text, in_input, in_cands, in_output;
    inspect->add_option("--model", in_model, "checkpoint path")->required();
    inspect->add_option("--text", in_text, "sentence to inspect");
    inspect->add_option("--input", in_input, "corpus file to inspect");
    inspect->add_option("--candidates", in_cands, "candidate-space file");
    inspect->add_option("--output", in_output, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ? 0 : 2;
    }

    try {
        if (*train)
            return run_train(tr_corpus, tr_config, tr_set, tr_out, tr_dev, quiet);
        if (*segment)
            return run_segment(sg_model, sg_input, sg_output, sg_cands, sg_prcp, quiet);
        if (*evalc)
            return run_eval(ev_model, ev_corpus, ev_cands, ev_rules, ev_ablate, ev_kv,
                            quiet);
        if (*inspect)
            return run_inspect(in_model, in_text, in_input, in_cands, in_output, quiet);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const translist::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
