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
// Run configuration: flat `key = value` UTF-8 text with CLI overrides.

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "translist/encoder.hpp"
#include "translist/errors.hpp"
#include "translist/metrics.hpp"
#include "translist/prcp.hpp"

namespace translist {

enum class LatticeSource { Ngrams, Vocab, Candidates, CandidatesPlusNgrams };

struct RunConfig {
    LatticeSource lattice = LatticeSource::Ngrams;
    int n_max = 4;
    int d_model = 128;
    int d_head = 128;
    int heads = 4;
    int layers = 1;
    int d_ff = 384;
    double dropout = 0.3;
    double lr = 0.001;
    int epochs = 50;
    std::uint64_t seed = 42;
    PrcpMode prcp = PrcpMode::Off;
    int charlm_order = 6;
    MacroFMode metric_f = MacroFMode::MeanOfF;
    MaskMode mask = MaskMode::Logistic;
    bool juncture_overlap = true;
    long path_cap = 10000;
    int d_max = 512;
    std::string vocab_file;      // lattice = vocab
    std::string candidate_file;  // lattice = candidates*

    EncoderConfig encoder_config() const {
        EncoderConfig ec;
        ec.d_model = d_model;
        ec.d_head = d_head;
        ec.heads = heads;
        ec.layers = layers;
        ec.d_ff = d_ff;
        ec.dropout = dropout;
        ec.d_max = d_max;
        ec.mask_mode = mask;
        return ec;
    }

    void validate() const {
        if (n_max < 2) throw ConfigError("n_max must be >= 2");
        if (lr <= 0.0) throw ConfigError("lr must be positive");
        if (epochs < 0) throw ConfigError("epochs must be >= 0");
        if (charlm_order < 1) throw ConfigError("charlm_order must be >= 1");
        if (path_cap < 1) throw ConfigError("path_cap must be >= 1");
        if (lattice == LatticeSource::Vocab && vocab_file.empty())
            throw ConfigError("lattice = vocab requires vocab_file");
        if ((lattice == LatticeSource::Candidates ||
             lattice == LatticeSource::CandidatesPlusNgrams) &&
            candidate_file.empty())
            throw ConfigError("lattice = candidates requires candidate_file");
        encoder_config().validate();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T v{};
    in >> v;
    if (in.fail() || !in.eof())
        throw ConfigError("bad numeric value for '" + key + "': " + value);
    return v;
}

}  // namespace detail

inline void apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
    if (key == "lattice") {
        if (value == "ngrams")
            cfg.lattice = LatticeSource::Ngrams;
        else if (value == "vocab")
            cfg.lattice = LatticeSource::Vocab;
        else if (value == "candidates")
            cfg.lattice = LatticeSource::Candidates;
        else if (value == "candidates+ngrams")
            cfg.lattice = LatticeSource::CandidatesPlusNgrams;
        else
            throw ConfigError("unknown lattice source: " + value);
    } else if (key == "n_max") {
        cfg.n_max = detail::parse_number<int>(key, value);
    } else if (key == "d_model") {
        cfg.d_model = detail::parse_number<int>(key, value);
    } else if (key == "d_head") {
        cfg.d_head = detail::parse_number<int>(key, value);
    } else if (key == "heads") {
        cfg.heads = detail::parse_number<int>(key, value);
    } else if (key == "layers") {
        cfg.layers = detail::parse_number<int>(key, value);
    } else if (key == "d_ff") {
        cfg.d_ff = detail::parse_number<int>(key, value);
    } else if (key == "dropout") {
        cfg.dropout = detail::parse_number<double>(key, value);
    } else if (key == "lr") {
        cfg.lr = detail::parse_number<double>(key, value);
    } else if (key == "epochs") {
        cfg.epochs = detail::parse_number<int>(key, value);
    } else if (key == "seed") {
        cfg.seed = detail::parse_number<std::uint64_t>(key, value);
    } else if (key == "prcp") {
        if (value == "off")
            cfg.prcp = PrcpMode::Off;
        else if (value == "raw")
            cfg.prcp = PrcpMode::Raw;
        else if (value == "prob")
            cfg.prcp = PrcpMode::Prob;
        else
            throw ConfigError("unknown prcp mode: " + value);
    } else if (key == "charlm_order") {
        cfg.charlm_order = detail::parse_number<int>(key, value);
    } else if (key == "metric_f") {
        if (value == "mean")
            cfg.metric_f = MacroFMode::MeanOfF;
        else if (value == "harmonic")
            cfg.metric_f = MacroFMode::HarmonicOfPR;
        else
            throw ConfigError("unknown metric_f mode: " + value);
    } else if (key == "mask") {
        if (value == "logistic")
            cfg.mask = MaskMode::Logistic;
        else if (value == "raw-clamped")
            cfg.mask = MaskMode::RawClamped;
        else if (value == "off")
            cfg.mask = MaskMode::Off;
        else
            throw ConfigError("unknown mask mode: " + value);
    } else if (key == "juncture_overlap") {
        if (value == "on" || value == "true")
            cfg.juncture_overlap = true;
        else if (value == "off" || value == "false")
            cfg.juncture_overlap = false;
        else
            throw ConfigError("juncture_overlap must be on/off");
    } else if (key == "path_cap") {
        cfg.path_cap = detail::parse_number<long>(key, value);
    } else if (key == "d_max") {
        cfg.d_max = detail::parse_number<int>(key, value);
    } else if (key == "vocab_file") {
        cfg.vocab_file = value;
    } else if (key == "candidate_file") {
        cfg.candidate_file = value;
    } else {
        throw ConfigError("unknown config key: " + key);
    }
}

inline void parse_config_stream(RunConfig& cfg, std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        apply_config_entry(cfg, detail::trim(t.substr(0, eq)),
                           detail::trim(t.substr(eq + 1)));
    }
}

inline std::string to_string(LatticeSource s) {
    switch (s) {
        case LatticeSource::Ngrams: return "ngrams";
        case LatticeSource::Vocab: return "vocab";
        case LatticeSource::Candidates: return "candidates";
        case LatticeSource::CandidatesPlusNgrams: return "candidates+ngrams";
    }
    return "ngrams";
}
inline std::string to_string(PrcpMode m) {
    switch (m) {
        case PrcpMode::Off: return "off";
        case PrcpMode::Raw: return "raw";
        case PrcpMode::Prob: return "prob";
    }
    return "off";
}
inline std::string to_string(MaskMode m) {
    switch (m) {
        case MaskMode::Logistic: return "logistic";
        case MaskMode::RawClamped: return "raw-clamped";
        case MaskMode::Off: return "off";
    }
    return "logistic";
}
inline std::string to_string(MacroFMode m) {
    return m == MacroFMode::MeanOfF ? "mean" : "harmonic";
}

inline void write_config(const RunConfig& cfg, std::ostream& out) {
    std::ostringstream num;
    num.precision(17);
    auto fp = [&num](double v) {
        num.str("");
        num << v;
        return num.str();
    };
    out << "lattice = " << to_string(cfg.lattice) << "\n";
    out << "n_max = " << cfg.n_max << "\n";
    out << "d_model = " << cfg.d_model << "\n";
    out << "d_head = " << cfg.d_head << "\n";
    out << "heads = " << cfg.heads << "\n";
    out << "layers = " << cfg.layers << "\n";
    out << "d_ff = " << cfg.d_ff << "\n";
    out << "dropout = " << fp(cfg.dropout) << "\n";
    out << "lr = " << fp(cfg.lr) << "\n";
    out << "epochs = " << cfg.epochs << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "prcp = " << to_string(cfg.prcp) << "\n";
    out << "charlm_order = " << cfg.charlm_order << "\n";
    out << "metric_f = " << to_string(cfg.metric_f) << "\n";
    out << "mask = " << to_string(cfg.mask) << "\n";
    out << "juncture_overlap = " << (cfg.juncture_overlap ? "on" : "off") << "\n";
    out << "path_cap = " << cfg.path_cap << "\n";
    out << "d_max = " << cfg.d_max << "\n";
    if (!cfg.vocab_file.empty()) out << "vocab_file = " << cfg.vocab_file << "\n";
    if (!cfg.candidate_file.empty())
        out << "candidate_file = " << cfg.candidate_file << "\n";
}

}  // namespace translist
