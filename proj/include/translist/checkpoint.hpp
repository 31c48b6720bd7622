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
// Self-describing checkpoint container. Layout:
//
//   "TLST1\n"
//   repeated sections: u32 name length, name bytes,
//                      u64 payload length, payload bytes
//
// Sections: `config` (key = value text), `label_vocab`, `char_vocab` and
// `word_vocab` (one entry per line, line number = id), `params` (named
// arrays: u32 name length, name, u32 rows, u32 cols, row-major IEEE-754
// float32 data) and `charlm`. All integers and floats are little-endian.

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "translist/charlm.hpp"
#include "translist/config.hpp"
#include "translist/encoder.hpp"
#include "translist/errors.hpp"
#include "translist/labels.hpp"

namespace translist {

inline constexpr char kCheckpointMagic[] = "TLST1\n";

namespace detail {

inline void write_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void write_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void write_f32(std::string& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    write_u32(out, bits);
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    explicit Reader(const std::string& b) : buf(b) {}
    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw CheckpointError("truncated checkpoint");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i]))
                 << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i]))
                 << (8 * i);
        pos += 8;
        return v;
    }
    float f32() {
        std::uint32_t bits = u32();
        float f;
        std::memcpy(&f, &bits, 4);
        return f;
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
    bool done() const { return pos >= buf.size(); }
};

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

}  // namespace detail

struct Checkpoint {
    RunConfig config;
    LabelVocab label_vocab;
    ModelParams model;  // includes char/word vocabs
    CharLM charlm;
};

inline void save_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
    std::string body;
    auto section = [&body](const std::string& name, const std::string& payload) {
        detail::write_u32(body, static_cast<std::uint32_t>(name.size()));
        body += name;
        detail::write_u64(body, payload.size());
        body += payload;
    };

    {
        std::ostringstream cfg;
        write_config(ckpt.config, cfg);
        section("config", cfg.str());
    }
    {
        std::ostringstream vocab;
        save_label_vocab(ckpt.label_vocab, vocab);
        section("label_vocab", vocab.str());
    }
    {
        std::string text;
        for (const std::string& t : ckpt.model.char_vocab.tokens) text += t + "\n";
        section("char_vocab", text);
        text.clear();
        for (const std::string& t : ckpt.model.word_vocab.tokens) text += t + "\n";
        section("word_vocab", text);
    }
    {
        std::string payload;
        std::uint32_t count = 0;
        ckpt.model.for_each_param([&count](const Param&) { ++count; });
        detail::write_u32(payload, count);
        ckpt.model.for_each_param([&payload](const Param& p) {
            detail::write_u32(payload, static_cast<std::uint32_t>(p.name.size()));
            payload += p.name;
            detail::write_u32(payload, static_cast<std::uint32_t>(p.value.rows));
            detail::write_u32(payload, static_cast<std::uint32_t>(p.value.cols));
            for (double v : p.value.data)
                detail::write_f32(payload, static_cast<float>(v));
        });
        section("params", payload);
    }
    {
        std::ostringstream lm;
        ckpt.charlm.save(lm);
        section("charlm", lm.str());
    }
    out.write(kCheckpointMagic, 6);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

inline Checkpoint load_checkpoint(std::istream& in) {
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (all.size() < 6 || all.compare(0, 6, kCheckpointMagic) != 0)
        throw CheckpointError("not a checkpoint file (bad magic)");
    std::string body = all.substr(6);
    detail::Reader r(body);

    std::map<std::string, std::string> sections;
    while (!r.done()) {
        std::uint32_t name_len = r.u32();
        std::string name = r.bytes(name_len);
        std::uint64_t payload_len = r.u64();
        sections[name] = r.bytes(static_cast<std::size_t>(payload_len));
    }
    for (const char* required :
         {"config", "label_vocab", "char_vocab", "word_vocab", "params", "charlm"})
        if (!sections.count(required))
            throw CheckpointError(std::string("checkpoint missing section '") + required +
                                  "'");

    Checkpoint ckpt;
    {
        std::istringstream cfg(sections["config"]);
        parse_config_stream(ckpt.config, cfg);
    }
    {
        std::istringstream vocab(sections["label_vocab"]);
        ckpt.label_vocab = load_label_vocab(vocab);
    }
    ckpt.model.cfg = ckpt.config.encoder_config();
    ckpt.model.char_vocab = TokenVocab::from_tokens(detail::split_lines(sections["char_vocab"]));
    ckpt.model.word_vocab = TokenVocab::from_tokens(detail::split_lines(sections["word_vocab"]));
    ckpt.model.label_count = ckpt.label_vocab.size();
    {
        detail::Reader pr(sections["params"]);
        std::uint32_t count = pr.u32();
        for (std::uint32_t i = 0; i < count; ++i) {
            std::string name = pr.bytes(pr.u32());
            std::uint32_t rows = pr.u32();
            std::uint32_t cols = pr.u32();
            Tensor t(static_cast<int>(rows), static_cast<int>(cols));
            for (double& v : t.data) v = static_cast<double>(pr.f32());
            ckpt.model.add(name, std::move(t));
        }
    }
    {
        std::istringstream lm(sections["charlm"]);
        ckpt.charlm = CharLM::load(lm);
    }
    return ckpt;
}

inline void save_checkpoint_file(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot open checkpoint for writing: " + path);
    save_checkpoint(ckpt, out);
    if (!out) throw CheckpointError("failed writing checkpoint: " + path);
}

inline Checkpoint load_checkpoint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path);
    return load_checkpoint(in);
}

}  // namespace translist
