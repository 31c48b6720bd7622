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

#pragma once

#include <stdexcept>
#include <string>

namespace translist {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Text / file ingestion
struct EmptyInput : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct OffsetError : Error { using Error::Error; };

// Alignment
struct AlignError : Error { using Error::Error; };

// Lattice paths
struct NoPath : Error { using Error::Error; };

// Numerics
struct ShapeError : Error { using Error::Error; };
struct NonFiniteError : Error { using Error::Error; };

// Corpora / models
struct EmptyCorpus : Error { using Error::Error; };
struct CheckpointError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace translist
