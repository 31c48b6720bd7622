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

#include "translist/charlm.hpp"
#include "translist/checkpoint.hpp"
#include "translist/config.hpp"
#include "translist/encoder.hpp"
#include "translist/errors.hpp"
#include "translist/labels.hpp"
#include "translist/lattice.hpp"
#include "translist/metrics.hpp"
#include "translist/pipeline.hpp"
#include "translist/prcp.hpp"
#include "translist/symbols.hpp"
#include "translist/tensor.hpp"
#include "translist/unicode_nfc.hpp"
#include "translist/utf8.hpp"
