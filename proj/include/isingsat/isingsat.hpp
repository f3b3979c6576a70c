// Copyright 2026 The isingsat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header.

#ifndef ISINGSAT_ISINGSAT_HPP
#define ISINGSAT_ISINGSAT_HPP

#include "isingsat/backbone.hpp"
#include "isingsat/circuit.hpp"
#include "isingsat/cnf.hpp"
#include "isingsat/decompose.hpp"
#include "isingsat/dpll.hpp"
#include "isingsat/harness.hpp"
#include "isingsat/preprocess.hpp"
#include "isingsat/qubo.hpp"
#include "isingsat/run_record.hpp"
#include "isingsat/solver.hpp"
#include "isingsat/vig.hpp"

#endif  // ISINGSAT_ISINGSAT_HPP
