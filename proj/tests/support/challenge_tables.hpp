// tests/support/challenge_tables.hpp

// Copyright 2026  The hsc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Expected values shared by the unit suite and the acceptance runner.

#include <optional>
#include <vector>

namespace hsc::testing {

struct PassCase {
  double submission;
  double noisy;
  bool expect;
};

// Threshold 0.3 is strict; a noisy CER below it becomes the bar.
inline const std::vector<PassCase> kPassCases = {
    {0.29, 0.91, true},    {0.30, 0.91, false},   {0.31, 0.91, false},  {0.0, 0.91, true},
    {0.05, 0.0419, false}, {0.04, 0.0419, true},  {0.0419, 0.0419, false}, {0.0, 0.0419, true},
    {0.0771, 0.0772, true}, {0.0772, 0.0772, false}, {0.2999, 0.3, true}, {0.3, 0.3, false},
    {0.29, 0.2999, true},  {0.2999, 0.2999, false}, {0.1, 0.126, true},  {0.13, 0.126, false},
    {1.5, 1.0, false},     {0.0, 0.0, false},
};

struct RegistryRow {
  const char* id;
  std::optional<double> distance_m;
  double gain_pct;
  double volume_pct;
  double total_length_s;
  double clean_mean_cer;
  double recorded_mean_cer;
  const char* alias;  // nullptr when the level has its own clean data
};

inline const std::vector<RegistryRow> kRegistryRows = {
    {"T1L1", std::nullopt, 5, 75, 2876, 0.00760, 0.0419, nullptr},
    {"T1L2", std::nullopt, 5, 75, 2960, 0.00695, 0.0772, nullptr},
    {"T1L3", std::nullopt, 20, 60, 2922, 0.00581, 0.343, nullptr},
    {"T1L4", std::nullopt, 20, 60, 2974, 0.00737, 0.730, nullptr},
    {"T1L5", std::nullopt, 30, 60, 3118, 0.00739, 0.910, nullptr},
    {"T1L6", std::nullopt, 40, 60, 2945, 0.00727, 0.973, nullptr},
    {"T1L7", std::nullopt, 50, 50, 2975, 0.00742, 0.972, nullptr},
    {"T2L1", 1.0, 50, 80, 3000, 0.00817, 0.126, nullptr},
    {"T2L2", 5.0, 55, 80, 2643, 0.00899, 0.474, nullptr},
    {"T2L3", 10.0, 60, 80, 2762, 0.00962, 0.557, nullptr},
    {"T3L1", 5.0, 55, 80, 2643, 0.00899, 0.918, "T2L2"},
    {"T3L2", 10.0, 60, 80, 2762, 0.00962, 1.00, "T2L3"},
};

}  // namespace hsc::testing
