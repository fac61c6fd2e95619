// src/harness/gradcheck.hpp
//
// Copyright 2026 lhuclab authors
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
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Finite-difference verification of the analytic gradients on randomized
// model configurations: up to three hidden layers, widths up to 16, all four
// reparametrisations, both output kinds, and batches routed across several
// clusters (the speaker-independent cluster included).  Every shared-weight
// entry and every routed amplitude entry is perturbed centrally and compared
// against the analytic gradient by relative error with an absolute floor.

#ifndef LHUC_HARNESS_GRADCHECK_HPP_
#define LHUC_HARNESS_GRADCHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace lhuc {

inline constexpr double kGradcheckTolerance = 1e-5;

struct GradcheckCase {
  int index = 0;
  std::vector<int> dims;
  std::string reparam;
  std::string output;
  double max_rel_theta = 0.0;  // worst shared-weight relative error
  double max_rel_amp = 0.0;    // worst routed-amplitude relative error
};

struct GradcheckReport {
  std::vector<GradcheckCase> cases;
  double max_rel_theta = 0.0;
  double max_rel_amp = 0.0;
  double tolerance = kGradcheckTolerance;
  bool pass = false;

  double max_rel() const {
    return max_rel_theta > max_rel_amp ? max_rel_theta : max_rel_amp;
  }
};

GradcheckReport run_gradcheck(std::uint64_t seed, int cases = 25);

}  // namespace lhuc

#endif  // LHUC_HARNESS_GRADCHECK_HPP_
