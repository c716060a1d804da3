// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lyricgen::gradcheck {

struct Options {
  std::uint64_t seed = 7;
  double step = 1e-5;
  double tolerance = 1e-4;
  // Name of a group whose analytic gradient gets perturbed before comparison.
  // Used to prove the check can fail.
  std::string inject_fault;
};

struct GroupResult {
  std::string group;
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  bool passed = true;
};

struct Report {
  std::vector<GroupResult> groups;
  bool passed = true;
};

/// |a - n| / max(|a|, |n|, 1e-6). Below the floor the measure degrades to an
/// absolute error scaled by 1e6.
double relative_error(double analytic, double numeric);

/// A block of parameters (or inputs) with the analytic gradient of `loss`
/// with respect to it.
struct Block {
  std::string name;
  std::span<double> values;
  std::span<const double> analytic;
};

/// Central differences of `loss` for every element of every block.
GroupResult check_blocks(const std::string& group, const std::function<double()>& loss,
                         std::vector<Block> blocks, const Options& opts);

/// Kernel suites, then the full model at E=4, H=6, A=5, V=12, L_src=3 for
/// both attention variants. Deterministic given opts.seed.
Report run_gradcheck(const Options& opts);

}  // namespace lyricgen::gradcheck
