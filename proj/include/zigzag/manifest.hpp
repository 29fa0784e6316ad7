#pragma once

#include <map>
#include <string>
#include <vector>

#include "zigzag/continuum.hpp"

namespace zz {

/// Line-oriented `key = value` text; '#' starts a comment. Later keys override earlier ones.
std::map<std::string, std::string> parse_manifest(const std::string& text);
std::map<std::string, std::string> read_manifest(const std::string& path);

/// Comma-separated list of angles or numbers.
std::vector<double> parse_list(const std::string& s);

struct SweepPlan {
    ContinuumConfig cfg;
    std::vector<double> lambdas{8, 12, 16};
    std::vector<double> kpars{5.0 * kPi / 6.0};
};

/// Applies recognised keys (well, r0, lambda, kpar, ncells, resolution, pad_left, pad_right,
/// nev, closure, eig_tol); unknown keys are a validation error.
void apply_manifest(const std::map<std::string, std::string>& kv, SweepPlan& plan);

}  // namespace zz
