#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace zz {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::map<std::string, double> metrics;
};

enum class Suite { Tb, Zak, Atomic, Continuum, All };

Suite parse_suite(const std::string& s);

/// Runs the criteria of a suite. Each result line is handed to `report` as soon as it is known.
std::vector<CriterionResult> run_acceptance(Suite suite,
                                            const std::function<void(const CriterionResult&)>& report = {});

std::string format_line(const CriterionResult& r);

}  // namespace zz
