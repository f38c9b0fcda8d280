#pragma once

#include <string>
#include <vector>

namespace mint::suite {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the eight acceptance criteria in order. A criterion that throws is
/// reported as failed with the error message; run_all itself never throws.
std::vector<CriterionResult> run_all();

}  // namespace mint::suite
