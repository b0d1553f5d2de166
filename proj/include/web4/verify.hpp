#pragma once

#include "web4/report.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace web4 {

/// One named identity, aggregated over every point it was checked at.
struct Check {
    std::string name;
    bool passed = true;
    std::size_t evaluations = 0;
    double worst = 0.0;      ///< largest measured residual or relative error
    std::string worst_where; ///< point (or case) where worst was seen
    std::string failure;     ///< first failing point and detail
};

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;

    bool passed() const;
    std::size_t failures() const;
};

struct VerifyOptions {
    std::filesystem::path corpus_dir;
    unsigned seed = 20240917;
};

/// $WEB4_CORPUS_DIR when set, otherwise the corpus shipped with the sources.
std::filesystem::path default_corpus_dir();

VerifyOptions default_verify_options();

/// parallel, pencils, mw1-logistic, apw1-affine, nw-curved, oracle-random,
/// gauge-random, consistency, cross-ratio, jets.
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite.
SuiteResult run_suite(std::string_view name, const VerifyOptions& options);

Json suite_json(const SuiteResult& result);

/// One line per check: PASS/FAIL, name, worst measure and location.
std::string suite_text(const SuiteResult& result);

}  // namespace web4
