#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace curvalg::harness {

// Configuration of a verification run. Deterministic given (seed, dims, mode).
struct SuiteConfig {
  std::vector<int> dims = {2, 3, 4, 5, 6, 7, 8};
  std::string scalar_mode = "f64";  // "f64" | "rational"
  std::uint64_t seed = 42;
  double tol = 1e-10;
  std::size_t finder_seeds = 100;
  std::size_t finder_iters = 400;
  std::string filter = "*";
};

struct CheckResult {
  std::string id;        // dotted path, e.g. "weyl.ssrinorm.r4"
  std::string anchor;    // paper anchor string or "plumbing"
  std::string status;    // pass | fail | flagged-discrepancy | skipped
  double residual = 0.0;
  std::string expected;  // exact value string where known
  std::string note;
};

// Runs every registered check whose id matches the filter glob; results are
// sorted by id. Throws std::invalid_argument when the filter matches nothing.
std::vector<CheckResult> run_suite(const SuiteConfig& cfg);

std::vector<std::string> registered_ids();

// Coverage ledger: anchors from the in-scope list that no check claims.
std::vector<std::string> missing_anchor_coverage();

// Machine-readable outputs.
std::string emit_report_json(const SuiteConfig& cfg, const std::vector<CheckResult>& results);
std::string emit_report_csv(const SuiteConfig& cfg, const std::vector<CheckResult>& results);
std::string emit_dimension_table_csv(int max_n);

// fnmatch-style glob with '*' and '?'.
bool glob_match(const std::string& pattern, const std::string& text);

}  // namespace curvalg::harness
