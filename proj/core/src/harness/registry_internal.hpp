#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "curvalg/harness.hpp"
#include "curvalg/prng.hpp"
#include "curvalg/scalar.hpp"

namespace curvalg::harness {

// Execution context handed to each check; residuals accumulate and the
// status is derived afterwards unless the check sets it explicitly.
struct Ctx {
  const SuiteConfig& cfg;
  Prng rng;
  bool exact;
  double tol;
  double residual = 0.0;
  std::string status;  // empty = derive from residual vs tol
  std::string expected;
  std::string note;

  void take(double r) { residual = std::max(residual, std::fabs(r)); }
  template <class S>
  void take_s(const S& r) {
    take(to_double(scalar_traits<S>::abs(r)));
  }
  void require(bool ok, const std::string& why) {
    if (!ok && status.empty()) {
      status = "fail";
      note = note.empty() ? why : note + "; " + why;
    }
  }
  void skip(const std::string& why) {
    if (status.empty()) {
      status = "skipped";
      note = why;
    }
  }

  // dims from the config filtered to a predicate
  template <class Pred>
  std::vector<int> dims_where(Pred&& p) const {
    std::vector<int> out;
    for (int n : cfg.dims)
      if (p(n)) out.push_back(n);
    return out;
  }
  std::vector<int> general_dims() const {
    return dims_where([](int n) { return n >= 2 && n <= 8; });
  }
  std::vector<int> weyl_dims() const {
    return dims_where([](int n) { return n >= 4 && n <= 8; });
  }
  std::vector<int> kahler_dims() const {
    return dims_where([](int n) { return n >= 4 && n <= 8 && n % 2 == 0; });
  }
  // exact mode runs shrink to desk-scale dims
  std::vector<int> clamp_exact(std::vector<int> dims, int max_exact) const {
    if (!exact) return dims;
    std::vector<int> out;
    for (int n : dims)
      if (n <= max_exact) out.push_back(n);
    return out;
  }
};

struct CheckDef {
  std::string id;
  std::string anchor;
  double tol_override = -1.0;  // < 0: use cfg.tol
  std::function<void(Ctx&)> fn;
};

std::vector<CheckDef>& registry();

// Anchors that the registry must cover; the meta-check diffs this against
// the claimed anchors.
const std::vector<std::string>& required_anchors();

void register_core_checks();    // linalg, curvature space, products
void register_special_checks(); // idempotents, 3d, 4d
void register_kahler_checks();  // Kähler modules, dims table, finder, meta

}  // namespace curvalg::harness
