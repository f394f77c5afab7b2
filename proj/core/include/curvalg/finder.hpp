#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "curvalg/basis.hpp"
#include "curvalg/curvmult.hpp"
#include "curvalg/idempotents.hpp"
#include "curvalg/linsys.hpp"

namespace curvalg {

// Structure constants of a *-closed subalgebra over an orthonormal basis;
// the finder iterates entirely in coordinates.
class AlgebraCoords {
 public:
  AlgebraCoords(const MetricSpace<double>& sp, const Basis<double>& basis)
      : sp_(&sp), basis_(&basis), d_(basis.size()), c_(d_ * d_ * d_, 0.0) {
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = i; j < d_; ++j) {
        Tensor<double> prod = curvmult(sp, basis[i], basis[j]);
        auto coords = basis.coordinates(prod);
        double leak = (prod - basis.combine(coords)).max_abs();
        if (leak > closure_leakage_) closure_leakage_ = leak;
        for (std::size_t k = 0; k < d_; ++k) {
          at(i, j, k) = coords[k];
          at(j, i, k) = coords[k];
        }
      }
  }

  std::size_t dim() const { return d_; }
  double closure_leakage() const { return closure_leakage_; }
  const Basis<double>& basis() const { return *basis_; }
  const MetricSpace<double>& space() const { return *sp_; }

  std::vector<double> mult(const std::vector<double>& x, const std::vector<double>& y) const {
    std::vector<double> out(d_, 0.0);
    for (std::size_t i = 0; i < d_; ++i) {
      if (x[i] == 0.0) continue;
      for (std::size_t j = 0; j < d_; ++j) {
        double f = x[i] * y[j];
        if (f == 0.0) continue;
        const double* row = &c_[(i * d_ + j) * d_];
        for (std::size_t k = 0; k < d_; ++k) out[k] += f * row[k];
      }
    }
    return out;
  }

  // matrix of left multiplication by x
  Mat<double> left_mult(const std::vector<double>& x) const {
    Mat<double> m(d_, d_);
    for (std::size_t i = 0; i < d_; ++i) {
      if (x[i] == 0.0) continue;
      for (std::size_t j = 0; j < d_; ++j) {
        const double* row = &c_[(i * d_ + j) * d_];
        for (std::size_t k = 0; k < d_; ++k) m(k, j) += x[i] * row[k];
      }
    }
    return m;
  }

 private:
  double& at(std::size_t i, std::size_t j, std::size_t k) { return c_[(i * d_ + j) * d_ + k]; }
  const MetricSpace<double>* sp_;
  const Basis<double>* basis_;
  std::size_t d_;
  std::vector<double> c_;
  double closure_leakage_ = 0.0;
};

struct FinderOptions {
  std::size_t max_iter = 400;
  double tol = 1e-10;
  double newton_threshold = 1e-3;  // switch to Newton once the defect is below
};

struct FinderOutcome {
  bool converged = false;
  std::size_t iterations = 0;
  double defect = 1.0;
  std::vector<double> coords;
  std::string note;
};

namespace detail {

inline double nrm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// Two-phase idempotent search: projected gradient ascent of the cubic form
// on the unit sphere (critical points satisfy x*x = lambda x), then Newton
// on F(x) = x*x - x.
inline FinderOutcome find_idempotent(const AlgebraCoords& alg, Prng& rng,
                                     const FinderOptions& opt = {},
                                     const std::vector<double>* seed = nullptr) {
  const std::size_t d = alg.dim();
  FinderOutcome out;
  std::vector<double> x(d);
  if (seed) {
    x = *seed;
  } else {
    for (auto& v : x) v = rng.next_symmetric();
  }
  double nx = detail::nrm2(x);
  if (nx < 1e-12) {
    out.note = "zero seed";
    return out;
  }

  auto defect_of = [&](const std::vector<double>& y) {
    std::vector<double> yy = alg.mult(y, y);
    double s = 0;
    for (std::size_t i = 0; i < d; ++i) {
      double diff = yy[i] - y[i];
      s += diff * diff;
    }
    return std::sqrt(s);
  };

  // a seed that is already a fixed point needs no iterations
  if (defect_of(x) < opt.tol) {
    out.converged = true;
    out.iterations = 0;
    out.defect = defect_of(x);
    out.coords = std::move(x);
    return out;
  }
  for (auto& v : x) v /= nx;

  // phase one: ascend |P| on the sphere; gradient of P is (x*x)/2
  double sign = 0.0;
  std::vector<double> xx = alg.mult(x, x);
  double p = detail::dot(xx, x) / 6.0;
  sign = p >= 0 ? 1.0 : -1.0;
  std::size_t it = 0;
  for (; it < opt.max_iter; ++it) {
    xx = alg.mult(x, x);
    double pnow = detail::dot(xx, x) / 6.0;
    if (pnow * sign < 0) sign = -sign;  // hopped basins; follow the new one
    std::vector<double> grad(d);
    for (std::size_t i = 0; i < d; ++i) grad[i] = 0.5 * sign * xx[i];
    double radial = detail::dot(grad, x);
    for (std::size_t i = 0; i < d; ++i) grad[i] -= radial * x[i];
    double gn = detail::nrm2(grad);
    double step = 0.5 / (1.0 + detail::nrm2(xx));
    if (gn < 1e-14) break;
    for (std::size_t i = 0; i < d; ++i) x[i] += step * grad[i];
    double nn = detail::nrm2(x);
    for (auto& v : x) v /= nn;
    // rescale onto the idempotent sheet and test
    xx = alg.mult(x, x);
    double lam = detail::dot(xx, x);
    if (std::fabs(lam) > 1e-8) {
      std::vector<double> cand(d);
      for (std::size_t i = 0; i < d; ++i) cand[i] = x[i] / lam;
      if (defect_of(cand) < opt.newton_threshold) {
        x = cand;
        break;
      }
    }
  }
  if (it == opt.max_iter && defect_of(x) > opt.newton_threshold) {
    // gradient phase never reached the Newton basin
    std::vector<double> xx2 = alg.mult(x, x);
    double lam = detail::dot(xx2, x);
    if (std::fabs(lam) > 1e-8)
      for (std::size_t i = 0; i < d; ++i) x[i] /= lam;
  }

  // phase two: Gauss-Newton on F(x) = x*x - x with Jacobian 2 L(x) - Id.
  // Idempotents come in group orbits and L(E) carries the eigenvalue 1/2, so
  // the Jacobian is singular exactly at the solutions; the minimum-norm
  // least-squares step (SVD) moves only transversally to the null directions.
  for (std::size_t nit = 0; nit < 80; ++nit, ++it) {
    std::vector<double> f = alg.mult(x, x);
    for (std::size_t i = 0; i < d; ++i) f[i] -= x[i];
    double fr = detail::nrm2(f);
    if (fr < opt.tol) {
      out.converged = true;
      break;
    }
    Mat<double> jac = alg.left_mult(x) * 2.0 - Mat<double>::identity(d);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(jac), Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-7);
    Eigen::VectorXd fe(d);
    for (std::size_t i = 0; i < d; ++i) fe(i) = f[i];
    Eigen::VectorXd delta = svd.solve(fe);
    // backtracking: accept the longest step in {1, 1/2, 1/4, ...} that
    // reduces the residual
    double scale = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 8; ++bt, scale *= 0.5) {
      std::vector<double> trial(d);
      for (std::size_t i = 0; i < d; ++i) trial[i] = x[i] - scale * delta(i);
      if (defect_of(trial) < fr) {
        x = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      for (std::size_t i = 0; i < d; ++i) x[i] -= delta(i);
    }
  }
  out.iterations = it;
  out.defect = defect_of(x);
  out.converged = out.defect < opt.tol * 10;
  double nrm = detail::nrm2(x);
  if (out.converged && nrm < 1e-6) {
    out.converged = false;  // collapsed to zero, not a nontrivial idempotent
    out.note = "converged to zero";
  }
  out.coords = std::move(x);
  return out;
}

// Minimizes |x*x|^2 on the unit sphere, the square-zero probe. Returns the
// smallest value reached; a value bounded away from zero is negative
// evidence for square-zero elements in the algebra.
inline double square_zero_search(const AlgebraCoords& alg, Prng& rng, std::size_t iters = 600) {
  const std::size_t d = alg.dim();
  std::vector<double> x(d);
  for (auto& v : x) v = rng.next_symmetric();
  double nx = detail::nrm2(x);
  for (auto& v : x) v /= nx;
  double best = 1e300;
  double step = 0.2;
  for (std::size_t it = 0; it < iters; ++it) {
    std::vector<double> xx = alg.mult(x, x);
    double val = detail::dot(xx, xx);
    best = std::min(best, val);
    // gradient of |x*x|^2 is 4 L(x)(x*x)
    Mat<double> lx = alg.left_mult(x);
    std::vector<double> grad(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) grad[i] += 4.0 * lx(j, i) * xx[j];
    double radial = detail::dot(grad, x);
    for (std::size_t i = 0; i < d; ++i) grad[i] -= radial * x[i];
    for (std::size_t i = 0; i < d; ++i) x[i] -= step * grad[i];
    double nn = detail::nrm2(x);
    for (auto& v : x) v /= nn;
    step *= 0.995;
  }
  return best;
}

// ---------------------------------------------------------------------------
// catalog of known families, used to fingerprint finder results
// ---------------------------------------------------------------------------

struct CatalogEntry {
  std::string tag;
  std::size_t n = 0;
  std::size_t r = 0;
  std::string norm_squared_exact;  // rational string
  double norm_squared = 0.0;
  std::vector<std::pair<double, std::size_t>> spectrum;  // nonzero part
};

inline bool fingerprint_matches(const CatalogEntry& e, double norm_squared,
                                const std::vector<std::pair<double, std::size_t>>& spectrum,
                                double tol = 1e-6) {
  if (std::fabs(e.norm_squared - norm_squared) > tol) return false;
  if (e.spectrum.size() != spectrum.size()) return false;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    if (std::fabs(e.spectrum[i].first - spectrum[i].first) > tol) return false;
    if (e.spectrum[i].second != spectrum[i].second) return false;
  }
  return true;
}

inline std::optional<std::string> match_catalog(const std::vector<CatalogEntry>& catalog,
                                                double norm_squared,
                                                const std::vector<std::pair<double, std::size_t>>& spectrum,
                                                double tol = 1e-6) {
  for (const auto& e : catalog) {
    if (fingerprint_matches(e, norm_squared, spectrum, tol)) return e.tag;
  }
  return std::nullopt;
}

}  // namespace curvalg
