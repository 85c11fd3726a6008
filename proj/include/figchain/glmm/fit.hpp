// Copyright 2026 The figchain Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Maximum Laplace likelihood over (β, log σu, log σv), Wald tests and the
// odds-ratio / probability report.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "figchain/glmm/dataset.hpp"
#include "figchain/glmm/laplace.hpp"
#include "figchain/glmm/nelder_mead.hpp"

namespace figchain::glmm {

inline constexpr double kSigmaFloor = 1e-6;
// Below this the likelihood is flat in log σ to ~1e-8; reported as zero.
inline constexpr double kSigmaNegligible = 1e-4;
inline constexpr double kSeparationBound = 15;

struct FitOptions {
  std::uint64_t seed = 0;
  int max_iter = 2000;  // per simplex run
  double tol = 1e-6;    // relative log-likelihood spread
  double xtol = 1e-6;   // simplex size
  int restarts = 3;
  std::optional<Theta> fixed_sigma;  // hold (σu, σv) instead of estimating
  Beta start_beta{0, 0, 0, 0};
  Theta start_sigma{1, 1};
  ModeOptions inner;
};

struct FitResult {
  Beta beta{};
  Beta se{};
  double sigma_u = 0;
  double sigma_v = 0;
  bool sigma_u_at_floor = false;
  bool sigma_v_at_floor = false;
  std::vector<double> u;  // participant modes at the optimum
  std::vector<double> v;  // item modes
  double loglik = 0;
  double start_loglik = 0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
  std::vector<std::string> warnings;
};

namespace detail {

class Objective {
 public:
  Objective(const Dataset& d, const FitOptions& o) : d_(d), o_(o) {}

  std::size_t dims() const { return o_.fixed_sigma ? 4 : 6; }

  static std::vector<double> pack(const Beta& b, const Theta& t, bool with_sigma) {
    std::vector<double> x(b.begin(), b.end());
    if (with_sigma) {
      x.push_back(std::log(std::max(t.sigma_u, kSigmaFloor)));
      x.push_back(std::log(std::max(t.sigma_v, kSigmaFloor)));
    }
    return x;
  }

  Beta beta(const std::vector<double>& x) const { return {x[0], x[1], x[2], x[3]}; }
  Theta theta(const std::vector<double>& x) const {
    if (o_.fixed_sigma) return *o_.fixed_sigma;
    return {std::exp(std::max(x[4], std::log(kSigmaFloor))), std::exp(std::max(x[5], std::log(kSigmaFloor)))};
  }

  /// Marginal log-likelihood; −∞ when the inner problem fails. Warm-starts
  /// from the previous call, or from `anchor` when given.
  double loglik(const std::vector<double>& x, const JointMode* anchor = nullptr) {
    try {
      const JointMode* warm = anchor ? anchor : (have_last_ ? &last_ : nullptr);
      JointMode m = joint_mode(theta(x), beta(x), d_, o_.inner, warm);
      double ll = laplace_loglik(m);
      if (!anchor) {
        last_ = std::move(m);
        have_last_ = true;
      }
      return ll;
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  }

 private:
  const Dataset& d_;
  const FitOptions& o_;
  JointMode last_;
  bool have_last_ = false;
};

}  // namespace detail

/// Throws InvalidDataset; reports non-convergence through `converged` and
/// `warnings`.
inline FitResult fit(const Dataset& d, const FitOptions& opts = {}) {
  validate(d);
  if (!has_both_versions(d)) throw Error(ErrorKind::InvalidDataset, "both versions must be present to estimate the version effect");
  FitResult res;
  detail::Objective obj(d, opts);
  const bool free_sigma = !opts.fixed_sigma;
  const std::size_t n = obj.dims();

  SimplexOptions so;
  so.max_iter = opts.max_iter;
  so.ftol = opts.tol;
  so.xtol = opts.xtol;
  if (free_sigma) {
    so.lower.assign(n, -std::numeric_limits<double>::infinity());
    so.lower[4] = so.lower[5] = std::log(kSigmaFloor);
  }
  auto f = [&](const std::vector<double>& x) { return -obj.loglik(x); };

  auto x0 = detail::Objective::pack(opts.start_beta, opts.start_sigma, free_sigma);
  res.start_loglik = obj.loglik(x0);
  std::vector<double> step(n, 0.5);
  SimplexResult best = nelder_mead(f, x0, step, so);
  int iterations = best.iterations, evaluations = best.evaluations;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> mag(0.05, 0.5);
  std::bernoulli_distribution sign(0.5);
  for (int r = 0; r < opts.restarts; ++r) {
    for (auto& s : step) s = (sign(rng) ? 1 : -1) * mag(rng);
    SimplexResult run = nelder_mead(f, best.x, step, so);
    iterations += run.iterations;
    evaluations += run.evaluations;
    if (run.f <= best.f) best = std::move(run);
  }

  res.beta = obj.beta(best.x);
  Theta th = obj.theta(best.x);
  res.sigma_u = th.sigma_u;
  res.sigma_v = th.sigma_v;
  res.loglik = -best.f;
  res.converged = best.converged && std::isfinite(res.loglik);
  res.iterations = iterations;
  res.evaluations = evaluations;
  if (!res.converged)
    res.warnings.push_back("NonConvergence: simplex stopped after " + std::to_string(best.iterations) +
                           " iterations without meeting the tolerance");
  if (free_sigma) {
    res.sigma_u_at_floor = res.sigma_u < kSigmaNegligible;
    res.sigma_v_at_floor = res.sigma_v < kSigmaNegligible;
  }

  JointMode mode = joint_mode(th, res.beta, d, opts.inner);
  res.u = mode.u;
  res.v = mode.v;

  // Standard errors from a central-difference Hessian over the free
  // coordinates; σ components at the floor are held fixed.
  std::vector<std::size_t> free;
  for (std::size_t k = 0; k < 4; ++k) free.push_back(k);
  if (free_sigma) {
    if (!res.sigma_u_at_floor) free.push_back(4);
    if (!res.sigma_v_at_floor) free.push_back(5);
  }
  const auto m = static_cast<Eigen::Index>(free.size());
  Eigen::MatrixXd H(m, m);
  auto at = [&](std::vector<double> x) { return obj.loglik(x, &mode); };
  const double f0 = at(best.x);
  std::vector<double> h(free.size());
  for (std::size_t a = 0; a < free.size(); ++a) h[a] = 1e-3 * std::max(1.0, std::abs(best.x[free[a]]));
  for (Eigen::Index a = 0; a < m; ++a) {
    auto ka = free[static_cast<std::size_t>(a)];
    double ha = h[static_cast<std::size_t>(a)];
    auto xp = best.x, xm = best.x;
    xp[ka] += ha;
    xm[ka] -= ha;
    H(a, a) = (at(xp) - 2 * f0 + at(xm)) / (ha * ha);
    for (Eigen::Index b = 0; b < a; ++b) {
      auto kb = free[static_cast<std::size_t>(b)];
      double hb = h[static_cast<std::size_t>(b)];
      auto pp = best.x, pm = best.x, mp = best.x, mm = best.x;
      pp[ka] += ha, pp[kb] += hb;
      pm[ka] += ha, pm[kb] -= hb;
      mp[ka] -= ha, mp[kb] += hb;
      mm[ka] -= ha, mm[kb] -= hb;
      H(a, b) = H(b, a) = (at(pp) - at(pm) - at(mp) + at(mm)) / (4 * ha * hb);
    }
  }
  auto invert = [&](const Eigen::MatrixXd& info) {
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (!info.allFinite() || llt.info() != Eigen::Success) return false;
    Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
    for (std::size_t k = 0; k < 4; ++k) res.se[k] = std::sqrt(cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
    return true;
  };
  if (!invert(-H)) {
    if (m > 4 && invert(-H.topLeftCorner(4, 4))) {
      res.warnings.push_back("information is singular in the variance components; standard errors are conditional on sigma");
    } else {
      res.se.fill(std::nan(""));
      res.warnings.push_back("observed information is not positive definite; standard errors unavailable");
      res.converged = false;
    }
  }

  bool identical = true;
  for (const auto& r : d.rows) identical = identical && r.y == d.rows.front().y;
  bool big = false;
  for (double b : res.beta) big = big || std::abs(b) > kSeparationBound;
  if (identical || big)
    res.warnings.push_back(identical ? "SeparationWarning: all outcomes are identical"
                                     : "SeparationWarning: a fixed effect exceeds |15| (quasi-separation)");
  if (res.sigma_u_at_floor) res.warnings.push_back("sigma_u at the floor; effectively zero");
  if (res.sigma_v_at_floor) res.warnings.push_back("sigma_v at the floor; effectively zero");
  return res;
}

inline bool has_separation_warning(const FitResult& r) {
  for (const auto& w : r.warnings)
    if (w.rfind("SeparationWarning", 0) == 0) return true;
  return false;
}

/// Two-sided normal tail probability 2Φ(−|z|).
inline double two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

struct WaldTest {
  double z = 0;
  double p = 1;
};

inline std::array<WaldTest, 4> wald(const Beta& estimate, const Beta& se) {
  std::array<WaldTest, 4> out{};
  for (std::size_t k = 0; k < 4; ++k) {
    double z = estimate[k] == 0 ? 0 : estimate[k] / se[k];
    out[k] = {z, two_sided_p(z)};
  }
  return out;
}

inline std::array<WaldTest, 4> wald(const FitResult& f) { return wald(f.beta, f.se); }

struct CoefficientReport {
  std::string name;
  double estimate = 0;
  double se = 0;
  double z = 0;
  double p = 1;
  double odds_ratio = 1;
  bool significant = false;  // p < alpha
};

struct ComparisonReport {
  std::array<CoefficientReport, 4> coefficients;
  double baseline_probability = 0;  // V0, average participant, average item
  double version_probability = 0;   // V1, same reference covariates
  double pretest_odds_change = 0;   // per pre-test point, exp(b2) − 1
  bool interaction_significant = false;
  bool interaction_positive = false;
  double alpha = 0.05;
  std::optional<double> sigma_u, sigma_v, loglik;
  std::optional<bool> converged;
  std::vector<std::string> warnings;
};

/// Pure link arithmetic; standard errors are optional (NaN → no test).
inline ComparisonReport report(const Beta& beta, const Beta& se = {std::nan(""), std::nan(""), std::nan(""), std::nan("")},
                               double alpha = 0.05) {
  ComparisonReport r;
  r.alpha = alpha;
  auto tests = wald(beta, se);
  for (std::size_t k = 0; k < 4; ++k) {
    auto& c = r.coefficients[k];
    c.name = kCoefficientNames[k];
    c.estimate = beta[k];
    c.se = se[k];
    c.z = tests[k].z;
    c.p = tests[k].p;
    c.odds_ratio = std::exp(beta[k]);
    c.significant = std::isfinite(c.p) && std::isfinite(se[k]) && c.p < alpha;
  }
  r.baseline_probability = logistic(beta[0]);
  r.version_probability = logistic(beta[0] + beta[1]);
  r.pretest_odds_change = std::exp(beta[2]) - 1;
  r.interaction_significant = r.coefficients[3].significant;
  r.interaction_positive = beta[3] > 0;
  return r;
}

inline ComparisonReport report(const FitResult& f, double alpha = 0.05) {
  ComparisonReport r = report(f.beta, f.se, alpha);
  r.sigma_u = f.sigma_u;
  r.sigma_v = f.sigma_v;
  r.loglik = f.loglik;
  r.converged = f.converged;
  r.warnings = f.warnings;
  return r;
}

inline nlohmann::ordered_json to_json(const ComparisonReport& r) {
  using J = nlohmann::ordered_json;
  auto num = [](double x) { return std::isfinite(x) ? J(x) : J(nullptr); };
  J coefs = J::array();
  for (const auto& c : r.coefficients)
    coefs.push_back(J{{"name", c.name},
                      {"estimate", num(c.estimate)},
                      {"se", num(c.se)},
                      {"z", num(c.z)},
                      {"p", num(c.p)},
                      {"odds_ratio", num(c.odds_ratio)},
                      {"significant", c.significant}});
  J j{{"coefficients", coefs},
      {"baseline_probability", r.baseline_probability},
      {"version_probability", r.version_probability},
      {"pretest_odds_change", r.pretest_odds_change},
      {"interaction_significant", r.interaction_significant},
      {"interaction_positive", r.interaction_positive},
      {"alpha", r.alpha}};
  if (r.sigma_u) j["sigma_u"] = *r.sigma_u;
  if (r.sigma_v) j["sigma_v"] = *r.sigma_v;
  if (r.loglik) j["loglik"] = *r.loglik;
  if (r.converged) j["converged"] = *r.converged;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace figchain::glmm
