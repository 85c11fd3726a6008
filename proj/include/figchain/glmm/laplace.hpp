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

// Inner problem and Laplace approximation.
//
// The random effects are solved in standardized form u = σu·a, v = σv·c, so
// the objective
//
//   h(a, c) = Σ_rows [y η − log(1 + e^η)] − ½‖a‖² − ½‖c‖²,
//   η = x'β + σu a_i + σv c_j
//
// has negative Hessian H = I + D½ Z'WZ D½, which stays well conditioned as
// σ → 0 and equals I at σ = 0. Its value at the mode is the penalized
// log-likelihood of the original (u, v) problem, and
//
//   log L ≈ h(â, ĉ) − ½ log det H.
//
// H has two diagonal blocks (participants, items) coupled by a dense
// participant × item block. Newton steps eliminate the larger diagonal block
// and factor the Schur complement of the smaller one.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "figchain/error.hpp"
#include "figchain/glmm/dataset.hpp"

namespace figchain::glmm {

struct Theta {
  double sigma_u = 1;
  double sigma_v = 1;
};

struct ModeOptions {
  int max_iter = 200;
  double tol = 1e-8;  // gradient max-norm in (u, v)
};

struct JointMode {
  std::vector<double> u;  // participant intercepts, original scale
  std::vector<double> v;  // item intercepts
  std::vector<double> a;  // standardized, kept for warm starts
  std::vector<double> c;
  double penalized_loglik = 0;
  double logdet = 0;             // log det H
  double gradient_max_norm = 0;  // in (u, v); coordinates with σ = 0 excluded
  bool negative_definite = false;
  double max_pivot = 0;  // largest pivot of the penalized Hessian, < 0 when definite
  int iterations = 0;
};

inline double log1pexp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
inline double logistic(double x) {
  return x >= 0 ? 1 / (1 + std::exp(-x)) : std::exp(x) / (1 + std::exp(x));
}

/// Plain logistic log-likelihood at β (no random effects).
inline double logistic_loglik(const Beta& beta, const Dataset& d) {
  double ll = 0;
  for (const auto& r : d.rows) {
    double eta = d.linear_predictor(r, beta);
    ll += r.y * eta - log1pexp(eta);
  }
  return ll;
}

namespace detail {

struct Factor {
  double logdet = 0;
  double max_pivot = -std::numeric_limits<double>::infinity();  // of −H
  bool ok = false;
};

/// Solves H δ = g in place for H = [diag(A) B; B' diag(C)].
inline Factor schur_solve(const std::vector<double>& A, const std::vector<double>& C, const Eigen::MatrixXd& B,
                          std::vector<double>& gu, std::vector<double>& gv) {
  Factor f;
  const auto np = static_cast<Eigen::Index>(A.size()), ni = static_cast<Eigen::Index>(C.size());
  bool drop_u = np >= ni;  // eliminate the larger block
  const std::vector<double>& big = drop_u ? A : C;
  const std::vector<double>& small = drop_u ? C : A;
  std::vector<double>& gb = drop_u ? gu : gv;
  std::vector<double>& gs = drop_u ? gv : gu;
  const Eigen::Index nb = drop_u ? np : ni, ns = drop_u ? ni : np;
  auto coupling = [&](Eigen::Index b, Eigen::Index s) { return drop_u ? B(b, s) : B(s, b); };

  for (double x : big) {
    if (!(x > 0)) return f;
    f.logdet += std::log(x);
    f.max_pivot = std::max(f.max_pivot, -x);
  }
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(ns, ns);
  Eigen::VectorXd rhs(ns);
  for (Eigen::Index s = 0; s < ns; ++s) {
    S(s, s) = small[static_cast<std::size_t>(s)];
    rhs(s) = gs[static_cast<std::size_t>(s)];
  }
  Eigen::VectorXd row(ns);
  for (Eigen::Index b = 0; b < nb; ++b) {
    double inv = 1 / big[static_cast<std::size_t>(b)];
    for (Eigen::Index s = 0; s < ns; ++s) row(s) = coupling(b, s);
    S.noalias() -= inv * row * row.transpose();
    rhs -= (inv * gb[static_cast<std::size_t>(b)]) * row;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) return f;
  const auto& L = llt.matrixL();
  for (Eigen::Index s = 0; s < ns; ++s) {
    double piv = L(s, s) * L(s, s);
    if (!(piv > 0)) return f;
    f.logdet += std::log(piv);
    f.max_pivot = std::max(f.max_pivot, -piv);
  }
  Eigen::VectorXd ds = llt.solve(rhs);
  for (Eigen::Index s = 0; s < ns; ++s) gs[static_cast<std::size_t>(s)] = ds(s);
  for (Eigen::Index b = 0; b < nb; ++b) {
    double acc = gb[static_cast<std::size_t>(b)];
    for (Eigen::Index s = 0; s < ns; ++s) acc -= coupling(b, s) * ds(s);
    gb[static_cast<std::size_t>(b)] = acc / big[static_cast<std::size_t>(b)];
  }
  f.ok = true;
  return f;
}

}  // namespace detail

/// Mode of the penalized log-likelihood over (u, v) for fixed θ and β.
/// Throws NonConvergence after `opts.max_iter` Newton steps.
inline JointMode joint_mode(const Theta& theta, const Beta& beta, const Dataset& d, const ModeOptions& opts = {},
                            const JointMode* warm = nullptr) {
  if (theta.sigma_u < 0 || theta.sigma_v < 0 || !std::isfinite(theta.sigma_u) || !std::isfinite(theta.sigma_v))
    throw Error(ErrorKind::InvalidDataset, "variance components must be finite and nonnegative");
  const auto np = static_cast<std::size_t>(d.n_participants), ni = static_cast<std::size_t>(d.n_items);
  const double su = theta.sigma_u, sv = theta.sigma_v;
  JointMode m;
  m.a.assign(np, 0);
  m.c.assign(ni, 0);
  if (warm && warm->a.size() == np && warm->c.size() == ni) {
    m.a = warm->a;
    m.c = warm->c;
  }
  std::vector<double> eta0(d.rows.size());
  for (std::size_t k = 0; k < d.rows.size(); ++k) eta0[k] = d.linear_predictor(d.rows[k], beta);

  auto objective = [&](const std::vector<double>& a, const std::vector<double>& c) {
    double h = 0;
    for (std::size_t k = 0; k < d.rows.size(); ++k) {
      const Row& r = d.rows[k];
      double eta = eta0[k] + su * a[static_cast<std::size_t>(r.participant)] + sv * c[static_cast<std::size_t>(r.item)];
      h += r.y * eta - log1pexp(eta);
    }
    for (double x : a) h -= 0.5 * x * x;
    for (double x : c) h -= 0.5 * x * x;
    return h;
  };

  std::vector<double> gu(np), gv(ni), A(np), C(ni);
  Eigen::MatrixXd B(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(ni));
  double h = objective(m.a, m.c);
  for (int iter = 0;; ++iter) {
    std::fill(gu.begin(), gu.end(), 0.0);
    std::fill(gv.begin(), gv.end(), 0.0);
    std::fill(A.begin(), A.end(), 0.0);
    std::fill(C.begin(), C.end(), 0.0);
    B.setZero();
    for (std::size_t k = 0; k < d.rows.size(); ++k) {
      const Row& r = d.rows[k];
      auto i = static_cast<std::size_t>(r.participant), j = static_cast<std::size_t>(r.item);
      double mu = logistic(eta0[k] + su * m.a[i] + sv * m.c[j]);
      double w = mu * (1 - mu);
      gu[i] += r.y - mu;
      gv[j] += r.y - mu;
      A[i] += w;
      C[j] += w;
      B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += w;
    }
    // Score in the standardized parametrization, and its (u, v) counterpart.
    double gmax_b = 0, gmax = 0;
    for (std::size_t i = 0; i < np; ++i) {
      gu[i] = su * gu[i] - m.a[i];
      gmax_b = std::max(gmax_b, std::abs(gu[i]));
      if (su > 0) gmax = std::max(gmax, std::abs(gu[i]) * std::max(1.0, 1 / su));
      A[i] = 1 + su * su * A[i];
    }
    for (std::size_t j = 0; j < ni; ++j) {
      gv[j] = sv * gv[j] - m.c[j];
      gmax_b = std::max(gmax_b, std::abs(gv[j]));
      if (sv > 0) gmax = std::max(gmax, std::abs(gv[j]) * std::max(1.0, 1 / sv));
      C[j] = 1 + sv * sv * C[j];
    }
    gmax = std::max(gmax, gmax_b);
    B *= su * sv;
    m.gradient_max_norm = 0;
    for (std::size_t i = 0; i < np && su > 0; ++i) m.gradient_max_norm = std::max(m.gradient_max_norm, std::abs(gu[i]) / su);
    for (std::size_t j = 0; j < ni && sv > 0; ++j) m.gradient_max_norm = std::max(m.gradient_max_norm, std::abs(gv[j]) / sv);

    auto step_u = gu, step_v = gv;
    auto f = detail::schur_solve(A, C, B, step_u, step_v);
    if (!f.ok) throw Error(ErrorKind::NonConvergence, "penalized Hessian lost definiteness");
    m.logdet = f.logdet;
    m.max_pivot = f.max_pivot;
    m.negative_definite = f.max_pivot < 0;
    m.iterations = iter;
    if (gmax < opts.tol) break;
    if (iter >= opts.max_iter)
      throw Error(ErrorKind::NonConvergence, "inner Newton did not converge (gradient " + std::to_string(gmax) + ")");

    std::vector<double> na(np), nc(ni);
    // Near the mode the true gain is below the rounding error of h.
    const double slack = 1e-13 * (1 + std::abs(h));
    double t = 1, hn = h;
    bool improved = false;
    for (int half = 0; half < 40; ++half, t *= 0.5) {
      for (std::size_t i = 0; i < np; ++i) na[i] = m.a[i] + t * step_u[i];
      for (std::size_t j = 0; j < ni; ++j) nc[j] = m.c[j] + t * step_v[j];
      hn = objective(na, nc);
      if (hn >= h - slack) {
        improved = true;
        break;
      }
    }
    if (!improved) {
      // No ascent possible at double precision; accept when the score is at
      // rounding level.
      if (gmax_b < 1e-10) break;
      throw Error(ErrorKind::NonConvergence, "inner line search failed (gradient " + std::to_string(gmax) + ")");
    }
    m.a.swap(na);
    m.c.swap(nc);
    h = hn;
  }
  m.penalized_loglik = h;
  m.u.resize(np);
  m.v.resize(ni);
  for (std::size_t i = 0; i < np; ++i) m.u[i] = su * m.a[i];
  for (std::size_t j = 0; j < ni; ++j) m.v[j] = sv * m.c[j];
  return m;
}

inline double laplace_loglik(const JointMode& m) { return m.penalized_loglik - 0.5 * m.logdet; }

/// Laplace-approximated marginal log-likelihood.
inline double laplace_loglik(const Theta& theta, const Beta& beta, const Dataset& d, const ModeOptions& opts = {},
                             const JointMode* warm = nullptr) {
  return laplace_loglik(joint_mode(theta, beta, d, opts, warm));
}

}  // namespace figchain::glmm
