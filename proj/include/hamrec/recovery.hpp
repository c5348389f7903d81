// Copyright 2026 The hamrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include "hamrec/common.hpp"
#include "hamrec/sensing.hpp"
#include "hamrec/thermal.hpp"

namespace hamrec {

struct SolverOptions {
  double feasibility_tol = 1e-10;   // on ||Cw - y||_2, relative to ||y||_2
  double stationarity_tol = 1e-10;  // on max |w_k - w_{k-1}|, relative to ||y||_2
  long max_iterations = 200000;
  double penalty = 1.0;
  /// When positive, stop as soon as ||Cw - y||_2 <= residual_ball (noisy data).
  double residual_ball = 0.0;

  void validate() const {
    if (!(feasibility_tol > 0.0) || !(stationarity_tol > 0.0) || !(penalty > 0.0)) {
      throw DomainError("SolverOptions: tolerances and penalty must be positive");
    }
    if (max_iterations < 1) throw DomainError("SolverOptions: max_iterations must be >= 1");
    if (residual_ball < 0.0) throw DomainError("SolverOptions: residual_ball must be >= 0");
  }
};

struct RecoveryResult {
  RVector w;
  long iterations = 0;
  double residual = 0.0;  // ||Cw - y||_2
  bool converged = false;
  /// Optimality proven by an explicit dual certificate for a polished vertex.
  bool certified = false;
  bool gram_fallback = false;
};

inline double l1_norm(const RVector& w) { return w.lpNorm<1>(); }
inline double l2_norm(const RVector& w) { return w.norm(); }

namespace detail {

inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

inline RMatrix select_columns(const RMatrix& c, const std::vector<Eigen::Index>& cols) {
  RMatrix out(c.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = c.col(cols[k]);
  return out;
}

/**
 * Tries to certify a vertex built on `support`: solve C_S w_S = y, then find
 * a dual point lambda with C_S^T lambda = sign(w_S) (closest to
 * `dual_guess`) and check ||C^T lambda||_inf <= 1 + slack. Success proves
 * w optimal for min ||w||_1 s.t. Cw = y up to the slack.
 */
inline bool certify_support(const RMatrix& c, const RVector& y, std::vector<Eigen::Index> support,
                            const RVector& dual_guess, double feas_tol, RVector& w_out) {
  constexpr double kDualSlack = 1e-9;
  if (support.empty() || static_cast<Eigen::Index>(support.size()) > c.rows()) return false;
  const RMatrix cs = select_columns(c, support);
  Eigen::ColPivHouseholderQR<RMatrix> qr(cs);
  if (qr.rank() < cs.cols()) return false;
  RVector ws = qr.solve(y);
  if ((cs * ws - y).norm() > feas_tol) return false;

  // Entries that came out as rounding-level zeros are dropped from the sign pattern.
  const double big = ws.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> active;
  std::vector<double> signs;
  for (Eigen::Index k = 0; k < ws.size(); ++k) {
    if (std::abs(ws(k)) > 1e-13 * big) {
      active.push_back(support[static_cast<std::size_t>(k)]);
      signs.push_back(ws(k) > 0 ? 1.0 : -1.0);
    } else {
      ws(k) = 0.0;
    }
  }
  if (active.empty()) return false;
  const RMatrix ca = select_columns(c, active);
  const RVector s = Eigen::Map<const RVector>(signs.data(), static_cast<Eigen::Index>(signs.size()));
  const RMatrix normal = ca.transpose() * ca;
  Eigen::LDLT<RMatrix> ldlt(normal);
  if (ldlt.info() != Eigen::Success) return false;
  const RVector lambda = dual_guess - ca * ldlt.solve(ca.transpose() * dual_guess - s);
  if ((ca.transpose() * lambda - s).cwiseAbs().maxCoeff() > 1e-9) return false;
  if ((c.transpose() * lambda).cwiseAbs().maxCoeff() > 1.0 + kDualSlack) return false;

  RVector w = RVector::Zero(c.cols());
  for (std::size_t k = 0; k < support.size(); ++k) w(support[k]) = ws(static_cast<Eigen::Index>(k));
  if ((c * w - y).norm() > feas_tol) return false;
  w_out = std::move(w);
  return true;
}


/**
 * Primal simplex on min 1^T (p + q) s.t. C p - C q = y, p, q >= 0, started
 * from a basis grown greedily from `priority` (largest first). A basis with
 * ||C^T lambda||_inf <= 1 + slack for C_B^T lambda = sign(w_B) is optimal.
 * Returns false on numerical trouble or when the pivot budget runs out.
 */
inline bool simplex_crossover_nudged(const RMatrix& c, const RVector& y, const RVector& priority,
                                     double feas_tol, double nudge_size, RVector& w_out) {
  constexpr double kDualSlack = 1e-10;
  constexpr double kZeroLevel = 1e-12;
  const Eigen::Index m = c.rows();
  const Eigen::Index ncols = c.cols();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(ncols));
  for (Eigen::Index i = 0; i < ncols; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(priority(a)) > std::abs(priority(b)); });

  // Greedy well-conditioned independent set (Gram-Schmidt, re-orthogonalized).
  std::vector<Eigen::Index> basis;
  RMatrix q(m, m);
  for (double keep : {1e-2, 1e-6}) {
    for (Eigen::Index col : order) {
      if (static_cast<Eigen::Index>(basis.size()) == m) break;
      if (std::find(basis.begin(), basis.end(), col) != basis.end()) continue;
      RVector v = c.col(col);
      const double norm0 = v.norm();
      const auto k = static_cast<Eigen::Index>(basis.size());
      for (int pass = 0; pass < 2; ++pass) v -= q.leftCols(k) * (q.leftCols(k).transpose() * v);
      if (v.norm() <= keep * norm0) continue;
      q.col(k) = v / v.norm();
      basis.push_back(col);
    }
  }
  if (static_cast<Eigen::Index>(basis.size()) < m) return false;

  std::vector<char> in_basis(static_cast<std::size_t>(ncols), 0);
  for (Eigen::Index col : basis) in_basis[static_cast<std::size_t>(col)] = 1;

  Eigen::PartialPivLU<RMatrix> lu(select_columns(c, basis));
  RMatrix binv = lu.inverse();
  RVector sigma(m);
  {
    const RVector wb = binv * y;
    for (Eigen::Index k = 0; k < m; ++k) sigma(k) = wb(k) < 0 ? -1.0 : 1.0;
  }
  // Degenerate vertices make floating-point Bland cycle, so pivot on a
  // right-hand side nudged off every face of the starting basis.  The
  // optimal basis of the nudged problem is then read back against y.
  RVector y_work = y;
  {
    const RMatrix b0 = select_columns(c, basis);
    RVector nudge(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double frac = std::fmod(0.6180339887498949 * static_cast<double>(k + 1), 1.0);
      nudge(k) = sigma(k) * nudge_size * (1.0 + frac);
    }
    y_work += b0 * nudge;
  }

  const long max_pivots = 100 + 50 * static_cast<long>(m);
  long since_refactor = 0;
  long degenerate_run = 0;
  for (long pivot = 0; pivot <= max_pivots; ++pivot) {
    RVector xb = (binv * y_work).cwiseProduct(sigma);
    if (xb.minCoeff() < -1e-9 && since_refactor > 0) {
      lu.compute(select_columns(c, basis));
      binv = lu.inverse();
      since_refactor = 0;
      xb = (binv * y_work).cwiseProduct(sigma);
    }
    if (xb.minCoeff() < -1e-9) return false;
    // Basic values that sank to the zero level (or a little below, from
    // update drift) are lifted back by moving y_work. The perturbed RHS is
    // arbitrary; only the final readback is held against y.
    for (Eigen::Index k = 0; k < m; ++k) {
      if (xb(k) >= 0.5 * nudge_size) continue;
      const double frac = std::fmod(0.6180339887498949 * static_cast<double>(pivot * m + k + 1), 1.0);
      const double lifted = nudge_size * (1.0 + frac);
      y_work += c.col(basis[static_cast<std::size_t>(k)]) * (sigma(k) * (lifted - xb(k)));
      xb(k) = lifted;
    }

    const RVector lambda = binv.transpose() * sigma;
    const RVector g = c.transpose() * lambda;

    // Dantzig pricing; Bland's rule once degenerate steps start repeating.
    const bool bland = degenerate_run > 8;
    Eigen::Index enter = -1;
    double best = 1.0 + kDualSlack;
    for (Eigen::Index j = 0; j < ncols; ++j) {
      if (in_basis[static_cast<std::size_t>(j)]) continue;
      if (std::abs(g(j)) > best) {
        enter = j;
        if (bland) break;
        best = std::abs(g(j));
      }
    }
    if (enter < 0) {
      // Optimality is only declared on a fresh factorization.
      if (since_refactor > 0) {
        lu.compute(select_columns(c, basis));
        binv = lu.inverse();
        since_refactor = 0;
        continue;
      }
      RVector xt = lu.solve(y).cwiseProduct(sigma);
      if (xt.minCoeff() < -1e-9) return false;
      xt = xt.cwiseMax(0.0);
      RVector w = RVector::Zero(ncols);
      for (Eigen::Index k = 0; k < m; ++k) w(basis[static_cast<std::size_t>(k)]) = sigma(k) * xt(k);
      if ((c * w - y).norm() > feas_tol) return false;
      w_out = std::move(w);
      return true;
    }

    const double tau = g(enter) > 0 ? 1.0 : -1.0;
    const RVector dw = binv * (tau * c.col(enter));
    const RVector dx = dw.cwiseProduct(sigma);
    const double pivot_tol = 1e-9 * std::max(1.0, dx.cwiseAbs().maxCoeff());
    Eigen::Index leave = -1;
    double step = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < m; ++k) {
      if (dx(k) <= pivot_tol) continue;
      const double t = xb(k) / dx(k);
      const bool tie = t == step && leave >= 0 &&
                       (bland ? basis[static_cast<std::size_t>(k)] < basis[static_cast<std::size_t>(leave)]
                              : dx(k) > dx(leave));
      if (t < step || tie) {
        step = t;
        leave = k;
      }
    }
    if (leave < 0) return false;
    degenerate_run = step <= kZeroLevel ? degenerate_run + 1 : 0;

    const double piv = dw(leave);
    binv.row(leave) /= piv;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i != leave && dw(i) != 0.0) binv.row(i) -= dw(i) * binv.row(leave);
    }
    in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = 0;
    in_basis[static_cast<std::size_t>(enter)] = 1;
    basis[static_cast<std::size_t>(leave)] = enter;
    sigma(leave) = tau;
    if (++since_refactor >= 32) {
      lu.compute(select_columns(c, basis));
      binv = lu.inverse();
      since_refactor = 0;
    }
  }
  return false;
}

// Small nudges keep genuine tiny components; larger ones survive rounding.
inline bool simplex_crossover(const RMatrix& c, const RVector& y, const RVector& priority,
                              double feas_tol, RVector& w_out) {
  for (double nudge : {1e-11, 1e-9, 1e-7}) {
    if (simplex_crossover_nudged(c, y, priority, feas_tol, nudge, w_out)) return true;
  }
  return false;
}

}  // namespace detail

/**
 * Solves min ||w||_1 subject to C w = y by alternating an affine projection
 * with soft-thresholding (ADMM on the indicator/L1 split).
 *
 * The data are scaled to ||y||_2 = 1 before iterating, so the penalty acts on
 * a normalized problem and the result is exactly scale covariant. For rows
 * with C C^T = I the projection is z - C^T (C z - y); otherwise a Cholesky
 * factor of C C^T is used and `gram_fallback` is set.
 *
 * The iteration stops when both the feasibility residual and the change
 * between successive iterates are below tolerance. Thermal signals carry
 * components many orders of magnitude below the threshold, which the
 * splitting alone only activates after ~1/|w_i| steps, so at geometrically
 * spaced checkpoints the iterate is also finished exactly: first by solving
 * on its own support, then (once its sign pattern has settled) by a simplex
 * crossover warm-started from it. Either finish is accepted only with a dual
 * certificate of optimality and sets `certified`.
 */
inline RecoveryResult basis_pursuit(const RMatrix& c, const RVector& y, const SolverOptions& opts = {}) {
  opts.validate();
  if (c.rows() != y.size()) throw DomainError("basis_pursuit: row count does not match y");
  if (c.rows() == 0 || c.cols() == 0) throw DomainError("basis_pursuit: empty system");
  if (c.rows() > c.cols()) throw DomainError("basis_pursuit: more rows than columns");

  const Eigen::Index rows = c.rows();
  const Eigen::Index cols = c.cols();
  RecoveryResult out;
  out.w = RVector::Zero(cols);

  const RMatrix gram = c * c.transpose();
  const bool orthonormal = (gram - RMatrix::Identity(rows, rows)).cwiseAbs().maxCoeff() <= 1e-8;
  Eigen::LLT<RMatrix> gram_factor;
  if (!orthonormal) {
    gram_factor.compute(gram);
    if (gram_factor.info() != Eigen::Success) {
      throw DomainError("basis_pursuit: rows of C are linearly dependent");
    }
    out.gram_fallback = true;
  }

  const double scale = y.norm();
  if (scale == 0.0) {
    out.converged = true;
    return out;
  }
  const RVector target = y / scale;

  auto row_space_coords = [&](const RVector& r) -> RVector {
    return orthonormal ? r : RVector(gram_factor.solve(r));
  };
  auto project = [&](const RVector& v) -> RVector {
    return v - c.transpose() * row_space_coords(c * v - target);
  };

  const double threshold = 1.0 / opts.penalty;
  const bool noisy = opts.residual_ball > 0.0;
  const double feas_tol = noisy ? std::max(opts.feasibility_tol, opts.residual_ball / scale) : opts.feasibility_tol;

  RVector z = project(RVector::Zero(cols));
  RVector u = RVector::Zero(cols);
  RVector x = z;
  RVector z_next(cols);
  double residual = (c * z - target).norm();

  constexpr long kFirstCheckpoint = 16;
  long next_checkpoint = kFirstCheckpoint;
  std::vector<signed char> last_pattern;
  std::vector<signed char> tried_pattern;

  auto sign_pattern = [&]() {
    std::vector<signed char> pat(static_cast<std::size_t>(cols));
    for (Eigen::Index i = 0; i < cols; ++i) pat[static_cast<std::size_t>(i)] = z(i) > 0 ? 1 : (z(i) < 0 ? -1 : 0);
    return pat;
  };

  auto try_finish = [&](bool force_crossover) -> bool {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < cols; ++i) {
      if (z(i) != 0.0) support.push_back(i);
    }
    RVector w;
    if (static_cast<Eigen::Index>(support.size()) <= rows) {
      // rho*u is a subgradient of ||z||_1 lying (at the fixed point) in range(C^T).
      const RVector dual_guess = opts.penalty * row_space_coords(c * u);
      if (detail::certify_support(c, target, support, dual_guess, feas_tol, w)) {
        z = std::move(w);
        return true;
      }
    }
    auto pattern = sign_pattern();
    const bool settled = pattern == last_pattern;
    last_pattern = pattern;
    if ((settled || force_crossover) && pattern != tried_pattern) {
      tried_pattern = pattern;
      // Support of z first, then the feasible iterate's largest entries.
      const RVector priority = z.cwiseAbs() + 1e-3 * x.cwiseAbs() / std::max(1.0, x.cwiseAbs().maxCoeff());
      if (detail::simplex_crossover(c, target, priority, feas_tol, w)) {
        z = std::move(w);
        return true;
      }
    }
    return false;
  };

  for (long it = 1; it <= opts.max_iterations; ++it) {
    x = project(z - u);
    for (Eigen::Index i = 0; i < cols; ++i) z_next(i) = detail::soft_threshold(x(i) + u(i), threshold);
    u += x - z_next;
    const double change = (z_next - z).cwiseAbs().maxCoeff();
    z.swap(z_next);
    out.iterations = it;
    const bool stalled = change <= opts.stationarity_tol;
    if (noisy || stalled) {
      residual = (c * z - target).norm();
      if (residual <= feas_tol) {
        out.converged = true;
        break;
      }
    }
    if (noisy) continue;
    const bool checkpoint = it == next_checkpoint;
    if (checkpoint) next_checkpoint += std::max(16L, next_checkpoint / 2);
    const bool last = it == opts.max_iterations;
    if (it < kFirstCheckpoint && !last) continue;
    if ((checkpoint || (stalled && sign_pattern() != tried_pattern) || last) && try_finish(stalled || last)) {
      residual = (c * z - target).norm();
      out.converged = true;
      out.certified = true;
      break;
    }
  }
  if (!out.converged) residual = (c * z - target).norm();
  out.w = scale * z;
  out.residual = scale * residual;
  return out;
}

inline RecoveryResult basis_pursuit(const CompressionMatrix& c, const RVector& y, const SolverOptions& opts = {}) {
  return basis_pursuit(c.rows, y, opts);
}

/// Measured components copied in, all others zero.
inline PolarizationVector no_cs_estimate(const MeasurementPlan& plan, const RVector& y_direct) {
  if (static_cast<std::size_t>(y_direct.size()) != plan.size()) {
    throw DomainError("no_cs_estimate: measurement count does not match plan");
  }
  PolarizationVector est{plan.n, RVector::Zero(static_cast<Eigen::Index>(signal_length(plan.n)))};
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const std::uint64_t a = plan.indices[k];
    if (a < 1 || a > signal_length(plan.n)) throw DomainError("no_cs_estimate: index out of range");
    est.v(static_cast<Eigen::Index>(a - 1)) = y_direct(static_cast<Eigen::Index>(k));
  }
  return est;
}

}  // namespace hamrec
