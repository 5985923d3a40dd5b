// Copyright 2026 The distest Authors
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

// Infeasible-start primal-dual interior-point method for SDPs in SDPA form
// over a product of PSD blocks and a nonnegative orthant:
//
//   (P)  minimize   c^T x    subject to  X = sum_k F_k x_k - F_0  in K
//   (D)  maximize  <F_0, Y>  subject to  <F_k, Y> = c_k,  Y in K
//
// Search directions are HKM with Mehrotra predictor-corrector. The Schur
// complement M_kl = <F_k, X^-1 F_l Y> is assembled from the sparse F_k and
// factored densely.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

namespace distest {

template <typename Scalar>
struct StandardFormSdp {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// One nonzero of a coefficient matrix F_k; both triangles are stored.
  struct Entry {
    int variable;
    Eigen::Index row;
    Eigen::Index col;
    Scalar value;
  };

  struct Block {
    Matrix f0;                   // F_0 restricted to this block
    std::vector<Entry> entries;  // sorted by variable
  };

  /// Diagonal part: the componentwise cone of vectors >= 0.
  struct Linear {
    Vector f0;
    std::vector<Entry> entries;  // row == col, sorted by variable
  };

  int num_variables = 0;
  Vector cost;
  std::vector<Block> blocks;
  Linear linear;
};

/// An element of the cone's ambient space.
template <typename Scalar>
struct ConePoint {
  using Matrix = typename StandardFormSdp<Scalar>::Matrix;
  using Vector = typename StandardFormSdp<Scalar>::Vector;

  std::vector<Matrix> blocks;
  Vector linear;

  ConePoint& operator+=(const ConePoint& o) {
    for (std::size_t b = 0; b < blocks.size(); ++b) blocks[b] += o.blocks[b];
    linear += o.linear;
    return *this;
  }
  ConePoint& operator-=(const ConePoint& o) {
    for (std::size_t b = 0; b < blocks.size(); ++b) blocks[b] -= o.blocks[b];
    linear -= o.linear;
    return *this;
  }
  void add_scaled(Scalar t, const ConePoint& o) {
    for (std::size_t b = 0; b < blocks.size(); ++b) blocks[b] += t * o.blocks[b];
    linear += t * o.linear;
  }
  Scalar dot(const ConePoint& o) const {
    Scalar total = linear.dot(o.linear);
    for (std::size_t b = 0; b < blocks.size(); ++b) total += blocks[b].cwiseProduct(o.blocks[b]).sum();
    return total;
  }
  Scalar norm() const {
    using std::sqrt;
    return sqrt(dot(*this));
  }
};

enum class IpmStatus { Converged, PrimalInfeasible, IterationLimit, Stalled, Breakdown };

template <typename Scalar>
struct IpmResult {
  using Vector = typename StandardFormSdp<Scalar>::Vector;

  IpmStatus status = IpmStatus::Breakdown;
  Vector x;
  ConePoint<Scalar> X;
  ConePoint<Scalar> Y;
  Scalar primal_objective = 0;  // c^T x
  Scalar dual_objective = 0;    // <F_0, Y>
  Scalar primal_infeasibility = 0;
  Scalar dual_infeasibility = 0;
  Scalar relative_gap = 0;
  int iterations = 0;
};

struct IpmSettings {
  double tolerance = 1e-8;
  int max_iterations = 100;
  double infeasibility_tolerance = 1e-8;
  bool verbose = false;  // one line per iteration on stderr
};

template <typename Scalar>
class InteriorPointSolver {
 public:
  using Problem = StandardFormSdp<Scalar>;
  using Matrix = typename Problem::Matrix;
  using Vector = typename Problem::Vector;
  using Point = ConePoint<Scalar>;
  using Result = IpmResult<Scalar>;

  InteriorPointSolver(const Problem& problem, IpmSettings settings)
      : p_(problem), settings_(settings) {}

  Result run() const;

 private:
  Point zero_point() const {
    Point out;
    for (const auto& block : p_.blocks) {
      out.blocks.push_back(Matrix::Zero(block.f0.rows(), block.f0.rows()));
    }
    out.linear = Vector::Zero(p_.linear.f0.size());
    return out;
  }

  Point scaled_identity(Scalar t) const {
    Point out = zero_point();
    for (auto& m : out.blocks) m.diagonal().setConstant(t);
    out.linear.setConstant(t);
    return out;
  }

  // A(Y)_k = <F_k, Y>
  Vector apply_a(const Point& y) const {
    Vector out = Vector::Zero(p_.num_variables);
    for (std::size_t b = 0; b < p_.blocks.size(); ++b) {
      for (const auto& e : p_.blocks[b].entries) out(e.variable) += e.value * y.blocks[b](e.row, e.col);
    }
    for (const auto& e : p_.linear.entries) out(e.variable) += e.value * y.linear(e.row);
    return out;
  }

  // sum_k x_k F_k
  Point apply_at(const Vector& x) const {
    Point out = zero_point();
    for (std::size_t b = 0; b < p_.blocks.size(); ++b) {
      for (const auto& e : p_.blocks[b].entries) out.blocks[b](e.row, e.col) += e.value * x(e.variable);
    }
    for (const auto& e : p_.linear.entries) out.linear(e.row) += e.value * x(e.variable);
    return out;
  }

  Matrix schur(const Point& x_inv, const Point& y) const {
    const auto m = p_.num_variables;
    Matrix schur = Matrix::Zero(m, m);
    for (std::size_t b = 0; b < p_.blocks.size(); ++b) {
      const auto& entries = p_.blocks[b].entries;
      const auto n = p_.blocks[b].f0.rows();
      Matrix w(n, n);
      std::size_t begin = 0;
      while (begin < entries.size()) {
        const int k = entries[begin].variable;
        std::size_t end = begin;
        w.setZero();
        // W = X^-1 F_k Y
        while (end < entries.size() && entries[end].variable == k) {
          const auto& e = entries[end];
          w.noalias() += e.value * x_inv.blocks[b].col(e.row) * y.blocks[b].row(e.col);
          ++end;
        }
        for (const auto& e : entries) schur(e.variable, k) += e.value * w(e.row, e.col);
        begin = end;
      }
    }
    // Diagonal part: sum_i F_k(i) F_l(i) Y(i) / X(i), grouped by row.
    if (!p_.linear.entries.empty()) {
      std::vector<std::vector<std::pair<int, Scalar>>> by_row(
          static_cast<std::size_t>(p_.linear.f0.size()));
      for (const auto& e : p_.linear.entries) {
        by_row[static_cast<std::size_t>(e.row)].emplace_back(e.variable, e.value);
      }
      for (Eigen::Index i = 0; i < p_.linear.f0.size(); ++i) {
        const Scalar d = x_inv.linear(i) * y.linear(i);
        for (const auto& [k, vk] : by_row[static_cast<std::size_t>(i)]) {
          for (const auto& [l, vl] : by_row[static_cast<std::size_t>(i)]) schur(k, l) += d * vk * vl;
        }
      }
    }
    return (schur + schur.transpose()) / Scalar(2);
  }

  // Largest step t <= cap with X + t D still in the cone.
  static Scalar max_step(const Point& x, const Point& d, Scalar cap) {
    Scalar t = cap;
    for (std::size_t b = 0; b < x.blocks.size(); ++b) {
      Eigen::LLT<Matrix> llt(x.blocks[b]);
      if (llt.info() != Eigen::Success) return Scalar(0);
      Matrix s = llt.matrixL().solve(d.blocks[b]);
      s = llt.matrixL().solve(s.transpose()).eval();
      const Matrix sym = (s + s.transpose()) / Scalar(2);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
      const Scalar lo = eig.eigenvalues().minCoeff();
      if (lo < Scalar(0)) t = std::min(t, Scalar(-1) / lo);
    }
    for (Eigen::Index i = 0; i < x.linear.size(); ++i) {
      if (d.linear(i) < Scalar(0)) t = std::min(t, -x.linear(i) / d.linear(i));
    }
    return t;
  }

  const Problem& p_;
  IpmSettings settings_;
};

template <typename Scalar>
typename InteriorPointSolver<Scalar>::Result InteriorPointSolver<Scalar>::run() const {
  using std::abs;
  using std::max;
  using std::min;
  using std::pow;
  using std::sqrt;

  const auto nb = p_.blocks.size();
  const int m = p_.num_variables;
  Eigen::Index total_dim = p_.linear.f0.size();
  for (const auto& block : p_.blocks) total_dim += block.f0.rows();

  Point f0 = zero_point();
  for (std::size_t b = 0; b < nb; ++b) f0.blocks[b] = p_.blocks[b].f0;
  f0.linear = p_.linear.f0;
  const Scalar f0_norm = f0.norm();
  const Scalar c_norm = p_.cost.norm();

  // Scale of the starting point, following the usual infeasible-start recipe.
  Scalar max_fk(0);
  {
    Vector fk_sq = Vector::Zero(m);
    for (const auto& block : p_.blocks) {
      for (const auto& e : block.entries) fk_sq(e.variable) += e.value * e.value;
    }
    for (const auto& e : p_.linear.entries) fk_sq(e.variable) += e.value * e.value;
    for (int k = 0; k < m; ++k) {
      max_fk = max(max_fk, (Scalar(1) + abs(p_.cost(k))) / (Scalar(1) + sqrt(fk_sq(k))));
    }
  }
  const Scalar root_n = sqrt(Scalar(total_dim));
  const Scalar xi = max({Scalar(10), root_n, f0_norm});
  const Scalar eta = max({Scalar(10), root_n, max_fk * root_n});

  Result r;
  r.x = Vector::Zero(m);
  r.X = scaled_identity(xi);
  r.Y = scaled_identity(eta);

  Scalar best_merit = std::numeric_limits<Scalar>::infinity();
  int since_best = 0;
  Result best = r;

  for (int iter = 0;; ++iter) {
    Point rp = apply_at(r.x);
    rp -= f0;
    rp -= r.X;
    const Vector ay = apply_a(r.Y);
    const Vector rd = p_.cost - ay;

    r.primal_objective = p_.cost.dot(r.x);
    r.dual_objective = f0.dot(r.Y);
    r.primal_infeasibility = rp.norm() / (Scalar(1) + f0_norm);
    r.dual_infeasibility = rd.norm() / (Scalar(1) + c_norm);
    r.relative_gap = abs(r.primal_objective - r.dual_objective) /
                     (Scalar(1) + abs(r.primal_objective) + abs(r.dual_objective));
    r.iterations = iter;
    if (settings_.verbose) {
      std::fprintf(stderr, "%3d pobj %+.12e dobj %+.12e pinf %.2e dinf %.2e gap %.2e mu %.2e\n", iter,
                   static_cast<double>(r.primal_objective), static_cast<double>(r.dual_objective),
                   static_cast<double>(r.primal_infeasibility),
                   static_cast<double>(r.dual_infeasibility), static_cast<double>(r.relative_gap),
                   static_cast<double>(r.X.dot(r.Y) / Scalar(total_dim)));
    }

    const Scalar tol(settings_.tolerance);
    if (r.primal_infeasibility < tol && r.dual_infeasibility < tol && r.relative_gap < tol) {
      r.status = IpmStatus::Converged;
      return r;
    }
    // Y / <F_0, Y> certifies that no x puts X in the cone.
    if (r.dual_objective > Scalar(0) &&
        ay.norm() / r.dual_objective < Scalar(settings_.infeasibility_tolerance) &&
        r.primal_infeasibility > tol) {
      r.status = IpmStatus::PrimalInfeasible;
      return r;
    }

    // Complementarity rather than the objective gap: far from feasibility the
    // gap can sit at 1 while the iterates still make progress.
    const Scalar complementarity = r.X.dot(r.Y) / (Scalar(1) + abs(r.primal_objective));
    const Scalar merit = max({r.primal_infeasibility, r.dual_infeasibility, complementarity});
    if (merit < best_merit * Scalar(0.999)) {
      best_merit = merit;
      best = r;
      since_best = 0;
    } else if (++since_best >= 8) {
      best.status = IpmStatus::Stalled;
      return best;
    }
    if (iter >= settings_.max_iterations) {
      best.status = IpmStatus::IterationLimit;
      return best;
    }

    Point x_inv = zero_point();
    for (std::size_t b = 0; b < nb; ++b) {
      Eigen::LLT<Matrix> llt(r.X.blocks[b]);
      if (llt.info() != Eigen::Success) {
        best.status = IpmStatus::Breakdown;
        return best;
      }
      x_inv.blocks[b] = llt.solve(Matrix::Identity(r.X.blocks[b].rows(), r.X.blocks[b].cols()));
    }
    x_inv.linear = r.X.linear.cwiseInverse();

    Matrix schur_matrix = schur(x_inv, r.Y);
    Eigen::LLT<Matrix> factor(schur_matrix);
    if (factor.info() != Eigen::Success) {
      // Near the optimum M is ill-conditioned; a tiny shift keeps the
      // factorization alive.
      Scalar shift = Scalar(1e-14) * max(Scalar(1), schur_matrix.diagonal().cwiseAbs().maxCoeff());
      for (int attempt = 0; attempt < 8 && factor.info() != Eigen::Success; ++attempt) {
        factor.compute(schur_matrix + shift * Matrix::Identity(m, m));
        shift *= Scalar(100);
      }
      if (factor.info() != Eigen::Success) {
        best.status = IpmStatus::Breakdown;
        return best;
      }
      if (settings_.verbose) {
        std::fprintf(stderr, "    schur shift %.1e\n", static_cast<double>(shift / Scalar(100)));
      }
    }

    // A(X^-1 Rp Y) is shared by predictor and corrector.
    Point xinv_rp_y = zero_point();
    for (std::size_t b = 0; b < nb; ++b) {
      xinv_rp_y.blocks[b] = x_inv.blocks[b] * rp.blocks[b] * r.Y.blocks[b];
    }
    xinv_rp_y.linear = x_inv.linear.cwiseProduct(rp.linear).cwiseProduct(r.Y.linear);
    const Vector a_rp = apply_a(xinv_rp_y);

    const Scalar mu = r.X.dot(r.Y) / Scalar(total_dim);

    // Direction for the complementarity target R_c (X^-1 times the target).
    auto direction = [&](const Point& rc, Vector& dx, Point& dX, Point& dY) {
      const Vector rhs = apply_a(rc) - a_rp - p_.cost;
      dx = factor.solve(rhs);
      dX = apply_at(dx);
      dX += rp;
      dY = zero_point();
      for (std::size_t b = 0; b < nb; ++b) {
        Matrix t = rc.blocks[b] - x_inv.blocks[b] * dX.blocks[b] * r.Y.blocks[b];
        dY.blocks[b] = (t + t.transpose()) / Scalar(2) - r.Y.blocks[b];
      }
      dY.linear = rc.linear - x_inv.linear.cwiseProduct(dX.linear).cwiseProduct(r.Y.linear) -
                  r.Y.linear;
    };

    // Predictor.
    Point rc = zero_point();
    Vector dx;
    Point dX, dY;
    direction(rc, dx, dX, dY);
    const Scalar ap_aff = max_step(r.X, dX, Scalar(1));
    const Scalar ad_aff = max_step(r.Y, dY, Scalar(1));

    Point x_aff = r.X, y_aff = r.Y;
    x_aff.add_scaled(ap_aff, dX);
    y_aff.add_scaled(ad_aff, dY);
    const Scalar mu_aff = x_aff.dot(y_aff) / Scalar(total_dim);
    const Scalar exponent = max(Scalar(1), Scalar(3) * pow(min(ap_aff, ad_aff), 2));
    const Scalar sigma = min(Scalar(1), pow(max(Scalar(0), mu_aff / mu), exponent));

    // Corrector: target sigma mu I minus the second-order term.
    for (std::size_t b = 0; b < nb; ++b) {
      const auto n = r.X.blocks[b].rows();
      rc.blocks[b] = x_inv.blocks[b] *
                     (sigma * mu * Matrix::Identity(n, n) - dX.blocks[b] * dY.blocks[b]);
    }
    rc.linear = x_inv.linear.cwiseProduct(Vector::Constant(rc.linear.size(), sigma * mu) -
                                          dX.linear.cwiseProduct(dY.linear));
    direction(rc, dx, dX, dY);
    const Scalar gamma = Scalar(0.9) + Scalar(0.09) * min(ap_aff, ad_aff);
    const Scalar ap = min(Scalar(1), gamma * max_step(r.X, dX, Scalar(2)));
    const Scalar ad = min(Scalar(1), gamma * max_step(r.Y, dY, Scalar(2)));
    if (settings_.verbose) {
      std::fprintf(stderr, "    sigma %.2e step %.3f %.3f (affine %.3f %.3f)\n",
                   static_cast<double>(sigma), static_cast<double>(ap), static_cast<double>(ad),
                   static_cast<double>(ap_aff), static_cast<double>(ad_aff));
    }

    r.x += ap * dx;
    r.X.add_scaled(ap, dX);
    r.Y.add_scaled(ad, dY);
    for (std::size_t b = 0; b < nb; ++b) {
      r.X.blocks[b] = (r.X.blocks[b] + r.X.blocks[b].transpose()).eval() / Scalar(2);
      r.Y.blocks[b] = (r.Y.blocks[b] + r.Y.blocks[b].transpose()).eval() / Scalar(2);
    }
  }
}

}  // namespace distest
