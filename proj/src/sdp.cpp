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

#include "distest/sdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "distest/errors.hpp"
#include "distest/interior_point.hpp"

namespace distest {
namespace {

// The problem rewritten over the free variables z, with y = base + T z.
struct ReducedProblem {
  StandardFormSdp<double> sdp;
  double objective_constant = 0.0;
  Eigen::VectorXd base;
  Eigen::MatrixXd transform;  // n x (kept free variables)
  bool inconsistent = false;
  bool unbounded = false;
};

struct BlockOverZ {
  bool diagonal = false;     // the nonnegative forms, stored as an n x 1 column
  Eigen::MatrixXd constant;
  std::map<std::tuple<Eigen::Index, Eigen::Index, Eigen::Index>, double> coeffs;  // (z, row, col)
};

// Keeps a maximal linearly independent set of coefficient matrices. Along any
// other direction every block is constant, so it is fixed at zero, unless the
// objective moves along it, in which case the problem is unbounded below.
std::vector<bool> independent_columns(const std::vector<BlockOverZ>& blocks, Eigen::Index nf,
                                      const Eigen::VectorXd& cost, bool& unbounded) {
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nf, nf);
  for (const auto& bz : blocks) {
    std::map<std::pair<Eigen::Index, Eigen::Index>, std::vector<std::pair<Eigen::Index, double>>>
        rows;
    for (const auto& [key, v] : bz.coeffs) {
      const auto [j, r, c] = key;
      rows[{r, c}].emplace_back(j, v);
    }
    for (const auto& [rc, list] : rows) {
      for (const auto& [a, va] : list) {
        for (const auto& [b, vb] : list) gram(a, b) += va * vb;
      }
    }
  }

  // Diagonally pivoted Cholesky; the pivots it accepts form the basis.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(nf));
  for (Eigen::Index i = 0; i < nf; ++i) order[static_cast<std::size_t>(i)] = i;
  Eigen::MatrixXd work = gram;
  const double scale = nf ? std::max(1.0, gram.diagonal().maxCoeff()) : 1.0;
  Eigen::Index rank = 0;
  for (; rank < nf; ++rank) {
    Eigen::Index best;
    const double d = work.diagonal().tail(nf - rank).maxCoeff(&best);
    if (d <= 1e-10 * scale) break;
    best += rank;
    if (best != rank) {
      work.row(rank).swap(work.row(best));
      work.col(rank).swap(work.col(best));
      std::swap(order[static_cast<std::size_t>(rank)], order[static_cast<std::size_t>(best)]);
    }
    const Eigen::Index rest = nf - rank - 1;
    const Eigen::VectorXd v = work.col(rank).tail(rest) / std::sqrt(d);
    work.bottomRightCorner(rest, rest).noalias() -= v * v.transpose();
  }

  std::vector<bool> keep(static_cast<std::size_t>(nf), false);
  for (Eigen::Index i = 0; i < rank; ++i) keep[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;
  if (rank == nf) return keep;

  std::vector<Eigen::Index> basis, dependent;
  for (Eigen::Index i = 0; i < nf; ++i) (keep[static_cast<std::size_t>(i)] ? basis : dependent).push_back(i);
  Eigen::MatrixXd g_bb(rank, rank), g_bd(rank, static_cast<Eigen::Index>(dependent.size()));
  Eigen::VectorXd c_b(rank);
  for (Eigen::Index a = 0; a < rank; ++a) {
    const auto ia = basis[static_cast<std::size_t>(a)];
    c_b(a) = cost(ia);
    for (Eigen::Index b = 0; b < rank; ++b) g_bb(a, b) = gram(ia, basis[static_cast<std::size_t>(b)]);
    for (std::size_t d = 0; d < dependent.size(); ++d) g_bd(a, static_cast<Eigen::Index>(d)) = gram(ia, dependent[d]);
  }
  const Eigen::VectorXd implied = g_bd.transpose() * g_bb.llt().solve(c_b);
  const double c_scale = 1.0 + (nf ? cost.cwiseAbs().maxCoeff() : 0.0);
  for (std::size_t d = 0; d < dependent.size(); ++d) {
    if (std::abs(cost(dependent[d]) - implied(static_cast<Eigen::Index>(d))) > 1e-8 * c_scale) {
      unbounded = true;
    }
  }
  return keep;
}

void check_indices(const SdpProblem& problem) {
  const auto bad = [&](int v) { return v < 0 || v >= problem.num_variables; };
  for (const auto& block : problem.psd_blocks) {
    if (block.constant.rows() != block.constant.cols()) {
      throw InvalidParameter("PSD block " + block.name + " constant is not square");
    }
    for (const auto& e : block.entries) {
      if (bad(e.variable) || e.row < 0 || e.col < e.row || e.col >= block.dimension()) {
        throw InvalidParameter("PSD block " + block.name + " has an out-of-range entry");
      }
    }
  }
  for (const auto& eq : problem.equalities) {
    for (const auto& [v, c] : eq.form.terms) {
      if (bad(v)) throw InvalidParameter("equality refers to an unknown variable");
    }
  }
  for (const auto& form : problem.nonnegative) {
    for (const auto& [v, c] : form.terms) {
      if (bad(v)) throw InvalidParameter("inequality refers to an unknown variable");
    }
  }
  for (const auto& [v, c] : problem.objective.terms) {
    if (bad(v)) throw InvalidParameter("objective refers to an unknown variable");
  }
}

ReducedProblem reduce(const SdpProblem& problem) {
  check_indices(problem);
  const int n = problem.num_variables;
  const auto p = static_cast<Eigen::Index>(problem.equalities.size());

  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(p, n);
  Eigen::VectorXd rhs(p);
  for (Eigen::Index r = 0; r < p; ++r) {
    const auto& eq = problem.equalities[static_cast<std::size_t>(r)];
    for (const auto& [v, c] : eq.form.terms) e(r, v) += c;
    rhs(r) = eq.rhs - eq.form.constant;
  }

  ReducedProblem out;

  // Gauss-Jordan with the largest remaining entry of each row as pivot.
  std::vector<int> pivot_of_row(static_cast<std::size_t>(p), -1);
  std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
  for (Eigen::Index r = 0; r < p; ++r) {
    const double scale = std::max(1.0, e.row(r).cwiseAbs().maxCoeff());
    int best = -1;
    double best_abs = 0.0;
    for (int c = 0; c < n; ++c) {
      if (is_pivot[static_cast<std::size_t>(c)]) continue;
      if (std::abs(e(r, c)) > best_abs) {
        best_abs = std::abs(e(r, c));
        best = c;
      }
    }
    if (best < 0 || best_abs < 1e-12 * scale) {
      if (std::abs(rhs(r)) > 1e-9 * std::max(1.0, std::abs(rhs(r)))) out.inconsistent = true;
      e.row(r).setZero();
      rhs(r) = 0.0;
      continue;
    }
    const double inv = 1.0 / e(r, best);
    e.row(r) *= inv;
    rhs(r) *= inv;
    e(r, best) = 1.0;
    for (Eigen::Index o = 0; o < p; ++o) {
      if (o == r || e(o, best) == 0.0) continue;
      const double factor = e(o, best);
      e.row(o) -= factor * e.row(r);
      rhs(o) -= factor * rhs(r);
      e(o, best) = 0.0;
      // Drop cancellation residue so it does not masquerade as structure.
      e.row(o) = e.row(o).unaryExpr([](double v) { return std::abs(v) < 1e-13 ? 0.0 : v; });
    }
    pivot_of_row[static_cast<std::size_t>(r)] = best;
    is_pivot[static_cast<std::size_t>(best)] = true;
  }

  std::vector<int> free_vars;
  for (int v = 0; v < n; ++v) {
    if (!is_pivot[static_cast<std::size_t>(v)]) free_vars.push_back(v);
  }
  const auto nf = static_cast<Eigen::Index>(free_vars.size());

  // Sparse rows of T: y_k = base_k + sum_j t_kj z_j.
  Eigen::VectorXd base = Eigen::VectorXd::Zero(n);
  std::vector<std::vector<std::pair<Eigen::Index, double>>> t_rows(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < nf; ++j) {
    t_rows[static_cast<std::size_t>(free_vars[static_cast<std::size_t>(j)])].emplace_back(j, 1.0);
  }
  for (Eigen::Index r = 0; r < p; ++r) {
    const int pv = pivot_of_row[static_cast<std::size_t>(r)];
    if (pv < 0) continue;
    base(pv) = rhs(r);
    for (Eigen::Index j = 0; j < nf; ++j) {
      const double c = e(r, free_vars[static_cast<std::size_t>(j)]);
      if (c != 0.0) t_rows[static_cast<std::size_t>(pv)].emplace_back(j, -c);
    }
  }

  std::vector<BlockOverZ> blocks;
  for (const auto& block : problem.psd_blocks) {
    BlockOverZ bz{false, block.constant, {}};
    for (const auto& entry : block.entries) {
      const auto k = static_cast<std::size_t>(entry.variable);
      const double shift = entry.coefficient * base(entry.variable);
      bz.constant(entry.row, entry.col) += shift;
      if (entry.row != entry.col) bz.constant(entry.col, entry.row) += shift;
      for (const auto& [j, t] : t_rows[k]) {
        bz.coeffs[{j, entry.row, entry.col}] += entry.coefficient * t;
      }
    }
    std::erase_if(bz.coeffs, [](const auto& kv) { return std::abs(kv.second) < 1e-13; });
    blocks.push_back(std::move(bz));
  }
  if (!problem.nonnegative.empty()) {
    const auto rows = static_cast<Eigen::Index>(problem.nonnegative.size());
    BlockOverZ bz{true, Eigen::MatrixXd::Zero(rows, 1), {}};
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& form = problem.nonnegative[static_cast<std::size_t>(i)];
      bz.constant(i, 0) = form.constant;
      for (const auto& [v, c] : form.terms) {
        bz.constant(i, 0) += c * base(v);
        for (const auto& [j, t] : t_rows[static_cast<std::size_t>(v)]) bz.coeffs[{j, i, 0}] += c * t;
      }
    }
    std::erase_if(bz.coeffs, [](const auto& kv) { return std::abs(kv.second) < 1e-13; });
    blocks.push_back(std::move(bz));
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(nf);
  out.objective_constant = problem.objective.constant;
  for (const auto& [v, c] : problem.objective.terms) {
    out.objective_constant += c * base(v);
    for (const auto& [j, t] : t_rows[static_cast<std::size_t>(v)]) cost(j) += c * t;
  }

  const std::vector<bool> keep = independent_columns(blocks, nf, cost, out.unbounded);
  std::vector<int> new_index(static_cast<std::size_t>(nf), -1);
  int kept = 0;
  for (Eigen::Index j = 0; j < nf; ++j) {
    if (keep[static_cast<std::size_t>(j)]) new_index[static_cast<std::size_t>(j)] = kept++;
  }

  out.base = base;
  out.transform = Eigen::MatrixXd::Zero(n, kept);
  for (int k = 0; k < n; ++k) {
    for (const auto& [j, t] : t_rows[static_cast<std::size_t>(k)]) {
      const int nj = new_index[static_cast<std::size_t>(j)];
      if (nj >= 0) out.transform(k, nj) = t;
    }
  }

  auto& sdp = out.sdp;
  sdp.num_variables = kept;
  sdp.cost = Eigen::VectorXd::Zero(kept);
  for (Eigen::Index j = 0; j < nf; ++j) {
    const int nj = new_index[static_cast<std::size_t>(j)];
    if (nj >= 0) sdp.cost(nj) = cost(j);
  }
  for (auto& bz : blocks) {
    if (bz.diagonal) {
      auto& linear = sdp.linear;
      linear.f0 = -bz.constant.col(0);
      for (const auto& [key, value] : bz.coeffs) {
        const auto [j, row, col] = key;
        const int nj = new_index[static_cast<std::size_t>(j)];
        if (nj >= 0) linear.entries.push_back({nj, row, row, value});
      }
      std::stable_sort(linear.entries.begin(), linear.entries.end(),
                       [](const auto& a, const auto& b) { return a.variable < b.variable; });
      continue;
    }
    StandardFormSdp<double>::Block block;
    block.f0 = -bz.constant;
    for (const auto& [key, value] : bz.coeffs) {
      const auto [j, row, col] = key;
      const int nj = new_index[static_cast<std::size_t>(j)];
      if (nj < 0) continue;
      block.entries.push_back({nj, row, col, value});
      if (row != col) block.entries.push_back({nj, col, row, value});
    }
    std::stable_sort(block.entries.begin(), block.entries.end(),
                     [](const auto& a, const auto& b) { return a.variable < b.variable; });
    sdp.blocks.push_back(std::move(block));
  }
  return out;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace

double LinearForm::evaluate(const Eigen::VectorXd& y) const {
  double out = constant;
  for (const auto& [v, c] : terms) out += c * y(v);
  return out;
}

Eigen::MatrixXd PsdBlock::evaluate(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd out = constant;
  for (const auto& e : entries) {
    out(e.row, e.col) += e.coefficient * y(e.variable);
    if (e.row != e.col) out(e.col, e.row) += e.coefficient * y(e.variable);
  }
  return out;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::NumericalTrouble:
      return "NumericalTrouble";
  }
  return "NumericalTrouble";
}

SolveReport solve(const SdpProblem& problem, const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  const auto finish = [&]() {
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
  };

  const ReducedProblem reduced = reduce(problem);
  report.moments = reduced.base;
  if (reduced.inconsistent) {
    report.status = SolveStatus::Infeasible;
    report.message = "linear equalities are inconsistent";
    return finish();
  }
  if (reduced.unbounded) {
    report.status = SolveStatus::NumericalTrouble;
    report.message = "objective is unbounded along a variable that no PSD block constrains";
    return finish();
  }

  if (reduced.sdp.num_variables == 0) {
    double lo = 0.0;
    for (const auto& block : reduced.sdp.blocks) lo = std::min(lo, min_eigenvalue(-block.f0));
    if (reduced.sdp.linear.f0.size() > 0) lo = std::min(lo, (-reduced.sdp.linear.f0).minCoeff());
    report.status = lo >= -options.tolerance ? SolveStatus::Optimal : SolveStatus::Infeasible;
    report.bound = report.primal_objective = report.dual_objective = reduced.objective_constant;
    report.primal_infeasibility = std::max(0.0, -lo);
    return finish();
  }

  IpmSettings settings;
  settings.tolerance = options.tolerance;
  settings.max_iterations = options.max_iterations;
  settings.verbose = options.verbose;
  const auto result = InteriorPointSolver<double>(reduced.sdp, settings).run();

  report.moments = reduced.base + reduced.transform * result.x;
  report.primal_objective = result.primal_objective + reduced.objective_constant;
  report.dual_objective = result.dual_objective + reduced.objective_constant;
  report.bound = report.dual_objective;
  report.primal_infeasibility = result.primal_infeasibility;
  report.dual_infeasibility = result.dual_infeasibility;
  report.relative_gap = result.relative_gap;
  report.iterations = result.iterations;
  switch (result.status) {
    case IpmStatus::Converged:
      report.status = SolveStatus::Optimal;
      break;
    case IpmStatus::PrimalInfeasible:
      report.status = SolveStatus::Infeasible;
      report.message = "dual ray certifies that no moment assignment satisfies the constraints";
      break;
    case IpmStatus::IterationLimit:
      report.status = SolveStatus::NumericalTrouble;
      report.message = "iteration limit reached";
      break;
    case IpmStatus::Stalled:
      report.status = SolveStatus::NumericalTrouble;
      report.message = "no progress on residuals";
      break;
    case IpmStatus::Breakdown:
      report.status = SolveStatus::NumericalTrouble;
      report.message = "factorization failed";
      break;
  }
  return finish();
}

std::string to_sdpa(const SdpProblem& problem) {
  const ReducedProblem reduced = reduce(problem);
  const auto& sdp = reduced.sdp;
  std::ostringstream out;
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "* distest problem, moments: " << problem.num_variables
      << ", eliminated equalities: " << problem.equalities.size() << '\n';
  out << "* objective constant " << num(reduced.objective_constant) << '\n';
  if (reduced.inconsistent) out << "* equalities are inconsistent\n";
  if (reduced.unbounded) out << "* objective is unbounded\n";
  const auto linear_rows = sdp.linear.f0.size();
  out << sdp.num_variables << '\n' << sdp.blocks.size() + (linear_rows ? 1 : 0) << '\n';
  for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
    out << (b ? " " : "") << sdp.blocks[b].f0.rows();
  }
  if (linear_rows) out << ' ' << -linear_rows;  // SDPA marks diagonal blocks negative
  out << '\n';
  for (int k = 0; k < sdp.num_variables; ++k) out << (k ? " " : "") << num(sdp.cost(k));
  out << '\n';
  for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
    const auto& f0 = sdp.blocks[b].f0;
    for (Eigen::Index i = 0; i < f0.rows(); ++i) {
      for (Eigen::Index j = i; j < f0.cols(); ++j) {
        if (f0(i, j) != 0.0) {
          out << "0 " << b + 1 << ' ' << i + 1 << ' ' << j + 1 << ' ' << num(f0(i, j)) << '\n';
        }
      }
    }
  }
  for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
    for (const auto& e : sdp.blocks[b].entries) {
      if (e.row > e.col) continue;
      out << e.variable + 1 << ' ' << b + 1 << ' ' << e.row + 1 << ' ' << e.col + 1 << ' '
          << num(e.value) << '\n';
    }
  }
  const auto lb = sdp.blocks.size() + 1;
  for (Eigen::Index i = 0; i < linear_rows; ++i) {
    if (sdp.linear.f0(i) != 0.0) {
      out << "0 " << lb << ' ' << i + 1 << ' ' << i + 1 << ' ' << num(sdp.linear.f0(i)) << '\n';
    }
  }
  for (const auto& e : sdp.linear.entries) {
    out << e.variable + 1 << ' ' << lb << ' ' << e.row + 1 << ' ' << e.row + 1 << ' '
        << num(e.value) << '\n';
  }
  return out.str();
}

ConstraintViolation check_point(const SdpProblem& problem, const Eigen::VectorXd& y) {
  ConstraintViolation out;
  for (const auto& eq : problem.equalities) {
    out.equality = std::max(out.equality, std::abs(eq.form.evaluate(y) - eq.rhs));
  }
  for (const auto& block : problem.psd_blocks) {
    out.min_eigenvalue = std::min(out.min_eigenvalue, min_eigenvalue(block.evaluate(y)));
  }
  for (const auto& form : problem.nonnegative) out.min_slack = std::min(out.min_slack, form.evaluate(y));
  return out;
}

}  // namespace distest
