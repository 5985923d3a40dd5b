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

// Generic SDP over real scalar variables y:
//
//   minimize  objective(y)
//   s.t.      constant_b + sum_k y_k F_{b,k}  PSD   for every block b
//             form_e(y) = rhs_e                     for every equality e
//             g_i(y) >= 0                           for every nonnegative form g_i
//
// Equalities are eliminated before the interior-point solve.

#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace distest {

struct LinearForm {
  std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
  double constant = 0.0;

  double evaluate(const Eigen::VectorXd& y) const;
};

struct PsdBlock {
  struct Entry {
    Eigen::Index row;  // row <= col; the mirrored entry is implied
    Eigen::Index col;
    int variable;
    double coefficient;
  };

  std::string name;
  Eigen::MatrixXd constant;  // symmetric
  std::vector<Entry> entries;

  Eigen::Index dimension() const { return constant.rows(); }
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const;
};

struct LinearEquality {
  LinearForm form;
  double rhs = 0.0;
};

struct SdpProblem {
  int num_variables = 0;
  std::vector<std::string> variable_names;
  std::vector<PsdBlock> psd_blocks;
  std::vector<LinearEquality> equalities;
  std::vector<LinearForm> nonnegative;
  LinearForm objective;
};

enum class SolveStatus { Optimal, Infeasible, NumericalTrouble };

std::string to_string(SolveStatus status);

struct SolverOptions {
  double tolerance = 1e-8;
  int max_iterations = 100;
  bool verbose = false;
};

struct SolveReport {
  SolveStatus status = SolveStatus::NumericalTrouble;
  double bound = 0.0;  // certified lower bound (dual objective)
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  double runtime_seconds = 0.0;
  Eigen::VectorXd moments;  // y, in problem variable order
  std::string message;
};

SolveReport solve(const SdpProblem& problem, const SolverOptions& options = {});

/// Sparse SDPA text of the problem after equality elimination. Comment lines
/// record the objective constant and how eliminated variables were resolved.
std::string to_sdpa(const SdpProblem& problem);

/// Largest |form(y) - rhs|, most negative block eigenvalue and most negative
/// nonnegative form at y.
struct ConstraintViolation {
  double equality = 0.0;
  double min_eigenvalue = 0.0;
  double min_slack = 0.0;
};
ConstraintViolation check_point(const SdpProblem& problem, const Eigen::VectorXd& y);

}  // namespace distest
