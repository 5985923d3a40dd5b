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

#include "distest/strategy.hpp"

#include <cstdio>
#include <sstream>

namespace distest {
namespace {

void check_theta(double theta) {
  if (!(theta > 0.0 && theta <= std::numbers::pi / 4)) {
    throw InvalidParameter("theta " + std::to_string(theta) +
                           " outside the valid range (0, pi/4] = (0, 0.785398...]");
  }
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 2.0)) {
    throw InvalidParameter("alpha " + std::to_string(alpha) + " outside the valid range [0, 2)");
  }
}

void write_matrix(std::ostringstream& out, const Eigen::MatrixXd& m) {
  char buffer[40];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", m(r, c));
      out << (c == 0 ? "" : " ") << buffer;
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istringstream& in, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(in >> m(r, c))) throw ParseError("truncated matrix in strategy dump");
    }
  }
  return m;
}

}  // namespace

double alpha_from_theta(double theta) {
  check_theta(theta);
  const double s2 = std::pow(std::sin(2.0 * theta), 2);
  return 2.0 * std::sqrt(std::max(0.0, (1.0 - s2) / (1.0 + s2)));
}

double mu_from_theta(double theta) {
  check_theta(theta);
  return std::atan(std::sin(2.0 * theta));
}

double theta_from_alpha(double alpha) {
  check_alpha(alpha);
  const double a2 = alpha * alpha;
  return 0.5 * std::asin(std::sqrt((4.0 - a2) / (4.0 + a2)));
}

TiltedParameters TiltedParameters::from_theta(double theta) {
  return {theta, alpha_from_theta(theta), mu_from_theta(theta)};
}

TiltedParameters TiltedParameters::from_alpha(double alpha) {
  const double theta = theta_from_alpha(alpha);
  return {theta, alpha, mu_from_theta(theta)};
}

OperatorPolynomial chsh_functional() {
  const auto ab = [](int x, int y) { return Monomial({static_cast<std::uint8_t>(x)},
                                                     {static_cast<std::uint8_t>(y)}); };
  OperatorPolynomial f;
  f.add_term(ab(1, 1), 1.0);
  f.add_term(ab(1, 2), 1.0);
  f.add_term(ab(2, 1), 1.0);
  f.add_term(ab(2, 2), -1.0);
  return f;
}

OperatorPolynomial tilted_functional(double alpha) {
  auto f = chsh_functional();
  f.add_term(Monomial({1}, {}), alpha);
  return f;
}

std::string dump_strategy(const QuantumStrategy& s) {
  std::ostringstream out;
  out << "state " << s.state.rows() << ' ' << s.state.cols() << '\n';
  write_matrix(out, s.state);
  auto section = [&out](const char* name, const std::vector<Eigen::MatrixXd>& obs) {
    for (std::size_t k = 0; k < obs.size(); ++k) {
      out << name << ' ' << k + 1 << ' ' << obs[k].rows() << ' ' << obs[k].cols() << '\n';
      write_matrix(out, obs[k]);
    }
  };
  section("alice", s.alice);
  section("bob", s.bob);
  return out.str();
}

QuantumStrategy parse_strategy(const std::string& text) {
  std::istringstream in(text);
  QuantumStrategy s;
  std::string tag;
  while (in >> tag) {
    if (tag == "state") {
      Eigen::Index r = 0, c = 0;
      if (!(in >> r >> c)) throw ParseError("bad state header");
      s.state = read_matrix(in, r, c);
    } else if (tag == "alice" || tag == "bob") {
      std::size_t k = 0;
      Eigen::Index r = 0, c = 0;
      if (!(in >> k >> r >> c)) throw ParseError("bad observable header");
      auto& obs = tag == "alice" ? s.alice : s.bob;
      if (k != obs.size() + 1) throw ParseError("observables out of order in strategy dump");
      obs.push_back(read_matrix(in, r, c));
    } else {
      throw ParseError("unknown section '" + tag + "' in strategy dump");
    }
  }
  return s;
}

}  // namespace distest
