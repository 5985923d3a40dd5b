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

#include "distest/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "distest/cli.hpp"
#include "distest/errors.hpp"
#include "distest/relaxation.hpp"
#include "distest/solver.hpp"
#include "distest/strategy.hpp"

namespace distest {
namespace {

using Clock = std::chrono::steady_clock;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

std::string num(double v, int digits = 9) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Independent word reduction for the sequence counts: strings of letter
// tokens, Alice moved in front of Bob, equal neighbours cancelled.

using Token = std::string;
using Word = std::vector<Token>;

Word reduce_word(const Word& raw) {
  Word alice, bob;
  for (const auto& t : raw) (t[0] == 'A' ? alice : bob).push_back(t);
  auto cancel = [](const Word& w) {
    Word out;
    for (const auto& t : w) {
      if (!out.empty() && out.back() == t) {
        out.pop_back();
      } else {
        out.push_back(t);
      }
    }
    return out;
  };
  Word out = cancel(alice);
  for (const auto& t : cancel(bob)) out.push_back(t);
  return out;
}

std::string spell(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (const auto& t : w) s += t;
  return s;
}

Word tokenize(const std::string& compact) {
  Word w;
  if (compact == "1") return w;
  for (std::size_t i = 0; i < compact.size(); i += 2) w.push_back(compact.substr(i, 2));
  return w;
}

std::set<std::string> brute_force_level(int level, const std::vector<Token>& letters) {
  std::set<std::string> out{"1"};
  std::vector<Word> frontier{{}};
  for (int len = 1; len <= level; ++len) {
    std::vector<Word> next;
    for (const auto& w : frontier) {
      for (const auto& t : letters) {
        Word longer = w;
        longer.push_back(t);
        out.insert(spell(reduce_word(longer)));
        next.push_back(std::move(longer));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

std::string compact(const Monomial& m) {
  std::string s;
  for (const auto& l : m.letters()) {
    s += l.party == Party::Alice ? 'A' : 'B';
    s += std::to_string(l.index);
  }
  return s.empty() ? "1" : s;
}

std::set<std::string> spelled(const SequenceSet& sequence) {
  std::set<std::string> out;
  for (const auto& m : sequence) out.insert(compact(m));
  return out;
}

// ---------------------------------------------------------------------------

double solve_bound(const Scenario& scenario, double beta, ConstraintMode mode,
                   const AssembleOptions& options, SolveReport* report = nullptr) {
  SolverOptions solver;
  solver.tolerance = scenario.default_tolerance;
  const auto r = solve(assemble(scenario, beta, mode, options), solver);
  if (report) *report = r;
  return r.bound;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

CriterionResult endpoint_chsh() {
  CriterionResult r{1, "endpoints", "CHSH bound at the maximal violation", false, "", 0.0};
  const auto start = Clock::now();
  const Scenario scenario = Scenario::chsh();
  AssembleOptions options;
  options.level = 3;
  const auto size = build_level_sequence(3, scenario.alphabet).size();
  SolveReport report;
  const double f = solve_bound(scenario, scenario.quantum_bound, ConstraintMode::ValueEquals,
                               options, &report);
  r.seconds = seconds_since(start);
  r.passed = size == 25 && f >= 0.999 && r.seconds < 10.0;
  r.detail = "f = " + num(f) + " (" + to_string(report.status) + ", " + std::to_string(size) +
             " monomials), need >= 0.999 within 10 s";
  return r;
}

CriterionResult endpoint_tilted() {
  CriterionResult r{2, "endpoints", "tilted bounds at the maximal violation", true, "", 0.0};
  const auto start = Clock::now();
  AssembleOptions options;
  options.sequence = tilted_sequence();
  std::string detail;
  for (double theta : cli::default_thetas()) {
    const auto t0 = Clock::now();
    const Scenario scenario = Scenario::tilted_chsh(theta);
    const auto problem =
        assemble(scenario, scenario.quantum_bound, ConstraintMode::ValueEquals, options);
    int localizing = 0;
    for (const auto& b : problem.psd_blocks) localizing += b.name.starts_with("localizing");
    SolverOptions solver;
    solver.tolerance = scenario.default_tolerance;
    const auto report = solve(problem, solver);
    const double dt = seconds_since(t0);
    const bool ok = options.sequence->size() == 41 && localizing == 2 && report.bound >= 0.99 &&
                    dt < 60.0;
    r.passed = r.passed && ok;
    if (!detail.empty()) detail += "; ";
    detail += "theta " + num(theta, 4) + ": f = " + num(report.bound) + " (" +
              to_string(report.status) + ", " + num(dt, 3) + " s)";
  }
  r.seconds = seconds_since(start);
  r.detail = detail + "; need >= 0.99 within 60 s each";
  return r;
}

CriterionResult symbolic(const std::string& golden_dir) {
  CriterionResult r{3, "symbolic", "fidelity polynomials match the transcribed oracles", true, "",
                    0.0};
  const auto start = Clock::now();
  double worst = 0.0;
  std::string failure;
  auto compare = [&](const FidelityFunctional& built, const FidelityFunctional& oracle,
                     const std::string& label) {
    std::set<Monomial> a, b;
    for (const auto& [m, c] : built.polynomial.terms()) a.insert(m);
    for (const auto& [m, c] : oracle.polynomial.terms()) b.insert(m);
    const double diff = max_coefficient_difference(built.polynomial, oracle.polynomial);
    worst = std::max(worst, diff);
    if (a != b || !(diff <= 1e-12)) {
      r.passed = false;
      if (failure.empty()) {
        failure = label + (a != b ? ": monomial sets differ" : ": coefficient mismatch " + num(diff));
      }
    }
  };
  try {
    compare(chsh_fidelity(),
            load_fidelity_transcription(golden_dir + "/chsh_fidelity.txt", Alphabet::chsh(), 0.0),
            "chsh");
    for (int k = 1; k <= 10; ++k) {
      const double theta = k * (kPi / 4) / 10;
      compare(tilted_fidelity(theta),
              load_fidelity_transcription(golden_dir + "/tilted_fidelity.txt", Alphabet::tilted(),
                                          theta),
              "tilted theta " + num(theta, 4));
    }
  } catch (const std::exception& e) {
    r.passed = false;
    failure = e.what();
  }
  r.seconds = seconds_since(start);
  r.passed = r.passed && r.seconds < 1.0;
  r.detail = failure.empty() ? "CHSH and 10 angles, max coefficient difference " + num(worst, 3)
                             : failure;
  return r;
}

CriterionResult werner_sandwich() {
  CriterionResult r{4, "sandwich", "Werner bounds stay below the Werner fidelity", true, "", 0.0};
  const auto start = Clock::now();
  const Scenario scenario = Scenario::chsh();
  double worst = -std::numeric_limits<double>::infinity();
  for (double v : {0.8, 0.85, 0.9, 0.95, 1.0}) {
    const double beta = std::min(2.0 * kSqrt2 * v, scenario.quantum_bound);
    const double f = solve_bound(scenario, beta, ConstraintMode::ValueEquals, {});
    const double ceiling = (1.0 + 3.0 * v) / 4.0;
    worst = std::max(worst, f - ceiling);
    r.passed = r.passed && f <= ceiling + 1e-6;
  }
  r.seconds = seconds_since(start);
  r.passed = r.passed && r.seconds < 60.0;
  r.detail = "max(bound - (1+3v)/4) = " + num(worst, 4) + ", need <= 1e-6 within 60 s";
  return r;
}

CriterionResult local_point() {
  CriterionResult r{5, "sandwich", "bound at the local bound", false, "", 0.0};
  const auto start = Clock::now();
  const double ceiling = std::pow(std::cos(kPi / 8), 2) / 2.0;
  const double f = solve_bound(Scenario::chsh(), 2.0, ConstraintMode::ValueEquals, {});
  r.seconds = seconds_since(start);
  r.passed = f <= ceiling + 1e-6 && r.seconds < 10.0;
  r.detail = "f = " + num(f) + ", need <= " + num(ceiling + 1e-6) + " within 10 s";
  return r;
}

CriterionResult soundness() {
  CriterionResult r{6, "soundness", "strategy moment and localizing matrices are PSD", true, "",
                    0.0};
  const auto start = Clock::now();
  double worst = std::numeric_limits<double>::infinity();
  int checked = 0;

  auto moment_check = [&](const QuantumStrategy& s, const SequenceSet& sequence) {
    const auto skeleton = build_moment_skeleton(sequence);
    worst = std::min(worst, min_eigenvalue(fill(skeleton, populate_moments(s, keys_of(skeleton)))));
    ++checked;
  };
  auto tilted_check = [&](const QuantumStrategy& s, double theta) {
    auto skeleton = build_moment_skeleton(tilted_sequence());
    const double mu = mu_from_theta(theta);
    const auto first = build_localizing_skeleton(first_bob_localizer(mu), tilted_sequence(), skeleton);
    const auto second =
        build_localizing_skeleton(second_bob_localizer(mu), tilted_sequence(), skeleton);
    std::set<MomentKey> keys = keys_of(skeleton);
    for (const auto* loc : {&first, &second}) {
      const auto more = keys_of(*loc);
      keys.insert(more.begin(), more.end());
    }
    const auto moments = populate_moments(s, keys);
    worst = std::min({worst, min_eigenvalue(fill(skeleton, moments)),
                      min_eigenvalue(fill(first, moments)), min_eigenvalue(fill(second, moments))});
    checked += 3;
  };

  const auto level3 = build_level_sequence(3, Alphabet::chsh());
  moment_check(chsh_optimal_strategy(), level3);
  for (double v : {0.0, 0.5, 0.8, 0.9, 1.0}) moment_check(werner_strategy(v), level3);
  moment_check(deterministic_strategy(2), level3);
  for (int k = 1; k <= 10; ++k) {
    const double theta = k * (kPi / 4) / 10;
    tilted_check(tilted_optimal_strategy(theta), theta);
    tilted_check(with_visibility(tilted_optimal_strategy(theta), 0.9), theta);
    tilted_check(deterministic_strategy(4), theta);
  }
  r.seconds = seconds_since(start);
  r.passed = worst >= -1e-9;
  r.detail = std::to_string(checked) + " matrices, min eigenvalue " + num(worst, 3) +
             ", need >= -1e-9";
  return r;
}

CriterionResult monotonicity() {
  CriterionResult r{7, "monotonicity", "at-least sweep is nondecreasing", true, "", 0.0};
  const auto start = Clock::now();
  const Scenario scenario = Scenario::chsh();
  SweepOptions options;
  options.solver.tolerance = scenario.default_tolerance;
  const auto result = sweep(scenario, linear_grid(2.0, 2.0 * kSqrt2, 20),
                            ConstraintMode::ValueAtLeast, options);
  long long previous = std::numeric_limits<long long>::min();
  int drops = 0;
  for (const auto& p : result.points) {
    if (!p.error.empty() || !std::isfinite(p.fidelity)) {
      ++drops;
      continue;
    }
    const auto rounded = std::llround(p.fidelity / 1e-7);
    if (rounded < previous) ++drops;
    previous = std::max(previous, rounded);
  }
  r.seconds = seconds_since(start);
  r.passed = result.points.size() == 20 && drops == 0;
  r.detail = "20 points from " + num(result.points.front().fidelity, 6) + " to " +
             num(result.points.back().fidelity, 6) + ", " + std::to_string(drops) + " decreases";
  return r;
}

CriterionResult strategies() {
  CriterionResult r{8, "strategies", "optimal strategies and parameter relations", true, "", 0.0};
  const auto start = Clock::now();
  double worst = std::abs(bell_value(chsh_optimal_strategy(), chsh_functional()) - 2.0 * kSqrt2);
  for (int k = 1; k <= 20; ++k) {
    const double theta = k * (kPi / 4) / 20;
    const double alpha = alpha_from_theta(theta);
    const double q = std::sqrt(8.0 + 2.0 * alpha * alpha);
    worst = std::max(
        worst, std::abs(bell_value(tilted_optimal_strategy(theta), tilted_functional(alpha)) - q));
    worst = std::max(worst, std::abs(theta_from_alpha(alpha) - theta));
    const double mu = mu_from_theta(theta);
    worst = std::max(worst, std::abs(std::tan(mu) - std::sin(2.0 * theta)));
    worst = std::max(worst, std::abs(std::tan(mu) -
                                     std::sqrt((4.0 - alpha * alpha) / (4.0 + alpha * alpha))));
    const auto params = TiltedParameters::from_alpha(alpha);
    worst = std::max({worst, std::abs(params.theta - theta), std::abs(params.mu - mu)});
  }
  r.seconds = seconds_since(start);
  r.passed = worst <= 1e-10;
  r.detail = "max deviation " + num(worst, 3) + ", need <= 1e-10";
  return r;
}

CriterionResult sequences() {
  CriterionResult r{9, "sequences", "sequence sizes match brute-force enumeration", true, "", 0.0};
  const auto start = Clock::now();
  const std::vector<Token> chsh_letters{"A1", "A2", "B1", "B2"};
  std::string detail;
  const std::size_t expected[] = {5, 13, 25};
  for (int level = 1; level <= 3; ++level) {
    const auto brute = brute_force_level(level, chsh_letters);
    const auto built = build_level_sequence(level, Alphabet::chsh());
    const bool ok = brute.size() == expected[level - 1] && built.size() == brute.size() &&
                    spelled(built) == brute;
    r.passed = r.passed && ok;
    detail += "level " + std::to_string(level) + ": " + std::to_string(built.size()) + "/" +
              std::to_string(brute.size()) + "; ";
  }
  auto tilted = brute_force_level(3, chsh_letters);
  for (const char* extra : {"B3B4", "B4B3", "B1B4", "B4B1", "B3B1", "B1B3", "A1B3", "A2B3", "A1B4",
                            "A2B4", "B3B4B3", "B4B3B4", "A1B3B4", "A2B3B4", "A1B4B3", "A2B4B3"}) {
    tilted.insert(spell(reduce_word(tokenize(extra))));
  }
  const auto built = tilted_sequence();
  r.passed = r.passed && tilted.size() == 41 && built.size() == 41 && spelled(built) == tilted;
  detail += "tilted: " + std::to_string(built.size()) + "/" + std::to_string(tilted.size());
  r.seconds = seconds_since(start);
  r.detail = detail;
  return r;
}

CriterionResult determinism() {
  CriterionResult r{10, "determinism", "repeated sweeps give identical CSV", false, "", 0.0};
  const auto start = Clock::now();
  cli::RunConfig config;
  config.beta_steps = 7;
  config.workers = 3;
  auto once = [&] {
    const auto jobs = cli::plan_sweeps(config);
    const auto& job = jobs.front();
    return cli::format_csv(job.scenario, sweep(job.scenario, job.grid, config.mode, job.options),
                           config.timings);
  };
  const std::string first = once();
  const std::string second = once();
  r.seconds = seconds_since(start);
  r.passed = first == second && first.starts_with(cli::kCsvHeader);
  r.detail = std::to_string(first.size()) + " bytes, " + (first == second ? "identical" : "differ");
  return r;
}

struct Entry {
  int id;
  const char* group;
  std::function<CriterionResult(const AcceptanceOptions&)> run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {1, "endpoints", [](const AcceptanceOptions&) { return endpoint_chsh(); }},
      {2, "endpoints", [](const AcceptanceOptions&) { return endpoint_tilted(); }},
      {3, "symbolic", [](const AcceptanceOptions& o) { return symbolic(o.golden_dir); }},
      {4, "sandwich", [](const AcceptanceOptions&) { return werner_sandwich(); }},
      {5, "sandwich", [](const AcceptanceOptions&) { return local_point(); }},
      {6, "soundness", [](const AcceptanceOptions&) { return soundness(); }},
      {7, "monotonicity", [](const AcceptanceOptions&) { return monotonicity(); }},
      {8, "strategies", [](const AcceptanceOptions&) { return strategies(); }},
      {9, "sequences", [](const AcceptanceOptions&) { return sequences(); }},
      {10, "determinism", [](const AcceptanceOptions&) { return determinism(); }},
  };
  return list;
}

}  // namespace

std::vector<std::string> acceptance_groups() {
  return {"endpoints",  "symbolic",  "sandwich",  "soundness",
          "monotonicity", "strategies", "sequences", "determinism"};
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  const auto groups = acceptance_groups();
  for (const auto& item : options.only) {
    const bool is_group = std::find(groups.begin(), groups.end(), item) != groups.end();
    const bool is_id = std::any_of(entries().begin(), entries().end(),
                                   [&](const Entry& e) { return std::to_string(e.id) == item; });
    if (!is_group && !is_id) {
      std::string valid;
      for (const auto& g : groups) valid += g + ", ";
      throw InvalidParameter("unknown acceptance selection '" + item + "' (valid: " + valid +
                             "or a number 1-10)");
    }
  }
  std::vector<CriterionResult> results;
  for (const auto& entry : entries()) {
    const bool wanted =
        options.only.empty() ||
        std::any_of(options.only.begin(), options.only.end(), [&](const std::string& item) {
          return item == entry.group || item == std::to_string(entry.id);
        });
    if (!wanted) continue;
    try {
      results.push_back(entry.run(options));
    } catch (const std::exception& e) {
      results.push_back({entry.id, entry.group, "", false, std::string("error: ") + e.what(), 0.0});
    }
  }
  return results;
}

void print_report(std::ostream& os, const std::vector<CriterionResult>& results) {
  int passed = 0;
  for (const auto& r : results) {
    char head[128];
    std::snprintf(head, sizeof(head), "%s %2d [%s] ", r.passed ? "PASS" : "FAIL", r.id,
                  r.group.c_str());
    os << head << r.title << ": " << r.detail << " (" << num(r.seconds, 3) << " s)\n";
    passed += r.passed;
  }
  os << passed << "/" << results.size() << " criteria passed\n";
}

FidelityFunctional load_fidelity_transcription(const std::string& path, const Alphabet& alphabet,
                                               double theta) {
  std::ifstream file(path);
  if (!file) throw ParseError("cannot open " + path);
  double angle = std::numeric_limits<double>::quiet_NaN();
  double scale = 1.0;
  struct Line {
    double sign;
    std::string weight;
    std::vector<std::pair<double, std::string>> words;
  };
  std::vector<Line> lines;
  std::string raw;
  int number = 0;
  while (std::getline(file, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream in(raw);
    std::string head;
    if (!(in >> head)) continue;
    const std::string where = path + ":" + std::to_string(number);
    if (head == "angle") {
      std::string value;
      in >> value;
      if (value == "pi/8") {
        angle = kPi / 8;
      } else if (value == "theta") {
        angle = theta;
      } else {
        throw ParseError(where + ": angle must be pi/8 or theta");
      }
      continue;
    }
    if (head == "scale") {
      std::string value;
      in >> value;
      const auto slash = value.find('/');
      try {
        scale = slash == std::string::npos
                    ? std::stod(value)
                    : std::stod(value.substr(0, slash)) / std::stod(value.substr(slash + 1));
      } catch (const std::exception&) {
        throw ParseError(where + ": bad scale '" + value + "'");
      }
      if (!std::isfinite(scale)) throw ParseError(where + ": bad scale '" + value + "'");
      continue;
    }
    Line line;
    line.sign = head[0] == '-' ? -1.0 : 1.0;
    line.weight = (head[0] == '-' || head[0] == '+') ? head.substr(1) : head;
    if (line.weight != "cc" && line.weight != "cs" && line.weight != "ss") {
      throw ParseError(where + ": weight must be cc, cs or ss");
    }
    std::string word;
    while (in >> word) {
      if (word.size() < 2 || (word[0] != '+' && word[0] != '-')) {
        throw ParseError(where + ": words need an explicit sign");
      }
      line.words.emplace_back(word[0] == '-' ? -1.0 : 1.0, word.substr(1));
    }
    lines.push_back(std::move(line));
  }
  if (std::isnan(angle)) throw ParseError(path + ": missing angle line");

  const double c = std::cos(angle), s = std::sin(angle);
  OperatorPolynomial out;
  for (const auto& line : lines) {
    const double w = line.weight == "cc" ? c * c : line.weight == "cs" ? c * s : s * s;
    for (const auto& [sign, word] : line.words) {
      out.add_term(parse_monomial(word, alphabet), scale * line.sign * w * sign);
    }
  }
  return {prune(out, 1e-14)};
}

}  // namespace distest
