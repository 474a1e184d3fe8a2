// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "property_checks.hpp"

using namespace segregation;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void verdict(const char* id, bool pass, const std::string& detail) {
  std::printf("%s %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

/// Runs a criterion body; an exception counts as a failure.
void criterion(const char* id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(id, false, std::string("exception: ") + e.what());
  }
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double dense_lambda1(const GridDomain& d) {
  std::vector<int> id(d.size(), -1);
  int n = 0;
  for (std::size_t p = 0; p < d.size(); ++p)
    if (d.interior(p)) id[p] = n++;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const double c = 1.0 / (d.h() * d.h());
  for (std::size_t p = 0; p < d.size(); ++p) {
    if (id[p] < 0) continue;
    m(id[p], id[p]) = 4.0 * c;
    for (auto q : d.neighbours(p))
      if (id[q] >= 0) m(id[p], id[q]) = -c;
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

DomainPtr chain3(double width) {
  const double h = 1.0 / 32;
  std::vector<BallSpec> balls{{{0.0, 0.0}, 1.0, 0}, {{3.0, 0.0}, 1.0, 1}, {{6.0, 0.0}, 1.0, 2}};
  std::vector<CorridorSpec> corridors;
  if (width > 0.0) corridors = {{0, 1, width}, {1, 2, width}};
  return build_domain(balls, corridors, {-1.25, -1.25, 7.25, 1.25}, h);
}

struct Baseline {
  std::vector<SpeciesParams> species;
  StateField state;
};

Baseline baseline(const DomainPtr& d, const SolverOptions& opts) {
  Baseline b;
  std::vector<ScalarField> parts;
  for (int i = 0; i < 3; ++i) {
    const DomainPtr region = d->ball_region(i);
    const EigenPair g = principal_eigenvalue(region, opts);
    const SpeciesParams sp{2.0 * g.value, 2.0};
    const ScalarSolveReport r = solve_ball(sp, region, positive_seed(region), opts);
    if (!r.positive) throw std::runtime_error("baseline not positive");
    b.species.push_back(sp);
    parts.push_back(r.solution.on_domain(d));
  }
  b.state = StateField(std::move(parts));
  return b;
}

}  // namespace

int main() {
  const SolverOptions opts;

  criterion("A1", [] {
    const auto t0 = Clock::now();
    const auto levels = convergence_study({32, 64, 128});
    const double r1 = levels[0].l2_error / levels[1].l2_error;
    const double r2 = levels[1].l2_error / levels[2].l2_error;
    const double t = seconds_since(t0);
    const bool ok = std::abs(r1 - 4.0) <= 0.6 && std::abs(r2 - 4.0) <= 0.6 && t < 60.0;
    verdict("A1", ok, "L2 error ratios " + fmt("%.4f", r1) + ", " + fmt("%.4f", r2) + " (target 4 +/- 15%), " +
                          fmt("%.1f s", t));
  });

  criterion("A2", [&] {
    const auto t0 = Clock::now();
    const double square = principal_eigenvalue(GridDomain::rectangle({0, 0, 1, 1}, 1.0 / 128), opts).value;
    const DomainPtr disk = build_domain({{{0, 0}, 1.0, 0}}, {}, {-1.25, -1.25, 1.25, 1.25}, 1.0 / 128);
    const double circle = principal_eigenvalue(disk, opts).value;
    const double t = seconds_since(t0);
    const double exact_square = 2 * pi * pi;
    const double exact_disk = 5.783185962946784;  // first zero of J0, squared
    const double e_sq = std::abs(square - exact_square) / exact_square;
    const double e_disk = std::abs(circle - exact_disk) / exact_disk;
    // Coarse-grid cross-check of the inverse iteration against a dense eigensolve.
    const DomainPtr sq16 = GridDomain::rectangle({0, 0, 1, 1}, 1.0 / 16);
    const DomainPtr disk16 = build_domain({{{0, 0}, 1.0, 0}}, {}, {-1.25, -1.25, 1.25, 1.25}, 1.0 / 16);
    const double x1 = std::abs(principal_eigenvalue(sq16, opts).value / dense_lambda1(*sq16) - 1);
    const double x2 = std::abs(principal_eigenvalue(disk16, opts).value / dense_lambda1(*disk16) - 1);
    const bool ok = e_sq <= 0.005 && e_disk <= 0.01 && x1 < 1e-6 && x2 < 1e-6 && t < 60.0;
    verdict("A2", ok,
            "square " + fmt("%.5f", square) + " (rel err " + fmt("%.2e", e_sq) + "), disk " + fmt("%.5f", circle) +
                " (rel err " + fmt("%.2e", e_disk) + "), dense cross-check " + fmt("%.1e", std::max(x1, x2)) + ", " +
                fmt("%.1f s", t));
  });

  // A3 scenario, reused by A4-A7.
  DomainPtr domain;
  Baseline base;
  ModelKind model;
  ContinuationTrace trace;
  double a3_seconds = 0.0;
  criterion("A3", [&] {
    const auto t0 = Clock::now();
    domain = chain3(0.2);
    base = baseline(domain, opts);
    model = ModelKind{Model::barrier, base.state, {}};
    trace = continuation_run(base.species, model, {4.0, 2.0, 17}, opts);
    a3_seconds = seconds_since(t0);
    if (!trace.complete())
      throw std::runtime_error("continuation stopped at kappa = " + kappa_label(trace.failure->kappa));
    std::vector<double> lk, lo;
    for (std::size_t m = trace.steps.size() - 8; m < trace.steps.size(); ++m) {
      lk.push_back(std::log(trace.steps[m].kappa));
      lo.push_back(std::log(max_offdiagonal(trace.steps[m].diagnostics.overlap_matrix)));
    }
    const double slope = lsq_slope(lk, lo);
    verdict("A3", slope <= -0.8 && a3_seconds < 600.0,
            "log-log overlap slope over kappa in [" + kappa_label(trace.steps[trace.steps.size() - 8].kappa) + ", " +
                kappa_label(trace.steps.back().kappa) + "] = " + fmt("%.3f", slope) + " (need <= -0.8), " +
                fmt("%.1f s", a3_seconds));
  });
  const bool have_trace = !trace.steps.empty() && trace.complete();

  criterion("A4", [&] {
    if (!have_trace) throw std::runtime_error("A3 trace unavailable");
    const auto& last = trace.steps.back();
    const InequalityReport r = inequality_check(last.state, base.species, 10 * opts.newton_tol);
    std::size_t sub = 0, super = 0;
    for (std::size_t i = 0; i < r.sub.size(); ++i) {
      sub += r.sub[i].count;
      super += r.super[i].count;
    }
    verdict("A4", sub == 0 && super == 0,
            "kappa " + kappa_label(last.kappa) + ": " + std::to_string(sub) + " sub and " + std::to_string(super) +
                " super violations at tol " + fmt("%.0e", 10 * opts.newton_tol));
  });

  criterion("A5", [&] {
    if (!have_trace) throw std::runtime_error("A3 trace unavailable");
    const Matrix limit = trace.steps.back().diagnostics.noninvasion;
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (i != j) worst = std::max(worst, limit[i][j] / limit[j][j]);
    // Same scenario at kappa = 0: the system decouples into whole-domain
    // logistic problems, solved from a positive whole-domain seed.
    const ScalarField seed = positive_seed(domain);
    const SystemSolveResult zero = solve_system(StateField({seed, seed, seed}), base.species, model, 0.0,
                                                opts.newton_tol, opts);
    const Matrix free = noninvasion(zero.state);
    double weakest = 1e300;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (i != j) weakest = std::min(weakest, free[i][j] / free[j][j]);
    verdict("A5", worst <= 1e-3 && weakest > 0.1,
            "max off/diag at final kappa " + fmt("%.2e", worst) + " (need <= 1e-3); min off/diag at kappa 0 " +
                fmt("%.3f", weakest) + " (need > 0.1)");
  });

  criterion("A6", [&] {
    if (!have_trace) throw std::runtime_error("A3 trace unavailable");
    const auto t0 = Clock::now();
    const auto& last = trace.steps.back();
    const UniquenessReport r = uniqueness_probe(base.species, model, last.kappa, last.state, 0.02, 10, 2718, opts);
    const double rel = r.max_pairwise_h1_distance / h1_norm(last.state);
    const double t = seconds_since(t0);
    verdict("A6", r.all_converged && rel <= 1e-6 && t < 600.0,
            "10 trials at kappa " + kappa_label(last.kappa) + ", all converged: " + (r.all_converged ? "yes" : "no") +
                ", max pairwise H1 distance / |center| = " + fmt("%.2e", rel) + ", " + fmt("%.1f s", t));
  });

  criterion("A7", [&] {
    if (!have_trace) throw std::runtime_error("A3 trace unavailable");
    std::vector<double> inc;
    for (std::size_t m = trace.steps.size() - 7; m + 1 < trace.steps.size(); ++m)
      inc.push_back(h1_distance(trace.steps[m + 1].state, trace.steps[m].state));
    bool monotone = true;
    std::string list;
    for (std::size_t i = 0; i < inc.size(); ++i) {
      if (i > 0 && inc[i] > inc[i - 1]) monotone = false;
      list += (i ? ", " : "") + fmt("%.3e", inc[i]);
    }
    verdict("A7", monotone, "last 6 H1 increments: " + list);
  });

  // Not a criterion: the same chain continued to far larger kappa, to show
  // where the asymptotic decay regime sets in.
  if (have_trace) {
    try {
      StateField current = trace.steps.back().state;
      std::vector<double> lk, lo, inc;
      double kappa = trace.steps.back().kappa;
      for (int m = 0; m < 13; ++m) {
        kappa *= 2.0;
        SystemSolveResult r = solve_system(current, base.species, model, kappa, opts.newton_tol, opts);
        inc.push_back(h1_distance(r.state, current));
        current = std::move(r.state);
        lk.push_back(std::log(kappa));
        lo.push_back(std::log(max_offdiagonal(overlap(current))));
      }
      const double slope = lsq_slope({lk.end() - 8, lk.end()}, {lo.end() - 8, lo.end()});
      bool monotone = true;
      for (std::size_t i = inc.size() - 5; i < inc.size(); ++i) monotone = monotone && inc[i] <= inc[i - 1];
      std::printf("INFO extended chain to kappa %s: overlap slope over last 8 steps %.3f, last 6 H1 increments "
                  "non-increasing: %s\n",
                  kappa_label(kappa).c_str(), slope, monotone ? "yes" : "no");
    } catch (const std::exception& e) {
      std::printf("INFO extended chain stopped: %s\n", e.what());
    }
  }

  criterion("A8", [&] {
    const DomainPtr d = domain ? domain : chain3(0.2);
    const Baseline b = domain ? base : baseline(d, opts);
    ModelKind m{Model::positive_part, b.state, {}};
    for (const auto& sp : b.species) m.caps.push_back(supersolution_phi(sp, d, opts));
    auto outside = [&](const StateField& U) {
      std::size_t total = 0;
      for (auto c : box_violations(U, m, 10 * opts.newton_tol)) total += c;
      return total;
    };
    const ContinuationTrace t = continuation_run(b.species, m, {1000.0, 2.0, 1}, opts);
    if (!t.complete()) throw std::runtime_error("solve at kappa = 1000 failed: " + t.failure->message);
    const std::size_t total = outside(t.steps.back().state);
    verdict("A8", total == 0,
            "positive_part with truncation at kappa 1000 from U0: " + std::to_string(total) +
                " nodes outside [-u0 - tol, phi + tol]");
    const ContinuationTrace path = continuation_run(b.species, m, {1000.0 / 512.0, 2.0, 10}, opts);
    if (path.steps.empty()) {
      std::printf("INFO doubling path from kappa %s produced no steps\n", kappa_label(1000.0 / 512.0).c_str());
    } else {
      std::printf("INFO doubling path from kappa %s: first step %zu nodes outside the box, kappa %s %zu nodes\n",
                  kappa_label(1000.0 / 512.0).c_str(), outside(path.steps.front().state),
                  kappa_label(path.steps.back().kappa).c_str(), outside(path.steps.back().state));
    }
  });

  criterion("A9", [&] {
    const DomainPtr ball32 = build_domain({{{0, 0}, 1.0, 0}}, {}, {-1.25, -1.25, 1.25, 1.25}, 1.0 / 32);
    const double l1 = principal_eigenvalue(ball32, opts).value;
    const double zero_margin = nd_margin(ScalarField(ball32), {0.5 * l1, 2.0}, ball32, opts).margin;
    std::vector<double> margins;
    for (double h : {1.0 / 32, 1.0 / 64}) {
      const DomainPtr ball = build_domain({{{0, 0}, 1.0, 0}}, {}, {-1.25, -1.25, 1.25, 1.25}, h);
      const SpeciesParams sp{2.0 * principal_eigenvalue(ball, opts).value, 2.0};
      const ScalarField u0 = solve_ball(sp, ball, positive_seed(ball), opts).solution;
      margins.push_back(nd_margin(u0, sp, ball, opts).margin);
    }
    const bool ok = std::abs(zero_margin - 0.5) <= 1e-4 && margins[0] > 0 && margins[1] > 0;
    verdict("A9", ok,
            "margin at u0 = 0, lambda = lambda1/2: " + fmt("%.6f", zero_margin) + "; logistic margins h=1/32 " +
                fmt("%.4f", margins[0]) + ", h=1/64 " + fmt("%.4f", margins[1]));
  });

  criterion("A10", [&] {
    const DomainPtr d = chain3(0.0);
    const Baseline b = baseline(d, opts);
    const ModelKind m{Model::barrier, b.state, {}};
    const double ref = h1_norm(b.state);
    double worst = 0.0;
    bool converged = true;
    for (double kappa : {1e2, 1e4}) {
      const UniquenessReport r = uniqueness_probe(b.species, m, kappa, b.state, 0.02, 5, 31415, opts);
      converged = converged && r.all_converged;
      worst = std::max(worst, r.max_distance_to_center / ref);
    }
    verdict("A10", converged && worst <= 1e-6,
            "5 perturbations at kappa 1e2 and 1e4, all converged: " + std::string(converged ? "yes" : "no") +
                ", max H1 distance to U0 / |U0| = " + fmt("%.2e", worst));
  });

  criterion("A11", [] {
    const auto dir = std::filesystem::temp_directory_path() / "segregation_acceptance";
    const auto outcomes = property_checks::all(100, 1729, dir);
    std::filesystem::remove_all(dir);
    bool ok = true;
    std::string detail;
    for (const auto& o : outcomes) {
      ok = ok && o.passed() && o.cases >= 100;
      detail += (detail.empty() ? "" : "; ") + o.name + " " + std::to_string(o.cases - o.failures) + "/" +
                std::to_string(o.cases);
    }
    verdict("A11", ok, detail);
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
