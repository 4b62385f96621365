// Acceptance checks: one PASS or FAIL line per criterion, exit status 1 if any fails.

#include "fasd/experiment.hpp"
#include "fasd/oracle.hpp"
#include "fasd/solvers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fasd;
namespace orc = fasd::oracle;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail)
{
  std::string text = detail;
  while (!text.empty() && (text.back() == ' ' || text.back() == ';')) text.pop_back();
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << " " << title << ": " << text
            << std::endl;
  if (!pass) ++failures;
}

Vector random_vector(int n, std::mt19937& rng, double scale)
{
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector x(n);
  for (double& v : x) v = u(rng);
  return x;
}

std::unique_ptr<Problem> problem(double p, double eps2, int n, int coarse_n = 4)
{
  return make_problem({p, eps2, Forcing::One}, coarse_n, levels_for(coarse_n, n));
}

void gradient_correctness()
{
  const auto t0 = Clock::now();
  std::mt19937 rng(101);
  double worst = 0.0;
  int checks = 0;
  bool pass = true;
  for (double p : {2.0, 3.0, 4.0, 6.0, 10.0}) {
    for (double eps2 : {1.0, 1e-2}) {
      for (int n : {4, 8, 16}) {
        const EnergyModel m = assemble({p, eps2, Forcing::One}, {build_unit_square_mesh(n)});
        for (int k = 0; k < 20; ++k) {
          const orc::OracleReport r = orc::fd_gradient_check(m, 0, random_vector(m.size(0), rng, 1.0));
          worst = std::max(worst, r.max_rel_error);
          pass = pass && r.pass && r.max_rel_error < 1e-6;
          ++checks;
        }
      }
    }
  }
  const double t = seconds_since(t0);
  report(1, "gradient correctness", pass && t < 10.0,
         std::to_string(checks) + " finite-difference checks, worst relative error " + fmt("%.2e", worst) +
             ", " + fmt("%.2f", t) + " s");
}

void strong_monotonicity()
{
  const auto t0 = Clock::now();
  std::mt19937 rng(202);
  double worst = 1e300;
  int configs = 0;
  for (double p : {2.0, 3.0, 4.0, 6.0, 10.0}) {
    for (double eps2 : {1.0, 1e-2}) {
      const EnergyModel m = assemble({p, eps2, Forcing::One}, {build_unit_square_mesh(8)});
      const SparseMatrix& a = m.level(0).stiffness;
      for (int k = 0; k < 1000; ++k) {
        const Vector u = random_vector(m.size(0), rng, 1.0);
        const Vector w = random_vector(m.size(0), rng, 1.0);
        Vector d(u.size()), dg(u.size());
        const Vector gu = m.gradient(0, u);
        const Vector gw = m.gradient(0, w);
        for (std::size_t i = 0; i < u.size(); ++i) {
          d[i] = w[i] - u[i];
          dg[i] = gw[i] - gu[i];
        }
        worst = std::min(worst, dot(dg, d) - eps2 * dot(d, spmv(a, d)));
      }
      ++configs;
    }
  }
  const double t = seconds_since(t0);
  report(2, "strong monotonicity", worst >= -1e-10 && t < 5.0,
         std::to_string(configs) + " configurations x 1000 pairs, smallest margin " + fmt("%.3e", worst) +
             ", " + fmt("%.2f", t) + " s");
}

void sso_orthogonality()
{
  const auto pr = problem(4.0, 1.0, 16, 16);
  SolverConfig cfg = SolverConfig::defaults(Variant::SSO);
  cfg.outer_max_iter = 5000;
  double worst = 0.0;
  SolveOptions opt;
  opt.observer = [&](const Correction& c, const SubspaceEngine& e) {
    worst = std::max(worst, std::abs(e.gradient_component(c.where.node)));
  };
  const IterationTrace t = solve(*pr, cfg, opt);
  bool decreasing = true;
  for (std::size_t k = 0; k + 1 < t.records.size(); ++k) {
    decreasing = decreasing && t.records[k].decrease > 0.0;
  }
  report(3, "SSO orthogonality and monotone decay",
         t.status == SolveStatus::Converged && worst <= 1e-9 && decreasing,
         std::to_string(t.iterations) + " sweeps to " + fmt("%.2e", t.final_residual) +
             ", largest post-solve nodal gradient " + fmt("%.2e", worst) +
             (decreasing ? ", energy strictly decreasing" : ", energy NOT strictly decreasing"));
}

void step_size_bounds()
{
  const auto pr = problem(4.0, 1.0, 16);
  const SolverConfig cfg = SolverConfig::defaults(Variant::FASD);
  const SubspacePlan plan = build_plan(*pr, cfg.decomposition, cfg.sweep_order);
  const double mu = pr->model().eps2();
  std::mt19937 rng(404);
  std::uniform_int_distribution<std::size_t> pick(0, plan.entries.size() - 1);
  int samples = 0;
  double worst_q = -1e300, worst_lower = -1e300, worst_slope = 0.0, worst_descent = -1e300;
  while (samples < 200) {
    SubspaceEngine engine(*pr, cfg, random_vector(pr->model().size(pr->finest()), rng, 0.5));
    const Correction c = engine.compute(plan.entries[pick(rng)]);
    if (c.step.mode != StepMode::Exact || c.s_normsq <= 0.0) continue;
    const Section1D f = engine.section(c);
    const double astar = c.step.alpha;
    double curv = 0.0;
    for (int k = 0; k <= 64; ++k) curv = std::max(curv, f.curvature(astar * k / 64.0));
    const double lip = curv / c.s_normsq;
    const double aq = quadratic_step(c.slope0, lip, c.s_normsq).alpha;
    worst_q = std::max(worst_q, aq - astar);
    worst_lower = std::max(worst_lower, mu / lip - astar);
    worst_slope = std::max(worst_slope, std::abs(f.slope(astar)));
    worst_descent = std::max(worst_descent, c.slope0 + mu * c.s_normsq);
    ++samples;
  }
  const bool pass = worst_q <= 1e-8 && worst_lower <= 1e-8 && worst_slope <= 1e-10 && worst_descent <= 1e-8;
  report(4, "step-size bounds", pass,
         std::to_string(samples) + " steps, max(a_q - a*) " + fmt("%.2e", worst_q) + ", max(mu/L - a*) " +
             fmt("%.2e", worst_lower) + ", max |f'(a*)| " + fmt("%.2e", worst_slope) +
             ", max(<E'(v),s> + mu |s|^2) " + fmt("%.2e", worst_descent));
}

orc::Dense linear_operator(const EnergyModel& m, int level)
{
  orc::Dense k = orc::to_dense(m.level(level).stiffness);
  for (std::size_t i = 0; i < k.size(); ++i) {
    for (double& x : k[i]) x *= m.eps2();
    k[i][i] += m.level(level).mass[i];
  }
  return k;
}

void multigrid_equivalence()
{
  const auto pr = problem(2.0, 1.0, 8);
  const EnergyModel& m = pr->model();
  SolverConfig cfg = SolverConfig::defaults(Variant::FAS);
  cfg.local_energy = LocalEnergy::QuadraticHessian;
  cfg.validate();
  const SubspacePlan plan = build_plan(*pr, cfg.decomposition, cfg.sweep_order);
  const int nf = m.size(1);
  SubspaceEngine engine(*pr, cfg, Vector(nf, 0.0));
  const std::vector<Vector> ref = orc::linear_twogrid_reference(
      linear_operator(m, 1), linear_operator(m, 0), orc::to_dense(pr->transfers()[0].prolongation),
      m.level(1).load, Vector(nf, 0.0), 1, 1, 10);
  double worst = 0.0;
  for (const Vector& x : ref) {
    outer_iterate(engine, plan);
    for (int i = 0; i < nf; ++i) worst = std::max(worst, std::abs(engine.iterate()[i] - x[i]));
  }
  report(5, "p=2 multigrid equivalence", worst <= 1e-10,
         "10 cycles on the 1/8 two-level hierarchy, max deviation " + fmt("%.2e", worst));
}

void fas_iteration_band()
{
  const auto t0 = Clock::now();
  struct Row {
    double p, eps2;
    int target;
  };
  const std::vector<Row> rows = {{4, 1, 15}, {6, 1, 15}, {10, 1, 15}, {4, 0.1, 14}, {6, 0.1, 14}};
  bool pass = true;
  std::string detail;
  for (const Row& r : rows) {
    const auto pr = problem(r.p, r.eps2, 64);
    const IterationTrace t = solve(*pr, SolverConfig::defaults(Variant::FAS));
    pass = pass && t.status == SolveStatus::Converged && std::abs(t.iterations - r.target) <= 5 &&
           t.rate >= 0.08 && t.rate <= 0.35;
    detail += fmt("(%g,", r.p) + fmt("%g): ", r.eps2) + std::to_string(t.iterations) +
              fmt(" (%.3f); ", t.rate);
  }
  const double t = seconds_since(t0);
  report(6, "FAS iteration band at h=1/64", pass && t < 60.0, detail + fmt("%.1f s", t));
}

void quadratic_variants_stall()
{
  bool pass = true;
  std::string detail;
  for (double eps2 : {1e-2, 1e-3}) {
    const auto pr = problem(4.0, eps2, 64);
    const IterationTrace fas = solve(*pr, SolverConfig::defaults(Variant::FAS));
    pass = pass && fas.status == SolveStatus::Converged;
    detail += fmt("eps2=%g: fas ", eps2) + std::to_string(fas.iterations);
    for (Variant v : {Variant::FASQ1, Variant::FASQ2}) {
      std::string status;
      int its = 0;
      try {
        const IterationTrace t = solve(*pr, SolverConfig::defaults(v));
        status = to_string(t.status);
        its = t.iterations;
        pass = pass && (t.status == SolveStatus::Diverged || its > 2 * fas.iterations);
      } catch (const DivergenceError& e) {
        status = "diverged";
        its = e.trace().iterations;
      }
      detail += ", " + to_string(v) + " " + status + " after " + std::to_string(its);
    }
    detail += "; ";
  }
  report(7, "FASQ1/FASQ2 stall where FAS converges", pass, detail);
}

void mesh_independence()
{
  const auto t0 = Clock::now();
  const std::vector<int> ns = {32, 64, 128};
  const std::vector<int> fas_target = {15, 15, 16};
  const std::vector<int> q2_target = {14, 14, 14};
  bool counts = true;
  std::string detail;
  std::vector<double> q2_seconds;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const auto pr = problem(6.0, 1.0, ns[k]);
    const IterationTrace fas = solve(*pr, SolverConfig::defaults(Variant::FAS));
    IterationTrace q2 = solve(*pr, SolverConfig::defaults(Variant::FASQ2));
    // best of three, the smallest grids finish in milliseconds
    for (int rep = 0; rep < 2; ++rep) {
      const IterationTrace again = solve(*pr, SolverConfig::defaults(Variant::FASQ2));
      if (again.cycle_seconds < q2.cycle_seconds) q2 = again;
    }
    counts = counts && fas.status == SolveStatus::Converged && q2.status == SolveStatus::Converged &&
             std::abs(fas.iterations - fas_target[k]) <= 3 && std::abs(q2.iterations - q2_target[k]) <= 3;
    q2_seconds.push_back(q2.cycle_seconds);
    detail += "h=1/" + std::to_string(ns[k]) + ": fas " + std::to_string(fas.iterations) + ", fasq2 " +
              std::to_string(q2.iterations) + fmt(" in %.3f s; ", q2.cycle_seconds);
  }
  double worst_ratio = 0.0;
  for (std::size_t k = 1; k < q2_seconds.size(); ++k) {
    const double ratio = q2_seconds[k] / q2_seconds[k - 1];
    worst_ratio = std::max(worst_ratio, ratio);
    detail += fmt("ratio %.2f; ", ratio);
  }
  const double t = seconds_since(t0);
  const bool timing = worst_ratio <= 2.5;
  report(8, "mesh independence and scaling", counts && timing && t < 300.0,
         detail + (counts ? "counts in band" : "counts OUT of band") +
             (timing ? ", time growth within 2.5x" : ", time growth above 2.5x per refinement") +
             fmt(", %.1f s", t));
}

void gap_contraction()
{
  const auto pr = problem(4.0, 1.0, 32);
  SolveOptions opt;
  opt.reference = reference_minimizer(*pr);
  const IterationTrace t = solve(*pr, SolverConfig::defaults(Variant::FAS), opt);
  report(9, "linear contraction of the energy gap",
         t.status == SolveStatus::Converged && t.gap_rate <= 0.5,
         "largest d_{k+1}/d_k over k >= 1 with d_k > 1e-12: " + fmt("%.3f", t.gap_rate) + " over " +
             std::to_string(t.iterations) + " iterations");
}

void determinism()
{
  ExperimentSpec spec;
  spec.p_values = {2.0, 4.0, 6.0};
  spec.eps2_values = {1.0, 1e-2};
  spec.n_values = {16, 32};
  spec.variants = {Variant::SSO, Variant::FASD, Variant::FASD_ALS, Variant::FAS, Variant::FASQ1,
                   Variant::FASQ2};
  spec.overrides.max_iter = 60;
  spec.deterministic = true;
  auto csv = [](const ExperimentSpec& s) {
    std::ostringstream os;
    write_csv(os, run_grid(s), s.deterministic);
    return os.str();
  };
  const std::string a = csv(spec);
  const std::string b = csv(spec);
  ExperimentSpec threaded = spec;
  threaded.jobs = 4;
  const std::string c = csv(threaded);
  report(10, "determinism", a == b && a == c,
         std::to_string(spec.cell_count()) + " cells, " + std::to_string(a.size()) +
             " bytes, repeated and 4-thread runs " + (a == b && a == c ? "identical" : "DIFFER"));
}

} // namespace

int main()
{
  const std::vector<void (*)()> criteria = {gradient_correctness, strong_monotonicity, sso_orthogonality,
                                            step_size_bounds,   multigrid_equivalence, fas_iteration_band,
                                            quadratic_variants_stall,   mesh_independence,        gap_contraction,
                                            determinism};
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    try {
      criteria[k]();
    } catch (const std::exception& e) {
      report(static_cast<int>(k) + 1, "(exception)", false, e.what());
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
