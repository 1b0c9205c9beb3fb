// larche: command-line driver for the diffuse-interface lab.
#include <fftw3.h>

#include <Eigen/Core>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "config.hpp"
#include "larche/approx.hpp"
#include "larche/experiments.hpp"
#include "larche/io.hpp"
#include "larche/profile.hpp"
#include "larche/spectral.hpp"

#ifndef LARCHE_VERSION
#define LARCHE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace larche;
using namespace larche::cli;

namespace {

using Clock = std::chrono::steady_clock;

json versions() {
  return {{"larche", LARCHE_VERSION},
          {"compiler", __VERSION__},
          {"fftw", std::string(fftw_version)},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char b[32];
  std::strftime(b, sizeof b, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return b;
}

void write_manifest(const fs::path& dir, const std::string& sub, const json& config, int threads,
                    Clock::time_point t0, const std::vector<std::string>& outputs) {
  const json m{{"subcommand", sub},
               {"config", config},
               {"versions", versions()},
               {"thread_count", threads},
               {"wall_seconds", std::chrono::duration<double>(Clock::now() - t0).count()},
               {"finished_utc", utc_now()},
               {"outputs", outputs}};
  std::ofstream f(dir / "manifest.json");
  if (!f) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  f << m.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << std::setprecision(17);
  return f;
}

// Runs job(k) for k in [0, n) on up to `threads` workers; rethrows the first failure.
void parallel_for(int n, int threads, const std::function<void(int)>& job) {
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex m;
  auto worker = [&] {
    for (int k; (k = next++) < n;) {
      try {
        job(k);
      } catch (...) {
        std::lock_guard lk(m);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

// Columns whose largest entry is below this are round-off and get no order.
constexpr double kRoundoffFloor = 1e-10;

// Order fitted to a column; null when the column has fewer than 3 rows, non-positive entries or is round-off.
json order_of(const std::vector<double>& eps, const std::vector<double>& v) {
  if (eps.size() < 3) return nullptr;
  if (*std::max_element(v.begin(), v.end()) < kRoundoffFloor) return {{"order", nullptr}, {"note", "round-off level"}};
  for (double x : v)
    if (!(x > 0.0)) return nullptr;
  const RateFit f = rate_fit(eps, v);
  return {{"order", f.order}, {"constant", f.constant}};
}

// potential given as "quartic" or as a path to a JSON potential object
DoubleWell potential_arg(const std::string& s) {
  if (s == "quartic") return DoubleWell::quartic();
  return parse_potential(load_json(s));
}

int cmd_profile(const std::string& pot, double Z, double h, const std::string& output) {
  const DoubleWell W = potential_arg(pot);
  const Profiles P = make_profiles(W, Z, h);
  std::ofstream file;
  if (!output.empty()) file = open_csv(output);
  std::ostream& out = output.empty() ? std::cout : file;
  out << std::setprecision(17) << "z,theta0,theta0p,theta1\n";
  for (int k = 0; k < P.theta0.size(); ++k) {
    const double z = P.theta0.z(k);
    out << z << ',' << P.theta0.values[k] << ',' << P.theta0.derivative[k] << ',' << P.theta1.at(z) << '\n';
  }
  out << "sigma," << P.sigma << '\n';
  return 0;
}

int cmd_validate(const std::string& pot, int samples) {
  const ValidationReport r = validate(potential_arg(pot), samples);
  std::cout << "check,passed,worst_sample,worst_value\n" << std::setprecision(10);
  for (const auto& c : r.checks)
    std::cout << c.name << ',' << (c.passed ? "true" : "false") << ',' << c.worst_sample << ',' << c.worst_value
              << '\n';
  if (r.all_passed()) return 0;
  for (const auto& c : r.checks)
    if (!c.passed) std::cerr << "error: potential violates " << c.name << '\n';
  return 1;
}

int cmd_simulate(const fs::path& cfg_path) {
  const auto t0 = Clock::now();
  const json j = load_json(cfg_path);
  const SimulateConfig c = parse_simulate(j);
  const int threads = resolve_threads(c.common.thread_count);
  c.pf.validate(c.grid);
  const Profiles P = make_profiles(c.common.potential);
  const double eps = c.pf.epsilon;
  const Field c0 = init_glued(c.grid, sdf(c.shape), eps, c.delta > 0.0 ? c.delta : 4.0 * eps, P.theta0, P.theta1,
                              c.order == 1);
  RunOptions opts;
  for (int k = 0; k <= c.samples; ++k) opts.sample_times.push_back(c.pf.end_time * k / c.samples);
  opts.extract_contours = c.contours;
  const Trajectory tr = run(c.grid, c.pf, c.common.potential, c0, opts);
  const fs::path out = c.common.output_dir;
  io::write_trajectory(tr, out);
  write_manifest(out, "simulate", j, threads, t0, {"timeseries.csv", "frames.json", "frames/"});
  std::cout << std::setprecision(10) << "frames " << tr.frames.size() << ", mass drift "
            << std::abs(tr.mass.back() - tr.mass.front()) << ", energy " << tr.Etot.front() << " -> "
            << tr.Etot.back() << '\n';
  return 0;
}

constexpr const char* kSweepHeader = "epsilon,norm_rA,norm_sA,norm_mass,err_mu,err_c\n";

json sweep_orders(const std::vector<double>& eps, const std::vector<std::array<double, 5>>& cols, int headline) {
  static const char* names[] = {"norm_rA", "norm_sA", "norm_mass", "err_mu", "err_c"};
  json orders;
  for (int k = 0; k < 5; ++k) {
    std::vector<double> v;
    for (const auto& r : cols) v.push_back(r[k]);
    orders[names[k]] = order_of(eps, v);
  }
  const json& h = orders[names[headline]];
  return {{"order", h.is_null() ? json(nullptr) : h.at("order")}, {"order_of", names[headline]}, {"orders", orders}};
}

int cmd_residual(const fs::path& cfg_path) {
  const auto t0 = Clock::now();
  const json j = load_json(cfg_path);
  const ResidualConfig c = parse_residual(j);
  const int threads = resolve_threads(c.common.thread_count);
  const Profiles P = make_profiles(c.common.potential);
  const int n = static_cast<int>(c.epsilons.size());
  std::vector<BuildRow> rows(n);
  parallel_for(n, threads, [&](int k) {
    BuildSetup b;
    b.epsilon = c.epsilons[k];
    b.L = c.L;
    b.R = c.R;
    b.nodes_per_eps = c.nodes_per_eps;
    b.laplacian = c.common.laplacian;
    b.elasticity = c.common.elasticity;
    b.C_star = c.C_star;
    rows[k] = residual_row(b, P, c.common.potential);
  });
  const fs::path out = c.common.output_dir;
  fs::create_directories(out);
  std::vector<std::array<double, 5>> cols;
  auto csv = open_csv(out / "residual.csv");
  csv << kSweepHeader;
  json per_eps = json::array();
  for (const auto& r : rows) {
    cols.push_back({r.order1.r_l2, r.order1.s_l2, r.order1.mass_l2, r.err_mu, r.err_c});
    csv << r.epsilon << ',' << r.order1.r_l2 << ',' << r.order1.s_l2 << ',' << r.order1.mass_l2 << ',' << r.err_mu
        << ',' << r.err_c << '\n';
    per_eps.push_back({{"epsilon", r.epsilon},
                       {"n", r.n},
                       {"order0_norm_rA", r.order0.r_l2},
                       {"order1_over_order0", r.order1.r_l2 / r.order0.r_l2},
                       {"structure_passed", r.structure.passed},
                       {"sup_p", r.structure.sup_p},
                       {"sup_q_weighted", r.structure.sup_q_weighted},
                       {"sup_tangential", r.structure.sup_tangential},
                       {"min_fprime_outer", r.structure.min_fprime_outer}});
  }
  json rep = sweep_orders(c.epsilons, cols, 0);
  rep["rows"] = per_eps;
  std::ofstream(out / "residual_report.json") << rep.dump(2) << '\n';
  write_manifest(out, "residual", j, threads, t0, {"residual.csv", "residual_report.json"});
  std::cout << rep.dump(2) << '\n';
  return 0;
}

int cmd_rates(const fs::path& cfg_path) {
  const auto t0 = Clock::now();
  const json j = load_json(cfg_path);
  const RatesConfig c = parse_rates(j);
  const int threads = resolve_threads(c.common.thread_count);
  const Profiles P = make_profiles(c.common.potential);
  const int n = static_cast<int>(c.epsilons.size());
  std::vector<CircleResult> runs(n);
  std::vector<BuildRow> builds(n);
  parallel_for(n, threads, [&](int k) {
    CircleSetup s = c.circle;
    s.epsilon = c.epsilons[k];
    runs[k] = run_circle(s, P, c.common.potential);
    BuildSetup b;
    b.epsilon = s.epsilon;
    b.L = s.L;
    b.R = s.R;
    b.nodes_per_eps = s.nodes_per_eps;
    b.laplacian = s.laplacian;
    b.elasticity = s.elasticity;
    builds[k] = residual_row(b, P, c.common.potential);
  });
  const fs::path out = c.common.output_dir;
  fs::create_directories(out);
  std::vector<std::array<double, 5>> cols;
  auto csv = open_csv(out / "rates.csv");
  csv << kSweepHeader;
  auto circ = open_csv(out / "circle.csv");
  circ << "epsilon,n,tau,steps,mu_ref,gt_residual,mu_ref_error,velocity,stefan_residual,final_radius,mass_drift\n";
  for (int k = 0; k < n; ++k) {
    const CircleResult& r = runs[k];
    const ResidualNorms& b = builds[k].order1;
    cols.push_back({b.r_l2, b.s_l2, b.mass_l2, r.err_mu, r.err_c});
    csv << r.epsilon << ',' << b.r_l2 << ',' << b.s_l2 << ',' << b.mass_l2 << ',' << r.err_mu << ',' << r.err_c
        << '\n';
    circ << r.epsilon << ',' << r.n << ',' << r.tau << ',' << r.steps << ',' << r.mu_ref << ',' << r.gt_residual
         << ',' << r.mu_ref_error << ',' << r.velocity << ',' << r.stefan_residual << ',' << r.final_radius << ','
         << r.mass_drift << '\n';
  }
  json rep = sweep_orders(c.epsilons, cols, 3);
  std::vector<double> gt;
  for (const auto& r : runs) gt.push_back(r.gt_residual);
  rep["gibbs_thomson_residual"] = order_of(c.epsilons, gt);
  std::ofstream(out / "rates_report.json") << rep.dump(2) << '\n';
  write_manifest(out, "rates", j, threads, t0, {"rates.csv", "circle.csv", "rates_report.json"});
  std::cout << rep.dump(2) << '\n';
  return 0;
}

int cmd_spectral(const fs::path& cfg_path) {
  const auto t0 = Clock::now();
  const json j = load_json(cfg_path);
  const SpectralConfig c = parse_spectral(j);
  const int threads = resolve_threads(c.common.thread_count);
  const Profiles P = make_profiles(c.common.potential);
  const Grid2D g = Grid2D::square(c.n, c.L);
  const Vec2 mid{0.5 * c.L, 0.5 * c.L};
  auto make = [&](double eps) {
    SpectralProblem p;
    p.epsilon = eps;
    p.gamma1 = c.gamma1;
    p.laplacian = c.common.laplacian;
    p.phi = Field::from_function(g, [&](Vec2 x) {
      const double d = c.profile == "planar" ? x.x - mid.x : (x - mid).norm() - c.radius;
      return c.amplitude * P.theta0.at(d / eps);
    });
    return p;
  };
  if (c.epsilons.size() < 3) throw SchemaError("epsilons: spectral needs at least 3 entries");
  const UniformityReport r = uniformity_report(c.epsilons, make, c.common.potential, threads, c.max_ratio);
  const fs::path out = c.common.output_dir;
  fs::create_directories(out);
  write_csv(r, (out / "spectral.csv").string());
  json rep{{"ratio", std::isfinite(r.ratio) ? json(r.ratio) : json("inf")},
           {"max_ratio", c.max_ratio},
           {"passed", r.passed}};
  if (c.cross_check_starts > 0) {
    json cc = json::array();
    for (double eps : c.epsilons) {
      const DescentResult d = descent_min_rayleigh(make(eps), c.common.potential, c.cross_check_starts, c.common.seed);
      cc.push_back({{"epsilon", eps}, {"lambda_min", d.lambda_min}, {"iterations", d.max_iterations_used}});
    }
    rep["descent_cross_check"] = cc;
  }
  std::ofstream(out / "spectral_report.json") << rep.dump(2) << '\n';
  write_manifest(out, "spectral", j, threads, t0, {"spectral.csv", "spectral_report.json"});
  std::cout << rep.dump(2) << '\n';
  return 0;
}

int cmd_compare(const fs::path& a, const fs::path& b, const fs::path& out) {
  const auto t0 = Clock::now();
  const auto diffs = io::compare_runs(a, b);
  fs::create_directories(out);
  io::write_csv(diffs, out / "compare.csv");
  std::map<std::string, std::array<double, 3>> worst;
  for (const auto& d : diffs) {
    auto& w = worst[d.field];
    w = {std::max(w[0], d.l2), std::max(w[1], d.l3), std::max(w[2], d.max)};
  }
  std::cout << "field,max_l2,max_l3,max_abs\n" << std::setprecision(10);
  for (const auto& [f, w] : worst) std::cout << f << ',' << w[0] << ',' << w[1] << ',' << w[2] << '\n';
  write_manifest(out, "compare", {{"run_a", a.string()}, {"run_b", b.string()}}, 1, t0, {"compare.csv"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cahn-Larche diffuse-interface lab"};
  app.require_subcommand(1);

  std::string pot = "quartic", output;
  double Z = 12.0, h = 0.005;
  auto* profile = app.add_subcommand("profile", "dump theta0, theta0', theta1 and sigma as CSV");
  profile->add_option("--potential", pot, "quartic or a JSON potential file");
  profile->add_option("--half-width", Z, "profile domain [-Z, Z]");
  profile->add_option("--step", h, "profile grid step");
  profile->add_option("-o,--output", output, "CSV path (stdout if omitted)");

  int samples = 2000;
  auto* vp = app.add_subcommand("validate-potential", "check the double-well assumptions");
  vp->add_option("--potential", pot, "quartic or a JSON potential file");
  vp->add_option("--samples", samples, "sample count");

  std::string config;
  auto* sim = app.add_subcommand("simulate", "run the phase-field model from a glued initial interface");
  auto* res = app.add_subcommand("residual", "residuals of the approximate solution over an eps sweep");
  auto* rates = app.add_subcommand("rates", "circle simulations over an eps sweep with fitted orders");
  auto* spec = app.add_subcommand("spectral", "smallest eigenvalue of the linearized operator over an eps sweep");
  for (auto* s : {sim, res, rates, spec}) s->add_option("config", config, "JSON config")->required();

  std::string run_a, run_b, cmp_out = "compare";
  auto* cmp = app.add_subcommand("compare", "per-frame L2, L3 and max differences of two trajectories");
  cmp->add_option("run_a", run_a)->required();
  cmp->add_option("run_b", run_b)->required();
  cmp->add_option("-o,--output-dir", cmp_out, "directory for compare.csv and the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), 2);
  }

  try {
    if (*profile) return cmd_profile(pot, Z, h, output);
    if (*vp) return cmd_validate(pot, samples);
    if (*sim) return cmd_simulate(config);
    if (*res) return cmd_residual(config);
    if (*rates) return cmd_rates(config);
    if (*spec) return cmd_spectral(config);
    if (*cmp) return cmd_compare(run_a, run_b, cmp_out);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
