// spindrift: spin-dependent semiclassical electron trajectories in
// structured electromagnetic fields.
//
// Subcommands:
//   simulate <config>                  trajectories + summary + plots
//   fieldmap <config>                  invariant maps on the transverse plane
//   validate <suite|all>               validation suites, JSON report
//   sweep <config> --vary k=a:b:n      parameter sweep
//
// Exit codes: 0 success, 1 validation failure, 2 config error,
// 3 runtime/integration error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spindrift/config.hpp"
#include "spindrift/output.hpp"
#include "spindrift/selfconsistent.hpp"
#include "spindrift/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spindrift;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string output_dir(const SimulationConfig& cfg) {
  if (const char* env = std::getenv("SPINDRIFT_OUTPUT_DIR")) return env;
  return cfg.output_dir;
}

const char* branch_name(int sign) {
  return sign > 0 ? "plus" : (sign < 0 ? "minus" : "spinless");
}

json state_json(const TrajectoryState& st) {
  return json{{"t", st.t},
              {"x", {st.x[0], st.x[1], st.x[2]}},
              {"v", {st.v[0], st.v[1], st.v[2]}},
              {"gamma", st.gamma},
              {"s_real", st.s_real},
              {"s_imag", st.s_imag}};
}

int cmd_simulate(const std::string& config_path) {
  SimulationConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const std::string dir = output_dir(cfg);
  fs::create_directories(dir);

  std::vector<int> signs;
  switch (cfg.spin_mode) {
    case SpinMode::off: signs = {0}; break;
    case SpinMode::plus: signs = {+1}; break;
    case SpinMode::minus: signs = {-1}; break;
    case SpinMode::both: signs = {+1, -1, 0}; break;
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::future<Trajectory>> futures;
  for (int sign : signs)
    futures.push_back(std::async(std::launch::async, [&cfg, sign] {
      IntegrateArgs args{cfg.field, cfg.spin_settings(sign), cfg.integrator,
                         cfg.t_end, nullptr};
      return integrate(args, cfg.initial_state());
    }));

  json summary;
  summary["schema"] = "spindrift-summary-v1";
  summary["config_path"] = config_path;
  summary["branches"] = json::array();
  bool any_failed = false;

  std::vector<Trajectory> trajs;
  for (std::size_t i = 0; i < signs.size(); ++i) trajs.push_back(futures[i].get());

  for (std::size_t i = 0; i < signs.size(); ++i) {
    const int sign = signs[i];
    const Trajectory& traj = trajs[i];
    const SpinSettings spin = cfg.spin_settings(sign);
    const auto records = make_records(traj, cfg.field, spin);
    const std::string csv =
        dir + "/" + cfg.output_prefix + "_" + branch_name(sign) + ".csv";
    write_trajectory_csv(csv, records);

    json b;
    b["branch"] = branch_name(sign);
    b["csv"] = csv;
    b["completed"] = traj.diag.completed;
    b["message"] = traj.diag.message;
    b["steps_accepted"] = traj.diag.steps_accepted;
    b["steps_rejected"] = traj.diag.steps_rejected;
    b["near_null_encountered"] = traj.diag.near_null_encountered;
    if (!traj.samples.empty()) {
      b["final_state"] = state_json(traj.samples.back());
      double dl = 0.0, dp = 0.0;
      if (!records.empty()) {
        const double l0 = records.front().l_conserved;
        const double p0 = records.front().p_conserved;
        for (const auto& rec : records) {
          dl = std::max(dl, std::abs(rec.l_conserved - l0) /
                                std::max(std::abs(l0), 1e-30));
          dp = std::max(dp, std::abs(rec.p_conserved - p0) /
                                std::max(std::abs(p0), 1e-30));
        }
      }
      b["conservation_drift"] = {{"L", dl}, {"P", dp}};
      const TrajectoryState& last = traj.samples.back();
      if (last.v.norm() > 0.0) {
        const EigenMode m = mode_at(cfg.field, spin, last.t, last.x);
        const double mr = (m.branch != 0) ? m.mass_ratio : 1.0;
        const DeBroglieCheck db = debroglie_check(last, cfg.field, cfg.chi, mr);
        b["debroglie_ratio"] = db.ratio;
        b["debroglie_flagged"] = db.flagged;
      }
    }
    if (!traj.diag.completed) any_failed = true;
    summary["branches"].push_back(b);
  }

  if (cfg.sc_enabled) {
    const int sign = (cfg.spin_mode == SpinMode::minus) ? -1 : +1;
    const IterationReport rep =
        iterate(cfg.field, cfg.spin_settings(sign), cfg.integrator, cfg.t_end,
                cfg.initial_state(), cfg.sc);
    json sc;
    sc["iterations"] = rep.iterations;
    sc["converged"] = rep.converged;
    sc["deviations"] = rep.deviations;
    sc["message"] = rep.message;
    summary["selfconsistent"] = sc;
  }

  if (cfg.write_svg && !trajs.empty()) {
    const char* colors[3] = {"#c02020", "#2040c0", "#202020"};
    std::vector<Series> xy, zt, rho;
    for (std::size_t i = 0; i < signs.size(); ++i) {
      Series sxy{branch_name(signs[i]), colors[i % 3], {}, {}};
      Series szt = sxy, srho = sxy;
      for (const auto& st : trajs[i].samples) {
        sxy.x.push_back(st.x[0]);
        sxy.y.push_back(st.x[1]);
        szt.x.push_back(st.t);
        szt.y.push_back(st.x[2]);
        srho.x.push_back(st.t);
        srho.y.push_back(std::hypot(st.x[0], st.x[1]));
      }
      xy.push_back(std::move(sxy));
      zt.push_back(std::move(szt));
      rho.push_back(std::move(srho));
    }
    write_line_svg(dir + "/" + cfg.output_prefix + "_xy.svg",
                   "transverse trajectory", "x (c/w)", "y (c/w)", xy);
    write_line_svg(dir + "/" + cfg.output_prefix + "_zt.svg", "z(t)",
                   "t (1/w)", "z (c/w)", zt);
    write_line_svg(dir + "/" + cfg.output_prefix + "_rho.svg", "rho(t)",
                   "t (1/w)", "rho (c/w)", rho);
  }

  summary["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ofstream js(dir + "/" + cfg.output_prefix + "_summary.json");
  js << summary.dump(2) << "\n";

  if (any_failed) {
    std::cerr << "integration incomplete; partial output written to " << dir
              << "\n";
    return kExitRuntime;
  }
  std::cout << "wrote " << signs.size() << " trajectories to " << dir << "\n";
  return 0;
}

int cmd_fieldmap(const std::string& config_path) {
  SimulationConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!cfg.field.is_bessel_like()) {
    std::cerr << "config error: fieldmap requires a bessel or crossed model\n";
    return kExitConfig;
  }
  const std::string dir = output_dir(cfg);
  fs::create_directories(dir);
  const BesselBeamParams p = cfg.field.effective_bessel();
  const double amp2 =
      std::max(p.amp_te * p.amp_te + p.amp_tm * p.amp_tm, 1e-300);
  const int n = cfg.fieldmap_n;
  const double ext = cfg.fieldmap_extent;

  std::ofstream csv(dir + "/" + cfg.output_prefix + "_fieldmap.csv",
                    std::ios::binary);
  csv << "# spindrift fieldmap csv v1 (plane kz z - t = 0; values per amp^2)\n";
  csv << "x,y,delta2,ddelta2_dkrho,ddelta2_dtheta,energy_density,"
         "poynting_x,poynting_y,poynting_z\n";
  std::vector<double> heat(n * n);
  for (int iy = 0; iy < n; ++iy) {
    const double y = -ext + 2.0 * ext * iy / (n - 1);
    for (int ix = 0; ix < n; ++ix) {
      const double x = -ext + 2.0 * ext * ix / (n - 1);
      const SpacetimePoint pt{0.0, Vec3(x, y, 0.0)};
      const FieldSample f = cfg.field.sample(pt);
      const Invariants inv = field_invariants(f);
      const Vec4 g = grad_delta2(f);
      const double rho = std::hypot(x, y);
      const double drho =
          (rho > 0.0) ? (x * g[1] + y * g[2]) / rho / p.kperp : 0.0;
      const double dtheta = -g[0];
      const Vec3 poy = f.e.cross(f.b);
      const double u = 0.5 * (f.e.squaredNorm() + f.b.squaredNorm());
      heat[iy * n + ix] = inv.delta2_be / amp2;
      csv << format_double(x) << ',' << format_double(y) << ','
          << format_double(inv.delta2_be / amp2) << ','
          << format_double(drho / amp2) << ',' << format_double(dtheta / amp2)
          << ',' << format_double(u / amp2) << ','
          << format_double(poy[0] / amp2) << ',' << format_double(poy[1] / amp2)
          << ',' << format_double(poy[2] / amp2) << '\n';
    }
  }
  csv.close();
  if (cfg.write_svg)
    write_heatmap_svg(dir + "/" + cfg.output_prefix + "_delta2.svg",
                      "Delta^2_BE / amp^2", heat, n, n, -ext, ext, -ext, ext);
  std::cout << "wrote fieldmap (" << n << "x" << n << ") to " << dir << "\n";
  return 0;
}

json suite_json(const SuiteResult& s) {
  json out;
  out["suite"] = s.suite;
  out["pass"] = s.pass;
  out["wall_seconds"] = s.wall_seconds;
  out["checks"] = json::array();
  for (const auto& c : s.checks) {
    out["checks"].push_back({{"name", c.name},
                             {"measured", c.measured},
                             {"threshold", c.threshold},
                             {"comparison", c.greater_is_pass ? ">=" : "<="},
                             {"pass", c.pass},
                             {"note", c.note}});
  }
  return out;
}

int cmd_validate(const std::string& suite) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = validation_suite_names();
  } else {
    const auto all = validation_suite_names();
    if (std::find(all.begin(), all.end(), suite) == all.end()) {
      std::cerr << "unknown suite '" << suite << "'; available:";
      for (const auto& n : all) std::cerr << ' ' << n;
      std::cerr << " all\n";
      return kExitConfig;
    }
    names = {suite};
  }
  json report;
  report["schema"] = "spindrift-validate-v1";
  report["suites"] = json::array();
  bool all_pass = true;
  for (const auto& name : names) {
    const SuiteResult s = run_validation_suite(name);
    all_pass = all_pass && s.pass;
    report["suites"].push_back(suite_json(s));
    for (const auto& c : s.checks)
      std::cerr << (c.pass ? "[pass] " : "[FAIL] ") << s.suite << "."
                << c.name << "  measured=" << c.measured
                << (c.greater_is_pass ? " >= " : " <= ") << c.threshold
                << "\n";
  }
  report["pass"] = all_pass;
  std::cout << report.dump(2) << "\n";
  return all_pass ? 0 : kExitValidation;
}

int cmd_sweep(const std::string& config_path, const std::string& vary) {
  const auto eq = vary.find('=');
  if (eq == std::string::npos) {
    std::cerr << "config error: --vary expects key=start:stop:n\n";
    return kExitConfig;
  }
  const std::string key = vary.substr(0, eq);
  const std::string range = vary.substr(eq + 1);
  double start, stop;
  int count;
  if (std::sscanf(range.c_str(), "%lf:%lf:%d", &start, &stop, &count) != 3 ||
      count < 1) {
    std::cerr << "config error: --vary expects key=start:stop:n\n";
    return kExitConfig;
  }
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "config error: cannot open '" << config_path << "'\n";
    return kExitConfig;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string base_text = ss.str();

  json sweep;
  sweep["schema"] = "spindrift-sweep-v1";
  sweep["key"] = key;
  sweep["points"] = json::array();
  std::string dir;
  for (int i = 0; i < count; ++i) {
    const double value =
        (count == 1) ? start : start + (stop - start) * i / (count - 1);
    SimulationConfig cfg;
    try {
      cfg = parse_config(
          override_config_text(base_text, key, format_double(value)));
    } catch (const ConfigError& e) {
      std::cerr << "config error at sweep point " << i << ": " << e.what()
                << "\n";
      return kExitConfig;
    }
    cfg.output_prefix += "_" + key + "_" + std::to_string(i);
    dir = output_dir(cfg);
    fs::create_directories(dir);

    const int sign = (cfg.spin_mode == SpinMode::minus) ? -1 : +1;
    IntegrateArgs args{cfg.field, cfg.spin_settings(sign), cfg.integrator,
                       cfg.t_end, nullptr};
    const Trajectory traj = integrate(args, cfg.initial_state());
    const auto records = make_records(traj, cfg.field, cfg.spin_settings(sign));
    write_trajectory_csv(dir + "/" + cfg.output_prefix + ".csv", records);
    json ptj;
    ptj["value"] = value;
    ptj["completed"] = traj.diag.completed;
    if (!traj.samples.empty()) ptj["final_state"] = state_json(traj.samples.back());
    sweep["points"].push_back(ptj);
    if (!traj.diag.completed) {
      std::ofstream js(dir + "/sweep_summary.json");
      js << sweep.dump(2) << "\n";
      std::cerr << "integration failed at sweep point " << i << ": "
                << traj.diag.message << "\n";
      return kExitRuntime;
    }
  }
  std::ofstream js(dir + "/sweep_summary.json");
  js << sweep.dump(2) << "\n";
  std::cout << "sweep complete: " << count << " points\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spin-dependent semiclassical electron trajectories in "
               "structured light"};
  app.require_subcommand(1);

  std::string sim_config, map_config, suite = "all", sweep_config, vary;
  auto* sim = app.add_subcommand("simulate", "integrate trajectories");
  sim->add_option("config", sim_config, "config file")->required();
  auto* fmap = app.add_subcommand("fieldmap", "invariant maps");
  fmap->add_option("config", map_config, "config file")->required();
  auto* val = app.add_subcommand("validate", "run validation suites");
  val->add_option("suite", suite, "suite name or 'all'");
  auto* swp = app.add_subcommand("sweep", "parameter sweep");
  swp->add_option("config", sweep_config, "config file")->required();
  swp->add_option("--vary", vary, "key=start:stop:n")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitConfig : 0;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_config);
    if (fmap->parsed()) return cmd_fieldmap(map_config);
    if (val->parsed()) return cmd_validate(suite);
    if (swp->parsed()) return cmd_sweep(sweep_config, vary);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
