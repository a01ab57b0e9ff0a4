// Command-line driver for the convergence studies.
//
//   nbc study --omega all --control both --kind all --levels 1..4 --out results.csv
//   nbc --check

#include "nbc/errors.hpp"
#include "nbc/study.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <regex>

namespace {

constexpr int kExitSolver = 1;
constexpr int kExitConfig = 2;

int run_checks() {
  bool ok = true;
  for (const auto& r : nbc::run_self_checks()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  std::cout << (ok ? "all checks passed" : "some checks FAILED") << '\n';
  return ok ? 0 : kExitSolver;
}

void parse_levels(const std::string& spec, nbc::StudyConfig& config) {
  static const std::regex pattern(R"((\d+)\.\.(\d+))");
  std::smatch m;
  if (!std::regex_match(spec, m, pattern))
    throw nbc::ConfigError("levels must look like MIN..MAX, got '" + spec + "'");
  config.min_level = std::stoi(m[1]);
  config.max_level = std::stoi(m[2]);
}

// Output path of one study when several share an --out argument.
std::string output_path(const std::string& out, bool single, const std::string& tag) {
  if (single) return out;
  const std::filesystem::path p(out);
  std::filesystem::path result = p.parent_path() / (p.stem().string() + "_" + tag);
  result += p.has_extension() ? p.extension() : std::filesystem::path(".csv");
  return result.string();
}

struct Job {
  nbc::Angle angle;
  std::optional<nbc::ControlKind> control; // empty for trace studies
};

int run_study(nbc::StudyConfig config, const std::string& omega, const std::string& control,
              const std::string& kind, const std::string& levels) {
  parse_levels(levels, config);
  config.kind = nbc::parse_study_kind(kind);
  config.angles = omega == "all"
                      ? std::vector<nbc::Angle>{nbc::Angle::HalfPi, nbc::Angle::TwoThirdsPi,
                                                nbc::Angle::ThreeQuartersPi}
                      : std::vector<nbc::Angle>{nbc::parse_angle(omega)};
  config.controls = control == "both"
                        ? std::vector<nbc::ControlKind>{nbc::ControlKind::PwConstant,
                                                        nbc::ControlKind::PwLinear}
                        : std::vector<nbc::ControlKind>{nbc::parse_control_kind(control)};
  config.validate();

  std::vector<Job> jobs;
  for (nbc::Angle a : config.angles) {
    if (config.kind != nbc::StudyKind::Trace)
      for (nbc::ControlKind c : config.controls) jobs.push_back({a, c});
    if (config.kind != nbc::StudyKind::Control) jobs.push_back({a, std::nullopt});
  }

  const bool single = jobs.size() == 1;
  for (const Job& job : jobs) {
    const std::string tag = nbc::to_string(job.angle) + "_" +
                            (job.control ? nbc::to_string(*job.control) + "_control" : "trace");
    const std::string path = output_path(config.out, single, tag);
    std::cout << "== omega " << nbc::to_string(job.angle) << ", "
              << (job.control ? nbc::to_string(*job.control) + " control study" : "trace study")
              << " -> " << path << '\n';

    std::vector<nbc::StudyRecord> partial;
    auto sink = [&partial](const nbc::StudyRecord& r) { partial.push_back(r); };
    nbc::StudyDiagnostics diag;
    try {
      if (job.control)
        nbc::run_control_study(config, job.angle, *job.control, sink, &diag);
      else
        nbc::run_trace_study(config, job.angle, sink, &diag);
    } catch (...) {
      nbc::write_csv(partial, path);
      nbc::print_table(partial, std::cout);
      throw;
    }
    nbc::write_csv(partial, path);
    nbc::print_table(partial, std::cout);
    std::cout << "   quadrature drift of error norms (degree +2): " << diag.error_quadrature_drift;
    if (job.control)
      std::cout << ", desired-load drift: " << diag.desired_load_drift
                << ", max relative KKT residual: " << diag.max_kkt_residual;
    std::cout << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neumann boundary control on prism domains: convergence studies"};
  app.set_version_flag("--version", "nbc 1.0");
  bool check = false;
  app.add_flag("--check", check, "Run the manufactured-solution oracles and property checks");

  nbc::StudyConfig config;
  std::string omega = "all", control = "both", kind = "all", levels = "1..4";
  bool study_check = false;
  CLI::App* study = app.add_subcommand("study", "Run a convergence study");
  study->add_option("--omega", omega, "Edge angle: pi2, 2pi3, 3pi4 or all")
      ->check(CLI::IsMember({"pi2", "2pi3", "3pi4", "all"}));
  study->add_option("--control", control, "Control space: pw-constant, pw-linear or both")
      ->check(CLI::IsMember({"pw-constant", "pw-linear", "both"}));
  study->add_option("--kind", kind, "Study: control, trace or all")
      ->check(CLI::IsMember({"control", "trace", "all"}));
  study->add_option("--levels", levels, "Refinement levels MIN..MAX");
  study->add_option("--alpha", config.alpha, "Control cost weight");
  study->add_option("--quad-degree", config.quad_degree, "Quadrature degree of error integrals");
  study->add_option("--tol-inner", config.tol_inner, "Relative tolerance of the PDE solves");
  study->add_option("--tol-outer", config.tol_outer, "Relative tolerance of the reduced CG");
  study->add_option("--out", config.out, "CSV output path");
  std::string dump;
  study->add_option("--dump-mesh", dump, "Write the finest mesh to this file");
  study->add_flag("--check", study_check, "Run the self checks instead of a study");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (check || study_check) return run_checks();
    if (!study->parsed()) {
      std::cout << app.help();
      return kExitConfig;
    }
    if (!dump.empty()) config.dump_mesh = dump;
    return run_study(config, omega, control, kind, levels);
  } catch (const nbc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nbc::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nbc::ConvergenceError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}
