#include "nbc/study.hpp"

#include "nbc/errors.hpp"
#include "nbc/fem.hpp"
#include "nbc/manufactured.hpp"
#include "nbc/ocp.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace nbc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double relative_change(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

std::optional<double> order(std::optional<double> e_prev, std::optional<double> e,
                            double h_prev, double h) {
  if (!e_prev || !e) return std::nullopt;
  return estimate_eoc({*e_prev, *e}, {h_prev, h})[1];
}

void fill_orders(std::vector<StudyRecord>& records) {
  auto& cur = records.back();
  if (records.size() < 2) return;
  const auto& prev = records[records.size() - 2];
  cur.eoc_q = order(prev.err_q, cur.err_q, prev.h, cur.h);
  cur.eoc_u = order(prev.err_u, cur.err_u, prev.h, cur.h);
  cur.eoc_trace = order(prev.err_trace, cur.err_trace, prev.h, cur.h);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

} // namespace

StudyKind parse_study_kind(const std::string& token) {
  if (token == "control") return StudyKind::Control;
  if (token == "trace") return StudyKind::Trace;
  if (token == "all") return StudyKind::All;
  throw ConfigError("unknown study kind '" + token + "' (expected control, trace or all)");
}

void StudyConfig::validate() const {
  if (angles.empty()) throw ConfigError("no angle selected");
  if (controls.empty() && kind != StudyKind::Trace) throw ConfigError("no control space selected");
  if (min_level < 0) throw ConfigError("minimum level must be non-negative");
  if (max_level < min_level) throw ConfigError("maximum level is below minimum level");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (quad_degree < 4) throw ConfigError("error quadrature degree must be at least 4");
  if (!(tol_inner > 0.0) || !(tol_outer > 0.0)) throw ConfigError("tolerances must be positive");
}

std::vector<std::optional<double>> estimate_eoc(const std::vector<double>& errors,
                                                const std::vector<double>& hs) {
  if (errors.size() != hs.size()) throw ConfigError("estimate_eoc: length mismatch");
  std::vector<std::optional<double>> orders(errors.size());
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (!(hs[k] < hs[k - 1]) || !(hs[k] > 0.0))
      throw ConfigError("estimate_eoc: mesh sizes must be positive and strictly decreasing");
    if (errors[k] < 0.0 || errors[k - 1] < 0.0)
      throw ConfigError("estimate_eoc: errors must be non-negative");
    if (errors[k] == 0.0 || errors[k - 1] == 0.0) continue;
    orders[k] = std::log(errors[k - 1] / errors[k]) / std::log(hs[k - 1] / hs[k]);
  }
  return orders;
}

std::vector<StudyRecord> run_control_study(const StudyConfig& config, Angle angle, ControlKind kind,
                                           const RecordSink& sink,
                                           StudyDiagnostics* diagnostics) {
  config.validate();
  const AngleCase omega = angle_case(angle);
  const ManufacturedCase data = build_case(omega);
  StudyDiagnostics diag;
  std::vector<StudyRecord> records;

  for (int level = config.min_level; level <= config.max_level; ++level) {
    const auto start = Clock::now();
    const Mesh mesh = generate_mesh(omega, level);
    if (!vertices_in_sector(mesh)) throw ConfigError("mesh vertex outside the angular sector");
    if (config.dump_mesh && level == config.max_level) write_mesh(mesh, *config.dump_mesh);

    const ControlSpace space(mesh, kind);
    OcpData ocp_data{data.f, data.g, data.desired, config.alpha, config.quad_degree,
                     config.tol_inner};
    const OcpProblem problem(space, ocp_data);
    if (level == config.min_level) {
      const Eigen::VectorXd fine =
          assemble_volume_load(mesh, data.desired, config.quad_degree + 2);
      diag.desired_load_drift = (fine - problem.desired_load()).norm() / fine.norm();
    }

    const OcpSolution sol = solve_ocp(problem, {config.tol_outer, 500, std::nullopt});
    const ControlFunction q_h(space, sol.control);
    const FeFunction u_h(mesh, sol.state);

    StudyRecord rec;
    rec.level = level;
    rec.h = mesh.h;
    rec.err_q = l2_error_boundary(q_h, data.control, config.quad_degree);
    rec.err_u = l2_error_volume(u_h, data.state, config.quad_degree);
    rec.outer_iters = sol.outer_iterations;
    if (level == config.max_level) {
      diag.error_quadrature_drift = std::max(
          relative_change(*rec.err_q, l2_error_boundary(q_h, data.control, config.quad_degree + 2)),
          relative_change(*rec.err_u, l2_error_volume(u_h, data.state, config.quad_degree + 2)));
    }
    diag.max_kkt_residual = std::max(diag.max_kkt_residual, sol.relative_kkt_residual);
    diag.max_outer_iterations = std::max(diag.max_outer_iterations, sol.outer_iterations);
    rec.seconds = seconds_since(start);
    records.push_back(rec);
    fill_orders(records);
    if (sink) sink(records.back());
  }
  if (diagnostics) *diagnostics = diag;
  return records;
}

std::vector<StudyRecord> run_trace_study(const StudyConfig& config, Angle angle,
                                         const RecordSink& sink, StudyDiagnostics* diagnostics) {
  config.validate();
  const AngleCase omega = angle_case(angle);
  const ManufacturedCase data = build_case(omega);
  StudyDiagnostics diag;
  std::vector<StudyRecord> records;

  for (int level = config.min_level; level <= config.max_level; ++level) {
    const auto start = Clock::now();
    const Mesh mesh = generate_mesh(omega, level);
    if (config.dump_mesh && level == config.max_level) write_mesh(mesh, *config.dump_mesh);

    // Ritz projection: f = -Lap z + z, g = 0.
    const SparseMatrix A = assemble_system(mesh);
    const Eigen::VectorXd load = assemble_volume_load(mesh, data.f, config.quad_degree);
    const FeFunction ritz =
        solve_state(mesh, A, load, Eigen::VectorXd::Zero(mesh.num_vertices()), config.tol_inner);

    StudyRecord rec;
    rec.level = level;
    rec.h = mesh.h;
    rec.err_u = l2_error_volume(ritz, data.adjoint, config.quad_degree);
    rec.err_trace = l2_error_boundary(ritz, data.adjoint, config.quad_degree);
    if (level == config.max_level) {
      diag.error_quadrature_drift = std::max(
          relative_change(*rec.err_trace,
                          l2_error_boundary(ritz, data.adjoint, config.quad_degree + 2)),
          relative_change(*rec.err_u, l2_error_volume(ritz, data.adjoint, config.quad_degree + 2)));
    }
    rec.seconds = seconds_since(start);
    records.push_back(rec);
    fill_orders(records);
    if (sink) sink(records.back());
  }
  if (diagnostics) *diagnostics = diag;
  return records;
}

void write_csv(const std::vector<StudyRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.level << ',' << format_double(r.h) << ',' << format_optional(r.err_q) << ','
        << format_optional(r.err_u) << ',' << format_optional(r.err_trace) << ','
        << format_optional(r.eoc_q) << ',' << format_optional(r.eoc_u) << ','
        << format_optional(r.eoc_trace) << ','
        << (r.outer_iters ? std::to_string(*r.outer_iters) : std::string()) << ','
        << format_double(r.seconds) << '\n';
  }
}

void write_csv(const std::vector<StudyRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<StudyRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("read_csv: missing or unexpected header");
  std::vector<StudyRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 10) throw std::runtime_error("read_csv: expected 10 fields in '" + line + "'");
    StudyRecord r;
    r.level = std::stoi(f[0]);
    r.h = std::stod(f[1]);
    r.err_q = parse_optional(f[2]);
    r.err_u = parse_optional(f[3]);
    r.err_trace = parse_optional(f[4]);
    r.eoc_q = parse_optional(f[5]);
    r.eoc_u = parse_optional(f[6]);
    r.eoc_trace = parse_optional(f[7]);
    if (!f[8].empty()) r.outer_iters = std::stoi(f[8]);
    r.seconds = std::stod(f[9]);
    records.push_back(r);
  }
  return records;
}

std::vector<StudyRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

void print_table(const std::vector<StudyRecord>& records, std::ostream& out) {
  auto cell = [&out](const std::optional<double>& v, bool scientific) {
    out << std::setw(12);
    if (!v) {
      out << "-";
    } else if (scientific) {
      out << std::scientific << std::setprecision(4) << *v;
    } else {
      out << std::fixed << std::setprecision(3) << *v;
    }
  };
  out << std::setw(5) << "level" << std::setw(12) << "h" << std::setw(12) << "err_q"
      << std::setw(12) << "eoc_q" << std::setw(12) << "err_u" << std::setw(12) << "eoc_u"
      << std::setw(12) << "err_trace" << std::setw(12) << "eoc_trace" << std::setw(8) << "iters"
      << std::setw(10) << "seconds" << '\n';
  for (const auto& r : records) {
    out << std::setw(5) << r.level;
    cell(r.h, true);
    cell(r.err_q, true);
    cell(r.eoc_q, false);
    cell(r.err_u, true);
    cell(r.eoc_u, false);
    cell(r.err_trace, true);
    cell(r.eoc_trace, false);
    out << std::setw(8) << (r.outer_iters ? std::to_string(*r.outer_iters) : "-");
    out << std::setw(10) << std::fixed << std::setprecision(2) << r.seconds << '\n';
  }
  out << std::defaultfloat;
}

} // namespace nbc
