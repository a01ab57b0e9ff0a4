#ifndef NBC_STUDY_HPP
#define NBC_STUDY_HPP

#include "nbc/controls.hpp"
#include "nbc/mesh.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nbc {

enum class StudyKind { Control, Trace, All };

StudyKind parse_study_kind(const std::string& token);

struct StudyConfig {
  std::vector<Angle> angles{Angle::HalfPi};
  std::vector<ControlKind> controls{ControlKind::PwLinear};
  StudyKind kind = StudyKind::Control;
  int min_level = 1;
  int max_level = 4;
  double alpha = 1.0;
  int quad_degree = 4;
  double tol_inner = 1e-11;
  double tol_outer = 1e-10;
  std::string out = "study.csv";
  std::optional<std::string> dump_mesh;

  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;
};

/// One refinement level of a convergence study. Quantities a study does not
/// measure stay empty; so does every order at the first level.
struct StudyRecord {
  int level = 0;
  double h = 0.0;
  std::optional<double> err_q;
  std::optional<double> err_u;
  std::optional<double> err_trace;
  std::optional<double> eoc_q;
  std::optional<double> eoc_u;
  std::optional<double> eoc_trace;
  std::optional<int> outer_iters;
  double seconds = 0.0;

  bool operator==(const StudyRecord&) const = default;
};

/// Cross-checks collected while a study runs.
struct StudyDiagnostics {
  /// Largest relative change of an error norm when recomputed with
  /// quad_degree + 2 at the finest level.
  double error_quadrature_drift = 0.0;
  /// Relative change of the desired-state load with quad_degree + 2 at the
  /// coarsest level (control studies only).
  double desired_load_drift = 0.0;
  double max_kkt_residual = 0.0; ///< relative to ||b||
  int max_outer_iterations = 0;
};

using RecordSink = std::function<void(const StudyRecord&)>;

/// Per level: mesh, optimal control problem with the manufactured data,
/// control and state errors against the exact solution, orders.
std::vector<StudyRecord> run_control_study(const StudyConfig& config, Angle angle, ControlKind kind,
                                           const RecordSink& sink = {},
                                           StudyDiagnostics* diagnostics = nullptr);

/// Per level: Ritz projection of the exact adjoint and its boundary error.
std::vector<StudyRecord> run_trace_study(const StudyConfig& config, Angle angle,
                                         const RecordSink& sink = {},
                                         StudyDiagnostics* diagnostics = nullptr);

/// log(e_{k-1}/e_k) / log(h_{k-1}/h_k); the first entry and any pair with a
/// zero error are empty.
std::vector<std::optional<double>> estimate_eoc(const std::vector<double>& errors,
                                                const std::vector<double>& hs);

inline constexpr const char* kCsvHeader =
    "level,h,err_q,err_u,err_trace,eoc_q,eoc_u,eoc_trace,outer_iters,seconds";

void write_csv(const std::vector<StudyRecord>& records, std::ostream& out);
void write_csv(const std::vector<StudyRecord>& records, const std::string& path);
std::vector<StudyRecord> read_csv(std::istream& in);
std::vector<StudyRecord> read_csv(const std::string& path);

/// Console table of a study.
void print_table(const std::vector<StudyRecord>& records, std::ostream& out);

/// Result line of the built-in self checks.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle suite of the manufactured solution for every angle plus mesh,
/// quadrature, FEM and optimization property checks on small meshes.
std::vector<CheckResult> run_self_checks();

} // namespace nbc

#endif // NBC_STUDY_HPP
