#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nsmhd/io.hpp"
#include "nsmhd/norms.hpp"
#include "nsmhd/solver.hpp"

namespace nsmhd {

/// Discrete energy identity
///   dE/dt + 2 eps (||Sv||^2 + ||SH||^2) + 2 eps (zeta_v W_v + zeta_H W_H) = 0
/// with dE/dt from centered differences of the recorded energy. The residual
/// splits exactly into a time part (centered difference minus the
/// semi-discrete rate) and a space part (semi-discrete rate plus the
/// continuous dissipation functional evaluated on the grid).
struct AuditResult {
  std::vector<double> t;  ///< interior sample times
  std::vector<double> residual;
  std::vector<double> relative;  ///< residual / dissipation (eps > 0) or energy drift (eps = 0)
  std::vector<double> time_part;
  std::vector<double> space_part;
  std::vector<double> dissipation;
  double max_relative = 0.0;
  double rms_relative = 0.0;
  double max_time_relative = 0.0;
  double max_space_relative = 0.0;
  bool ideal = false;
  /// Wall term non-negative whenever zeta >= 0 and entering with the
  /// dissipative sign.
  bool wall_sign_ok = true;
};

AuditResult energy_audit(const RunRecord& r, double epsilon, double zeta_v, double zeta_H);
inline AuditResult energy_audit(const RunRecord& r, double epsilon, double zeta) {
  return energy_audit(r, epsilon, zeta, zeta);
}

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

/// Least squares of log(error) against log(eps).
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

/// Worker-pool size: NSMHD_WORKERS if set, else the hardware concurrency.
int worker_count();
inline constexpr const char* kWorkersEnv = "NSMHD_WORKERS";

struct SweepOptions {
  std::vector<double> epsilons{1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4};
  std::vector<double> compare_times{0.5};
  std::vector<double> p_list{4.0};
  /// Spacing of the stored states used for the time integrals; every compare
  /// time must be a multiple of it.
  double sample_interval = 0.05;
  int workers = 0;  ///< 0: worker_count()
  /// Table written here (with failed runs marked) when a run fails.
  std::string partial_path;
};

struct SweepRow {
  double epsilon = 0.0;
  double time = 0.0;
  std::string norm;   ///< L2, H1, Linf, W1,<p>, eps_int_H1, eps_int_H2
  std::string field;  ///< v or H
  double value = 0.0;
  std::string status = "ok";
};

/// Per-run diagnostics beyond the error table.
struct SweepRun {
  double epsilon = 0.0;  ///< 0 for the ideal reference
  double dt = 0.0;
  std::string status = "ok";
  RunRecord record;
  double sup_nm = 0.0;             ///< max over samples of N_m
  double dissipation_hessian = 0.0;  ///< eps * int_0^t_end ||grad^2 v||^2
  std::vector<double> pressure_ratio;  ///< ||grad P2|| / (eps (||v||_2 + ||grad v||_1)) per compare time
  std::vector<LayerProfile> layers;    ///< per compare time
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepRun> runs;  ///< ideal reference first, then the ladder in order
  std::vector<double> compare_times;
  std::vector<std::string> norm_names;
  bool complete = true;

  /// (eps, value) pairs of one table column.
  std::vector<std::pair<double, double>> series(const std::string& norm, const std::string& field,
                                                double time) const;
};

/// Runs the ideal reference and every eps of the ladder from the same data on
/// the same grid. The step of every run is min(base dt, CFL limit of the
/// initial state) reduced to divide the sample interval.
SweepResult epsilon_sweep(const SimConfig& base, const SweepOptions& options);

/// Error-table CSV: epsilon,time,norm,field,value,status
CsvTable sweep_table(const SweepResult& r);
std::vector<SweepRow> sweep_rows_from_table(const CsvTable& t);

/// Per-run CSV: epsilon,dt,status,sup_nm,dissipation_hessian,
/// then pressure_ratio/layer_amplitude/layer_width for each compare time.
CsvTable sweep_run_table(const SweepResult& r);

/// Exponent of the bound on each table column as a power of eps. The
/// unsquared norms carry half the exponent of the squared bounds; the
/// time-integrated columns are stored squared.
///   L2 3/4, H1 1/4, Linf 3/10, W1,p 1/(2p), eps_int_H1 3/2, eps_int_H2 1/2
double target_exponent(const std::string& norm);

struct RateRow {
  std::string norm;
  std::string field;
  double time = 0.0;
  RateFit fit;
  double target = 0.0;
  bool monotone = false;
  std::string status = "ok";  ///< or the reason no fit was possible
};

/// One fit per (norm, field, compare time) of the table.
std::vector<RateRow> rate_report(const SweepResult& r);
/// CSV: norm,field,time,slope,intercept,r_squared,points,target,monotone,status
CsvTable rate_table(const std::vector<RateRow>& rows);

/// True when the column does not increase as eps decreases.
bool monotone_in_epsilon(const std::vector<std::pair<double, double>>& series);

/// One ladder step: |grad P2| ratio and the boundary layer for a pair of states.
double pressure_ratio(const FieldState& s, double epsilon, double zeta);

/// log2 of successive error ratios.
double observed_order(double coarse, double fine, double refinement = 2.0);

}  // namespace nsmhd
