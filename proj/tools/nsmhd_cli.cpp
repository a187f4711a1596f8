#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nsmhd/config.hpp"
#include "nsmhd/errors.hpp"
#include "nsmhd/harness.hpp"
#include "nsmhd/io.hpp"
#include "nsmhd/norms.hpp"
#include "nsmhd/solver.hpp"

namespace fs = std::filesystem;
using namespace nsmhd;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SimConfig make_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::string text = path.empty() ? std::string() : read_text(path);
  text += "\n";
  for (const auto& kv : overrides) {
    if (kv.find('=') == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    text += kv + "\n";
  }
  return parse_config(text);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

CsvTable series_table(const RunRecord& r) {
  CsvTable t;
  t.header = {"t", "energy", "strain_v", "strain_H", "wall_v", "wall_H", "energy_rate",
              "div_v", "div_H", "wall_vorticity_v", "wall_vorticity_H", "cross_helicity"};
  for (size_t i = 0; i < r.t.size(); ++i)
    t.rows.push_back({format_double(r.t[i]), format_double(r.energy[i]), format_double(r.strain_v[i]),
                      format_double(r.strain_H[i]), format_double(r.wall_v[i]), format_double(r.wall_H[i]),
                      format_double(r.energy_rate[i]), format_double(r.div_v[i]), format_double(r.div_H[i]),
                      format_double(r.wall_vorticity_v[i]), format_double(r.wall_vorticity_H[i]),
                      format_double(r.cross_helicity[i])});
  return t;
}

void print_fit(const char* wall, const LayerFit& f) {
  std::printf("%s amplitude=%.6e width=%.6e baseline=%.6e residual=%.3e\n", wall, f.amplitude, f.width,
              f.baseline, f.residual);
}

int cmd_run(const std::string& config, const std::vector<std::string>& sets, const std::string& out) {
  SimConfig c = make_config(config, sets);
  ensure_dir(out);
  if (!c.checkpoint_times.empty() && c.checkpoint_dir.empty()) c.checkpoint_dir = (fs::path(out) / "checkpoints").string();
  const RunRecord r = run(c);
  write_record((fs::path(out) / "record.json").string(), r);
  write_csv((fs::path(out) / "series.csv").string(), series_table(r));
  std::printf("steps=%ld dt=%.6e t_end=%.6e\n", r.steps, r.dt, r.t.back());
  std::printf("energy start=%.12e end=%.12e\n", r.energy.front(), r.energy.back());
  for (const auto& ck : r.checkpoints) std::printf("checkpoint t=%.6e %s\n", ck.t, ck.path.c_str());
  return 0;
}

int cmd_sweep(const std::string& config, const std::vector<std::string>& sets, const std::string& out,
              const SweepOptions& opt_in) {
  const SimConfig c = make_config(config, sets);
  ensure_dir(out);
  SweepOptions opt = opt_in;
  const std::string errors = (fs::path(out) / "errors.csv").string();
  opt.partial_path = errors;
  const SweepResult r = epsilon_sweep(c, opt);
  write_csv(errors, sweep_table(r));
  write_csv((fs::path(out) / "runs.csv").string(), sweep_run_table(r));
  const auto report = rate_report(r);
  write_csv((fs::path(out) / "rates.csv").string(), rate_table(report));
  std::printf("%-12s %-5s %-8s %10s %10s %8s %9s %s\n", "norm", "field", "time", "slope", "target", "r2",
              "monotone", "status");
  for (const auto& row : report)
    std::printf("%-12s %-5s %-8g %10.4f %10.4f %8.4f %9s %s\n", row.norm.c_str(), row.field.c_str(), row.time,
                row.fit.slope, row.target, row.fit.r_squared, row.monotone ? "yes" : "no", row.status.c_str());
  return 0;
}

int cmd_audit(const std::string& path, const std::string& csv) {
  const RunRecord r = read_record(path);
  const AuditResult a = energy_audit(r, r.config.epsilon, r.config.zeta_v, r.config.zeta_H);
  if (!csv.empty()) {
    CsvTable t;
    t.header = {"t", "residual", "relative", "time_part", "space_part", "dissipation"};
    for (size_t i = 0; i < a.t.size(); ++i)
      t.rows.push_back({format_double(a.t[i]), format_double(a.residual[i]), format_double(a.relative[i]),
                        format_double(a.time_part[i]), format_double(a.space_part[i]),
                        format_double(a.dissipation[i])});
    write_csv(csv, t);
  }
  std::printf("mode=%s samples=%zu\n", a.ideal ? "ideal" : "viscous", a.t.size());
  std::printf("max_relative=%.6e rms_relative=%.6e\n", a.max_relative, a.rms_relative);
  std::printf("max_time_relative=%.6e max_space_relative=%.6e\n", a.max_time_relative, a.max_space_relative);
  std::printf("wall_sign=%s\n", a.wall_sign_ok ? "ok" : "violated");
  return 0;
}

int cmd_profile(const std::string& viscous, const std::string& ideal, const std::string& csv) {
  const Checkpoint a = read_checkpoint(viscous);
  const Checkpoint b = read_checkpoint(ideal);
  if (a.meta.variant != Variant::viscous || !(a.meta.epsilon > 0.0))
    throw UsageError("'" + viscous + "' does not hold a viscous state");
  const LayerProfile p = boundary_layer_profile(a.state.v, b.state.v, a.meta.epsilon);
  if (!csv.empty()) {
    CsvTable t;
    t.header = {"z", "profile"};
    for (Eigen::Index i = 0; i < p.z.size(); ++i) t.rows.push_back({format_double(p.z[i]), format_double(p.profile[i])});
    write_csv(csv, t);
  }
  std::printf("epsilon=%.6e sqrt_epsilon=%.6e\n", a.meta.epsilon, std::sqrt(a.meta.epsilon));
  print_fit("lower", p.lower);
  print_fit("upper", p.upper);
  std::printf("dominant=%s\n", p.dominant_is_upper ? "upper" : "lower");
  return 0;
}

int cmd_norms(const std::string& path, int m) {
  const Checkpoint ck = read_checkpoint(path);
  if (m < 1 || m > kMaxConormalOrder) throw UsageError("--m must lie in [1, " + std::to_string(kMaxConormalOrder) + "]");
  const NmReport rep = n_m_diagnostic(ck.state.v, ck.state.H, m);
  const char* names[6] = {"v_m", "grad_v_m-1", "grad_v_1inf", "H_m", "grad_H_m-1", "grad_H_1inf"};
  std::printf("t=%.6e m=%d\n", ck.state.t, m);
  for (int i = 0; i < 6; ++i) std::printf("%-12s %.12e\n", names[i], rep.parts[size_t(i)]);
  std::printf("%-12s %.12e\n", "N_m", rep.total());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel MHD solver with Navier-slip walls"};
  app.require_subcommand(1);

  std::string config, out = "out", record, audit_csv, viscous, ideal, profile_csv, checkpoint;
  std::vector<std::string> sets;
  int m = 2;
  SweepOptions sweep_opt;

  auto* run_cmd = app.add_subcommand("run", "integrate one configuration");
  run_cmd->add_option("-c,--config", config, "key = value file")->required();
  run_cmd->add_option("-s,--set", sets, "override as key=value");
  run_cmd->add_option("-o,--out", out, "output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "vanishing-viscosity sweep against the ideal run");
  sweep_cmd->add_option("-c,--config", config, "key = value file")->required();
  sweep_cmd->add_option("-s,--set", sets, "override as key=value");
  sweep_cmd->add_option("-o,--out", out, "output directory");
  sweep_cmd->add_option("--eps", sweep_opt.epsilons, "epsilon ladder")->delimiter(',');
  sweep_cmd->add_option("--times", sweep_opt.compare_times, "compare times")->delimiter(',');
  sweep_cmd->add_option("--p", sweep_opt.p_list, "W1,p exponents")->delimiter(',');
  sweep_cmd->add_option("--interval", sweep_opt.sample_interval, "state sample interval");
  sweep_cmd->add_option("--workers", sweep_opt.workers, "pool size (default NSMHD_WORKERS or cores)");

  auto* audit_cmd = app.add_subcommand("audit", "energy identity of a recorded run");
  audit_cmd->add_option("-r,--record", record, "record.json")->required();
  audit_cmd->add_option("--csv", audit_csv, "write the residual series");

  auto* profile_cmd = app.add_subcommand("profile", "boundary-layer profile of v_eps - v_ideal");
  profile_cmd->add_option("--viscous", viscous, "viscous checkpoint")->required();
  profile_cmd->add_option("--ideal", ideal, "ideal checkpoint")->required();
  profile_cmd->add_option("--csv", profile_csv, "write the profile");

  auto* norms_cmd = app.add_subcommand("norms", "conormal diagnostic N_m of a checkpoint");
  norms_cmd->add_option("-k,--checkpoint", checkpoint, "checkpoint file")->required();
  norms_cmd->add_option("-m,--m", m, "conormal order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return UsageError("").exit_code();
  }

  try {
    if (*run_cmd) return cmd_run(config, sets, out);
    if (*sweep_cmd) return cmd_sweep(config, sets, out, sweep_opt);
    if (*audit_cmd) return cmd_audit(record, audit_csv);
    if (*profile_cmd) return cmd_profile(viscous, ideal, profile_csv);
    if (*norms_cmd) return cmd_norms(checkpoint, m);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", e.category(), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
