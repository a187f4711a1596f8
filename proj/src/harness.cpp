#include "nsmhd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "nsmhd/elliptic.hpp"
#include "nsmhd/errors.hpp"
#include "nsmhd/field_ops.hpp"

namespace nsmhd {

AuditResult energy_audit(const RunRecord& r, double epsilon, double zeta_v, double zeta_H) {
  const size_t n = r.t.size();
  if (n < 3) throw UsageError("energy audit needs at least 3 samples, got " + std::to_string(n));
  if (r.energy_rate.size() != n || r.energy.size() != n)
    throw UsageError("energy audit: inconsistent series lengths");
  AuditResult a;
  a.ideal = epsilon == 0.0;
  const double e0 = r.energy.front();
  double sum_sq = 0.0, max_plus = 0.0, max_minus = 0.0;
  for (size_t i = 1; i + 1 < n; ++i) {
    const double dedt = (r.energy[i + 1] - r.energy[i - 1]) / (r.t[i + 1] - r.t[i - 1]);
    const double wall = 2.0 * epsilon * (zeta_v * r.wall_v[i] + zeta_H * r.wall_H[i]);
    const double diss = 2.0 * epsilon * (r.strain_v[i] + r.strain_H[i]) + wall;
    const double res = dedt + diss;
    max_plus = std::max(max_plus, std::abs(res));
    max_minus = std::max(max_minus, std::abs(res - 2.0 * wall));
    double scale;
    double rel;
    if (a.ideal) {
      scale = e0 > 0.0 ? e0 : 1.0;
      rel = std::abs(r.energy[i] - e0) / scale;
    } else {
      scale = std::abs(diss) > 0.0 ? std::abs(diss) : 1.0;
      rel = std::abs(res) / scale;
    }
    a.t.push_back(r.t[i]);
    a.residual.push_back(res);
    a.dissipation.push_back(diss);
    a.relative.push_back(rel);
    a.time_part.push_back(dedt - r.energy_rate[i]);
    a.space_part.push_back(r.energy_rate[i] + diss);
    a.max_relative = std::max(a.max_relative, rel);
    a.max_time_relative = std::max(a.max_time_relative, std::abs(a.time_part.back()) / scale);
    a.max_space_relative = std::max(a.max_space_relative, std::abs(a.space_part.back()) / scale);
    sum_sq += rel * rel;
  }
  if (a.ideal) {
    // drift over the whole record, endpoints included
    const double scale = e0 > 0.0 ? e0 : 1.0;
    for (double e : r.energy) a.max_relative = std::max(a.max_relative, std::abs(e - e0) / scale);
  }
  a.rms_relative = std::sqrt(sum_sq / double(a.relative.size()));
  for (size_t i = 0; i < n; ++i)
    if (r.wall_v[i] < 0.0 || r.wall_H[i] < 0.0) a.wall_sign_ok = false;
  if (!a.ideal && zeta_v > 0.0 && zeta_H > 0.0 && max_plus > max_minus) a.wall_sign_ok = false;
  return a;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3)
    throw UsageError("rate fit needs at least 3 points, got " + std::to_string(points.size()));
  const double n = double(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [eps, err] : points) {
    if (!(eps > 0.0)) throw UsageError("rate fit needs positive epsilon values");
    if (!(err > 0.0) || !std::isfinite(err))
      throw NumericalError("rate fit needs positive errors; raise the resolution");
    const double x = std::log(eps), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) throw UsageError("rate fit needs at least two distinct epsilon values");
  RateFit f;
  f.points = int(points.size());
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (const auto& [eps, err] : points) {
    const double y = std::log(err);
    const double fit = f.intercept + f.slope * std::log(eps);
    ss_res += (y - fit) * (y - fit);
    ss_tot += (y - mean) * (y - mean);
  }
  f.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return f;
}

int worker_count() {
  if (const char* env = std::getenv(kWorkersEnv); env && *env) {
    char* end = nullptr;
    const long w = std::strtol(env, &end, 10);
    if (*end != '\0' || w < 1 || w > 1024)
      throw ConfigError(std::string(kWorkersEnv) + " must be a positive integer, got '" + env + "'");
    return int(w);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double pressure_ratio(const FieldState& s, double epsilon, double zeta) {
  const PressureParts p = pressure_decompose(s.v, s.H, epsilon, WallClosure{zeta, ClosureVariant::navier});
  const double grad_p2 = norm(gradient(p.p2));
  const double scale = epsilon * (conormal_norm(s.v, 2) + conormal_norm(gradient(s.v), 1));
  return scale > 0.0 ? grad_p2 / scale : 0.0;
}

double observed_order(double coarse, double fine, double refinement) {
  return std::log(coarse / fine) / std::log(refinement);
}

bool monotone_in_epsilon(const std::vector<std::pair<double, double>>& series) {
  auto s = series;
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t i = 1; i < s.size(); ++i)
    if (s[i].second > s[i - 1].second * (1.0 + 1e-12)) return false;
  return true;
}

std::vector<std::pair<double, double>> SweepResult::series(const std::string& norm,
                                                           const std::string& field,
                                                           double time) const {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : rows)
    if (r.norm == norm && r.field == field && std::abs(r.time - time) < 1e-12 && r.status == "ok")
      out.emplace_back(r.epsilon, r.value);
  return out;
}

namespace {

struct RunJob {
  SimConfig cfg;
  SweepRun* out = nullptr;
  std::vector<FieldState> states;
  std::exception_ptr error;
};

void run_pool(int workers, size_t jobs, const std::function<void(size_t)>& fn) {
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < jobs; i = next++) fn(i);
  };
  const int n = std::max(1, std::min<int>(workers, int(jobs)));
  if (n == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

double trapezoid(const std::vector<double>& y, double dx, size_t upto) {
  double s = 0.0;
  for (size_t i = 1; i <= upto && i < y.size(); ++i) s += 0.5 * dx * (y[i - 1] + y[i]);
  return s;
}

std::string format_p(double p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

}  // namespace

SweepResult epsilon_sweep(const SimConfig& base, const SweepOptions& opt) {
  if (opt.epsilons.size() < 3) throw ConfigError("sweep needs at least 3 epsilon values");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double e : opt.epsilons) {
    if (!(e > 0.0) || e > 1.0) throw ConfigError("sweep epsilon values must lie in (0, 1]");
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  if (hi / lo < 10.0 * (1.0 - 1e-12)) throw ConfigError("sweep epsilon ladder must span at least one decade");
  if (!(opt.sample_interval > 0.0)) throw ConfigError("sweep sample interval must be positive");
  if (opt.compare_times.empty()) throw ConfigError("sweep needs at least one compare time");
  double horizon = base.t_end;
  std::vector<size_t> compare_index;
  for (double t : opt.compare_times) {
    const double k = t / opt.sample_interval;
    if (t <= 0.0 || std::abs(k - std::round(k)) > 1e-9)
      throw ConfigError("compare time " + format_p(t) + " is not a positive multiple of the sample interval");
    compare_index.push_back(size_t(std::llround(k)));
    horizon = std::max(horizon, t);
  }
  {
    const double k = horizon / opt.sample_interval;
    if (std::abs(k - std::round(k)) > 1e-9)
      throw ConfigError("horizon is not a multiple of the sample interval");
  }

  SweepResult res;
  res.compare_times = opt.compare_times;
  res.norm_names = {"L2", "H1", "Linf"};
  for (double p : opt.p_list) res.norm_names.push_back("W1," + format_p(p));
  res.norm_names.push_back("eps_int_H1");
  res.norm_names.push_back("eps_int_H2");

  const size_t n_runs = opt.epsilons.size() + 1;
  res.runs.resize(n_runs);
  std::vector<RunJob> jobs(n_runs);
  for (size_t i = 0; i < n_runs; ++i) {
    SimConfig c = base;
    c.t_end = horizon;
    c.checkpoint_times.clear();
    c.norm_every = 0;
    if (i == 0) {
      c.variant = Variant::ideal;
      c.epsilon = 0.0;
    } else {
      c.variant = Variant::viscous;
      c.epsilon = opt.epsilons[i - 1];
    }
    jobs[i].cfg = c;
    jobs[i].out = &res.runs[i];
    res.runs[i].epsilon = c.epsilon;
  }
  const int workers = opt.workers > 0 ? opt.workers : worker_count();

  run_pool(workers, n_runs, [&](size_t i) {
    RunJob& job = jobs[i];
    try {
      validate(job.cfg);
      const GridPtr grid = build_grid(job.cfg);
      FieldState s0 = initial_condition(grid, job.cfg);
      double dt = std::min(base.dt, cfl_limit(s0, job.cfg.epsilon));
      const long k = long(std::ceil(opt.sample_interval / dt - 1e-9));
      job.cfg.dt = opt.sample_interval / double(k);
      job.cfg.record_every = int(k);
      job.out->dt = job.cfg.dt;
      job.out->record = run_from(job.cfg, std::move(s0), [&](const FieldState& s) { job.states.push_back(s); });
    } catch (const Error& e) {
      job.error = std::current_exception();
      job.out->status = std::string("failed:") + e.category();
    }
  });

  // diagnostics of each viscous run against the reference
  const bool have_ideal = !jobs[0].error;
  std::vector<std::vector<SweepRow>> rows(n_runs);
  run_pool(workers, n_runs, [&](size_t i) {
    if (i == 0) return;
    RunJob& job = jobs[i];
    SweepRun& out = *job.out;
    const double eps = job.cfg.epsilon;
    const bool ok = have_ideal && !job.error;
    if (ok) {
      try {
        const auto& ref = jobs[0].states;
        const size_t n = std::min(job.states.size(), ref.size());
        std::vector<double> h1v(n), h1h(n), h2v(n), h2h(n), hess(n);
        for (size_t k = 0; k < n; ++k) {
          const FieldState& a = job.states[k];
          const FieldState& b = ref[k];
          const VectorField ev = a.v - b.v, eh = a.H - b.H;
          const double gv = std::pow(norm(gradient(ev)), 2), gh = std::pow(norm(gradient(eh)), 2);
          const double lv = std::pow(norm(ev), 2), lh = std::pow(norm(eh), 2);
          h1v[k] = lv + gv;
          h1h[k] = lh + gh;
          h2v[k] = h1v[k] + hessian_norm_sq(ev);
          h2h[k] = h1h[k] + hessian_norm_sq(eh);
          hess[k] = hessian_norm_sq(a.v);
          out.sup_nm = std::max(out.sup_nm, n_m_diagnostic(a.v, a.H, base.norm_order).total());
        }
        out.dissipation_hessian = eps * trapezoid(hess, opt.sample_interval, n - 1);
        for (size_t c = 0; c < opt.compare_times.size(); ++c) {
          const size_t k = compare_index[c];
          if (k >= n) throw NumericalError("compare time beyond the stored states");
          const FieldState& a = job.states[k];
          const FieldState& b = ref[k];
          const auto en = error_norms(a.v, a.H, b.v, b.H, opt.p_list);
          for (const char* f : {"v", "H"}) {
            for (const auto& name : res.norm_names) {
              double value;
              if (name == "eps_int_H1")
                value = eps * trapezoid(f[0] == 'v' ? h1v : h1h, opt.sample_interval, k);
              else if (name == "eps_int_H2")
                value = eps * trapezoid(f[0] == 'v' ? h2v : h2h, opt.sample_interval, k);
              else
                value = en.at(name + "_" + f);
              rows[i].push_back({eps, opt.compare_times[c], name, f, value, "ok"});
            }
          }
          out.pressure_ratio.push_back(pressure_ratio(a, eps, job.cfg.zeta_v));
          out.layers.push_back(boundary_layer_profile(a.v, b.v, eps));
        }
      } catch (const Error& e) {
        job.error = std::current_exception();
        out.status = std::string("failed:") + e.category();
        rows[i].clear();
      }
    }
    if (rows[i].empty()) {
      const std::string status = job.error ? out.status : std::string("failed:reference");
      for (double t : opt.compare_times)
        for (const char* f : {"v", "H"})
          for (const auto& name : res.norm_names)
            rows[i].push_back({eps, t, name, f, std::numeric_limits<double>::quiet_NaN(), status});
    }
  });
  for (auto& r : rows) res.rows.insert(res.rows.end(), r.begin(), r.end());
  for (const auto& job : jobs) {
    if (job.error) res.complete = false;
  }
  for (auto& job : jobs) job.states.clear();
  if (!res.complete) {
    if (!opt.partial_path.empty()) write_csv(opt.partial_path, sweep_table(res));
    for (const auto& job : jobs)
      if (job.error) std::rethrow_exception(job.error);
  }
  return res;
}

CsvTable sweep_table(const SweepResult& r) {
  CsvTable t;
  t.header = {"epsilon", "time", "norm", "field", "value", "status"};
  for (const auto& row : r.rows)
    t.rows.push_back({format_double(row.epsilon), format_double(row.time), row.norm, row.field,
                      format_double(row.value), row.status});
  return t;
}

std::vector<SweepRow> sweep_rows_from_table(const CsvTable& t) {
  const int ce = t.column("epsilon"), ct = t.column("time"), cn = t.column("norm"),
            cf = t.column("field"), cv = t.column("value"), cs = t.column("status");
  std::vector<SweepRow> out;
  for (const auto& row : t.rows)
    out.push_back({parse_double(row[ce]), parse_double(row[ct]), row[cn], row[cf],
                   parse_double(row[cv]), row[cs]});
  return out;
}

CsvTable sweep_run_table(const SweepResult& r) {
  CsvTable t;
  t.header = {"epsilon", "dt", "status", "sup_nm", "dissipation_hessian"};
  for (size_t c = 0; c < r.compare_times.size(); ++c) {
    const std::string suffix = "@" + format_double(r.compare_times[c]);
    t.header.push_back("pressure_ratio" + suffix);
    t.header.push_back("layer_amplitude" + suffix);
    t.header.push_back("layer_width" + suffix);
  }
  for (const auto& run : r.runs) {
    std::vector<std::string> row{format_double(run.epsilon), format_double(run.dt), run.status,
                                 format_double(run.sup_nm), format_double(run.dissipation_hessian)};
    for (size_t c = 0; c < r.compare_times.size(); ++c) {
      const bool have = c < run.layers.size();
      row.push_back(have ? format_double(run.pressure_ratio[c]) : "nan");
      row.push_back(have ? format_double(run.layers[c].dominant.amplitude) : "nan");
      row.push_back(have ? format_double(run.layers[c].dominant.width) : "nan");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

double target_exponent(const std::string& norm) {
  if (norm == "L2") return 0.75;
  if (norm == "H1") return 0.25;
  if (norm == "Linf") return 0.3;
  if (norm == "eps_int_H1") return 1.5;
  if (norm == "eps_int_H2") return 0.5;
  if (norm.rfind("W1,", 0) == 0) {
    const double p = parse_double(norm.substr(3));
    if (p >= 2.0) return 1.0 / (2.0 * p);
  }
  throw UsageError("no target exponent for norm '" + norm + "'");
}

std::vector<RateRow> rate_report(const SweepResult& r) {
  std::vector<RateRow> out;
  for (double t : r.compare_times)
    for (const char* f : {"v", "H"})
      for (const auto& name : r.norm_names) {
        RateRow row{name, f, t, {}, target_exponent(name), false, "ok"};
        const auto series = r.series(name, f, t);
        row.monotone = monotone_in_epsilon(series);
        try {
          row.fit = fit_rate(series);
        } catch (const Error& e) {
          row.fit.slope = row.fit.intercept = row.fit.r_squared = std::numeric_limits<double>::quiet_NaN();
          row.fit.points = int(series.size());
          row.status = std::string("failed:") + e.category();
        }
        out.push_back(std::move(row));
      }
  return out;
}

CsvTable rate_table(const std::vector<RateRow>& rows) {
  CsvTable t;
  t.header = {"norm", "field", "time", "slope", "intercept", "r_squared", "points", "target", "monotone", "status"};
  for (const auto& r : rows)
    t.rows.push_back({r.norm, r.field, format_double(r.time), format_double(r.fit.slope),
                      format_double(r.fit.intercept), format_double(r.fit.r_squared),
                      std::to_string(r.fit.points), format_double(r.target), r.monotone ? "1" : "0",
                      r.status});
  return t;
}

}  // namespace nsmhd
