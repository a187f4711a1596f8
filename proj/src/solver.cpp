#include "nsmhd/solver.hpp"

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "nsmhd/boundary.hpp"
#include "nsmhd/errors.hpp"
#include "nsmhd/field_ops.hpp"
#include "nsmhd/io.hpp"
#include "nsmhd/norms.hpp"

namespace nsmhd {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

const std::complex<double> kI(0.0, 1.0);

MatrixXd mul(const MatrixXd& a, const MatrixXd& b) { return (a.array() * b.array()).matrix(); }

double max_abs(const VectorField& f) {
  MatrixXd mag = MatrixXd::Zero(f.grid->nz(), f.grid->nt());
  for (const auto& c : f.comps) mag += c.cwiseAbs2();
  return std::sqrt(mag.maxCoeff());
}

void scale_to(VectorField& f, double amplitude) {
  const double m = max_abs(f);
  if (m > 0.0) f = (amplitude / m) * std::move(f);
}

// Wall-normal profiles compatible with d_z f = 2 zeta f at z = 0 and
// d_z f = -2 zeta f at z = 1. `g` vanishes at both walls and its derivative
// is the tangential profile of a stream-function mode; `G` is the profile of
// a mean (x-independent) tangential flow.
struct RobinProfile {
  int k;
  double zeta;

  // g = sin(k pi z) + c_lo z^2 (1-z)^3 + c_hi z^3 (1-z)^2
  double dg(double z) const {
    const double kp = k * M_PI;
    const double c_lo = zeta * kp, c_hi = -zeta * kp * std::cos(kp);
    const double w = 1.0 - z;
    return kp * std::cos(kp * z) + c_lo * (2 * z * w * w * w - 3 * z * z * w * w) +
           c_hi * (3 * z * z * w * w - 2 * z * z * z * w);
  }
  double g(double z) const {
    const double kp = k * M_PI;
    const double c_lo = zeta * kp, c_hi = -zeta * kp * std::cos(kp);
    const double w = 1.0 - z;
    return std::sin(kp * z) + c_lo * z * z * w * w * w + c_hi * z * z * z * w * w;
  }
  // G = cos(k pi z) + 2 zeta z (1-z)^2 - 2 zeta cos(k pi) (z^3 - z^2)
  double mean(double z) const {
    const double kp = k * M_PI;
    const double w = 1.0 - z;
    return std::cos(kp * z) + 2 * zeta * z * w * w - 2 * zeta * std::cos(kp) * (z * z * z - z * z);
  }
};

// Random superposition of divergence-free modes, tangent to the walls and
// satisfying the Navier relation for `zeta`.
VectorField random_field(const GridPtr& grid, std::mt19937_64& rng, int modes, double zeta) {
  const auto& g = *grid;
  const int d = g.dim();
  std::uniform_real_distribution<double> coef(-1.0, 1.0), phase(0.0, 2.0 * M_PI);
  VectorField u(grid);
  const int ky_max = d == 3 ? modes : 0;
  for (int kz = 0; kz <= modes; ++kz) {
    const RobinProfile p{kz, zeta};
    for (int i = 0; i + 1 < d; ++i) {
      const double a = coef(rng) / (1.0 + kz * kz);
      u.comps[i] += sample(g, [&](double, double, double z) { return a * p.mean(z); });
    }
  }
  for (int kx = 0; kx <= modes; ++kx)
    for (int ky = -ky_max; ky <= ky_max; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      for (int kz = 1; kz <= modes; ++kz) {
        const RobinProfile p{kz, zeta};
        const double decay = 1.0 / ((1.0 + kx * kx + ky * ky + kz * kz) * kz * M_PI);
        // stream functions psi_j = a_j cos(k.x + th_j) g(z), j tangential;
        // u_j = d_z psi_j, u_n = -sum_j d_j psi_j
        for (int j = 0; j + 1 < d; ++j) {
          const double a = coef(rng) * decay;
          const double th = phase(rng);
          const double kj = j == 0 ? kx : ky;
          if (kj == 0.0 && d == 3) continue;
          u.comps[j] += sample(g, [&](double x, double y, double z) {
            return a * std::cos(kx * x + ky * y + th) * p.dg(z);
          });
          u.normal() += sample(g, [&](double x, double y, double z) {
            return a * kj * std::sin(kx * x + ky * y + th) * p.g(z);
          });
        }
      }
    }
  return u;
}

}  // namespace

VectorField navier_mode_field(const GridPtr& grid, std::uint64_t seed, int modes, double zeta) {
  if (modes < 1 || modes > 3) throw ConfigError("modes must be in 1..3");
  std::mt19937_64 rng(seed);
  return random_field(grid, rng, modes, zeta);
}

void check_invariants(const FieldState& s, double div_tol) {
  for (const auto* f : {&s.v, &s.H}) {
    const char* name = f == &s.v ? "v" : "H";
    if (!all_finite(*f)) throw NumericalError(std::string("non-finite values in ") + name);
    const auto& n = f->normal();
    if (n.row(0).cwiseAbs().maxCoeff() != 0.0 || n.row(n.rows() - 1).cwiseAbs().maxCoeff() != 0.0)
      throw NumericalError(std::string("nonzero normal trace in ") + name);
    const double div = relative_divergence(*f);
    if (div > div_tol)
      throw NumericalError(std::string("relative divergence of ") + name + " is " +
                           std::to_string(div));
  }
}

std::vector<std::string> initial_condition_names() {
  return {"taylor-green-channel", "parallel-shear", "elsasser", "random-smooth"};
}

FieldState initial_condition(const GridPtr& grid, const SimConfig& cfg) {
  const auto& g = *grid;
  const int d = g.dim();
  const std::string& name = cfg.ic_name;
  FieldState s;
  s.v = VectorField(grid);
  s.H = VectorField(grid);
  const double a = cfg.ic_param("amplitude", 1.0);

  if (name == "taylor-green-channel") {
    const double k = cfg.ic_param("k", 1.0);
    const double b = cfg.ic_param("magnetic", 0.5);
    if (d == 2) {
      s.v.comps[0] = sample(g, [&](double x, double, double z) { return a * std::sin(k * x) * std::cos(M_PI * z); });
      s.v.comps[1] = sample(g, [&](double x, double, double z) { return -a * k / M_PI * std::cos(k * x) * std::sin(M_PI * z); });
      s.H.comps[0] = sample(g, [&](double x, double, double z) { return b * std::cos(k * x) * std::cos(M_PI * z); });
      s.H.comps[1] = sample(g, [&](double x, double, double z) { return b * k / M_PI * std::sin(k * x) * std::sin(M_PI * z); });
    } else {
      s.v.comps[0] = sample(g, [&](double x, double y, double z) { return a * std::sin(k * x) * std::cos(k * y) * std::cos(M_PI * z); });
      s.v.comps[1] = sample(g, [&](double x, double y, double z) { return -a * std::cos(k * x) * std::sin(k * y) * std::cos(M_PI * z); });
      s.H.comps[0] = sample(g, [&](double x, double y, double z) { return b * std::cos(k * x) * std::sin(k * y) * std::cos(M_PI * z); });
      s.H.comps[1] = sample(g, [&](double x, double y, double z) { return -b * std::sin(k * x) * std::cos(k * y) * std::cos(M_PI * z); });
    }
  } else if (name == "parallel-shear") {
    const double k = cfg.ic_param("k", 1.0);
    s.v.comps[0] = sample(g, [&](double, double, double z) { return a * std::cos(k * M_PI * z); });
  } else if (name == "elsasser") {
    s.v.comps[0] = sample(g, [&](double, double, double z) { return a * std::cos(M_PI * z); });
    s.H = s.v;
  } else if (name == "random-smooth") {
    const double seed = cfg.ic_param("seed", 7.0);
    const int modes = int(cfg.ic_param("modes", 3.0));
    if (modes < 1 || modes > 3) throw ConfigError("field 'ic.modes' must be in [1, 3]");
    if (seed < 0 || seed != std::floor(seed)) throw ConfigError("field 'ic.seed' must be a non-negative integer");
    std::mt19937_64 rng(static_cast<unsigned long long>(seed));
    s.v = leray_project(random_field(grid, rng, modes, cfg.zeta_v));
    s.H = leray_project(random_field(grid, rng, modes, cfg.zeta_H));
    scale_to(s.v, a);
    scale_to(s.H, cfg.ic_param("magnetic", 0.5));
    return s;
  } else {
    std::string list;
    for (const auto& n : initial_condition_names()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown initial condition '" + name + "'; available: " + list);
  }
  s.v = leray_project(s.v);
  s.H = name == "elsasser" ? s.v : leray_project(s.H);
  return s;
}

double cfl_limit(const FieldState& s, double epsilon) {
  const auto& g = *s.v.grid;
  const double hmin = std::min(g.dx(), g.h());
  MatrixXd speed = MatrixXd::Zero(g.nz(), g.nt());
  MatrixXd vm = speed, hm = speed;
  for (int i = 0; i < g.dim(); ++i) {
    vm += s.v.comps[i].cwiseAbs2();
    hm += s.H.comps[i].cwiseAbs2();
  }
  speed = vm.cwiseSqrt() + hm.cwiseSqrt();
  double limit = std::numeric_limits<double>::infinity();
  const double u = speed.maxCoeff();
  if (u > 0.0) limit = std::min(limit, hmin / u);
  if (epsilon > 0.0) limit = std::min(limit, hmin * hmin / (2.0 * g.dim() * epsilon));
  return 0.5 * limit;
}

void check_cfl(const FieldState& s, const SimConfig& cfg) {
  const double limit = cfl_limit(s, cfg.epsilon);
  if (cfg.dt > limit) {
    std::ostringstream os;
    os << "dt = " << cfg.dt << " exceeds the CFL limit " << limit;
    throw CflError(os.str());
  }
}

Stepper::Stepper(GridPtr grid, const SimConfig& cfg)
    : grid_(std::move(grid)),
      epsilon_(cfg.epsilon),
      zeta_v_(cfg.zeta_v),
      zeta_H_(cfg.zeta_H),
      viscous_(cfg.variant == Variant::viscous) {}

void Stepper::viscous_term(const VectorField& f, double zeta, const std::vector<MatrixXcd>& modes,
                           std::vector<MatrixXcd>& spectral, std::vector<MatrixXd>& out) const {
  const auto& g = *grid_;
  const int d = g.dim();
  Eigen::RowVectorXd div_lo = Eigen::RowVectorXd::Zero(g.nt()), div_hi = div_lo;
  if (zeta != 0.0) {
    // tangential divergence on the wall rows only
    MatrixXcd wall = MatrixXcd::Zero(g.nz(), g.n_modes());
    for (int j = 0; j + 1 < d; ++j) {
      const Eigen::ArrayXd& k = j == 0 ? g.kx_eff() : g.ky_eff();
      for (int row : {0, g.nz() - 1})
        wall.row(row) += (kI * k.transpose() * modes[j].row(row).array()).matrix();
    }
    const MatrixXd back = g.transform().inverse(std::move(wall));
    div_lo = back.row(0);
    div_hi = back.row(g.nz() - 1);
  }
  std::vector<Eigen::RowVectorXd> lo, hi;
  ghost_rows(f, WallClosure{zeta, ClosureVariant::navier}, div_lo, div_hi, lo, hi);
  for (int i = 0; i < d; ++i) {
    out[i] += epsilon_ * stencil::d2(f.comps[i], lo[i], hi[i], g.h());
    for (int m = 0; m < g.n_modes(); ++m) spectral[i].col(m) -= epsilon_ * g.k2()(m) * modes[i].col(m);
  }
}

void Stepper::rhs(const VectorField& v, const VectorField& H, VectorField& dv, VectorField& dH,
                  ScalarField* pressure) const {
  const auto& g = *grid_;
  const auto& tr = g.transform();
  const int d = g.dim();
  const int nz = g.nz();

  // modes and gradients, grad[f][i][j] = d_j f_i
  const VectorField* fields[2] = {&v, &H};
  std::vector<MatrixXcd> modes[2];
  std::vector<std::vector<MatrixXd>> grad[2];
  for (int f = 0; f < 2; ++f) {
    modes[f].resize(d);
    grad[f].assign(d, std::vector<MatrixXd>(d));
    for (int i = 0; i < d; ++i) {
      modes[f][i] = tr.forward(fields[f]->comps[i]);
      for (int j = 0; j + 1 < d; ++j) grad[f][i][j] = partial_from_modes(g, modes[f][i], j);
      grad[f][i][d - 1] = stencil::d1(fields[f]->comps[i], g.h());
    }
  }

  // eq 0: momentum  N = B(v) v - B(H) H
  // eq 1: induction N = B(v) H - B(H) v
  // with B(a) w = ((a.grad) w + div(a (x) w)) / 2
  for (int eq = 0; eq < 2; ++eq) {
    const VectorField& w1 = eq == 0 ? v : H;
    const VectorField& w2 = eq == 0 ? H : v;
    const auto& gw1 = grad[eq == 0 ? 0 : 1];
    const auto& gw2 = grad[eq == 0 ? 1 : 0];
    std::vector<MatrixXd> phys(d, MatrixXd::Zero(nz, g.nt()));
    std::vector<MatrixXcd> spectral(d, MatrixXcd::Zero(nz, g.n_modes()));
    for (int i = 0; i < d; ++i) {
      MatrixXd conv = MatrixXd::Zero(nz, g.nt());
      for (int j = 0; j < d; ++j) conv += mul(v.comps[j], gw1[i][j]) - mul(H.comps[j], gw2[i][j]);
      // flux F_j = v_j w1_i - H_j w2_i
      MatrixXd flux_div = stencil::d1(mul(v.comps[d - 1], w1.comps[i]) - mul(H.comps[d - 1], w2.comps[i]), g.h());
      for (int j = 0; j + 1 < d; ++j) {
        if (eq == 1 && i == j) continue;  // antisymmetric flux
        const MatrixXcd fh = tr.forward(mul(v.comps[j], w1.comps[i]) - mul(H.comps[j], w2.comps[i]));
        const Eigen::ArrayXd& k = j == 0 ? g.kx_eff() : g.ky_eff();
        for (int m = 0; m < g.n_modes(); ++m) spectral[i].col(m) -= 0.5 * kI * k(m) * fh.col(m);
      }
      phys[i] = -0.5 * (conv + flux_div);
    }
    if (viscous_) {
      const VectorField& f = eq == 0 ? v : H;
      viscous_term(f, eq == 0 ? zeta_v_ : zeta_H_, modes[eq], spectral, phys);
    }
    VectorField raw(grid_);
    for (int i = 0; i < d; ++i) raw.comps[i] = phys[i] + tr.inverse(std::move(spectral[i]));
    if (eq == 0 && pressure)
      dv = projector_for(grid_)->project(raw, *pressure);
    else
      (eq == 0 ? dv : dH) = leray_project(raw);
  }
}

ScalarField Stepper::projection_pressure(const VectorField& v, const VectorField& H) const {
  VectorField dv, dH;
  ScalarField p;
  rhs(v, H, dv, dH, &p);
  return p;
}

FieldState Stepper::step(const FieldState& s, double dt, VectorField* k1_v,
                         VectorField* k1_H) const {
  VectorField a_v, a_H, b_v, b_H, c_v, c_H, e_v, e_H;
  rhs(s.v, s.H, a_v, a_H);
  rhs(s.v + (0.5 * dt) * a_v, s.H + (0.5 * dt) * a_H, b_v, b_H);
  rhs(s.v + (0.5 * dt) * b_v, s.H + (0.5 * dt) * b_H, c_v, c_H);
  rhs(s.v + dt * c_v, s.H + dt * c_H, e_v, e_H);
  FieldState out{s.t + dt, s.v, s.H};
  const double w = dt / 6.0;
  for (int i = 0; i < out.v.dim(); ++i) {
    out.v.comps[i] += w * (a_v.comps[i] + 2.0 * b_v.comps[i] + 2.0 * c_v.comps[i] + e_v.comps[i]);
    out.H.comps[i] += w * (a_H.comps[i] + 2.0 * b_H.comps[i] + 2.0 * c_H.comps[i] + e_H.comps[i]);
  }
  if (k1_v) *k1_v = std::move(a_v);
  if (k1_H) *k1_H = std::move(a_H);
  if (!all_finite(out.v) || !all_finite(out.H))
    throw BlowUpError("non-finite values at t = " + std::to_string(out.t), out.t);
  return out;
}

FieldState step_viscous(const FieldState& s, const SimConfig& cfg) {
  if (cfg.variant != Variant::viscous || !(cfg.epsilon > 0.0))
    throw ConfigError("step_viscous needs the viscous variant with epsilon > 0");
  check_cfl(s, cfg);
  return Stepper(s.v.grid, cfg).step(s, cfg.dt);
}

FieldState step_ideal(const FieldState& s, const SimConfig& cfg) {
  if (cfg.variant != Variant::ideal || cfg.epsilon != 0.0)
    throw ConfigError("step_ideal needs the ideal variant with epsilon = 0");
  check_cfl(s, cfg);
  return Stepper(s.v.grid, cfg).step(s, cfg.dt);
}

namespace {

double strain_sq(const VectorField& u) {
  const double n = norm(strain(u));
  return n * n;
}

void sample_diagnostics(RunRecord& r, const FieldState& s, const VectorField& k_v,
                        const VectorField& k_H, bool with_norms) {
  const SimConfig& c = r.config;
  r.t.push_back(s.t);
  r.energy.push_back(0.5 * (inner_product(s.v, s.v) + inner_product(s.H, s.H)));
  r.strain_v.push_back(strain_sq(s.v));
  r.strain_H.push_back(strain_sq(s.H));
  r.wall_v.push_back(wall_tangential_energy(s.v));
  r.wall_H.push_back(wall_tangential_energy(s.H));
  r.energy_rate.push_back(inner_product(s.v, k_v) + inner_product(s.H, k_H));
  r.div_v.push_back(relative_divergence(s.v));
  r.div_H.push_back(relative_divergence(s.H));
  r.wall_vorticity_v.push_back(wall_vorticity_residual(s.v, c.zeta_v));
  r.wall_vorticity_H.push_back(wall_vorticity_residual(s.H, c.zeta_H));
  r.cross_helicity.push_back(inner_product(s.v, s.H));
  if (with_norms) {
    const NmReport nm = n_m_diagnostic(s.v, s.H, c.norm_order);
    r.nm_t.push_back(s.t);
    r.nm.push_back(nm.total());
    for (int i = 0; i < 6; ++i) r.nm_parts[i].push_back(nm.parts[i]);
    r.hessian_v.push_back(hessian_norm_sq(s.v));
    r.hessian_H.push_back(hessian_norm_sq(s.H));
  }
}

[[noreturn]] void rethrow_at_step(const Error& e, long n) {
  const std::string msg = "step " + std::to_string(n) + ": " + e.what();
  if (auto* b = dynamic_cast<const BlowUpError*>(&e)) throw BlowUpError(msg, b->time());
  if (auto* c = dynamic_cast<const IncompatibleDataError*>(&e)) throw IncompatibleDataError(msg, c->defect());
  if (dynamic_cast<const CflError*>(&e)) throw CflError(msg);
  if (dynamic_cast<const NumericalError*>(&e)) throw NumericalError(msg);
  if (dynamic_cast<const IoError*>(&e)) throw IoError(msg);
  if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(msg);
  throw UsageError(msg);
}

std::string checkpoint_path(const SimConfig& c, size_t index) {
  std::ostringstream os;
  os << "checkpoint_" << index << ".bin";
  return (std::filesystem::path(c.checkpoint_dir.empty() ? "." : c.checkpoint_dir) / os.str()).string();
}

}  // namespace

RunRecord run(const SimConfig& cfg, const StateObserver& observer) {
  validate(cfg);
  const GridPtr grid = build_grid(cfg);
  return run_from(cfg, initial_condition(grid, cfg), observer);
}

RunRecord run_from(const SimConfig& cfg, FieldState s, const StateObserver& observer) {
  validate(cfg);
  check_invariants(s);
  check_cfl(s, cfg);
  RunRecord r;
  r.config = cfg;
  r.dt = cfg.dt;
  const Stepper stepper(s.v.grid, cfg);
  const double t0 = s.t;
  const long n_steps =
      cfg.t_end <= t0 ? 0 : long(std::ceil((cfg.t_end - t0) / cfg.dt - 1e-9));
  std::vector<double> pending = cfg.checkpoint_times;
  if (!pending.empty() && !cfg.checkpoint_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.checkpoint_dir, ec);
    if (ec) throw IoError("cannot create checkpoint directory '" + cfg.checkpoint_dir + "'");
  }
  std::sort(pending.begin(), pending.end());
  size_t next_ckpt = 0;
  long samples = 0;

  auto write_due_checkpoints = [&](const FieldState& st) {
    const double tol = 1e-9 * std::max(1.0, cfg.t_end);
    while (next_ckpt < pending.size() && st.t >= pending[next_ckpt] - tol) {
      const std::string path = checkpoint_path(cfg, next_ckpt);
      write_checkpoint(path, st, CheckpointMeta{cfg.epsilon, cfg.zeta_v, cfg.zeta_H, cfg.variant});
      r.checkpoints.push_back({st.t, path});
      ++next_ckpt;
    }
  };

  auto record = [&](const FieldState& st, const VectorField& kv, const VectorField& kh) {
    const bool norms = cfg.norm_every > 0 && samples % cfg.norm_every == 0;
    sample_diagnostics(r, st, kv, kh, norms);
    ++samples;
    if (observer) observer(st);
  };

  for (long n = 0; n < n_steps; ++n) {
    const bool sample = n % cfg.record_every == 0;
    const double dt = n + 1 == n_steps ? (cfg.t_end - t0) - (n_steps - 1) * cfg.dt : cfg.dt;
    try {
      write_due_checkpoints(s);
      VectorField kv, kh;
      FieldState next = stepper.step(s, dt, sample ? &kv : nullptr, sample ? &kh : nullptr);
      if (sample) record(s, kv, kh);
      next.t = n + 1 == n_steps ? cfg.t_end : t0 + (n + 1) * cfg.dt;
      s = std::move(next);
    } catch (const Error& e) {
      rethrow_at_step(e, n);
    }
  }
  // final sample
  VectorField kv, kh;
  stepper.rhs(s.v, s.H, kv, kh);
  record(s, kv, kh);
  write_due_checkpoints(s);
  r.steps = n_steps;
  return r;
}

}  // namespace nsmhd
