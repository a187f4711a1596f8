#include "nsmhd/norms.hpp"

#include <Eigen/QR>

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "nsmhd/errors.hpp"
#include "nsmhd/field_ops.hpp"

namespace nsmhd {

namespace {

using Eigen::MatrixXd;

void check_order(int m, int lowest = 0) {
  if (m < lowest || m > kMaxConormalOrder)
    throw UsageError("conormal order " + std::to_string(m) + " outside [" +
                     std::to_string(lowest) + ", " + std::to_string(kMaxConormalOrder) + "]");
}

double weighted_sq(const ChannelGrid& g, const MatrixXd& f) {
  return (g.z_weights().transpose() * f.cwiseAbs2()).sum() * g.tangential_cell();
}

// Calls `fn` on Z^I f for every word |I| <= m, sharing prefixes.
void visit_words(const ChannelGrid& g, const MatrixXd& f, int m,
                 const std::function<void(const MatrixXd&)>& fn) {
  fn(f);
  if (m == 0) return;
  const Eigen::MatrixXcd modes = g.transform().forward(f);
  for (int axis = 0; axis < g.dim(); ++axis) {
    MatrixXd z;
    if (axis == g.dim() - 1)
      z = g.phi_weight().asDiagonal() * stencil::d1(f, g.h());
    else
      z = partial_from_modes(g, modes, axis);
    visit_words(g, z, m - 1, fn);
  }
}

double conormal_sq(const ChannelGrid& g, const std::vector<const MatrixXd*>& comps, int m) {
  check_order(m);
  double s = 0.0;
  for (const MatrixXd* c : comps) visit_words(g, *c, m, [&](const MatrixXd& z) { s += weighted_sq(g, z); });
  return s;
}

double conormal_sup(const ChannelGrid& g, const std::vector<const MatrixXd*>& comps, int m) {
  check_order(m);
  double s = 0.0;
  for (const auto& word : conormal_indices(g.dim(), m)) {
    MatrixXd mag = MatrixXd::Zero(g.nz(), g.nt());
    for (const MatrixXd* c : comps) mag += apply_conormal(g, *c, word).cwiseAbs2();
    s += std::sqrt(mag.maxCoeff());
  }
  return s;
}

std::vector<const MatrixXd*> flat(const VectorField& f) {
  std::vector<const MatrixXd*> out;
  for (const auto& c : f.comps) out.push_back(&c);
  return out;
}

std::vector<const MatrixXd*> flat(const TensorField& f) {
  std::vector<const MatrixXd*> out;
  for (const auto& row : f.comps)
    for (const auto& c : row) out.push_back(&c);
  return out;
}

void require_same(const VectorField& a, const VectorField& b) {
  if (!a.grid || !b.grid || !(a.grid->spec() == b.grid->spec()))
    throw UsageError("fields live on different grids");
}

}  // namespace

std::vector<ConormalIndex> conormal_indices(int dim, int m) {
  check_order(m);
  std::vector<ConormalIndex> out{{}};
  size_t begin = 0;
  for (int len = 1; len <= m; ++len) {
    const size_t end = out.size();
    for (size_t i = begin; i < end; ++i)
      for (int a = 0; a < dim; ++a) {
        ConormalIndex w = out[i];
        w.push_back(a);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

Eigen::MatrixXd apply_conormal(const ChannelGrid& g, const MatrixXd& f, const ConormalIndex& word) {
  MatrixXd out = f;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (*it < 0 || *it >= g.dim()) throw UsageError("conormal axis out of range");
    if (*it == g.dim() - 1)
      out = g.phi_weight().asDiagonal() * stencil::d1(out, g.h());
    else
      out = partial(g, out, *it);
  }
  return out;
}

double conormal_norm(const ScalarField& f, int m) {
  return std::sqrt(conormal_sq(*f.grid, {&f.values}, m));
}
double conormal_norm(const VectorField& f, int m) {
  return std::sqrt(conormal_sq(*f.grid, flat(f), m));
}
double conormal_norm(const TensorField& f, int m) {
  return std::sqrt(conormal_sq(*f.grid, flat(f), m));
}

double conormal_sup_norm(const ScalarField& f, int m) {
  return conormal_sup(*f.grid, {&f.values}, m);
}
double conormal_sup_norm(const VectorField& f, int m) {
  return conormal_sup(*f.grid, flat(f), m);
}
double conormal_sup_norm(const TensorField& f, int m) {
  return conormal_sup(*f.grid, flat(f), m);
}

double NmReport::total() const {
  double s = 0.0;
  for (double p : parts) s += p;
  return s;
}

NmReport n_m_diagnostic(const VectorField& v, const VectorField& H, int m) {
  check_order(m, 1);
  require_same(v, H);
  NmReport r;
  int k = 0;
  for (const VectorField* f : {&v, &H}) {
    const TensorField du = gradient(*f);
    const double a = conormal_norm(*f, m);
    const double b = conormal_norm(du, m - 1);
    const double c = conormal_sup_norm(du, 1);
    r.parts[k++] = a * a;
    r.parts[k++] = b * b;
    r.parts[k++] = c * c;
  }
  return r;
}

double gradient_conormal_norm(const VectorField& u, int m) {
  check_order(m);
  const auto& g = *u.grid;
  double s = 0.0;
  for (const auto& word : conormal_indices(g.dim(), m)) {
    VectorField z(u.grid);
    for (int i = 0; i < g.dim(); ++i) z.comps[i] = apply_conormal(g, u.comps[i], word);
    const double n = norm(gradient(z));
    s += n * n;
  }
  return std::sqrt(s);
}

double hessian_norm_sq(const VectorField& u) {
  const auto& g = *u.grid;
  double s = 0.0;
  for (const auto& c : u.comps) {
    const Eigen::MatrixXcd modes = g.transform().forward(c);
    std::vector<MatrixXd> d1(g.dim());
    for (int j = 0; j + 1 < g.dim(); ++j) d1[j] = partial_from_modes(g, modes, j);
    d1[g.dim() - 1] = stencil::d1(c, g.h());
    for (int j = 0; j < g.dim(); ++j)
      for (int k = j; k < g.dim(); ++k) {
        const MatrixXd dd = partial(g, d1[j], k);
        s += (j == k ? 1.0 : 2.0) * weighted_sq(g, dd);
      }
  }
  return s;
}

double l2_norm(const VectorField& e) { return norm(e); }

double h1_norm(const VectorField& e) {
  const double a = norm(e), b = norm(gradient(e));
  return std::sqrt(a * a + b * b);
}

double h2_norm(const VectorField& e) {
  const double a = h1_norm(e);
  return std::sqrt(a * a + hessian_norm_sq(e));
}

double linf_norm(const VectorField& e) {
  MatrixXd mag = MatrixXd::Zero(e.grid->nz(), e.grid->nt());
  for (const auto& c : e.comps) mag += c.cwiseAbs2();
  return std::sqrt(mag.maxCoeff());
}

double w1p_norm(const VectorField& e, double p) {
  if (!(p >= 1.0)) throw UsageError("W^{1,p} needs p >= 1");
  const auto& g = *e.grid;
  MatrixXd mag = MatrixXd::Zero(g.nz(), g.nt());
  for (const auto& c : e.comps) mag += c.cwiseAbs2();
  MatrixXd gmag = MatrixXd::Zero(g.nz(), g.nt());
  const TensorField de = gradient(e);
  for (const auto& row : de.comps)
    for (const auto& c : row) gmag += c.cwiseAbs2();
  const MatrixXd integrand =
      (mag.array().pow(p / 2.0) + gmag.array().pow(p / 2.0)).matrix();
  const double s = (g.z_weights().transpose() * integrand).sum() * g.tangential_cell();
  return std::pow(s, 1.0 / p);
}

std::map<std::string, double> error_norms(const VectorField& va, const VectorField& Ha,
                                          const VectorField& vb, const VectorField& Hb,
                                          const std::vector<double>& p_list) {
  require_same(va, vb);
  require_same(Ha, Hb);
  require_same(va, Ha);
  std::map<std::string, double> out;
  const std::pair<const char*, VectorField> diffs[] = {{"v", va - vb}, {"H", Ha - Hb}};
  for (const auto& [name, e] : diffs) {
    const std::string suffix = std::string("_") + name;
    const double l2 = norm(e);
    const double g2 = std::pow(norm(gradient(e)), 2);
    out["L2" + suffix] = l2;
    out["H1" + suffix] = std::sqrt(l2 * l2 + g2);
    out["H2" + suffix] = std::sqrt(l2 * l2 + g2 + hessian_norm_sq(e));
    out["Linf" + suffix] = linf_norm(e);
    for (double p : p_list) {
      std::ostringstream key;
      key << "W1," << p << suffix;
      out[key.str()] = w1p_norm(e, p);
    }
  }
  return out;
}

LayerFit fit_layer(const Eigen::VectorXd& d, const Eigen::VectorXd& prof, double window,
                   double min_width) {
  std::vector<int> idx;
  for (int i = 0; i < d.size(); ++i)
    if (d(i) <= window + 1e-14) idx.push_back(i);
  const int n = int(idx.size());
  if (n < 4) throw UsageError("boundary-layer fit needs at least 4 points in the window");
  Eigen::VectorXd y(n), dd(n);
  for (int i = 0; i < n; ++i) {
    y(i) = prof(idx[i]);
    dd(i) = d(idx[i]);
  }
  auto solve = [&](double w, LayerFit* fit) {
    MatrixXd a(n, 3);
    a.col(0) = (-dd.array() / w).exp().matrix();
    a.col(1).setOnes();
    a.col(2) = dd;
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
    const double res = (a * c - y).norm();
    if (fit) {
      fit->amplitude = c(0);
      fit->baseline = c(1);
      fit->width = w;
      fit->residual = res / std::sqrt(double(n));
    }
    return res;
  };
  // log-spaced scan, then golden-section refinement around the best node
  const double lo = std::log(min_width), hi = std::log(window);
  const int samples = 240;
  int best = 0;
  double best_res = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) {
    const double r = solve(std::exp(lo + (hi - lo) * i / samples), nullptr);
    if (r < best_res) {
      best_res = r;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / samples;
  double b = lo + (hi - lo) * std::min(best + 1, samples) / samples;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), e = a + gr * (b - a);
  double fc = solve(std::exp(c), nullptr), fe = solve(std::exp(e), nullptr);
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - gr * (b - a);
      fc = solve(std::exp(c), nullptr);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + gr * (b - a);
      fe = solve(std::exp(e), nullptr);
    }
  }
  LayerFit fit;
  solve(std::exp(0.5 * (a + b)), &fit);
  return fit;
}

LayerProfile boundary_layer_profile(const VectorField& v_eps, const VectorField& v_ideal,
                                    double epsilon) {
  if (!(epsilon > 0.0)) throw UsageError("boundary-layer rescaling needs epsilon > 0");
  require_same(v_eps, v_ideal);
  const auto& g = *v_eps.grid;
  const int n = g.nz();
  MatrixXd sq = MatrixXd::Zero(n, g.nt());
  for (int i = 0; i + 1 < g.dim(); ++i) sq += (v_eps.comps[i] - v_ideal.comps[i]).cwiseAbs2();
  LayerProfile out;
  out.z = g.z_nodes();
  out.profile = (sq.rowwise().sum() / double(g.nt())).cwiseSqrt();

  const double window = 0.5;
  const double min_width = 0.25 * g.h();
  Eigen::VectorXd dist_lo = out.z;
  Eigen::VectorXd dist_hi = (1.0 - out.z.array()).matrix();
  out.lower = fit_layer(dist_lo, out.profile, window, min_width);
  out.upper = fit_layer(dist_hi, out.profile, window, min_width);
  out.dominant_is_upper = std::abs(out.upper.amplitude) > std::abs(out.lower.amplitude);
  out.dominant = out.dominant_is_upper ? out.upper : out.lower;
  return out;
}

}  // namespace nsmhd
