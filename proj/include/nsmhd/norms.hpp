#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "nsmhd/fields.hpp"

namespace nsmhd {

/// Largest conormal order accepted by the norm routines.
inline constexpr int kMaxConormalOrder = 4;

/// A word Z_{k1} ... Z_{kl}; entries are axes, the last axis meaning the
/// weighted normal field phi(z) d_z. Applied right to left.
using ConormalIndex = std::vector<int>;

/// Every word of length <= m over `dim` fields, each exactly once, ordered
/// by length and then lexicographically.
std::vector<ConormalIndex> conormal_indices(int dim, int m);

Eigen::MatrixXd apply_conormal(const ChannelGrid& g, const Eigen::MatrixXd& f,
                               const ConormalIndex& word);

/// ( sum_{|I| <= m} ||Z^I f||^2 )^(1/2), summed over components.
double conormal_norm(const ScalarField& f, int m);
double conormal_norm(const VectorField& f, int m);
double conormal_norm(const TensorField& f, int m);

/// sum_{|I| <= m} max_x |Z^I f(x)|, with |.| the pointwise Euclidean
/// (Frobenius) norm over components.
double conormal_sup_norm(const ScalarField& f, int m);
double conormal_sup_norm(const VectorField& f, int m);
double conormal_sup_norm(const TensorField& f, int m);

/// The six summands of N_m, in the order
/// ||v||_m^2, ||grad v||_{m-1}^2, ||grad v||_{1,inf}^2,
/// ||H||_m^2, ||grad H||_{m-1}^2, ||grad H||_{1,inf}^2.
struct NmReport {
  std::array<double, 6> parts{};
  double total() const;
};

NmReport n_m_diagnostic(const VectorField& v, const VectorField& H, int m);

/// ( sum_{|I| <= m} ||grad Z^I u||^2 )^(1/2)
double gradient_conormal_norm(const VectorField& u, int m);

/// sum_{i,j,k} ||d_j d_k u_i||^2
double hessian_norm_sq(const VectorField& u);

/// Norms of a - b for both fields. Keys are "<norm>_<field>" with norm in
/// L2, H1, H2, Linf, W1,<p> and field in v, H.
std::map<std::string, double> error_norms(const VectorField& va, const VectorField& Ha,
                                          const VectorField& vb, const VectorField& Hb,
                                          const std::vector<double>& p_list);

/// Norms of a single field, same names without the suffix.
double l2_norm(const VectorField& e);
double h1_norm(const VectorField& e);
double h2_norm(const VectorField& e);
double linf_norm(const VectorField& e);
double w1p_norm(const VectorField& e, double p);

struct LayerFit {
  double amplitude = 0.0;  ///< fitted exponential amplitude at the wall
  double width = 0.0;      ///< e-folding distance from the wall
  double baseline = 0.0;   ///< fitted outer value at the wall
  double residual = 0.0;   ///< rms misfit of the fit
};

struct LayerProfile {
  Eigen::VectorXd z;
  /// rms over the tangential directions of |(v_eps - v_ideal)_tau|
  Eigen::VectorXd profile;
  LayerFit lower, upper;
  /// the wall with the larger fitted amplitude
  LayerFit dominant;
  bool dominant_is_upper = false;
};

/// Profile against the distance d to one wall: A exp(-d / w) + b0 + b1 d,
/// fitted over d <= window.
LayerFit fit_layer(const Eigen::VectorXd& distance, const Eigen::VectorXd& profile,
                   double window, double min_width);

LayerProfile boundary_layer_profile(const VectorField& v_eps, const VectorField& v_ideal,
                                    double epsilon);

}  // namespace nsmhd
