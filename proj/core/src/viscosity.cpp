#include "cdg/viscosity.hpp"

#include <cmath>

namespace cdg {

double ViscosityModel::s0(int p) const {
  return std::log10(1.0 / std::pow(static_cast<double>(p), 4)) + s0_offset;
}

double smoothness_indicator(const Eigen::VectorXd& nodal, const ReferenceElement& re,
                            const std::vector<double>* jac_at_cub) {
  const int np = re.n_basis();
  const int np_prev = basis_count(re.degree() - 1);

  if (!jac_at_cub) {
    // Parseval on the orthonormal reference basis.
    const Eigen::VectorXd modal = re.vandermonde_inv() * nodal;
    double total = 0.0, top = 0.0;
    for (int j = 0; j < np; ++j) {
      const double e = modal(j) * modal(j);
      total += e;
      if (j >= np_prev) top += e;
    }
    if (total <= 0.0) return 0.0;  // uniform-zero field is smooth
    return top / total;
  }

  // Physical-space variant: integrate (u - u_trunc)^2 and u^2 with J-weighted
  // cubature.
  Eigen::VectorXd modal = re.vandermonde_inv() * nodal;
  Eigen::VectorXd modal_trunc = modal;
  for (int j = np_prev; j < np; ++j) modal_trunc(j) = 0.0;

  const Eigen::MatrixXd vc = modal_basis_eval(re.degree(), re.cub_nodes());
  const Eigen::VectorXd u = vc * modal;
  const Eigen::VectorXd ut = vc * modal_trunc;
  double num = 0.0, den = 0.0;
  for (int q = 0; q < re.n_cub(); ++q) {
    const double jw = re.cub_weights()[q] * (*jac_at_cub)[q];
    num += jw * (u(q) - ut(q)) * (u(q) - ut(q));
    den += jw * u(q) * u(q);
  }
  if (den <= 0.0) return 0.0;
  return num / den;
}

double viscosity_amount(double s_k_value, int p, const ViscosityModel& model) {
  if (model.eps0 < 0.0) throw ConfigError("viscosity_amount: eps0 must be >= 0");
  if (s_k_value <= 0.0) return 0.0;  // log undefined; smooth limit
  const double sk = std::log10(s_k_value);
  const double s0 = model.s0(p);
  if (sk < s0 - model.kappa) return 0.0;
  if (sk > s0 + model.kappa) return model.eps0;
  return 0.5 * model.eps0 * (1.0 + std::sin(M_PI * (sk - s0) / (2.0 * model.kappa)));
}

}  // namespace cdg
