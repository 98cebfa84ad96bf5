#include "qmc/langevin_oracle.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qmc {

namespace {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;

// Quadrature pattern of the sum mode: (x_k, p_k, x_-k, p_-k) -> (X, P) / sqrt(2).
Eigen::Matrix<double, 4, 2> sum_projector() {
  Eigen::Matrix<double, 4, 2> p = Eigen::Matrix<double, 4, 2>::Zero();
  const double s = 1.0 / std::sqrt(2.0);
  p(0, 0) = s;
  p(2, 0) = s;
  p(1, 1) = s;
  p(3, 1) = s;
  return p;
}

}  // namespace

PairDynamics drift_matrix(double alpha, double zeta_bar, double delta, double loss_plus,
                          double loss_minus) {
  if (!(loss_plus > 0.0 && loss_minus > 0.0))
    throw std::invalid_argument("drift_matrix: losses must be > 0");
  // a_k:  da = [-l+/2 - i th+] a + i alpha a_-k^dag,  th+- = zeta_bar +- delta - 2 alpha
  const double g_plus = 0.5 * loss_plus;
  const double g_minus = 0.5 * loss_minus;
  const double th_plus = zeta_bar + delta - 2.0 * alpha;
  const double th_minus = zeta_bar - delta - 2.0 * alpha;

  PairDynamics dyn;
  dyn.loss_plus = loss_plus;
  dyn.loss_minus = loss_minus;
  auto& a = dyn.drift;
  a << -g_plus, th_plus, 0.0, alpha,
       -th_plus, -g_plus, alpha, 0.0,
       0.0, alpha, -g_minus, th_minus,
       alpha, 0.0, -th_minus, -g_minus;
  return dyn;
}

PairDynamics pair_dynamics(const PairDetuning& det, double alpha, double eta_e_plus,
                           double eta_e_minus, double eta_d) {
  const double loss_plus = 2.0 + det.dkappa_plus;
  const double loss_minus = 2.0 + det.dkappa_minus;
  auto dyn = drift_matrix(alpha, det.zeta_bar, det.delta, loss_plus, loss_minus);
  // AMX loss is intrinsic: it dilutes the extraction ratio.
  dyn.efficiencies = {eta_e_plus * 2.0 / loss_plus, eta_e_minus * 2.0 / loss_minus, eta_d};
  return dyn;
}

std::complex<double> slowest_eigenvalue(const Eigen::Matrix4d& drift) {
  Eigen::EigenSolver<Eigen::Matrix4d> solver(drift, false);
  const auto& ev = solver.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < ev.size(); ++i)
    if (ev[i].real() > ev[best].real()) best = i;
  return ev[best];
}

void require_stable(const PairDynamics& dyn) {
  const auto ev = slowest_eigenvalue(dyn.drift);
  if (ev.real() >= 0.0) {
    std::ostringstream msg;
    msg << "unstable pair dynamics: drift eigenvalue " << ev.real() << (ev.imag() < 0 ? " - " : " + ")
        << std::abs(ev.imag()) << "i has non-negative real part (above oscillation threshold)";
    throw UnstableDynamics(msg.str(), ev.real(), ev.imag());
  }
}

OutputCovariance output_covariance(const PairDynamics& dyn, double omega) {
  require_stable(dyn);
  const auto& eff = dyn.efficiencies;
  for (double e : {eff.eta_e_plus, eff.eta_e_minus, eff.eta_d})
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("output_covariance: efficiency outside [0, 1]");

  const Eigen::Vector4d loss(dyn.loss_plus, dyn.loss_plus, dyn.loss_minus, dyn.loss_minus);
  const Eigen::Vector4d ext(eff.eta_e_plus, eff.eta_e_plus, eff.eta_e_minus, eff.eta_e_minus);
  const Eigen::Vector4d coupling_e = (loss.array() * ext.array()).sqrt();
  const Eigen::Vector4d coupling_i = (loss.array() * (1.0 - ext.array())).sqrt();

  // q(w) = H (B_e n_e + B_i n_i),  H = (-i w - A)^-1
  Matrix4c lhs = Complex(0.0, -omega) * Matrix4c::Identity() - dyn.drift.cast<Complex>();
  const Matrix4c h = lhs.partialPivLu().inverse();

  const double sqrt_d = std::sqrt(eff.eta_d);
  const Matrix4c t_e = sqrt_d * (coupling_e.asDiagonal() * h * coupling_e.asDiagonal() -
                                 Matrix4c::Identity());
  const Matrix4c t_i = sqrt_d * (coupling_e.asDiagonal() * h * coupling_i.asDiagonal());
  const Matrix4c s = t_e * t_e.adjoint() + t_i * t_i.adjoint() +
                     (1.0 - eff.eta_d) * Matrix4c::Identity();

  OutputCovariance out;
  out.omega = omega;
  out.cov = s.real();
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

SumQuadratures sum_quadratures(const OutputCovariance& out) {
  const auto p = sum_projector();
  const Eigen::Matrix2d block = p.transpose() * out.cov * p;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(block);
  SumQuadratures r;
  r.squeezed = solver.eigenvalues()[0];
  r.antisqueezed = solver.eigenvalues()[1];
  const Eigen::Vector2d v = solver.eigenvectors().col(0);
  r.phase = std::atan2(v[1], v[0]);
  return r;
}

double sum_quadrature_variance_oracle(double alpha, double zeta_bar, double delta, double eta_e,
                                      double eta_d, double omega) {
  auto dyn = drift_matrix(alpha, zeta_bar, delta);
  dyn.efficiencies = {eta_e, eta_e, eta_d};
  return sum_quadratures(output_covariance(dyn, omega)).squeezed;
}

}  // namespace qmc
