#include "coxaff/model.hpp"

#include <cmath>
#include <sstream>

#include "coxaff/error.hpp"

namespace coxaff {

void FellerModel::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(kappa) || !positive(theta) || !positive(sigma))
    throw DomainError("FellerModel: kappa, theta and sigma must be finite and > 0");
  if (!std::isfinite(lambda0) || lambda0 < 0.0)
    throw DomainError("FellerModel: lambda0 must be finite and >= 0");
}

void AffineModel::validate() const {
  const Eigen::Index d = dim();
  std::ostringstream err;
  if (d < 1) err << "dimension must be >= 1; ";
  if (kappa.rows() != d || kappa.cols() != d) err << "kappa must be " << d << "x" << d << "; ";
  if (sigma.rows() != d || sigma.cols() != d) err << "sigma must be " << d << "x" << d << "; ";
  if (b.rows() != d || b.cols() != d) err << "b must be " << d << "x" << d << "; ";
  if (a.size() != d) err << "a must have length " << d << "; ";
  if (rho1.size() != d) err << "rho1 must have length " << d << "; ";
  if (x0.size() != d) err << "x0 must have length " << d << "; ";
  const std::string msg = err.str();
  if (!msg.empty()) throw StructuralError("AffineModel: " + msg.substr(0, msg.size() - 2));
}

TransitionMoments cir_transition_moments(const FellerModel& m, double lambda_s, double dt) {
  const double e = std::exp(-m.kappa * dt);
  const double one_m_e = -std::expm1(-m.kappa * dt);
  const double s2k = m.sigma * m.sigma / m.kappa;
  TransitionMoments r;
  r.mean = m.theta * one_m_e + e * lambda_s;
  r.variance = s2k * one_m_e * (0.5 * m.theta * one_m_e + e * lambda_s);
  return r;
}

AffineModel as_affine(const FellerModel& m) {
  AffineModel r;
  r.kappa = Eigen::MatrixXd::Constant(1, 1, m.kappa);
  r.theta = Eigen::VectorXd::Constant(1, m.theta);
  r.sigma = Eigen::MatrixXd::Constant(1, 1, m.sigma);
  r.a = Eigen::VectorXd::Zero(1);
  r.b = Eigen::MatrixXd::Ones(1, 1);
  r.rho0 = 0.0;
  r.rho1 = Eigen::VectorXd::Ones(1);
  r.x0 = Eigen::VectorXd::Constant(1, m.lambda0);
  return r;
}

AffineModel vasicek(double kappa, double theta, double sigma, double x0) {
  AffineModel r;
  r.kappa = Eigen::MatrixXd::Constant(1, 1, kappa);
  r.theta = Eigen::VectorXd::Constant(1, theta);
  r.sigma = Eigen::MatrixXd::Constant(1, 1, sigma);
  r.a = Eigen::VectorXd::Ones(1);
  r.b = Eigen::MatrixXd::Zero(1, 1);
  r.rho0 = 0.0;
  r.rho1 = Eigen::VectorXd::Ones(1);
  r.x0 = Eigen::VectorXd::Constant(1, x0);
  return r;
}

AffineModel multivariate_cir(const Eigen::VectorXd& kappa, const Eigen::VectorXd& theta,
                             const Eigen::VectorXd& sigma, const Eigen::VectorXd& x0) {
  const Eigen::Index d = theta.size();
  if (kappa.size() != d || sigma.size() != d || x0.size() != d)
    throw StructuralError("multivariate_cir: parameter vectors must share one length");
  AffineModel r;
  r.kappa = kappa.asDiagonal();
  r.theta = theta;
  r.sigma = sigma.asDiagonal();
  r.a = Eigen::VectorXd::Zero(d);
  r.b = Eigen::MatrixXd::Identity(d, d);
  r.rho0 = 0.0;
  r.rho1 = Eigen::VectorXd::Ones(d);
  r.x0 = x0;
  return r;
}

}  // namespace coxaff
