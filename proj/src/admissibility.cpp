#include "coxaff/admissibility.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "coxaff/error.hpp"

namespace coxaff {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Stationary covariance V of dX = -K X dt + noise with covariance rate C:
// K V + V K' = C, solved through the Kronecker form.
Eigen::MatrixXd lyapunov(const Eigen::MatrixXd& K, const Eigen::MatrixXd& C) {
  const Eigen::Index d = K.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd A(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      A.block(i * d, j * d, d, d) = I(i, j) * K + K(i, j) * I;
  const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(C.data(), d * d);
  Eigen::VectorXd v = A.fullPivLu().solve(c);
  return Eigen::Map<Eigen::MatrixXd>(v.data(), d, d);
}

std::vector<Eigen::VectorXd> sample_face(const AffineModel& m, Eigen::Index i) {
  const Eigen::Index d = m.dim();
  const Eigen::VectorXd bi = m.b.row(i).transpose();
  const double nb = bi.squaredNorm();
  std::vector<Eigen::VectorXd> pts;
  const Eigen::VectorXd base = m.theta - ((m.a(i) + bi.dot(m.theta)) / nb) * bi;
  const double scale = std::max(1.0, m.theta.norm());
  std::vector<Eigen::VectorXd> candidates{base};
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::VectorXd dir = Eigen::VectorXd::Unit(d, k);
    dir -= (dir.dot(bi) / nb) * bi;
    if (dir.norm() < 1e-12) continue;
    dir *= scale / dir.norm();
    candidates.push_back(base + dir);
    candidates.push_back(base - dir);
  }
  for (const auto& x : candidates)
    if (m.in_domain(x, 1e-12)) pts.push_back(x);
  return pts;
}

}  // namespace

double gaussian_certainty_threshold() {
  double lo = 0.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) == 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

bool AdmissibilityReport::condition_a_ok() const {
  for (const auto& c : condition_a_part1)
    if (!c.ok) return false;
  for (bool ok : condition_a_part2)
    if (!ok) return false;
  return true;
}

bool AdmissibilityReport::condition_b_ok() const {
  for (const auto& g : gaussian_factors)
    if (!g.ok) return false;
  return true;
}

AdmissibilityReport check_admissibility(const AffineModel& model,
                                        const std::vector<Eigen::VectorXd>& boundary_points) {
  model.validate();
  const Eigen::Index d = model.dim();
  for (const auto& p : boundary_points)
    if (p.size() != d) throw StructuralError("check_admissibility: boundary point has wrong length");

  AdmissibilityReport rep;
  const Eigen::MatrixXd SST = model.sigma * model.sigma.transpose();

  for (Eigen::Index i = 0; i < d; ++i) {
    std::ostringstream os;
    os << "a_" << i << " + b_" << i << ".x >= 0 with a_" << i << " = " << model.a(i) << ", b_" << i
       << " = [" << model.b.row(i) << "]";
    rep.domain_description.push_back(os.str());
  }

  // Condition A, part 1.
  for (Eigen::Index i = 0; i < d; ++i) {
    FactorBoundaryCheck chk;
    chk.factor = int(i);
    const Eigen::VectorXd bi = model.b.row(i).transpose();
    chk.stochastic = bi.squaredNorm() > 0.0;
    if (!chk.stochastic) {
      if (model.a(i) < 0.0) {
        chk.ok = false;
        rep.messages.push_back("factor " + std::to_string(i) +
                               ": constant variance level a_i is negative");
      }
      rep.condition_a_part1.push_back(std::move(chk));
      continue;
    }
    std::vector<Eigen::VectorXd> pts;
    if (boundary_points.empty()) {
      pts = sample_face(model, i);
    } else {
      for (const auto& p : boundary_points)
        if (std::abs(model.a(i) + bi.dot(p)) <= 1e-10 * (1.0 + std::abs(model.a(i)))) pts.push_back(p);
    }
    const double diffusion = 0.5 * bi.dot(SST * bi);
    for (const auto& x : pts) {
      const double drift = bi.dot(model.kappa * (model.theta - x));
      chk.points.push_back(x);
      chk.margins.push_back(drift - diffusion);
      if (!(drift > diffusion)) chk.ok = false;
    }
    if (pts.empty())
      rep.messages.push_back("factor " + std::to_string(i) + ": no boundary point of the domain tested");
    if (!chk.ok)
      rep.messages.push_back("factor " + std::to_string(i) +
                             ": drift does not dominate diffusion on the boundary (Condition A.1)");
    rep.condition_a_part1.push_back(std::move(chk));
  }

  // Condition A, part 2: factors loaded through b_i' Sigma must share the
  // volatility function up to a positive multiple.
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::RowVectorXd load = model.b.row(i) * model.sigma;
    Eigen::VectorXd ui(d + 1);
    ui << model.a(i), model.b.row(i).transpose();
    bool ok = true;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (std::abs(load(j)) == 0.0 || j == i) continue;
      Eigen::VectorXd uj(d + 1);
      uj << model.a(j), model.b.row(j).transpose();
      const double dot = ui.dot(uj);
      const bool prop = uj.norm() > 0.0 && dot > 0.0 &&
                        ui.norm() * uj.norm() - dot <= 1e-12 * ui.norm() * uj.norm();
      if (!prop) {
        ok = false;
        rep.messages.push_back("factors " + std::to_string(i) + " and " + std::to_string(j) +
                               ": volatilities not proportional (Condition A.2)");
      }
    }
    rep.condition_a_part2.push_back(ok);
  }

  // Gaussian factors: nonnegativity through the stationary Gaussian law.
  std::vector<Eigen::Index> gaussian;
  for (Eigen::Index i = 0; i < d; ++i)
    if (model.b.row(i).squaredNorm() == 0.0) gaussian.push_back(i);
  if (!gaussian.empty()) {
    const Eigen::VectorXd levels = model.variance_levels(model.theta).cwiseMax(0.0);
    const Eigen::MatrixXd C = model.sigma * levels.asDiagonal() * model.sigma.transpose();
    const auto eig = model.kappa.eigenvalues();
    const bool stable = (eig.real().array() > 0.0).all();
    Eigen::MatrixXd V = Eigen::MatrixXd::Constant(d, d, std::numeric_limits<double>::infinity());
    if (stable)
      V = lyapunov(model.kappa, C);
    else
      rep.messages.push_back("mean-reversion matrix is not stable; Gaussian factors have no stationary law");
    if (gaussian.size() != std::size_t(d))
      rep.messages.push_back(
          "mixed model: Gaussian-factor variance uses square-root levels frozen at Theta");
    const double gstar = gaussian_certainty_threshold();
    for (Eigen::Index i : gaussian) {
      GaussianFactorCheck g;
      g.factor = int(i);
      g.mean = model.theta(i);
      g.stddev = std::sqrt(std::max(V(i, i), 0.0));
      g.gamma_star = gstar;
      g.prob_nonnegative = g.stddev > 0.0 ? normal_cdf(g.mean / g.stddev) : (g.mean >= 0.0 ? 1.0 : 0.0);
      g.mean_positive = g.mean > 0.0;
      g.ok = stable && g.mean_positive && gstar * g.mean > g.stddev;
      if (!g.ok)
        rep.messages.push_back("Gaussian factor " + std::to_string(i) +
                               ": nonnegativity condition fails (Condition B / Gaussian test)");
      rep.gaussian_factors.push_back(g);
    }
  }
  return rep;
}

}  // namespace coxaff
