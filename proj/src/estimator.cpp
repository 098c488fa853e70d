// SPDX-License-Identifier: MIT
#include "dppmix/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "dppmix/errors.hpp"
#include "dppmix/mixing.hpp"
#include "dppmix/quadrature.hpp"

namespace dppmix {

CovariateMap intercept_only() {
  return [](const double*) {
    Eigen::VectorXd z(1);
    z[0] = 1.0;
    return z;
  };
}

namespace {

// Midpoint tensor-grid design for the intensity integral: row i of Z holds
// z(u_i), every node carrying the same weight |W| / q^d.
struct QuadDesign {
  Eigen::MatrixXd Z;
  double weight = 0.0;
};

QuadDesign build_design(const Window& w, const CovariateMap& z, int q) {
  if (q < 2) throw ValidationError("fit_beta: quad_nodes must be >= 2");
  const int d = w.dim();
  long total = 1;
  for (int k = 0; k < d; ++k) {
    total *= q;
    if (total > 1'000'000) throw ResourceError("fit_beta: quadrature grid too large");
  }
  Eigen::VectorXd x(d);
  std::vector<int> ix(static_cast<std::size_t>(d), 0);
  QuadDesign out;
  out.weight = w.volume() / static_cast<double>(total);
  for (long i = 0; i < total; ++i) {
    for (int k = 0; k < d; ++k)
      x[k] = w.lower[k] +
             (w.upper[k] - w.lower[k]) * (ix[static_cast<std::size_t>(k)] + 0.5) / q;
    const Eigen::VectorXd zi = z(x.data());
    if (i == 0) out.Z.resize(total, zi.size());
    if (zi.size() != out.Z.cols()) throw ValidationError("covariate map: inconsistent dimension");
    out.Z.row(i) = zi;
    for (int k = d - 1; k >= 0; --k) {
      if (++ix[static_cast<std::size_t>(k)] < q) break;
      ix[static_cast<std::size_t>(k)] = 0;
    }
  }
  return out;
}

Eigen::VectorXd sum_covariates(const PointPattern& pat, const CovariateMap& z, Eigen::Index m) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < pat.size(); ++i) {
    const Eigen::VectorXd zi = z(pat.point(i));
    if (zi.size() != m) throw ValidationError("covariate map: inconsistent dimension");
    s += zi;
  }
  return s;
}

}  // namespace

Eigen::VectorXd score_beta(const PointPattern& pat, const Window& w, const CovariateMap& z,
                           const Eigen::VectorXd& beta, int quad_nodes) {
  const QuadDesign design = build_design(w, z, quad_nodes);
  if (design.Z.cols() != beta.size()) throw ValidationError("score_beta: beta size mismatch");
  const Eigen::ArrayXd lam = (design.Z * beta).array().exp();
  return sum_covariates(pat, z, beta.size()) -
         design.weight * (design.Z.transpose() * lam.matrix());
}

BetaFit fit_beta(const PointPattern& pat, const Window& w, const CovariateMap& z,
                 const Eigen::VectorXd& beta0, int quad_nodes, int max_iter, double tol) {
  if (pat.size() == 0) throw ValidationError("fit_beta: empty pattern");
  if (pat.dim != w.dim()) throw ValidationError("fit_beta: dimension mismatch");
  const QuadDesign design = build_design(w, z, quad_nodes);
  const Eigen::Index m = design.Z.cols();
  if (beta0.size() != m) throw ValidationError("fit_beta: beta0 size mismatch");
  const Eigen::VectorXd zsum = sum_covariates(pat, z, m);
  const double scale = std::max(1.0, static_cast<double>(pat.size()));

  const auto score_at = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
    const Eigen::ArrayXd lam = (design.Z * b).array().exp();
    return zsum - design.weight * (design.Z.transpose() * lam.matrix());
  };

  BetaFit fit;
  fit.beta = beta0;
  Eigen::VectorXd s = score_at(fit.beta);
  for (int it = 0; it < max_iter; ++it) {
    fit.iterations = it;
    fit.score_norm = s.lpNorm<Eigen::Infinity>();
    if (fit.score_norm <= tol * scale) {
      fit.converged = true;
      return fit;
    }
    const Eigen::ArrayXd lam = (design.Z * fit.beta).array().exp();
    const Eigen::MatrixXd jac =
        -design.weight * (design.Z.transpose() * lam.matrix().asDiagonal() * design.Z);
    Eigen::VectorXd step = jac.fullPivLu().solve(-s);
    if (!step.allFinite()) throw NumericError("fit_beta: singular Jacobian");
    double snorm = s.lpNorm<Eigen::Infinity>();
    for (int h = 0; h < 40; ++h) {
      const Eigen::VectorXd cand = fit.beta + step;
      const Eigen::VectorXd sc = score_at(cand);
      if (sc.allFinite() && (sc.lpNorm<Eigen::Infinity>() < snorm || h == 39)) {
        fit.beta = cand;
        s = sc;
        break;
      }
      step *= 0.5;
    }
  }
  fit.score_norm = s.lpNorm<Eigen::Infinity>();
  if (fit.score_norm <= tol * scale) {
    fit.converged = true;
    return fit;
  }
  throw NonConvergenceError("fit_beta: Newton failed to reach tolerance");
}

KHatCurve ripley_k_hat(const PointPattern& pat, const Window& w,
                       const std::function<double(const double*)>& rho_hat,
                       const std::vector<double>& t_grid) {
  if (pat.size() < 2) throw ValidationError("ripley_k_hat: need at least 2 points");
  if (pat.dim != w.dim()) throw ValidationError("ripley_k_hat: dimension mismatch");
  if (t_grid.empty()) throw ValidationError("ripley_k_hat: empty grid");
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    if (!(t_grid[j] > 0.0) || (j > 0 && t_grid[j] <= t_grid[j - 1]))
      throw ValidationError("ripley_k_hat: grid must be positive and increasing");
  }
  const double tmax = t_grid.back();
  if (!(tmax < w.min_side()))
    throw ValidationError("ripley_k_hat: max distance must be below the shortest window side");

  const int d = pat.dim;
  std::vector<double> rho(pat.size());
  for (std::size_t i = 0; i < pat.size(); ++i) {
    rho[i] = rho_hat(pat.point(i));
    if (!(rho[i] > 0.0)) throw NumericError("ripley_k_hat: nonpositive fitted intensity");
  }

  std::vector<std::pair<double, double>> events;  // (distance, weight)
  const CellGrid grid(pat, tmax);
  grid.for_each_close_pair(tmax, [&](int i, int j) {
    const double* xi = pat.point(static_cast<std::size_t>(i));
    const double* xj = pat.point(static_cast<std::size_t>(j));
    double dist2 = 0.0;
    double vol = 1.0;
    for (int k = 0; k < d; ++k) {
      const double u = xi[k] - xj[k];
      dist2 += u * u;
      vol *= (w.upper[k] - w.lower[k]) - std::abs(u);
    }
    // Both ordered pairs (x,y) and (y,x) contribute the same term.
    events.emplace_back(std::sqrt(dist2),
                        2.0 / (rho[static_cast<std::size_t>(i)] *
                               rho[static_cast<std::size_t>(j)] * vol));
  });
  std::sort(events.begin(), events.end());

  KHatCurve out;
  out.t = t_grid;
  out.k.resize(t_grid.size());
  double acc = 0.0;
  std::size_t e = 0;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    while (e < events.size() && events[e].first <= t_grid[j]) acc += events[e++].second;
    out.k[j] = acc;
  }
  return out;
}

std::vector<double> k_theoretical(const CorrelationFamily& c, const std::vector<double>& t_grid) {
  const double sd = sphere_surface(c.dim);
  const int d = c.dim;
  const auto f = [&](double r) {
    const double corr = c.correlation(r);
    return sd * std::pow(r, d - 1) * (1.0 - corr * corr);
  };
  return cumulative_integral(f, 0.0, t_grid, 8);
}

double k_gaussian_closed_form(double alpha, double t) {
  constexpr double kPi = 3.14159265358979323846;
  return kPi * t * t -
         0.5 * kPi * alpha * alpha * (1.0 - std::exp(-2.0 * t * t / (alpha * alpha)));
}

std::vector<double> k_grid(double r_lower, double r_upper, int n) {
  if (n < 2 || !(r_lower > 0.0) || !(r_upper > r_lower))
    throw ValidationError("k_grid: need n >= 2 and 0 < r_lower < r_upper");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    g[static_cast<std::size_t>(i)] = r_lower + (r_upper - r_lower) * i / (n - 1);
  return g;
}

namespace {

int family_param_count(Family f) { return f == Family::Cauchy ? 2 : 1; }

CorrelationFamily family_from_psi(Family f, int dim, const Eigen::VectorXd& psi) {
  switch (f) {
    case Family::Gaussian:
      return CorrelationFamily::gaussian(dim, psi[0]);
    case Family::Cauchy:
      return CorrelationFamily::cauchy(dim, psi[0], psi[1]);
    case Family::BesselMostRepulsive:
      return CorrelationFamily::bessel_most_repulsive(dim, psi[0]);
  }
  throw ValidationError("fit_correlation: unknown family");
}

double contrast_value(Family f, int dim, const KHatCurve& khat, const Eigen::VectorXd& psi,
                      double c) {
  const CorrelationFamily fam = family_from_psi(f, dim, psi);
  const std::vector<double> kth = k_theoretical(fam, khat.t);
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < khat.t.size(); ++j) {
    const double g0 = std::pow(khat.k[j], c) - std::pow(kth[j], c);
    const double g1 = std::pow(khat.k[j + 1], c) - std::pow(kth[j + 1], c);
    acc += 0.5 * (g0 * g0 + g1 * g1) * (khat.t[j + 1] - khat.t[j]);
  }
  return acc;
}

}  // namespace

ContrastFit fit_correlation(Family family, int dim, const KHatCurve& khat,
                            const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                            double c_exponent) {
  const int np = family_param_count(family);
  if (lo.size() != np || hi.size() != np)
    throw ValidationError("fit_correlation: bound size must match the parameter count");
  for (int k = 0; k < np; ++k)
    if (!(lo[k] < hi[k])) throw ValidationError("fit_correlation: need lo < hi");
  if (khat.t.size() < 2) throw ValidationError("fit_correlation: curve too short");

  ContrastFit fit;
  int evals = 0;
  const auto obj = [&](const Eigen::VectorXd& psi) {
    ++evals;
    return contrast_value(family, dim, khat, psi, c_exponent);
  };

  if (np == 1) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo[0], b = hi[0];
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    Eigen::VectorXd p(1);
    p[0] = x1;
    double f1 = obj(p);
    p[0] = x2;
    double f2 = obj(p);
    for (int it = 0; it < 200 && (b - a) > 1e-9 * std::max(1.0, std::abs(a) + std::abs(b));
         ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kInvPhi * (b - a);
        p[0] = x1;
        f1 = obj(p);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kInvPhi * (b - a);
        p[0] = x2;
        f2 = obj(p);
      }
    }
    fit.psi.resize(1);
    fit.psi[0] = 0.5 * (a + b);
    fit.contrast = obj(fit.psi);
    fit.converged = true;
  } else {
    const auto clamp = [&](Eigen::VectorXd v) {
      for (int k = 0; k < np; ++k) v[k] = std::clamp(v[k], lo[k], hi[k]);
      return v;
    };
    std::vector<Eigen::VectorXd> vx(3);
    std::vector<double> vf(3);
    vx[0] = 0.5 * (lo + hi);
    vx[1] = clamp(vx[0] + 0.25 * (hi - lo).cwiseProduct(Eigen::Vector2d(1, 0)));
    vx[2] = clamp(vx[0] + 0.25 * (hi - lo).cwiseProduct(Eigen::Vector2d(0, 1)));
    for (int k = 0; k < 3; ++k) vf[static_cast<std::size_t>(k)] = obj(vx[static_cast<std::size_t>(k)]);
    const double range_norm = (hi - lo).norm();
    bool converged = false;
    for (int it = 0; it < 400; ++it) {
      std::array<int, 3> ord = {0, 1, 2};
      std::sort(ord.begin(), ord.end(), [&](int i, int j) {
        return vf[static_cast<std::size_t>(i)] < vf[static_cast<std::size_t>(j)];
      });
      const Eigen::VectorXd& best = vx[static_cast<std::size_t>(ord[0])];
      Eigen::VectorXd& worst = vx[static_cast<std::size_t>(ord[2])];
      double& fworst = vf[static_cast<std::size_t>(ord[2])];
      const double fbest = vf[static_cast<std::size_t>(ord[0])];
      const double fmid = vf[static_cast<std::size_t>(ord[1])];
      if ((worst - best).norm() < 1e-8 * std::max(1.0, range_norm) ||
          std::abs(fworst - fbest) < 1e-15) {
        converged = true;
        break;
      }
      const Eigen::VectorXd centroid =
          0.5 * (vx[static_cast<std::size_t>(ord[0])] + vx[static_cast<std::size_t>(ord[1])]);
      const Eigen::VectorXd refl = clamp(centroid + (centroid - worst));
      const double frefl = obj(refl);
      if (frefl < fbest) {
        const Eigen::VectorXd expd = clamp(centroid + 2.0 * (centroid - worst));
        const double fexp = obj(expd);
        if (fexp < frefl) {
          worst = expd;
          fworst = fexp;
        } else {
          worst = refl;
          fworst = frefl;
        }
      } else if (frefl < fmid) {
        worst = refl;
        fworst = frefl;
      } else {
        const Eigen::VectorXd contr = clamp(centroid + 0.5 * (worst - centroid));
        const double fcontr = obj(contr);
        if (fcontr < fworst) {
          worst = contr;
          fworst = fcontr;
        } else {
          for (int k = 1; k < 3; ++k) {
            vx[static_cast<std::size_t>(ord[k])] =
                clamp(best + 0.5 * (vx[static_cast<std::size_t>(ord[k])] - best));
            vf[static_cast<std::size_t>(ord[k])] = obj(vx[static_cast<std::size_t>(ord[k])]);
          }
        }
      }
    }
    int bi = 0;
    for (int k = 1; k < 3; ++k)
      if (vf[static_cast<std::size_t>(k)] < vf[static_cast<std::size_t>(bi)]) bi = k;
    fit.psi = vx[static_cast<std::size_t>(bi)];
    fit.contrast = vf[static_cast<std::size_t>(bi)];
    fit.converged = converged;
  }

  fit.evaluations = evals;
  for (int k = 0; k < np; ++k) {
    const double edge = 1e-4 * (hi[k] - lo[k]);
    if (fit.psi[k] - lo[k] <= edge || hi[k] - fit.psi[k] <= edge) fit.at_boundary = true;
  }
  return fit;
}

TwoStepFit two_step_fit(const PointPattern& pat, const Window& w, const CovariateMap& z,
                        Family family, const TwoStepOptions& opt) {
  if (pat.size() < 2) throw ValidationError("two_step_fit: need at least 2 points");
  const Eigen::VectorXd z0 = z(w.lower.data());
  Eigen::VectorXd beta0 = opt.beta0;
  if (beta0.size() == 0) beta0 = Eigen::VectorXd::Zero(z0.size());

  TwoStepFit fit;
  fit.beta = fit_beta(pat, w, z, beta0, opt.quad_nodes);

  const Eigen::VectorXd bhat = fit.beta.beta;
  const auto rho_hat = [&z, bhat](const double* x) { return std::exp(z(x).dot(bhat)); };
  fit.khat = ripley_k_hat(pat, w, rho_hat, k_grid(opt.r_lower, opt.r_upper, opt.t_nodes));
  fit.corr = fit_correlation(family, pat.dim, fit.khat, opt.psi_lo, opt.psi_hi,
                             opt.contrast_exponent);
  fit.k_fitted = k_theoretical(family_from_psi(family, pat.dim, fit.corr.psi), fit.khat.t);
  return fit;
}

}  // namespace dppmix
