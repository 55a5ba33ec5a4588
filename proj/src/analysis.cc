// Copyright 2026 The phidecoder Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phidec/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

namespace phidec {
namespace {

using Vec7 = Eigen::Matrix<double, FitParams::kCount, 1>;

double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool same_p(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

// Lowest sign change of log T_large - log T_small over the shared grid,
// given per-point means.
double crossing_from_means(const std::vector<double>& log_p,
                           const std::vector<double>& diff) {
  for (std::size_t i = 0; i + 1 < diff.size(); ++i) {
    const double a = diff[i];
    const double b = diff[i + 1];
    if (a == 0.0 && b != 0.0) return std::exp(log_p[i]);
    if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
      const double t = a / (a - b);
      return std::exp(log_p[i] + t * (log_p[i + 1] - log_p[i]));
    }
    if (b == 0.0 && a != 0.0 && i + 2 == diff.size()) {
      return std::exp(log_p[i + 1]);
    }
  }
  throw NoCrossing("survival curves do not cross on the shared p grid");
}

struct SharedGrid {
  std::vector<double> log_p;
  std::vector<const CurvePoint*> small;
  std::vector<const CurvePoint*> large;
};

SharedGrid shared_grid(const std::vector<CurvePoint>& small,
                       const std::vector<CurvePoint>& large) {
  SharedGrid g;
  std::vector<const CurvePoint*> s;
  for (const auto& c : small) s.push_back(&c);
  std::sort(s.begin(), s.end(),
            [](auto* a, auto* b) { return a->p < b->p; });
  for (const CurvePoint* a : s) {
    for (const auto& b : large) {
      if (same_p(a->p, b.p)) {
        if (!(a->p > 0.0) || !(a->mean_T > 0.0) || !(b.mean_T > 0.0)) {
          throw AnalysisError("crossing needs positive p and mean survival");
        }
        g.log_p.push_back(std::log(a->p));
        g.small.push_back(a);
        g.large.push_back(&b);
        break;
      }
    }
  }
  if (g.log_p.size() < 2) {
    throw NoCrossing("curves share fewer than two p values");
  }
  return g;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

// Design matrix row of the scaling law and its derivatives.
struct ModelEval {
  double value;
  Vec7 grad;
};

ModelEval evaluate_with_gradient(const FitParams& f, int L, double p) {
  const double lnL = std::log(static_cast<double>(L));
  const double x = p - f.p_fit;
  const double s = std::exp(lnL / f.nu);
  const double g = std::exp(-lnL / f.mu);
  ModelEval out;
  out.value = f.A + f.B * x * s + f.C * x * x * s * s + f.D * g;
  const double ds_dnu = -lnL / (f.nu * f.nu) * s;
  const double dg_dmu = lnL / (f.mu * f.mu) * g;
  out.grad << 1.0, x * s, x * x * s * s, g,
      -f.B * s - 2.0 * f.C * x * s * s,
      (f.B * x + 2.0 * f.C * x * x * s) * ds_dnu, f.D * dg_dmu;
  return out;
}

struct Problem {
  std::vector<int> L;
  std::vector<double> p;
  std::vector<double> y;
  std::vector<double> sigma;
  bool log_target = false;
};

Problem make_problem(const std::vector<CurvePoint>& points, bool log_target) {
  std::vector<CurvePoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(),
            [](const CurvePoint& a, const CurvePoint& b) {
              return std::tie(a.L, a.p, a.mean_T) <
                     std::tie(b.L, b.p, b.mean_T);
            });
  double min_sigma = std::numeric_limits<double>::infinity();
  for (const auto& c : sorted) {
    if (c.stderr_T > 0.0) min_sigma = std::min(min_sigma, c.stderr_T);
  }
  Problem pr;
  pr.log_target = log_target;
  for (const auto& c : sorted) {
    pr.L.push_back(c.L);
    pr.p.push_back(c.p);
    pr.y.push_back(c.mean_T);
    double s = c.stderr_T > 0.0 ? c.stderr_T : min_sigma;
    if (!std::isfinite(s)) s = 1.0;
    pr.sigma.push_back(s);
    if (log_target && !(c.mean_T > 0.0)) {
      throw AnalysisError("log-target fit needs positive mean survival");
    }
  }
  return pr;
}

// Weighted residuals and Jacobian. Returns false if the model leaves the
// domain (non-positive exponents, or non-positive T in log mode).
bool residuals(const Problem& pr, const FitParams& f, Eigen::VectorXd& r,
               Eigen::MatrixXd* J) {
  if (!(f.nu > 0.0) || !(f.mu > 0.0)) return false;
  const Eigen::Index n = static_cast<Eigen::Index>(pr.y.size());
  r.resize(n);
  if (J) J->resize(n, FitParams::kCount);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ModelEval m = evaluate_with_gradient(f, pr.L[i], pr.p[i]);
    if (!std::isfinite(m.value)) return false;
    if (pr.log_target) {
      if (!(m.value > 0.0)) return false;
      const double w = pr.y[i] / pr.sigma[i];
      r(i) = (std::log(m.value) - std::log(pr.y[i])) * w;
      if (J) J->row(i) = (m.grad / m.value * w).transpose();
    } else {
      r(i) = (m.value - pr.y[i]) / pr.sigma[i];
      if (J) J->row(i) = (m.grad / pr.sigma[i]).transpose();
    }
  }
  return r.allFinite();
}

// Weighted linear fit of A..D at fixed p_fit, nu, mu.
FitParams linear_subfit(const Problem& pr, FitParams f) {
  const Eigen::Index n = static_cast<Eigen::Index>(pr.y.size());
  Eigen::MatrixXd X(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ModelEval m = evaluate_with_gradient(f, pr.L[i], pr.p[i]);
    X.row(i) = m.grad.head<4>().transpose() / pr.sigma[i];
    y(i) = pr.y[i] / pr.sigma[i];
  }
  const Eigen::Vector4d coef = X.colPivHouseholderQr().solve(y);
  f.A = coef(0);
  f.B = coef(1);
  f.C = coef(2);
  f.D = coef(3);
  return f;
}

struct LmOutcome {
  FitParams params;
  double chi2 = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

LmOutcome levenberg_marquardt(const Problem& pr, const FitParams& init,
                              const FitOptions& opt) {
  LmOutcome out;
  out.params = init;
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  if (!residuals(pr, init, r, &J)) return out;
  double chi2 = r.squaredNorm();
  double lambda = 1e-3;
  Vec7 theta = init.to_vector();
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.iterations = it + 1;
    Vec7 diag = J.colwise().squaredNorm().transpose();
    for (int k = 0; k < FitParams::kCount; ++k) {
      if (diag(k) <= 0.0) diag(k) = 1.0;
    }
    bool improved = false;
    while (lambda < 1e16) {
      const Eigen::Index n = J.rows();
      Eigen::MatrixXd aug(n + FitParams::kCount, FitParams::kCount);
      aug.topRows(n) = J;
      aug.bottomRows(FitParams::kCount) =
          (lambda * diag).cwiseSqrt().asDiagonal();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + FitParams::kCount);
      rhs.head(n) = -r;
      const Vec7 step = aug.colPivHouseholderQr().solve(rhs);
      const Vec7 trial = theta + step;
      const FitParams candidate = FitParams::from_vector(trial);
      Eigen::VectorXd r_new;
      Eigen::MatrixXd J_new;
      if (residuals(pr, candidate, r_new, &J_new)) {
        const double chi2_new = r_new.squaredNorm();
        if (chi2_new <= chi2) {
          const bool small_step =
              (step.array().abs() <=
               opt.tolerance * (theta.array().abs() + 1e-300))
                  .all();
          const double drop = chi2 - chi2_new;
          theta = trial;
          r = r_new;
          J = J_new;
          lambda = std::max(lambda / 10.0, 1e-15);
          improved = true;
          if (small_step || drop <= opt.tolerance * chi2 || chi2_new == 0.0) {
            out.converged = true;
          }
          chi2 = chi2_new;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!improved) {
      // No downhill step exists at any damping: a stationary point.
      out.converged = true;
    }
    if (out.converged) break;
  }
  out.params = FitParams::from_vector(theta);
  out.chi2 = chi2;
  return out;
}

}  // namespace

CurveSet estimate_curves(const std::vector<SurvivalRecord>& records,
                         CensorPolicy policy) {
  std::map<std::tuple<int, double, double, int, double>, CurvePoint> cells;
  std::map<std::tuple<int, double, double, int, double>, std::size_t>
      censored;
  for (const auto& r : records) {
    const auto key = std::make_tuple(static_cast<int>(r.mode), r.alpha, r.q,
                                     r.L, r.p);
    CurvePoint& c = cells[key];
    c.mode = r.mode;
    c.L = r.L;
    c.p = r.p;
    c.q = r.q;
    c.alpha = r.alpha;
    if (r.censored) {
      ++censored[key];
      if (policy == CensorPolicy::kExclude) continue;
    }
    c.samples.push_back(r.failure_time);
  }
  CurveSet out;
  for (auto& [key, c] : cells) {
    const std::size_t n_cens = censored.count(key) ? censored.at(key) : 0;
    const std::size_t n_total =
        c.samples.size() +
        (policy == CensorPolicy::kExclude ? n_cens : std::size_t{0});
    if (c.samples.size() < 2) {
      std::ostringstream msg;
      msg << "cell mode=" << mode_name(c.mode) << " L=" << c.L
          << " p=" << c.p << " has " << c.samples.size()
          << " usable samples (need >= 2)";
      throw EmptyCell(msg.str());
    }
    c.n_samples = c.samples.size();
    c.mean_T = sample_mean(c.samples);
    double ss = 0.0;
    for (double v : c.samples) ss += (v - c.mean_T) * (v - c.mean_T);
    c.stderr_T = std::sqrt(ss / (c.n_samples - 1)) / std::sqrt(c.n_samples);
    c.median_T = median_of(c.samples);
    c.censored_fraction = static_cast<double>(n_cens) / n_total;
    if (n_cens > 0) {
      std::ostringstream msg;
      msg << "cell mode=" << mode_name(c.mode) << " L=" << c.L
          << " p=" << c.p << ": " << n_cens << " of " << n_total
          << " runs censored"
          << (policy == CensorPolicy::kExclude ? " (excluded)"
                                               : " (counted at cap)");
      out.warnings.push_back(msg.str());
    }
    out.points.push_back(std::move(c));
  }
  return out;
}

std::vector<CurvePoint> curve_for(const std::vector<CurvePoint>& points,
                                  int L) {
  std::vector<CurvePoint> out;
  for (const auto& c : points) {
    if (c.L == L) out.push_back(c);
  }
  std::sort(out.begin(), out.end(),
            [](const CurvePoint& a, const CurvePoint& b) { return a.p < b.p; });
  return out;
}

double find_crossing(const std::vector<CurvePoint>& small,
                     const std::vector<CurvePoint>& large) {
  const SharedGrid g = shared_grid(small, large);
  std::vector<double> diff;
  for (std::size_t i = 0; i < g.log_p.size(); ++i) {
    diff.push_back(std::log(g.large[i]->mean_T) - std::log(g.small[i]->mean_T));
  }
  return crossing_from_means(g.log_p, diff);
}

CrossingEstimate bootstrap_crossing(const std::vector<CurvePoint>& small,
                                    const std::vector<CurvePoint>& large,
                                    std::size_t n_boot, std::uint64_t seed,
                                    double level) {
  CrossingEstimate est;
  est.L_small = small.empty() ? 0 : small.front().L;
  est.L_large = large.empty() ? 0 : large.front().L;
  est.label_L = 0.5 * (est.L_small + est.L_large);
  est.p_cross = find_crossing(small, large);
  est.ci_low = est.ci_high = est.p_cross;
  const SharedGrid g = shared_grid(small, large);
  std::mt19937_64 rng(seed);
  auto resampled_mean = [&rng](const CurvePoint& c) {
    if (c.samples.empty()) return c.mean_T;
    std::uniform_int_distribution<std::size_t> pick(0, c.samples.size() - 1);
    double sum = 0.0;
    for (std::size_t k = 0; k < c.samples.size(); ++k) {
      sum += c.samples[pick(rng)];
    }
    return sum / c.samples.size();
  };
  std::vector<double> reps;
  std::vector<double> diff(g.log_p.size());
  for (std::size_t b = 0; b < n_boot; ++b) {
    for (std::size_t i = 0; i < g.log_p.size(); ++i) {
      diff[i] = std::log(resampled_mean(*g.large[i])) -
                std::log(resampled_mean(*g.small[i]));
    }
    try {
      reps.push_back(crossing_from_means(g.log_p, diff));
    } catch (const NoCrossing&) {
    }
  }
  est.n_boot_valid = reps.size();
  if (!reps.empty()) {
    const double tail = 0.5 * (1.0 - level);
    est.ci_low = percentile(reps, tail);
    est.ci_high = percentile(reps, 1.0 - tail);
  }
  return est;
}

std::vector<CrossingEstimate> crossing_table(
    const std::vector<CurvePoint>& points, std::size_t n_boot,
    std::uint64_t seed) {
  std::set<int> sizes;
  for (const auto& c : points) sizes.insert(c.L);
  std::vector<int> Ls(sizes.begin(), sizes.end());
  std::vector<CrossingEstimate> out;
  for (std::size_t i = 0; i + 1 < Ls.size(); ++i) {
    try {
      out.push_back(bootstrap_crossing(curve_for(points, Ls[i]),
                                       curve_for(points, Ls[i + 1]), n_boot,
                                       seed + i));
    } catch (const NoCrossing&) {
    }
  }
  return out;
}

Vec7 FitParams::to_vector() const {
  Vec7 v;
  v << A, B, C, D, p_fit, nu, mu;
  return v;
}

FitParams FitParams::from_vector(const Vec7& v) {
  return {v(0), v(1), v(2), v(3), v(4), v(5), v(6)};
}

double FitParams::evaluate(int L, double p) const {
  return evaluate_with_gradient(*this, L, p).value;
}

FitParams initial_guess(const std::vector<CurvePoint>& points) {
  if (points.empty()) throw AnalysisError("no points to fit");
  FitParams f;
  f.nu = 1.0;
  f.mu = 1.0;
  double lowest = std::numeric_limits<double>::infinity();
  std::set<int> sizes;
  for (const auto& c : points) sizes.insert(c.L);
  std::vector<int> Ls(sizes.begin(), sizes.end());
  for (std::size_t i = 0; i + 1 < Ls.size(); ++i) {
    try {
      lowest = std::min(lowest, find_crossing(curve_for(points, Ls[i]),
                                              curve_for(points, Ls[i + 1])));
    } catch (const NoCrossing&) {
    }
  }
  if (!std::isfinite(lowest)) {
    std::vector<double> ps;
    for (const auto& c : points) ps.push_back(c.p);
    lowest = median_of(ps);
  }
  f.p_fit = lowest;
  return linear_subfit(make_problem(points, false), f);
}

FitResult fit_scaling(const std::vector<CurvePoint>& points,
                      const FitParams& init, const FitOptions& options) {
  std::set<double> ps;
  std::set<int> Ls;
  for (const auto& c : points) {
    ps.insert(c.p);
    Ls.insert(c.L);
  }
  if (ps.size() < 3 || Ls.size() < 3 ||
      points.size() < static_cast<std::size_t>(FitParams::kCount)) {
    throw AnalysisError(
        "scaling fit needs >= 3 distinct p, >= 3 distinct L and >= 7 points");
  }
  const Problem pr = make_problem(points, options.log_target);

  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  if (!residuals(pr, init, r, &J)) {
    throw AnalysisError("initial parameters are outside the model domain");
  }
  {
    Eigen::MatrixXd scaled = J;
    for (Eigen::Index k = 0; k < scaled.cols(); ++k) {
      const double norm = scaled.col(k).norm();
      if (norm > 0.0) scaled.col(k) /= norm;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(1e-10);
    if (qr.rank() < FitParams::kCount) {
      throw IllConditioned("scaling-fit Jacobian is rank deficient at start");
    }
  }

  // Restarts from a few nearby p_fit values guard against a poor start;
  // the lowest residual wins.
  LmOutcome best = levenberg_marquardt(pr, init, options);
  for (double factor : {0.9, 1.1, 0.75, 1.25}) {
    if (best.converged && best.chi2 == 0.0) break;
    FitParams start = init;
    start.p_fit = init.p_fit * factor;
    start = linear_subfit(make_problem(points, false), start);
    const LmOutcome alt = levenberg_marquardt(pr, start, options);
    if (alt.converged && (!best.converged || alt.chi2 < best.chi2)) best = alt;
  }
  if (!best.converged) {
    throw NonConvergence("scaling fit did not converge in " +
                         std::to_string(options.max_iterations) +
                         " iterations");
  }

  FitResult out;
  out.params = best.params;
  out.iterations = best.iterations;
  out.residual_norm = std::sqrt(best.chi2);
  residuals(pr, best.params, r, &J);
  // Equilibrate columns first; the raw normal matrix spans many decades.
  Eigen::VectorXd col_scale(J.cols());
  for (Eigen::Index k = 0; k < J.cols(); ++k) {
    const double norm = J.col(k).norm();
    col_scale(k) = norm > 0.0 ? norm : 1.0;
  }
  const Eigen::MatrixXd Js = J * col_scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Js);
  qr.setThreshold(1e-12);
  if (qr.rank() < FitParams::kCount) {
    throw IllConditioned("scaling-fit Jacobian is rank deficient at optimum");
  }
  const Eigen::MatrixXd inv_scaled =
      (Js.transpose() * Js).ldlt().solve(
          Eigen::MatrixXd::Identity(FitParams::kCount, FitParams::kCount));
  const double dof = static_cast<double>(pr.y.size()) - FitParams::kCount;
  const double scale = dof > 0 ? best.chi2 / dof : 1.0;
  out.covariance = col_scale.cwiseInverse().asDiagonal() * inv_scaled *
                   col_scale.cwiseInverse().asDiagonal() * scale;

  if (options.n_boot > 0) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> reps;
    FitOptions inner = options;
    inner.n_boot = 0;
    for (std::size_t b = 0; b < options.n_boot; ++b) {
      std::vector<CurvePoint> perturbed = points;
      for (auto& c : perturbed) {
        const double s = c.stderr_T > 0.0 ? c.stderr_T : 0.0;
        c.mean_T += s * gauss(rng);
      }
      try {
        const Problem pb = make_problem(perturbed, options.log_target);
        const LmOutcome rep = levenberg_marquardt(pb, best.params, inner);
        if (rep.converged) reps.push_back(rep.params.p_fit);
      } catch (const AnalysisError&) {
      }
    }
    if (reps.size() >= 2) {
      const double m = sample_mean(reps);
      double ss = 0.0;
      for (double v : reps) ss += (v - m) * (v - m);
      out.p_fit_boot_stddev = std::sqrt(ss / (reps.size() - 1));
      out.p_fit_boot_low = percentile(reps, 0.025);
      out.p_fit_boot_high = percentile(reps, 0.975);
    }
  }
  return out;
}

}  // namespace phidec
