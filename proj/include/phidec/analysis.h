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

#ifndef PHIDEC_ANALYSIS_H_
#define PHIDEC_ANALYSIS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phidec/engine.h"

namespace phidec {

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class EmptyCell : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};
class NoCrossing : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};
class NonConvergence : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};
class IllConditioned : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

// Mean survival of one (mode, L, p, q, alpha) cell.
struct CurvePoint {
  Mode mode = Mode::kSynchronous;
  int L = 0;
  double p = 0.0;
  double q = 0.0;
  double alpha = 0.0;
  double mean_T = 0.0;
  double stderr_T = 0.0;
  double median_T = 0.0;
  std::size_t n_samples = 0;
  double censored_fraction = 0.0;
  std::vector<double> samples;
};

enum class CensorPolicy {
  kIncludeAtCap,  // censored runs count with their cap (a lower bound)
  kExclude,
};

struct CurveSet {
  std::vector<CurvePoint> points;  // sorted by (mode, alpha, q, L, p)
  std::vector<std::string> warnings;
};

// Groups records into cells. Throws EmptyCell when a cell has fewer than
// two usable samples.
CurveSet estimate_curves(const std::vector<SurvivalRecord>& records,
                         CensorPolicy policy = CensorPolicy::kIncludeAtCap);

// Points of `points` with the given L, sorted by p.
std::vector<CurvePoint> curve_for(const std::vector<CurvePoint>& points,
                                  int L);

// Root of log T_large - log T_small, interpolated linearly in
// (log p, log T) between shared grid points. The lowest sign change wins.
// Throws NoCrossing if the difference never changes sign.
double find_crossing(const std::vector<CurvePoint>& small,
                     const std::vector<CurvePoint>& large);

struct CrossingEstimate {
  int L_small = 0;
  int L_large = 0;
  double label_L = 0.0;  // midpoint of the two sizes
  double p_cross = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_boot_valid = 0;
};

// Point estimate plus a percentile interval from resampling each cell's
// samples. Replicates without a crossing are dropped.
CrossingEstimate bootstrap_crossing(const std::vector<CurvePoint>& small,
                                    const std::vector<CurvePoint>& large,
                                    std::size_t n_boot, std::uint64_t seed,
                                    double level = 0.95);

// Crossings between consecutive sizes present in `points`. Pairs without a
// crossing are skipped.
std::vector<CrossingEstimate> crossing_table(
    const std::vector<CurvePoint>& points, std::size_t n_boot,
    std::uint64_t seed);

// <T(L, p)> = A + B (p - p_fit) L^(1/nu) + C (p - p_fit)^2 L^(2/nu)
//             + D L^(-1/mu)
struct FitParams {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  double p_fit = 0.0;
  double nu = 1.0;
  double mu = 1.0;

  static constexpr int kCount = 7;
  Eigen::Matrix<double, kCount, 1> to_vector() const;
  static FitParams from_vector(const Eigen::Matrix<double, kCount, 1>& v);
  double evaluate(int L, double p) const;
};

struct FitOptions {
  bool log_target = false;  // fit log T instead of T
  int max_iterations = 500;
  double tolerance = 1e-10;  // relative chi^2 drop and relative step
  std::size_t n_boot = 0;  // parametric bootstrap replicates for p_fit
  std::uint64_t seed = 1;
};

struct FitResult {
  FitParams params;
  Eigen::Matrix<double, FitParams::kCount, FitParams::kCount> covariance;
  double residual_norm = 0.0;  // sqrt of the weighted sum of squares
  int iterations = 0;
  double p_fit_boot_stddev = 0.0;
  double p_fit_boot_low = 0.0;
  double p_fit_boot_high = 0.0;
};

// Structured start: p_fit at the lowest crossing between consecutive
// sizes, nu = mu = 1, and A..D from a linear fit at those values.
FitParams initial_guess(const std::vector<CurvePoint>& points);

// Weighted (1 / stderr^2) Levenberg-Marquardt fit. Points with zero
// stderr get unit weight when every point has zero stderr.
FitResult fit_scaling(const std::vector<CurvePoint>& points,
                      const FitParams& init, const FitOptions& options = {});

}  // namespace phidec

#endif  // PHIDEC_ANALYSIS_H_
