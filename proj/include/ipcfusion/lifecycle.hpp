#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "ipcfusion/corpus.hpp"

namespace ipcfusion {

enum class GrowthModel { Gompertz, Logistic };

std::string_view to_string(GrowthModel model);
GrowthModel parse_model(std::string_view text);

/// L is the asymptote, a shifts the curve in time and b is the rate.
struct GrowthParams {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// Gompertz: L*exp(-a*exp(-b*t)).  Logistic: L/(1 + a*exp(-b*t)).
double growth_value(GrowthModel model, const GrowthParams& p, double t);

/// Sum of squared residuals and its gradient with respect to (L, a, b).
double sse_objective(GrowthModel model, const GrowthParams& p, std::span<const double> t,
                     std::span<const double> y);
std::array<double, 3> sse_gradient(GrowthModel model, const GrowthParams& p, std::span<const double> t,
                                   std::span<const double> y);

struct FitMetrics {
  double r_squared = 0.0;
  double rmse = 0.0;
  /// Percent; absent when every actual value is zero.
  std::optional<double> mape;
  std::size_t n_points = 0;
  /// Points left out of MAPE because the actual value is zero.
  std::size_t mape_excluded = 0;
};

struct GrowthFit {
  GrowthModel model = GrowthModel::Gompertz;
  GrowthParams params;
  int t0_year = 0;
  int first_year = 0;
  int last_year = 0;
  FitMetrics metrics;
  bool converged = false;
  std::size_t iterations = 0;
  double objective = 0.0;

  double at(double t) const { return growth_value(model, params, t); }
  double predict(double year) const { return at(year - t0_year); }
  /// ln(a)/b: where Y = L/e (Gompertz) or L/2 (logistic).
  double inflection_t() const;
};

struct FitOptions {
  /// Calendar year mapped to t = 0; defaults to the first observed year.
  std::optional<int> t0_year;
  std::size_t max_iterations = 500;
  /// Stop once an accepted step improves the objective by less than this
  /// fraction and the Gauss-Newton model predicts no larger gain.
  double relative_tolerance = 1e-10;
};

/// Least-squares fit of the model to a (cumulative) series with L kept at or
/// above the largest observation and a, b > 0. Errors:
/// Error{InsufficientData} with fewer than 4 points, Error{DegenerateSeries}
/// with fewer than 3 distinct values. Non-convergence is reported through
/// GrowthFit::converged with the best iterate.
GrowthFit fit_growth(GrowthModel model, const TimeSeries& series, const FitOptions& options = {});
GrowthFit fit_gompertz(const TimeSeries& series, const FitOptions& options = {});
GrowthFit fit_logistic(const TimeSeries& series, const FitOptions& options = {});

/// R^2 about the observed mean, RMSE, and MAPE over nonzero actuals. A
/// constant series has R^2 = 1 when matched exactly and 0 otherwise.
FitMetrics goodness_of_fit(std::span<const double> observed, std::span<const double> predicted);
FitMetrics goodness_of_fit(const GrowthFit& fit, const TimeSeries& series);

/// Highest R^2, then lower RMSE, then lower MAPE, then Gompertz.
/// Throws Error{InvalidArgument} on an empty candidate list.
GrowthFit select_model(std::span<const GrowthFit> candidates);

/// Yearly predictions for t0_year .. t0_year + horizon_years.
TimeSeries forecast(const GrowthFit& fit, int horizon_years);

enum class MaturityPhase { Emerging, Growth, Maturity, Saturation };

std::string_view to_string(MaturityPhase phase);

/// Lower bounds (as fractions of L) of the Growth, Maturity and Saturation
/// bands. Defaults are a convention.
struct MaturityThresholds {
  double growth = 0.10;
  double maturity = 0.50;
  double saturation = 0.90;
};

struct MaturityAssessment {
  MaturityPhase phase = MaturityPhase::Emerging;
  double fraction_of_L = 0.0;
  double inflection_year = 0.0;
  double saturation_year = 0.0;
};

/// Calendar year at which the curve reaches `fraction` of L.
double year_reaching(const GrowthFit& fit, double fraction);

/// Throws Error{InvalidArgument} if at_year precedes the observed span.
MaturityAssessment maturity_phase(const GrowthFit& fit, double at_year, const MaturityThresholds& thresholds = {});

std::string fit_to_json(const GrowthFit& fit, const MaturityAssessment& maturity, double assessed_year);
/// "year,predicted_cumulative" rows.
std::string forecast_to_csv(const TimeSeries& forecast);

}  // namespace ipcfusion
