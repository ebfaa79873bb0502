#include "ipcfusion/lifecycle.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <json.hpp>

#include "ipcfusion/error.hpp"

namespace ipcfusion {

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// exp() arguments beyond this are clamped; the curve is flat there anyway.
constexpr double kMaxExponent = 700.0;

double safe_exp(double x) { return std::exp(std::clamp(x, -kMaxExponent, kMaxExponent)); }

// Value and partial derivatives with respect to (L, a, b).
struct Evaluation {
  double value;
  Vec3 grad;
};

Evaluation evaluate(GrowthModel model, const GrowthParams& p, double t) {
  const double g = safe_exp(-p.b * t);
  if (model == GrowthModel::Gompertz) {
    const double e = std::exp(-p.a * g);
    return {p.L * e, Vec3(e, -p.L * g * e, p.L * p.a * t * g * e)};
  }
  const double d = 1.0 + p.a * g;
  return {p.L / d, Vec3(1.0 / d, -p.L * g / (d * d), p.L * p.a * t * g / (d * d))};
}

// Unconstrained coordinates: (L, a, b) = exp(theta). Only positivity is
// imposed; noisy plateaus can put the best L below the largest observation.
struct Coordinates {
  GrowthParams to_params(const Vec3& theta) const {
    return {safe_exp(theta[0]), safe_exp(theta[1]), safe_exp(theta[2])};
  }
  Vec3 from_params(const GrowthParams& p) const { return Vec3(std::log(p.L), std::log(p.a), std::log(p.b)); }
  // d(L, a, b)/d(theta), diagonal.
  Vec3 chain(const GrowthParams& p) const { return Vec3(p.L, p.a, p.b); }
};

struct Problem {
  GrowthModel model;
  std::vector<double> t;
  std::vector<double> y;  // scaled so max(y) == 1
};

double sse(const Problem& pr, const GrowthParams& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < pr.t.size(); ++i) {
    const double r = pr.y[i] - growth_value(pr.model, p, pr.t[i]);
    s += r * r;
  }
  return s;
}

struct LmResult {
  GrowthParams params;
  double objective;
  bool converged;
  std::size_t iterations;
};

// Levenberg-Marquardt with Marquardt diagonal scaling and Nielsen's damping
// update, in the unconstrained coordinates.
LmResult levenberg_marquardt(const Problem& pr, const Coordinates& coords, GrowthParams start,
                             const FitOptions& options) {
  const std::size_t n = pr.t.size();
  Vec3 theta = coords.from_params(start);
  GrowthParams p = coords.to_params(theta);
  double f = sse(pr, p);
  double lambda = -1.0;
  double nu = 2.0;
  // Objective values below this are rounding noise for data scaled to 1.
  const double floor_objective = 1e-28 * static_cast<double>(n);

  for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
    Mat3 jtj = Mat3::Zero();
    Vec3 jtr = Vec3::Zero();
    const Vec3 chain = coords.chain(p);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ev = evaluate(pr.model, p, pr.t[i]);
      const Vec3 row = ev.grad.cwiseProduct(chain);
      const double r = pr.y[i] - ev.value;
      jtj.noalias() += row * row.transpose();
      jtr += row * r;
    }
    if (f <= floor_objective) return {p, f, true, iter - 1};

    const Vec3 diag = jtj.diagonal().cwiseMax(1e-12 * std::max(1.0, jtj.diagonal().maxCoeff()));
    if (lambda < 0.0) lambda = 1e-3 * diag.maxCoeff();

    Mat3 damped = jtj;
    damped.diagonal() += lambda * diag;
    const Vec3 step = damped.ldlt().solve(jtr);
    if (!step.allFinite()) return {p, f, false, iter};

    const Vec3 candidate = theta + step;
    const GrowthParams cp = coords.to_params(candidate);
    const double fc = sse(pr, cp);
    const double predicted = step.dot(lambda * diag.cwiseProduct(step) + jtr);

    if (std::isfinite(fc) && fc < f && predicted > 0.0) {
      const double rho = (f - fc) / predicted;
      const double relative = (f - fc) / f;
      theta = candidate;
      p = cp;
      f = fc;
      lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      if (relative < options.relative_tolerance) {
        // Confirm with the undamped Gauss-Newton gain before stopping.
        const Vec3 gn = jtj.completeOrthogonalDecomposition().solve(jtr);
        if (gn.dot(jtr) <= options.relative_tolerance * f || f <= floor_objective) {
          return {p, f, true, iter};
        }
      }
    } else {
      lambda *= nu;
      nu *= 2.0;
      if (lambda > 1e30 * diag.maxCoeff()) {
        // No descent direction left: a stationary point.
        return {p, f, true, iter};
      }
    }
  }
  return {p, f, false, options.max_iterations};
}

// Starting (a, b) for a fixed asymptote: linearised regression when at
// least two points allow it, otherwise a coarse grid over b.
std::optional<GrowthParams> linearised_start(const Problem& pr, double L0) {
  std::vector<double> xs, zs;
  for (std::size_t i = 0; i < pr.t.size(); ++i) {
    const double y = pr.y[i];
    if (y <= 0.0 || y >= L0) continue;
    const double z = pr.model == GrowthModel::Gompertz ? std::log(std::log(L0 / y)) : std::log(L0 / y - 1.0);
    if (!std::isfinite(z)) continue;
    xs.push_back(pr.t[i]);
    zs.push_back(z);
  }
  if (xs.size() < 2) return std::nullopt;
  const double m = static_cast<double>(xs.size());
  double sx = 0, sz = 0, sxx = 0, sxz = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sz += zs[i];
    sxx += xs[i] * xs[i];
    sxz += xs[i] * zs[i];
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) return std::nullopt;
  const double slope = (m * sxz - sx * sz) / denom;
  const double intercept = (sz - slope * sx) / m;
  const double b = -slope;
  const double a = std::exp(intercept);
  if (!(b > 0.0) || !std::isfinite(a) || !(a > 0.0)) return std::nullopt;
  return GrowthParams{L0, a, b};
}

GrowthParams grid_start(const Problem& pr, double L0) {
  // Anchor a so the curve passes through the middle observation.
  const std::size_t mid = pr.t.size() / 2;
  const double ym = std::clamp(pr.y[mid] / L0, 1e-6, 1.0 - 1e-6);
  GrowthParams best{L0, 1.0, 0.05};
  double best_f = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 20; ++k) {
    const double b = 0.05 * k;
    const double shift = safe_exp(b * pr.t[mid]);
    const double a = pr.model == GrowthModel::Gompertz ? -std::log(ym) * shift : (1.0 / ym - 1.0) * shift;
    const GrowthParams cand{L0, std::max(a, 1e-8), b};
    const double f = sse(pr, cand);
    if (f < best_f) {
      best_f = f;
      best = cand;
    }
  }
  return best;
}

double lower_mape(const std::optional<double>& m) { return m.value_or(std::numeric_limits<double>::infinity()); }

}  // namespace

std::string_view to_string(GrowthModel model) { return model == GrowthModel::Gompertz ? "gompertz" : "logistic"; }

GrowthModel parse_model(std::string_view text) {
  std::string key;
  for (char c : text) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "gompertz") return GrowthModel::Gompertz;
  if (key == "logistic") return GrowthModel::Logistic;
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown growth model '{}'", text));
}

double growth_value(GrowthModel model, const GrowthParams& p, double t) {
  const double g = safe_exp(-p.b * t);
  if (model == GrowthModel::Gompertz) return p.L * std::exp(-p.a * g);
  return p.L / (1.0 + p.a * g);
}

double sse_objective(GrowthModel model, const GrowthParams& p, std::span<const double> t, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - growth_value(model, p, t[i]);
    s += r * r;
  }
  return s;
}

std::array<double, 3> sse_gradient(GrowthModel model, const GrowthParams& p, std::span<const double> t,
                                   std::span<const double> y) {
  Vec3 g = Vec3::Zero();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto ev = evaluate(model, p, t[i]);
    g += -2.0 * (y[i] - ev.value) * ev.grad;
  }
  return {g[0], g[1], g[2]};
}

double GrowthFit::inflection_t() const { return std::log(params.a) / params.b; }

GrowthFit fit_growth(GrowthModel model, const TimeSeries& series, const FitOptions& options) {
  if (series.size() < 4) {
    throw Error(ErrorKind::InsufficientData,
                fmt::format("need at least 4 points to fit a {} curve, got {}", to_string(model), series.size()));
  }
  std::set<double> distinct;
  double ymax = 0.0;
  for (const auto& pt : series.points()) {
    distinct.insert(pt.value);
    ymax = std::max(ymax, pt.value);
  }
  if (distinct.size() < 3 || ymax <= 0.0) {
    throw Error(ErrorKind::DegenerateSeries,
                fmt::format("series has {} distinct values; at least 3 are needed", distinct.size()));
  }

  const int t0 = options.t0_year.value_or(series[0].year);
  Problem pr{model, {}, {}};
  for (const auto& pt : series.points()) {
    pr.t.push_back(static_cast<double>(pt.year - t0));
    pr.y.push_back(pt.value / ymax);
  }
  const Coordinates coords{};

  std::optional<LmResult> best;
  std::size_t total_iterations = 0;
  for (double factor : {1.05, 1.5, 2.0, 4.0, 8.0}) {
    const GrowthParams start = linearised_start(pr, factor).value_or(grid_start(pr, factor));
    const auto result = levenberg_marquardt(pr, coords, start, options);
    total_iterations += result.iterations;
    if (!best || result.objective < best->objective) best = result;
  }

  GrowthFit fit;
  fit.model = model;
  fit.params = {best->params.L * ymax, best->params.a, best->params.b};
  fit.t0_year = t0;
  fit.first_year = series[0].year;
  fit.last_year = series[series.size() - 1].year;
  fit.converged = best->converged;
  fit.iterations = total_iterations;
  fit.objective = best->objective * ymax * ymax;
  fit.metrics = goodness_of_fit(fit, series);
  return fit;
}

GrowthFit fit_gompertz(const TimeSeries& series, const FitOptions& options) {
  return fit_growth(GrowthModel::Gompertz, series, options);
}

GrowthFit fit_logistic(const TimeSeries& series, const FitOptions& options) {
  return fit_growth(GrowthModel::Logistic, series, options);
}

FitMetrics goodness_of_fit(std::span<const double> observed, std::span<const double> predicted) {
  if (observed.empty() || observed.size() != predicted.size()) {
    throw Error(ErrorKind::InvalidArgument, "goodness of fit needs equally sized, non-empty inputs");
  }
  const double n = static_cast<double>(observed.size());
  double mean = 0.0;
  for (double v : observed) mean += v;
  mean /= n;
  double ss_res = 0.0, ss_tot = 0.0, ape = 0.0;
  std::size_t ape_count = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double r = observed[i] - predicted[i];
    ss_res += r * r;
    ss_tot += (observed[i] - mean) * (observed[i] - mean);
    if (observed[i] != 0.0) {
      ape += std::abs(r) / std::abs(observed[i]);
      ++ape_count;
    }
  }
  FitMetrics m;
  m.n_points = observed.size();
  m.rmse = std::sqrt(ss_res / n);
  m.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  m.mape_excluded = observed.size() - ape_count;
  if (ape_count > 0) m.mape = 100.0 * ape / static_cast<double>(ape_count);
  return m;
}

FitMetrics goodness_of_fit(const GrowthFit& fit, const TimeSeries& series) {
  std::vector<double> obs, pred;
  for (const auto& pt : series.points()) {
    obs.push_back(pt.value);
    pred.push_back(fit.predict(pt.year));
  }
  return goodness_of_fit(obs, pred);
}

GrowthFit select_model(std::span<const GrowthFit> candidates) {
  if (candidates.empty()) throw Error(ErrorKind::InvalidArgument, "no candidate fits to select from");
  const auto better = [](const GrowthFit& x, const GrowthFit& y) {
    if (x.metrics.r_squared != y.metrics.r_squared) return x.metrics.r_squared > y.metrics.r_squared;
    if (x.metrics.rmse != y.metrics.rmse) return x.metrics.rmse < y.metrics.rmse;
    const double mx = lower_mape(x.metrics.mape), my = lower_mape(y.metrics.mape);
    if (mx != my) return mx < my;
    return x.model == GrowthModel::Gompertz && y.model != GrowthModel::Gompertz;
  };
  const GrowthFit* best = &candidates[0];
  for (const auto& c : candidates.subspan(1)) {
    if (better(c, *best)) best = &c;
  }
  return *best;
}

TimeSeries forecast(const GrowthFit& fit, int horizon_years) {
  if (horizon_years < 1) throw Error(ErrorKind::InvalidArgument, "forecast horizon must be >= 1 year");
  std::vector<SeriesPoint> points;
  points.reserve(static_cast<std::size_t>(horizon_years) + 1);
  for (int k = 0; k <= horizon_years; ++k) points.push_back({fit.t0_year + k, fit.at(k)});
  return TimeSeries(std::move(points));
}

std::string_view to_string(MaturityPhase phase) {
  switch (phase) {
    case MaturityPhase::Emerging: return "emerging";
    case MaturityPhase::Growth: return "growth";
    case MaturityPhase::Maturity: return "maturity";
    case MaturityPhase::Saturation: return "saturation";
  }
  return "unknown";
}

double year_reaching(const GrowthFit& fit, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error(ErrorKind::InvalidArgument, "fraction must lie in (0,1)");
  const auto& p = fit.params;
  const double t = fit.model == GrowthModel::Gompertz ? std::log(p.a / -std::log(fraction)) / p.b
                                                       : std::log(p.a * fraction / (1.0 - fraction)) / p.b;
  return fit.t0_year + t;
}

MaturityAssessment maturity_phase(const GrowthFit& fit, double at_year, const MaturityThresholds& thresholds) {
  if (at_year < fit.first_year) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("assessment year {} precedes the observed span starting {}", at_year, fit.first_year));
  }
  MaturityAssessment out;
  out.fraction_of_L = fit.predict(at_year) / fit.params.L;
  if (out.fraction_of_L >= thresholds.saturation) {
    out.phase = MaturityPhase::Saturation;
  } else if (out.fraction_of_L >= thresholds.maturity) {
    out.phase = MaturityPhase::Maturity;
  } else if (out.fraction_of_L >= thresholds.growth) {
    out.phase = MaturityPhase::Growth;
  } else {
    out.phase = MaturityPhase::Emerging;
  }
  out.inflection_year = fit.t0_year + fit.inflection_t();
  out.saturation_year = year_reaching(fit, 0.99);
  return out;
}

std::string fit_to_json(const GrowthFit& fit, const MaturityAssessment& maturity, double assessed_year) {
  nlohmann::ordered_json doc;
  doc["model"] = to_string(fit.model);
  doc["L"] = fit.params.L;
  doc["a"] = fit.params.a;
  doc["b"] = fit.params.b;
  doc["t0_year"] = fit.t0_year;
  doc["first_year"] = fit.first_year;
  doc["last_year"] = fit.last_year;
  doc["r2"] = fit.metrics.r_squared;
  doc["rmse"] = fit.metrics.rmse;
  doc["mape"] = fit.metrics.mape ? nlohmann::ordered_json(*fit.metrics.mape) : nlohmann::ordered_json(nullptr);
  doc["mape_excluded"] = fit.metrics.mape_excluded;
  doc["n_points"] = fit.metrics.n_points;
  doc["assessed_year"] = assessed_year;
  doc["phase"] = to_string(maturity.phase);
  doc["fraction_of_L"] = maturity.fraction_of_L;
  doc["inflection_year"] = maturity.inflection_year;
  doc["saturation_year"] = maturity.saturation_year;
  doc["converged"] = fit.converged;
  doc["iterations"] = fit.iterations;
  return doc.dump(2) + "\n";
}

std::string forecast_to_csv(const TimeSeries& forecast) {
  std::string out = "year,predicted_cumulative\n";
  for (const auto& pt : forecast.points()) out += fmt::format("{},{}\n", pt.year, pt.value);
  return out;
}

}  // namespace ipcfusion
