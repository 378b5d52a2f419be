#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace solarcast::arma {

/// (1 - Σ φ_i L^i)(x_t - mean) = (1 + Σ θ_i L^i) ε_t
struct ArmaModel {
    std::size_t p = 0;
    std::size_t q = 0;
    std::vector<double> phi;
    std::vector<double> theta;
    double mean = 0.0;
    double loss = 0.0;  ///< mean squared one-step residual on the fitting series
    double fpe = 0.0;   ///< loss · (n + k)/(n - k), k = p + q
    std::size_t sample_size = 0;
};

/// Yule-Walker fit on the mean-centred series. For q > 0 the MA part comes
/// from the innovations algorithm applied to the AR residuals.
/// Throws Error("series_too_short"), Error("zero_variance"),
/// Error("singular_toeplitz") or Error("nonstationary").
ArmaModel fit_yule_walker(std::span<const double> x, std::size_t p, std::size_t q = 0);

/// True when every root of 1 - Σ φ_i z^i lies outside the unit circle.
bool is_stationary(std::span<const double> phi);

/// One-step residuals ε_t = x_t - x̂_t, with pre-sample residuals taken as 0
/// and the first p residuals left at 0.
std::vector<double> residuals(const ArmaModel& model, std::span<const double> x);

/// x̂(t+1) from the most recent values and residuals (latest last).
/// Throws Error("insufficient_history").
double forecast_one_step(const ArmaModel& model, std::span<const double> recent_values,
                         std::span<const double> recent_residuals = {});

/// Streaming one-step forecaster that keeps its own residual history.
class Forecaster {
public:
    explicit Forecaster(ArmaModel model);

    /// Forecast for the next sample; requires p observed values.
    [[nodiscard]] double predict() const;
    [[nodiscard]] bool ready() const noexcept { return values_.size() >= model_.p; }
    /// Feeds the realised value, updating the residual history.
    void observe(double value);

private:
    ArmaModel model_;
    std::deque<double> values_;
    std::deque<double> residuals_;
};

struct Candidate {
    std::size_t p = 0;
    std::size_t q = 0;
    double fpe = 0.0;
};

struct OrderSelection {
    ArmaModel model;
    std::vector<Candidate> candidates;
    bool residuals_white = false;
    std::size_t whiteness_violations = 0;  ///< residual |ρ_i| above 1.96/√n, i ≤ 20
};

/// Grid search over p = 1..p_max, q = 0..q_max minimising the FPE; the first
/// (smallest) model wins ties. Falls back to (1, 0) if nothing fits.
OrderSelection select_order(std::span<const double> x, std::size_t p_max = 5, std::size_t q_max = 2);

void write_model(std::ostream& out, const ArmaModel& model);
ArmaModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const ArmaModel& model);
ArmaModel load_model(const std::filesystem::path& path);

}  // namespace solarcast::arma
