#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solarcast/series.hpp"

namespace solarcast::mlp {

/// Canonical form `(endo^e, N^n, P^ps, RP^pc)xHxS`: e lags of the index,
/// n of cloudiness, ps of pressure, pc of precipitation, H tanh hidden
/// neurons, S linear outputs (always 1).
struct MlpArchitecture {
    std::size_t endo = 1;
    std::size_t cloudiness = 0;
    std::size_t pressure = 0;
    std::size_t precipitation = 0;
    std::size_t hidden = 1;
    std::size_t outputs = 1;

    [[nodiscard]] std::size_t input_count() const noexcept {
        return endo + cloudiness + pressure + precipitation;
    }
    [[nodiscard]] std::size_t max_lag() const noexcept;
    [[nodiscard]] std::size_t parameter_count() const noexcept {
        return hidden * input_count() + 2 * hidden + 1;
    }
    [[nodiscard]] std::string canonical() const;
    void validate() const;

    /// Accepts ASCII (`endo^10`, `x`) and typographic (`endo¹⁰`, `×`) forms.
    static MlpArchitecture parse(std::string_view text);

    friend bool operator==(const MlpArchitecture&, const MlpArchitecture&) = default;
};

/// Per-input affine map sending the training range [lo, hi] onto [-1, 1].
/// Values outside the range are extrapolated, not clamped.
struct InputScaling {
    std::vector<double> lo;
    std::vector<double> hi;

    [[nodiscard]] bool fitted() const noexcept { return !lo.empty(); }
    [[nodiscard]] double map(std::size_t i, double v) const {
        return 2.0 * (v - lo[i]) / (hi[i] - lo[i]) - 1.0;
    }
    [[nodiscard]] double unmap(std::size_t i, double u) const {
        return lo[i] + (u + 1.0) * (hi[i] - lo[i]) / 2.0;
    }
};

/// Supervised rows: inputs at origin t, target index at t + 1.
struct Dataset {
    Eigen::MatrixXd inputs;   ///< rows = samples, raw units
    Eigen::VectorXd targets;
    std::vector<std::size_t> origins;

    [[nodiscard]] std::size_t size() const noexcept { return origins.size(); }
};

/// Input vector at origin t: index(t..t-e+1), then each exogenous channel the
/// same way, in canonical order.
std::vector<double> lagged_inputs(std::span<const double> index, const ExogenousChannels& exo,
                                  const MlpArchitecture& arch, std::size_t t);

/// Rows for every origin t in [max(first, max_lag - 1), min(end, n - 1)).
Dataset make_dataset(std::span<const double> index, const ExogenousChannels& exo, const MlpArchitecture& arch,
                     std::size_t first = 0, std::size_t end = static_cast<std::size_t>(-1));

struct EpochRecord {
    std::size_t epoch = 0;
    double train_mse = 0.0;
    double validation_error = 0.0;
    double mu = 0.0;
};

enum class StopReason { NotTrained, MaxEpochs, Goal, ValidationFail, MuMax, MinGradient };
std::string_view to_string(StopReason r);

/// Single hidden layer, tanh hidden units, linear output.
/// Parameter layout: hidden weights row-major (H × I), hidden biases (H),
/// output weights (H), output bias.
struct MlpModel {
    MlpArchitecture arch;
    Eigen::VectorXd params;
    InputScaling scaling;
    std::vector<EpochRecord> log;
    std::size_t best_epoch = 0;
    StopReason stop = StopReason::NotTrained;

    /// Forward pass on inputs already mapped to [-1, 1].
    [[nodiscard]] double output(const Eigen::Ref<const Eigen::VectorXd>& normalized) const;
    /// Forward pass over every row.
    [[nodiscard]] Eigen::VectorXd outputs(const Eigen::MatrixXd& normalized) const;
};

/// Weights uniform in [-0.5, 0.5]/√fan-in, deterministic in `seed`.
MlpModel build(const MlpArchitecture& arch, std::uint64_t seed);

/// Fits the per-column [-1, 1] map on raw training inputs.
/// Throws Error("constant_input") for a constant column.
void normalize_inputs(MlpModel& model, const Eigen::MatrixXd& raw_inputs);

/// Applies the model's scaling (identity when unfitted).
Eigen::MatrixXd normalized(const MlpModel& model, const Eigen::MatrixXd& raw_inputs);

/// ∂e_k/∂w for e_k = output_k - target_k, one row per sample, columns in
/// parameter layout order.
Eigen::MatrixXd jacobian(const MlpModel& model, const Eigen::MatrixXd& normalized_inputs);

struct TrainConfig {
    std::size_t max_fail = 5;
    double mu_initial = 1e-3;
    double mu_decrease = 0.1;
    double mu_increase = 10.0;
    double mu_max = 1e10;
    double goal = 0.0;
    std::size_t max_epochs = 1000;
    double min_gradient = 1e-10;

    void validate() const;
};

/// Validation error of a candidate model (lower is better).
using ValidationFn = std::function<double(const MlpModel&)>;

/// Levenberg-Marquardt on the mean squared error. After every epoch the
/// validation error is checked; training stops after `max_fail` epochs
/// without improving on the best one, and the best-validation weights are
/// returned. Inputs are normalised first if the model has no scaling yet.
MlpModel train_lm(MlpModel model, const Dataset& train, const ValidationFn& validation, const TrainConfig& cfg);
MlpModel train_lm(MlpModel model, const Dataset& train, const Dataset& validation, const TrainConfig& cfg);

/// Mean squared error of the model on a dataset.
double mse(const MlpModel& model, const Dataset& data);

/// Throws Error("arity_mismatch") when the input count is wrong.
double forecast_one_step(const MlpModel& model, std::span<const double> inputs);

void write_model(std::ostream& out, const MlpModel& model);
MlpModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const MlpModel& model);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace solarcast::mlp
