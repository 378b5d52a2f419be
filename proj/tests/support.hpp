#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "solarcast/ingest.hpp"
#include "solarcast/series.hpp"
#include "solarcast/solar_geometry.hpp"
#include "solarcast/station.hpp"
#include "solarcast/synth.hpp"

namespace testing {

/// x_t = Σ φ_i x_{t-i} + σ ε_t after a burn-in.
inline std::vector<double> ar_series(std::span<const double> phi, std::size_t n, std::uint64_t seed,
                                     double sigma = 1.0, double mean = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    const std::size_t burn = 2000;
    std::vector<double> x(n + burn, 0.0);
    for (std::size_t t = 0; t < x.size(); ++t) {
        double v = g(rng);
        for (std::size_t i = 0; i < phi.size() && i < t; ++i) v += phi[i] * x[t - 1 - i];
        x[t] = v;
    }
    std::vector<double> out(x.begin() + static_cast<long>(burn), x.end());
    for (double& v : out) v += mean;
    return out;
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed) { return ar_series({}, n, seed); }

/// Last coefficient of an order-k autoregression fitted by least squares on
/// the mean-centred series padded with k zeros at both ends.
inline double padded_regression_pacf(std::span<const double> x, std::size_t k) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    const auto n = static_cast<long>(x.size());
    const auto kk = static_cast<long>(k);
    auto at = [&](long t) { return t >= 0 && t < n ? x[static_cast<std::size_t>(t)] - m : 0.0; };
    Eigen::MatrixXd a(n + kk, kk);
    Eigen::VectorXd y(n + kk);
    for (long t = 0; t < n + kk; ++t) {
        y(t) = at(t);
        for (long j = 1; j <= kk; ++j) a(t, j - 1) = at(t - j);
    }
    const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(y);
    return beta(kk - 1);
}

/// Hourly series whose daytime radiation is exactly the clear-sky model.
inline solarcast::HourlySeries clearsky_series(const solarcast::StationMeta& meta, int first_year, int years) {
    namespace chr = std::chrono;
    solarcast::HourlySeries s;
    s.station_id = meta.id;
    const auto begin = solarcast::make_timestamp(first_year, 1, 1, 0);
    const auto end = solarcast::make_timestamp(first_year + years, 1, 1, 0);
    for (auto ts = begin; ts < end; ts += chr::hours(1)) {
        const auto inst = solarcast::solar::sample_instant(meta, ts);
        s.timestamps.push_back(ts);
        s.radiation.push_back(inst.sin_elevation > 0.0 ? solarcast::solar::clearsky_ghi(meta, inst) : 0.0);
    }
    s.repaired.assign(s.size(), 0);
    return s;
}

/// Synthetic scenario without day-level weather, constant mean and scale.
inline solarcast::synth::Scenario flat_scenario(double phi, double sigma, double mean, int years,
                                                std::uint64_t seed) {
    solarcast::synth::Scenario sc;
    sc.phi = phi;
    sc.sigma_summer = sc.sigma_winter = sigma;
    sc.mean_summer = sc.mean_winter = mean;
    sc.weather_sigma = 0.0;
    sc.years = years;
    sc.seed = seed;
    return sc;
}

inline solarcast::HourlySeries daytime(const solarcast::synth::Scenario& sc) {
    return solarcast::ingest::daytime_filter(solarcast::synth::generate(sc), sc.truth());
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("solarcast_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace testing
