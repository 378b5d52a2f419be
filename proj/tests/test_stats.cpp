#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "solarcast/error.hpp"
#include "solarcast/stats.hpp"
#include "support.hpp"

using namespace solarcast;

namespace {

std::string code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("white noise has no autocorrelation") {
    const auto x = testing::white_noise(10000, 5);
    for (double r : stats::acf(x, 20)) CHECK(std::abs(r) < 0.05);
}

TEST_CASE("constant series has no autocorrelation to speak of") {
    const std::vector<double> x(100, 3.0);
    CHECK(code_of([&] { stats::acf(x, 5); }) == "zero_variance");
    CHECK(code_of([&] { stats::acf(std::vector<double>{1, 2, 3}, 3); }) == "series_too_short");
}

TEST_CASE("AR(1) autocorrelations decay geometrically") {
    const std::vector<double> phi{0.5};
    const auto r = stats::acf(testing::ar_series(phi, 10000, 9), 3);
    CHECK(std::abs(r[0] - 0.5) < 0.03);
    CHECK(std::abs(r[1] - 0.25) < 0.03);
    CHECK(std::abs(r[2] - 0.125) < 0.03);
}

TEST_CASE("autocorrelations are bounded") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1, 1);
        std::vector<double> x(50);
        for (double& v : x) v = u(rng);
        for (double r : stats::acf(x, 49)) CHECK(std::abs(r) <= 1.0);
    }
}

TEST_CASE("partial autocorrelation hand cases") {
    CHECK(stats::pacf(std::vector<double>{0.5}) == std::vector<double>{0.5});
    const auto p = stats::pacf(std::vector<double>{0.5, 0.25});
    CHECK(p[0] == 0.5);
    CHECK(std::abs(p[1]) < 1e-15);
    // rho = (0.8, 0.5): phi22 = (0.5 - 0.64)/(1 - 0.64)
    CHECK(stats::pacf(std::vector<double>{0.8, 0.5})[1] == doctest::Approx(-0.14 / 0.36).epsilon(1e-14));
    CHECK(code_of([] { stats::pacf(std::vector<double>{1.0, 1.0}); }) == "singular_recursion");
    CHECK(code_of([] { stats::pacf(std::vector<double>{}); }) == "empty_series");
}

TEST_CASE("first partial autocorrelation equals the first autocorrelation") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto x = testing::ar_series(std::vector<double>{0.3, 0.2}, 2000, seed);
        const auto p = stats::correlation_profile(x, 8);
        CHECK(p.pacf[0] == p.acf[0]);
        for (double v : p.pacf) CHECK(std::abs(v) <= 1.0);
    }
}

TEST_CASE("partial autocorrelation matches least-squares regression") {
    const auto x = testing::ar_series(std::vector<double>{0.4176, 0.1350}, 10000, 3);
    const auto p = stats::pacf(stats::acf(x, 6));
    for (std::size_t k = 1; k <= 6; ++k) CHECK(std::abs(p[k - 1] - testing::padded_regression_pacf(x, k)) < 1e-6);
}

TEST_CASE("AR(1) partial autocorrelations vanish beyond lag one") {
    const auto x = testing::ar_series(std::vector<double>{0.6}, 10000, 21);
    const auto p = stats::pacf(stats::acf(x, 8));
    CHECK(std::abs(p[0] - 0.6) < 0.03);
    for (std::size_t k = 2; k <= 8; ++k) {
        CHECK(std::abs(p[k - 1]) < 0.03);
        CHECK(std::abs(testing::padded_regression_pacf(x, k)) < 0.03);
    }
}

TEST_CASE("Levinson-Durbin solves the Yule-Walker system") {
    const std::vector<double> rho{0.6, 0.3, 0.1};
    double ratio = 0.0;
    const auto phi = stats::levinson_durbin(rho, &ratio);
    // Toeplitz check: rho_k = sum_j phi_j rho_|k-j|
    auto r = [&](int k) { return k == 0 ? 1.0 : rho[static_cast<std::size_t>(std::abs(k)) - 1]; };
    for (int k = 1; k <= 3; ++k) {
        double s = 0.0;
        for (int j = 1; j <= 3; ++j) s += phi[static_cast<std::size_t>(j - 1)] * r(k - j);
        CHECK(s == doctest::Approx(r(k)).epsilon(1e-13));
    }
    CHECK(ratio == doctest::Approx(1.0 - phi[0] * rho[0] - phi[1] * rho[1] - phi[2] * rho[2]).epsilon(1e-13));
}

TEST_CASE("pearson hand cases") {
    const std::vector<double> x{1, 2, 3}, y{1, 0, 1};
    CHECK(stats::pearson(x, x) == doctest::Approx(1.0));
    CHECK(stats::pearson(x, std::vector<double>{-1, -2, -3}) == doctest::Approx(-1.0));
    CHECK(std::abs(stats::pearson(x, y)) < 1e-15);
    CHECK(code_of([&] { stats::pearson(x, std::vector<double>{2, 2, 2}); }) == "zero_variance");
    CHECK(code_of([&] { stats::pearson(x, std::vector<double>{1, 2}); }) == "length_mismatch");
}

TEST_CASE("pearson is symmetric, affine invariant and bounded") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(30), y(30);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = g(rng);
            y[i] = 0.4 * x[i] + g(rng);
        }
        const double r = stats::pearson(x, y);
        CHECK(std::abs(r) <= 1.0);
        CHECK(stats::pearson(y, x) == doctest::Approx(r).epsilon(1e-13));
        const double a = trial % 2 == 0 ? 3.5 : -0.25, b = 7.0;
        std::vector<double> ax(x.size());
        std::transform(x.begin(), x.end(), ax.begin(), [&](double v) { return a * v + b; });
        CHECK(stats::pearson(ax, y) == doctest::Approx((a > 0 ? 1 : -1) * r).epsilon(1e-12));
    }
}

TEST_CASE("significance bound") {
    CHECK(stats::significance_bound(10000) == doctest::Approx(1.959963984540054 / 100.0).epsilon(1e-12));
    CHECK(stats::significance_bound(1001) < 0.1);
    CHECK(code_of([] { stats::significance_bound(0); }) == "empty_series");
    CHECK(code_of([] { stats::significance_bound(10, 1.5); }) == "bad_alpha");
}

TEST_CASE("endogenous lag selection") {
    const auto ar = testing::ar_series(std::vector<double>{0.5435}, 5000, 17, 0.1, 0.7);
    const auto lags = stats::select_endogenous_lags(stats::correlation_profile(ar, 24));
    REQUIRE_FALSE(lags.empty());
    CHECK(lags.front() == 1);

    const auto noise = testing::white_noise(5000, 4);
    auto profile = stats::correlation_profile(noise, 10);
    profile.significance_bound = 0.2;
    CHECK(code_of([&] { stats::select_endogenous_lags(profile); }) == "no_significant_lags");

    stats::CorrelationProfile strong;
    strong.acf.assign(15, 0.999);
    strong.pacf = strong.acf;
    strong.sample_size = 1000;
    strong.significance_bound = 0.06;
    const auto all = stats::select_endogenous_lags(strong, 10);
    CHECK(all == std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    CHECK(stats::select_endogenous_lags(strong, 4, stats::LagBasis::Pacf).size() == 4);
}

TEST_CASE("raising the significance bound never enlarges the selection") {
    const auto x = testing::ar_series(std::vector<double>{0.3, 0.25}, 3000, 8);
    auto profile = stats::correlation_profile(x, 12);
    std::vector<std::size_t> previous = stats::select_endogenous_lags(profile, 12);
    for (double bound = profile.significance_bound; bound < 1.0; bound += 0.01) {
        profile.significance_bound = bound;
        std::vector<std::size_t> now;
        try {
            now = stats::select_endogenous_lags(profile, 12);
        } catch (const Error&) {
        }
        CHECK(std::includes(previous.begin(), previous.end(), now.begin(), now.end()));
        previous = now;
    }
}

TEST_CASE("exogenous lag selection") {
    const auto x = testing::white_noise(5000, 31);
    ExogenousChannels ch;
    std::vector<double> cloud(x.size()), noise = testing::white_noise(5000, 32), weak(x.size());
    // Sample correlation of weak with x is exactly 0.18: noise is centred,
    // made orthogonal to x and both are scaled to unit norm.
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Eigen::VectorXd> nv(noise.data(), static_cast<Eigen::Index>(noise.size()));
    const Eigen::VectorXd xc = (xv.array() - xv.mean()).matrix().normalized();
    nv = (nv.array() - nv.mean()).matrix();
    nv -= nv.dot(xc) * xc;
    nv.normalize();
    for (std::size_t i = 0; i < x.size(); ++i) {
        cloud[i] = 8.0 * (1.0 - x[i]);
        weak[i] = 0.18 * xc(static_cast<Eigen::Index>(i)) + std::sqrt(1.0 - 0.18 * 0.18) * noise[i];
    }
    ch.cloudiness = cloud;
    ch.pressure = noise;
    ch.precipitation = weak;

    const auto r = stats::lagged_correlations(x, cloud, 2);
    CHECK(r[0] == doctest::Approx(-1.0));

    CHECK(stats::lagged_correlations(x, weak, 1)[0] == doctest::Approx(0.18).epsilon(1e-12));

    const auto sel = stats::select_exogenous_lags(x, ch);
    CHECK(sel.cloudiness == 1);
    CHECK(sel.pressure == 0);
    CHECK(sel.precipitation == 1);

    stats::ExogenousThresholds strict;
    strict.pressure = strict.precipitation = 0.21;
    const auto none = stats::select_exogenous_lags(x, ch, strict);
    CHECK(none.pressure == 0);
    CHECK(none.precipitation == 0);

    ExogenousChannels misaligned;
    misaligned.pressure = std::vector<double>(10, 1.0);
    CHECK(code_of([&] { stats::select_exogenous_lags(x, misaligned); }) == "length_mismatch");
}

TEST_CASE("exogenous lags form a contiguous prefix") {
    const auto x = testing::ar_series(std::vector<double>{0.9}, 5000, 41);
    ExogenousChannels ch;
    ch.cloudiness = x;  // correlation decays as 0.9^k
    stats::ExogenousThresholds th;
    th.cloudiness = 0.5;
    const auto r = stats::lagged_correlations(x, *ch.cloudiness, 10);
    std::size_t expected = 0;
    while (expected < r.size() && std::abs(r[expected]) >= 0.5) ++expected;
    CHECK(stats::select_exogenous_lags(x, ch, th).cloudiness == std::min<std::size_t>(expected, 10));
    CHECK(expected >= 5);
}

TEST_CASE("correlation profile CSV") {
    const auto p = stats::correlation_profile(testing::white_noise(500, 1), 3);
    std::ostringstream out;
    stats::write_profile_csv(out, p);
    const auto text = out.str();
    CHECK(text.rfind("lag,acf,pacf,bound\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

}  // TEST_SUITE
