#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "solarcast/error.hpp"
#include "solarcast/mlp.hpp"
#include "support.hpp"

using namespace solarcast;
using mlp::MlpArchitecture;

namespace {

std::string code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

// Rows x ~ U(-1, 1) with target f(x).
mlp::Dataset sample(std::size_t n, std::size_t inputs, std::uint64_t seed, auto&& f) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    mlp::Dataset d;
    d.inputs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(inputs));
    d.targets.resize(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(inputs));
        for (auto& v : x) v = u(rng);
        d.inputs.row(static_cast<Eigen::Index>(r)) = x.transpose();
        d.targets(static_cast<Eigen::Index>(r)) = f(x);
        d.origins.push_back(r);
    }
    return d;
}

double fd_relative_error(const mlp::MlpModel& m, const Eigen::MatrixXd& u) {
    const Eigen::MatrixXd j = mlp::jacobian(m, u);
    Eigen::MatrixXd fd(j.rows(), j.cols());
    const double h = 1e-6;
    for (Eigen::Index c = 0; c < m.params.size(); ++c) {
        auto plus = m, minus = m;
        plus.params(c) += h;
        minus.params(c) -= h;
        fd.col(c) = (plus.outputs(u) - minus.outputs(u)) / (2 * h);
    }
    return (j - fd).norm() / j.norm();
}

}  // namespace

TEST_SUITE("mlp") {

TEST_CASE("architecture strings parse in typographic and ASCII forms") {
    const auto a = MlpArchitecture::parse("(endo¹⁰, N², P¹, RP¹)×15×1");
    CHECK(a.endo == 10);
    CHECK(a.cloudiness == 2);
    CHECK(a.pressure == 1);
    CHECK(a.precipitation == 1);
    CHECK(a.hidden == 15);
    CHECK(a.input_count() == 14);
    CHECK(a.max_lag() == 10);
    CHECK(MlpArchitecture::parse("(endo^10, N^2, P^1, RP^1)x15x1") == a);

    const auto m = mlp::build(a, 1);
    CHECK(m.params.size() == static_cast<Eigen::Index>(15 * 14 + 15 + 15 + 1));

    const auto tiny = MlpArchitecture::parse("(endo¹)×1×1");
    CHECK(tiny.input_count() == 1);
    CHECK(tiny.hidden == 1);
    CHECK(mlp::build(tiny, 3).params.size() == 4);
    CHECK(MlpArchitecture::parse("(endo, N)X3X1").cloudiness == 1);
}

TEST_CASE("canonical form round trips") {
    for (const char* text : {"(endo^10, N^2, P^1, RP^1)x15x1", "(endo^1)x1x1", "(endo^3, RP^4)x7x1",
                             "(endo^12, P^2)x20x1"}) {
        const auto a = MlpArchitecture::parse(text);
        CHECK(a.canonical() == text);
        CHECK(MlpArchitecture::parse(a.canonical()) == a);
    }
}

TEST_CASE("malformed architectures are rejected") {
    for (const char* text : {"", "endo^3x1x1", "(N^2)x3x1", "(endo^3)x0x1", "(endo^0)x3x1", "(endo^3)x3x2",
                             "(endo^3, Q^1)x3x1", "(endo^3)x3", "(endo^3)x3x1x1"})
        CHECK(code_of([&] { MlpArchitecture::parse(text); }) == "bad_architecture");
}

TEST_CASE("same seed gives identical weights") {
    const auto a = MlpArchitecture::parse("(endo^4, N^1)x6x1");
    CHECK(mlp::build(a, 9).params == mlp::build(a, 9).params);
    CHECK(mlp::build(a, 9).params != mlp::build(a, 10).params);
    const auto m = mlp::build(a, 9);
    for (Eigen::Index i = 0; i < 6 * 5 + 6; ++i) CHECK(std::abs(m.params(i)) <= 0.5 / std::sqrt(5.0));
    for (Eigen::Index i = 6 * 5 + 6; i < m.params.size(); ++i) CHECK(std::abs(m.params(i)) <= 0.5 / std::sqrt(6.0));
}

TEST_CASE("input normalization maps the training range onto [-1, 1]") {
    auto m = mlp::build(MlpArchitecture::parse("(endo^1)x1x1"), 1);
    Eigen::MatrixXd raw(2, 1);
    raw << 0.0, 10.0;
    mlp::normalize_inputs(m, raw);
    CHECK(m.scaling.map(0, 0.0) == -1.0);
    CHECK(m.scaling.map(0, 10.0) == 1.0);
    CHECK(m.scaling.map(0, 5.0) == 0.0);
    CHECK(m.scaling.map(0, 20.0) == 3.0);
    CHECK(m.scaling.unmap(0, m.scaling.map(0, 7.25)) == doctest::Approx(7.25).epsilon(1e-15));
    Eigen::MatrixXd probe(1, 1);
    probe << 20.0;
    CHECK(mlp::normalized(m, probe)(0, 0) == 3.0);

    Eigen::MatrixXd flat(3, 1);
    flat << 2.0, 2.0, 2.0;
    CHECK(code_of([&] { mlp::normalize_inputs(m, flat); }) == "constant_input");
}

TEST_CASE("lagged inputs follow the canonical order") {
    const std::vector<double> idx{0.0, 0.1, 0.2, 0.3, 0.4};
    ExogenousChannels exo;
    exo.cloudiness = std::vector<double>{10, 11, 12, 13, 14};
    exo.precipitation = std::vector<double>{20, 21, 22, 23, 24};
    const auto a = MlpArchitecture::parse("(endo^3, N^2, RP^1)x2x1");
    CHECK(mlp::lagged_inputs(idx, exo, a, 3) == std::vector<double>{0.3, 0.2, 0.1, 13, 12, 23});
    CHECK(code_of([&] { mlp::lagged_inputs(idx, exo, a, 1); }) == "insufficient_history");
    CHECK(code_of([&] { mlp::lagged_inputs(idx, exo, MlpArchitecture::parse("(endo^1, P^1)x2x1"), 3); }) ==
          "missing_channel");

    const auto d = mlp::make_dataset(idx, exo, a);
    CHECK(d.size() == 2);
    CHECK(d.origins == std::vector<std::size_t>{2, 3});
    CHECK(d.targets(1) == 0.4);
    const auto part = mlp::make_dataset(idx, exo, a, 3, 4);
    CHECK(part.origins == std::vector<std::size_t>{3});
}

TEST_CASE("analytic Jacobian matches central differences") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const MlpArchitecture a{1 + seed % 4, seed % 3, seed % 2, 0, 1 + seed % 6, 1};
        auto m = mlp::build(a, seed);
        for (auto& w : m.params) w *= 4.0;
        Eigen::MatrixXd x(7, static_cast<Eigen::Index>(a.input_count()));
        for (auto& v : x.reshaped()) v = u(rng);
        CHECK(fd_relative_error(m, x) < 1e-5);
    }
}

TEST_CASE("Jacobian limits") {
    auto m = mlp::build(MlpArchitecture::parse("(endo^2)x3x1"), 1);
    m.params.setZero();
    m.params(m.params.size() - 1) = 0.7;
    const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(2, 2);
    CHECK(m.outputs(zeros)(0) == 0.7);
    const auto j = mlp::jacobian(m, zeros);
    CHECK(j(0, j.cols() - 1) == 1.0);

    auto hot = mlp::build(MlpArchitecture::parse("(endo^2)x3x1"), 2);
    for (Eigen::Index i = 0; i < 3 * 2 + 3; ++i) hot.params(i) = 1000.0;
    Eigen::MatrixXd x(1, 2);
    x << 0.5, 0.4;
    const auto jh = mlp::jacobian(hot, x);
    for (Eigen::Index c = 0; c < 3 * 2 + 3; ++c) CHECK(std::abs(jh(0, c)) < 1e-12);
}

TEST_CASE("forward pass cases") {
    auto m = mlp::build(MlpArchitecture::parse("(endo^1)x1x1"), 1);
    m.params << 0.01, 0.0, 1.0, 0.0;
    for (double x : {-0.5, -0.1, 0.2, 0.5}) {
        CHECK(mlp::forecast_one_step(m, std::vector<double>{x}) == doctest::Approx(0.01 * x).epsilon(1e-6));
    }
    m.params.setZero();
    m.params(3) = -0.25;
    CHECK(mlp::forecast_one_step(m, std::vector<double>{123.0}) == -0.25);

    const auto big = mlp::build(MlpArchitecture::parse("(endo^10, N^2, P^1, RP^1)x15x1"), 1);
    CHECK(code_of([&] { mlp::forecast_one_step(big, std::vector<double>(13, 0.0)); }) == "arity_mismatch");
    for (double scale : {1.0, 1e3, 1e8}) {
        const double y = mlp::forecast_one_step(big, std::vector<double>(14, scale));
        CHECK(std::isfinite(y));
        CHECK(std::abs(y) <= big.params.tail(16).cwiseAbs().sum());
    }
}

TEST_CASE("LM fits a noiseless representable target") {
    auto f = [](const Eigen::VectorXd& x) { return 0.3 * x(0) + 0.1; };
    const auto train = sample(200, 1, 1, f);
    const auto val = sample(50, 1, 2, f);
    mlp::TrainConfig cfg;
    cfg.max_epochs = 200;
    const auto m = mlp::train_lm(mlp::build(MlpArchitecture::parse("(endo^1)x1x1"), 3), train, val, cfg);
    CHECK(mlp::mse(m, train) < 1e-4);
    CHECK(m.log.size() <= 201);
}

TEST_CASE("a met goal stops before the first epoch") {
    const auto d = sample(30, 2, 3, [](const Eigen::VectorXd& x) { return x(0); });
    mlp::TrainConfig cfg;
    cfg.goal = std::numeric_limits<double>::infinity();
    const auto start = mlp::build(MlpArchitecture::parse("(endo^2)x2x1"), 1);
    const auto m = mlp::train_lm(start, d, d, cfg);
    CHECK(m.stop == mlp::StopReason::Goal);
    CHECK(m.log.size() == 1);
    CHECK(m.best_epoch == 0);
    CHECK(m.params == start.params);
}

TEST_CASE("validation getting worse from the first epoch returns the initial weights") {
    const auto d = sample(60, 2, 4, [](const Eigen::VectorXd& x) { return std::sin(3 * x(0)) * x(1); });
    const auto start = mlp::build(MlpArchitecture::parse("(endo^2)x3x1"), 2);
    int calls = 0;
    const auto m = mlp::train_lm(start, d, [&](const mlp::MlpModel&) { return static_cast<double>(calls++); },
                                 mlp::TrainConfig{});
    CHECK(m.stop == mlp::StopReason::ValidationFail);
    CHECK(m.best_epoch == 0);
    CHECK(m.log.back().epoch == 5);
    CHECK(m.log.back().epoch <= 6);
    CHECK(m.params == start.params);
}

TEST_CASE("early stopping keeps the best validation epoch") {
    const auto d = sample(80, 2, 6, [](const Eigen::VectorXd& x) { return std::sin(3 * x(0)) * x(1); });
    const std::vector<double> schedule{1.0, 0.9, 0.8, 1.1, 1.2, 0.85, 1.3, 1.4, 0.1, 0.1};
    std::vector<Eigen::VectorXd> seen;
    const auto m = mlp::train_lm(mlp::build(MlpArchitecture::parse("(endo^2)x4x1"), 1), d,
                                 [&](const mlp::MlpModel& c) {
                                     seen.push_back(c.params);
                                     return schedule[seen.size() - 1];
                                 },
                                 mlp::TrainConfig{});
    CHECK(m.best_epoch == 2);
    CHECK(m.log.back().epoch == 7);
    CHECK(m.stop == mlp::StopReason::ValidationFail);
    REQUIRE(seen.size() == 8);
    CHECK(m.params == seen[2]);
    for (const auto& r : m.log)
        if (r.epoch > m.best_epoch) CHECK(m.log[m.best_epoch].validation_error <= r.validation_error);
}

TEST_CASE("training is bitwise reproducible") {
    auto f = [](const Eigen::VectorXd& x) { return std::tanh(x(0) - 0.5 * x(1)) + 0.1 * x(2); };
    const auto train = sample(120, 3, 7, f), val = sample(40, 3, 8, f);
    const auto arch = MlpArchitecture::parse("(endo^3)x5x1");
    mlp::TrainConfig cfg;
    cfg.max_epochs = 50;
    const auto a = mlp::train_lm(mlp::build(arch, 4), train, val, cfg);
    const auto b = mlp::train_lm(mlp::build(arch, 4), train, val, cfg);
    CHECK(a.params == b.params);
    CHECK(a.best_epoch == b.best_epoch);
    std::ostringstream sa, sb;
    mlp::write_model(sa, a);
    mlp::write_model(sb, b);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("returned validation error is no worse than any later epoch") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto f = [](const Eigen::VectorXd& x) { return std::sin(2 * x(0)) + 0.3 * x(1); };
        auto noisy = sample(60, 2, seed, f);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, 0.3);
        for (auto& t : noisy.targets) t += g(rng);
        const auto val = sample(60, 2, seed + 100, f);
        const auto m = mlp::train_lm(mlp::build(MlpArchitecture::parse("(endo^2)x12x1"), seed), noisy, val,
                                     mlp::TrainConfig{});
        const double best = m.log[m.best_epoch].validation_error;
        CHECK(mlp::mse(m, val) == doctest::Approx(best).epsilon(1e-12));
        for (const auto& r : m.log)
            if (r.epoch > m.best_epoch) CHECK(best <= r.validation_error);
    }
}

TEST_CASE("training preconditions") {
    const auto d = sample(10, 1, 1, [](const Eigen::VectorXd& x) { return x(0); });
    mlp::TrainConfig bad;
    bad.max_fail = 0;
    const auto m = mlp::build(MlpArchitecture::parse("(endo^1)x1x1"), 1);
    CHECK(code_of([&] { mlp::train_lm(m, d, d, bad); }) == "bad_config");
    CHECK(code_of([&] { mlp::train_lm(m, mlp::Dataset{}, d, mlp::TrainConfig{}); }) == "empty_dataset");
    CHECK(code_of([&] {
              mlp::train_lm(m, d, [](const mlp::MlpModel&) { return std::nan(""); }, mlp::TrainConfig{});
          }) == "diverged");
}

TEST_CASE("models serialize losslessly") {
    auto f = [](const Eigen::VectorXd& x) { return x(0) * x(1); };
    const auto d = sample(50, 2, 9, f);
    mlp::TrainConfig cfg;
    cfg.max_epochs = 5;
    const auto m = mlp::train_lm(mlp::build(MlpArchitecture::parse("(endo^1, N^1)x3x1"), 1), d, d, cfg);
    std::stringstream io;
    mlp::write_model(io, m);
    const auto back = mlp::read_model(io);
    CHECK(back.arch == m.arch);
    CHECK(back.params == m.params);
    CHECK(back.scaling.lo == m.scaling.lo);
    CHECK(back.best_epoch == m.best_epoch);
    CHECK(back.stop == m.stop);
    CHECK(back.log.size() == m.log.size());
    CHECK(mlp::forecast_one_step(back, std::vector<double>{0.3, -0.2}) ==
          mlp::forecast_one_step(m, std::vector<double>{0.3, -0.2}));
    std::istringstream wrong("solarcast-mlp 0\n");
    CHECK(code_of([&] { mlp::read_model(wrong); }) == "schema_mismatch");
}

}  // TEST_SUITE
