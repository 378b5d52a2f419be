#include "solarcast/arma.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "solarcast/error.hpp"
#include "solarcast/stats.hpp"

namespace solarcast::arma {

namespace {

std::vector<double> autocovariance(std::span<const double> x, double m, std::size_t max_lag) {
    std::vector<double> g(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t t = k; t < x.size(); ++t) s += (x[t] - m) * (x[t - k] - m);
        g[k] = s / static_cast<double>(x.size());
    }
    return g;
}

// Innovations algorithm (Brockwell & Davis); returns θ_{m,1..q}.
std::vector<double> innovations_ma(std::span<const double> gamma, std::size_t m, std::size_t q) {
    std::vector<std::vector<double>> th(m + 1);
    std::vector<double> v(m + 1, 0.0);
    v[0] = gamma[0];
    for (std::size_t n = 1; n <= m; ++n) {
        th[n].assign(n + 1, 0.0);  // th[n][j] = θ_{n,j}
        for (std::size_t k = 0; k < n; ++k) {
            double s = gamma[n - k];
            for (std::size_t j = 0; j < k; ++j) s -= th[k][k - j] * th[n][n - j] * v[j];
            if (!(v[k] > 0.0)) throw Error("singular_toeplitz", "innovations variance collapsed");
            th[n][n - k] = s / v[k];
        }
        double vn = gamma[0];
        for (std::size_t j = 0; j < n; ++j) vn -= th[n][n - j] * th[n][n - j] * v[j];
        v[n] = vn;
    }
    return {th[m].begin() + 1, th[m].begin() + 1 + static_cast<std::ptrdiff_t>(q)};
}

}  // namespace

bool is_stationary(std::span<const double> phi) {
    const auto p = static_cast<Eigen::Index>(phi.size());
    if (p == 0) return true;
    // Roots of 1 - Σφ z^i outside the unit circle ⇔ companion eigenvalues inside.
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) c(0, i) = phi[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 1; i < p; ++i) c(i, i - 1) = 1.0;
    const Eigen::VectorXcd ev = c.eigenvalues();
    for (Eigen::Index i = 0; i < p; ++i)
        if (!(std::abs(ev(i)) < 1.0)) return false;
    return true;
}

std::vector<double> residuals(const ArmaModel& model, std::span<const double> x) {
    std::vector<double> e(x.size(), 0.0);
    for (std::size_t t = model.p; t < x.size(); ++t) {
        double pred = model.mean;
        for (std::size_t i = 1; i <= model.p; ++i) pred += model.phi[i - 1] * (x[t - i] - model.mean);
        for (std::size_t j = 1; j <= model.q && j <= t; ++j) pred += model.theta[j - 1] * e[t - j];
        e[t] = x[t] - pred;
    }
    return e;
}

ArmaModel fit_yule_walker(std::span<const double> x, std::size_t p, std::size_t q) {
    if (p + q == 0) throw Error("bad_order", "ARMA order must be at least (1,0) or (0,1)");
    const std::size_t n = x.size();
    if (n < 10 * (p + q) || n < 3)
        throw Error("series_too_short", "Yule-Walker needs at least 10·(p+q) samples");

    ArmaModel m;
    m.p = p;
    m.q = q;
    m.mean = stats::mean(x);
    if (p == 0) (void)stats::acf(x, 1);  // rejects a constant series
    if (p > 0) {
        const auto rho = stats::acf(x, p);
        try {
            m.phi = stats::levinson_durbin(rho);
        } catch (const Error&) {
            throw Error("singular_toeplitz", "Yule-Walker Toeplitz system is singular");
        }
        if (!is_stationary(m.phi)) throw Error("nonstationary", "fitted AR polynomial is not stationary");
    }

    if (q > 0) {
        ArmaModel ar = m;
        ar.q = 0;
        const auto e = residuals(ar, x);
        std::span<const double> tail(e.begin() + static_cast<std::ptrdiff_t>(p), e.end());
        const std::size_t order = std::max<std::size_t>(q, std::min<std::size_t>(20, tail.size() / 10));
        const auto ge = autocovariance(tail, 0.0, order);
        if (!(ge[0] > 0.0)) throw Error("zero_variance", "AR residuals have zero variance");
        m.theta = innovations_ma(ge, order, q);
    }

    const auto e = residuals(m, x);
    double ss = 0.0;
    for (std::size_t t = p; t < n; ++t) ss += e[t] * e[t];
    const auto used = static_cast<double>(n - p);
    m.sample_size = n - p;
    m.loss = ss / used;
    if (!std::isfinite(m.loss)) throw Error("nonstationary", "ARMA residual recursion diverged");
    const auto k = static_cast<double>(p + q);
    m.fpe = m.loss * (used + k) / (used - k);
    return m;
}

double forecast_one_step(const ArmaModel& model, std::span<const double> values,
                         std::span<const double> res) {
    if (values.size() < model.p || res.size() < model.q)
        throw Error("insufficient_history", "ARMA forecast needs p recent values and q residuals");
    double pred = model.mean;
    for (std::size_t i = 1; i <= model.p; ++i)
        pred += model.phi[i - 1] * (values[values.size() - i] - model.mean);
    for (std::size_t j = 1; j <= model.q; ++j) pred += model.theta[j - 1] * res[res.size() - j];
    return pred;
}

Forecaster::Forecaster(ArmaModel model) : model_(std::move(model)) {}

double Forecaster::predict() const {
    if (!ready()) throw Error("insufficient_history", "ARMA forecaster is not warm yet");
    double pred = model_.mean;
    for (std::size_t i = 1; i <= model_.p; ++i)
        pred += model_.phi[i - 1] * (values_[values_.size() - i] - model_.mean);
    for (std::size_t j = 1; j <= model_.q && j <= residuals_.size(); ++j)
        pred += model_.theta[j - 1] * residuals_[residuals_.size() - j];
    return pred;
}

void Forecaster::observe(double value) {
    const double e = ready() ? value - predict() : 0.0;
    values_.push_back(value);
    residuals_.push_back(e);
    if (values_.size() > model_.p) values_.pop_front();
    if (residuals_.size() > std::max<std::size_t>(model_.q, 1)) residuals_.pop_front();
}

OrderSelection select_order(std::span<const double> x, std::size_t p_max, std::size_t q_max) {
    OrderSelection sel;
    bool have = false;
    for (std::size_t p = 1; p <= p_max; ++p) {
        for (std::size_t q = 0; q <= q_max; ++q) {
            ArmaModel m;
            try {
                m = fit_yule_walker(x, p, q);
            } catch (const Error&) {
                continue;
            }
            sel.candidates.push_back({p, q, m.fpe});
            if (!have || m.fpe < sel.model.fpe) {
                sel.model = m;
                have = true;
            }
        }
    }
    if (!have) sel.model = fit_yule_walker(x, 1, 0);

    const auto e = residuals(sel.model, x);
    std::span<const double> tail(e.begin() + static_cast<std::ptrdiff_t>(sel.model.p), e.end());
    const std::size_t lags = std::min<std::size_t>(20, tail.size() > 1 ? tail.size() - 1 : 0);
    if (lags > 0) {
        try {
            const auto r = stats::acf(tail, lags);
            const double bound = 1.96 / std::sqrt(static_cast<double>(tail.size()));
            for (double v : r) sel.whiteness_violations += std::abs(v) >= bound ? 1 : 0;
        } catch (const Error&) {
            // zero-variance residuals: a perfect fit is white by convention
        }
    }
    sel.residuals_white = sel.whiteness_violations == 0;
    return sel;
}

void write_model(std::ostream& out, const ArmaModel& m) {
    std::ostringstream s;
    s.precision(17);
    s << "solarcast-arma 1\n"
      << "p " << m.p << "\nq " << m.q << "\nphi";
    for (double v : m.phi) s << ' ' << v;
    s << "\ntheta";
    for (double v : m.theta) s << ' ' << v;
    s << "\nmean " << m.mean << "\nloss " << m.loss << "\nfpe " << m.fpe << "\nsample_size " << m.sample_size
      << '\n';
    out << s.str();
}

ArmaModel read_model(std::istream& in) {
    std::string line, tag;
    std::getline(in, line);
    if (line != "solarcast-arma 1")
        throw Error("schema_mismatch", "unsupported ARMA model format '" + line + "'");
    ArmaModel m;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        if (!(ls >> tag)) continue;
        if (tag == "p") ls >> m.p;
        else if (tag == "q") ls >> m.q;
        else if (tag == "phi") for (double v; ls >> v;) m.phi.push_back(v);
        else if (tag == "theta") for (double v; ls >> v;) m.theta.push_back(v);
        else if (tag == "mean") ls >> m.mean;
        else if (tag == "loss") ls >> m.loss;
        else if (tag == "fpe") ls >> m.fpe;
        else if (tag == "sample_size") ls >> m.sample_size;
        else throw Error("schema_mismatch", "unknown ARMA model field '" + tag + "'");
    }
    if (m.phi.size() != m.p || m.theta.size() != m.q)
        throw Error("schema_mismatch", "ARMA coefficient count does not match its order");
    return m;
}

void save_model(const std::filesystem::path& path, const ArmaModel& model) {
    std::ofstream out(path);
    if (!out) throw Error("io_error", "cannot write " + path.string());
    write_model(out, model);
}

ArmaModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("missing_file", "cannot open " + path.string());
    return read_model(in);
}

}  // namespace solarcast::arma
