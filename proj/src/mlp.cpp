#include "solarcast/mlp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "solarcast/error.hpp"

namespace solarcast::mlp {

std::size_t MlpArchitecture::max_lag() const noexcept {
    return std::max({endo, cloudiness, pressure, precipitation});
}

std::string MlpArchitecture::canonical() const {
    std::string s = "(endo^" + std::to_string(endo);
    if (cloudiness) s += ", N^" + std::to_string(cloudiness);
    if (pressure) s += ", P^" + std::to_string(pressure);
    if (precipitation) s += ", RP^" + std::to_string(precipitation);
    s += ")x" + std::to_string(hidden) + "x" + std::to_string(outputs);
    return s;
}

void MlpArchitecture::validate() const {
    if (endo < 1) throw Error("bad_architecture", "at least one endogenous lag is required");
    if (hidden < 1) throw Error("bad_architecture", "at least one hidden neuron is required");
    if (outputs != 1) throw Error("bad_architecture", "exactly one output neuron is supported");
}

namespace {

// Reads one (possibly superscript) digit at `pos`; returns its byte length.
std::size_t read_digit(std::string_view s, std::size_t pos, int& digit) {
    const auto c = static_cast<unsigned char>(s[pos]);
    if (c >= '0' && c <= '9') {
        digit = c - '0';
        return 1;
    }
    if (c == 0xC2 && pos + 1 < s.size()) {
        switch (static_cast<unsigned char>(s[pos + 1])) {
            case 0xB9: digit = 1; return 2;
            case 0xB2: digit = 2; return 2;
            case 0xB3: digit = 3; return 2;
            default: break;
        }
    }
    if (c == 0xE2 && pos + 2 < s.size() && static_cast<unsigned char>(s[pos + 1]) == 0x81) {
        const auto d = static_cast<unsigned char>(s[pos + 2]);
        if (d == 0xB0) { digit = 0; return 3; }
        if (d >= 0xB4 && d <= 0xB9) { digit = d - 0xB0; return 3; }
    }
    return 0;
}

std::size_t read_number(std::string_view s, std::size_t& pos, bool& any) {
    std::size_t value = 0;
    any = false;
    while (pos < s.size()) {
        int d = 0;
        const std::size_t len = read_digit(s, pos, d);
        if (len == 0) break;
        value = value * 10 + static_cast<std::size_t>(d);
        pos += len;
        any = true;
    }
    return value;
}

[[noreturn]] void bad_form(std::string_view text) {
    throw Error("bad_architecture", "cannot parse architecture '" + std::string(text) + "'");
}

}  // namespace

MlpArchitecture MlpArchitecture::parse(std::string_view text) {
    std::string s;
    for (char c : text)
        if (c != ' ' && c != '\t') s += c;
    std::string_view v = s;
    if (v.empty() || v.front() != '(') bad_form(text);
    const auto close = v.find(')');
    if (close == std::string_view::npos) bad_form(text);

    MlpArchitecture a;
    a.endo = 0;
    bool seen_endo = false;
    std::string_view terms = v.substr(1, close - 1);
    while (!terms.empty()) {
        const auto comma = terms.find(',');
        std::string_view term = terms.substr(0, comma);
        terms = comma == std::string_view::npos ? std::string_view{} : terms.substr(comma + 1);

        std::size_t name_end = 0;
        while (name_end < term.size() && std::isalpha(static_cast<unsigned char>(term[name_end]))) ++name_end;
        const std::string_view name = term.substr(0, name_end);
        std::size_t pos = name_end;
        if (pos < term.size() && term[pos] == '^') ++pos;
        bool any = false;
        std::size_t count = read_number(term, pos, any);
        if (pos != term.size()) bad_form(text);
        if (!any) count = 1;
        if (name == "endo") { a.endo = count; seen_endo = true; }
        else if (name == "N") a.cloudiness = count;
        else if (name == "P") a.pressure = count;
        else if (name == "RP") a.precipitation = count;
        else bad_form(text);
    }
    if (!seen_endo) bad_form(text);

    std::string_view rest = v.substr(close + 1);
    auto eat_times = [&]() {
        if (!rest.empty() && (rest.front() == 'x' || rest.front() == 'X' || rest.front() == '*')) {
            rest.remove_prefix(1);
            return true;
        }
        if (rest.size() >= 2 && static_cast<unsigned char>(rest[0]) == 0xC3 &&
            static_cast<unsigned char>(rest[1]) == 0x97) {
            rest.remove_prefix(2);
            return true;
        }
        return false;
    };
    auto number = [&]() {
        std::size_t pos = 0;
        bool any = false;
        const std::size_t n = read_number(rest, pos, any);
        if (!any) bad_form(text);
        rest.remove_prefix(pos);
        return n;
    };
    if (!eat_times()) bad_form(text);
    a.hidden = number();
    if (!eat_times()) bad_form(text);
    a.outputs = number();
    if (!rest.empty()) bad_form(text);
    a.validate();
    return a;
}

std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::NotTrained: return "not_trained";
        case StopReason::MaxEpochs: return "max_epochs";
        case StopReason::Goal: return "goal";
        case StopReason::ValidationFail: return "validation_fail";
        case StopReason::MuMax: return "mu_max";
        case StopReason::MinGradient: return "min_gradient";
    }
    return "not_trained";
}

std::vector<double> lagged_inputs(std::span<const double> index, const ExogenousChannels& exo,
                                  const MlpArchitecture& arch, std::size_t t) {
    if (t + 1 < arch.max_lag() || t >= index.size())
        throw Error("insufficient_history", "not enough history for the network inputs");
    std::vector<double> in;
    in.reserve(arch.input_count());
    auto push = [&](std::span<const double> x, std::size_t lags) {
        for (std::size_t k = 0; k < lags; ++k) in.push_back(x[t - k]);
    };
    auto channel = [&](const std::optional<std::vector<double>>& c, std::size_t lags, const char* name) {
        if (lags == 0) return;
        if (!c || c->size() != index.size())
            throw Error("missing_channel", std::string("architecture needs the ") + name + " channel");
        push(*c, lags);
    };
    push(index, arch.endo);
    channel(exo.cloudiness, arch.cloudiness, "cloudiness");
    channel(exo.pressure, arch.pressure, "pressure");
    channel(exo.precipitation, arch.precipitation, "precipitation");
    return in;
}

Dataset make_dataset(std::span<const double> index, const ExogenousChannels& exo, const MlpArchitecture& arch,
                     std::size_t first, std::size_t end) {
    arch.validate();
    const std::size_t lo = std::max(first, arch.max_lag() - 1);
    const std::size_t hi = index.empty() ? 0 : std::min(end, index.size() - 1);
    Dataset d;
    const std::size_t rows = hi > lo ? hi - lo : 0;
    const auto cols = static_cast<Eigen::Index>(arch.input_count());
    d.inputs.resize(static_cast<Eigen::Index>(rows), cols);
    d.targets.resize(static_cast<Eigen::Index>(rows));
    d.origins.reserve(rows);
    for (std::size_t t = lo; t < hi; ++t) {
        const auto r = static_cast<Eigen::Index>(t - lo);
        const auto in = lagged_inputs(index, exo, arch, t);
        for (Eigen::Index c = 0; c < cols; ++c) d.inputs(r, c) = in[static_cast<std::size_t>(c)];
        d.targets(r) = index[t + 1];
        d.origins.push_back(t);
    }
    return d;
}

namespace {

struct View {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w1;
    Eigen::Map<const Eigen::VectorXd> b1;
    Eigen::Map<const Eigen::VectorXd> w2;
    double b2;
};

View view(const MlpModel& m) {
    const auto h = static_cast<Eigen::Index>(m.arch.hidden);
    const auto i = static_cast<Eigen::Index>(m.arch.input_count());
    const double* p = m.params.data();
    return {{p, h, i}, {p + h * i, h}, {p + h * i + h, h}, p[h * i + 2 * h]};
}

double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double MlpModel::output(const Eigen::Ref<const Eigen::VectorXd>& u) const {
    const View v = view(*this);
    const Eigen::VectorXd a = v.w1 * u + v.b1;
    return v.b2 + v.w2.dot(a.array().tanh().matrix());
}

Eigen::VectorXd MlpModel::outputs(const Eigen::MatrixXd& u) const {
    const View v = view(*this);
    Eigen::MatrixXd a = u * v.w1.transpose();
    a.rowwise() += v.b1.transpose();
    return (a.array().tanh().matrix() * v.w2).array() + v.b2;
}

MlpModel build(const MlpArchitecture& arch, std::uint64_t seed) {
    arch.validate();
    MlpModel m;
    m.arch = arch;
    m.params.resize(static_cast<Eigen::Index>(arch.parameter_count()));
    std::mt19937_64 rng(seed);
    const std::size_t h = arch.hidden, in = arch.input_count();
    const double s_hidden = 1.0 / std::sqrt(static_cast<double>(in));
    const double s_out = 1.0 / std::sqrt(static_cast<double>(h));
    Eigen::Index k = 0;
    for (std::size_t j = 0; j < h * in + h; ++j) m.params(k++) = (uniform(rng) - 0.5) * s_hidden;
    for (std::size_t j = 0; j < h + 1; ++j) m.params(k++) = (uniform(rng) - 0.5) * s_out;
    return m;
}

void normalize_inputs(MlpModel& model, const Eigen::MatrixXd& raw) {
    const auto cols = raw.cols();
    if (static_cast<std::size_t>(cols) != model.arch.input_count())
        throw Error("arity_mismatch", "training inputs do not match the architecture");
    if (raw.rows() == 0) throw Error("empty_dataset", "cannot fit normalisation on an empty set");
    InputScaling s;
    for (Eigen::Index c = 0; c < cols; ++c) {
        const double lo = raw.col(c).minCoeff(), hi = raw.col(c).maxCoeff();
        if (!(hi > lo))
            throw Error("constant_input", "input column " + std::to_string(c) + " is constant");
        s.lo.push_back(lo);
        s.hi.push_back(hi);
    }
    model.scaling = std::move(s);
}

Eigen::MatrixXd normalized(const MlpModel& model, const Eigen::MatrixXd& raw) {
    if (!model.scaling.fitted()) return raw;
    Eigen::MatrixXd u(raw.rows(), raw.cols());
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
        const auto i = static_cast<std::size_t>(c);
        const double lo = model.scaling.lo[i], hi = model.scaling.hi[i];
        u.col(c) = (2.0 * (raw.col(c).array() - lo) / (hi - lo) - 1.0).matrix();
    }
    return u;
}

Eigen::MatrixXd jacobian(const MlpModel& model, const Eigen::MatrixXd& u) {
    const View v = view(model);
    const auto n = u.rows();
    const auto h = static_cast<Eigen::Index>(model.arch.hidden);
    const auto in = static_cast<Eigen::Index>(model.arch.input_count());
    Eigen::MatrixXd a = u * v.w1.transpose();
    a.rowwise() += v.b1.transpose();
    const Eigen::MatrixXd t = a.array().tanh().matrix();
    // δ_kh = w2_h (1 - tanh²)
    Eigen::MatrixXd delta = (1.0 - t.array().square()).matrix();
    delta = delta * v.w2.asDiagonal();

    Eigen::MatrixXd j(n, model.params.size());
    for (Eigen::Index hh = 0; hh < h; ++hh)
        for (Eigen::Index ii = 0; ii < in; ++ii) j.col(hh * in + ii) = delta.col(hh).cwiseProduct(u.col(ii));
    j.middleCols(h * in, h) = delta;
    j.middleCols(h * in + h, h) = t;
    j.col(h * in + 2 * h).setOnes();
    return j;
}

void TrainConfig::validate() const {
    if (max_fail < 1) throw Error("bad_config", "max_fail must be at least 1");
    if (!(mu_initial > 0 && mu_decrease > 0 && mu_increase > 0 && mu_max > 0))
        throw Error("bad_config", "damping factors must be positive");
}

double mse(const MlpModel& model, const Dataset& data) {
    if (data.size() == 0) throw Error("empty_dataset", "empty dataset");
    const Eigen::VectorXd e = model.outputs(normalized(model, data.inputs)) - data.targets;
    return e.squaredNorm() / static_cast<double>(e.size());
}

MlpModel train_lm(MlpModel model, const Dataset& train, const ValidationFn& validation, const TrainConfig& cfg) {
    cfg.validate();
    if (train.size() == 0) throw Error("empty_dataset", "training set is empty");
    if (!model.scaling.fitted()) normalize_inputs(model, train.inputs);
    const Eigen::MatrixXd u = normalized(model, train.inputs);
    const double n = static_cast<double>(train.size());
    const auto np = model.params.size();

    auto perf_of = [&](const MlpModel& m) {
        return (m.outputs(u) - train.targets).squaredNorm() / n;
    };
    auto describe = [&]() {
        std::ostringstream s;
        for (const auto& r : model.log)
            s << " [" << r.epoch << ": train " << r.train_mse << ", val " << r.validation_error << "]";
        return s.str();
    };

    model.log.clear();
    double mu = cfg.mu_initial;
    double perf = perf_of(model);
    double val = validation(model);
    if (!std::isfinite(perf) || !std::isfinite(val))
        throw Error("diverged", "non-finite loss at epoch 0;" + describe());
    model.log.push_back({0, perf, val, mu});

    Eigen::VectorXd best_params = model.params;
    double best_val = val;
    std::size_t best_epoch = 0, fails = 0;
    model.stop = StopReason::MaxEpochs;

    Eigen::MatrixXd jtj(np, np);
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        if (perf <= cfg.goal) {
            model.stop = StopReason::Goal;
            break;
        }
        const Eigen::MatrixXd j = jacobian(model, u);
        const Eigen::VectorXd e = model.outputs(u) - train.targets;
        jtj.setZero();
        jtj.selfadjointView<Eigen::Lower>().rankUpdate(j.transpose());
        const Eigen::VectorXd g = j.transpose() * e;
        if (g.norm() / n < cfg.min_gradient) {
            model.stop = StopReason::MinGradient;
            break;
        }

        bool improved = false;
        while (mu <= cfg.mu_max) {
            Eigen::MatrixXd a = jtj;
            a.diagonal().array() += mu;
            const Eigen::LDLT<Eigen::MatrixXd, Eigen::Lower> ldlt(a);
            if (ldlt.info() == Eigen::Success) {
                MlpModel trial = model;
                trial.params -= ldlt.solve(g);
                const double p = perf_of(trial);
                if (std::isfinite(p) && p < perf) {
                    model.params = std::move(trial.params);
                    perf = p;
                    mu *= cfg.mu_decrease;
                    improved = true;
                    break;
                }
            }
            mu *= cfg.mu_increase;
        }
        if (!improved) {
            model.stop = StopReason::MuMax;
            break;
        }

        val = validation(model);
        if (!std::isfinite(perf) || !std::isfinite(val))
            throw Error("diverged", "non-finite loss at epoch " + std::to_string(epoch) + ";" + describe());
        model.log.push_back({epoch, perf, val, mu});
        if (val < best_val) {
            best_val = val;
            best_params = model.params;
            best_epoch = epoch;
            fails = 0;
        } else if (++fails >= cfg.max_fail) {
            model.stop = StopReason::ValidationFail;
            break;
        }
    }
    model.params = std::move(best_params);
    model.best_epoch = best_epoch;
    return model;
}

MlpModel train_lm(MlpModel model, const Dataset& train, const Dataset& validation, const TrainConfig& cfg) {
    if (validation.size() == 0) throw Error("empty_dataset", "validation set is empty");
    const Dataset* val = &validation;
    return train_lm(std::move(model), train, [val](const MlpModel& m) { return mse(m, *val); }, cfg);
}

double forecast_one_step(const MlpModel& model, std::span<const double> inputs) {
    const std::size_t n = model.arch.input_count();
    if (inputs.size() != n)
        throw Error("arity_mismatch", "network expects " + std::to_string(n) + " inputs, got " +
                                          std::to_string(inputs.size()));
    Eigen::VectorXd u(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        u(static_cast<Eigen::Index>(i)) = model.scaling.fitted() ? model.scaling.map(i, inputs[i]) : inputs[i];
    return model.output(u);
}

void write_model(std::ostream& out, const MlpModel& m) {
    std::ostringstream s;
    s.precision(17);
    s << "solarcast-mlp 1\n"
      << "architecture " << m.arch.canonical() << '\n'
      << "scaling_lo";
    for (double v : m.scaling.lo) s << ' ' << v;
    s << "\nscaling_hi";
    for (double v : m.scaling.hi) s << ' ' << v;
    s << "\nparams";
    for (Eigen::Index i = 0; i < m.params.size(); ++i) s << ' ' << m.params(i);
    s << "\nbest_epoch " << m.best_epoch << "\nstop " << to_string(m.stop) << '\n';
    for (const auto& r : m.log)
        s << "epoch " << r.epoch << ' ' << r.train_mse << ' ' << r.validation_error << ' ' << r.mu << '\n';
    out << s.str();
}

MlpModel read_model(std::istream& in) {
    std::string line, tag;
    std::getline(in, line);
    if (line != "solarcast-mlp 1")
        throw Error("schema_mismatch", "unsupported MLP model format '" + line + "'");
    MlpModel m;
    std::vector<double> params;
    bool have_arch = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        if (!(ls >> tag)) continue;
        if (tag == "architecture") {
            std::string rest;
            std::getline(ls, rest);
            m.arch = MlpArchitecture::parse(rest);
            have_arch = true;
        } else if (tag == "scaling_lo") {
            for (double v; ls >> v;) m.scaling.lo.push_back(v);
        } else if (tag == "scaling_hi") {
            for (double v; ls >> v;) m.scaling.hi.push_back(v);
        } else if (tag == "params") {
            for (double v; ls >> v;) params.push_back(v);
        } else if (tag == "best_epoch") {
            ls >> m.best_epoch;
        } else if (tag == "stop") {
            std::string r;
            ls >> r;
            for (auto s : {StopReason::NotTrained, StopReason::MaxEpochs, StopReason::Goal,
                           StopReason::ValidationFail, StopReason::MuMax, StopReason::MinGradient})
                if (to_string(s) == r) m.stop = s;
        } else if (tag == "epoch") {
            EpochRecord r;
            ls >> r.epoch >> r.train_mse >> r.validation_error >> r.mu;
            m.log.push_back(r);
        } else {
            throw Error("schema_mismatch", "unknown MLP model field '" + tag + "'");
        }
    }
    if (!have_arch || params.size() != m.arch.parameter_count() ||
        m.scaling.lo.size() != m.scaling.hi.size() ||
        (m.scaling.fitted() && m.scaling.lo.size() != m.arch.input_count()))
        throw Error("schema_mismatch", "MLP model record is inconsistent with its architecture");
    m.params = Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size()));
    return m;
}

void save_model(const std::filesystem::path& path, const MlpModel& model) {
    std::ofstream out(path);
    if (!out) throw Error("io_error", "cannot write " + path.string());
    write_model(out, model);
}

MlpModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("missing_file", "cannot open " + path.string());
    return read_model(in);
}

}  // namespace solarcast::mlp
