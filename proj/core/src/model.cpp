// SPDX-License-Identifier: Apache-2.0

#include "ruinlab/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace ruinlab {

namespace {

constexpr double kGeneratorRowTol = 1e-12;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

// ---------------------------------------------------------------------------
// ClaimLaw

ClaimLaw ClaimLaw::erlang(int shape, double rate) {
    ClaimLaw law;
    law.kind = Kind::Erlang;
    law.shape = shape;
    law.rate = rate;
    return law;
}

ClaimLaw ClaimLaw::exponential(double rate) {
    ClaimLaw law;
    law.kind = Kind::Exponential;
    law.rate = rate;
    return law;
}

ClaimLaw ClaimLaw::hyper_exponential(std::vector<double> weights,
                                     std::vector<double> rates) {
    ClaimLaw law;
    law.kind = Kind::HyperExponential;
    law.weights = std::move(weights);
    law.rates = std::move(rates);
    return law;
}

std::vector<ClaimLaw::Component> ClaimLaw::components() const {
    switch (kind) {
        case Kind::Erlang:
            return {Component{1.0, shape, rate}};
        case Kind::Exponential:
            return {Component{1.0, 1, rate}};
        case Kind::HyperExponential: {
            std::vector<Component> cs;
            for (size_t i = 0; i < weights.size(); ++i)
                cs.push_back(Component{weights[i], 1, rates[i]});
            return cs;
        }
    }
    return {};
}

double ClaimLaw::mean() const {
    double m = 0.0;
    for (const Component& c : components()) m += c.weight * c.shape / c.rate;
    return m;
}

double ClaimLaw::mgf(double alpha) const {
    double v = 0.0;
    for (const Component& c : components()) {
        const double d = c.rate - alpha;
        if (std::abs(d) < 1e-12 * (1.0 + std::abs(c.rate)))
            throw std::domain_error("claim MGF pole at alpha = " + fmt_double(c.rate));
        v += c.weight * std::pow(c.rate / d, c.shape);
    }
    return v;
}

double ClaimLaw::mgf_derivative(double alpha) const {
    double v = 0.0;
    for (const Component& c : components()) {
        const double d = c.rate - alpha;
        if (std::abs(d) < 1e-12 * (1.0 + std::abs(c.rate)))
            throw std::domain_error("claim MGF pole at alpha = " + fmt_double(c.rate));
        v += c.weight * c.shape * std::pow(c.rate, c.shape) / std::pow(d, c.shape + 1);
    }
    return v;
}

double ClaimLaw::mgf_abscissa() const {
    double a = std::numeric_limits<double>::infinity();
    for (const Component& c : components()) a = std::min(a, c.rate);
    return a;
}

ExpPoly ClaimLaw::density() const {
    ExpPoly f;
    for (const Component& c : components()) {
        double fac = 1.0;
        for (int i = 2; i < c.shape; ++i) fac *= i;  // (shape-1)!
        f += ExpPoly::term(c.weight * std::pow(c.rate, c.shape) / fac,
                           c.shape - 1, c.rate);
    }
    return f;
}

ExpPoly ClaimLaw::tail() const {
    ExpPoly t;
    for (const Component& c : components()) {
        // Erlang(k, r) tail: sum_{j=0..k-1} (r x)^j / j! * exp(-r x)
        double fac = 1.0;
        for (int j = 0; j < c.shape; ++j) {
            if (j > 0) fac *= j;
            t += ExpPoly::term(c.weight * std::pow(c.rate, j) / fac, j, c.rate);
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Line {
    int number;
    std::string text;
};

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& value, int line) {
    const std::string v = trim(value);
    if (v.empty()) throw ParseError(line, "empty numeric value");
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size())
        throw ParseError(line, "non-numeric value '" + v + "'");
    return x;
}

std::vector<double> parse_number_list(const std::string& value, int line) {
    std::string v = value;
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream iss(v);
    std::vector<double> out;
    std::string tok;
    while (iss >> tok) out.push_back(parse_number(tok, line));
    if (out.empty()) throw ParseError(line, "empty numeric list");
    return out;
}

int parse_int(const std::string& value, int line) {
    const double x = parse_number(value, line);
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9)
        throw ParseError(line, "expected an integer, got '" + trim(value) + "'");
    return static_cast<int>(r);
}

struct KeyValue {
    std::string value;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, KeyValue>;

} // namespace

ModelSpec parse_model(std::string_view text) {
    std::map<std::string, Section> sections;
    std::map<std::string, int> section_line;

    std::string current;
    int lineno = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t nl = text.find('\n', pos);
        std::string raw(text.substr(pos, nl == std::string_view::npos
                                             ? std::string_view::npos
                                             : nl - pos));
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++lineno;

        const size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError(lineno, "unterminated section header");
            current = trim(line.substr(1, line.size() - 2));
            if (current.empty()) throw ParseError(lineno, "empty section name");
            if (sections.count(current))
                throw ParseError(lineno, "duplicate section [" + current + "]");
            sections[current];
            section_line[current] = lineno;
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(lineno, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(lineno, "empty key");
        if (current.empty())
            throw ParseError(lineno, "key '" + key + "' outside any section");
        if (sections[current].count(key))
            throw ParseError(lineno, "duplicate key '" + key + "'");
        sections[current][key] = KeyValue{value, lineno, false};
    }

    auto require = [&](const std::string& section, const std::string& key) -> KeyValue& {
        auto sit = sections.find(section);
        if (sit == sections.end())
            throw ParseError(1, "missing required section [" + section + "]");
        auto kit = sit->second.find(key);
        if (kit == sit->second.end())
            throw ParseError(section_line[section],
                             "missing required key '" + key + "' in [" + section + "]");
        kit->second.used = true;
        return kit->second;
    };
    auto optional = [&](const std::string& section, const std::string& key) -> KeyValue* {
        auto sit = sections.find(section);
        if (sit == sections.end()) return nullptr;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return nullptr;
        kit->second.used = true;
        return &kit->second;
    };

    ModelSpec spec;

    {
        KeyValue& mk = require("chain", "m");
        spec.chain.m = parse_int(mk.value, mk.line);
        if (spec.chain.m < 1)
            throw ParseError(mk.line, "state count m must be >= 1");
        KeyValue& qk = require("chain", "q");
        const std::vector<double> qv = parse_number_list(qk.value, qk.line);
        const int m = spec.chain.m;
        if (static_cast<int>(qv.size()) != m * m)
            throw ParseError(qk.line, "q must have m*m = " + std::to_string(m * m) +
                                          " entries, got " + std::to_string(qv.size()));
        spec.chain.q.resize(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                spec.chain.q(i, j) = qv[static_cast<size_t>(i * m + j)];
    }

    for (int k = 1; k <= spec.chain.m; ++k) {
        const std::string sec = "state." + std::to_string(k);
        StateParams p;
        {
            KeyValue& v = require(sec, "lambda1");
            p.lambda1 = parse_number(v.value, v.line);
        }
        {
            KeyValue& v = require(sec, "lambda2");
            p.lambda2 = parse_number(v.value, v.line);
        }
        {
            KeyValue& v = require(sec, "c");
            p.c = parse_number(v.value, v.line);
        }
        KeyValue& claim = require(sec, "claim");
        const std::string claim_kind = trim(claim.value);
        if (claim_kind == "erlang") {
            KeyValue& shape = require(sec, "claim_shape");
            KeyValue& rate = require(sec, "claim_rate");
            p.claim = ClaimLaw::erlang(parse_int(shape.value, shape.line),
                                       parse_number(rate.value, rate.line));
        } else if (claim_kind == "exp") {
            KeyValue& rate = require(sec, "claim_rate");
            p.claim = ClaimLaw::exponential(parse_number(rate.value, rate.line));
        } else if (claim_kind == "hyperexp") {
            KeyValue& w = require(sec, "claim_weights");
            KeyValue& r = require(sec, "claim_rates");
            p.claim = ClaimLaw::hyper_exponential(parse_number_list(w.value, w.line),
                                                  parse_number_list(r.value, r.line));
            if (p.claim.weights.size() != p.claim.rates.size())
                throw ParseError(r.line, "claim_weights and claim_rates differ in length");
        } else {
            throw ParseError(claim.line, "unknown claim law '" + claim_kind +
                                             "' (expected erlang|exp|hyperexp)");
        }
        spec.states.push_back(std::move(p));
    }

    for (const auto& [name, sec] : sections) {
        if (name != "chain" && name.rfind("state.", 0) != 0)
            throw ParseError(section_line.at(name), "unknown section [" + name + "]");
        if (name.rfind("state.", 0) == 0) {
            bool known = false;
            for (int k = 1; k <= spec.chain.m; ++k)
                if (name == "state." + std::to_string(k)) known = true;
            if (!known)
                throw ParseError(section_line.at(name),
                                 "section [" + name + "] does not match any state (m = " +
                                     std::to_string(spec.chain.m) + ")");
        }
        for (const auto& [key, kv] : sec)
            if (!kv.used)
                throw ParseError(kv.line, "unknown key '" + key + "' in [" + name + "]");
    }

    return spec;
}

std::string serialize_model(const ModelSpec& spec) {
    std::ostringstream os;
    os << "[chain]\n";
    os << "m = " << spec.chain.m << "\n";
    os << "q =";
    for (int i = 0; i < spec.chain.m; ++i)
        for (int j = 0; j < spec.chain.m; ++j) os << " " << fmt_double(spec.chain.q(i, j));
    os << "\n";
    for (int k = 1; k <= spec.chain.m; ++k) {
        const StateParams& p = spec.states[static_cast<size_t>(k - 1)];
        os << "[state." << k << "]\n";
        os << "lambda1 = " << fmt_double(p.lambda1) << "\n";
        os << "lambda2 = " << fmt_double(p.lambda2) << "\n";
        os << "c = " << fmt_double(p.c) << "\n";
        switch (p.claim.kind) {
            case ClaimLaw::Kind::Erlang:
                os << "claim = erlang\n";
                os << "claim_shape = " << p.claim.shape << "\n";
                os << "claim_rate = " << fmt_double(p.claim.rate) << "\n";
                break;
            case ClaimLaw::Kind::Exponential:
                os << "claim = exp\n";
                os << "claim_rate = " << fmt_double(p.claim.rate) << "\n";
                break;
            case ClaimLaw::Kind::HyperExponential: {
                os << "claim = hyperexp\n";
                os << "claim_weights =";
                for (double w : p.claim.weights) os << " " << fmt_double(w);
                os << "\n";
                os << "claim_rates =";
                for (double r : p.claim.rates) os << " " << fmt_double(r);
                os << "\n";
                break;
            }
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool strongly_connected(const Eigen::MatrixXd& q) {
    const int m = static_cast<int>(q.rows());
    if (m == 1) return true;
    auto reach = [&](bool transpose) {
        std::vector<char> seen(static_cast<size_t>(m), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < m; ++j) {
                const double rate = transpose ? q(j, i) : q(i, j);
                if (i != j && rate > 0.0 && !seen[static_cast<size_t>(j)]) {
                    seen[static_cast<size_t>(j)] = 1;
                    stack.push_back(j);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return reach(false) && reach(true);
}

} // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error([&issues] {
          std::string msg = "model validation failed:";
          for (const auto& i : issues) msg += "\n  [" + i.code + "] " + i.message;
          return msg;
      }()),
      issues_(std::move(issues)) {}

std::vector<ValidationIssue> check_model(const ModelSpec& spec) {
    std::vector<ValidationIssue> issues;
    auto add = [&](std::string code, std::string message) {
        issues.push_back(ValidationIssue{std::move(code), std::move(message)});
    };

    const int m = spec.chain.m;
    if (m < 1) {
        add("chain.size", "state count m must be >= 1");
        return issues;
    }
    if (spec.chain.q.rows() != m || spec.chain.q.cols() != m) {
        add("chain.shape", "generator Q must be m x m");
        return issues;
    }
    if (static_cast<int>(spec.states.size()) != m) {
        add("states.count", "expected " + std::to_string(m) + " state parameter blocks, got " +
                                std::to_string(spec.states.size()));
        return issues;
    }

    for (int i = 0; i < m; ++i) {
        double row = 0.0;
        for (int j = 0; j < m; ++j) {
            row += spec.chain.q(i, j);
            if (i != j && spec.chain.q(i, j) < 0.0)
                add("chain.offdiag",
                    "q(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        ") is negative off the diagonal");
        }
        if (std::abs(row) > kGeneratorRowTol)
            add("chain.rowsum", "row " + std::to_string(i + 1) + " of Q sums to " +
                                    fmt_double(row) + ", expected 0");
    }
    if (!strongly_connected(spec.chain.q))
        add("chain.irreducible", "chain is not irreducible (structural reachability failed)");

    for (int k = 0; k < m; ++k) {
        const StateParams& p = spec.states[static_cast<size_t>(k)];
        const std::string at = "state " + std::to_string(k + 1);
        if (!(p.lambda1 >= 0.0)) add("state.lambda1", at + ": lambda1 must be >= 0");
        if (!(p.lambda2 >= 0.0)) add("state.lambda2", at + ": lambda2 must be >= 0");
        if (!(p.c > 0.0)) add("state.c", at + ": premium parameter c must be > 0");
        const double qkk = std::abs(spec.chain.q(k, k));
        if (p.lambda1 + p.lambda2 + qkk <= 0.0)
            add("state.frozen", at + ": lambda1 + lambda2 + |q_kk| must be > 0");

        const auto comps = p.claim.components();
        if (comps.empty()) add("claim.empty", at + ": claim law has no components");
        double wsum = 0.0;
        for (const auto& c : comps) {
            wsum += c.weight;
            if (!(c.rate > 0.0)) add("claim.rate", at + ": claim rate must be > 0");
            if (c.shape < 1) add("claim.shape", at + ": claim shape must be >= 1");
            if (c.weight < 0.0) add("claim.weight", at + ": claim weights must be >= 0");
        }
        if (std::abs(wsum - 1.0) > 1e-12)
            add("claim.weights", at + ": claim weights sum to " + fmt_double(wsum));
    }

    return issues;
}

ValidatedModel validate_model(const ModelSpec& spec) {
    std::vector<ValidationIssue> issues = check_model(spec);
    if (!issues.empty()) throw ValidationError(std::move(issues));

    ValidatedModel model;
    model.spec_ = spec;
    const int m = spec.chain.m;
    model.total_rate_.resize(static_cast<size_t>(m));
    model.drift_.resize(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        const StateParams& p = spec.states[static_cast<size_t>(k)];
        model.total_rate_[static_cast<size_t>(k)] =
            p.lambda1 + p.lambda2 + std::abs(spec.chain.q(k, k));
        model.drift_[static_cast<size_t>(k)] =
            p.lambda2 * p.claim.mean() - p.lambda1 / p.c;
    }
    model.stationary_ = stationary_distribution(spec.chain);
    model.stationary_drift_ = 0.0;
    for (int k = 0; k < m; ++k)
        model.stationary_drift_ += model.stationary_(k) * model.drift_[static_cast<size_t>(k)];
    return model;
}

// ---------------------------------------------------------------------------
// Cumulant, stationary structure, drift

double state_cumulant(const StateParams& p, double alpha) {
    const double denom = p.c + alpha;
    if (std::abs(denom) < 1e-12 * (1.0 + p.c))
        throw std::domain_error("cumulant pole at alpha = -c");
    const double premium_part = p.lambda1 * (p.c / denom - 1.0);
    const double claim_part =
        p.lambda2 > 0.0 ? p.lambda2 * (p.claim.mgf(alpha) - 1.0) : 0.0;
    return premium_part + claim_part;
}

double state_cumulant_derivative(const StateParams& p, double alpha) {
    const double denom = p.c + alpha;
    if (std::abs(denom) < 1e-12 * (1.0 + p.c))
        throw std::domain_error("cumulant pole at alpha = -c");
    const double premium_part = -p.lambda1 * p.c / (denom * denom);
    const double claim_part =
        p.lambda2 > 0.0 ? p.lambda2 * p.claim.mgf_derivative(alpha) : 0.0;
    return premium_part + claim_part;
}

Eigen::MatrixXd cumulant(const ValidatedModel& model, double alpha) {
    const int m = model.state_count();
    Eigen::MatrixXd psi = model.generator();
    for (int k = 0; k < m; ++k)
        psi(k, k) += state_cumulant(model.state(k), alpha);
    return psi;
}

Eigen::VectorXd stationary_distribution(const ChainSpec& chain) {
    const int m = chain.m;
    if (m == 1) return Eigen::VectorXd::Ones(1);

    // Solve pi Q = 0 with the normalization sum(pi) = 1: replace the last
    // column of Q^T by ones.
    Eigen::MatrixXd a = chain.q.transpose();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    a.row(m - 1).setOnes();
    b(m - 1) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
        throw std::runtime_error("stationary distribution: singular system (chain not irreducible?)");
    Eigen::VectorXd pi = lu.solve(b);
    const double residual = (pi.transpose() * chain.q).norm();
    if (residual > 1e-12)
        throw std::runtime_error("stationary distribution: residual " + fmt_double(residual) +
                                 " exceeds 1e-12");
    return pi;
}

DriftReport drift(const ValidatedModel& model) {
    DriftReport r;
    const int m = model.state_count();
    r.per_state.resize(m);
    for (int k = 0; k < m; ++k) r.per_state(k) = model.state_drift(k);
    r.stationary = model.stationary();
    r.stationary_drift = model.stationary_drift();
    return r;
}

} // namespace ruinlab
