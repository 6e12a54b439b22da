// SPDX-License-Identifier: Apache-2.0

#ifndef RUINLAB_MODEL_HPP
#define RUINLAB_MODEL_HPP

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ruinlab/exppoly.hpp"

namespace ruinlab {

/// Claim-size law. Restricted to the rational (phase-type Erlang) family so
/// that the scalar analytics stay exact: Erlang(shape, rate), Exponential(rate)
/// and finite mixtures of exponentials.
struct ClaimLaw {
    enum class Kind { Erlang, Exponential, HyperExponential };

    Kind kind = Kind::Exponential;
    int shape = 1;                  // Erlang only
    double rate = 1.0;              // Erlang / Exponential
    std::vector<double> weights;    // HyperExponential
    std::vector<double> rates;      // HyperExponential

    static ClaimLaw erlang(int shape, double rate);
    static ClaimLaw exponential(double rate);
    static ClaimLaw hyper_exponential(std::vector<double> weights,
                                      std::vector<double> rates);

    /// Mixture-of-Erlang view (weight, shape, rate) used by the analytics.
    struct Component {
        double weight;
        int shape;
        double rate;
    };
    std::vector<Component> components() const;

    double mean() const;
    /// Moment generating function E exp(alpha * X) as the rational expression
    /// prod (rate/(rate-alpha))^shape; defined by analytic continuation away
    /// from the poles alpha = rate.
    double mgf(double alpha) const;
    double mgf_derivative(double alpha) const;
    /// Smallest pole of the MGF.
    double mgf_abscissa() const;

    ExpPoly density() const;
    ExpPoly tail() const;  // P{X > x}
};

struct ChainSpec {
    int m = 1;
    Eigen::MatrixXd q;  // m x m generator
};

struct StateParams {
    double lambda1 = 0.0;  // premium arrival rate (downward jumps of xi)
    double lambda2 = 0.0;  // claim arrival rate (upward jumps of xi)
    double c = 1.0;        // premium-size exponential parameter
    ClaimLaw claim;
};

struct ModelSpec {
    ChainSpec chain;
    std::vector<StateParams> states;
};

struct ValidationIssue {
    std::string code;
    std::string message;
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<ValidationIssue> issues);
    const std::vector<ValidationIssue>& issues() const { return issues_; }

private:
    std::vector<ValidationIssue> issues_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct DriftReport {
    Eigen::VectorXd per_state;   // d_k = lambda2_k * m_k - lambda1_k / c_k
    Eigen::VectorXd stationary;  // pi with pi Q = 0
    double stationary_drift = 0.0;
};

/// Immutable, fully validated model handle. Safe for concurrent reads.
class ValidatedModel {
public:
    const ModelSpec& spec() const { return spec_; }
    int state_count() const { return spec_.chain.m; }
    const Eigen::MatrixXd& generator() const { return spec_.chain.q; }
    const StateParams& state(int k) const { return spec_.states[static_cast<size_t>(k)]; }

    /// lambda1 + lambda2 + |q_kk|
    double total_rate(int k) const { return total_rate_[static_cast<size_t>(k)]; }
    double state_drift(int k) const { return drift_[static_cast<size_t>(k)]; }
    const Eigen::VectorXd& stationary() const { return stationary_; }
    double stationary_drift() const { return stationary_drift_; }
    bool is_scalar() const { return spec_.chain.m == 1; }

private:
    friend ValidatedModel validate_model(const ModelSpec& spec);

    ModelSpec spec_;
    std::vector<double> total_rate_;
    std::vector<double> drift_;
    Eigen::VectorXd stationary_;
    double stationary_drift_ = 0.0;
};

/// Parse the key-value configuration document (see README for the schema).
/// Unknown keys are rejected; numbers parse as IEEE-754 doubles.
ModelSpec parse_model(std::string_view text);

/// Canonical configuration text; parse(serialize(spec)) == spec.
std::string serialize_model(const ModelSpec& spec);

/// All invariant violations, one issue per violation (empty when valid).
std::vector<ValidationIssue> check_model(const ModelSpec& spec);

/// Sealed read-only handle; throws ValidationError listing every violation.
ValidatedModel validate_model(const ModelSpec& spec);

/// Matrix cumulant: diag over states of
///   lambda1 (c/(c+alpha) - 1) + lambda2 (MGF(alpha) - 1), plus Q.
/// Evaluated as the rational continuation; throws std::domain_error at poles
/// (alpha = -c_k or alpha = claim rate).
Eigen::MatrixXd cumulant(const ValidatedModel& model, double alpha);

/// Per-state scalar cumulant psi_k(alpha).
double state_cumulant(const StateParams& p, double alpha);
double state_cumulant_derivative(const StateParams& p, double alpha);

/// pi with pi Q = 0, sum pi = 1 (residual <= 1e-12, throws on singularity).
Eigen::VectorXd stationary_distribution(const ChainSpec& chain);

DriftReport drift(const ValidatedModel& model);

} // namespace ruinlab

#endif
