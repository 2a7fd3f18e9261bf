#include "goldlab/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "goldlab/errors.hpp"

namespace goldlab::data {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_sum_exp(const std::vector<double>& terms) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double t : terms) mx = std::max(mx, t);
    if (!std::isfinite(mx)) return mx;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - mx);
    return mx + std::log(sum);
}

}  // namespace

SyntheticMixture::SyntheticMixture(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw ConfigError("mixture needs at least one component");
    double total = 0.0;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const auto& c = components_[i];
        if (c.weight <= 0.0)
            throw ConfigError("mixture component " + std::to_string(i) +
                              ": weight must be positive");
        if (c.label < 0)
            throw ConfigError("mixture component " + std::to_string(i) + ": negative class");
        // Cholesky of [[a, b], [b, d]]; failure means the covariance is not SPD.
        const double a = c.cov[0], b = c.cov[1], b2 = c.cov[2], d = c.cov[3];
        if (std::abs(b - b2) > 1e-12 * std::max(1.0, std::abs(b)))
            throw ConfigError("mixture component " + std::to_string(i) +
                              ": covariance not symmetric");
        if (a <= 0.0)
            throw ConfigError("mixture component " + std::to_string(i) +
                              ": covariance not positive definite");
        const double l11 = std::sqrt(a);
        const double l21 = b / l11;
        const double rem = d - l21 * l21;
        if (rem <= 0.0)
            throw ConfigError("mixture component " + std::to_string(i) +
                              ": covariance not positive definite");
        const double l22 = std::sqrt(rem);
        Prepared p;
        p.chol = {l11, l21, l22};
        p.log_norm = -kLog2Pi - std::log(l11 * l22);
        p.log_weight = std::log(c.weight);
        prepared_.push_back(p);
        total += c.weight;
        class_count_ = std::max(class_count_, c.label + 1);
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ConfigError("mixture weights sum to " + std::to_string(total) + ", expected 1");
    cdf_.resize(components_.size());
    double running = 0.0;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        running += components_[i].weight;
        cdf_[i] = running;
    }
    cdf_.back() = 1.0;
}

std::vector<LabeledPoint> SyntheticMixture::sample(std::size_t n, Rng& rng) const {
    std::vector<LabeledPoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        std::size_t k = 0;
        while (k + 1 < cdf_.size() && u >= cdf_[k]) ++k;
        const auto& comp = components_[k];
        const auto& chol = prepared_[k].chol;
        const double n1 = rng.normal();
        const double n2 = rng.normal();
        LabeledPoint p;
        p.x = {comp.mean[0] + chol[0] * n1, comp.mean[1] + chol[1] * n1 + chol[2] * n2};
        p.label = comp.label;
        out.push_back(std::move(p));
    }
    return out;
}

MixtureDensity SyntheticMixture::log_density(const std::array<double, 2>& x) const {
    std::vector<double> all_terms;
    all_terms.reserve(components_.size());
    std::vector<std::vector<double>> class_terms(class_count_);
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const auto& comp = components_[i];
        const auto& pr = prepared_[i];
        // Solve L y = (x - mean); quadratic form is ||y||^2.
        const double d0 = x[0] - comp.mean[0];
        const double d1 = x[1] - comp.mean[1];
        const double y0 = d0 / pr.chol[0];
        const double y1 = (d1 - pr.chol[1] * y0) / pr.chol[2];
        const double log_pdf = pr.log_norm - 0.5 * (y0 * y0 + y1 * y1);
        const double term = pr.log_weight + log_pdf;
        all_terms.push_back(term);
        class_terms[comp.label].push_back(term);
    }
    MixtureDensity density;
    density.log_px = log_sum_exp(all_terms);
    density.log_joint.resize(class_count_);
    density.log_posterior.resize(class_count_);
    for (int c = 0; c < class_count_; ++c) {
        density.log_joint[c] = class_terms[c].empty()
                                   ? -std::numeric_limits<double>::infinity()
                                   : log_sum_exp(class_terms[c]);
        density.log_posterior[c] = density.log_joint[c] - density.log_px;
    }
    return density;
}

SyntheticMixture default_mixture() {
    std::vector<MixtureComponent> components;
    const double radius = 4.0;
    const double var = 0.2;
    for (int k = 0; k < 6; ++k) {
        const double angle = k * (3.14159265358979323846 / 3.0);
        MixtureComponent c;
        c.mean = {radius * std::cos(angle), radius * std::sin(angle)};
        c.cov = {var, 0.0, 0.0, var};
        c.weight = 1.0 / 6.0;
        c.label = k % 2;
        components.push_back(c);
    }
    return SyntheticMixture(std::move(components));
}

Standardizer Standardizer::fit(const std::vector<LabeledPoint>& points) {
    if (points.empty()) throw ConfigError("Standardizer::fit: empty dataset");
    const std::size_t dim = points[0].x.size();
    Standardizer s;
    s.mean_.assign(dim, 0.0);
    s.std_.assign(dim, 0.0);
    for (const auto& p : points)
        for (std::size_t j = 0; j < dim; ++j) s.mean_[j] += p.x[j];
    for (double& m : s.mean_) m /= static_cast<double>(points.size());
    for (const auto& p : points)
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = p.x[j] - s.mean_[j];
            s.std_[j] += d * d;
        }
    for (double& v : s.std_) {
        v = std::sqrt(v / static_cast<double>(points.size()));
        if (v < 1e-12) v = 1.0;  // constant feature: leave it centered only
    }
    return s;
}

std::vector<double> Standardizer::apply(const std::vector<double>& x) const {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean_[j]) / std_[j];
    return out;
}

std::vector<double> Standardizer::invert(const std::vector<double>& x) const {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] * std_[j] + mean_[j];
    return out;
}

void Standardizer::apply_in_place(std::vector<LabeledPoint>& points) const {
    for (auto& p : points) p.x = apply(p.x);
}

}  // namespace goldlab::data
