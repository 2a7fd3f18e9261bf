#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "goldlab/rng.hpp"
#include "goldlab/tensor.hpp"

namespace goldlab::data {

struct LabeledPoint {
    std::vector<double> x;
    int label = 0;
};

// One 2-D Gaussian component with a class assignment.
struct MixtureComponent {
    std::array<double, 2> mean{};
    std::array<double, 4> cov{};  // row-major 2x2, must be SPD
    double weight = 0.0;
    int label = 0;
};

struct MixtureDensity {
    double log_px;                      // log p(x)
    std::vector<double> log_joint;      // log p(x, c) per class
    std::vector<double> log_posterior;  // log p(c | x) per class
};

// Gaussian mixture with exact densities; the ground-truth side of every
// estimator oracle test.
class SyntheticMixture {
public:
    explicit SyntheticMixture(std::vector<MixtureComponent> components);

    const std::vector<MixtureComponent>& components() const { return components_; }
    int class_count() const { return class_count_; }

    std::vector<LabeledPoint> sample(std::size_t n, Rng& rng) const;

    MixtureDensity log_density(const std::array<double, 2>& x) const;

private:
    struct Prepared {
        std::array<double, 3> chol;  // L11, L21, L22 of the covariance
        double log_norm;             // -log(2 pi) - log(L11 L22)
        double log_weight;
    };

    std::vector<MixtureComponent> components_;
    std::vector<Prepared> prepared_;
    std::vector<double> cdf_;
    int class_count_ = 0;
};

// Six equal-weight clusters on a circle of radius 4 (one every 60 degrees),
// isotropic covariance 0.2 I, classes alternating around the circle.
SyntheticMixture default_mixture();

// Zero-mean / unit-variance feature transform fitted on a dataset; keeps the
// inverse for plotting in the original coordinates.
class Standardizer {
public:
    Standardizer() = default;
    static Standardizer fit(const std::vector<LabeledPoint>& points);

    std::vector<double> apply(const std::vector<double>& x) const;
    std::vector<double> invert(const std::vector<double>& x) const;
    void apply_in_place(std::vector<LabeledPoint>& points) const;

    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& std_dev() const { return std_; }

private:
    std::vector<double> mean_;
    std::vector<double> std_;
};

}  // namespace goldlab::data
