#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "goldlab/errors.hpp"
#include "goldlab/idx.hpp"
#include "goldlab/mixture.hpp"
#include "goldlab/pool.hpp"

using namespace goldlab;
using namespace goldlab::data;

namespace {

SyntheticMixture single_standard_gaussian() {
    MixtureComponent c;
    c.mean = {0.0, 0.0};
    c.cov = {1.0, 0.0, 0.0, 1.0};
    c.weight = 1.0;
    c.label = 0;
    return SyntheticMixture({c});
}

}  // namespace

TEST_CASE("standard gaussian log density at the origin") {
    const auto mix = single_standard_gaussian();
    const auto d = mix.log_density({0.0, 0.0});
    CHECK(d.log_px == doctest::Approx(-std::log(2.0 * 3.14159265358979323846)).epsilon(1e-12));
    CHECK(d.log_joint[0] == doctest::Approx(d.log_px).epsilon(1e-12));
}

TEST_CASE("duplicated component collapses to the single-component density") {
    MixtureComponent c;
    c.mean = {1.0, -2.0};
    c.cov = {0.5, 0.1, 0.1, 0.3};
    c.weight = 0.5;
    c.label = 0;
    const SyntheticMixture two({c, c});
    c.weight = 1.0;
    const SyntheticMixture one({c});
    for (double x = -3.0; x <= 3.0; x += 0.7) {
        CHECK(two.log_density({x, x}).log_px ==
              doctest::Approx(one.log_density({x, x}).log_px).epsilon(1e-12));
    }
}

TEST_CASE("default mixture density integrates to one (grid quadrature)") {
    const auto mix = default_mixture();
    // 6 sigma beyond the outermost means: radius 4 + 6 * sqrt(0.2) ~ 6.7
    const double lim = 6.7;
    const std::size_t n = 400;
    const double h = 2.0 * lim / static_cast<double>(n);
    double integral = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double x = -lim + (static_cast<double>(i) + 0.5) * h;
            const double y = -lim + (static_cast<double>(j) + 0.5) * h;
            integral += std::exp(mix.log_density({x, y}).log_px) * h * h;
        }
    CHECK(integral == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("default mixture structure") {
    const auto mix = default_mixture();
    CHECK(mix.components().size() == 6);
    CHECK(mix.class_count() == 2);
    int per_class[2] = {0, 0};
    double weight_sum = 0.0;
    for (const auto& c : mix.components()) {
        per_class[c.label] += 1;
        weight_sum += c.weight;
    }
    CHECK(per_class[0] == 3);
    CHECK(per_class[1] == 3);
    CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("non-SPD covariance is rejected at construction") {
    MixtureComponent c;
    c.mean = {0.0, 0.0};
    c.cov = {1.0, 2.0, 2.0, 1.0};  // det < 0
    c.weight = 1.0;
    c.label = 0;
    CHECK_THROWS_AS(SyntheticMixture({c}), ConfigError);
}

TEST_CASE("sampling zero points yields an empty list") {
    Rng rng(0);
    CHECK(single_standard_gaussian().sample(0, rng).empty());
}

TEST_CASE("near-zero variance pins samples to the mean") {
    MixtureComponent c;
    c.mean = {2.5, -1.5};
    c.cov = {1e-12, 0.0, 0.0, 1e-12};
    c.weight = 1.0;
    c.label = 1;
    const SyntheticMixture mix({c});
    Rng rng(3);
    for (const auto& p : mix.sample(200, rng)) {
        CHECK(std::abs(p.x[0] - 2.5) < 1e-5);
        CHECK(std::abs(p.x[1] + 1.5) < 1e-5);
        CHECK(p.label == 1);
    }
}

TEST_CASE("component frequencies match weights over 100k draws") {
    const auto mix = default_mixture();
    Rng rng(7);
    const auto samples = mix.sample(100000, rng);
    // nearest mean identifies the component (clusters are far apart)
    std::map<int, std::size_t> counts;
    for (const auto& p : samples) {
        int best = 0;
        double best_d = 1e300;
        for (std::size_t k = 0; k < mix.components().size(); ++k) {
            const auto& m = mix.components()[k].mean;
            const double d = (p.x[0] - m[0]) * (p.x[0] - m[0]) +
                             (p.x[1] - m[1]) * (p.x[1] - m[1]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(k);
            }
        }
        counts[best] += 1;
    }
    for (std::size_t k = 0; k < 6; ++k) {
        const double freq = static_cast<double>(counts[static_cast<int>(k)]) / 100000.0;
        CHECK(std::abs(freq - 1.0 / 6.0) < 0.01);
    }
}

TEST_CASE("empirical moments match configured moments within 3 standard errors") {
    MixtureComponent c;
    c.mean = {1.0, -2.0};
    c.cov = {0.8, 0.2, 0.2, 0.5};
    c.weight = 1.0;
    c.label = 0;
    const SyntheticMixture mix({c});
    Rng rng(11);
    const std::size_t n = 100000;
    const auto samples = mix.sample(n, rng);
    double mean[2] = {0, 0};
    for (const auto& p : samples) {
        mean[0] += p.x[0];
        mean[1] += p.x[1];
    }
    mean[0] /= n;
    mean[1] /= n;
    double cov[3] = {0, 0, 0};  // xx, xy, yy
    for (const auto& p : samples) {
        const double dx = p.x[0] - mean[0];
        const double dy = p.x[1] - mean[1];
        cov[0] += dx * dx;
        cov[1] += dx * dy;
        cov[2] += dy * dy;
    }
    cov[0] /= n;
    cov[1] /= n;
    cov[2] /= n;
    const double se_mean_x = std::sqrt(0.8 / n);
    const double se_mean_y = std::sqrt(0.5 / n);
    CHECK(std::abs(mean[0] - 1.0) < 3 * se_mean_x);
    CHECK(std::abs(mean[1] + 2.0) < 3 * se_mean_y);
    // variance standard error ~ sigma^2 sqrt(2/n)
    CHECK(std::abs(cov[0] - 0.8) < 3 * 0.8 * std::sqrt(2.0 / n));
    CHECK(std::abs(cov[2] - 0.5) < 3 * 0.5 * std::sqrt(2.0 / n));
    CHECK(std::abs(cov[1] - 0.2) < 3 * 0.8 * std::sqrt(2.0 / n));
}

TEST_CASE("posterior probabilities are consistent with joint and marginal") {
    const auto mix = default_mixture();
    const auto d = mix.log_density({1.0, 2.0});
    double total = 0.0;
    for (int c = 0; c < mix.class_count(); ++c) total += std::exp(d.log_posterior[c]);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

// --- pools ------------------------------------------------------------------

namespace {

std::vector<LabeledPoint> toy_points(std::size_t n) {
    std::vector<LabeledPoint> points(n);
    for (std::size_t i = 0; i < n; ++i) {
        points[i].x = {static_cast<double>(i), 0.0};
        points[i].label = static_cast<int>(i % 2);
    }
    return points;
}

}  // namespace

TEST_CASE("make_pool stratifies the labeled split") {
    Rng rng(0);
    const SamplePool pool = make_pool(toy_points(100), 4, 10, 2, rng);
    CHECK(pool.labeled_size() == 4);
    CHECK(pool.test().size() == 10);
    CHECK(pool.unlabeled_size() == 86);
    int per_class[2] = {0, 0};
    for (int c : pool.labeled_labels()) per_class[c] += 1;
    CHECK(per_class[0] == 2);
    CHECK(per_class[1] == 2);
}

TEST_CASE("make_pool with all data labeled leaves the unlabeled pool empty") {
    Rng rng(0);
    const SamplePool pool = make_pool(toy_points(20), 20, 0, 2, rng);
    CHECK(pool.unlabeled_size() == 0);
    CHECK(pool.labeled_size() == 20);
}

TEST_CASE("make_pool rejects infeasible sizes") {
    Rng rng(0);
    CHECK_THROWS_AS(make_pool(toy_points(10), 8, 5, 2, rng), ConfigError);
}

TEST_CASE("label_query moves exactly one sample and conserves the total") {
    Rng rng(1);
    SamplePool pool = make_pool(toy_points(30), 4, 0, 2, rng);
    const std::size_t total = pool.labeled_size() + pool.unlabeled_size();
    const SampleId id = pool.unlabeled()[5].id;
    const int label = pool.label_query(id);
    CHECK(label >= 0);
    CHECK(label < 2);
    CHECK(pool.labeled_size() == 5);
    CHECK(pool.labeled_size() + pool.unlabeled_size() == total);
    CHECK(pool.labeled()[4].id == id);
    CHECK_THROWS_AS(pool.label_query(id), StateError);  // no longer unlabeled
}

TEST_CASE("querying every sample reproduces the ground-truth labeling") {
    Rng rng(2);
    const auto points = toy_points(16);
    SamplePool pool = make_pool(points, 2, 0, 2, rng);
    while (pool.unlabeled_size() > 0) pool.label_query(pool.unlabeled()[0].id);
    CHECK(pool.labeled_size() == 16);
    for (std::size_t i = 0; i < pool.labeled_size(); ++i) {
        const auto& s = pool.labeled()[i];
        // x encodes the original index; ground truth is index % 2
        const int truth = static_cast<int>(s.x[0]) % 2;
        CHECK(pool.labeled_labels()[i] == truth);
    }
}

TEST_CASE("active-learning triplet trajectory (4,1,8)") {
    Rng rng(3);
    SamplePool pool = make_pool(toy_points(64), 4, 8, 2, rng);
    std::vector<std::size_t> sizes = {pool.labeled_size()};
    for (int round = 0; round < 4; ++round) {
        pool.label_query(pool.unlabeled()[0].id);
        sizes.push_back(pool.labeled_size());
    }
    CHECK(sizes == std::vector<std::size_t>{4, 5, 6, 7, 8});
}

// --- standardizer ------------------------------------------------------------

TEST_CASE("standardizer round-trips and normalizes") {
    const auto mix = default_mixture();
    Rng rng(5);
    auto points = mix.sample(4000, rng);
    const Standardizer st = Standardizer::fit(points);
    auto standardized = points;
    st.apply_in_place(standardized);
    double mean0 = 0.0, var0 = 0.0;
    for (const auto& p : standardized) mean0 += p.x[0];
    mean0 /= static_cast<double>(standardized.size());
    for (const auto& p : standardized) var0 += (p.x[0] - mean0) * (p.x[0] - mean0);
    var0 /= static_cast<double>(standardized.size());
    CHECK(std::abs(mean0) < 1e-12);
    CHECK(var0 == doctest::Approx(1.0).epsilon(1e-9));
    const auto back = st.invert(standardized[7].x);
    CHECK(back[0] == doctest::Approx(points[7].x[0]).epsilon(1e-12));
    CHECK(back[1] == doctest::Approx(points[7].x[1]).epsilon(1e-12));
}

// --- idx -----------------------------------------------------------------------

TEST_CASE("idx round trip is exact") {
    namespace fs = std::filesystem;
    const std::string dir = (fs::temp_directory_path() / "goldlab_idx_test").string();
    fs::create_directories(dir);
    std::vector<LabeledPoint> points(10);
    Rng rng(9);
    for (std::size_t i = 0; i < points.size(); ++i) {
        points[i].x.resize(4 * 3);
        for (double& v : points[i].x)
            v = static_cast<double>(rng.below(256)) / 255.0;
        points[i].label = static_cast<int>(rng.below(10));
    }
    write_idx(dir + "/img.idx", dir + "/lab.idx", points, 4, 3);
    const auto loaded = load_idx(dir + "/img.idx", dir + "/lab.idx");
    REQUIRE(loaded.size() == points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        CHECK(loaded[i].label == points[i].label);
        CHECK(loaded[i].x == points[i].x);
    }
}

TEST_CASE("single pixel 255 loads as feature 1.0") {
    namespace fs = std::filesystem;
    const std::string dir = (fs::temp_directory_path() / "goldlab_idx_test").string();
    fs::create_directories(dir);
    std::vector<LabeledPoint> points(1);
    points[0].x = {1.0};
    points[0].label = 7;
    write_idx(dir + "/one.idx", dir + "/onelab.idx", points, 1, 1);
    const auto loaded = load_idx(dir + "/one.idx", dir + "/onelab.idx");
    CHECK(loaded[0].x[0] == 1.0);
    CHECK(loaded[0].label == 7);
}

TEST_CASE("idx loader rejects bad magic and truncation with byte offsets") {
    namespace fs = std::filesystem;
    const std::string dir = (fs::temp_directory_path() / "goldlab_idx_test").string();
    fs::create_directories(dir);
    {
        std::ofstream bad(dir + "/bad.idx", std::ios::binary);
        const unsigned char magic[4] = {0, 0, 8, 4};  // 2052, not an image file
        bad.write(reinterpret_cast<const char*>(magic), 4);
        for (int i = 0; i < 12; ++i) bad.put(0);
    }
    {
        std::ofstream lab(dir + "/lab0.idx", std::ios::binary);
        const unsigned char magic[4] = {0, 0, 8, 1};
        lab.write(reinterpret_cast<const char*>(magic), 4);
        const unsigned char count[4] = {0, 0, 0, 0};
        lab.write(reinterpret_cast<const char*>(count), 4);
    }
    try {
        load_idx(dir + "/bad.idx", dir + "/lab0.idx");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("2051") != std::string::npos);
    }

    // truncated image payload
    std::vector<LabeledPoint> points(3);
    for (auto& p : points) p.x.assign(4, 0.5);
    write_idx(dir + "/trunc.idx", dir + "/trunclab.idx", points, 2, 2);
    {
        // cut the last image short
        const auto size = fs::file_size(dir + "/trunc.idx");
        fs::resize_file(dir + "/trunc.idx", size - 2);
    }
    CHECK_THROWS_AS(load_idx(dir + "/trunc.idx", dir + "/trunclab.idx"), FormatError);

    // count mismatch between image and label files
    write_idx(dir + "/a.idx", dir + "/alab.idx", points, 2, 2);
    std::vector<LabeledPoint> fewer(2);
    for (auto& p : fewer) p.x.assign(4, 0.5);
    write_idx(dir + "/b.idx", dir + "/blab.idx", fewer, 2, 2);
    CHECK_THROWS_AS(load_idx(dir + "/a.idx", dir + "/blab.idx"), FormatError);
}

TEST_CASE("rng streams are reproducible and forks are independent") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(123);
    for (int i = 0; i < 100; ++i) c.next_u64();
    Rng fork1 = a.fork(1);
    Rng fork2 = c.fork(1);  // same parent state, same stream id
    for (int i = 0; i < 10; ++i) CHECK(fork1.next_u64() == fork2.next_u64());
    Rng fork3 = a.fork(2);
    bool differs = false;
    Rng fork1b = a.fork(1);
    for (int i = 0; i < 10; ++i)
        if (fork1b.next_u64() != fork3.next_u64()) differs = true;
    CHECK(differs);
}
