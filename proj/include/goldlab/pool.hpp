#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "goldlab/mixture.hpp"
#include "goldlab/rng.hpp"

namespace goldlab::data {

using SampleId = std::uint32_t;

struct PoolSample {
    SampleId id = 0;
    std::vector<double> x;
};

// Labeled / unlabeled / test splits with stable sample ids. Unlabeled ground
// truth is hidden inside the pool and only reachable through label_query.
class SamplePool {
public:
    SamplePool(std::vector<PoolSample> labeled, std::vector<int> labels,
               std::vector<PoolSample> unlabeled, std::vector<int> hidden_labels,
               std::vector<LabeledPoint> test, int class_count);

    const std::vector<PoolSample>& labeled() const { return labeled_; }
    const std::vector<int>& labeled_labels() const { return labeled_labels_; }
    const std::vector<PoolSample>& unlabeled() const { return unlabeled_; }
    const std::vector<LabeledPoint>& test() const { return test_; }
    int class_count() const { return class_count_; }

    std::size_t labeled_size() const { return labeled_.size(); }
    std::size_t unlabeled_size() const { return unlabeled_.size(); }

    // Acquisition oracle: reveals the hidden label and moves the sample from
    // the unlabeled set to the labeled set. Throws StateError for an id that
    // is not (or no longer) unlabeled.
    int label_query(SampleId id);

private:
    std::vector<PoolSample> labeled_;
    std::vector<int> labeled_labels_;
    std::vector<PoolSample> unlabeled_;
    std::vector<int> hidden_labels_;  // parallel to unlabeled_
    std::vector<LabeledPoint> test_;
    int class_count_;
};

// Splits `data` into a class-stratified labeled set of size labeled_n, a test
// set of size test_n, and an unlabeled remainder. Ids index into the shuffled
// order and stay stable for the pool's lifetime.
SamplePool make_pool(const std::vector<LabeledPoint>& data, std::size_t labeled_n,
                     std::size_t test_n, int class_count, Rng& rng);

}  // namespace goldlab::data
