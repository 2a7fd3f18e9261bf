#include "goldlab/pool.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "goldlab/errors.hpp"

namespace goldlab::data {

SamplePool::SamplePool(std::vector<PoolSample> labeled, std::vector<int> labels,
                       std::vector<PoolSample> unlabeled, std::vector<int> hidden_labels,
                       std::vector<LabeledPoint> test, int class_count)
    : labeled_(std::move(labeled)),
      labeled_labels_(std::move(labels)),
      unlabeled_(std::move(unlabeled)),
      hidden_labels_(std::move(hidden_labels)),
      test_(std::move(test)),
      class_count_(class_count) {
    if (labeled_.size() != labeled_labels_.size() || unlabeled_.size() != hidden_labels_.size())
        throw ConfigError("SamplePool: parallel label arrays out of sync");
    for (int c : labeled_labels_)
        if (c < 0 || c >= class_count_)
            throw ConfigError("SamplePool: labeled class " + std::to_string(c) +
                              " outside [0, " + std::to_string(class_count_) + ")");
}

int SamplePool::label_query(SampleId id) {
    auto it = std::find_if(unlabeled_.begin(), unlabeled_.end(),
                           [id](const PoolSample& s) { return s.id == id; });
    if (it == unlabeled_.end())
        throw StateError("label_query: sample " + std::to_string(id) + " is not unlabeled");
    const std::size_t pos = static_cast<std::size_t>(it - unlabeled_.begin());
    const int label = hidden_labels_[pos];
    labeled_.push_back(std::move(*it));
    labeled_labels_.push_back(label);
    unlabeled_.erase(unlabeled_.begin() + static_cast<std::ptrdiff_t>(pos));
    hidden_labels_.erase(hidden_labels_.begin() + static_cast<std::ptrdiff_t>(pos));
    return label;
}

SamplePool make_pool(const std::vector<LabeledPoint>& data, std::size_t labeled_n,
                     std::size_t test_n, int class_count, Rng& rng) {
    if (labeled_n + test_n > data.size())
        throw ConfigError("make_pool: labeled_n + test_n = " +
                          std::to_string(labeled_n + test_n) + " exceeds data size " +
                          std::to_string(data.size()));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<LabeledPoint> test;
    test.reserve(test_n);
    for (std::size_t i = 0; i < test_n; ++i) test.push_back(data[order[i]]);

    // Stratified labeled pick from the remainder: round-robin over classes so
    // each class gets floor/ceil(labeled_n / K) where feasible.
    std::vector<std::vector<std::size_t>> by_class(class_count);
    for (std::size_t i = test_n; i < order.size(); ++i) {
        const int c = data[order[i]].label;
        if (c < 0 || c >= class_count)
            throw ConfigError("make_pool: sample class " + std::to_string(c) +
                              " outside [0, " + std::to_string(class_count) + ")");
        by_class[c].push_back(order[i]);
    }
    std::vector<std::size_t> picked;
    std::vector<std::size_t> cursor(class_count, 0);
    int cls = 0;
    std::size_t stalled = 0;
    while (picked.size() < labeled_n && stalled < static_cast<std::size_t>(class_count)) {
        auto& bucket = by_class[cls];
        if (cursor[cls] < bucket.size()) {
            picked.push_back(bucket[cursor[cls]++]);
            stalled = 0;
        } else {
            ++stalled;
        }
        cls = (cls + 1) % class_count;
    }
    if (picked.size() < labeled_n)
        throw ConfigError("make_pool: not enough samples to fill the labeled split");

    std::vector<bool> taken(data.size(), false);
    for (std::size_t i = 0; i < test_n; ++i) taken[order[i]] = true;
    for (std::size_t idx : picked) taken[idx] = true;

    std::vector<PoolSample> labeled;
    std::vector<int> labels;
    SampleId next_id = 0;
    // Ids follow the shuffled order so they are stable and rng-reproducible.
    std::vector<SampleId> id_of(data.size(), 0);
    for (std::size_t i = test_n; i < order.size(); ++i) id_of[order[i]] = next_id++;

    for (std::size_t idx : picked) {
        labeled.push_back({id_of[idx], data[idx].x});
        labels.push_back(data[idx].label);
    }
    std::vector<PoolSample> unlabeled;
    std::vector<int> hidden;
    for (std::size_t i = test_n; i < order.size(); ++i) {
        const std::size_t idx = order[i];
        if (taken[idx]) continue;
        unlabeled.push_back({id_of[idx], data[idx].x});
        hidden.push_back(data[idx].label);
    }
    return SamplePool(std::move(labeled), std::move(labels), std::move(unlabeled),
                      std::move(hidden), std::move(test), class_count);
}

}  // namespace goldlab::data
