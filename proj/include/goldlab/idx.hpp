#pragma once

#include <string>
#include <vector>

#include "goldlab/mixture.hpp"

namespace goldlab::data {

// IDX (big-endian) image/label ingestion: magic 2051 for images, 2049 for
// labels; pixels come back scaled into [0, 1]. Malformed input raises
// FormatError carrying the byte offset.
std::vector<LabeledPoint> load_idx(const std::string& images_path,
                                   const std::string& labels_path);

// Inverse of load_idx for round-trip tests and fixture generation; features
// must lie in [0, 1] and share one (rows x cols) geometry.
void write_idx(const std::string& images_path, const std::string& labels_path,
               const std::vector<LabeledPoint>& points, std::size_t rows, std::size_t cols);

}  // namespace goldlab::data
