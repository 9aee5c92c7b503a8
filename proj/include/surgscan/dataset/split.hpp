#pragma once

#include <cstdint>
#include <string>

#include "surgscan/dataset/manifest.hpp"

namespace surgscan::dataset {

struct SplitConfig {
  double train_fraction = 0.80;
  std::uint64_t seed = 0;
};

/// Stratum key: "<instrument>/defective" or "<instrument>/clean".
std::string stratum_key(const AnnotatedImage& image);

/// Seeded per-stratum shuffle with largest-remainder train counts.
///
/// Each stratum receives floor(n * f) train slots; the slots still needed to
/// reach round(N * f) overall go to the strata with the largest fractional
/// remainders, ties broken by stratum name. Single-image strata always go to
/// Train. Requires an all-Original manifest.
DatasetManifest stratified_split(const DatasetManifest& manifest, const SplitConfig& cfg);

}  // namespace surgscan::dataset
