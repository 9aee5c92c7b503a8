#include "surgscan/dataset/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "hashing.hpp"

namespace surgscan::dataset {

std::string stratum_key(const AnnotatedImage& image) {
  return std::string(to_string(image.instrument)) + (image.is_defective() ? "/defective" : "/clean");
}

DatasetManifest stratified_split(const DatasetManifest& manifest, const SplitConfig& cfg) {
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw Error(Errc::InvalidArgument, "train_fraction must lie in (0, 1)");
  }
  if (manifest.entries.empty()) throw Error(Errc::EmptyDataset, "manifest has no entries");
  manifest.validate(false);

  std::map<std::string, std::vector<std::string>> strata;
  for (const auto& e : manifest.entries) {
    if (!e.is_original()) {
      throw Error(Errc::AlreadyAugmented, "split expects originals only, found '" + e.id + "'");
    }
    strata[stratum_key(e)].push_back(e.id);
  }

  struct Quota {
    const std::string* name;
    std::size_t size;
    std::size_t train;
    double remainder;
  };
  constexpr double kEps = 1e-9;
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (const auto& [name, ids] : strata) {
    const double exact = static_cast<double>(ids.size()) * cfg.train_fraction;
    const auto floor_count = static_cast<std::size_t>(std::floor(exact + kEps));
    double rem = exact - static_cast<double>(floor_count);
    if (rem < kEps) rem = 0.0;
    quotas.push_back({&name, ids.size(), floor_count, rem});
    assigned += floor_count;
  }

  const auto target = static_cast<std::size_t>(
      std::floor(static_cast<double>(manifest.entries.size()) * cfg.train_fraction + 0.5 + kEps));
  std::vector<Quota*> order;
  for (auto& q : quotas) {
    if (q.size > 1 && q.remainder > 0.0) order.push_back(&q);
  }
  // map iteration already sorted quotas by name, so stable_sort keeps name order on ties
  std::stable_sort(order.begin(), order.end(),
                   [](const Quota* a, const Quota* b) { return a->remainder > b->remainder; });
  for (Quota* q : order) {
    if (assigned >= target) break;
    ++q->train;
    ++assigned;
  }
  for (auto& q : quotas) {
    if (q.size == 1) q.train = 1;
  }

  DatasetManifest out = manifest;
  out.split.clear();
  std::size_t idx = 0;
  for (auto& [name, ids] : strata) {
    const Quota& q = quotas[idx++];
    std::sort(ids.begin(), ids.end());
    std::mt19937_64 gen(detail::splitmix64(cfg.seed ^ detail::fnv1a(name)));
    for (std::size_t i = ids.size(); i > 1; --i) {
      std::swap(ids[i - 1], ids[detail::bounded(gen, i)]);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      out.split[ids[i]] = i < q.train ? Split::Train : Split::Val;
    }
  }
  return out;
}

}  // namespace surgscan::dataset
