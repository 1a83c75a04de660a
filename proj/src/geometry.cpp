#include "geoprobe/geometry.hpp"

#include "parallel.hpp"

#include <array>
#include <random>

namespace geoprobe {

namespace {

// Uniform integer in [0, bound) by rejection, so the stream of indices depends
// only on the engine and not on the standard library's distribution code.
std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine();
  while (x >= limit) x = engine();
  return x % bound;
}

Eigen::VectorXd mean_profile(const LayerMatrix& m, std::span<const std::uint64_t> ids,
                             std::span<const int> ks, MagnitudeMode mode) {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ks.size()));
  for (std::uint64_t id : ids) {
    const auto profile = magnitude_profile(m.row(static_cast<Eigen::Index>(id)), ks, mode);
    for (std::size_t j = 0; j < profile.size(); ++j) sums(static_cast<Eigen::Index>(j)) += profile[j];
  }
  return sums / static_cast<double>(ids.size());
}

}  // namespace

bool is_special_token(std::string_view surface) {
  static constexpr std::array<std::string_view, 2> kSpecial = {"<|startoftext|>", "<|endoftext|>"};
  return std::find(kSpecial.begin(), kSpecial.end(), surface) != kSpecial.end();
}

std::vector<std::uint64_t> draw_sample(std::span<const ledf::ItemRecord> items,
                                       const SampleSpec& spec) {
  std::vector<std::uint64_t> pool;
  pool.reserve(items.size());
  for (const auto& item : items) {
    if (spec.eligibility == Eligibility::exclude_special_tokens && is_special_token(item.surface)) {
      continue;
    }
    pool.push_back(item.id);
  }
  if (spec.sample_size < 2) {
    throw GeometryError("sample_size must be at least 2");
  }
  if (spec.sample_size > pool.size()) {
    throw GeometryError("sample_size " + std::to_string(spec.sample_size) + " exceeds the " +
                        std::to_string(pool.size()) + " eligible items");
  }

  // Partial Fisher-Yates: the first sample_size slots end up a uniform draw.
  std::mt19937_64 engine(spec.seed);
  for (std::size_t i = 0; i < spec.sample_size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(engine, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(spec.sample_size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::uint64_t> draw_sample(const EmbeddingDump& dump, const SampleSpec& spec) {
  return draw_sample(dump.items, spec);
}

SelfSimilarityResult layer_self_similarity(const EmbeddingDump& dump, const SampleSpec& spec) {
  SelfSimilarityResult result;
  result.spec = spec;
  result.item_ids = draw_sample(dump, spec);
  result.per_layer.assign(dump.layers.size(), 0.0);
  detail::parallel_for(dump.layers.size(), [&](std::size_t layer) {
    const LayerMatrix rows =
        ledf::select_rows(dump, static_cast<std::uint32_t>(layer), result.item_ids);
    result.per_layer[layer] = self_similarity(rows);
  });
  return result;
}

MagnitudeResult layer_magnitude(const EmbeddingDump& dump, std::span<const int> ks,
                                const SampleSpec& spec, MagnitudeMode mode) {
  if (ks.empty()) throw GeometryError("layer_magnitude: no k values given");
  MagnitudeResult result;
  result.ks.assign(ks.begin(), ks.end());
  result.spec = spec;
  result.item_ids = draw_sample(dump, spec);
  result.per_layer_per_k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dump.layers.size()),
                                                 static_cast<Eigen::Index>(ks.size()));
  detail::parallel_for(dump.layers.size(), [&](std::size_t layer) {
    result.per_layer_per_k.row(static_cast<Eigen::Index>(layer)) =
        mean_profile(dump.layers[layer], result.item_ids, ks, mode).transpose();
  });
  return result;
}

SelfSimilarityResult layer_self_similarity(ledf::DumpReader& reader, const SampleSpec& spec) {
  if (reader.next_layer() != 0) throw GeometryError("reader already advanced past layer 0");
  SelfSimilarityResult result;
  result.spec = spec;
  result.item_ids = draw_sample(reader.items(), spec);
  const auto layers = reader.header().layer_count;
  result.per_layer.reserve(layers);
  for (std::uint32_t layer = 0; layer < layers; ++layer) {
    const LayerMatrix m = reader.read_layer();
    LayerMatrix rows(static_cast<Eigen::Index>(result.item_ids.size()), m.cols());
    for (std::size_t i = 0; i < result.item_ids.size(); ++i) {
      rows.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(result.item_ids[i]));
    }
    result.per_layer.push_back(self_similarity(rows));
  }
  return result;
}

MagnitudeResult layer_magnitude(ledf::DumpReader& reader, std::span<const int> ks,
                                const SampleSpec& spec, MagnitudeMode mode) {
  if (ks.empty()) throw GeometryError("layer_magnitude: no k values given");
  if (reader.next_layer() != 0) throw GeometryError("reader already advanced past layer 0");
  MagnitudeResult result;
  result.ks.assign(ks.begin(), ks.end());
  result.spec = spec;
  result.item_ids = draw_sample(reader.items(), spec);
  const auto layers = reader.header().layer_count;
  result.per_layer_per_k.resize(layers, static_cast<Eigen::Index>(ks.size()));
  for (std::uint32_t layer = 0; layer < layers; ++layer) {
    const LayerMatrix m = reader.read_layer();
    result.per_layer_per_k.row(layer) = mean_profile(m, result.item_ids, ks, mode).transpose();
  }
  return result;
}

const char* to_string(MagnitudeMode mode) {
  return mode == MagnitudeMode::l1 ? "l1" : "l2";
}

const char* to_string(Eligibility eligibility) {
  return eligibility == Eligibility::all_items ? "all_items" : "exclude_special_tokens";
}

}  // namespace geoprobe
