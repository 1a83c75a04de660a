// Layerwise Embedding Dump Format (LEDF).
//
// A dump holds one matrix per model layer (layer 0 is the embedding layer
// output), each item_count x dim, plus one metadata record per item.
//
// File layout, all integers little-endian:
//
//   0..3    magic "LEDF"
//   4..7    format version (u32, = 1)
//   8..11   layer_count (u32)
//   12..15  dim (u32)
//   16..23  item_count (u64)
//   24..27  item_kind (u32, see ItemKind)
//   28..35  metadata_bytes (u64)
//   36..    model_id: u32 length + UTF-8 bytes
//           metadata: UTF-8 JSON array of item records, metadata_bytes long
//           matrices: layer-major, each row-major f32 LE
#ifndef GEOPROBE_LEDF_HPP
#define GEOPROBE_LEDF_HPP

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoprobe {

using LayerMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace ledf {

inline constexpr char kMagic[4] = {'L', 'E', 'D', 'F'};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kFixedHeaderBytes = 36;

enum class ItemKind : std::uint32_t { word = 0, sentence = 1, corpus_token = 2 };

const char* to_string(ItemKind kind);

class Error : public std::runtime_error {
 public:
  enum class Kind {
    not_ledf,         // bad magic
    unsupported,      // unknown version or item kind
    truncated,        // stream ended before the declared content
    count_mismatch,   // metadata disagrees with the header
    invalid_metadata, // metadata parses but breaks an item invariant
    non_finite,       // NaN/Inf in a matrix
    shape_mismatch,   // matrix shapes disagree with the header
    out_of_range,     // select_rows index errors
    io,
  };

  Error(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct DumpHeader {
  std::uint32_t format_version = kFormatVersion;
  std::string model_id;
  std::uint32_t layer_count = 0;
  std::uint32_t dim = 0;
  std::uint64_t item_count = 0;
  ItemKind item_kind = ItemKind::word;
  std::uint64_t metadata_bytes = 0;

  bool operator==(const DumpHeader&) const = default;
};

struct ItemRecord {
  std::uint64_t id = 0;
  std::string surface;
  std::string source_tag;
  std::optional<std::int64_t> token_position;

  bool operator==(const ItemRecord&) const = default;
};

struct EmbeddingDump {
  DumpHeader header;
  std::vector<ItemRecord> items;
  std::vector<LayerMatrix> layers;

  /// Bit-exact comparison of floats, byte-exact on strings.
  bool operator==(const EmbeddingDump& other) const;
};

/// Builds a dump whose header fields (counts, dim, metadata size) are derived
/// from `items` and `layers`. Item ids are renumbered 0..n-1.
EmbeddingDump make_dump(std::string model_id, ItemKind kind,
                        std::vector<ItemRecord> items,
                        std::vector<LayerMatrix> layers);

/// Canonical JSON encoding of the metadata block.
std::string encode_metadata(std::span<const ItemRecord> items);

/// Throws Error on the first broken invariant. Non-finite values are reported
/// with their layer/item/column coordinates.
void validate(const EmbeddingDump& dump);

/// Serializes the dump. Nothing is written when validation fails. Returns the
/// number of bytes written.
std::uint64_t write_dump(const EmbeddingDump& dump, std::ostream& out);
void write_dump_file(const EmbeddingDump& dump, const std::string& path);

/// Streaming reader: header and metadata are read eagerly, layer matrices one
/// at a time in storage order.
class DumpReader {
 public:
  explicit DumpReader(std::istream& in);

  const DumpHeader& header() const { return header_; }
  const std::vector<ItemRecord>& items() const { return items_; }

  /// Index of the next layer read_layer() returns.
  std::uint32_t next_layer() const { return next_layer_; }
  LayerMatrix read_layer();

 private:
  std::vector<unsigned char> read_bytes(std::uint64_t count);

  std::istream& in_;
  std::uint64_t offset_ = 0;
  DumpHeader header_;
  std::vector<ItemRecord> items_;
  std::uint32_t next_layer_ = 0;
};

EmbeddingDump read_dump(std::istream& in);
EmbeddingDump read_dump_file(const std::string& path);

/// Copies the requested rows of one layer in the order given.
LayerMatrix select_rows(const EmbeddingDump& dump, std::uint32_t layer,
                        std::span<const std::uint64_t> ids);

}  // namespace ledf

using ledf::EmbeddingDump;

}  // namespace geoprobe

#endif  // GEOPROBE_LEDF_HPP
