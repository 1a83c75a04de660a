#include "geoprobe/ledf.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace geoprobe::ledf {

namespace {

using nlohmann::json;

constexpr std::uint64_t kReadChunk = std::uint64_t{1} << 20;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void append_floats_le(std::string& out, const LayerMatrix& m) {
  const auto count = static_cast<std::size_t>(m.size());
  const std::size_t start = out.size();
  out.resize(start + count * 4);
  char* dst = out.data() + start;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(dst, m.data(), count * 4);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(m.data()[i]);
      for (int b = 0; b < 4; ++b) dst[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
  }
}

ItemRecord parse_item(const json& j, std::size_t index) {
  auto fail = [index](const std::string& why) {
    return Error(Error::Kind::invalid_metadata,
                 "metadata item " + std::to_string(index) + ": " + why);
  };
  if (!j.is_object()) throw fail("not an object");
  ItemRecord item;
  auto id = j.find("id");
  if (id == j.end() || !id->is_number_unsigned()) throw fail("missing or non-integer id");
  item.id = id->get<std::uint64_t>();
  if (item.id != index) {
    throw fail("id " + std::to_string(item.id) + " out of sequence");
  }
  auto surface = j.find("surface");
  if (surface == j.end() || !surface->is_string()) throw fail("missing surface");
  item.surface = surface->get<std::string>();
  if (item.surface.empty()) throw fail("empty surface");
  auto tag = j.find("source_tag");
  if (tag != j.end()) {
    if (!tag->is_string()) throw fail("source_tag is not a string");
    item.source_tag = tag->get<std::string>();
  }
  auto pos = j.find("token_position");
  if (pos != j.end() && !pos->is_null()) {
    if (!pos->is_number_integer()) throw fail("token_position is not an integer");
    item.token_position = pos->get<std::int64_t>();
  }
  return item;
}

}  // namespace

const char* to_string(ItemKind kind) {
  switch (kind) {
    case ItemKind::word: return "word";
    case ItemKind::sentence: return "sentence";
    case ItemKind::corpus_token: return "corpus-token";
  }
  return "unknown";
}

bool EmbeddingDump::operator==(const EmbeddingDump& other) const {
  if (header != other.header || items != other.items ||
      layers.size() != other.layers.size()) {
    return false;
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& a = layers[l];
    const auto& b = other.layers[l];
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    if (std::memcmp(a.data(), b.data(), sizeof(float) * a.size()) != 0) return false;
  }
  return true;
}

std::string encode_metadata(std::span<const ItemRecord> items) {
  json array = json::array();
  for (const auto& item : items) {
    json j;
    j["id"] = item.id;
    j["surface"] = item.surface;
    j["source_tag"] = item.source_tag;
    if (item.token_position) j["token_position"] = *item.token_position;
    array.push_back(std::move(j));
  }
  return array.dump();
}

EmbeddingDump make_dump(std::string model_id, ItemKind kind,
                        std::vector<ItemRecord> items,
                        std::vector<LayerMatrix> layers) {
  for (std::size_t i = 0; i < items.size(); ++i) items[i].id = i;
  EmbeddingDump dump;
  dump.header.model_id = std::move(model_id);
  dump.header.item_kind = kind;
  dump.header.layer_count = static_cast<std::uint32_t>(layers.size());
  dump.header.dim = layers.empty() ? 0 : static_cast<std::uint32_t>(layers.front().cols());
  dump.header.item_count = items.size();
  dump.header.metadata_bytes = encode_metadata(items).size();
  dump.items = std::move(items);
  dump.layers = std::move(layers);
  return dump;
}

void validate(const EmbeddingDump& dump) {
  const auto& h = dump.header;
  if (h.format_version != kFormatVersion) {
    throw Error(Error::Kind::unsupported,
                "unsupported LEDF version " + std::to_string(h.format_version));
  }
  if (h.layer_count < 1 || h.dim < 1 || h.item_count < 1) {
    throw Error(Error::Kind::shape_mismatch,
                "layer_count, dim and item_count must all be at least 1");
  }
  if (dump.items.size() != h.item_count) {
    throw Error(Error::Kind::count_mismatch,
                "metadata count mismatch: header declares " + std::to_string(h.item_count) +
                    " items, metadata holds " + std::to_string(dump.items.size()));
  }
  for (std::size_t i = 0; i < dump.items.size(); ++i) {
    if (dump.items[i].id != i) {
      throw Error(Error::Kind::invalid_metadata,
                  "item ids must be 0..item_count-1 without gaps (item " + std::to_string(i) + ")");
    }
    if (dump.items[i].surface.empty()) {
      throw Error(Error::Kind::invalid_metadata,
                  "item " + std::to_string(i) + " has an empty surface");
    }
  }
  if (encode_metadata(dump.items).size() != h.metadata_bytes) {
    throw Error(Error::Kind::count_mismatch,
                "metadata count mismatch: header metadata_bytes disagrees with the encoded items");
  }
  if (dump.layers.size() != h.layer_count) {
    throw Error(Error::Kind::shape_mismatch,
                "header declares " + std::to_string(h.layer_count) + " layers, dump holds " +
                    std::to_string(dump.layers.size()));
  }
  for (std::size_t l = 0; l < dump.layers.size(); ++l) {
    const auto& m = dump.layers[l];
    if (static_cast<std::uint64_t>(m.rows()) != h.item_count ||
        static_cast<std::uint64_t>(m.cols()) != h.dim) {
      std::ostringstream msg;
      msg << "layer " << l << " is " << m.rows() << "x" << m.cols() << ", header declares "
          << h.item_count << "x" << h.dim;
      throw Error(Error::Kind::shape_mismatch, msg.str());
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (!std::isfinite(m(r, c))) {
          std::ostringstream msg;
          msg << "non-finite value at layer " << l << ", item " << r << ", column " << c;
          throw Error(Error::Kind::non_finite, msg.str());
        }
      }
    }
  }
}

std::uint64_t write_dump(const EmbeddingDump& dump, std::ostream& out) {
  validate(dump);
  const auto& h = dump.header;

  std::string head;
  head.append(kMagic, 4);
  put_u32(head, h.format_version);
  put_u32(head, h.layer_count);
  put_u32(head, h.dim);
  put_u64(head, h.item_count);
  put_u32(head, static_cast<std::uint32_t>(h.item_kind));
  put_u64(head, h.metadata_bytes);
  put_u32(head, static_cast<std::uint32_t>(h.model_id.size()));
  head += h.model_id;
  head += encode_metadata(dump.items);

  std::uint64_t written = head.size();
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  std::string block;
  for (const auto& layer : dump.layers) {
    block.clear();
    append_floats_le(block, layer);
    out.write(block.data(), static_cast<std::streamsize>(block.size()));
    written += block.size();
  }
  if (!out) throw Error(Error::Kind::io, "failed writing LEDF stream");
  return written;
}

void write_dump_file(const EmbeddingDump& dump, const std::string& path) {
  validate(dump);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Error::Kind::io, "cannot open " + path + " for writing");
  write_dump(dump, out);
}

std::vector<unsigned char> DumpReader::read_bytes(std::uint64_t count) {
  // Grow in bounded chunks so a lying header cannot force a huge allocation
  // ahead of the bytes actually present.
  std::vector<unsigned char> buf;
  buf.reserve(static_cast<std::size_t>(std::min(count, kReadChunk)));
  while (buf.size() < count) {
    const auto want = static_cast<std::size_t>(std::min<std::uint64_t>(count - buf.size(), kReadChunk));
    const std::size_t start = buf.size();
    buf.resize(start + want);
    in_.read(reinterpret_cast<char*>(buf.data() + start), static_cast<std::streamsize>(want));
    const auto got = static_cast<std::uint64_t>(in_.gcount());
    offset_ += got;
    if (got != want) {
      throw Error(Error::Kind::truncated,
                  "unexpected end of dump at byte " + std::to_string(offset_));
    }
  }
  return buf;
}

DumpReader::DumpReader(std::istream& in) : in_(in) {
  // Magic first, so short non-LEDF inputs still report as such.
  std::vector<unsigned char> magic(4, 0);
  in_.read(reinterpret_cast<char*>(magic.data()), 4);
  const auto got = static_cast<std::uint64_t>(in_.gcount());
  offset_ = got;
  if (got < 4 || std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw Error(Error::Kind::not_ledf, "not a LEDF file");
  }

  const auto fixed = read_bytes(kFixedHeaderBytes - 4);
  const unsigned char* p = fixed.data();
  header_.format_version = get_u32(p);
  header_.layer_count = get_u32(p + 4);
  header_.dim = get_u32(p + 8);
  header_.item_count = get_u64(p + 12);
  const std::uint32_t kind = get_u32(p + 20);
  header_.metadata_bytes = get_u64(p + 24);

  if (header_.format_version != kFormatVersion) {
    throw Error(Error::Kind::unsupported,
                "unsupported LEDF version " + std::to_string(header_.format_version));
  }
  if (kind > static_cast<std::uint32_t>(ItemKind::corpus_token)) {
    throw Error(Error::Kind::unsupported, "unknown item kind code " + std::to_string(kind));
  }
  header_.item_kind = static_cast<ItemKind>(kind);
  if (header_.layer_count < 1 || header_.dim < 1 || header_.item_count < 1) {
    throw Error(Error::Kind::shape_mismatch,
                "layer_count, dim and item_count must all be at least 1");
  }

  const auto len_bytes = read_bytes(4);
  const auto model_bytes = read_bytes(get_u32(len_bytes.data()));
  header_.model_id.assign(model_bytes.begin(), model_bytes.end());

  const auto meta_bytes = read_bytes(header_.metadata_bytes);
  json meta = json::parse(meta_bytes.begin(), meta_bytes.end(), nullptr, false);
  if (meta.is_discarded() || !meta.is_array()) {
    throw Error(Error::Kind::invalid_metadata, "metadata block is not a JSON array");
  }
  if (meta.size() != header_.item_count) {
    throw Error(Error::Kind::count_mismatch,
                "metadata count mismatch: header declares " + std::to_string(header_.item_count) +
                    " items, metadata holds " + std::to_string(meta.size()));
  }
  items_.reserve(meta.size());
  for (std::size_t i = 0; i < meta.size(); ++i) items_.push_back(parse_item(meta[i], i));
}

LayerMatrix DumpReader::read_layer() {
  if (next_layer_ >= header_.layer_count) {
    throw Error(Error::Kind::out_of_range, "all layers already read");
  }
  const std::uint64_t count = header_.item_count * header_.dim;
  const auto bytes = read_bytes(count * 4);
  LayerMatrix m(static_cast<Eigen::Index>(header_.item_count), static_cast<Eigen::Index>(header_.dim));
  float* dst = m.data();
  for (std::uint64_t i = 0; i < count; ++i) {
    const float v = std::bit_cast<float>(get_u32(bytes.data() + 4 * i));
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite value at layer " << next_layer_ << ", item " << i / header_.dim
          << ", column " << i % header_.dim;
      throw Error(Error::Kind::non_finite, msg.str());
    }
    dst[i] = v;
  }
  ++next_layer_;
  return m;
}

EmbeddingDump read_dump(std::istream& in) {
  DumpReader reader(in);
  EmbeddingDump dump;
  dump.header = reader.header();
  dump.items = reader.items();
  dump.layers.reserve(dump.header.layer_count);
  while (reader.next_layer() < dump.header.layer_count) dump.layers.push_back(reader.read_layer());
  return dump;
}

EmbeddingDump read_dump_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Error::Kind::io, "cannot open " + path);
  return read_dump(in);
}

LayerMatrix select_rows(const EmbeddingDump& dump, std::uint32_t layer,
                        std::span<const std::uint64_t> ids) {
  if (layer >= dump.layers.size()) {
    throw Error(Error::Kind::out_of_range,
                "layer " + std::to_string(layer) + " out of range (dump has " +
                    std::to_string(dump.layers.size()) + " layers)");
  }
  const auto& source = dump.layers[layer];
  LayerMatrix out(static_cast<Eigen::Index>(ids.size()), source.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= static_cast<std::uint64_t>(source.rows())) {
      throw Error(Error::Kind::out_of_range,
                  "item id " + std::to_string(ids[i]) + " out of range (dump has " +
                      std::to_string(source.rows()) + " items)");
    }
    out.row(static_cast<Eigen::Index>(i)) = source.row(static_cast<Eigen::Index>(ids[i]));
  }
  return out;
}

}  // namespace geoprobe::ledf
