#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "jargon/autograd.hpp"
#include "jargon/error.hpp"
#include "jargon/io.hpp"

namespace jargon {

/// Binary archive of named float64 matrices.
///
///   "JGTA" | u32 version | u32 count | count x { u32 name_len | name |
///   u32 rows | u32 cols | rows*cols float64 (row-major) }
///
/// All integers and floats little-endian.
class TensorArchive {
 public:
  static constexpr std::uint32_t kVersion = 1;

  void put(const std::string& name, const nn::Matrix& m) { tensors_[name] = m; }
  void put(const nn::Parameter& p) { put(p.name, p.value); }

  const nn::Matrix& get(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw CheckpointError("missing tensor '" + name + "'");
    return it->second;
  }

  /// Copies a stored tensor into p, checking the shape.
  void load_into(nn::Parameter& p) const {
    const auto& m = get(p.name);
    if (m.rows() != p.value.rows() || m.cols() != p.value.cols()) {
      throw CheckpointError("shape mismatch for '" + p.name + "'");
    }
    p.value = m;
  }

  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  std::size_t size() const { return tensors_.size(); }

  std::string serialize() const {
    static_assert(std::endian::native == std::endian::little, "archive writer assumes little-endian host");
    std::string out = "JGTA";
    auto u32 = [&](std::uint32_t v) { out.append(reinterpret_cast<const char*>(&v), 4); };
    u32(kVersion);
    u32(static_cast<std::uint32_t>(tensors_.size()));
    for (const auto& [name, m] : tensors_) {
      u32(static_cast<std::uint32_t>(name.size()));
      out += name;
      u32(static_cast<std::uint32_t>(m.rows()));
      u32(static_cast<std::uint32_t>(m.cols()));
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          const double v = m(r, c);
          out.append(reinterpret_cast<const char*>(&v), 8);
        }
      }
    }
    return out;
  }

  static TensorArchive deserialize(const std::string& bytes) {
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
      if (pos + n > bytes.size()) throw CheckpointError("truncated tensor archive");
    };
    auto u32 = [&] {
      need(4);
      std::uint32_t v;
      std::memcpy(&v, bytes.data() + pos, 4);
      pos += 4;
      return v;
    };
    need(4);
    if (bytes.compare(0, 4, "JGTA") != 0) throw CheckpointError("bad archive magic");
    pos = 4;
    if (u32() != kVersion) throw CheckpointError("unsupported archive version");
    const std::uint32_t count = u32();
    TensorArchive a;
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint32_t len = u32();
      need(len);
      std::string name = bytes.substr(pos, len);
      pos += len;
      const std::uint32_t rows = u32(), cols = u32();
      nn::Matrix m(rows, cols);
      need(static_cast<std::size_t>(rows) * cols * 8);
      for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
          double v;
          std::memcpy(&v, bytes.data() + pos, 8);
          pos += 8;
          m(r, c) = v;
        }
      }
      a.tensors_[name] = std::move(m);
    }
    return a;
  }

  void save(const std::filesystem::path& path) const { io::write_atomic(path, serialize()); }
  static TensorArchive load(const std::filesystem::path& path) { return deserialize(io::read_file(path)); }

 private:
  std::map<std::string, nn::Matrix> tensors_;
};

}  // namespace jargon
