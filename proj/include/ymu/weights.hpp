#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ymu/common.hpp"
#include "ymu/model.hpp"

namespace ymu {

struct NamedTensor {
  std::vector<int> dims;
  std::vector<float> data;

  bool operator==(const NamedTensor& o) const {
    return dims == o.dims && data == o.data;
  }
};

// Insertion-ordered collection of named tensors. Order is the canonical
// enumeration order from expected_weights; save preserves it.
class WeightStore {
 public:
  int num_classes = 0;

  void put(std::string name, NamedTensor t) {
    auto it = index_.find(name);
    if (it != index_.end()) {
      entries_[it->second].second = std::move(t);
      return;
    }
    index_.emplace(name, entries_.size());
    entries_.emplace_back(std::move(name), std::move(t));
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const NamedTensor& get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
      throw std::out_of_range("weights: missing tensor '" + name + "'");
    return entries_[it->second].second;
  }

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<std::string, NamedTensor>>& entries() const {
    return entries_;
  }

  bool operator==(const WeightStore& o) const {
    return num_classes == o.num_classes && entries_ == o.entries_;
  }

 private:
  std::vector<std::pair<std::string, NamedTensor>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline WeightStore init_weights(const ModelGraph& g, std::uint64_t seed) {
  WeightStore store;
  store.num_classes = g.num_classes;
  Rng64 rng(seed);
  for (const WeightSpec& spec : expected_weights(g)) {
    NamedTensor t;
    t.dims = spec.dims;
    t.data.resize(spec.elements());
    switch (spec.init) {
      case WeightInit::UniformFanIn: {
        const double bound = 1.0 / std::sqrt(static_cast<double>(spec.fan_in));
        for (float& v : t.data) v = static_cast<float>(rng.uniform(-bound, bound));
        break;
      }
      case WeightInit::Zeros:
        break;
      case WeightInit::Ones:
        for (float& v : t.data) v = 1.0f;
        break;
      case WeightInit::Ramp:
        for (std::size_t i = 0; i < t.data.size(); ++i)
          t.data[i] = static_cast<float>(i);
        break;
    }
    store.put(spec.name, std::move(t));
  }
  return store;
}

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct ByteReader {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw InputError("weight file: truncated");
  }
  std::uint8_t u8() {
    need(1);
    return buf[pos++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(buf[pos]) |
                      static_cast<std::uint16_t>(buf[pos + 1]) << 8;
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
};

}  // namespace detail

// Binary layout: magic "YMUW"; u32 LE version (1); u32 LE tensor count;
// u32 LE class count; then per tensor: u16 LE name length, name bytes,
// u8 rank, rank u32 LE dims, element f32 LE payload. No padding anywhere.
inline void save_weights(const WeightStore& store, const std::string& path) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), {'Y', 'M', 'U', 'W'});
  detail::put_u32(out, 1);
  detail::put_u32(out, static_cast<std::uint32_t>(store.size()));
  detail::put_u32(out, static_cast<std::uint32_t>(store.num_classes));
  for (const auto& [name, tensor] : store.entries()) {
    detail::put_u16(out, static_cast<std::uint16_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    out.push_back(static_cast<std::uint8_t>(tensor.dims.size()));
    for (int d : tensor.dims) detail::put_u32(out, static_cast<std::uint32_t>(d));
    for (float v : tensor.data) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      detail::put_u32(out, bits);
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("weight file: cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw InputError("weight file: write failed for '" + path + "'");
}

inline WeightStore load_weights(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("weight file: cannot open '" + path + "'");
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(f)),
                                std::istreambuf_iterator<char>());
  detail::ByteReader r{buf};

  r.need(4);
  if (std::memcmp(buf.data(), "YMUW", 4) != 0)
    throw InputError("weight file: bad magic");
  r.pos = 4;
  const std::uint32_t version = r.u32();
  if (version != 1)
    throw InputError("weight file: unsupported version " + std::to_string(version));
  const std::uint32_t count = r.u32();

  WeightStore store;
  store.num_classes = static_cast<int>(r.u32());
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::uint16_t name_len = r.u16();
    r.need(name_len);
    std::string name(reinterpret_cast<const char*>(buf.data() + r.pos), name_len);
    r.pos += name_len;

    NamedTensor tensor;
    const std::uint8_t rank = r.u8();
    std::size_t elems = 1;
    for (int i = 0; i < rank; ++i) {
      const std::uint32_t d = r.u32();
      if (d == 0 || d > (1u << 24)) throw InputError("weight file: bad dimension");
      tensor.dims.push_back(static_cast<int>(d));
      elems *= d;
      if (elems > (1ull << 32)) throw InputError("weight file: tensor too large");
    }
    r.need(elems * 4);
    tensor.data.resize(elems);
    for (std::size_t i = 0; i < elems; ++i) {
      const std::uint32_t bits = r.u32();
      std::memcpy(&tensor.data[i], &bits, 4);
    }
    if (store.contains(name)) throw InputError("weight file: duplicate tensor '" + name + "'");
    store.put(std::move(name), std::move(tensor));
  }
  if (r.pos != buf.size()) throw InputError("weight file: trailing bytes");
  return store;
}

// Checks the store holds exactly the graph's tensor set with matching shapes.
inline void validate_weights(const ModelGraph& g, const WeightStore& store) {
  if (store.num_classes != g.num_classes)
    throw InputError("weights: class count " + std::to_string(store.num_classes) +
                     " does not match graph's " + std::to_string(g.num_classes));
  const std::vector<WeightSpec> specs = expected_weights(g);
  if (store.size() != specs.size())
    throw InputError("weights: expected " + std::to_string(specs.size()) +
                     " tensors, found " + std::to_string(store.size()));
  for (const WeightSpec& spec : specs) {
    if (!store.contains(spec.name))
      throw InputError("weights: missing tensor '" + spec.name + "'");
    const NamedTensor& t = store.get(spec.name);
    if (t.dims != spec.dims)
      throw InputError("weights: shape mismatch for '" + spec.name + "'");
  }
}

}  // namespace ymu
