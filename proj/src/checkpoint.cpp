#include "edmol/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "edmol/error.hpp"
#include "edmol/io.hpp"

namespace edmol {

namespace {

constexpr char kMagic[4] = {'E', 'D', 'M', 'G'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return value;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw CheckpointError("truncated checkpoint at byte " + std::to_string(pos_));
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string shape_text(std::uint32_t rows, std::uint32_t cols) {
  return "[" + std::to_string(rows) + "," + std::to_string(cols) + "]";
}

}  // namespace

std::string serialize_checkpoint(const ModelParams<float>& params) {
  std::string out(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.count()));
  for (int i = 0; i < params.count(); ++i) {
    const std::string& name = params.names[i];
    const auto& t = params[i];
    put<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out += name;
    put<std::uint8_t>(out, 2);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.cols()));
    for (Eigen::Index k = 0; k < t.size(); ++k) put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(t.data()[k]));
  }
  return out;
}

ModelParams<float> deserialize_checkpoint(std::string_view bytes, const ModelConfig& config) {
  ModelParams<float> p = make_params<float>(config);
  Reader r(bytes);
  if (r.take(4) != std::string_view(kMagic, 4)) throw CheckpointError("not a checkpoint (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  const auto count = r.get<std::uint32_t>();
  // Tensors are checked in order first, so a different architecture is
  // reported by the first tensor whose name or shape disagrees.
  const int common = std::min<int>(static_cast<int>(std::min<std::uint32_t>(count, 1u << 30)), p.count());
  for (int i = 0; i < common; ++i) {
    const auto len = r.get<std::uint16_t>();
    const std::string name(r.take(len));
    if (name != p.names[i]) {
      throw CheckpointError("tensor " + std::to_string(i) + " is '" + name + "', expected '" + p.names[i] + "'");
    }
    const auto rank = r.get<std::uint8_t>();
    if (rank != 1 && rank != 2) throw CheckpointError("tensor '" + name + "' has unsupported rank " + std::to_string(rank));
    std::uint32_t rows = 1;
    std::uint32_t cols = r.get<std::uint32_t>();
    if (rank == 2) {
      rows = cols;
      cols = r.get<std::uint32_t>();
    }
    auto& t = p[i];
    if (rows != t.rows() || cols != t.cols()) {
      throw CheckpointError("shape mismatch for tensor '" + name + "': checkpoint " + shape_text(rows, cols) +
                            ", config " + shape_text(static_cast<std::uint32_t>(t.rows()),
                                                     static_cast<std::uint32_t>(t.cols())));
    }
    for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = std::bit_cast<float>(r.get<std::uint32_t>());
  }
  if (count != static_cast<std::uint32_t>(p.count())) {
    throw CheckpointError("checkpoint has " + std::to_string(count) + " tensors, config expects " +
                          std::to_string(p.count()));
  }
  if (!r.done()) throw CheckpointError("trailing bytes after last tensor");
  return p;
}

void save_checkpoint(const ModelParams<float>& params, const std::string& path) {
  write_text_file(path, serialize_checkpoint(params));
}

ModelParams<float> load_checkpoint(const std::string& path, const ModelConfig& config) {
  return deserialize_checkpoint(read_text_file(path), config);
}

}  // namespace edmol
