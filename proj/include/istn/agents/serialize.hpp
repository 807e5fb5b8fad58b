// SPDX-License-Identifier: Apache-2.0
//
// Little-endian binary writer/reader with an FNV-1a trailer, used for
// checkpoints.

#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace istn {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class BinaryWriter {
 public:
  template <class T>
    requires std::is_arithmetic_v<T>
  void put(T v) {
    static_assert(std::endian::native == std::endian::little, "little-endian host required");
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf_.append(raw, sizeof(T));
  }
  void put_bool(bool b) { put<std::uint8_t>(b ? 1 : 0); }
  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    buf_ += s;
  }
  void put_doubles(const std::vector<double>& v) {
    put<std::uint64_t>(v.size());
    for (double d : v) put(d);
  }
  void put_matrix(const Eigen::MatrixXd& m) {
    put<std::uint64_t>(static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) put(m(r, c));
  }
  void put_vector(const Eigen::VectorXd& v) {
    put<std::uint64_t>(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) put(v(i));
  }
  void raw(const std::string& bytes) { buf_ += bytes; }

  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::string bytes) : buf_(std::move(bytes)) {}

  template <class T>
    requires std::is_arithmetic_v<T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  bool get_bool() {
    const auto b = get<std::uint8_t>();
    if (b > 1) throw CheckpointError("checkpoint: invalid boolean");
    return b == 1;
  }
  std::string get_string() {
    const auto n = size_field();
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<double> get_doubles() {
    const auto n = size_field(sizeof(double));
    std::vector<double> v(n);
    for (auto& d : v) d = get<double>();
    return v;
  }
  Eigen::MatrixXd get_matrix() {
    const auto r = size_field();
    const auto c = size_field();
    if (r != 0 && c > (buf_.size() - pos_) / sizeof(double) / r)
      throw CheckpointError("checkpoint: truncated matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = get<double>();
    return m;
  }
  Eigen::VectorXd get_vector() {
    const auto n = size_field(sizeof(double));
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = get<double>();
    return v;
  }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  std::size_t size_field(std::size_t elem = 1) {
    const auto n = get<std::uint64_t>();
    if (n > (buf_.size() - pos_) / elem) throw CheckpointError("checkpoint: truncated data");
    return static_cast<std::size_t>(n);
  }
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw CheckpointError("checkpoint: truncated data");
  }

  std::string buf_;
  std::size_t pos_ = 0;
};

inline constexpr char kCheckpointMagic[8] = {'I', 'S', 'T', 'N', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// magic | version | payload | fnv1a64(payload)
inline void write_framed(std::ostream& os, const std::string& payload) {
  BinaryWriter head;
  head.raw(std::string(kCheckpointMagic, sizeof(kCheckpointMagic)));
  head.put(kCheckpointVersion);
  head.raw(payload);
  head.put(fnv1a64(payload));
  os.write(head.bytes().data(), static_cast<std::streamsize>(head.bytes().size()));
  if (!os) throw CheckpointError("checkpoint: write failed");
}

inline std::string read_framed(std::istream& is) {
  std::string all((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  constexpr std::size_t head = sizeof(kCheckpointMagic) + sizeof(std::uint32_t);
  if (all.size() < head + sizeof(std::uint64_t)) throw CheckpointError("checkpoint: file too short");
  if (all.compare(0, sizeof(kCheckpointMagic), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0)
    throw CheckpointError("checkpoint: bad magic");
  std::uint32_t version;
  std::memcpy(&version, all.data() + sizeof(kCheckpointMagic), sizeof(version));
  if (version != kCheckpointVersion)
    throw CheckpointError("checkpoint: unsupported version " + std::to_string(version));
  std::string payload = all.substr(head, all.size() - head - sizeof(std::uint64_t));
  std::uint64_t sum;
  std::memcpy(&sum, all.data() + all.size() - sizeof(sum), sizeof(sum));
  if (sum != fnv1a64(payload)) throw CheckpointError("checkpoint: checksum mismatch (corrupted file)");
  return payload;
}

}  // namespace istn
