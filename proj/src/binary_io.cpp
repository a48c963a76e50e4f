#include "wrongsmith/binary_io.hpp"

#include <fstream>
#include <sstream>

#include "wrongsmith/error.hpp"

namespace wrongsmith {
namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t out = 0;
    for (int k = 0; k < 8; ++k) out |= ((v >> (8 * k)) & 0xFF) << (8 * (7 - k));
    return out;
  }
  return v;
}

}  // namespace

void BinaryWriter::u64(std::uint64_t v) {
  const std::uint64_t le = to_little(v);
  char buf[8];
  std::memcpy(buf, &le, 8);
  bytes_.append(buf, 8);
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::string(std::string_view s) {
  u64(s.size());
  bytes_.append(s);
}

void BinaryWriter::vector(const Vector& v) {
  for (double x : v) f64(x);
}

void BinaryWriter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

BinaryReader BinaryReader::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return BinaryReader(buffer.str());
}

void BinaryReader::need(std::size_t n) const {
  if (bytes_.size() - pos_ < n) throw ConfigError("model file truncated");
}

void BinaryReader::expect_magic(std::string_view four_cc) {
  need(four_cc.size());
  if (std::string_view(bytes_).substr(pos_, four_cc.size()) != four_cc) {
    throw ConfigError("bad model magic, expected '" + std::string(four_cc) + "'");
  }
  pos_ += four_cc.size();
}

std::uint64_t BinaryReader::u64() {
  need(8);
  std::uint64_t le;
  std::memcpy(&le, bytes_.data() + pos_, 8);
  pos_ += 8;
  return to_little(le);
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::string() {
  const std::uint64_t n = u64();
  need(n);
  std::string s = bytes_.substr(pos_, n);
  pos_ += n;
  return s;
}

void BinaryReader::vector(Vector& out, std::size_t expected) {
  need(expected * 8);
  out.resize(expected);
  for (double& x : out) x = f64();
}

void BinaryReader::expect_end() const {
  if (pos_ != bytes_.size()) throw ConfigError("trailing bytes in model file");
}

}  // namespace wrongsmith
