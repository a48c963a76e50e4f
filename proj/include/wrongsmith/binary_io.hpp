#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wrongsmith/tensor.hpp"

namespace wrongsmith {

// Little-endian encoder for model files.
class BinaryWriter {
 public:
  void magic(std::string_view four_cc) { bytes_.append(four_cc); }
  void u64(std::uint64_t v);
  void f64(double v);
  void string(std::string_view s);
  void vector(const Vector& v);

  const std::string& bytes() const { return bytes_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::string bytes_;
};

class BinaryReader {
 public:
  // Throws IoError when the file cannot be read.
  static BinaryReader open(const std::filesystem::path& path);
  explicit BinaryReader(std::string bytes) : bytes_(std::move(bytes)) {}

  // Each accessor throws ConfigError on truncation or mismatch.
  void expect_magic(std::string_view four_cc);
  std::uint64_t u64();
  double f64();
  std::string string();
  // Reads exactly `expected` doubles into `out`.
  void vector(Vector& out, std::size_t expected);
  void expect_end() const;

 private:
  void need(std::size_t n) const;

  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace wrongsmith
