#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "xalign/error.hpp"

namespace xalign::blob {

static_assert(std::endian::native == std::endian::little, "blob I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

inline void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void put_doubles(std::ostream& out, std::span<const double> values) {
  put<std::uint64_t>(out, values.size());
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw DataError("truncated blob");
  return value;
}

inline std::string get_string(std::istream& in) {
  const auto n = get<std::uint32_t>(in);
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) throw DataError("truncated blob");
  return s;
}

inline std::vector<double> get_doubles(std::istream& in, std::size_t expected) {
  const auto n = get<std::uint64_t>(in);
  if (n != expected) throw DataError("blob tensor has " + std::to_string(n) + " values, expected " +
                                     std::to_string(expected));
  std::vector<double> v(n);
  if (n > 0 && !in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double))))
    throw DataError("truncated blob");
  return v;
}

inline void expect_magic(std::istream& in, const char (&magic)[9], std::uint32_t version) {
  char got[8];
  if (!in.read(got, 8) || std::memcmp(got, magic, 8) != 0) throw DataError("bad blob magic");
  const auto v = get<std::uint32_t>(in);
  if (v != version) throw DataError("unsupported blob version " + std::to_string(v));
}

}  // namespace xalign::blob
