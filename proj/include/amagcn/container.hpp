#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "amagcn/matrix.hpp"

namespace amagcn::container {

// Versioned binary file: 8-byte magic, little-endian uint64 header length, a
// JSON header describing the payload, then each array's values as
// little-endian 64-bit floats in row-major declaration order.
inline constexpr char kMagic[8] = {'A', 'G', 'C', 'N', 'B', 'I', 'N', '1'};
inline constexpr int kFormatVersion = 1;

struct NamedArray {
  std::string name;
  Matrix data;
};

struct Container {
  std::string kind;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<NamedArray> arrays;
};

void save(const std::filesystem::path& path, const Container& c);
Container load(const std::filesystem::path& path);

// True when the file starts with the container magic.
bool is_container_file(const std::filesystem::path& path);

}  // namespace amagcn::container
