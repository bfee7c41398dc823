#include "amagcn/container.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "amagcn/errors.hpp"

namespace amagcn::container {

namespace {

using nlohmann::json;

void put_u64_le(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint64_t get_u64_le(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void put_doubles_le(std::ostream& out, const std::vector<double>& values) {
  for (double d : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64_le(out, bits);
  }
}

void get_doubles_le(std::istream& in, std::vector<double>& values) {
  for (double& d : values) {
    const std::uint64_t bits = get_u64_le(in);
    std::memcpy(&d, &bits, 8);
  }
}

}  // namespace

void save(const std::filesystem::path& path, const Container& c) {
  json header;
  header["format_version"] = kFormatVersion;
  header["kind"] = c.kind;
  header["seed"] = c.seed;
  header["config_hash"] = c.config_hash;
  json arrays = json::array();
  for (const NamedArray& a : c.arrays)
    arrays.push_back({{"name", a.name}, {"rows", a.data.rows}, {"cols", a.data.cols}});
  header["arrays"] = std::move(arrays);
  const std::string header_bytes = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put_u64_le(out, header_bytes.size());
  out.write(header_bytes.data(), static_cast<std::streamsize>(header_bytes.size()));
  for (const NamedArray& a : c.arrays) put_doubles_le(out, a.data.data);
  if (!out) throw DataError("write failed: " + path.string());
}

Container load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());

  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw DataError("not a binary container (bad magic): " + path.string());

  const std::uint64_t header_len = get_u64_le(in);
  std::string header_bytes(header_len, '\0');
  in.read(header_bytes.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw DataError("truncated container header: " + path.string());

  json header;
  try {
    header = json::parse(header_bytes);
  } catch (const json::exception& e) {
    throw DataError("container header is not valid JSON: " + std::string(e.what()));
  }
  if (header.value("format_version", -1) != kFormatVersion)
    throw DataError("unsupported container format version in " + path.string());

  Container c;
  c.kind = header.value("kind", "");
  c.seed = header.value("seed", std::uint64_t{0});
  c.config_hash = header.value("config_hash", "");
  for (const json& a : header.at("arrays")) {
    NamedArray arr;
    arr.name = a.at("name").get<std::string>();
    arr.data = Matrix(a.at("rows").get<std::size_t>(), a.at("cols").get<std::size_t>());
    get_doubles_le(in, arr.data.data);
    if (!in) throw DataError("truncated array '" + arr.name + "' in " + path.string());
    c.arrays.push_back(std::move(arr));
  }
  return c;
}

bool is_container_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[8];
  in.read(magic, 8);
  return in && std::memcmp(magic, kMagic, 8) == 0;
}

}  // namespace amagcn::container
