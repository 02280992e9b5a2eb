// SPDX-License-Identifier: Apache-2.0

#include "tsel/tsel_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "tsel/error.hpp"

namespace tsel::io {

namespace {

constexpr std::uint8_t kMagic[4] = {'T', 'S', 'E', 'L'};

std::uint32_t load_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

float load_f32(const std::uint8_t* p) { return std::bit_cast<float>(load_u32(p)); }

}  // namespace

FeatureMatrix decode_tsel(std::span<const std::uint8_t> bytes, const std::string& origin) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, origin + ": not a TSEL file (bad magic)");
  }
  if (bytes.size() < kTselHeaderBytes) {
    throw Error(ErrorCode::kTruncated, origin + ": truncated header");
  }
  const std::uint32_t version = load_u32(bytes.data() + 4);
  if (version != kTselVersion) {
    throw Error(ErrorCode::kBadVersion,
                origin + ": unsupported TSEL version " + std::to_string(version));
  }
  const std::uint64_t rows = load_u32(bytes.data() + 8);
  const std::uint64_t dims = load_u32(bytes.data() + 12);
  if (rows == 0 || dims == 0) {
    throw Error(ErrorCode::kTruncated, origin + ": empty matrix (rows and dims must be >= 1)");
  }
  const std::uint64_t expected = kTselHeaderBytes + rows * dims * 4;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::kTruncated, origin + ": truncated payload, expected " +
                                           std::to_string(expected) + " bytes, got " +
                                           std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::kTruncated, origin + ": " + std::to_string(bytes.size() - expected) +
                                           " trailing bytes after payload");
  }
  std::vector<double> data(rows * dims);
  for (std::uint64_t k = 0; k < rows * dims; ++k) {
    const std::uint64_t offset = kTselHeaderBytes + 4 * k;
    const float v = load_f32(bytes.data() + offset);
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite,
                  origin + ": non-finite value at byte offset " + std::to_string(offset) +
                      " (row " + std::to_string(k / dims) + ", dim " + std::to_string(k % dims) + ")");
    }
    data[k] = v;
  }
  return FeatureMatrix(Matrix(rows, dims, std::move(data)));
}

std::vector<std::uint8_t> encode_tsel(const FeatureMatrix& matrix) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (matrix.rows() > kMax || matrix.dims() > kMax) {
    throw Error(ErrorCode::kInvalidArgument, "matrix too large for TSEL v1");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kTselHeaderBytes + matrix.values().size() * 4);
  for (std::uint8_t b : kMagic) out.push_back(b);
  store_u32(out, kTselVersion);
  store_u32(out, static_cast<std::uint32_t>(matrix.rows()));
  store_u32(out, static_cast<std::uint32_t>(matrix.dims()));
  for (double v : matrix.values().data()) {
    store_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

FeatureMatrix read_tsel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return decode_tsel(bytes, path.string());
}

void write_tsel(const std::filesystem::path& path, const FeatureMatrix& matrix) {
  const auto bytes = encode_tsel(matrix);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

CheckpointFeatureStore read_manifest(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kIo, path.string() + ": invalid manifest JSON: " + e.what());
  }
  if (!doc.contains("checkpoints") || !doc["checkpoints"].is_array() || doc["checkpoints"].empty()) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": manifest needs a non-empty \"checkpoints\" array");
  }
  std::vector<FeatureMatrix> mats;
  std::vector<double> lrs;
  const auto base = path.parent_path();
  for (const auto& entry : doc["checkpoints"]) {
    if (!entry.contains("path") || !entry["path"].is_string() || !entry.contains("lr") ||
        !entry["lr"].is_number()) {
      throw Error(ErrorCode::kInvalidArgument,
                  path.string() + ": each checkpoint needs \"path\" (string) and \"lr\" (number)");
    }
    std::filesystem::path p = entry["path"].get<std::string>();
    if (p.is_relative()) p = base / p;
    mats.push_back(read_tsel(p));
    lrs.push_back(entry["lr"].get<double>());
  }
  return CheckpointFeatureStore::from_learning_rates(std::move(mats), lrs);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace tsel::io
