// SPDX-License-Identifier: Apache-2.0
#pragma once

// TSEL v1 binary feature files:
//   "TSEL" | u32 version = 1 | u32 rows | u32 dims | rows*dims f32, row-major
// All integers and floats little-endian.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tsel/core.hpp"
#include "tsel/matrix.hpp"

namespace tsel::io {

inline constexpr std::uint32_t kTselVersion = 1;
inline constexpr std::size_t kTselHeaderBytes = 16;

FeatureMatrix decode_tsel(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");
std::vector<std::uint8_t> encode_tsel(const FeatureMatrix& matrix);

FeatureMatrix read_tsel(const std::filesystem::path& path);
void write_tsel(const std::filesystem::path& path, const FeatureMatrix& matrix);

/// {"checkpoints":[{"path":"...","lr":0.001},...]}; relative paths resolve
/// against the manifest's directory. Learning rates are normalized by their sum.
CheckpointFeatureStore read_manifest(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace tsel::io
