#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "porecouple/meshfield/field.hpp"
#include "porecouple/meshfield/mesh.hpp"

namespace porecouple::meshfield {

inline constexpr int kMffFormatVersion = 1;

struct MffDocument {
  int format_version = kMffFormatVersion;
  Mesh mesh;
  std::vector<Field> fields;
};

/// Encodes `doc` as: "MFF1", u64 little-endian header length, UTF-8 JSON header
/// (mesh topology, field metadata, payload offsets), then little-endian float64 payloads.
std::vector<std::uint8_t> encode_mff(const MffDocument& doc);

/// Inverse of encode_mff. Throws FormatError carrying the offending byte offset.
MffDocument decode_mff(const std::vector<std::uint8_t>& bytes);

void write_mff(const std::filesystem::path& path, const MffDocument& doc);
MffDocument read_mff(const std::filesystem::path& path);

}  // namespace porecouple::meshfield
