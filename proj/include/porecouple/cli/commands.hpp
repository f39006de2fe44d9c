#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace porecouple::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInvalid = 2,
  kExitAborted = 3,
};

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(const std::vector<std::uint8_t>& bytes);

/// Prints one diagnostic per line; kExitInvalid when there are any or the file does
/// not parse.
int run_validate(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);

/// Applies the overrides, validates, runs and writes manifest.json into `out_dir`.
/// Nothing is written when validation fails.
int run_scenario(const std::filesystem::path& scenario, const std::filesystem::path& out_dir,
                 const std::vector<std::string>& overrides, std::ostream& out, std::ostream& err);

/// Converts the cell fields of an MFF file to legacy VTK.
int run_export_vtk(const std::filesystem::path& mff, const std::filesystem::path& vtk, std::ostream& out,
                   std::ostream& err);

}  // namespace porecouple::cli
