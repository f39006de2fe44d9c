#include "porecouple/cli/commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>

#include "porecouple/cli/scenario.hpp"
#include "porecouple/core/error.hpp"
#include "porecouple/meshfield/vtk.hpp"

#ifndef PORECOUPLE_VERSION
#define PORECOUPLE_VERSION "unknown"
#endif

namespace porecouple::cli {

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path.string() + "'", 0, 0);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error("cannot write '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

int run_validate(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err) {
  try {
    const auto diagnostics = validate(scenario);
    for (const auto& d : diagnostics) out << to_string(d) << "\n";
    if (!diagnostics.empty()) return kExitInvalid;
    out << "ok\n";
    return kExitOk;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

int run_scenario(const std::filesystem::path& scenario, const std::filesystem::path& out_dir,
                 const std::vector<std::string>& overrides, std::ostream& out, std::ostream& err) {
  std::vector<std::uint8_t> bytes;
  Json doc;
  try {
    bytes = read_bytes(scenario);
    doc = parse_scenario_text(std::string(bytes.begin(), bytes.end()));
    for (const auto& o : overrides) apply_override(doc, o);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  const auto diagnostics = validate_scenario(doc);
  if (!diagnostics.empty()) {
    for (const auto& d : diagnostics) err << to_string(d) << "\n";
    return kExitInvalid;
  }

  coupling::SimulationSetup setup = setup_from_scenario(doc);
  setup.output.directory = out_dir;

  Json manifest;
  manifest["scenario"] = scenario.string();
  manifest["scenario_sha256"] = sha256_hex(bytes);
  manifest["version"] = PORECOUPLE_VERSION;
  manifest["overrides"] = overrides;
  manifest["start_time"] = utc_now();
  const auto started = std::chrono::steady_clock::now();

  coupling::SimulationResult result;
  try {
    result = coupling::run_simulation(setup);
  } catch (const Error& e) {
    // Configuration rejected by a component before the first step.
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  manifest["end_time"] = utc_now();
  manifest["elapsed_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  manifest["status"] = result.ok ? "completed" : "failed";
  if (!result.ok) manifest["message"] = result.message;
  manifest["mode"] = coupling::to_string(setup.coupling.mode);
  manifest["steps"] = result.steps;
  manifest["final_time"] = result.final_state.time;
  Json iterations = Json::array();
  for (const auto& r : result.reports) iterations.push_back(r.iterations);
  manifest["sia_iterations"] = std::move(iterations);
  manifest["reflows"] = result.reflows;
  manifest["warnings"] = result.warnings;
  manifest["mass_balance_max_relative_error"] = result.ledger.max_relative_error;
  Json files = Json::array();
  for (const auto& f : result.files) files.push_back(f.filename().string());
  manifest["files"] = std::move(files);

  try {
    std::filesystem::create_directories(out_dir);
    write_atomically(out_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAborted;
  }
  if (!result.ok) {
    err << "simulation aborted: " << result.message << "\n";
    return kExitAborted;
  }
  out << "completed " << result.steps << " steps, outputs in " << out_dir.string() << "\n";
  return kExitOk;
}

int run_export_vtk(const std::filesystem::path& mff, const std::filesystem::path& vtk, std::ostream& out,
                   std::ostream& err) {
  try {
    const auto doc = meshfield::read_mff(mff);
    meshfield::write_vtk(vtk, doc);
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitAborted;
  }
  out << "wrote " << vtk.string() << "\n";
  return kExitOk;
}

}  // namespace porecouple::cli
