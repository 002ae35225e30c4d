#pragma once
// Output plumbing: SHA-256 content hashes, CSV tables with round-trip
// number formatting, and the run manifest.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace swl::io {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Shortest representation that parses back to the same double.
std::string number(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  // Cells are written verbatim; use number() for doubles.
  void row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct ManifestCheck {
  std::string name;
  bool pass = false;
  bool hard = false;  // hard failures make the run exit nonzero
  std::string message;
};

struct ManifestFile {
  std::string name;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct Manifest {
  std::string tool = "swl";
  std::string version;
  std::string kind;
  std::string config_sha256;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  unsigned threads = 1;
  std::vector<std::string> advisories;
  std::vector<ManifestCheck> checks;
  std::vector<ManifestFile> files;
  int exit_status = 0;

  std::string to_json() const;
};

// Writes `content` under `dir` and records it in the manifest.
void write_output(const std::filesystem::path& dir, const std::string& name, std::string_view content,
                  Manifest& manifest);

}  // namespace swl::io
