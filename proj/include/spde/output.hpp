#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "spde/spatial.hpp"

namespace spde {

// 17-significant-digit decimal rendering with '.' separator; identical input
// bits give identical text.
std::string format_double(double x);

// File writer with all-or-nothing naming: content streams into
// "<name>.partial" and the file is renamed on commit, so an interrupted run
// leaves the .partial file behind as the failure marker.
class FileWriter {
 public:
  explicit FileWriter(std::filesystem::path target);
  ~FileWriter();
  void line(const std::string& text);
  void raw(const std::string& text);
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path partial_;
  std::ofstream stream_;
  bool committed_ = false;
};

// Binary snapshot, fixed layout: magic "SPD1", u32 LE node count, u32 LE step
// index, then the state X and the transformed state y as f64 LE arrays.
void write_snapshot(const std::filesystem::path& file, std::uint32_t step_index, const Field& X,
                    const Field& y);

struct Snapshot {
  std::uint32_t nodes = 0;
  std::uint32_t step_index = 0;
  std::vector<double> X;
  std::vector<double> y;
};

// Rejects wrong magic and truncated payloads.
Snapshot read_snapshot(const std::filesystem::path& file);

}  // namespace spde
