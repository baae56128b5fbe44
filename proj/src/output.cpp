#include "spde/output.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace spde {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

FileWriter::FileWriter(std::filesystem::path target)
    : target_(std::move(target)), partial_(target_.string() + ".partial") {
  stream_.open(partial_, std::ios::binary | std::ios::trunc);
  if (!stream_) throw std::runtime_error("output: cannot open " + partial_.string());
}

FileWriter::~FileWriter() {
  if (!committed_ && stream_.is_open()) stream_.close();  // .partial stays behind
}

void FileWriter::line(const std::string& text) {
  stream_ << text << '\n';
}

void FileWriter::raw(const std::string& text) {
  stream_.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void FileWriter::commit() {
  if (committed_) return;
  stream_.flush();
  if (!stream_) throw std::runtime_error("output: short write to " + partial_.string());
  stream_.close();
  std::filesystem::rename(partial_, target_);
  committed_ = true;
}

namespace {

void put_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_f64_le(std::string& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

double get_f64_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  double x;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

}  // namespace

void write_snapshot(const std::filesystem::path& file, std::uint32_t step_index, const Field& X,
                    const Field& y) {
  if (X.size() != y.size()) throw std::invalid_argument("snapshot: field sizes differ");
  std::string out;
  out += "SPD1";
  put_u32_le(out, static_cast<std::uint32_t>(X.size()));
  put_u32_le(out, step_index);
  for (double v : X.v) put_f64_le(out, v);
  for (double v : y.v) put_f64_le(out, v);

  FileWriter w(file);
  w.raw(out);
  w.commit();
}

Snapshot read_snapshot(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + file.string());
  std::string data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (data.size() < 12 || data.compare(0, 4, "SPD1") != 0)
    throw std::runtime_error("snapshot: bad magic in " + file.string());
  const unsigned char* p = reinterpret_cast<const unsigned char*>(data.data());
  Snapshot s;
  s.nodes = get_u32_le(p + 4);
  s.step_index = get_u32_le(p + 8);
  const std::size_t need = 12 + 2 * static_cast<std::size_t>(s.nodes) * 8;
  if (data.size() != need) throw std::runtime_error("snapshot: truncated payload in " + file.string());
  s.X.resize(s.nodes);
  s.y.resize(s.nodes);
  for (std::uint32_t i = 0; i < s.nodes; ++i) s.X[i] = get_f64_le(p + 12 + 8 * i);
  for (std::uint32_t i = 0; i < s.nodes; ++i)
    s.y[i] = get_f64_le(p + 12 + 8 * (static_cast<std::size_t>(s.nodes) + i));
  return s;
}

}  // namespace spde
