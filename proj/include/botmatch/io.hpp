#ifndef BOTMATCH_IO_HPP
#define BOTMATCH_IO_HPP

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "botmatch/error.hpp"

namespace botmatch::io {

namespace fs = std::filesystem;

inline std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + p.string() + "' for reading");
  return in;
}

inline std::string read_file(const fs::path& p) {
  auto in = open_in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Writes via a temporary sibling and rename, so readers never see a
/// partial file.
inline void write_file_atomic(const fs::path& p, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const auto tmp = p.string() + ".tmp" + std::to_string(counter++) + "." +
                   std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::io, "failed writing '" + tmp + "'");
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorKind::io, "cannot move '" + tmp + "' to '" + p.string() + "': " + ec.message());
  }
}

}  // namespace botmatch::io

#endif  // BOTMATCH_IO_HPP
