// Small file-system helpers shared by corpus/snapshot/CLI code.
#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "ttm/errors.hpp"

namespace ttm {

// Atomic write: the content lands under a temporary name in the target
// directory and is renamed into place, so readers never observe a torn file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw ParseError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open for reading: " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace ttm
