#include "enacode/io.hpp"

#include "enacode/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace enacode::io {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path())
    fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write " + tmp.string());
    out << data;
    if (!out.flush())
      throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

} // namespace enacode::io
