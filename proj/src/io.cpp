#include "binsense/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace binsense::io {

namespace {

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r\n");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r\n");
  return s.substr(from, to - from + 1);
}

} // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream out;
  out << f.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
}

Vec read_vector_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  Vec out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw std::runtime_error("malformed vector file: " + path);
  return out;
}

void write_vector_file(const std::string& path, const Vec& v) {
  std::ostringstream out;
  char buf[64];
  for (const double x : v) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out << buf << '\n';
  }
  write_text_file(path, out.str());
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  return parse_key_values(read_text_file(path));
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return {};
  if (t.find('-') != std::string::npos) throw std::runtime_error("bad list: " + text);
  std::vector<std::size_t> out;
  if (t.find(':') != std::string::npos) {
    std::size_t start = 0, stop = 0, step = 1;
    char c1 = 0, c2 = 0;
    std::istringstream in(t);
    if (!(in >> start >> c1 >> stop) || c1 != ':')
      throw std::runtime_error("bad range: " + text);
    if (in >> c2) {
      if (c2 != ':' || !(in >> step) || step == 0)
        throw std::runtime_error("bad range: " + text);
    }
    if (!(in >> std::ws).eof()) throw std::runtime_error("bad range: " + text);
    for (std::size_t v = start; v <= stop; v += step) out.push_back(v);
    return out;
  }
  std::string item;
  std::istringstream in(t);
  while (std::getline(in, item, ',')) {
    const std::string it = trim(item);
    if (it.empty()) throw std::runtime_error("bad list: " + text);
    out.push_back(std::stoull(it));
  }
  return out;
}

} // namespace binsense::io
