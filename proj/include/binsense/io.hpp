#pragma once

#include <map>
#include <string>
#include <vector>

#include "binsense/mat.hpp"

namespace binsense::io {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Whitespace-separated doubles.
Vec read_vector_file(const std::string& path);
void write_vector_file(const std::string& path, const Vec& v);

// key=value lines; '#' starts a comment; blank lines ignored.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

// "1,2,3" or "start:stop:step" (inclusive stop).
std::vector<std::size_t> parse_size_list(const std::string& text);

} // namespace binsense::io
