#include "jointtag/embedding_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "jointtag/errors.hpp"

namespace jointtag {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

const std::vector<double>* PretrainedEmbeddings::find(const std::string& word) const {
  auto it = vectors.find(lowercase(word));
  return it == vectors.end() ? nullptr : &it->second;
}

namespace {

bool parse_double(const std::string& text, double& out) {
  // from_chars for double is missing on older libstdc++; strtod is fine here.
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end != text.c_str() && *end == '\0';
}

bool is_integer(const std::string& text) {
  return !text.empty() && std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

PretrainedEmbeddings PretrainedEmbeddings::read(std::istream& in) {
  PretrainedEmbeddings out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> parts;
    for (std::string f; fields >> f;) parts.push_back(std::move(f));
    if (parts.empty()) continue;
    if (line_no == 1 && parts.size() == 2 && is_integer(parts[0]) && is_integer(parts[1])) continue;
    if (parts.size() < 2) throw ValidationError("embedding line " + std::to_string(line_no) + ": no values");
    const int dim = static_cast<int>(parts.size() - 1);
    if (out.dim == 0) out.dim = dim;
    if (dim != out.dim) {
      throw ValidationError("embedding line " + std::to_string(line_no) + ": expected " + std::to_string(out.dim) +
                            " values, got " + std::to_string(dim));
    }
    std::vector<double> values(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      if (!parse_double(parts[static_cast<std::size_t>(k) + 1], values[static_cast<std::size_t>(k)])) {
        throw ValidationError("embedding line " + std::to_string(line_no) + ": bad number '" +
                              parts[static_cast<std::size_t>(k) + 1] + "'");
      }
    }
    out.vectors.emplace(lowercase(parts[0]), std::move(values));
  }
  return out;
}

PretrainedEmbeddings PretrainedEmbeddings::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open embedding file " + path);
  return read(in);
}

}  // namespace jointtag
