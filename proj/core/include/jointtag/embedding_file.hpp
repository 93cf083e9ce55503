#pragma once

// Word-vector text files: one "word v1 v2 ... vd" line per word. A leading
// "<count> <dim>" header line, as written by word2vec, is skipped.

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace jointtag {

struct PretrainedEmbeddings {
  int dim = 0;
  // Keys are lowercased; the first occurrence of a word wins.
  std::unordered_map<std::string, std::vector<double>> vectors;

  const std::vector<double>* find(const std::string& word) const;

  // Throws ValidationError on ragged rows or unparsable numbers.
  static PretrainedEmbeddings read(std::istream& in);
  static PretrainedEmbeddings load(const std::string& path);
};

std::string lowercase(std::string s);

}  // namespace jointtag
