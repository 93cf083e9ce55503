#include "jointtag/checkpoint.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "jointtag/errors.hpp"
#include "jointtag/json_io.hpp"

namespace jointtag {

using nlohmann::json;

namespace {

constexpr std::array<char, 8> kMagic = {'J', 'T', 'A', 'G', 'C', 'K', 'P', 'T'};

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ValidationError("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw ValidationError("truncated checkpoint");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void write_tensors(std::ostream& out, const Parameters& p) {
  for (const auto& t : p.tensors()) {
    for (double v : t.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
}

void read_tensors(std::istream& in, Parameters& p) {
  for (auto& t : p.tensors()) {
    for (double& v : t.values()) {
      v = std::bit_cast<double>(get_u64(in));
      if (!std::isfinite(v)) throw ValidationError("non-finite value in checkpoint tensor " + t.name);
    }
  }
}

}  // namespace

ModelShape Checkpoint::shape() const { return ModelShape::from(hyper, words.size(), tag_vocabulary().size()); }

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  check_shapes(ckpt.params, ckpt.shape());
  const TagVocabulary tags = ckpt.tag_vocabulary();
  json header;
  header["hyperparameters"] = ckpt.hyper;
  header["words"] = ckpt.words.words();
  header["relations"] = ckpt.relations.names();
  json tag_texts = json::array();
  for (TagIndex i = 0; i < tags.size(); ++i) tag_texts.push_back(tags.text(i));
  header["tags"] = std::move(tag_texts);
  json tensors = json::array();
  for (const auto& t : ckpt.params.tensors()) tensors.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});
  header["tensors"] = std::move(tensors);
  header["has_optimizer_state"] = ckpt.optimizer.has_value() && ckpt.optimizer->initialized;
  const std::string text = header.dump();

  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kCheckpointVersion);
  put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_tensors(out, ckpt.params);
  if (header["has_optimizer_state"].get<bool>()) write_tensors(out, ckpt.optimizer->mean_square);
  if (!out) throw ValidationError("failed writing checkpoint");
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write checkpoint " + path);
  write_checkpoint(out, ckpt);
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw ValidationError("not a checkpoint file");
  const std::uint32_t version = get_u32(in);
  if (version != kCheckpointVersion) {
    throw ValidationError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint64_t len = get_u64(in);
  if (len > (std::uint64_t{1} << 32)) throw ValidationError("implausible checkpoint header length");
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) throw ValidationError("truncated checkpoint header");

  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad checkpoint header: ") + e.what());
  }

  Checkpoint ckpt;
  try {
    header.at("hyperparameters").get_to(ckpt.hyper);
    ckpt.words = WordVocabulary(header.at("words").get<std::vector<std::string>>());
    ckpt.relations = RelationSet(header.at("relations").get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad checkpoint header: ") + e.what());
  }
  ckpt.hyper.validate();

  const TagVocabulary tags = ckpt.tag_vocabulary();
  const auto& stored_tags = header.at("tags");
  if (stored_tags.size() != tags.size()) throw ShapeError("checkpoint tag vocabulary size mismatch");
  for (TagIndex i = 0; i < tags.size(); ++i) {
    if (stored_tags[i].get<std::string>() != tags.text(i)) throw ShapeError("checkpoint tag vocabulary order mismatch");
  }

  const ModelShape shape = ckpt.shape();
  const auto expected = describe_shapes(shape);
  const auto& stored = header.at("tensors");
  if (stored.size() != expected.size()) throw ShapeError("checkpoint tensor count mismatch");
  for (std::size_t k = 0; k < expected.size(); ++k) {
    const TensorShape got{stored[k].at("name").get<std::string>(), stored[k].at("rows").get<Eigen::Index>(),
                          stored[k].at("cols").get<Eigen::Index>()};
    if (!(got == expected[k])) {
      throw ShapeError("checkpoint tensor " + got.name + " (" + std::to_string(got.rows) + "x" +
                       std::to_string(got.cols) + ") does not match expected " + expected[k].name + " (" +
                       std::to_string(expected[k].rows) + "x" + std::to_string(expected[k].cols) + ")");
    }
  }
  ckpt.params = Parameters::zeros(shape);
  read_tensors(in, ckpt.params);
  if (header.value("has_optimizer_state", false)) {
    RmspropState state{Parameters::zeros(shape), true};
    read_tensors(in, state.mean_square);
    ckpt.optimizer = std::move(state);
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint " + path);
  return read_checkpoint(in);
}

}  // namespace jointtag
