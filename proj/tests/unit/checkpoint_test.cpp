#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

#include "jointtag/checkpoint.hpp"
#include "jointtag/errors.hpp"
#include "jointtag/optimizer.hpp"
#include "tiny_model.hpp"

namespace jointtag {
namespace {

Checkpoint sample(bool with_optimizer) {
  Checkpoint c{};
  c.hyper.embedding_dim = 3;
  c.hyper.encoder_hidden = 2;
  c.hyper.decoder_hidden = 4;
  c.hyper.alpha = 7.5;
  c.hyper.learn_start_tag = true;
  c.words = WordVocabulary(std::vector<std::string>{"<unk>", "a", "b"});
  c.relations = RelationSet({"Country-President"});
  Rng rng(9);
  c.params = oracle::random_parameters(c.shape(), rng);
  if (with_optimizer) {
    RmspropState s;
    Gradients g = oracle::random_parameters(c.shape(), rng);
    Parameters scratch = c.params;
    rmsprop_step(scratch, g, s, {});
    c.optimizer = s;
  }
  return c;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  for (bool opt : {false, true}) {
    const Checkpoint c = sample(opt);
    std::stringstream buf;
    write_checkpoint(buf, c);
    const std::string bytes = buf.str();
    EXPECT_EQ(bytes.substr(0, 8), "JTAGCKPT");
    const Checkpoint d = read_checkpoint(buf);
    EXPECT_EQ(d.hyper.alpha, 7.5);
    EXPECT_TRUE(d.hyper.learn_start_tag);
    EXPECT_EQ(d.words, c.words);
    EXPECT_EQ(d.relations.names(), c.relations.names());
    EXPECT_EQ(d.shape(), c.shape());
    const auto a = c.params.tensors();
    const auto b = d.params.tensors();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].name, b[k].name);
      EXPECT_EQ(0, std::memcmp(a[k].data, b[k].data, sizeof(double) * static_cast<std::size_t>(a[k].size())));
    }
    ASSERT_EQ(d.optimizer.has_value(), opt);
    if (opt) {
      EXPECT_EQ(d.optimizer->mean_square.embedding, c.optimizer->mean_square.embedding);
    }
  }
}

TEST(Checkpoint, RejectsCorruption) {
  const Checkpoint c = sample(false);
  std::stringstream buf;
  write_checkpoint(buf, c);
  const std::string bytes = buf.str();

  std::string magic = bytes;
  magic[0] = 'X';
  std::istringstream m(magic);
  EXPECT_THROW(read_checkpoint(m), ValidationError);

  std::istringstream cut(bytes.substr(0, bytes.size() - 8));
  EXPECT_THROW(read_checkpoint(cut), ValidationError);

  std::string version = bytes;
  version[8] = 9;
  std::istringstream v(version);
  EXPECT_THROW(read_checkpoint(v), ValidationError);
}

TEST(Checkpoint, RejectsShapeMismatch) {
  Checkpoint c = sample(false);
  c.params.decoder.tag_projection.resize(2, 4);
  c.params.decoder.tag_projection.setZero();
  std::stringstream buf;
  EXPECT_THROW(write_checkpoint(buf, c), ShapeError);

  // A header whose hyperparameters disagree with the stored tensor table.
  Checkpoint ok = sample(false);
  std::stringstream good;
  write_checkpoint(good, ok);
  std::string bytes = good.str();
  const std::string needle = "\"decoder_hidden\":4";
  const auto pos = bytes.find(needle);
  ASSERT_NE(pos, std::string::npos);
  bytes.replace(pos, needle.size(), "\"decoder_hidden\":5");
  std::istringstream bad(bytes);
  EXPECT_THROW(read_checkpoint(bad), ShapeError);
}

}  // namespace
}  // namespace jointtag
