#include <cstring>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "risvec/checkpoint.hpp"
#include "test_support.hpp"

using namespace risvec;

TEST_CASE("network round trip is bit exact") {
  Rng rng(1);
  const Mlp net(MlpSpec::make(7, {16, 8}, 3, OutputActivation::kTanh), rng);
  Checkpoint c;
  c.set_meta("kind", "test");
  c.add_network("actor", net);
  NamedTensor special{"special", {4}, {0.1, -0.0, std::numeric_limits<double>::denorm_min(), 1e308}};
  c.tensors.push_back(special);

  std::stringstream ss;
  c.write(ss);
  const Checkpoint back = Checkpoint::read(ss);
  CHECK(back == c);
  const Mlp restored = back.network("actor");
  CHECK(restored.spec() == net.spec());
  for (std::size_t l = 0; l < net.params().weights.size(); ++l) {
    CHECK(std::memcmp(restored.params().weights[l].data(), net.params().weights[l].data(),
                      sizeof(double) * static_cast<std::size_t>(net.params().weights[l].size())) == 0);
    CHECK(restored.params().biases[l] == net.params().biases[l]);
  }
  const auto& s = back.find("special");
  CHECK(std::signbit(s.values[1]));
  CHECK(s.values[2] == std::numeric_limits<double>::denorm_min());
  CHECK(back.meta("kind") == "test");
}

TEST_CASE("file layout starts with the magic and is little endian") {
  Checkpoint c;
  c.tensors.push_back({"x", {1}, {1.0}});
  std::stringstream ss;
  c.write(ss);
  const std::string bytes = ss.str();
  REQUIRE(bytes.size() > 12);
  CHECK(bytes.substr(0, 8) == "RVLCKPT1");
  // description length 0 as u32 LE, then tensor count 1
  CHECK(bytes.substr(8, 4) == std::string("\0\0\0\0", 4));
  CHECK(bytes.substr(12, 4) == std::string("\1\0\0\0", 4));
  // 1.0 as IEEE-754 LE ends the stream
  CHECK(bytes.substr(bytes.size() - 8) == std::string("\0\0\0\0\0\0\xf0\x3f", 8));
}

TEST_CASE("corrupt inputs are rejected") {
  std::stringstream bad_magic("NOTACKPT\0\0\0\0");
  CHECK_THROWS(Checkpoint::read(bad_magic));
  Checkpoint c;
  c.tensors.push_back({"x", {2}, {1.0, 2.0}});
  std::stringstream ss;
  c.write(ss);
  std::string truncated = ss.str();
  truncated.resize(truncated.size() - 3);
  std::stringstream t(truncated);
  CHECK_THROWS(Checkpoint::read(t));
  CHECK_THROWS(c.find("missing"));
  CHECK_THROWS(c.network("missing"));
  CHECK_THROWS(c.meta("missing"));
  CHECK_THROWS(Checkpoint::load("/nonexistent/dir/x.ckpt"));
}

TEST_CASE("save and load through a file") {
  const auto dir = risvec::testing::scratch_dir("ckpt");
  Rng rng(2);
  Checkpoint c;
  c.add_network("critic", Mlp(MlpSpec::make(4, {5}, 1, OutputActivation::kIdentity), rng));
  c.save(dir / "a.ckpt");
  CHECK(Checkpoint::load(dir / "a.ckpt") == c);
}
