#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "risvec/mlp.hpp"

namespace risvec {

// Versioned named-tensor container.
//
// Layout (all integers little-endian):
//   "RVLCKPT1"                       8 bytes
//   u32 description length, bytes    free text; "net <prefix> <spec>" lines
//   u32 tensor count
//   per tensor:
//     u32 name length, bytes
//     u32 rank, u64 dims[rank]
//     f64 values, row-major
struct NamedTensor {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<double> values;
};

class Checkpoint {
 public:
  static constexpr char kMagic[9] = "RVLCKPT1";

  std::string description;
  std::vector<NamedTensor> tensors;

  const NamedTensor& find(const std::string& name) const;
  bool contains(const std::string& name) const;

  void write(std::ostream& os) const;
  static Checkpoint read(std::istream& is);
  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

  // Network tensors are "<prefix>.w<l>" and "<prefix>.b<l>"; the spec goes
  // into the description so the network can be rebuilt without the config.
  void add_network(const std::string& prefix, const MlpSpec& spec, const ParameterSet& params);
  void add_network(const std::string& prefix, const Mlp& net) {
    add_network(prefix, net.spec(), net.params());
  }
  MlpSpec network_spec(const std::string& prefix) const;
  Mlp network(const std::string& prefix) const;

  void set_meta(const std::string& key, const std::string& value);
  std::string meta(const std::string& key) const;

  bool operator==(const Checkpoint&) const;
};

}  // namespace risvec
