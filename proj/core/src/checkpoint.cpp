#include "risvec/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace risvec {

namespace {

template <typename U>
void put_le(std::ostream& os, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U get_le(std::istream& is) {
  unsigned char bytes[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U)))
    throw std::runtime_error("checkpoint: unexpected end of data");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

void put_string(std::ostream& os, const std::string& s) {
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is) {
  const auto n = get_le<std::uint32_t>(is);
  std::string s(n, '\0');
  if (n && !is.read(s.data(), n)) throw std::runtime_error("checkpoint: truncated string");
  return s;
}

std::vector<std::string> description_lines(const std::string& description) {
  std::vector<std::string> lines;
  std::istringstream in(description);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

const NamedTensor& Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw std::out_of_range("checkpoint: no tensor named " + name);
}

bool Checkpoint::contains(const std::string& name) const {
  return std::any_of(tensors.begin(), tensors.end(), [&](const auto& t) { return t.name == name; });
}

void Checkpoint::write(std::ostream& os) const {
  os.write(kMagic, 8);
  put_string(os, description);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    std::uint64_t count = 1;
    for (auto d : t.dims) count *= d;
    if (count != t.values.size()) throw std::logic_error("checkpoint: tensor " + t.name + " dims/values mismatch");
    put_string(os, t.name);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) put_le<std::uint64_t>(os, d);
    for (double v : t.values) put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
  }
}

Checkpoint Checkpoint::read(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic (expected RVLCKPT1)");
  Checkpoint c;
  c.description = get_string(is);
  const auto count = get_le<std::uint32_t>(is);
  c.tensors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = get_string(is);
    const auto rank = get_le<std::uint32_t>(is);
    std::uint64_t n = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      t.dims.push_back(get_le<std::uint64_t>(is));
      n *= t.dims.back();
    }
    if (n > (std::uint64_t{1} << 32)) throw std::runtime_error("checkpoint: implausible tensor size");
    t.values.resize(n);
    for (auto& v : t.values) v = std::bit_cast<double>(get_le<std::uint64_t>(is));
    c.tensors.push_back(std::move(t));
  }
  return c;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write checkpoint " + path.string());
  write(os);
  if (!os) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path.string());
  return read(is);
}

void Checkpoint::add_network(const std::string& prefix, const MlpSpec& spec, const ParameterSet& params) {
  description += "net " + prefix + " " + spec.describe() + "\n";
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    const auto& w = params.weights[l];
    NamedTensor tw{prefix + ".w" + std::to_string(l),
                   {static_cast<std::uint64_t>(w.rows()), static_cast<std::uint64_t>(w.cols())},
                   {}};
    tw.values.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index col = 0; col < w.cols(); ++col) tw.values.push_back(w(r, col));
    tensors.push_back(std::move(tw));
    const auto& b = params.biases[l];
    NamedTensor tb{prefix + ".b" + std::to_string(l), {static_cast<std::uint64_t>(b.size())},
                   std::vector<double>(b.data(), b.data() + b.size())};
    tensors.push_back(std::move(tb));
  }
}

MlpSpec Checkpoint::network_spec(const std::string& prefix) const {
  const std::string head = "net " + prefix + " ";
  for (const auto& line : description_lines(description))
    if (line.rfind(head, 0) == 0) return MlpSpec::parse(line.substr(head.size()));
  throw std::out_of_range("checkpoint: no network named " + prefix);
}

Mlp Checkpoint::network(const std::string& prefix) const {
  const MlpSpec spec = network_spec(prefix);
  ParameterSet p;
  for (int l = 0; l < spec.num_layers(); ++l) {
    const auto& tw = find(prefix + ".w" + std::to_string(l));
    const auto& tb = find(prefix + ".b" + std::to_string(l));
    const auto rows = static_cast<Eigen::Index>(spec.layer_sizes[static_cast<std::size_t>(l) + 1]);
    const auto cols = static_cast<Eigen::Index>(spec.layer_sizes[static_cast<std::size_t>(l)]);
    if (tw.dims.size() != 2 || tw.dims[0] != static_cast<std::uint64_t>(rows) ||
        tw.dims[1] != static_cast<std::uint64_t>(cols) || tb.values.size() != static_cast<std::size_t>(rows))
      throw std::runtime_error("checkpoint: tensor shapes disagree with spec for " + prefix);
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index col = 0; col < cols; ++col)
        w(r, col) = tw.values[static_cast<std::size_t>(r * cols + col)];
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::Map<const Eigen::VectorXd>(tb.values.data(), rows));
  }
  return Mlp(spec, std::move(p));
}

void Checkpoint::set_meta(const std::string& key, const std::string& value) {
  description += "meta " + key + " " + value + "\n";
}

std::string Checkpoint::meta(const std::string& key) const {
  const std::string head = "meta " + key + " ";
  std::string found;
  bool any = false;
  for (const auto& line : description_lines(description))
    if (line.rfind(head, 0) == 0) {
      found = line.substr(head.size());
      any = true;
    }
  if (!any) throw std::out_of_range("checkpoint: no meta key " + key);
  return found;
}

bool Checkpoint::operator==(const Checkpoint& other) const {
  if (description != other.description || tensors.size() != other.tensors.size()) return false;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& a = tensors[i];
    const auto& b = other.tensors[i];
    if (a.name != b.name || a.dims != b.dims || a.values.size() != b.values.size()) return false;
    for (std::size_t j = 0; j < a.values.size(); ++j)
      if (std::bit_cast<std::uint64_t>(a.values[j]) != std::bit_cast<std::uint64_t>(b.values[j]))
        return false;
  }
  return true;
}

}  // namespace risvec
