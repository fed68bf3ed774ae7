#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "seeaction/error.hpp"
#include "seeaction/nn/params.hpp"

namespace seeaction::nn {
namespace {

constexpr char kMagic[4] = {'S', 'A', 'P', 'S'};
constexpr uint32_t kVersion = 1;

void put(std::vector<uint8_t>& out, uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<uint8_t>& bytes) : bytes_(bytes) {}

  uint64_t get(int n) {
    need(static_cast<size_t>(n));
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<size_t>(n);
    return v;
  }
  std::string str(size_t n) {
    need(n);
    std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_), bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(size_t n) const {
    if (pos_ + n > bytes_.size()) throw FormatError("truncated parameter file");
  }
  const std::vector<uint8_t>& bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> serialize_params(const ParamStore<float>& params) {
  std::vector<uint8_t> out(kMagic, kMagic + 4);
  put(out, kVersion, 4);
  put(out, params.seed(), 8);
  put(out, params.count(), 4);
  for (size_t i = 0; i < params.count(); ++i) {
    const std::string& name = params.names()[i];
    const Tensor& t = params.value_at(i);
    put(out, name.size(), 4);
    out.insert(out.end(), name.begin(), name.end());
    put(out, t.rank(), 4);
    for (int d : t.shape()) put(out, static_cast<uint32_t>(d), 4);
    for (float v : t.values()) put(out, std::bit_cast<uint32_t>(v), 4);
  }
  return out;
}

ParamStore<float> deserialize_params(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad parameter file magic");
  Reader r(bytes);
  r.str(4);
  if (r.get(4) != kVersion) throw FormatError("unsupported parameter file version");
  ParamStore<float> params(r.get(8));
  const uint64_t count = r.get(4);
  for (uint64_t e = 0; e < count; ++e) {
    const std::string name = r.str(r.get(4));
    Shape shape(r.get(4));
    for (int& d : shape) d = static_cast<int>(r.get(4));
    std::vector<float> data(shape_size(shape));
    for (float& v : data) v = std::bit_cast<float>(static_cast<uint32_t>(r.get(4)));
    params.add(name, Tensor(shape, std::move(data)));
  }
  if (!r.done()) throw FormatError("trailing bytes in parameter file");
  return params;
}

void save_params(const std::filesystem::path& path, const ParamStore<float>& params) {
  const std::vector<uint8_t> bytes = serialize_params(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write parameter file: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ParamStore<float> load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open parameter file: " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_params(bytes);
}

}  // namespace seeaction::nn
