#include "nci/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nci {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

namespace {

class Writer {
 public:
  template <typename T>
  void put(T x) {
    char buf[sizeof(T)];
    std::memcpy(buf, &x, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  template <typename T>
  T get() {
    T x;
    get_bytes(&x, sizeof(T));
    return x;
  }
  void get_bytes(void* p, std::size_t n) {
    if (pos_ + n > in_.size()) throw InputError("checkpoint", "truncated checkpoint");
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::string& in_;
  std::size_t pos_ = 0;
};

void put_matrix(Writer& w, const Matrix& m) {
  w.put_bytes(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
}

void get_matrix(Reader& r, Matrix& m) { r.get_bytes(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double)); }

}  // namespace

std::string encode_checkpoint(const ModelParams& params) {
  params.validate();
  Writer w;
  w.put_bytes(kCheckpointMagic, sizeof kCheckpointMagic);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(params.hidden.size()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(params.heads.size()));
  for (std::size_t h : params.hidden_for_head) w.put<std::uint32_t>(static_cast<std::uint32_t>(h));
  params.for_each_tensor([&](const ParamTensor& t) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.name.size()));
    w.put_bytes(t.name.data(), t.name.size());
    w.put<std::uint64_t>(static_cast<std::uint64_t>(t.rows()));
    w.put<std::uint64_t>(static_cast<std::uint64_t>(t.cols()));
    w.put<std::uint64_t>(t.step_count);
    put_matrix(w, t.values);
    put_matrix(w, t.m);
    put_matrix(w, t.v);
  });
  return w.take();
}

ModelParams decode_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  char magic[8];
  r.get_bytes(magic, sizeof magic);
  if (std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) throw InputError("checkpoint", "not a checkpoint file");
  if (r.get<std::uint32_t>() != kCheckpointVersion) throw InputError("checkpoint", "unsupported checkpoint version");

  ModelParams p;
  const auto n_hidden = r.get<std::uint32_t>();
  const auto n_heads = r.get<std::uint32_t>();
  if (n_hidden == 0 || n_heads == 0 || n_hidden > 2 || n_heads > 2) throw InputError("checkpoint", "bad topology");
  p.hidden.resize(n_hidden);
  p.heads.resize(n_heads);
  for (std::uint32_t i = 0; i < n_heads; ++i) p.hidden_for_head.push_back(r.get<std::uint32_t>());

  p.for_each_tensor([&](ParamTensor& t) {
    const auto len = r.get<std::uint32_t>();
    if (len > 4096) throw InputError("checkpoint", "bad tensor name");
    std::string name(len, '\0');
    r.get_bytes(name.data(), len);
    const auto rows = static_cast<Eigen::Index>(r.get<std::uint64_t>());
    const auto cols = static_cast<Eigen::Index>(r.get<std::uint64_t>());
    t = ParamTensor(std::move(name), rows, cols);
    t.step_count = r.get<std::uint64_t>();
    get_matrix(r, t.values);
    get_matrix(r, t.m);
    get_matrix(r, t.v);
  });
  if (!r.done()) throw InputError("checkpoint", "trailing bytes in checkpoint");
  p.validate();
  return p;
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("checkpoint", "cannot write " + path.string());
  const std::string bytes = encode_checkpoint(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("checkpoint", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str());
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
}

bool bit_equal(const ModelParams& a, const ModelParams& b) {
  return encode_checkpoint(a) == encode_checkpoint(b);
}

}  // namespace nci
