#include "wedge/nnet/weights_io.hpp"

#include <bit>
#include <cstring>

#include "wedge/core/error.hpp"
#include "wedge/core/raster_io.hpp"

namespace wedge::nnet {
namespace {

constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;
};

class Writer {
 public:
  Writer(NetKind kind, std::uint32_t count) {
    bytes_ = {'N', 'N', 'W', 'T'};
    put_u32(bytes_, kVersion);
    put_u32(bytes_, static_cast<std::uint32_t>(kind));
    put_u32(bytes_, count);
  }

  // `m` is written row-major regardless of Eigen's storage order.
  void matrix(const Eigen::MatrixXd& m, std::vector<std::uint32_t> dims) {
    put_u32(bytes_, static_cast<std::uint32_t>(dims.size()));
    for (auto d : dims) put_u32(bytes_, d);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) put_u32(bytes_, std::bit_cast<std::uint32_t>(static_cast<float>(m(r, c))));
  }

  void vector(const Eigen::VectorXd& v) {
    put_u32(bytes_, 1);
    put_u32(bytes_, static_cast<std::uint32_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) put_u32(bytes_, std::bit_cast<std::uint32_t>(static_cast<float>(v[i])));
  }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::string origin) : bytes_(bytes), origin_(std::move(origin)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  Tensor tensor() {
    Tensor t;
    const std::uint32_t rank = u32();
    if (rank < 1 || rank > 4) fail("tensor rank " + std::to_string(rank) + " is not supported");
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      t.dims.push_back(u32());
      count *= t.dims.back();
      if (count > bytes_.size()) fail("tensor larger than the file");
    }
    need(count * 4);
    t.data.resize(count);
    for (auto& v : t.data) v = std::bit_cast<float>(u32());
    return t;
  }

  void finish() const {
    if (pos_ != bytes_.size()) fail(std::to_string(bytes_.size() - pos_) + " trailing bytes");
  }

  [[noreturn]] void fail(const std::string& what) const { throw CorruptFile(origin_ + ": " + what); }

 private:
  void need(std::uint64_t n) const {
    if (pos_ + n > bytes_.size()) fail("truncated weights file");
  }

  std::span<const std::uint8_t> bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

/// Validates the header and positions the reader at the first tensor.
std::uint32_t read_header(Reader& r, NetKind expected, bool check_kind) {
  if (r.u32() != 0x54574E4Eu) r.fail("bad magic (expected NNWT)");  // "NNWT" little-endian
  const std::uint32_t version = r.u32();
  if (version != kVersion) r.fail("unsupported version " + std::to_string(version));
  const std::uint32_t kind = r.u32();
  if (kind > 1) r.fail("unknown network kind " + std::to_string(kind));
  if (check_kind && kind != static_cast<std::uint32_t>(expected)) {
    throw KindMismatch("weights kind mismatch: file holds " + std::string(kind == 0 ? "an MLP" : "an encoder-decoder") +
                       ", expected " + (expected == NetKind::Mlp ? "an MLP" : "an encoder-decoder"));
  }
  return r.u32();
}

Eigen::MatrixXd to_matrix(const Tensor& t, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = t.data[static_cast<std::size_t>(r * cols + c)];
  return m;
}

Eigen::VectorXd to_vector(const Tensor& t) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(t.data.size()));
  for (std::size_t i = 0; i < t.data.size(); ++i) v[static_cast<Eigen::Index>(i)] = t.data[i];
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_weights(const MlpWeights& w) {
  w.validate();
  Writer out(NetKind::Mlp, static_cast<std::uint32_t>(2 * w.layers.size()));
  for (const auto& l : w.layers) {
    out.matrix(l.weight, {static_cast<std::uint32_t>(l.weight.rows()), static_cast<std::uint32_t>(l.weight.cols())});
    out.vector(l.bias);
  }
  return out.take();
}

std::vector<std::uint8_t> encode_weights(const EncDecWeights& w) {
  w.validate();
  Writer out(NetKind::EncDec, 2 * kConvCount);
  for (const auto& c : w.convs) {
    out.matrix(c.weight, {static_cast<std::uint32_t>(c.out_channels()), static_cast<std::uint32_t>(c.in_channels()), 3, 3});
    out.vector(c.bias);
  }
  return out.take();
}

NetKind peek_kind(std::span<const std::uint8_t> bytes, const std::string& origin) {
  Reader r(bytes, origin);
  if (bytes.size() < kHeaderBytes) r.fail("truncated weights header");
  read_header(r, NetKind::Mlp, false);
  return static_cast<NetKind>(bytes[8] | (bytes[9] << 8) | (bytes[10] << 16) | (bytes[11] << 24));
}

MlpWeights decode_mlp(std::span<const std::uint8_t> bytes, const std::string& origin) {
  Reader r(bytes, origin);
  const std::uint32_t count = read_header(r, NetKind::Mlp, true);
  if (count == 0 || count % 2 != 0) r.fail("MLP needs a (weight, bias) tensor pair per layer");
  MlpWeights w;
  for (std::uint32_t i = 0; i < count; i += 2) {
    const Tensor wt = r.tensor();
    const Tensor bt = r.tensor();
    if (wt.dims.size() != 2 || bt.dims.size() != 1 || bt.dims[0] != wt.dims[0]) r.fail("malformed MLP layer tensors");
    w.layers.push_back({to_matrix(wt, wt.dims[0], wt.dims[1]), to_vector(bt)});
  }
  r.finish();
  try {
    w.validate();
  } catch (const InvalidArgument& e) {
    r.fail(e.what());
  }
  return w;
}

EncDecWeights decode_encdec(std::span<const std::uint8_t> bytes, const std::string& origin) {
  Reader r(bytes, origin);
  const std::uint32_t count = read_header(r, NetKind::EncDec, true);
  if (count != 2 * kConvCount) r.fail("encoder-decoder needs " + std::to_string(2 * kConvCount) + " tensors");
  EncDecWeights w;
  for (int i = 0; i < kConvCount; ++i) {
    const Tensor wt = r.tensor();
    const Tensor bt = r.tensor();
    if (wt.dims.size() != 4 || wt.dims[2] != 3 || wt.dims[3] != 3 || bt.dims.size() != 1 || bt.dims[0] != wt.dims[0]) {
      r.fail("malformed convolution tensors");
    }
    w.convs.push_back({to_matrix(wt, wt.dims[0], static_cast<Eigen::Index>(wt.dims[1]) * 9), to_vector(bt)});
  }
  r.finish();
  w.spec.in_channels = w.convs[kEnc0a].in_channels();
  w.spec.out_channels = w.convs[kOut].out_channels();
  w.spec.channels = {w.convs[kEnc0a].out_channels(), w.convs[kEnc1a].out_channels(), w.convs[kEnc2a].out_channels()};
  try {
    w.validate();
  } catch (const InvalidArgument& e) {
    r.fail(e.what());
  }
  return w;
}

void weights_save(const std::filesystem::path& path, const MlpWeights& w) { write_file_bytes(path, encode_weights(w)); }
void weights_save(const std::filesystem::path& path, const EncDecWeights& w) { write_file_bytes(path, encode_weights(w)); }

MlpWeights load_mlp(const std::filesystem::path& path) { return decode_mlp(read_file_bytes(path), path.string()); }
EncDecWeights load_encdec(const std::filesystem::path& path) { return decode_encdec(read_file_bytes(path), path.string()); }

}  // namespace wedge::nnet
