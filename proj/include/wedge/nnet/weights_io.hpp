#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "wedge/nnet/encdec.hpp"
#include "wedge/nnet/mlp.hpp"

namespace wedge::nnet {

enum class NetKind : std::uint32_t { Mlp = 0, EncDec = 1 };

/// NNWT: "NNWT", u32 version=1, u32 kind, u32 tensor count, then per tensor
/// u32 rank, u32 dims[rank], little-endian f32 data (row-major).
std::vector<std::uint8_t> encode_weights(const MlpWeights& w);
std::vector<std::uint8_t> encode_weights(const EncDecWeights& w);
MlpWeights decode_mlp(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");
EncDecWeights decode_encdec(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");

/// Kind tag of an NNWT blob; throws CorruptFile if the header is invalid.
NetKind peek_kind(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");

void weights_save(const std::filesystem::path& path, const MlpWeights& w);
void weights_save(const std::filesystem::path& path, const EncDecWeights& w);
MlpWeights load_mlp(const std::filesystem::path& path);
EncDecWeights load_encdec(const std::filesystem::path& path);

}  // namespace wedge::nnet
