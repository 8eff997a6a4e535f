#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orbtriage/heads.hpp"
#include "orbtriage/record.hpp"
#include "orbtriage/vector_index.hpp"

namespace orbtriage {

enum class QuantScheme { fp32, fp16, int8 };

inline constexpr std::array<QuantScheme, 3> kAllQuantSchemes = {
    QuantScheme::fp32, QuantScheme::fp16, QuantScheme::int8};

// Per-component byte width b: 4, 2 or 1.
int byte_width(QuantScheme scheme);
std::string_view to_string(QuantScheme scheme);
QuantScheme parse_quant(std::string_view name);

// Downlink records must stay within 1 KiB per query.
inline constexpr std::size_t kMaxTelemetryBytes = 1024;

// Canonical compact JSON: fixed key order (task, query_id, label, k, matches),
// no whitespace, scores with exactly 4 decimal places, UTF-8. Bit-identical
// across platforms for identical inputs. Rejects records over 1 KiB.
std::string emit_telemetry(const QueryRecord& query, const Prediction& pred,
                           const RankedMatches& matches, int k);

// Exact byte length of a serialized record. No estimation.
std::size_t payload_size(std::string_view serialized);

// Uplink bytes per hint-set refresh: n_hints * dim * b. The int8 per-vector
// scale overhead is not part of this figure; it is visible in encoded sizes.
std::uint64_t uplink_cost(std::uint64_t n_hints, std::uint64_t dim,
                          QuantScheme scheme);

// fp32: little-endian 4-byte floats. fp16: round-to-nearest-even halves.
// int8: symmetric per-vector scaling, scale = max|x|/127 prepended as one
// little-endian fp32, components round(x/scale) in [-127, 127].
std::vector<std::uint8_t> quantize_embedding(const Embedding& embedding,
                                             QuantScheme scheme);

// Decodes and re-normalizes to unit length.
Embedding dequantize_embedding(std::span<const std::uint8_t> bytes,
                               QuantScheme scheme, Eigen::Index dim);

// Score formatting used by the telemetry stream ("%.4f", no negative zero).
std::string format_score_4dp(double score);

}  // namespace orbtriage
