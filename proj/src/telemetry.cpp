#include "orbtriage/telemetry.hpp"

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "orbtriage/error.hpp"

namespace orbtriage {

int byte_width(QuantScheme scheme) {
  switch (scheme) {
    case QuantScheme::fp32:
      return 4;
    case QuantScheme::fp16:
      return 2;
    case QuantScheme::int8:
      return 1;
  }
  throw ValidationError("quant: unknown enum value");
}

std::string_view to_string(QuantScheme scheme) {
  switch (scheme) {
    case QuantScheme::fp32:
      return "fp32";
    case QuantScheme::fp16:
      return "fp16";
    case QuantScheme::int8:
      return "int8";
  }
  throw ValidationError("quant: unknown enum value");
}

QuantScheme parse_quant(std::string_view name) {
  for (QuantScheme scheme : kAllQuantSchemes) {
    if (name == to_string(scheme)) return scheme;
  }
  throw ValidationError("quant: unknown scheme \"" + std::string(name) +
                        "\" (expected fp32|fp16|int8)");
}

namespace {

void append_escaped(std::string& out, std::string_view s) {
  for (unsigned char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\b':
        out += "\\b";
        break;
      case '\f':
        out += "\\f";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
}

}  // namespace

std::string format_score_4dp(double score) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", score);
  if (std::strcmp(buf, "-0.0000") == 0) return "0.0000";
  return buf;
}

std::string emit_telemetry(const QueryRecord& query, const Prediction& pred,
                           const RankedMatches& matches, int k) {
  if (k < 1) {
    throw ValidationError("emit_telemetry: k must be >= 1");
  }
  if (matches.empty()) {
    throw ValidationError("emit_telemetry: empty matches");
  }
  if (matches.size() > static_cast<std::size_t>(k)) {
    throw ValidationError("emit_telemetry: more matches than k");
  }
  std::string out;
  out.reserve(128 + matches.size() * 48);
  out += "{\"task\":\"";
  out += to_string(query.task);
  out += "\",\"query_id\":\"";
  append_escaped(out, query.id);
  out += "\",\"label\":\"";
  append_escaped(out, pred.label);
  out += "\",\"k\":";
  out += std::to_string(k);
  out += ",\"matches\":[";
  bool first = true;
  for (const Match& m : matches) {
    if (!first) out += ',';
    first = false;
    out += "{\"id\":\"";
    append_escaped(out, m.hint_id);
    out += "\",\"score\":";
    out += format_score_4dp(m.score);
    out += '}';
  }
  out += "]}";
  if (out.size() > kMaxTelemetryBytes) {
    throw ValidationError("emit_telemetry: record is " +
                          std::to_string(out.size()) +
                          " bytes, over the 1024-byte budget (oversized ids?)");
  }
  return out;
}

std::size_t payload_size(std::string_view serialized) {
  return serialized.size();
}

std::uint64_t uplink_cost(std::uint64_t n_hints, std::uint64_t dim,
                          QuantScheme scheme) {
  return n_hints * dim * static_cast<std::uint64_t>(byte_width(scheme));
}

namespace {

void append_le32(std::vector<std::uint8_t>& out, std::uint32_t bits) {
  out.push_back(static_cast<std::uint8_t>(bits & 0xFF));
  out.push_back(static_cast<std::uint8_t>((bits >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((bits >> 16) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((bits >> 24) & 0xFF));
}

std::uint32_t read_le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t float_bits(float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof(bits));
  return bits;
}

float bits_float(std::uint32_t bits) {
  float f;
  std::memcpy(&f, &bits, sizeof(f));
  return f;
}

}  // namespace

std::vector<std::uint8_t> quantize_embedding(const Embedding& embedding,
                                             QuantScheme scheme) {
  const Eigen::VectorXf& v = embedding.values();
  std::vector<std::uint8_t> out;
  switch (scheme) {
    case QuantScheme::fp32: {
      out.reserve(static_cast<std::size_t>(v.size()) * 4);
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        append_le32(out, float_bits(v[i]));
      }
      return out;
    }
    case QuantScheme::fp16: {
      out.reserve(static_cast<std::size_t>(v.size()) * 2);
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Eigen::half h(v[i]);  // round-to-nearest-even
        const auto bits = Eigen::numext::bit_cast<std::uint16_t>(h);
        out.push_back(static_cast<std::uint8_t>(bits & 0xFF));
        out.push_back(static_cast<std::uint8_t>((bits >> 8) & 0xFF));
      }
      return out;
    }
    case QuantScheme::int8: {
      const float max_abs = v.cwiseAbs().maxCoeff();
      const float scale = max_abs / 127.0f;
      out.reserve(4 + static_cast<std::size_t>(v.size()));
      append_le32(out, float_bits(scale));
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        long q = std::lround(static_cast<double>(v[i]) /
                             static_cast<double>(scale));
        q = std::clamp(q, -127L, 127L);
        out.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(q)));
      }
      return out;
    }
  }
  throw ValidationError("quantize: unknown scheme");
}

Embedding dequantize_embedding(std::span<const std::uint8_t> bytes,
                               QuantScheme scheme, Eigen::Index dim) {
  const std::size_t expected =
      static_cast<std::size_t>(dim) *
          static_cast<std::size_t>(byte_width(scheme)) +
      (scheme == QuantScheme::int8 ? 4 : 0);
  if (bytes.size() != expected) {
    throw ValidationError("dequantize: length mismatch (got " +
                          std::to_string(bytes.size()) + ", expected " +
                          std::to_string(expected) + ")");
  }
  Eigen::VectorXf v(dim);
  switch (scheme) {
    case QuantScheme::fp32: {
      for (Eigen::Index i = 0; i < dim; ++i) {
        v[i] = bits_float(read_le32(bytes.data() + 4 * i));
      }
      break;
    }
    case QuantScheme::fp16: {
      for (Eigen::Index i = 0; i < dim; ++i) {
        const std::uint16_t bits = static_cast<std::uint16_t>(
            bytes[2 * static_cast<std::size_t>(i)] |
            (bytes[2 * static_cast<std::size_t>(i) + 1] << 8));
        v[i] = static_cast<float>(Eigen::numext::bit_cast<Eigen::half>(bits));
      }
      break;
    }
    case QuantScheme::int8: {
      const float scale = bits_float(read_le32(bytes.data()));
      for (Eigen::Index i = 0; i < dim; ++i) {
        const auto q = static_cast<std::int8_t>(bytes[4 + static_cast<std::size_t>(i)]);
        v[i] = static_cast<float>(q) * scale;
      }
      break;
    }
  }
  return Embedding::normalized(v);
}

}  // namespace orbtriage
