#ifndef SRK_ARCH_HPP
#define SRK_ARCH_HPP

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srk/error.hpp"
#include "srk/numeric.hpp"
#include "srk/poly.hpp"

namespace srk {

inline constexpr std::size_t kDefaultDegreeCap = 64;

inline std::size_t default_degree_cap() { return env_cap("SRK_DEGREE_CAP", kDefaultDegreeCap); }

enum class Family { Mixer, LinearTransformer };

inline std::string family_name(Family f) { return f == Family::Mixer ? "mixer" : "linear_transformer"; }

/// Entry permutations of one mixer layer. An empty vector is the identity.
struct MixerPermutations {
  std::vector<std::size_t> pi_e;  // applied to X before odd-layer mixing
  std::vector<std::size_t> pi_o;  // applied to X^T before even-layer mixing
  std::vector<std::size_t> pi_r;  // applied to X on the residual branch
  friend bool operator==(const MixerPermutations&, const MixerPermutations&) = default;
};

/// One sigma_2 mixer layer. Odd layers mix tokens: W (n x n) acts on the left
/// of pi_e(X). Even layers mix channels: W (m x m) acts on the left of
/// pi_o(X^T) and the result is transposed back.
struct MixerLayerSpec {
  std::size_t index = 1;  // 1-based
  bool residual = false;
  MixerPermutations perms;

  bool odd() const { return index % 2 == 1; }
  friend bool operator==(const MixerLayerSpec&, const MixerLayerSpec&) = default;
};

/// One linearized attention layer:
///   W_O * sum_k prod_{j=1..d} F_{j,k} (+ X if residual)
/// with F_{j,k} = W^{j,k} X when j is in head k's set and (W^{j,k} X)^T
/// otherwise. W^{j,k} is m x n, X is n x m, W_O is n x m.
struct AttentionLayerSpec {
  std::size_t index = 1;
  std::size_t heads = 1;
  std::size_t degree = 3;
  std::vector<std::vector<std::size_t>> transpose_sets;  // per head, 1-based indices into [d]
  bool residual = false;
  friend bool operator==(const AttentionLayerSpec&, const AttentionLayerSpec&) = default;
};

struct ArchSpec {
  Family family = Family::Mixer;
  std::size_t p = 0;
  std::size_t n = 1;
  std::size_t m = 1;
  std::vector<MixerLayerSpec> mixer_layers;
  std::vector<AttentionLayerSpec> attention_layers;
  std::uint64_t seed = 0;

  std::size_t heads() const { return attention_layers.empty() ? 1 : attention_layers.front().heads; }
  std::size_t degree() const {
    if (family == Family::Mixer) return 2;
    return attention_layers.empty() ? 3 : attention_layers.front().degree;
  }
  friend bool operator==(const ArchSpec&, const ArchSpec&) = default;
};

/// Per-layer weight matrices. Mixer layers hold one matrix; attention layers
/// hold H*d head matrices (head-major) followed by W_O.
struct WeightAssignment {
  std::uint64_t seed = 0;
  std::vector<std::vector<ConstMatrix>> layers;
  friend bool operator==(const WeightAssignment&, const WeightAssignment&) = default;
};

namespace detail {

inline void check_residual_set(const std::set<std::size_t>& residual, std::size_t p) {
  for (std::size_t r : residual) {
    if (r < 1 || r > p) throw InvalidShape("residual layer index " + std::to_string(r) + " outside [1, p]");
  }
}

inline void check_perm(const std::vector<std::size_t>& perm, std::size_t size) {
  if (!perm.empty()) check_permutation(perm, size);
}

}  // namespace detail

inline ArchSpec build_mixer(std::size_t p, std::size_t n, std::size_t m, const std::set<std::size_t>& residual = {},
                            const std::map<std::size_t, MixerPermutations>& permutations = {}) {
  if (p < 1) throw InvalidShape("mixer depth must be at least 1");
  if (n < 1 || m < 1) throw InvalidShape("mixer input shape must be at least 1x1");
  detail::check_residual_set(residual, p);
  ArchSpec spec;
  spec.family = Family::Mixer;
  spec.p = p;
  spec.n = n;
  spec.m = m;
  for (std::size_t k = 1; k <= p; ++k) {
    MixerLayerSpec layer;
    layer.index = k;
    layer.residual = residual.contains(k);
    if (auto it = permutations.find(k); it != permutations.end()) {
      detail::check_perm(it->second.pi_e, n * m);
      detail::check_perm(it->second.pi_o, n * m);
      detail::check_perm(it->second.pi_r, n * m);
      layer.perms = it->second;
    }
    spec.mixer_layers.push_back(std::move(layer));
  }
  for (const auto& [k, perms] : permutations) {
    if (k < 1 || k > p) throw InvalidShape("permutation layer index " + std::to_string(k) + " outside [1, p]");
  }
  return spec;
}

/// `transpose_sets` lists, per head, the factor indices taken without
/// transposition; empty means every head uses [d] (no transposes).
inline ArchSpec build_linear_transformer(std::size_t p, std::size_t n, std::size_t m, std::size_t heads,
                                         std::size_t degree = 3,
                                         std::vector<std::vector<std::size_t>> transpose_sets = {},
                                         const std::set<std::size_t>& residual = {}) {
  if (p < 1 || heads < 1 || degree < 1) throw InvalidShape("transformer needs p, H, d >= 1");
  if (n < 1 || m < 1) throw InvalidShape("transformer input shape must be at least 1x1");
  detail::check_residual_set(residual, p);
  if (transpose_sets.empty()) {
    std::vector<std::size_t> all(degree);
    std::iota(all.begin(), all.end(), std::size_t{1});
    transpose_sets.assign(heads, all);
  }
  if (transpose_sets.size() != heads) {
    throw InvalidTransposeSet("expected one index set per head (" + std::to_string(heads) + "), got " +
                              std::to_string(transpose_sets.size()));
  }
  for (auto& set : transpose_sets) {
    std::sort(set.begin(), set.end());
    if (set.empty() || set.size() > degree) throw InvalidTransposeSet("index set size must lie in [1, d]");
    if (std::adjacent_find(set.begin(), set.end()) != set.end()) {
      throw InvalidTransposeSet("duplicate index in set");
    }
    if (set.front() < 1 || set.back() > degree) throw InvalidTransposeSet("set index outside [1, d]");
  }
  ArchSpec spec;
  spec.family = Family::LinearTransformer;
  spec.p = p;
  spec.n = n;
  spec.m = m;
  for (std::size_t i = 1; i <= p; ++i) {
    spec.attention_layers.push_back(AttentionLayerSpec{i, heads, degree, transpose_sets, residual.contains(i)});
  }
  return spec;
}

/// Shapes of the weight matrices each layer expects, in storage order.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> weight_shapes(const ArchSpec& spec) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;
  if (spec.family == Family::Mixer) {
    for (const auto& layer : spec.mixer_layers) {
      const std::size_t s = layer.odd() ? spec.n : spec.m;
      out.push_back({{s, s}});
    }
  } else {
    for (const auto& layer : spec.attention_layers) {
      std::vector<std::pair<std::size_t, std::size_t>> shapes(layer.heads * layer.degree, {spec.m, spec.n});
      shapes.emplace_back(spec.n, spec.m);
      out.push_back(std::move(shapes));
    }
  }
  return out;
}

inline std::uint64_t param_count(const ArchSpec& spec) {
  std::uint64_t total = 0;
  for (const auto& layer : weight_shapes(spec)) {
    for (const auto& [r, c] : layer) total += r * c;
  }
  return total;
}

/// Uniform draw from {-9..-1, 1..9}. Uses raw mt19937_64 output with
/// rejection so the stream is identical across standard libraries.
inline std::int64_t draw_weight(std::mt19937_64& rng) {
  constexpr std::uint64_t kBuckets = 18;
  constexpr std::uint64_t kLimit = std::numeric_limits<std::uint64_t>::max() -
                                   std::numeric_limits<std::uint64_t>::max() % kBuckets;
  std::uint64_t r = 0;
  do {
    r = rng();
  } while (r >= kLimit);
  const auto v = static_cast<std::int64_t>(r % kBuckets);
  return v < 9 ? v - 9 : v - 8;
}

inline WeightAssignment sample_weights(const ArchSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  WeightAssignment w;
  w.seed = seed;
  for (const auto& layer : weight_shapes(spec)) {
    std::vector<ConstMatrix> mats;
    for (const auto& [r, c] : layer) {
      ConstMatrix mat(r, c);
      for (auto& x : mat.flat()) x = draw_weight(rng);
      mats.push_back(std::move(mat));
    }
    w.layers.push_back(std::move(mats));
  }
  return w;
}

/// Largest total degree the network output can reach: 2^p for mixers,
/// d^p for transformers (saturating).
inline std::uint64_t degree_bound(const ArchSpec& spec) {
  const std::uint64_t base = spec.degree();
  std::uint64_t d = 1;
  for (std::size_t i = 0; i < spec.p; ++i) {
    if (d > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    d *= base;
  }
  return d;
}

namespace detail {

inline PolyMatrix maybe_permute(const PolyMatrix& x, const std::vector<std::size_t>& perm) {
  return perm.empty() ? x : permute(x, std::span<const std::size_t>(perm));
}

inline PolyMatrix mixer_layer(const MixerLayerSpec& layer, const ConstMatrix& w, const PolyMatrix& x) {
  PolyMatrix pre;
  if (layer.odd()) {
    pre = matmul(w, maybe_permute(x, layer.perms.pi_e));
  } else {
    pre = transpose(matmul(w, maybe_permute(transpose(x), layer.perms.pi_o)));
  }
  PolyMatrix out = entrywise_square(pre);
  if (layer.residual) out = out + maybe_permute(x, layer.perms.pi_r);
  return out;
}

inline PolyMatrix attention_layer(const AttentionLayerSpec& layer, std::span<const ConstMatrix> w,
                                  const PolyMatrix& x) {
  PolyMatrix sum;
  for (std::size_t k = 0; k < layer.heads; ++k) {
    const auto& direct = layer.transpose_sets[k];
    PolyMatrix prod;
    for (std::size_t j = 1; j <= layer.degree; ++j) {
      PolyMatrix f = matmul(w[k * layer.degree + (j - 1)], x);
      if (!std::binary_search(direct.begin(), direct.end(), j)) f = transpose(f);
      prod = (j == 1) ? std::move(f) : matmul(prod, f);
    }
    sum = (k == 0) ? std::move(prod) : sum + prod;
  }
  PolyMatrix out = matmul(w.back(), sum);
  if (layer.residual) out = out + x;
  return out;
}

}  // namespace detail

/// Evaluates the network on the symbolic input X (entries are the variables
/// var(i, j)) and returns the exact output polynomials.
inline PolyMatrix symbolic_forward(const ArchSpec& spec, const WeightAssignment& w,
                                   std::size_t degree_cap = default_degree_cap()) {
  const std::uint64_t bound = degree_bound(spec);
  if (bound > degree_cap) {
    throw DegreeCapExceeded("output degree bound " + std::to_string(bound) + " exceeds cap " +
                            std::to_string(degree_cap));
  }
  const auto shapes = weight_shapes(spec);
  if (w.layers.size() != shapes.size()) throw ShapeMismatch("weight assignment has wrong layer count");
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (w.layers[i].size() != shapes[i].size()) throw ShapeMismatch("wrong matrix count in layer");
    for (std::size_t j = 0; j < shapes[i].size(); ++j) {
      if (w.layers[i][j].rows() != shapes[i][j].first || w.layers[i][j].cols() != shapes[i][j].second) {
        throw ShapeMismatch("weight matrix shape does not match spec");
      }
    }
  }

  PolyMatrix x = symbols(spec.n, spec.m);
  for (std::size_t i = 0; i < spec.p; ++i) {
    if (spec.family == Family::Mixer) {
      x = detail::mixer_layer(spec.mixer_layers[i], w.layers[i].front(), x);
    } else {
      x = detail::attention_layer(spec.attention_layers[i], w.layers[i], x);
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const ArchSpec& spec) {
  nlohmann::json j;
  j["family"] = family_name(spec.family);
  j["p"] = spec.p;
  j["n"] = spec.n;
  j["m"] = spec.m;
  nlohmann::json residual = nlohmann::json::array();
  if (spec.family == Family::Mixer) {
    nlohmann::json perms = nlohmann::json::object();
    for (const auto& layer : spec.mixer_layers) {
      if (layer.residual) residual.push_back(layer.index);
      if (layer.perms != MixerPermutations{}) {
        nlohmann::json e = nlohmann::json::object();
        if (!layer.perms.pi_e.empty()) e["pi_e"] = layer.perms.pi_e;
        if (!layer.perms.pi_o.empty()) e["pi_o"] = layer.perms.pi_o;
        if (!layer.perms.pi_r.empty()) e["pi_r"] = layer.perms.pi_r;
        perms[std::to_string(layer.index)] = e;
      }
    }
    if (!perms.empty()) j["permutations"] = perms;
  } else {
    for (const auto& layer : spec.attention_layers) {
      if (layer.residual) residual.push_back(layer.index);
    }
    j["H"] = spec.heads();
    j["d"] = spec.degree();
    j["transpose_sets"] = spec.attention_layers.empty() ? nlohmann::json::array()
                                                         : nlohmann::json(spec.attention_layers.front().transpose_sets);
  }
  j["residual"] = residual;
  j["seed"] = spec.seed;
  return j;
}

/// Parses the ArchSpec JSON schema. p = 0 yields the identity network.
inline ArchSpec arch_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw ParseError("spec must be a JSON object");
    const std::string family = j.at("family").get<std::string>();
    const auto p = j.at("p").get<std::size_t>();
    const auto n = j.at("n").get<std::size_t>();
    const auto m = j.at("m").get<std::size_t>();
    std::set<std::size_t> residual;
    if (j.contains("residual")) {
      for (const auto& r : j.at("residual")) residual.insert(r.get<std::size_t>());
    }
    ArchSpec spec;
    if (family == "mixer") {
      std::map<std::size_t, MixerPermutations> perms;
      if (j.contains("permutations")) {
        for (const auto& [key, val] : j.at("permutations").items()) {
          MixerPermutations mp;
          if (val.contains("pi_e")) mp.pi_e = val.at("pi_e").get<std::vector<std::size_t>>();
          if (val.contains("pi_o")) mp.pi_o = val.at("pi_o").get<std::vector<std::size_t>>();
          if (val.contains("pi_r")) mp.pi_r = val.at("pi_r").get<std::vector<std::size_t>>();
          perms[std::stoul(key)] = std::move(mp);
        }
      }
      if (p == 0) {
        if (n < 1 || m < 1) throw InvalidShape("input shape must be at least 1x1");
        spec.family = Family::Mixer;
        spec.n = n;
        spec.m = m;
      } else {
        spec = build_mixer(p, n, m, residual, perms);
      }
    } else if (family == "linear_transformer") {
      const auto heads = j.value("H", std::size_t{1});
      const auto degree = j.value("d", std::size_t{3});
      std::vector<std::vector<std::size_t>> sets;
      if (j.contains("transpose_sets")) sets = j.at("transpose_sets").get<std::vector<std::vector<std::size_t>>>();
      if (p == 0) {
        if (n < 1 || m < 1) throw InvalidShape("input shape must be at least 1x1");
        spec.family = Family::LinearTransformer;
        spec.n = n;
        spec.m = m;
      } else {
        spec = build_linear_transformer(p, n, m, heads, degree, std::move(sets), residual);
      }
    } else {
      throw ParseError("unknown family '" + family + "'");
    }
    spec.seed = j.value("seed", std::uint64_t{0});
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("malformed spec: ") + e.what());
  }
}

inline nlohmann::json to_json(const WeightAssignment& w) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : w.layers) {
    nlohmann::json mats = nlohmann::json::array();
    for (const auto& mat : layer) {
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < mat.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < mat.cols(); ++c) row.push_back(numerator(mat(i, c)).convert_to<long long>());
        rows.push_back(std::move(row));
      }
      mats.push_back(std::move(rows));
    }
    layers.push_back(std::move(mats));
  }
  return {{"seed", w.seed}, {"layers", std::move(layers)}};
}

inline WeightAssignment weights_from_json(const nlohmann::json& j) {
  try {
    WeightAssignment w;
    w.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& layer : j.at("layers")) {
      std::vector<ConstMatrix> mats;
      for (const auto& rows : layer) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.front().size();
        ConstMatrix mat(r, c);
        for (std::size_t i = 0; i < r; ++i) {
          if (rows[i].size() != c) throw ParseError("ragged weight matrix");
          for (std::size_t k = 0; k < c; ++k) mat(i, k) = rows[i][k].get<long long>();
        }
        mats.push_back(std::move(mat));
      }
      w.layers.push_back(std::move(mats));
    }
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed weights: ") + e.what());
  }
}

/// FNV-1a over the canonical spec JSON; a short, stable identity for reports.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

inline std::string spec_digest(const ArchSpec& spec) { return fnv1a_hex(to_json(spec).dump()); }

}  // namespace srk

#endif  // SRK_ARCH_HPP
