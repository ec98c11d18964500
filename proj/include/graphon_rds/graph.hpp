#pragma once

// Dense simple graphs with packed bit rows, seed graphs, and the two random
// graph models G(n, kernel) and G(x, H, kernel).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "graphon_rds/errors.hpp"
#include "graphon_rds/kernel.hpp"
#include "graphon_rds/parallel.hpp"
#include "graphon_rds/rng.hpp"

namespace graphon_rds {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Position of the unordered pair {i, j}, i < j, in row-major upper-triangle order.
constexpr std::uint64_t pair_index(std::uint64_t i, std::uint64_t j, std::uint64_t n) {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

constexpr std::uint64_t pair_count(std::uint64_t n) { return n * (n - 1) / 2; }

/// A small simple graph given by its edge list (vertices 0-based).
struct SeedGraph {
  std::size_t n = 0;
  std::vector<Edge> edges;

  static SeedGraph empty(std::size_t n) { return {n, {}}; }

  /// 0 - 1 - ... - (n-1).
  static SeedGraph path(std::size_t n) {
    SeedGraph h{n, {}};
    for (std::size_t i = 1; i < n; ++i) {
      h.edges.emplace_back(static_cast<Vertex>(i - 1), static_cast<Vertex>(i));
    }
    return h;
  }

  static SeedGraph complete(std::size_t n) {
    SeedGraph h{n, {}};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        h.edges.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(j));
      }
    }
    return h;
  }

  [[nodiscard]] std::size_t edge_count() const { return edges.size(); }

  /// Normalises each edge to (min, max) and rejects loops, duplicates and
  /// out-of-range vertices.
  void validate() {
    std::set<Edge> seen;
    for (auto& [a, b] : edges) {
      if (a == b) throw FormatError("seed graph has a self-loop");
      if (a > b) std::swap(a, b);
      if (b >= n) throw FormatError("seed graph vertex out of range");
      if (!seen.insert({a, b}).second) throw FormatError("seed graph has a duplicate edge");
    }
  }
};

/// Simple undirected graph on {0..n-1}: symmetric bit matrix, zero diagonal,
/// optional vertex labels in [0,1].
class DenseGraph {
 public:
  class Builder;

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::size_t words_per_row() const { return words_; }

  [[nodiscard]] std::span<const std::uint64_t> row(std::size_t i) const {
    return {bits_.data() + i * words_, words_};
  }

  [[nodiscard]] bool has_edge(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + j / 64] >> (j % 64)) & 1u;
  }

  [[nodiscard]] std::uint64_t edge_count() const { return edges_; }
  [[nodiscard]] std::size_t degree(std::size_t i) const {
    std::size_t d = 0;
    for (auto w : row(i)) d += static_cast<std::size_t>(std::popcount(w));
    return d;
  }

  [[nodiscard]] const std::optional<std::vector<double>>& labels() const { return labels_; }

  friend bool operator==(const DenseGraph& a, const DenseGraph& b) {
    return a.n_ == b.n_ && a.bits_ == b.bits_ && a.labels_ == b.labels_;
  }

 private:
  DenseGraph() = default;

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::uint64_t edges_ = 0;
  std::optional<std::vector<double>> labels_;
};

namespace detail {

// In-place transpose of a 64x64 bit matrix (row r, bit c).
inline void transpose64(std::uint64_t* a) {
  std::uint64_t m = 0x00000000FFFFFFFFull;
  for (int j = 32; j != 0; j >>= 1, m ^= (m << j)) {
    for (int k = 0; k < 64; k = ((k | j) + 1) & ~j) {
      const std::uint64_t t = ((a[k] >> j) ^ a[k | j]) & m;
      a[k] ^= t << j;
      a[k | j] ^= t;
    }
  }
}

}  // namespace detail

/// The only way to populate a DenseGraph. Upper-triangle writes to distinct
/// rows may proceed concurrently; `build` mirrors them.
class DenseGraph::Builder {
 public:
  explicit Builder(std::size_t n) {
    g_.n_ = n;
    g_.words_ = (n + 63) / 64;
    g_.bits_.assign(n * g_.words_, 0);
  }

  /// Sets the (i, j) bit of row i only; requires i < j.
  void set_upper(std::size_t i, std::size_t j) {
    g_.bits_[i * g_.words_ + j / 64] |= std::uint64_t{1} << (j % 64);
  }

  void add_edge(std::size_t i, std::size_t j) {
    if (i == j || i >= g_.n_ || j >= g_.n_) throw DomainError("invalid edge");
    if (i > j) std::swap(i, j);
    set_upper(i, j);
  }

  [[nodiscard]] std::uint64_t* row(std::size_t i) { return g_.bits_.data() + i * g_.words_; }

  void set_labels(std::vector<double> labels) {
    if (labels.size() != g_.n_) throw DimensionError("label vector length differs from n");
    g_.labels_ = std::move(labels);
  }

  /// Requires only upper-triangle bits to have been set.
  DenseGraph build() && {
    mirror();
    std::uint64_t ones = 0;
    for (auto w : g_.bits_) ones += static_cast<std::uint64_t>(std::popcount(w));
    g_.edges_ = ones / 2;
    return std::move(g_);
  }

 private:
  void mirror() {
    const std::size_t n = g_.n_;
    const std::size_t blocks = g_.words_;
    auto tile_row = [&](std::size_t r, std::size_t word) -> std::uint64_t* {
      return r < n ? &g_.bits_[r * g_.words_ + word] : nullptr;
    };
    // Task `target` owns the lower/diagonal words of rows in block `target`.
    parallel_for(blocks, [&](std::size_t target) {
      std::uint64_t tile[64];
      for (std::size_t source = 0; source <= target; ++source) {
        for (std::size_t r = 0; r < 64; ++r) {
          const auto* p = tile_row(source * 64 + r, target);
          tile[r] = p ? *p : 0;
        }
        detail::transpose64(tile);
        for (std::size_t r = 0; r < 64; ++r) {
          if (auto* p = tile_row(target * 64 + r, source)) *p |= tile[r];
        }
      }
    });
  }

  DenseGraph g_;
};

inline std::uint64_t edge_count(const DenseGraph& g) { return g.edge_count(); }

inline DenseGraph materialize(const SeedGraph& h) {
  DenseGraph::Builder b(h.n);
  for (auto [i, j] : h.edges) b.add_edge(i, j);
  return std::move(b).build();
}

/// G(x, H, kernel): edges of H are always present; every other pair {i, j} is
/// present iff U_ij < kernel(x_i, x_j), where U_ij is word pair_index(i,j) of
/// the stream key.child("edges"). The result is independent of thread count.
inline DenseGraph generate_gxhk(std::span<const double> x, const SeedGraph& h,
                                const StandardKernel& k, const RngKey& key) {
  if (x.size() != h.n) throw DimensionError("label vector length differs from seed graph size");
  for (double xi : x) require_unit(xi, "label");
  const std::size_t n = x.size();
  DenseGraph::Builder b(n);
  for (auto [i, j] : h.edges) b.add_edge(i, j);
  const RngKey edge_key = key.child("edges");
  parallel_for(n, [&](std::size_t i) {
    std::uint64_t* row = b.row(i);
    std::uint64_t idx = n > 1 ? pair_index(i, i + 1, n) : 0;
    std::array<std::uint64_t, 2> block{};
    bool have = false;
    for (std::size_t j = i + 1; j < n; ++j, ++idx) {
      if (!have || (idx & 1) == 0) {
        block = counter_block(edge_key, idx >> 1);
        have = true;
      }
      const double u = to_unit(block[idx & 1]);
      if (u < k.eval(x[i], x[j])) row[j / 64] |= std::uint64_t{1} << (j % 64);
    }
  });
  b.set_labels(std::vector<double>(x.begin(), x.end()));
  return std::move(b).build();
}

/// Labels for G(n, kernel): word i of key.child("labels").
inline std::vector<double> uniform_labels(std::size_t n, const RngKey& key) {
  std::vector<double> x(n);
  const RngKey label_key = key.child("labels");
  for (std::size_t i = 0; i < n; ++i) x[i] = counter_uniform(label_key, i);
  return x;
}

/// G(n, kernel), realised as G(U, empty, kernel) with uniform labels U.
inline DenseGraph generate_gnk(std::size_t n, const StandardKernel& k, const RngKey& key) {
  if (n < 1) throw PreconditionError("generate_gnk needs n >= 1");
  const auto x = uniform_labels(n, key);
  return generate_gxhk(x, SeedGraph::empty(n), k, key);
}

// --- serialization -----------------------------------------------------------

inline constexpr char kGraphMagic[4] = {'G', 'R', 'D', 'G'};
inline constexpr std::uint32_t kGraphFormatVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t b = 0; b < sizeof(T); ++b) buf[b] = static_cast<unsigned char>(v >> (8 * b));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) throw FormatError("truncated graph file");
  T v = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) v |= static_cast<T>(T{buf[b]} << (8 * b));
  return v;
}

}  // namespace detail

/// Binary layout (little endian): "GRDG", u32 version, u64 n, u32 flags
/// (bit 0: labels present), ceil(n(n-1)/16) bytes of upper-triangle bits in
/// pair_index order (LSB first), then n f64 labels if present.
inline void write_graph_binary(const DenseGraph& g, std::ostream& os) {
  os.write(kGraphMagic, 4);
  detail::put_le<std::uint32_t>(os, kGraphFormatVersion);
  detail::put_le<std::uint64_t>(os, g.n());
  detail::put_le<std::uint32_t>(os, g.labels() ? 1u : 0u);
  const std::size_t n = g.n();
  std::vector<unsigned char> packed((pair_count(n) + 7) / 8, 0);
  std::uint64_t p = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++p) {
      if (g.has_edge(i, j)) packed[p / 8] |= static_cast<unsigned char>(1u << (p % 8));
    }
  }
  os.write(reinterpret_cast<const char*>(packed.data()),
           static_cast<std::streamsize>(packed.size()));
  if (g.labels()) {
    for (double v : *g.labels()) detail::put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
  }
}

inline DenseGraph read_graph_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kGraphMagic)) {
    throw FormatError("not a graph file (bad magic)");
  }
  if (detail::get_le<std::uint32_t>(is) != kGraphFormatVersion) {
    throw FormatError("unsupported graph file version");
  }
  const auto n = static_cast<std::size_t>(detail::get_le<std::uint64_t>(is));
  const auto flags = detail::get_le<std::uint32_t>(is);
  std::vector<unsigned char> packed((pair_count(n) + 7) / 8);
  if (!is.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size()))) {
    throw FormatError("truncated graph file");
  }
  DenseGraph::Builder b(n);
  std::uint64_t p = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++p) {
      if ((packed[p / 8] >> (p % 8)) & 1u) b.set_upper(i, j);
    }
  }
  if (flags & 1u) {
    std::vector<double> labels(n);
    for (auto& v : labels) v = std::bit_cast<double>(detail::get_le<std::uint64_t>(is));
    b.set_labels(std::move(labels));
  }
  return std::move(b).build();
}

/// "# n <n>" header, then one "i j" line per edge, 1-indexed, i < j.
inline void write_edge_list(const DenseGraph& g, std::ostream& os) {
  os << "# n " << g.n() << '\n';
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = i + 1; j < g.n(); ++j) {
      if (g.has_edge(i, j)) os << i + 1 << ' ' << j + 1 << '\n';
    }
  }
}

inline void write_edge_list(const SeedGraph& h, std::ostream& os) {
  os << "# n " << h.n << '\n';
  for (auto [i, j] : h.edges) os << i + 1 << ' ' << j + 1 << '\n';
}

/// Reads 1-indexed "i j" lines. The vertex count comes from a "# n <n>"
/// header, else `n`, else the largest index seen.
inline SeedGraph read_seed_graph(std::istream& is, std::optional<std::size_t> n = std::nullopt) {
  SeedGraph h;
  std::size_t max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    if (line.starts_with('#')) {
      std::string hash, key;
      std::size_t value = 0;
      if ((ls >> hash >> key >> value) && key == "n" && !n) n = value;
      continue;
    }
    long long a = 0, b = 0;
    if (!(ls >> a)) continue;
    if (!(ls >> b) || a < 1 || b < 1) {
      throw FormatError("edge list line " + std::to_string(lineno) + " is malformed");
    }
    max_index = std::max<std::size_t>(max_index, static_cast<std::size_t>(std::max(a, b)));
    h.edges.emplace_back(static_cast<Vertex>(a - 1), static_cast<Vertex>(b - 1));
  }
  h.n = n.value_or(max_index);
  h.validate();
  return h;
}

}  // namespace graphon_rds
