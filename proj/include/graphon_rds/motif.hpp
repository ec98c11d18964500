#pragma once

// Small pattern graphs and the fixed motif enumeration used by the subgraph
// distance.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graphon_rds/errors.hpp"
#include "graphon_rds/rng.hpp"

namespace graphon_rds {

inline constexpr std::size_t kMaxMotifVertices = 6;

/// Simple graph on k <= 6 vertices (0-based), edges sorted lexicographically.
class Motif {
 public:
  Motif(std::size_t k, std::vector<std::pair<int, int>> edges) : k_(k), edges_(std::move(edges)) {
    if (k_ < 2 || k_ > kMaxMotifVertices) throw DomainError("motif size must be in [2, 6]");
    for (auto& [a, b] : edges_) {
      if (a == b) throw DomainError("motif has a self-loop");
      if (a > b) std::swap(a, b);
      if (a < 0 || static_cast<std::size_t>(b) >= k_) throw DomainError("motif vertex out of range");
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
      throw DomainError("motif has a duplicate edge");
    }
  }

  [[nodiscard]] std::size_t k() const { return k_; }
  [[nodiscard]] const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }

  [[nodiscard]] bool adjacent(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges_.begin(), edges_.end(), std::pair{a, b});
  }

  /// Bit p of the code is the p-th pair (a<b) in row-major order.
  [[nodiscard]] std::uint32_t adjacency_code() const { return code_under(nullptr); }

  /// Largest adjacency code over all vertex relabellings.
  [[nodiscard]] std::uint32_t canonical_code() const {
    std::array<int, kMaxMotifVertices> perm{};
    std::iota(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k_), 0);
    std::uint32_t best = 0;
    do {
      best = std::max(best, code_under(perm.data()));
    } while (std::next_permutation(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k_)));
    return best;
  }

  [[nodiscard]] bool connected() const {
    std::vector<int> parent(k_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (auto [a, b] : edges_) parent[find(a)] = find(b);
    for (std::size_t v = 1; v < k_; ++v) {
      if (find(static_cast<int>(v)) != find(0)) return false;
    }
    return true;
  }

  /// "k=3; edges=1-2,2-3" (1-indexed).
  [[nodiscard]] std::string to_string() const {
    std::ostringstream os;
    os << "k=" << k_ << "; edges=";
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      os << (e ? "," : "") << edges_[e].first + 1 << '-' << edges_[e].second + 1;
    }
    return os.str();
  }

  friend bool operator==(const Motif&, const Motif&) = default;

 private:
  // Code after relabelling v -> perm[v]; nullptr means the identity.
  [[nodiscard]] std::uint32_t code_under(const int* perm) const {
    std::uint32_t code = 0;
    for (auto [a, b] : edges_) {
      int pa = perm ? perm[a] : a;
      int pb = perm ? perm[b] : b;
      if (pa > pb) std::swap(pa, pb);
      const auto pos = static_cast<std::uint32_t>(pa * (2 * static_cast<int>(k_) - pa - 1) / 2 +
                                                  (pb - pa - 1));
      code |= 1u << pos;
    }
    return code;
  }

  std::size_t k_;
  std::vector<std::pair<int, int>> edges_;
};

/// Named motifs: edge, path3, triangle, star4, cycle4, clique4.
inline Motif named_motif(std::string_view name) {
  if (name == "edge") return Motif(2, {{0, 1}});
  if (name == "path3") return Motif(3, {{0, 1}, {1, 2}});
  if (name == "triangle") return Motif(3, {{0, 1}, {0, 2}, {1, 2}});
  if (name == "star4") return Motif(4, {{0, 1}, {0, 2}, {0, 3}});
  if (name == "cycle4") return Motif(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  if (name == "clique4") return Motif(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  throw FormatError("unknown motif alias \"" + std::string(name) + "\"");
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Parses an alias or "k=<k>; edges=a-b,c-d,..." (1-indexed vertices).
inline Motif parse_motif(std::string_view text) {
  text = trim(text);
  if (!text.starts_with("k=")) return named_motif(text);
  const auto semi = text.find(';');
  if (semi == std::string_view::npos) throw FormatError("motif text needs \"; edges=\"");
  std::size_t k = 0;
  try {
    k = std::stoul(std::string(trim(text.substr(2, semi - 2))));
  } catch (const std::exception&) {
    throw FormatError("motif size is not a number");
  }
  auto rest = trim(text.substr(semi + 1));
  if (!rest.starts_with("edges=")) throw FormatError("motif text needs \"edges=\"");
  rest.remove_prefix(6);
  std::vector<std::pair<int, int>> edges;
  while (!trim(rest).empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) throw FormatError("motif edge needs the form a-b");
    try {
      edges.emplace_back(std::stoi(std::string(item.substr(0, dash))) - 1,
                         std::stoi(std::string(item.substr(dash + 1))) - 1);
    } catch (const std::exception&) {
      throw FormatError("motif edge endpoint is not a number");
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return Motif(k, std::move(edges));
}

/// Ordered motifs F_1, F_2, ... with weights 2^-i.
class MotifCatalog {
 public:
  explicit MotifCatalog(std::vector<Motif> motifs) : motifs_(std::move(motifs)) {
    if (motifs_.empty()) throw PreconditionError("motif catalog must not be empty");
    for (std::size_t a = 0; a < motifs_.size(); ++a) {
      for (std::size_t b = a + 1; b < motifs_.size(); ++b) {
        if (motifs_[a].k() == motifs_[b].k() &&
            motifs_[a].canonical_code() == motifs_[b].canonical_code()) {
          throw PreconditionError("motif catalog contains isomorphic duplicates");
        }
      }
    }
  }

  /// All connected simple graphs on 2..max_k vertices, one per isomorphism
  /// class, sorted by (k, edge count, canonical code).
  static MotifCatalog standard(std::size_t max_k = 4) {
    std::vector<Motif> out;
    for (std::size_t k = 2; k <= max_k; ++k) {
      const std::size_t pairs = k * (k - 1) / 2;
      std::vector<std::uint32_t> seen;
      std::vector<Motif> level;
      for (std::uint32_t mask = 1; mask < (1u << pairs); ++mask) {
        std::vector<std::pair<int, int>> edges;
        std::uint32_t p = 0;
        for (int a = 0; a < static_cast<int>(k); ++a) {
          for (int b = a + 1; b < static_cast<int>(k); ++b, ++p) {
            if ((mask >> p) & 1u) edges.emplace_back(a, b);
          }
        }
        Motif m(k, std::move(edges));
        if (!m.connected()) continue;
        const auto code = m.canonical_code();
        if (std::find(seen.begin(), seen.end(), code) != seen.end()) continue;
        seen.push_back(code);
        level.push_back(canonical_representative(m));
      }
      std::sort(level.begin(), level.end(), [](const Motif& a, const Motif& b) {
        return std::pair{a.edge_count(), a.canonical_code()} <
               std::pair{b.edge_count(), b.canonical_code()};
      });
      out.insert(out.end(), level.begin(), level.end());
    }
    return MotifCatalog(std::move(out));
  }

  /// The relabelling of `m` whose adjacency code is the canonical code.
  static Motif canonical_representative(const Motif& m) {
    const auto target = m.canonical_code();
    std::array<int, kMaxMotifVertices> perm{};
    std::iota(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m.k()), 0);
    do {
      std::vector<std::pair<int, int>> edges;
      for (auto [a, b] : m.edges()) edges.emplace_back(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
      Motif candidate(m.k(), std::move(edges));
      if (candidate.adjacency_code() == target) return candidate;
    } while (std::next_permutation(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m.k())));
    return m;
  }

  [[nodiscard]] std::size_t size() const { return motifs_.size(); }
  [[nodiscard]] const Motif& operator[](std::size_t i) const { return motifs_[i]; }
  [[nodiscard]] const std::vector<Motif>& motifs() const& { return motifs_; }
  // By value on temporaries so range-for over standard().motifs() stays valid.
  [[nodiscard]] std::vector<Motif> motifs() && { return std::move(motifs_); }

  /// Weight of the motif at 0-based position i, i.e. 2^-(i+1).
  [[nodiscard]] static double weight(std::size_t i) {
    return std::ldexp(1.0, -static_cast<int>(i + 1));
  }
  /// Bound on the weighted tail beyond the catalog: 2^-K.
  [[nodiscard]] double truncation_bound() const {
    return std::ldexp(1.0, -static_cast<int>(motifs_.size()));
  }

  /// One line per motif: index, k, edge count, canonical code, weight, text.
  [[nodiscard]] std::string manifest() const {
    std::ostringstream os;
    os << "# index k edges canonical_code weight motif\n";
    for (std::size_t i = 0; i < motifs_.size(); ++i) {
      os << i + 1 << ' ' << motifs_[i].k() << ' ' << motifs_[i].edge_count() << ' '
         << motifs_[i].canonical_code() << ' ' << weight(i) << " \"" << motifs_[i].to_string()
         << "\"\n";
    }
    return os.str();
  }

  [[nodiscard]] std::uint64_t manifest_hash() const { return fnv1a64(manifest()); }

 private:
  std::vector<Motif> motifs_;
};

}  // namespace graphon_rds
