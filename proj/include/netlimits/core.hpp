#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace netlimits {

// Error taxonomy. Everything user-facing derives from Error so the CLI can
// map validation failures to exit code 1 and I/O failures to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RangeError : Error {
  using Error::Error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct InfeasibleError : Error {
  using Error::Error;
};
struct ModifierRangeError : Error {
  using Error::Error;
};
struct TooLargeError : Error {
  using Error::Error;
};
struct UnsupportedSpecError : Error {
  using Error::Error;
};
struct ImpossibleObservationError : Error {
  using Error::Error;
};
struct LengthMismatchError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct IOError : Error {
  using Error::Error;
};

// Seed for the splittable generator in rng.hpp. Equal (master, stream)
// always reproduces the same draw sequence.
struct Seed {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;
};

// Per-node community labels, each exactly +1 or -1.
class LabelVector {
 public:
  LabelVector() = default;

  explicit LabelVector(std::vector<std::int8_t> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw RangeError("LabelVector: need at least 2 labels");
    for (auto v : labels_) {
      if (v != 1 && v != -1) throw RangeError("LabelVector: entries must be +1 or -1");
    }
  }

  static LabelVector of_ints(const std::vector<int>& values) {
    std::vector<std::int8_t> l;
    l.reserve(values.size());
    for (int v : values) l.push_back(static_cast<std::int8_t>(v));
    return LabelVector(std::move(l));
  }

  // Decodes the "binary order" integer: bit (n-1-i) of `value` set means
  // y_i = +1, so the all -1 labeling is value 0 and orderings compare like
  // big-endian bit strings. map_recover breaks ties toward the smallest value.
  static LabelVector from_order_value(std::size_t n, std::uint64_t value) {
    std::vector<std::int8_t> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      l[i] = ((value >> (n - 1 - i)) & 1u) ? std::int8_t{1} : std::int8_t{-1};
    }
    return LabelVector(std::move(l));
  }

  std::uint64_t order_value() const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (labels_[i] == 1) v |= std::uint64_t{1} << (size() - 1 - i);
    }
    return v;
  }

  std::size_t size() const { return labels_.size(); }
  int operator[](std::size_t i) const { return labels_[i]; }
  bool same(std::size_t i, std::size_t j) const { return labels_[i] == labels_[j]; }

  LabelVector flipped() const {
    std::vector<std::int8_t> l(labels_);
    for (auto& v : l) v = static_cast<std::int8_t>(-v);
    return LabelVector(std::move(l));
  }

  bool operator==(const LabelVector& o) const { return labels_ == o.labels_; }

  const std::vector<std::int8_t>& data() const { return labels_; }

 private:
  std::vector<std::int8_t> labels_;
};

// Binary adjacency matrix over n nodes, no self-loops. Undirected graphs are
// stored symmetrically; directed graphs (DPAM/DSWM) only ever carry edges
// from an earlier node index to a later one.
class Graph {
 public:
  Graph(std::size_t n, bool directed) : n_(n), directed_(directed), adj_(n * n, 0) {
    if (n < 2) throw RangeError("Graph: n >= 2 required");
  }

  std::size_t node_count() const { return n_; }
  bool directed() const { return directed_; }

  bool edge(std::size_t from, std::size_t to) const { return adj_[from * n_ + to] != 0; }

  void set_edge(std::size_t from, std::size_t to, bool present) {
    if (from == to) throw RangeError("Graph: self-loops not allowed");
    if (from >= n_ || to >= n_) throw RangeError("Graph: node index out of range");
    if (directed_ && from > to) throw RangeError("Graph: directed edges must point from an earlier to a later index");
    adj_[from * n_ + to] = present ? 1 : 0;
    if (!directed_) adj_[to * n_ + from] = present ? 1 : 0;
  }

  std::size_t in_degree(std::size_t node) const {
    std::size_t d = 0;
    for (std::size_t j = 0; j < n_; ++j) d += adj_[j * n_ + node];
    return d;
  }

  std::size_t out_degree(std::size_t node) const {
    std::size_t d = 0;
    for (std::size_t k = 0; k < n_; ++k) d += adj_[node * n_ + k];
    return d;
  }

  // Edges as (from, to), each undirected edge once with from < to,
  // lexicographically sorted.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_list() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        if (adj_[i * n_ + j]) out.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      }
    }
    return out;
  }

  void validate() const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (adj_[i * n_ + i]) throw RangeError("Graph: self-loop at node " + std::to_string(i));
    }
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (directed_) {
          if (adj_[i * n_ + j]) throw RangeError("Graph: directed edge points backwards");
        } else if (adj_[i * n_ + j] != adj_[j * n_ + i]) {
          throw RangeError("Graph: undirected adjacency not symmetric");
        }
      }
    }
  }

  bool operator==(const Graph& o) const {
    return n_ == o.n_ && directed_ == o.directed_ && adj_ == o.adj_;
  }

 private:
  std::size_t n_;
  bool directed_;
  std::vector<std::uint8_t> adj_;
};

// Node pairs in generation order. Undirected models generate (i,j), i<j, in
// lexicographic order; directed models generate column by column: all (j,i)
// with j<i before anything involving column i+1.
inline std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

inline std::vector<std::pair<std::uint32_t, std::uint32_t>> generation_pairs(std::size_t n, bool directed) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(pair_count(n));
  if (directed) {
    for (std::uint32_t i = 1; i < n; ++i)
      for (std::uint32_t j = 0; j < i; ++j) pairs.emplace_back(j, i);
  } else {
    for (std::uint32_t i = 0; i + 1 < n; ++i)
      for (std::uint32_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

// Rank of (i,j), i<j, in the undirected lexicographic order above.
inline std::size_t pair_rank(std::size_t i, std::size_t j, std::size_t n) {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

}  // namespace netlimits
