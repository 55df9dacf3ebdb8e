#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "common.hpp"

namespace hpt {

enum class TreeKind : uint8_t { Minimal = 0, MinDepth = 1, Reduced = 2 };

// streams agreeing on this many bits are treated as duplicates
inline constexpr uint32_t kMaxSplitDepth = 256;

struct Node {
  std::unique_ptr<Node> child[2];
  uint64_t count = 0;      // streams passing through
  bool wildcard = false;   // reduced tree: branch direction erased

  bool is_leaf() const { return !child[0] && !child[1]; }
  int arity() const { return (child[0] ? 1 : 0) + (child[1] ? 1 : 0); }
  const Node* only_child() const { return child[0] ? child[0].get() : child[1].get(); }
};

struct TreeStats {
  uint64_t n = 0;
  uint64_t total_nodes = 0;
  uint64_t leaves = 0;
  uint64_t degree1 = 0;  // internal nodes with a single child (wildcards included)
  uint64_t degree2 = 0;
  uint64_t wildcards = 0;
  double avg_leaf_depth = 0.0;
  uint32_t max_leaf_depth = 0;
  std::vector<uint64_t> leaf_depth_hist;  // indexed by depth
};

enum class Verdict : uint8_t { DefinitelyAbsent = 0, PresentOrFalsePositive = 1 };

class PrefixTree {
public:
  // digests need not be sorted; duplicates (first 256 stream bits equal) are an error
  static PrefixTree build(std::vector<uint64_t> digests, uint64_t key,
                          TreeKind kind = TreeKind::Minimal, uint32_t min_depth = 0);
  // wraps a decoded shape (no member digests available)
  static PrefixTree adopt(std::unique_ptr<Node> root, TreeKind kind, uint64_t n,
                          uint32_t min_depth);

  TreeKind kind() const { return kind_; }
  uint32_t min_depth() const { return min_depth_; }
  uint64_t size() const { return n_; }
  uint64_t key() const { return key_; }
  const Node* root() const { return root_.get(); }
  const std::vector<uint64_t>& digests() const { return digests_; }

  TreeStats stats() const;
  Verdict query(uint64_t key, uint64_t digest) const;
  PrefixTree reduced() const;             // Minimal -> Reduced copy
  PrefixTree extended(uint32_t d) const;  // min-depth-d version of a minimal tree

private:
  PrefixTree() = default;
  std::unique_ptr<Node> root_;
  std::vector<uint64_t> digests_;  // sorted by stream prefix; empty for adopted trees
  uint64_t key_ = 0;
  uint64_t n_ = 0;
  TreeKind kind_ = TreeKind::Minimal;
  uint32_t min_depth_ = 0;
};

// shape equality; wildcard nodes compare regardless of which slot holds the child
bool structural_equal(const PrefixTree& a, const PrefixTree& b);

// fraction of fresh random probes (members excluded) answered PresentOrFalsePositive
double simulate_false_positive(const PrefixTree& t, uint64_t probes, uint64_t seed);

struct EnsembleFp {
  double mean = 0.0;
  double stderr_mean = 0.0;
  uint32_t trials = 0;
};

// fp rate averaged over `trials` independently built trees
EnsembleFp simulate_fp_ensemble(uint64_t n, TreeKind kind, uint32_t min_depth, uint32_t trials,
                                uint64_t probes, uint64_t key, uint64_t seed);

// ensemble census used by the Monte Carlo validations
struct EnsembleStats {
  double mean_avg_leaf_depth = 0.0;
  double se_avg_leaf_depth = 0.0;
  double mean_degree1 = 0.0;
  double se_degree1 = 0.0;
  std::vector<double> mean_leaf_hist;  // per depth, mean leaves per tree
  std::vector<double> se_leaf_hist;
  uint32_t trials = 0;
};
EnsembleStats tree_ensemble_stats(uint64_t n, TreeKind kind, uint32_t min_depth, uint32_t trials,
                                  uint64_t key, uint64_t seed);

// n distinct random digests for simulations
std::vector<uint64_t> random_digests(uint64_t n, uint64_t seed);

}  // namespace hpt
