#include "trie.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "hashstream.hpp"

namespace hpt {

namespace {

struct Item {
  uint64_t blocks[4];  // first 256 stream bits
  uint64_t digest;
};

int item_bit(const Item& it, uint32_t depth) {
  return int((it.blocks[depth >> 6] >> (63 - (depth & 63))) & 1u);
}

struct Builder {
  const std::vector<Item>& items;
  uint64_t key;
  TreeKind kind;
  uint32_t min_depth;

  std::unique_ptr<Node> rec(size_t lo, size_t hi, uint32_t depth) const {
    auto node = std::make_unique<Node>();
    node->count = hi - lo;
    if (hi - lo == 1) {
      // extend the lone stream with its real bits until min_depth
      Node* tip = node.get();
      uint64_t dig = items[lo].digest;
      for (uint32_t t = depth; t < min_depth; ++t) {
        int b = stream_bit(key, dig, t);
        tip->child[b] = std::make_unique<Node>();
        tip->child[b]->count = 1;
        tip = tip->child[b].get();
      }
      return node;
    }
    auto first1 = std::partition_point(items.begin() + lo, items.begin() + hi,
                                       [&](const Item& it) { return item_bit(it, depth) == 0; });
    size_t split = size_t(first1 - items.begin());
    if (split > lo) node->child[0] = rec(lo, split, depth + 1);
    if (split < hi) node->child[1] = rec(split, hi, depth + 1);
    return node;
  }
};

void mark_wildcards(Node* n) {
  if (!n) return;
  if (n->count >= 2 && n->arity() == 1) n->wildcard = true;
  mark_wildcards(n->child[0].get());
  mark_wildcards(n->child[1].get());
}

std::unique_ptr<Node> clone(const Node* n) {
  if (!n) return nullptr;
  auto c = std::make_unique<Node>();
  c->count = n->count;
  c->wildcard = n->wildcard;
  c->child[0] = clone(n->child[0].get());
  c->child[1] = clone(n->child[1].get());
  return c;
}

}  // namespace

PrefixTree PrefixTree::build(std::vector<uint64_t> digests, uint64_t key, TreeKind kind,
                             uint32_t min_depth) {
  if (digests.empty()) fail(Err::Empty, "cannot build a tree from zero elements");
  if (kind == TreeKind::MinDepth && min_depth == 0) kind = TreeKind::Minimal;
  if (kind != TreeKind::MinDepth && min_depth != 0)
    fail(Err::Domain, "min_depth applies to the min-depth kind only");
  if (min_depth > (1u << 20)) fail(Err::Domain, "min_depth too large");

  std::vector<Item> items(digests.size());
  for (size_t i = 0; i < digests.size(); ++i) {
    items[i].digest = digests[i];
    for (uint64_t b = 0; b < 4; ++b) items[i].blocks[b] = stream_word(key, digests[i], b);
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return std::lexicographical_compare(a.blocks, a.blocks + 4, b.blocks, b.blocks + 4);
  });
  for (size_t i = 1; i < items.size(); ++i)
    if (std::equal(items[i].blocks, items[i].blocks + 4, items[i - 1].blocks))
      fail(Err::Duplicate, "two elements share the first 256 stream bits");

  Builder b{items, key, kind, kind == TreeKind::MinDepth ? min_depth : 0};
  PrefixTree t;
  t.root_ = b.rec(0, items.size(), 0);
  if (kind == TreeKind::Reduced) mark_wildcards(t.root_.get());
  t.key_ = key;
  t.n_ = items.size();
  t.kind_ = kind;
  t.min_depth_ = kind == TreeKind::MinDepth ? min_depth : 0;
  t.digests_.resize(items.size());
  for (size_t i = 0; i < items.size(); ++i) t.digests_[i] = items[i].digest;
  return t;
}

PrefixTree PrefixTree::adopt(std::unique_ptr<Node> root, TreeKind kind, uint64_t n,
                             uint32_t min_depth) {
  PrefixTree t;
  t.root_ = std::move(root);
  t.kind_ = kind;
  t.n_ = n;
  t.min_depth_ = min_depth;
  return t;
}

TreeStats PrefixTree::stats() const {
  TreeStats s;
  s.n = n_;
  struct Frame {
    const Node* node;
    uint32_t depth;
  };
  std::vector<Frame> stack{{root_.get(), 0}};
  uint64_t depth_sum = 0;
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    ++s.total_nodes;
    if (node->is_leaf()) {
      ++s.leaves;
      depth_sum += depth;
      if (s.leaf_depth_hist.size() <= depth) s.leaf_depth_hist.resize(depth + 1, 0);
      ++s.leaf_depth_hist[depth];
      s.max_leaf_depth = std::max(s.max_leaf_depth, depth);
      continue;
    }
    if (node->arity() == 1) ++s.degree1;
    else ++s.degree2;
    if (node->wildcard) ++s.wildcards;
    if (node->child[0]) stack.push_back({node->child[0].get(), depth + 1});
    if (node->child[1]) stack.push_back({node->child[1].get(), depth + 1});
  }
  s.avg_leaf_depth = s.leaves ? double(depth_sum) / double(s.leaves) : 0.0;
  return s;
}

Verdict PrefixTree::query(uint64_t key, uint64_t digest) const {
  const Node* n = root_.get();
  uint32_t depth = 0;
  uint64_t w = 0;
  uint64_t blk = ~0ull;
  while (!n->is_leaf()) {
    if (n->wildcard) {
      n = n->only_child();
    } else {
      uint64_t b = depth >> 6;
      if (b != blk) {
        blk = b;
        w = stream_word(key, digest, b);
      }
      int bit = int((w >> (63 - (depth & 63))) & 1u);
      const Node* next = n->child[bit].get();
      if (!next) return Verdict::DefinitelyAbsent;
      n = next;
    }
    ++depth;
  }
  return Verdict::PresentOrFalsePositive;
}

PrefixTree PrefixTree::extended(uint32_t d) const {
  if (kind_ != TreeKind::Minimal) fail(Err::Domain, "only minimal trees can be extended");
  if (digests_.empty()) fail(Err::Domain, "tree carries no streams to extend along");
  return build(digests_, key_, TreeKind::MinDepth, d);
}

PrefixTree PrefixTree::reduced() const {
  if (kind_ != TreeKind::Minimal) fail(Err::Domain, "only minimal trees can be reduced");
  PrefixTree t;
  t.root_ = clone(root_.get());
  mark_wildcards(t.root_.get());
  t.digests_ = digests_;
  t.key_ = key_;
  t.n_ = n_;
  t.kind_ = TreeKind::Reduced;
  return t;
}

namespace {
bool eq(const Node* a, const Node* b) {
  if (!a || !b) return a == b;
  if (a->count != b->count || a->wildcard != b->wildcard) return false;
  if (a->wildcard) return eq(a->only_child(), b->only_child());
  return eq(a->child[0].get(), b->child[0].get()) && eq(a->child[1].get(), b->child[1].get());
}
}  // namespace

bool structural_equal(const PrefixTree& a, const PrefixTree& b) {
  return a.kind() == b.kind() && a.size() == b.size() && a.min_depth() == b.min_depth() &&
         eq(a.root(), b.root());
}

double simulate_false_positive(const PrefixTree& t, uint64_t probes, uint64_t seed) {
  if (probes == 0) fail(Err::Domain, "probes >= 1 required");
  std::unordered_set<uint64_t> members(t.digests().begin(), t.digests().end());
  SplitMix rng(seed);
  uint64_t hits = 0;
  for (uint64_t i = 0; i < probes; ++i) {
    uint64_t d = rng.next();
    while (members.count(d)) d = rng.next();
    hits += t.query(t.key(), d) == Verdict::PresentOrFalsePositive ? 1 : 0;
  }
  return double(hits) / double(probes);
}

std::vector<uint64_t> random_digests(uint64_t n, uint64_t seed) {
  SplitMix rng(seed);
  std::unordered_set<uint64_t> seen;
  std::vector<uint64_t> out;
  out.reserve(n);
  while (out.size() < n) {
    uint64_t d = rng.next();
    if (seen.insert(d).second) out.push_back(d);
  }
  return out;
}

EnsembleFp simulate_fp_ensemble(uint64_t n, TreeKind kind, uint32_t min_depth, uint32_t trials,
                                uint64_t probes, uint64_t key, uint64_t seed) {
  std::vector<double> rates(trials);
  for_each_trial(trials, [&](uint32_t t) {
    auto tree =
        PrefixTree::build(random_digests(n, trial_seed(seed, 2 * t)), key, kind, min_depth);
    rates[t] = simulate_false_positive(tree, probes, trial_seed(seed, 2 * t + 1));
  });
  Moments m;
  for (double r : rates) m.add(r);
  return {m.mean(), m.se(), trials};
}

EnsembleStats tree_ensemble_stats(uint64_t n, TreeKind kind, uint32_t min_depth, uint32_t trials,
                                  uint64_t key, uint64_t seed) {
  std::vector<TreeStats> all(trials);
  for_each_trial(trials, [&](uint32_t t) {
    auto tree =
        PrefixTree::build(random_digests(n, trial_seed(seed, t)), key, kind, min_depth);
    all[t] = tree.stats();
  });
  EnsembleStats es;
  es.trials = trials;
  Moments depth, deg1;
  size_t maxlen = 0;
  for (const auto& s : all) maxlen = std::max(maxlen, s.leaf_depth_hist.size());
  std::vector<Moments> hist(maxlen);
  for (const auto& s : all) {
    depth.add(s.avg_leaf_depth);
    deg1.add(double(s.degree1));
    for (size_t d = 0; d < maxlen; ++d)
      hist[d].add(d < s.leaf_depth_hist.size() ? double(s.leaf_depth_hist[d]) : 0.0);
  }
  es.mean_avg_leaf_depth = depth.mean();
  es.se_avg_leaf_depth = depth.se();
  es.mean_degree1 = deg1.mean();
  es.se_degree1 = deg1.se();
  es.mean_leaf_hist.resize(maxlen);
  es.se_leaf_hist.resize(maxlen);
  for (size_t d = 0; d < maxlen; ++d) {
    es.mean_leaf_hist[d] = hist[d].mean();
    es.se_leaf_hist[d] = hist[d].se();
  }
  return es;
}

}  // namespace hpt
