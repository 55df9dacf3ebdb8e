#include "codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rangecoder.hpp"

namespace hpt {

namespace {

constexpr uint8_t kMagic[4] = {0x48, 0x50, 0x54, 0x31};  // "HPT1"
constexpr uint8_t kVersion = 1;
constexpr uint32_t kMaxMinDepth = 1u << 20;
struct LgFact {
  std::vector<double> lgf;  // lgf[i] = lg(i!)
  explicit LgFact(uint64_t n) : lgf(n + 1, 0.0) {
    for (uint64_t i = 2; i <= n; ++i) lgf[i] = lgf[i - 1] + std::log2(double(i));
  }
  double lg_choose(uint64_t n, uint64_t k) const { return lgf[n] - lgf[k] - lgf[n - k]; }
};

struct Ctx {
  TreeKind kind;
  uint32_t min_depth;
  uint32_t scale_bits;
  const LgFact& lf;
  uint32_t half() const { return 1u << (scale_bits - 1); }
};

// sum of C(m,k) over [lo,hi], scaled by 2^-lgmax
double window_sum(const LgFact& lf, uint64_t m, uint64_t lo, uint64_t hi, double lgmax) {
  double s = 0.0;
  for (uint64_t k = lo; k <= hi; ++k) s += std::exp2(lf.lg_choose(m, k) - lgmax);
  return s;
}

// quantised probability that a binomial split of m lands in [lo,mid] given [lo,hi]
uint32_t bisect_p0(const Ctx& ctx, uint64_t m, uint64_t lo, uint64_t mid, uint64_t hi) {
  uint64_t peak = std::clamp(m / 2, lo, hi);
  double lgmax = ctx.lf.lg_choose(m, peak);
  double left = window_sum(ctx.lf, m, lo, mid, lgmax);
  double right = window_sum(ctx.lf, m, mid + 1, hi, lgmax);
  double one = std::ldexp(1.0, int(ctx.scale_bits));
  uint32_t q = uint32_t(std::nearbyint(left / (left + right) * one));
  q = std::clamp<uint32_t>(q, 1, uint32_t(one) - 1);
  return q;
}

uint32_t degree1_p0(const Ctx& ctx, uint64_t m) {
  // probability that a node of m elements splits (is not all-same-direction)
  double pw = m > 64 ? 0.0 : std::ldexp(1.0, 1 - int(m));
  double one = std::ldexp(1.0, int(ctx.scale_bits));
  uint32_t q = uint32_t(std::nearbyint((1.0 - pw) * one));
  q = std::clamp<uint32_t>(q, 1, uint32_t(one) - 1);
  return q;
}

void encode_k(RangeEncoder& rc, const Ctx& ctx, uint64_t m, uint64_t k, uint64_t lo, uint64_t hi) {
  while (lo < hi) {
    uint64_t mid = lo + (hi - lo) / 2;
    uint32_t p0 = bisect_p0(ctx, m, lo, mid, hi);
    int bit = k > mid ? 1 : 0;
    rc.encode(bit, p0, ctx.scale_bits);
    if (bit) lo = mid + 1;
    else hi = mid;
  }
}

uint64_t decode_k(RangeDecoder& rc, const Ctx& ctx, uint64_t m, uint64_t lo, uint64_t hi) {
  while (lo < hi) {
    uint64_t mid = lo + (hi - lo) / 2;
    uint32_t p0 = bisect_p0(ctx, m, lo, mid, hi);
    if (rc.decode(p0, ctx.scale_bits)) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

void encode_node(RangeEncoder& rc, const Ctx& ctx, const Node* node, uint32_t depth) {
  uint64_t m = node->count;
  if (m == 1) {
    // min-depth extension: emit the real stream bits along the chain
    const Node* p = node;
    while (const Node* c = p->only_child()) {
      rc.encode(p->child[1].get() == c ? 1 : 0, ctx.half(), ctx.scale_bits);
      p = c;
    }
    return;
  }
  if (ctx.kind == TreeKind::Reduced) {
    int wild = node->wildcard ? 1 : 0;
    rc.encode(wild, degree1_p0(ctx, m), ctx.scale_bits);
    if (wild) {
      encode_node(rc, ctx, node->only_child(), depth + 1);
      return;
    }
    uint64_t k = node->child[0]->count;
    encode_k(rc, ctx, m, k, 1, m - 1);
    encode_node(rc, ctx, node->child[0].get(), depth + 1);
    encode_node(rc, ctx, node->child[1].get(), depth + 1);
    return;
  }
  uint64_t k = node->child[0] ? node->child[0]->count : 0;
  encode_k(rc, ctx, m, k, 0, m);
  if (k > 0) encode_node(rc, ctx, node->child[0].get(), depth + 1);
  if (k < m) encode_node(rc, ctx, node->child[1].get(), depth + 1);
}

std::unique_ptr<Node> decode_node(RangeDecoder& rc, const Ctx& ctx, uint64_t m, uint32_t depth) {
  if (depth > kMaxSplitDepth) fail(Err::Format, "split structure deeper than supported");
  auto node = std::make_unique<Node>();
  node->count = m;
  if (m == 1) {
    Node* tip = node.get();
    for (uint32_t t = depth; t < ctx.min_depth; ++t) {
      int b = rc.decode(ctx.half(), ctx.scale_bits);
      tip->child[b] = std::make_unique<Node>();
      tip->child[b]->count = 1;
      tip = tip->child[b].get();
    }
    return node;
  }
  if (ctx.kind == TreeKind::Reduced) {
    if (rc.decode(degree1_p0(ctx, m), ctx.scale_bits)) {
      node->wildcard = true;
      node->child[0] = decode_node(rc, ctx, m, depth + 1);  // canonical slot
      return node;
    }
    uint64_t k = decode_k(rc, ctx, m, 1, m - 1);
    node->child[0] = decode_node(rc, ctx, k, depth + 1);
    node->child[1] = decode_node(rc, ctx, m - k, depth + 1);
    return node;
  }
  uint64_t k = decode_k(rc, ctx, m, 0, m);
  if (k > 0) node->child[0] = decode_node(rc, ctx, k, depth + 1);
  if (k < m) node->child[1] = decode_node(rc, ctx, m - k, depth + 1);
  return node;
}

}  // namespace

void put_uleb(std::vector<uint8_t>& out, uint64_t v) {
  while (v >= 0x80) {
    out.push_back(uint8_t(v) | 0x80);
    v >>= 7;
  }
  out.push_back(uint8_t(v));
}

uint64_t get_uleb(const uint8_t* data, size_t size, size_t& pos) {
  uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (pos >= size) fail(Err::Truncated, "varint ends early");
    uint8_t b = data[pos++];
    if (shift == 63 && (b & 0x7E)) fail(Err::Format, "varint overflows 64 bits");
    v |= uint64_t(b & 0x7F) << shift;
    if (!(b & 0x80)) return v;
  }
  fail(Err::Format, "varint too long");
}

std::vector<uint32_t> quantize_split(uint64_t n, TreeKind kind, uint32_t scale_bits) {
  if (n < 2 || n > kMaxCodecN) fail(Err::Domain, "split needs 2 <= n <= codec limit");
  if (scale_bits < kMinScaleBits || scale_bits > kMaxScaleBits)
    fail(Err::Domain, "scale_bits out of range");
  uint64_t one = 1ull << scale_bits;

  LgFact lf(n);
  std::vector<double> x;
  if (kind == TreeKind::Reduced) {
    x.resize(n);
    x[0] = n > 1100 ? 0.0 : std::ldexp(1.0, int(scale_bits) + 1 - int(n));
    for (uint64_t k = 1; k <= n - 1; ++k)
      x[k] = std::exp2(lf.lg_choose(n, k) - double(n) + double(scale_bits));
  } else {
    x.resize(n + 1);
    for (uint64_t k = 0; k <= n; ++k)
      x[k] = std::exp2(lf.lg_choose(n, k) - double(n) + double(scale_bits));
  }
  if (one < x.size()) fail(Err::Domain, "scale too small to give every symbol weight >= 1");

  std::vector<uint32_t> w(x.size());
  int64_t diff = int64_t(one);
  for (size_t k = 0; k < x.size(); ++k) {
    w[k] = uint32_t(std::max(1.0, std::floor(x[k])));
    diff -= w[k];
  }
  std::vector<uint64_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](uint64_t a, uint64_t b) {
    return x[a] - std::floor(x[a]) > x[b] - std::floor(x[b]);
  });
  for (size_t i = 0; diff > 0; i = (i + 1) % order.size()) {
    ++w[order[i]];
    --diff;
  }
  while (diff < 0) {
    for (auto it = order.rbegin(); it != order.rend() && diff < 0; ++it) {
      if (w[*it] > 1) {
        --w[*it];
        ++diff;
      }
    }
  }
  return w;
}

std::vector<uint8_t> encode_tree(const PrefixTree& tree, uint32_t scale_bits,
                                 double* content_bits) {
  if (scale_bits < kMinScaleBits || scale_bits > kMaxScaleBits)
    fail(Err::Domain, "scale_bits out of range");
  if (tree.size() > kMaxCodecN) fail(Err::Capacity, "tree too large for the codec");

  std::vector<uint8_t> out(kMagic, kMagic + 4);
  out.push_back(kVersion);
  out.push_back(uint8_t(tree.kind()));
  out.push_back(uint8_t(scale_bits));
  put_uleb(out, tree.size());
  if (tree.kind() == TreeKind::MinDepth) put_uleb(out, tree.min_depth());

  LgFact lf(tree.size());
  Ctx ctx{tree.kind(), tree.min_depth(), scale_bits, lf};
  RangeEncoder rc(out);
  encode_node(rc, ctx, tree.root(), 0);
  rc.finish();
  if (content_bits) *content_bits = rc.cost_bits();
  return out;
}

Header peek_header(const uint8_t* data, size_t size) {
  Header h;
  size_t pos = 0;
  if (size < 7) fail(Err::Truncated, "container shorter than its fixed header");
  if (!std::equal(kMagic, kMagic + 4, data)) fail(Err::Format, "bad magic");
  pos = 4;
  if (data[pos++] != kVersion) fail(Err::Format, "unsupported version");
  uint8_t kind = data[pos++];
  if (kind > 2) fail(Err::Format, "unknown tree kind");
  h.kind = TreeKind(kind);
  h.scale_bits = data[pos++];
  if (h.scale_bits < kMinScaleBits || h.scale_bits > kMaxScaleBits)
    fail(Err::Format, "scale_bits out of range");
  h.n = get_uleb(data, size, pos);
  if (h.n == 0) fail(Err::Format, "empty tree is not representable");
  if (h.n > kMaxCodecN) fail(Err::Capacity, "element count beyond codec limit");
  if (h.kind == TreeKind::MinDepth) {
    uint64_t d = get_uleb(data, size, pos);
    if (d == 0 || d > kMaxMinDepth) fail(Err::Format, "min depth out of range");
    h.min_depth = uint32_t(d);
  }
  h.header_size = pos;
  return h;
}

PrefixTree decode_tree(const uint8_t* data, size_t size) {
  Header h = peek_header(data, size);
  const uint8_t* pay = data + h.header_size;
  size_t paysize = size - h.header_size;

  LgFact lf(h.n);
  Ctx ctx{h.kind, h.min_depth, h.scale_bits, lf};
  RangeDecoder rc(pay, paysize);
  auto root = decode_node(rc, ctx, h.n, 0);
  if (rc.consumed() != paysize) fail(Err::Format, "payload has trailing bytes");
  return PrefixTree::adopt(std::move(root), h.kind, h.n, h.min_depth);
}

RateStats measure_rate(uint64_t n, TreeKind kind, uint32_t min_depth, uint32_t trials,
                       uint32_t scale_bits, uint64_t key, uint64_t seed) {
  if (trials == 0) fail(Err::Domain, "trials >= 1 required");
  std::vector<double> pay(trials), cont(trials), tot(trials);
  for_each_trial(trials, [&](uint32_t t) {
    auto tree = PrefixTree::build(random_digests(n, trial_seed(seed, t)), key, kind, min_depth);
    auto blob = encode_tree(tree, scale_bits, &cont[t]);
    Header h = peek_header(blob.data(), blob.size());
    pay[t] = 8.0 * double(blob.size() - h.header_size);
    tot[t] = 8.0 * double(blob.size());
  });
  Moments mp, mc, mt;
  for (uint32_t t = 0; t < trials; ++t) {
    mp.add(pay[t]);
    mc.add(cont[t]);
    mt.add(tot[t]);
  }
  return {mp.mean(), mp.se(), mc.mean(), mt.mean(), trials};
}

}  // namespace hpt
