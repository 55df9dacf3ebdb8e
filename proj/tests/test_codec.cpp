#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <numeric>

#include "analytic.hpp"
#include "codec.hpp"
#include "doctest.h"
#include "rangecoder.hpp"

using namespace hpt;

namespace {

PrefixTree sample_tree(uint64_t n, uint64_t seed, TreeKind kind = TreeKind::Minimal,
                       uint32_t d = 0) {
  return PrefixTree::build(random_digests(n, seed), 0, kind, d);
}

}  // namespace

TEST_CASE("leb128 round trip") {
  for (uint64_t v : {0ull, 1ull, 127ull, 128ull, 300ull, 16383ull, 16384ull, 1ull << 32,
                     ~0ull}) {
    std::vector<uint8_t> buf;
    put_uleb(buf, v);
    size_t pos = 0;
    CHECK(get_uleb(buf.data(), buf.size(), pos) == v);
    CHECK(pos == buf.size());
  }
  // truncated and overlong forms are rejected
  std::vector<uint8_t> trunc = {0x80};
  size_t pos = 0;
  CHECK_THROWS_AS(get_uleb(trunc.data(), trunc.size(), pos), Error);
  std::vector<uint8_t> overlong(10, 0x80);
  overlong.push_back(0x02);  // bit 65
  pos = 0;
  CHECK_THROWS_AS(get_uleb(overlong.data(), overlong.size(), pos), Error);
}

TEST_CASE("range coder round trips random decisions") {
  SplitMix rng{4242};
  std::vector<int> bits;
  std::vector<uint32_t> probs;
  for (int i = 0; i < 5000; ++i) {
    uint32_t p0 = 1 + rng.next() % 65534;
    probs.push_back(p0);
    bits.push_back(int(rng.next() % 2));
  }
  std::vector<uint8_t> buf;
  RangeEncoder enc(buf);
  for (size_t i = 0; i < bits.size(); ++i) enc.encode(bits[i], probs[i], 16);
  enc.finish();
  CHECK(enc.decisions() == bits.size());
  CHECK(double(buf.size() * 8) >= enc.cost_bits());

  RangeDecoder dec(buf.data(), buf.size());
  for (size_t i = 0; i < bits.size(); ++i) CHECK(dec.decode(probs[i], 16) == bits[i]);
  CHECK(dec.consumed() == buf.size());
}

TEST_CASE("range coder with no decisions writes nothing") {
  std::vector<uint8_t> buf;
  RangeEncoder enc(buf);
  enc.finish();
  CHECK(buf.empty());
}

TEST_CASE("range coder detects truncation") {
  std::vector<uint8_t> buf;
  RangeEncoder enc(buf);
  SplitMix rng{7};
  for (int i = 0; i < 200; ++i) enc.encode(int(rng.next() % 2), 32768, 16);
  enc.finish();
  RangeDecoder dec(buf.data(), buf.size() - 1);
  CHECK_THROWS_AS(
      [&] {
        for (int i = 0; i < 200; ++i) dec.decode(32768, 16);
      }(),
      Error);
}

TEST_CASE("quantized split weights") {
  CHECK(quantize_split(2, TreeKind::Minimal, 16) ==
        std::vector<uint32_t>{16384, 32768, 16384});
  CHECK(quantize_split(2, TreeKind::Reduced, 16) == std::vector<uint32_t>{32768, 32768});

  auto w5 = quantize_split(5, TreeKind::Minimal, 16);
  std::vector<uint32_t> exact5 = {2048, 10240, 20480, 20480, 10240, 2048};  // C(5,k)*2^11
  REQUIRE(w5.size() == 6);
  for (size_t k = 0; k < 6; ++k) CHECK(std::abs(int(w5[k]) - int(exact5[k])) <= 1);

  for (uint64_t n : {3ull, 17ull, 100ull, 1000ull}) {
    for (TreeKind kind : {TreeKind::Minimal, TreeKind::Reduced}) {
      auto w = quantize_split(n, kind, 16);
      CHECK(w.size() == (kind == TreeKind::Reduced ? n : n + 1));
      uint64_t sum = std::accumulate(w.begin(), w.end(), uint64_t(0));
      CHECK(sum == uint64_t(1) << 16);
      CHECK(*std::min_element(w.begin(), w.end()) >= 1);
    }
  }
  // MinDepth nodes split exactly like Minimal ones
  CHECK(quantize_split(9, TreeKind::MinDepth, 12) == quantize_split(9, TreeKind::Minimal, 12));

  CHECK_THROWS_AS(quantize_split(1, TreeKind::Minimal, 16), Error);
  CHECK_THROWS_AS(quantize_split(100000, TreeKind::Minimal, 16), Error);  // > 2^16 symbols
  CHECK_THROWS_AS(quantize_split(4, TreeKind::Minimal, 7), Error);
  CHECK_THROWS_AS(quantize_split(4, TreeKind::Minimal, 31), Error);
}

TEST_CASE("encode/decode round trip across kinds and sizes") {
  int trees = 0;
  for (TreeKind kind : {TreeKind::Minimal, TreeKind::MinDepth, TreeKind::Reduced}) {
    for (uint64_t n : {2ull, 3ull, 7ull, 31ull, 200ull}) {
      uint32_t d = kind == TreeKind::MinDepth ? 14 : 0;
      for (uint64_t seed = 0; seed < 25; ++seed) {
        PrefixTree t = sample_tree(n, seed * 1000 + n, kind, d);
        auto blob = encode_tree(t);
        PrefixTree back = decode_tree(blob.data(), blob.size());
        REQUIRE(structural_equal(t, back));
        CHECK(back.kind() == kind);
        CHECK(back.size() == n);
        CHECK(back.min_depth() == d);
        ++trees;
      }
    }
  }
  CHECK(trees == 375);
}

TEST_CASE("header layout and peek") {
  PrefixTree t = sample_tree(300, 1, TreeKind::MinDepth, 18);
  auto blob = encode_tree(t, 20);
  Header h = peek_header(blob.data(), blob.size());
  CHECK(h.kind == TreeKind::MinDepth);
  CHECK(h.scale_bits == 20);
  CHECK(h.n == 300);
  CHECK(h.min_depth == 18);
  // magic + version + kind + scale + uleb(300) + uleb(18)
  CHECK(h.header_size == 4 + 1 + 1 + 1 + 2 + 1);
  CHECK(std::memcmp(blob.data(), "HPT1", 4) == 0);
}

TEST_CASE("encoding is deterministic and canonical") {
  PrefixTree t = sample_tree(150, 9);
  auto a = encode_tree(t);
  auto b = encode_tree(t);
  CHECK(a == b);
  PrefixTree back = decode_tree(a.data(), a.size());
  CHECK(encode_tree(back) == a);
}

TEST_CASE("corrupt containers are rejected") {
  PrefixTree t = sample_tree(50, 33);
  auto blob = encode_tree(t);

  auto expect_code = [](const std::vector<uint8_t>& data, Err want) {
    try {
      decode_tree(data.data(), data.size());
      return false;
    } catch (const Error& e) {
      return e.code() == want;
    }
  };

  auto bad = blob;
  bad[0] = 'X';
  CHECK(expect_code(bad, Err::Format));
  bad = blob;
  bad[4] = 9;  // unknown version
  CHECK(expect_code(bad, Err::Format));
  bad = blob;
  bad[5] = 3;  // unknown kind
  CHECK(expect_code(bad, Err::Format));
  bad = blob;
  bad[6] = 40;  // scale_bits out of range
  CHECK(expect_code(bad, Err::Format));
  bad = blob;
  bad.push_back(0);  // trailing byte
  CHECK(expect_code(bad, Err::Format));

  // every proper prefix either truncates or malforms, never succeeds
  for (size_t len = 0; len < blob.size(); ++len) {
    bool threw = false;
    try {
      decode_tree(blob.data(), len);
    } catch (const Error& e) {
      threw = e.code() == Err::Truncated || e.code() == Err::Format;
    }
    CHECK(threw);
  }
}

TEST_CASE("decoded min-depth trees keep their floor") {
  PrefixTree t = sample_tree(64, 12, TreeKind::MinDepth, 22);
  auto blob = encode_tree(t);
  PrefixTree back = decode_tree(blob.data(), blob.size());
  TreeStats s = back.stats();
  for (uint32_t d = 0; d < 22 && d < s.leaf_depth_hist.size(); ++d)
    CHECK(s.leaf_depth_hist[d] == 0);
  CHECK(s.leaves == 64);
}

TEST_CASE("payload stays close to the information content") {
  RateStats r = measure_rate(500, TreeKind::Minimal, 0, 60, 16, 0, 77);
  Evaluator ev;
  double entropy = ev.tree_entropy(500);
  CHECK(r.trials == 60);
  CHECK(r.mean_content_bits > entropy - 1.0);          // no cheating below entropy
  CHECK(r.mean_content_bits < entropy * 1.01);         // quantisation loss stays small
  CHECK(r.mean_payload_bits < r.mean_content_bits + 40);
  CHECK(r.mean_payload_bits >= r.mean_content_bits);
  CHECK(r.mean_total_bits > r.mean_payload_bits);
}

TEST_CASE("deep floors approach the plain-storage identity") {
  // for d well above lg n, H^d_n ~ d n - lg n!
  const uint64_t n = 1000;
  const uint32_t d = 50;
  double plain = double(d) * double(n) - log_factorial(n);
  double entropy = min_depth_entropy_closed(n, d);
  CHECK(std::abs(entropy - plain) / plain < 1e-3);
  RateStats r = measure_rate(n, TreeKind::MinDepth, d, 30, 16, 0, 3);
  CHECK(std::abs(r.mean_content_bits - plain) / plain < 1e-3);
}

TEST_CASE("wide splits code single decisions exactly") {
  // one split of n = 50000 elements: the k coder walks ~ lg n windows
  PrefixTree t = sample_tree(50000, 4);
  auto blob = encode_tree(t);
  PrefixTree back = decode_tree(blob.data(), blob.size());
  CHECK(structural_equal(t, back));
  double content;
  auto blob2 = encode_tree(t, 16, &content);
  CHECK(blob2 == blob);
  CHECK(content > 0);
}

TEST_CASE("scale bits bound") {
  PrefixTree t = sample_tree(10, 2);
  CHECK_THROWS_AS(encode_tree(t, 7), Error);
  CHECK_THROWS_AS(encode_tree(t, 31), Error);
  for (uint32_t scale : {8u, 12u, 24u, 30u}) {
    auto blob = encode_tree(t, scale);
    PrefixTree back = decode_tree(blob.data(), blob.size());
    CHECK(structural_equal(t, back));
  }
}
