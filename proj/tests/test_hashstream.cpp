#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hashstream.hpp"

using namespace hpt;

namespace {

// independent restatement of the stream word for cross-checking
uint64_t ref_mix(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace

TEST_CASE("fnv1a 64 vectors") {
  CHECK(digest_bytes("", 0) == 0xcbf29ce484222325ull);
  CHECK(digest_bytes(std::string("a")) == 0xaf63dc4c8601ec8cull);
  CHECK(digest_bytes(std::string("foobar")) == 0x85944171f73967e8ull);
  const char buf[3] = {'\0', 'a', '\0'};
  CHECK(digest_bytes(buf, 3) != digest_bytes("a", 1));  // embedded NULs count
}

TEST_CASE("stream words follow the keyed splitmix sequence") {
  // key 0, digest 0: blocks walk the splitmix64 outputs for seed 0
  CHECK(stream_word(0, 0, 1) == 0xE220A8397B1DCDAFull);
  CHECK(stream_word(0, 0, 2) == 0x6E789E6AA1B965F4ull);
  CHECK(stream_word(0, 0, 3) == 0x06C45D188009454Full);

  SplitMix rng{0x1234};
  for (int i = 0; i < 200; ++i) {
    uint64_t key = rng.next(), digest = rng.next(), block = rng.next() % 1000;
    CHECK(stream_word(key, digest, block) ==
          ref_mix((key ^ digest) + block * 0x9E3779B97F4A7C15ull));
  }
}

TEST_CASE("bits are MSB-first within words") {
  SplitMix rng{0x77};
  for (int i = 0; i < 100; ++i) {
    uint64_t key = rng.next(), digest = rng.next();
    uint64_t index = rng.next() % 500;
    uint64_t w = stream_word(key, digest, index >> 6);
    CHECK(stream_bit(key, digest, index) == int((w >> (63 - (index & 63))) & 1));
  }
}

TEST_CASE("stream bits are balanced") {
  SplitMix rng{0xbeef};
  int ones = 0;
  const int kBits = 100000;
  for (int i = 0; i < kBits; ++i) ones += stream_bit(1, rng.next(), i % 128);
  // 4 sigma band for fair coins
  CHECK(std::abs(ones - kBits / 2) < 4 * std::sqrt(kBits / 4.0));
}

TEST_CASE("golden stream vectors") {
  std::ifstream in(std::string(HPT_TEST_DATA_DIR) + "/stream_vectors.txt");
  REQUIRE(in.good());
  std::string key_s, digest_s;
  uint64_t index;
  int bit, rows = 0;
  while (in >> key_s >> digest_s >> index >> bit) {
    uint64_t key = std::strtoull(key_s.c_str(), nullptr, 16);
    uint64_t digest = std::strtoull(digest_s.c_str(), nullptr, 16);
    CHECK(stream_bit(key, digest, index) == bit);
    ++rows;
  }
  CHECK(rows == 64);
}

TEST_CASE("ingest lines") {
  std::istringstream in("alpha\nbeta\n\nalpha\n");
  Corpus c = ingest(in, CorpusFormat::Lines);
  REQUIRE(c.records.size() == 4);
  CHECK(c.records[2] == "");
  CHECK(c.digests[0] == digest_bytes(std::string("alpha")));
  CHECK(c.digests[2] == digest_bytes("", 0));
  CHECK(c.digests[0] == c.digests[3]);
  CHECK(c.duplicates == 1);
}

TEST_CASE("ingest raw u64 little-endian") {
  std::string bytes("\x01\x00\x00\x00\x00\x00\x00\x00"
                    "\xff\xee\xdd\xcc\xbb\xaa\x99\x88",
                    16);
  std::istringstream in(bytes);
  Corpus c = ingest(in, CorpusFormat::RawU64);
  REQUIRE(c.digests.size() == 2);
  CHECK(c.digests[0] == 1);
  CHECK(c.digests[1] == 0x8899aabbccddeeffull);
  CHECK(c.duplicates == 0);
  CHECK(c.records[1].size() == 8);
}

TEST_CASE("ingest raw u64 rejects partial records") {
  std::istringstream in(std::string(9, 'x'));
  CHECK_THROWS_AS(ingest(in, CorpusFormat::RawU64), Error);
  std::istringstream in2(std::string(9, 'x'));
  try {
    ingest(in2, CorpusFormat::RawU64);
  } catch (const Error& e) {
    CHECK(e.code() == Err::Format);
  }
}

TEST_CASE("ingest missing file") {
  CHECK_THROWS_AS(ingest_file("/nonexistent/corpus.txt", CorpusFormat::Lines), Error);
}
