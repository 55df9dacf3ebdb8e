#include "hashstream.hpp"

#include <cstring>
#include <fstream>
#include <iostream>
#include <istream>
#include <unordered_set>

namespace hpt {

uint64_t digest_bytes(const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ull;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x00000100000001b3ull;
  }
  return h;
}

namespace {

void note_digest(Corpus& c, uint64_t digest, std::unordered_set<uint64_t>& seen) {
  if (!seen.insert(digest).second) ++c.duplicates;
  c.digests.push_back(digest);
}

}  // namespace

Corpus ingest(std::istream& in, CorpusFormat fmt) {
  Corpus c;
  std::unordered_set<uint64_t> seen;
  if (fmt == CorpusFormat::Lines) {
    std::string line;
    while (std::getline(in, line)) {
      note_digest(c, digest_bytes(line), seen);
      c.records.push_back(line);
    }
    if (in.bad()) fail(Err::Io, "read error");
    return c;
  }
  char buf[8];
  for (;;) {
    in.read(buf, 8);
    auto got = in.gcount();
    if (got == 0) break;
    if (got != 8) fail(Err::Format, "raw-u64 input not a multiple of 8 bytes");
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | uint8_t(buf[i]);
    note_digest(c, v, seen);
    c.records.emplace_back(buf, 8);
    if (in.eof()) break;
  }
  if (in.bad()) fail(Err::Io, "read error");
  return c;
}

Corpus ingest_file(const std::string& path, CorpusFormat fmt) {
  if (path == "-") return ingest(std::cin, fmt);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::Io, "cannot open '" + path + "'");
  return ingest(in, fmt);
}

}  // namespace hpt
