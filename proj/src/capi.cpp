#if defined(_WIN32)
#define HPT_API __declspec(dllexport)
#else
#define HPT_API __attribute__((visibility("default")))
#endif

#include "hpt/hpt.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "analytic.hpp"
#include "bloom.hpp"
#include "codec.hpp"
#include "common.hpp"
#include "hashstream.hpp"
#include "trie.hpp"

struct hpt_eval {
  hpt::Evaluator impl;
  explicit hpt_eval(hpt::EvalConfig cfg) : impl(cfg) {}
};
struct hpt_tree {
  hpt::PrefixTree impl;
  explicit hpt_tree(hpt::PrefixTree t) : impl(std::move(t)) {}
};
struct hpt_corpus {
  hpt::Corpus impl;
  explicit hpt_corpus(hpt::Corpus c) : impl(std::move(c)) {}
};
struct hpt_bloom {
  hpt::BloomFilter impl;
  hpt_bloom(uint64_t m, uint32_t k, uint64_t key) : impl(m, k, key) {}
};

namespace {

thread_local std::string g_last_error;

hpt_status map_err(hpt::Err e) {
  switch (e) {
    case hpt::Err::Domain: return HPT_ERR_DOMAIN;
    case hpt::Err::Capacity: return HPT_ERR_CAPACITY;
    case hpt::Err::Duplicate: return HPT_ERR_DUPLICATE;
    case hpt::Err::Empty: return HPT_ERR_EMPTY;
    case hpt::Err::Format: return HPT_ERR_FORMAT;
    case hpt::Err::Truncated: return HPT_ERR_TRUNCATED;
    case hpt::Err::Io: return HPT_ERR_IO;
  }
  return HPT_ERR_INTERNAL;
}

template <class F>
hpt_status wrap(F&& f) noexcept {
  try {
    f();
    return HPT_OK;
  } catch (const hpt::Error& e) {
    g_last_error = e.what();
    return map_err(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HPT_ERR_CAPACITY;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HPT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HPT_ERR_INTERNAL;
  }
}

hpt_status bad_arg(const char* msg) {
  g_last_error = msg;
  return HPT_ERR_ARGUMENT;
}

bool valid_kind(int kind) { return kind >= 0 && kind <= 2; }

}  // namespace

extern "C" {

const char* hpt_version(void) { return "1.0.0"; }

const char* hpt_last_error(void) { return g_last_error.c_str(); }

const char* hpt_status_name(hpt_status s) {
  switch (s) {
    case HPT_OK: return "ok";
    case HPT_ERR_DOMAIN: return "domain";
    case HPT_ERR_CAPACITY: return "capacity";
    case HPT_ERR_DUPLICATE: return "duplicate";
    case HPT_ERR_EMPTY: return "empty";
    case HPT_ERR_FORMAT: return "format";
    case HPT_ERR_TRUNCATED: return "truncated";
    case HPT_ERR_IO: return "io";
    case HPT_ERR_ARGUMENT: return "argument";
    case HPT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

/* ---- closed forms ---- */

#define HPT_SCALAR1(NAME, CALL)                            \
  hpt_status NAME(uint64_t n, double* out) {               \
    if (!out) return bad_arg("null out");                  \
    return wrap([&] { *out = CALL; });                     \
  }

HPT_SCALAR1(hpt_log_factorial, hpt::log_factorial(n))
HPT_SCALAR1(hpt_split_entropy, hpt::split_entropy(n))
HPT_SCALAR1(hpt_reduced_split_entropy, hpt::reduced_split_entropy(n))
HPT_SCALAR1(hpt_approx_split_entropy, hpt::approx_split_entropy(n))
HPT_SCALAR1(hpt_tree_entropy_closed, hpt::tree_entropy_closed(n))
HPT_SCALAR1(hpt_approx_tree_entropy, hpt::approx_tree_entropy(n))
HPT_SCALAR1(hpt_tree_entropy_smooth, hpt::tree_entropy_smooth(n))
HPT_SCALAR1(hpt_avg_depth_sum, hpt::avg_depth_sum(n))
HPT_SCALAR1(hpt_avg_depth_smooth, hpt::avg_depth_smooth(n))
HPT_SCALAR1(hpt_degree1_count, hpt::degree1_count(n))
HPT_SCALAR1(hpt_degree1_bits, hpt::degree1_bits(n))
HPT_SCALAR1(hpt_reduced_entropy_closed, hpt::reduced_entropy_closed(n))

#undef HPT_SCALAR1

hpt_status hpt_log_binomial(uint64_t n, uint64_t k, double* out) {
  if (!out) return bad_arg("null out");
  return wrap([&] { *out = hpt::log_binomial(n, k); });
}

hpt_status hpt_approx_avg_depth(uint64_t n, int terms, double* out) {
  if (!out) return bad_arg("null out");
  return wrap([&] { *out = hpt::approx_avg_depth(n, terms); });
}

hpt_status hpt_leaf_depth_pmf(uint64_t n, uint32_t d, double* out) {
  if (!out) return bad_arg("null out");
  return wrap([&] { *out = hpt::leaf_depth_pmf(n, d); });
}

hpt_status hpt_expected_leaves(uint64_t n, uint32_t d, double* out) {
  if (!out) return bad_arg("null out");
  return wrap([&] { *out = hpt::expected_leaves(n, d); });
}

hpt_status hpt_min_depth_entropy_closed(uint64_t n, uint32_t d, double* out) {
  if (!out) return bad_arg("null out");
  return wrap([&] { *out = hpt::min_depth_entropy_closed(n, d); });
}

hpt_status hpt_false_positive(uint64_t n, uint32_t d_min, double* out) {
  if (!out) return bad_arg("null out");
  return wrap([&] { *out = hpt::false_positive(n, d_min); });
}

hpt_status hpt_internal_nodes_at_depth(uint64_t n, uint32_t d, double* out) {
  if (!out) return bad_arg("null out");
  return wrap([&] { *out = hpt::internal_nodes_at_depth(n, d); });
}

hpt_status hpt_m_node_count(uint64_t n, uint64_t m, double* out) {
  if (!out) return bad_arg("null out");
  return wrap([&] { *out = hpt::m_node_count(n, m); });
}

double hpt_depth_offset_const(void) { return hpt::kDepthOffset; }
double hpt_fp_limit_const(void) { return hpt::kFpLimit; }

/* ---- evaluator ---- */

hpt_status hpt_eval_create(uint32_t n_max_exact, hpt_eval** out) {
  if (!out) return bad_arg("null out");
  return wrap([&] {
    hpt::EvalConfig cfg;
    if (n_max_exact) cfg.n_max_exact = n_max_exact;
    *out = new hpt_eval(cfg);
  });
}

void hpt_eval_destroy(hpt_eval* e) { delete e; }

hpt_status hpt_eval_n_max(const hpt_eval* e, uint32_t* out) {
  if (!e || !out) return bad_arg("null handle or out");
  *out = e->impl.config().n_max_exact;
  return HPT_OK;
}

#define HPT_EVAL1(NAME, METHOD)                                  \
  hpt_status NAME(hpt_eval* e, uint32_t n, double* out) {        \
    if (!e || !out) return bad_arg("null handle or out");        \
    return wrap([&] { *out = e->impl.METHOD(n); });              \
  }

HPT_EVAL1(hpt_eval_split_entropy, split_entropy)
HPT_EVAL1(hpt_eval_tree_entropy, tree_entropy)
HPT_EVAL1(hpt_eval_reduced_entropy, reduced_entropy)
HPT_EVAL1(hpt_eval_avg_depth, avg_depth)

#undef HPT_EVAL1

hpt_status hpt_eval_min_depth_entropy(hpt_eval* e, uint32_t n, uint32_t d, double* out) {
  if (!e || !out) return bad_arg("null handle or out");
  return wrap([&] { *out = e->impl.min_depth_entropy(n, d); });
}

/* ---- streams and corpora ---- */

hpt_status hpt_digest(const void* data, size_t len, uint64_t* out) {
  if (!out || (!data && len)) return bad_arg("null data or out");
  *out = hpt::digest_bytes(data, len);
  return HPT_OK;
}

hpt_status hpt_stream_word(uint64_t key, uint64_t digest, uint64_t block, uint64_t* out) {
  if (!out) return bad_arg("null out");
  *out = hpt::stream_word(key, digest, block);
  return HPT_OK;
}

hpt_status hpt_stream_bit(uint64_t key, uint64_t digest, uint64_t index, int* out) {
  if (!out) return bad_arg("null out");
  *out = hpt::stream_bit(key, digest, index);
  return HPT_OK;
}

hpt_status hpt_corpus_open(const char* path, int format, hpt_corpus** out) {
  if (!path || !out) return bad_arg("null path or out");
  if (format < 0 || format > 1) return bad_arg("bad corpus format");
  return wrap([&] {
    auto fmt = format == 0 ? hpt::CorpusFormat::Lines : hpt::CorpusFormat::RawU64;
    *out = new hpt_corpus(hpt::ingest_file(path, fmt));
  });
}

void hpt_corpus_destroy(hpt_corpus* c) { delete c; }

hpt_status hpt_corpus_size(const hpt_corpus* c, uint64_t* out) {
  if (!c || !out) return bad_arg("null handle or out");
  *out = c->impl.digests.size();
  return HPT_OK;
}

hpt_status hpt_corpus_duplicates(const hpt_corpus* c, uint64_t* out) {
  if (!c || !out) return bad_arg("null handle or out");
  *out = c->impl.duplicates;
  return HPT_OK;
}

hpt_status hpt_corpus_digests(const hpt_corpus* c, const uint64_t** data, uint64_t* count) {
  if (!c || !data || !count) return bad_arg("null handle or out");
  *data = c->impl.digests.data();
  *count = c->impl.digests.size();
  return HPT_OK;
}

hpt_status hpt_corpus_record_at(const hpt_corpus* c, uint64_t i, const char** data, size_t* len) {
  if (!c || !data || !len) return bad_arg("null handle or out");
  if (i >= c->impl.records.size()) return bad_arg("record index out of range");
  *data = c->impl.records[i].data();
  *len = c->impl.records[i].size();
  return HPT_OK;
}

/* ---- trees ---- */

hpt_status hpt_tree_build(const uint64_t* digests, uint64_t n, uint64_t key, int kind,
                          uint32_t min_depth, hpt_tree** out) {
  if (!out || (!digests && n)) return bad_arg("null digests or out");
  if (!valid_kind(kind)) return bad_arg("bad tree kind");
  return wrap([&] {
    std::vector<uint64_t> v;
    if (n) v.assign(digests, digests + n);
    *out = new hpt_tree(hpt::PrefixTree::build(std::move(v), key, hpt::TreeKind(kind), min_depth));
  });
}

void hpt_tree_destroy(hpt_tree* t) { delete t; }

hpt_status hpt_tree_kind(const hpt_tree* t, int* out) {
  if (!t || !out) return bad_arg("null handle or out");
  *out = int(t->impl.kind());
  return HPT_OK;
}

hpt_status hpt_tree_size(const hpt_tree* t, uint64_t* out) {
  if (!t || !out) return bad_arg("null handle or out");
  *out = t->impl.size();
  return HPT_OK;
}

hpt_status hpt_tree_min_depth(const hpt_tree* t, uint32_t* out) {
  if (!t || !out) return bad_arg("null handle or out");
  *out = t->impl.min_depth();
  return HPT_OK;
}

hpt_status hpt_tree_key(const hpt_tree* t, uint64_t* out) {
  if (!t || !out) return bad_arg("null handle or out");
  *out = t->impl.key();
  return HPT_OK;
}

hpt_status hpt_tree_stats(const hpt_tree* t, hpt_stats* out) {
  if (!t || !out) return bad_arg("null handle or out");
  return wrap([&] {
    hpt::TreeStats s = t->impl.stats();
    out->n = s.n;
    out->total_nodes = s.total_nodes;
    out->leaves = s.leaves;
    out->degree1_nodes = s.degree1;
    out->degree2_nodes = s.degree2;
    out->wildcards = s.wildcards;
    out->avg_leaf_depth = s.avg_leaf_depth;
    out->max_leaf_depth = s.max_leaf_depth;
  });
}

hpt_status hpt_tree_leaf_hist(const hpt_tree* t, uint64_t* buf, uint64_t cap, uint64_t* len) {
  if (!t || !len || (!buf && cap)) return bad_arg("null handle or out");
  return wrap([&] {
    hpt::TreeStats s = t->impl.stats();
    *len = s.leaf_depth_hist.size();
    uint64_t m = std::min<uint64_t>(cap, s.leaf_depth_hist.size());
    for (uint64_t i = 0; i < m; ++i) buf[i] = s.leaf_depth_hist[i];
  });
}

hpt_status hpt_tree_query(const hpt_tree* t, uint64_t key, uint64_t digest, int* verdict) {
  if (!t || !verdict) return bad_arg("null handle or out");
  *verdict = int(t->impl.query(key, digest));
  return HPT_OK;
}

hpt_status hpt_tree_reduce(const hpt_tree* t, hpt_tree** out) {
  if (!t || !out) return bad_arg("null handle or out");
  return wrap([&] { *out = new hpt_tree(t->impl.reduced()); });
}

hpt_status hpt_tree_extend(const hpt_tree* t, uint32_t min_depth, hpt_tree** out) {
  if (!t || !out) return bad_arg("null handle or out");
  return wrap([&] { *out = new hpt_tree(t->impl.extended(min_depth)); });
}

hpt_status hpt_tree_equal(const hpt_tree* a, const hpt_tree* b, int* out) {
  if (!a || !b || !out) return bad_arg("null handle or out");
  *out = hpt::structural_equal(a->impl, b->impl) ? 1 : 0;
  return HPT_OK;
}

/* ---- codec ---- */

hpt_status hpt_tree_encode(const hpt_tree* t, uint32_t scale_bits, uint8_t** blob, size_t* size,
                           double* content_bits) {
  if (!t || !blob || !size) return bad_arg("null handle or out");
  return wrap([&] {
    auto bytes = hpt::encode_tree(t->impl, scale_bits, content_bits);
    auto* p = static_cast<uint8_t*>(std::malloc(bytes.size()));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, bytes.data(), bytes.size());
    *blob = p;
    *size = bytes.size();
  });
}

void hpt_blob_free(uint8_t* blob) { std::free(blob); }

hpt_status hpt_tree_decode(const uint8_t* data, size_t size, hpt_tree** out) {
  if (!data || !out) return bad_arg("null data or out");
  return wrap([&] { *out = new hpt_tree(hpt::decode_tree(data, size)); });
}

hpt_status hpt_peek_header(const uint8_t* data, size_t size, hpt_header* out) {
  if (!data || !out) return bad_arg("null data or out");
  return wrap([&] {
    hpt::Header h = hpt::peek_header(data, size);
    out->kind = int(h.kind);
    out->scale_bits = h.scale_bits;
    out->n = h.n;
    out->min_depth = h.min_depth;
    out->header_size = h.header_size;
  });
}

hpt_status hpt_quantize_split(uint64_t n, int kind, uint32_t scale_bits, uint32_t* buf,
                              uint64_t cap, uint64_t* len) {
  if (!len || (!buf && cap)) return bad_arg("null out");
  if (!valid_kind(kind)) return bad_arg("bad tree kind");
  return wrap([&] {
    auto w = hpt::quantize_split(n, hpt::TreeKind(kind), scale_bits);
    *len = w.size();
    uint64_t m = std::min<uint64_t>(cap, w.size());
    for (uint64_t i = 0; i < m; ++i) buf[i] = w[i];
  });
}

hpt_status hpt_measure_rate(uint64_t n, int kind, uint32_t min_depth, uint32_t trials,
                            uint32_t scale_bits, uint64_t key, uint64_t seed,
                            hpt_rate_result* out) {
  if (!out) return bad_arg("null out");
  if (!valid_kind(kind)) return bad_arg("bad tree kind");
  return wrap([&] {
    auto r = hpt::measure_rate(n, hpt::TreeKind(kind), min_depth, trials, scale_bits, key, seed);
    out->mean_payload_bits = r.mean_payload_bits;
    out->se_payload_bits = r.se_payload_bits;
    out->mean_content_bits = r.mean_content_bits;
    out->mean_total_bits = r.mean_total_bits;
    out->trials = r.trials;
  });
}

/* ---- Monte Carlo ---- */

hpt_status hpt_tree_simulate_fp(const hpt_tree* t, uint64_t probes, uint64_t seed, double* out) {
  if (!t || !out) return bad_arg("null handle or out");
  return wrap([&] { *out = hpt::simulate_false_positive(t->impl, probes, seed); });
}

hpt_status hpt_simulate_fp(uint64_t n, int kind, uint32_t min_depth, uint32_t trials,
                           uint64_t probes, uint64_t key, uint64_t seed, hpt_fp_result* out) {
  if (!out) return bad_arg("null out");
  if (!valid_kind(kind)) return bad_arg("bad tree kind");
  return wrap([&] {
    auto r = hpt::simulate_fp_ensemble(n, hpt::TreeKind(kind), min_depth, trials, probes, key,
                                       seed);
    out->mean = r.mean;
    out->se = r.stderr_mean;
    out->trials = r.trials;
  });
}

hpt_status hpt_ensemble_shape(uint64_t n, int kind, uint32_t min_depth, uint32_t trials,
                              uint64_t key, uint64_t seed, hpt_shape_result* out,
                              double* hist_mean, double* hist_se, uint64_t cap,
                              uint64_t* hist_len) {
  if (!out) return bad_arg("null out");
  if (!valid_kind(kind)) return bad_arg("bad tree kind");
  return wrap([&] {
    auto r = hpt::tree_ensemble_stats(n, hpt::TreeKind(kind), min_depth, trials, key, seed);
    out->mean_avg_leaf_depth = r.mean_avg_leaf_depth;
    out->se_avg_leaf_depth = r.se_avg_leaf_depth;
    out->mean_degree1 = r.mean_degree1;
    out->se_degree1 = r.se_degree1;
    out->trials = r.trials;
    if (hist_len) *hist_len = r.mean_leaf_hist.size();
    uint64_t m = std::min<uint64_t>(cap, r.mean_leaf_hist.size());
    for (uint64_t i = 0; i < m; ++i) {
      if (hist_mean) hist_mean[i] = r.mean_leaf_hist[i];
      if (hist_se) hist_se[i] = r.se_leaf_hist[i];
    }
  });
}

/* ---- bloom ---- */

hpt_status hpt_bloom_create(uint64_t m_bits, uint32_t k, uint64_t key, hpt_bloom** out) {
  if (!out) return bad_arg("null out");
  return wrap([&] { *out = new hpt_bloom(m_bits, k, key); });
}

void hpt_bloom_destroy(hpt_bloom* b) { delete b; }

hpt_status hpt_bloom_insert(hpt_bloom* b, uint64_t digest) {
  if (!b) return bad_arg("null handle");
  b->impl.insert(digest);
  return HPT_OK;
}

hpt_status hpt_bloom_query(const hpt_bloom* b, uint64_t digest, int* out) {
  if (!b || !out) return bad_arg("null handle or out");
  *out = b->impl.query(digest) ? 1 : 0;
  return HPT_OK;
}

hpt_status hpt_bloom_fp(uint64_t n, uint64_t m_bits, uint32_t k, double* out) {
  if (!out) return bad_arg("null out");
  return wrap([&] { *out = hpt::bloom_fp(n, m_bits, k); });
}

hpt_status hpt_bloom_optimal_k(uint64_t n, uint64_t m_bits, uint32_t* out) {
  if (!out) return bad_arg("null out");
  return wrap([&] { *out = hpt::optimal_k(n, m_bits); });
}

hpt_status hpt_bloom_bits_per_element(double p, double* out) {
  if (!out) return bad_arg("null out");
  return wrap([&] { *out = hpt::bloom_bits_per_element(p); });
}

hpt_status hpt_simulate_bloom_fp(uint64_t n, uint64_t m_bits, uint32_t k, uint32_t trials,
                                 uint64_t probes, uint64_t key, uint64_t seed,
                                 hpt_fp_result* out) {
  if (!out) return bad_arg("null out");
  return wrap([&] {
    auto r = hpt::simulate_bloom_fp(n, m_bits, k, trials, probes, key, seed);
    out->mean = r.mean;
    out->se = r.stderr_mean;
    out->trials = r.trials;
  });
}

}  // extern "C"
