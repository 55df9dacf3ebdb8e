#ifndef HPT_H
#define HPT_H

/* C interface to the hash-origin prefix tree library.
 *
 * Every function that can fail returns hpt_status and writes results through
 * out pointers.  hpt_last_error() returns a thread-local message for the most
 * recent failure on the calling thread.  Handles are destroyed with their
 * matching *_destroy function; encoded blobs with hpt_blob_free.
 */

#include <stddef.h>
#include <stdint.h>

#ifndef HPT_API
#if defined(_WIN32)
#define HPT_API __declspec(dllimport)
#else
#define HPT_API
#endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hpt_status {
  HPT_OK = 0,
  HPT_ERR_DOMAIN = 1,    /* argument outside the quantity's domain */
  HPT_ERR_CAPACITY = 2,  /* beyond configured or built-in size limits */
  HPT_ERR_DUPLICATE = 3, /* two elements share a stream prefix of max depth */
  HPT_ERR_EMPTY = 4,     /* empty input where >= 1 element is required */
  HPT_ERR_FORMAT = 5,    /* malformed container or payload */
  HPT_ERR_TRUNCATED = 6, /* container or payload ends early */
  HPT_ERR_IO = 7,        /* file or stream error */
  HPT_ERR_ARGUMENT = 8,  /* null pointer or bad enum value at the C boundary */
  HPT_ERR_INTERNAL = 9
} hpt_status;

typedef enum hpt_kind {
  HPT_TREE_MINIMAL = 0,
  HPT_TREE_MINDEPTH = 1,
  HPT_TREE_REDUCED = 2
} hpt_kind;

typedef enum hpt_verdict {
  HPT_DEFINITELY_ABSENT = 0,
  HPT_PRESENT_OR_FALSE_POSITIVE = 1
} hpt_verdict;

typedef enum hpt_corpus_format {
  HPT_FORMAT_LINES = 0,  /* UTF-8 lines, newline stripped */
  HPT_FORMAT_RAW_U64 = 1 /* little-endian 64-bit records used as digests */
} hpt_corpus_format;

typedef struct hpt_eval hpt_eval;     /* memoized exact recurrences */
typedef struct hpt_tree hpt_tree;     /* immutable prefix tree */
typedef struct hpt_corpus hpt_corpus; /* ingested elements */
typedef struct hpt_bloom hpt_bloom;   /* bloom filter baseline */

typedef struct hpt_stats {
  uint64_t n;
  uint64_t total_nodes;
  uint64_t leaves;
  uint64_t degree1_nodes;
  uint64_t degree2_nodes;
  uint64_t wildcards;
  double avg_leaf_depth;
  uint32_t max_leaf_depth;
} hpt_stats;

typedef struct hpt_header {
  int kind;
  uint32_t scale_bits;
  uint64_t n;
  uint32_t min_depth; /* 0 unless kind is MinDepth */
  size_t header_size; /* bytes before the coded payload */
} hpt_header;

typedef struct hpt_fp_result {
  double mean;
  double se;
  uint32_t trials;
} hpt_fp_result;

typedef struct hpt_rate_result {
  double mean_payload_bits; /* wire bytes after the header, times 8 */
  double se_payload_bits;
  double mean_content_bits; /* information coded, before byte flush */
  double mean_total_bits;
  uint32_t trials;
} hpt_rate_result;

typedef struct hpt_shape_result {
  double mean_avg_leaf_depth;
  double se_avg_leaf_depth;
  double mean_degree1;
  double se_degree1;
  uint32_t trials;
} hpt_shape_result;

/* ---- library ---- */
HPT_API const char* hpt_version(void);
HPT_API const char* hpt_last_error(void);
HPT_API const char* hpt_status_name(hpt_status s);

/* ---- closed forms and approximations (all values in bits, lg = log2) ---- */
HPT_API hpt_status hpt_log_factorial(uint64_t n, double* out);
HPT_API hpt_status hpt_log_binomial(uint64_t n, uint64_t k, double* out);
HPT_API hpt_status hpt_split_entropy(uint64_t n, double* out);
HPT_API hpt_status hpt_reduced_split_entropy(uint64_t n, double* out);
HPT_API hpt_status hpt_approx_split_entropy(uint64_t n, double* out);
HPT_API hpt_status hpt_tree_entropy_closed(uint64_t n, double* out);
HPT_API hpt_status hpt_approx_tree_entropy(uint64_t n, double* out);
HPT_API hpt_status hpt_tree_entropy_smooth(uint64_t n, double* out);
HPT_API hpt_status hpt_avg_depth_sum(uint64_t n, double* out);
HPT_API hpt_status hpt_approx_avg_depth(uint64_t n, int terms, double* out);
HPT_API hpt_status hpt_avg_depth_smooth(uint64_t n, double* out);
HPT_API hpt_status hpt_leaf_depth_pmf(uint64_t n, uint32_t d, double* out);
HPT_API hpt_status hpt_expected_leaves(uint64_t n, uint32_t d, double* out);
HPT_API hpt_status hpt_min_depth_entropy_closed(uint64_t n, uint32_t d, double* out);
HPT_API hpt_status hpt_false_positive(uint64_t n, uint32_t d_min, double* out);
HPT_API hpt_status hpt_internal_nodes_at_depth(uint64_t n, uint32_t d, double* out);
HPT_API hpt_status hpt_m_node_count(uint64_t n, uint64_t m, double* out);
HPT_API hpt_status hpt_degree1_count(uint64_t n, double* out);
HPT_API hpt_status hpt_degree1_bits(uint64_t n, double* out);
HPT_API hpt_status hpt_reduced_entropy_closed(uint64_t n, double* out);
HPT_API double hpt_depth_offset_const(void); /* lim D_{n+1} - lg n */
HPT_API double hpt_fp_limit_const(void);     /* lim F_n = lg(e)/2 */

/* ---- exact recurrences (memoized; n capped at n_max_exact) ---- */
HPT_API hpt_status hpt_eval_create(uint32_t n_max_exact, hpt_eval** out); /* 0 = default */
HPT_API void hpt_eval_destroy(hpt_eval* e);
HPT_API hpt_status hpt_eval_n_max(const hpt_eval* e, uint32_t* out);
HPT_API hpt_status hpt_eval_split_entropy(hpt_eval* e, uint32_t n, double* out);
HPT_API hpt_status hpt_eval_tree_entropy(hpt_eval* e, uint32_t n, double* out);
HPT_API hpt_status hpt_eval_reduced_entropy(hpt_eval* e, uint32_t n, double* out);
HPT_API hpt_status hpt_eval_avg_depth(hpt_eval* e, uint32_t n, double* out);
HPT_API hpt_status hpt_eval_min_depth_entropy(hpt_eval* e, uint32_t n, uint32_t d, double* out);

/* ---- element streams and corpora ---- */
HPT_API hpt_status hpt_digest(const void* data, size_t len, uint64_t* out);
HPT_API hpt_status hpt_stream_word(uint64_t key, uint64_t digest, uint64_t block, uint64_t* out);
HPT_API hpt_status hpt_stream_bit(uint64_t key, uint64_t digest, uint64_t index, int* out);
HPT_API hpt_status hpt_corpus_open(const char* path, int format, hpt_corpus** out); /* "-" = stdin */
HPT_API void hpt_corpus_destroy(hpt_corpus* c);
HPT_API hpt_status hpt_corpus_size(const hpt_corpus* c, uint64_t* out);
HPT_API hpt_status hpt_corpus_duplicates(const hpt_corpus* c, uint64_t* out);
HPT_API hpt_status hpt_corpus_digests(const hpt_corpus* c, const uint64_t** data, uint64_t* count);
HPT_API hpt_status hpt_corpus_record_at(const hpt_corpus* c, uint64_t i, const char** data,
                                        size_t* len);

/* ---- trees ---- */
HPT_API hpt_status hpt_tree_build(const uint64_t* digests, uint64_t n, uint64_t key, int kind,
                                  uint32_t min_depth, hpt_tree** out);
HPT_API void hpt_tree_destroy(hpt_tree* t);
HPT_API hpt_status hpt_tree_kind(const hpt_tree* t, int* out);
HPT_API hpt_status hpt_tree_size(const hpt_tree* t, uint64_t* out);
HPT_API hpt_status hpt_tree_min_depth(const hpt_tree* t, uint32_t* out);
HPT_API hpt_status hpt_tree_key(const hpt_tree* t, uint64_t* out);
HPT_API hpt_status hpt_tree_stats(const hpt_tree* t, hpt_stats* out);
/* writes the full histogram length to *len; copies up to cap entries */
HPT_API hpt_status hpt_tree_leaf_hist(const hpt_tree* t, uint64_t* buf, uint64_t cap,
                                      uint64_t* len);
HPT_API hpt_status hpt_tree_query(const hpt_tree* t, uint64_t key, uint64_t digest, int* verdict);
HPT_API hpt_status hpt_tree_reduce(const hpt_tree* t, hpt_tree** out);
HPT_API hpt_status hpt_tree_extend(const hpt_tree* t, uint32_t min_depth, hpt_tree** out);
HPT_API hpt_status hpt_tree_equal(const hpt_tree* a, const hpt_tree* b, int* out);

/* ---- codec ---- */
HPT_API hpt_status hpt_tree_encode(const hpt_tree* t, uint32_t scale_bits, uint8_t** blob,
                                   size_t* size, double* content_bits /* nullable */);
HPT_API void hpt_blob_free(uint8_t* blob);
HPT_API hpt_status hpt_tree_decode(const uint8_t* data, size_t size, hpt_tree** out);
HPT_API hpt_status hpt_peek_header(const uint8_t* data, size_t size, hpt_header* out);
HPT_API hpt_status hpt_quantize_split(uint64_t n, int kind, uint32_t scale_bits, uint32_t* buf,
                                      uint64_t cap, uint64_t* len);
HPT_API hpt_status hpt_measure_rate(uint64_t n, int kind, uint32_t min_depth, uint32_t trials,
                                    uint32_t scale_bits, uint64_t key, uint64_t seed,
                                    hpt_rate_result* out);

/* ---- Monte Carlo ---- */
HPT_API hpt_status hpt_tree_simulate_fp(const hpt_tree* t, uint64_t probes, uint64_t seed,
                                        double* out);
HPT_API hpt_status hpt_simulate_fp(uint64_t n, int kind, uint32_t min_depth, uint32_t trials,
                                   uint64_t probes, uint64_t key, uint64_t seed,
                                   hpt_fp_result* out);
/* hist buffers (nullable) receive per-depth mean/se of leaf counts */
HPT_API hpt_status hpt_ensemble_shape(uint64_t n, int kind, uint32_t min_depth, uint32_t trials,
                                      uint64_t key, uint64_t seed, hpt_shape_result* out,
                                      double* hist_mean, double* hist_se, uint64_t cap,
                                      uint64_t* hist_len);

/* ---- bloom baseline ---- */
HPT_API hpt_status hpt_bloom_create(uint64_t m_bits, uint32_t k, uint64_t key, hpt_bloom** out);
HPT_API void hpt_bloom_destroy(hpt_bloom* b);
HPT_API hpt_status hpt_bloom_insert(hpt_bloom* b, uint64_t digest);
HPT_API hpt_status hpt_bloom_query(const hpt_bloom* b, uint64_t digest, int* out);
HPT_API hpt_status hpt_bloom_fp(uint64_t n, uint64_t m_bits, uint32_t k, double* out);
HPT_API hpt_status hpt_bloom_optimal_k(uint64_t n, uint64_t m_bits, uint32_t* out);
HPT_API hpt_status hpt_bloom_bits_per_element(double p, double* out);
HPT_API hpt_status hpt_simulate_bloom_fp(uint64_t n, uint64_t m_bits, uint32_t k, uint32_t trials,
                                         uint64_t probes, uint64_t key, uint64_t seed,
                                         hpt_fp_result* out);

#ifdef __cplusplus
}
#endif

#endif /* HPT_H */
