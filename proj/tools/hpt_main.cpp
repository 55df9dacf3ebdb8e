#include <cerrno>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hpt/hpt.h"

namespace {

int exit_code_for(hpt_status s) {
  switch (s) {
    case HPT_OK: return 0;
    case HPT_ERR_FORMAT:
    case HPT_ERR_TRUNCATED: return 3;
    case HPT_ERR_CAPACITY: return 4;
    case HPT_ERR_INTERNAL: return 1;
    default: return 2;  // bad input of some sort
  }
}

void check(hpt_status s) {
  if (s == HPT_OK) return;
  std::fprintf(stderr, "error: %s (%s)\n", hpt_last_error(), hpt_status_name(s));
  std::exit(exit_code_for(s));
}

[[noreturn]] void die_input(const std::string& msg) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  std::exit(2);
}

std::string sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

uint64_t parse_u64(const std::string& s, int base, const char* what) {
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(s.c_str(), &end, base);
  if (errno || end == s.c_str() || *end) die_input(std::string("bad ") + what + " '" + s + "'");
  return v;
}

int parse_kind(const std::string& s) {
  if (s == "minimal") return HPT_TREE_MINIMAL;
  if (s == "depth") return HPT_TREE_MINDEPTH;
  if (s == "reduced") return HPT_TREE_REDUCED;
  die_input("bad kind '" + s + "' (expected minimal|depth|reduced)");
}

const char* kind_name(int kind) {
  switch (kind) {
    case HPT_TREE_MINIMAL: return "minimal";
    case HPT_TREE_MINDEPTH: return "depth";
    case HPT_TREE_REDUCED: return "reduced";
  }
  return "?";
}

int parse_format(const std::string& s) {
  if (s == "lines") return HPT_FORMAT_LINES;
  if (s == "raw-u64") return HPT_FORMAT_RAW_U64;
  die_input("bad format '" + s + "' (expected lines|raw-u64)");
}

struct GeomRange {
  uint64_t lo = 0, hi = 0;
  double step = 2.0;
};

GeomRange parse_range(const std::string& s) {
  GeomRange r;
  size_t a = s.find(':');
  size_t b = a == std::string::npos ? a : s.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos)
    die_input("bad range '" + s + "' (expected lo:hi:geomstep)");
  r.lo = parse_u64(s.substr(0, a), 10, "range lo");
  r.hi = parse_u64(s.substr(a + 1, b - a - 1), 10, "range hi");
  errno = 0;
  char* end = nullptr;
  std::string st = s.substr(b + 1);
  r.step = std::strtod(st.c_str(), &end);
  if (errno || end == st.c_str() || *end || r.step <= 1.0)
    die_input("bad range step '" + st + "' (needs geometric step > 1)");
  return r;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::vector<uint8_t> data;
  if (path == "-") {
    char buf[1 << 16];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, stdin)) > 0)
      data.insert(data.end(), buf, buf + got);
    if (std::ferror(stdin)) die_input("reading stdin failed");
    return data;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) die_input("cannot open '" + path + "'");
  data.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  if (in.bad()) die_input("reading '" + path + "' failed");
  return data;
}

void write_file(const std::string& path, const uint8_t* data, size_t size) {
  if (path == "-") {
    if (std::fwrite(data, 1, size, stdout) != size) die_input("writing stdout failed");
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) die_input("cannot create '" + path + "'");
  out.write(reinterpret_cast<const char*>(data), std::streamsize(size));
  if (!out) die_input("writing '" + path + "' failed");
}

// exact recurrences under the cap, closed forms above it
struct Analytic {
  hpt_eval* eval = nullptr;
  uint32_t cap = 0;

  Analytic() {
    check(hpt_eval_create(0, &eval));
    check(hpt_eval_n_max(eval, &cap));
  }
  ~Analytic() { hpt_eval_destroy(eval); }

  bool exact(uint64_t n) const { return n <= cap; }

  double tree_entropy(uint64_t n) {
    double v;
    if (exact(n)) check(hpt_eval_tree_entropy(eval, uint32_t(n), &v));
    else check(hpt_tree_entropy_closed(n, &v));
    return v;
  }
  double reduced_entropy(uint64_t n) {
    double v;
    if (exact(n)) check(hpt_eval_reduced_entropy(eval, uint32_t(n), &v));
    else check(hpt_reduced_entropy_closed(n, &v));
    return v;
  }
  double avg_depth(uint64_t n) {
    double v;
    if (exact(n)) check(hpt_eval_avg_depth(eval, uint32_t(n), &v));
    else check(hpt_avg_depth_sum(n, &v));
    return v;
  }
  double min_depth_entropy(uint64_t n, uint32_t d) {
    double v;
    if (exact(n)) check(hpt_eval_min_depth_entropy(eval, uint32_t(n), d, &v));
    else check(hpt_min_depth_entropy_closed(n, d, &v));
    return v;
  }
  double entropy_for(int kind, uint64_t n, uint32_t d) {
    if (kind == HPT_TREE_MINDEPTH) return min_depth_entropy(n, d);
    if (kind == HPT_TREE_REDUCED) return reduced_entropy(n);
    return tree_entropy(n);
  }
};

struct CommonOpts {
  std::string key_hex = "0";
  std::string seed_str = "0x0D0DA203";
  int digits = 6;

  uint64_t key() const { return parse_u64(key_hex, 16, "key"); }
  uint64_t seed() const { return parse_u64(seed_str, 0, "seed"); }
};

void add_common(CLI::App* sub, CommonOpts& c) {
  sub->add_option("--key", c.key_hex, "stream key, hex");
  sub->add_option("--seed", c.seed_str, "RNG seed (default 0x0D0DA203)");
  sub->add_option("--digits", c.digits, "significant digits in output");
}

/* ---------------- table ---------------- */

void run_table(std::vector<uint64_t> ns, std::vector<uint32_t> ds, const CommonOpts& c) {
  if (ns.empty())
    ns = {1,  2,  3,   4,   5,   6,    7,    8,    9,     10,    20,
          50, 100, 200, 500, 1000, 2000, 5000, 10000, 100000};
  if (ds.empty()) ds = {5, 9, 10, 15, 20, 30};
  Analytic an;

  size_t cols = ns.size();
  auto emit = [&](const std::string& label, const std::vector<std::string>& cells) {
    std::string line = label;
    for (const auto& cell : cells) {
      line += ',';
      line += cell;
    }
    std::printf("%s\n", line.c_str());
  };

  std::string head = "quantity";
  for (uint64_t n : ns) head += ",n=" + std::to_string(n);
  std::printf("%s\n", head.c_str());

  auto row1 = [&](const std::string& label, hpt_status (*fn)(uint64_t, double*)) {
    std::vector<std::string> cells(cols);
    for (size_t i = 0; i < cols; ++i) {
      double v;
      check(fn(ns[i], &v));
      cells[i] = sig(v, c.digits);
    }
    emit(label, cells);
  };

  row1("h'", hpt_reduced_split_entropy);
  row1("h", hpt_split_entropy);
  row1("h~", hpt_approx_split_entropy);

  std::vector<std::string> cells(cols);
  for (size_t i = 0; i < cols; ++i) cells[i] = sig(an.reduced_entropy(ns[i]), c.digits);
  emit("H'", cells);
  for (size_t i = 0; i < cols; ++i) cells[i] = sig(an.tree_entropy(ns[i]), c.digits);
  emit("H", cells);
  row1("H~", hpt_approx_tree_entropy);
  for (uint32_t d : ds) {
    for (size_t i = 0; i < cols; ++i) cells[i] = sig(an.min_depth_entropy(ns[i], d), c.digits);
    emit("H^" + std::to_string(d), cells);
  }
  row1("lg(n!)", hpt_log_factorial);
  for (size_t i = 0; i < cols; ++i) cells[i] = sig(an.avg_depth(ns[i]), c.digits);
  emit("D", cells);
  for (size_t i = 0; i < cols; ++i) {
    double v;
    check(hpt_false_positive(ns[i], 0, &v));
    cells[i] = sig(v, c.digits);
  }
  emit("F", cells);
  for (uint32_t d : ds) {
    for (size_t i = 0; i < cols; ++i) {
      double v;
      check(hpt_false_positive(ns[i], d, &v));
      cells[i] = sig(v, c.digits);
    }
    emit("F^" + std::to_string(d), cells);
  }
  for (uint32_t d : ds) {
    for (size_t i = 0; i < cols; ++i) {
      double fp, bits;
      check(hpt_false_positive(ns[i], d, &fp));
      check(hpt_bloom_bits_per_element(fp, &bits));
      cells[i] = sig(double(ns[i]) * bits, c.digits);
    }
    emit("B(F^" + std::to_string(d) + ")", cells);
  }
  for (size_t i = 0; i < cols; ++i) cells[i] = an.exact(ns[i]) ? "recurrence" : "closed-form";
  emit("method", cells);
}

/* ---------------- oscillation ---------------- */

void run_oscillation(const std::string& quantity, const GeomRange& r, const CommonOpts& c) {
  Analytic an;
  std::printf("n,exact,smooth,residual\n");
  for (uint64_t n = r.lo; n <= r.hi;) {
    double exact = 0, smooth = 0;
    if (quantity == "H") {
      if (!an.exact(n)) {
        std::fprintf(stderr, "error: exact H needs n <= %u\n", an.cap);
        std::exit(4);
      }
      exact = an.tree_entropy(n);
      check(hpt_tree_entropy_smooth(n, &smooth));
    } else if (quantity == "D") {
      check(hpt_avg_depth_sum(n, &exact));
      check(hpt_avg_depth_smooth(n, &smooth));
    } else if (quantity == "F") {
      check(hpt_false_positive(n, 0, &exact));
      smooth = hpt_fp_limit_const();
    } else {
      die_input("bad quantity '" + quantity + "' (expected H|D|F)");
    }
    std::printf("%" PRIu64 ",%s,%s,%s\n", n, sig(exact, c.digits).c_str(),
                sig(smooth, c.digits).c_str(), sig(exact - smooth, c.digits).c_str());
    uint64_t next = uint64_t(double(n) * r.step + 0.5);
    n = next > n ? next : n + 1;
  }
}

/* ---------------- encode / decode / query ---------------- */

struct BuildOpts {
  std::string input = "-";
  std::string format = "lines";
  std::string kind = "minimal";
  uint32_t depth = 0;
  uint32_t scale_bits = 16;
  std::string out;
};

hpt_corpus* open_corpus(const std::string& path, const std::string& format) {
  hpt_corpus* corpus = nullptr;
  check(hpt_corpus_open(path.c_str(), parse_format(format), &corpus));
  return corpus;
}

void run_encode(const BuildOpts& b, const CommonOpts& c) {
  int kind = parse_kind(b.kind);
  if (kind == HPT_TREE_MINDEPTH && b.depth == 0)
    die_input("--kind depth requires --depth >= 1");
  if (kind != HPT_TREE_MINDEPTH && b.depth != 0)
    die_input("--depth only applies to --kind depth");

  hpt_corpus* corpus = open_corpus(b.input, b.format);
  uint64_t n = 0, dup = 0;
  check(hpt_corpus_size(corpus, &n));
  check(hpt_corpus_duplicates(corpus, &dup));
  if (dup) std::fprintf(stderr, "note: %" PRIu64 " duplicate digests in input\n", dup);

  const uint64_t* digests = nullptr;
  uint64_t count = 0;
  check(hpt_corpus_digests(corpus, &digests, &count));
  hpt_tree* tree = nullptr;
  check(hpt_tree_build(digests, count, c.key(), kind, b.depth, &tree));

  uint8_t* blob = nullptr;
  size_t size = 0;
  double content = 0;
  check(hpt_tree_encode(tree, b.scale_bits, &blob, &size, &content));
  hpt_header h;
  check(hpt_peek_header(blob, size, &h));
  write_file(b.out, blob, size);

  Analytic an;
  double bound = an.entropy_for(kind, n, b.depth);
  double payload_bits = 8.0 * double(size - h.header_size);
  std::fprintf(stderr,
               "n=%" PRIu64 " kind=%s payload_bits=%s bits_per_element=%s content_bits=%s "
               "analytic_bits=%s\n",
               n, kind_name(kind), sig(payload_bits, c.digits).c_str(),
               sig(payload_bits / double(n), c.digits).c_str(), sig(content, c.digits).c_str(),
               sig(bound, c.digits).c_str());

  hpt_blob_free(blob);
  hpt_tree_destroy(tree);
  hpt_corpus_destroy(corpus);
}

void run_decode(const std::string& input, const std::string& out, const CommonOpts& c) {
  auto data = read_file(input);
  hpt_header h;
  check(hpt_peek_header(data.data(), data.size(), &h));
  hpt_tree* tree = nullptr;
  check(hpt_tree_decode(data.data(), data.size(), &tree));

  if (!out.empty()) {
    uint8_t* blob = nullptr;
    size_t size = 0;
    check(hpt_tree_encode(tree, h.scale_bits, &blob, &size, nullptr));
    write_file(out, blob, size);
    std::fprintf(stderr, "re-encoded %zu bytes\n", size);
  } else {
    hpt_stats s;
    check(hpt_tree_stats(tree, &s));
    std::printf(
        "n,kind,min_depth,scale_bits,payload_bytes,total_nodes,leaves,degree1,degree2,"
        "wildcards,avg_leaf_depth,max_leaf_depth\n");
    std::printf("%" PRIu64 ",%s,%u,%u,%zu,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
                ",%" PRIu64 ",%s,%u\n",
                s.n, kind_name(h.kind), h.min_depth, h.scale_bits, data.size() - h.header_size,
                s.total_nodes, s.leaves, s.degree1_nodes, s.degree2_nodes, s.wildcards,
                sig(s.avg_leaf_depth, c.digits).c_str(), s.max_leaf_depth);
  }
  hpt_tree_destroy(tree);
}

void run_query(const std::string& tree_path, const std::string& input, const std::string& format,
               const CommonOpts& c) {
  auto data = read_file(tree_path);
  hpt_tree* tree = nullptr;
  check(hpt_tree_decode(data.data(), data.size(), &tree));

  hpt_corpus* corpus = open_corpus(input, format);
  uint64_t n = 0;
  check(hpt_corpus_size(corpus, &n));
  const uint64_t* digests = nullptr;
  uint64_t count = 0;
  check(hpt_corpus_digests(corpus, &digests, &count));
  bool lines = parse_format(format) == HPT_FORMAT_LINES;
  uint64_t key = c.key();
  for (uint64_t i = 0; i < count; ++i) {
    int verdict = 0;
    check(hpt_tree_query(tree, key, digests[i], &verdict));
    const char* word = verdict == HPT_PRESENT_OR_FALSE_POSITIVE ? "maybe" : "absent";
    if (lines) {
      const char* rec = nullptr;
      size_t len = 0;
      check(hpt_corpus_record_at(corpus, i, &rec, &len));
      std::printf("%s\t%.*s\n", word, int(len), rec);
    } else {
      std::printf("%s\t%016" PRIx64 "\n", word, digests[i]);
    }
  }
  hpt_corpus_destroy(corpus);
  hpt_tree_destroy(tree);
}

/* ---------------- fpsim / rate / bloomcmp ---------------- */

void run_fpsim(uint64_t n, const std::string& kind_s, uint32_t depth, uint32_t trials,
               uint64_t probes, const CommonOpts& c) {
  int kind = parse_kind(kind_s);
  hpt_fp_result r;
  check(hpt_simulate_fp(n, kind, depth, trials, probes, c.key(), c.seed(), &r));
  double analytic = 1.0;
  if (kind != HPT_TREE_REDUCED) check(hpt_false_positive(n, depth, &analytic));
  std::printf("n,kind,d,trials,probes,empirical,se,analytic\n");
  std::printf("%" PRIu64 ",%s,%u,%u,%" PRIu64 ",%s,%s,%s\n", n, kind_name(kind), depth, trials,
              probes, sig(r.mean, c.digits).c_str(), sig(r.se, c.digits).c_str(),
              sig(analytic, c.digits).c_str());
}

void run_rate(uint64_t n, const std::string& kind_s, uint32_t depth, uint32_t trials,
              uint32_t scale_bits, const CommonOpts& c) {
  int kind = parse_kind(kind_s);
  if (kind == HPT_TREE_MINDEPTH && depth == 0) die_input("--kind depth requires --depth >= 1");
  hpt_rate_result r;
  check(hpt_measure_rate(n, kind, depth, trials, scale_bits, c.key(), c.seed(), &r));
  Analytic an;
  double bound = an.entropy_for(kind, n, depth);
  std::printf(
      "n,kind,d,trials,scale_bits,payload_bits,se,content_bits,total_bits,analytic_bits,"
      "payload_over_analytic\n");
  std::string ratio = bound > 0 ? sig(r.mean_payload_bits / bound, c.digits) : "";
  std::printf("%" PRIu64 ",%s,%u,%u,%u,%s,%s,%s,%s,%s,%s\n", n, kind_name(kind), depth, trials,
              scale_bits, sig(r.mean_payload_bits, c.digits).c_str(),
              sig(r.se_payload_bits, c.digits).c_str(), sig(r.mean_content_bits, c.digits).c_str(),
              sig(r.mean_total_bits, c.digits).c_str(), sig(bound, c.digits).c_str(),
              ratio.c_str());
}

void run_bloomcmp(std::vector<uint64_t> ns, std::vector<uint32_t> ds, uint32_t trials,
                  uint32_t scale_bits, const CommonOpts& c) {
  if (ns.empty()) ns = {20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};
  if (ds.empty()) ds = {15, 20, 30};
  Analytic an;
  std::printf("n,d,tree_bits,fp,bloom_bits,tree_over_bloom,measured_bits,measured_over_bloom\n");
  for (uint64_t n : ns) {
    for (uint32_t d : ds) {
      double tree_bits = an.min_depth_entropy(n, d);
      double fp, per;
      check(hpt_false_positive(n, d, &fp));
      check(hpt_bloom_bits_per_element(fp, &per));
      double bloom_bits = double(n) * per;
      std::string measured, mratio;
      if (trials > 0) {
        hpt_rate_result r;
        check(hpt_measure_rate(n, HPT_TREE_MINDEPTH, d, trials, scale_bits, c.key(), c.seed(),
                               &r));
        measured = sig(r.mean_total_bits, c.digits);
        mratio = sig(r.mean_total_bits / bloom_bits, c.digits);
      }
      std::printf("%" PRIu64 ",%u,%s,%s,%s,%s,%s,%s\n", n, d, sig(tree_bits, c.digits).c_str(),
                  sig(fp, c.digits).c_str(), sig(bloom_bits, c.digits).c_str(),
                  sig(tree_bits / bloom_bits, c.digits).c_str(), measured.c_str(),
                  mratio.c_str());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hash-origin prefix trees: analytic tables, codec, and simulations"};
  app.require_subcommand(1);

  // table
  auto* t = app.add_subcommand("table", "reference table of analytic quantities");
  std::vector<uint64_t> t_ns;
  std::vector<uint32_t> t_ds;
  CommonOpts t_c;
  t_c.digits = 4;
  t->add_option("--n", t_ns, "element counts (default: the reference set)");
  t->add_option("--depth", t_ds, "min-depth values (default 5 9 10 15 20 30)");
  add_common(t, t_c);
  t->callback([&] { run_table(t_ns, t_ds, t_c); });

  // oscillation
  auto* o = app.add_subcommand("oscillation", "exact minus smooth-approximation residuals");
  std::string o_quantity;
  std::string o_range;
  CommonOpts o_c;
  o_c.digits = 12;
  o->add_option("--quantity", o_quantity, "H|D|F")->required();
  o->add_option("--n-range", o_range, "lo:hi:geomstep")->required();
  add_common(o, o_c);
  o->callback([&] { run_oscillation(o_quantity, parse_range(o_range), o_c); });

  // encode
  auto* e = app.add_subcommand("encode", "build a tree from a corpus and write HPT1");
  BuildOpts e_b;
  CommonOpts e_c;
  e->add_option("input", e_b.input, "corpus path or - for stdin");
  e->add_option("--format", e_b.format, "lines|raw-u64");
  e->add_option("--kind", e_b.kind, "minimal|depth|reduced");
  e->add_option("--depth", e_b.depth, "minimum leaf depth (kind=depth)");
  e->add_option("--scale-bits", e_b.scale_bits, "coder probability precision");
  e->add_option("--out", e_b.out, "output path or -")->required();
  add_common(e, e_c);
  e->callback([&] { run_encode(e_b, e_c); });

  // decode
  auto* d = app.add_subcommand("decode", "summarize or canonically re-encode an HPT1 file");
  std::string d_in = "-", d_out;
  CommonOpts d_c;
  d->add_option("input", d_in, "HPT1 path or -");
  d->add_option("--out", d_out, "re-encode to this path instead of summarizing");
  add_common(d, d_c);
  d->callback([&] { run_decode(d_in, d_out, d_c); });

  // query
  auto* q = app.add_subcommand("query", "membership verdicts for candidate elements");
  std::string q_tree, q_in = "-", q_format = "lines";
  CommonOpts q_c;
  q->add_option("tree", q_tree, "HPT1 path")->required();
  q->add_option("--in", q_in, "candidates path or - for stdin");
  q->add_option("--format", q_format, "lines|raw-u64");
  add_common(q, q_c);
  q->callback([&] { run_query(q_tree, q_in, q_format, q_c); });

  // fpsim
  auto* f = app.add_subcommand("fpsim", "empirical vs analytic false-positive rate");
  uint64_t f_n = 0;
  std::string f_kind = "minimal";
  uint32_t f_depth = 0, f_trials = 1;
  uint64_t f_probes = 100000;
  CommonOpts f_c;
  f->add_option("--n", f_n, "elements per tree")->required();
  f->add_option("--kind", f_kind, "minimal|depth|reduced");
  f->add_option("--depth", f_depth, "minimum leaf depth (kind=depth)");
  f->add_option("--trials", f_trials, "independent trees");
  f->add_option("--probes", f_probes, "random probes per tree");
  add_common(f, f_c);
  f->callback([&] { run_fpsim(f_n, f_kind, f_depth, f_trials, f_probes, f_c); });

  // rate
  auto* r = app.add_subcommand("rate", "achieved coding rate vs analytic entropy");
  uint64_t r_n = 0;
  std::string r_kind = "minimal";
  uint32_t r_depth = 0, r_trials = 100, r_scale = 16;
  CommonOpts r_c;
  r->add_option("--n", r_n, "elements per tree")->required();
  r->add_option("--kind", r_kind, "minimal|depth|reduced");
  r->add_option("--depth", r_depth, "minimum leaf depth (kind=depth)");
  r->add_option("--trials", r_trials, "trees to encode");
  r->add_option("--scale-bits", r_scale, "coder probability precision");
  add_common(r, r_c);
  r->callback([&] { run_rate(r_n, r_kind, r_depth, r_trials, r_scale, r_c); });

  // bloomcmp
  auto* b = app.add_subcommand("bloomcmp", "tree size vs Bloom filter at equal false positives");
  std::vector<uint64_t> b_ns;
  std::vector<uint32_t> b_ds;
  uint32_t b_trials = 0, b_scale = 16;
  CommonOpts b_c;
  b->add_option("--n", b_ns, "element counts");
  b->add_option("--depth", b_ds, "min-depth values (default 15 20 30)");
  b->add_option("--trials", b_trials, "measure real encodings (0 = analytic only)");
  b->add_option("--scale-bits", b_scale, "coder probability precision");
  add_common(b, b_c);
  b->callback([&] { run_bloomcmp(b_ns, b_ds, b_trials, b_scale, b_c); });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
