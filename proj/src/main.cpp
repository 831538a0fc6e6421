// Command-line driver: party runner, benchmark drivers, dataset tooling, the
// training demonstrator, and the division-distribution verifier.  Single
// binary, subcommand style; the default role runs all three parties
// in-process, `--role 0|1|2` (or `run-party`) runs one party over TCP, and
// the oracle role runs the cleartext reference pipeline with no networking.
//
// Every run emits a line-oriented report (stdout or --report FILE) that is
// reproducible bit-for-bit from the config and seeds: parameters first, then
// result rows, then communication metrics.  Wall-clock timings go to stderr
// only.  Exit codes: 0 ok, 2 config error, 3 protocol abort, 4 verification
// mismatch.

#include <CLI11.hpp>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tmpc/engine.h"
#include "tmpc/idx.h"
#include "tmpc/nn.h"
#include "tmpc/oracle.h"
#include "tmpc/shares_io.h"

namespace tmpc {
namespace {

struct GlobalCfg {
  u64 prime = (u64{1} << 61) - 1;
  u64 seed = 1;
  std::string role = "local";  // local | 0 | 1 | 2 | oracle
  std::string hosts = "127.0.0.1,127.0.0.1,127.0.0.1";
  int base_port = 9361;
  std::string report;  // empty -> stdout
};

struct Report {
  std::vector<std::string> lines;

#if defined(__GNUC__)
  __attribute__((format(printf, 2, 3)))
#endif
  void
  addf(const char* fmt, ...) {
    char buf[768];
    va_list ap;
    va_start(ap, fmt);
    vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    lines.emplace_back(buf);
  }

  void extend(const std::vector<std::string>& more) {
    lines.insert(lines.end(), more.begin(), more.end());
  }

  void write(const std::string& path) const {
    if (path.empty()) {
      for (const auto& l : lines) std::printf("%s\n", l.c_str());
      return;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("report: cannot open " + path);
    for (const auto& l : lines) out << l << '\n';
  }
};

int party_role(const GlobalCfg& g) {
  if (g.role == "0" || g.role == "1" || g.role == "2") return g.role[0] - '0';
  if (g.role == "local") return -1;
  if (g.role == "oracle") return -2;
  throw ConfigError("role: expected local, oracle, or a party id 0..2");
}

std::array<std::string, 3> parse_hosts(const std::string& s) {
  std::array<std::string, 3> out;
  size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    size_t c = s.find(',', pos);
    if ((c == std::string::npos) != (i == 2)) throw ConfigError("hosts: need three comma-separated entries");
    out[static_cast<size_t>(i)] = s.substr(pos, c == std::string::npos ? c : c - pos);
    pos = c + 1;
  }
  return out;
}

// Public benchmark inputs are shared deterministically from the session seed;
// every party derives the same dealing and keeps its own row.
std::array<std::vector<RepShare>, 3> deal_public(const Field& F, u64 seed,
                                                 const std::vector<u64>& xs) {
  Prg g(seed, 0x5e);
  std::array<std::vector<RepShare>, 3> out;
  for (auto& o : out) o.resize(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    u64 a = F.reduce(g.next_u64()), b = F.reduce(g.next_u64());
    u64 sh[3] = {a, b, F.sub(F.sub(xs[i], a), b)};
    for (int p = 0; p < 3; ++p) out[static_cast<size_t>(p)][i] = RepShare{sh[p], sh[(p + 1) % 3]};
  }
  return out;
}

// Runs fn(PartyCtx&) -> report rows under the configured role: three
// in-process parties (rows from party 0, bits summed over parties) or one
// TCP party (its own rows and metrics).
template <class Fn>
std::pair<std::vector<std::string>, Metrics> with_session(const Field& F, const GlobalCfg& g,
                                                          Fn&& fn) {
  int id = party_role(g);
  if (id == -2) throw ConfigError("role: this command needs a secure session, not the oracle");
  if (id == -1) {
    auto r = run3(F, g.seed, fn);
    return {r.out[0], r.metrics};
  }
  SessionSeeds seeds = SessionSeeds::derive(g.seed);
  TcpHub hub(id, g.seed, parse_hosts(g.hosts), g.base_port);
  PartyCtx ctx(id, F, &hub, seeds.pair[static_cast<size_t>(id)],
               seeds.pair[static_cast<size_t>((id + 2) % 3)],
               seeds.priv[static_cast<size_t>(id)]);
  auto rows = fn(ctx);
  return {rows, ctx.metrics};
}

void add_metrics(Report& rep, const GlobalCfg& g, const Metrics& m) {
  rep.addf("metric rounds=%llu bits=%llu messages=%llu scope=%s",
           static_cast<unsigned long long>(m.rounds), static_cast<unsigned long long>(m.bits_sent),
           static_cast<unsigned long long>(m.messages),
           party_role(g) == -1 ? "all-parties" : ("party" + g.role).c_str());
}

// ---------------------------------------------------------------- bench div

struct ErrStats {
  long double avg = 0, worst = 0;
};

ErrStats l1_stats(const Field& F, const std::vector<u64>& opened, const std::vector<u64>& as,
                  u64 divisor) {
  ErrStats st;
  for (size_t i = 0; i < as.size(); ++i) {
    long double got = static_cast<long double>(F.decode(opened[i]));
    long double err = fabsl(got - static_cast<long double>(as[i]) / divisor);
    st.avg += err;
    st.worst = std::max(st.worst, err);
  }
  st.avg /= static_cast<long double>(as.size());
  return st;
}

void cmd_bench_div(const GlobalCfg& g, u64 n, int offset, u64 divisor, Report& rep) {
  Field F(g.prime);
  rep.addf("param cmd=bench-div prime=%llu seed=%llu n=%llu offset=%d divisor=%llu role=%s",
           static_cast<unsigned long long>(g.prime), static_cast<unsigned long long>(g.seed),
           static_cast<unsigned long long>(n), offset, static_cast<unsigned long long>(divisor),
           g.role.c_str());
  std::vector<u64> as;
  for (u64 i = 1; i <= n; ++i) as.push_back(i);
  auto shares = deal_public(F, g.seed ^ 0xd1f, as);

  auto [rows, m] = with_session(F, g, [&](PartyCtx& ctx) {
    const auto& mine = shares[static_cast<size_t>(ctx.id)];
    auto tp = l1_stats(ctx.F, open_rep(ctx, truncate_rep(ctx, mine, offset)), as, u64{1} << offset);
    auto dp = l1_stats(ctx.F, open_rep(ctx, div_pub(ctx, mine, divisor)), as, divisor);
    auto ta = l1_stats(ctx.F, open_rep(ctx, div_pub_active4(ctx, mine, u64{1} << offset)), as,
                       u64{1} << offset);
    auto da = l1_stats(ctx.F, open_rep(ctx, div_pub_active4(ctx, mine, divisor)), as, divisor);
    std::vector<std::string> out;
    char buf[256];
    snprintf(buf, sizeof buf,
             "row name=truncation passive_avg=%.4f passive_worst=%.4f active_avg=%.4f "
             "active_worst=%.4f",
             static_cast<double>(tp.avg), static_cast<double>(tp.worst),
             static_cast<double>(ta.avg), static_cast<double>(ta.worst));
    out.emplace_back(buf);
    snprintf(buf, sizeof buf,
             "row name=division passive_avg=%.4f passive_worst=%.4f active_avg=%.4f "
             "active_worst=%.4f",
             static_cast<double>(dp.avg), static_cast<double>(dp.worst),
             static_cast<double>(da.avg), static_cast<double>(da.worst));
    out.emplace_back(buf);
    return out;
  });
  rep.extend(rows);
  add_metrics(rep, g, m);
}

// --------------------------------------------------------------- bench elem

struct AccBits {
  double avg, worst;
};

AccBits acc_bits(const std::vector<u64>& outs, const std::vector<long double>& refs) {
  long double sum = 0, worst = 0;
  for (size_t i = 0; i < outs.size(); ++i) {
    long double rel = fabsl(static_cast<long double>(outs[i]) - refs[i]) / refs[i];
    sum += rel;
    worst = std::max(worst, rel);
  }
  long double tiny = ldexpl(1.0L, -60);
  return {-static_cast<double>(log2l(std::max(sum / static_cast<long double>(outs.size()), tiny))),
          -static_cast<double>(log2l(std::max(worst, tiny)))};
}

void cmd_bench_elem(const GlobalCfg& g, u64 n, int iters, int taylor, Report& rep) {
  Field F(g.prime);
  if (F.k != 61) throw ConfigError("bench elem: the benchmark parameter set needs the 61-bit prime");
  rep.addf("param cmd=bench-elem prime=%llu seed=%llu n=%llu iters=%d taylor=%d role=%s",
           static_cast<unsigned long long>(g.prime), static_cast<unsigned long long>(g.seed),
           static_cast<unsigned long long>(n), iters, taylor, g.role.c_str());

  std::vector<u64> xs;
  for (u64 i = 1; i <= n; ++i) xs.push_back(i);
  std::vector<u64> threes(xs.size(), 3);
  auto in = deal_public(F, g.seed ^ 0xe1e, xs);
  auto ind = deal_public(F, g.seed ^ 0xe1f, threes);

  const RecipParams rp{24, 10, 34, 30, iters};
  const PrivDivParams dp{{4, 0, 40, 30, iters}, 30};
  const RsqrtParams sp{14, 10, 30, 29, iters + 1};
  ExpTable tb = build_exp_table(10, 14, taylor, 27, 4, 0);

  std::vector<long double> r_inv, r_div, r_rsq, r_sq, r_exp;
  for (u64 i : xs) {
    long double v = static_cast<long double>(i);
    r_inv.push_back(ldexpl(1.0L, 44) / v);
    r_div.push_back(v / 3.0L * ldexpl(1.0L, 30));
    r_rsq.push_back(ldexpl(1.0L, 30) / sqrtl(v / 1024.0L));
    r_sq.push_back(ldexpl(1.0L, 30) * sqrtl(v / 1024.0L));
    r_exp.push_back(ldexpl(expl(v / 1024.0L), 38));
  }

  auto [rows, m] = with_session(F, g, [&](PartyCtx& ctx) {
    SecEngine eng(ctx);
    const auto& mine = in[static_cast<size_t>(ctx.id)];
    const auto& mined = ind[static_cast<size_t>(ctx.id)];
    std::vector<std::string> out;
    auto row = [&](const char* name, const std::vector<u64>& shares,
                   const std::vector<long double>& refs) {
      AccBits a = acc_bits(open_rep(ctx, shares), refs);
      char buf[192];
      snprintf(buf, sizeof buf, "row name=%s avg_bits=%.2f worst_bits=%.2f", name, a.avg, a.worst);
      out.emplace_back(buf);
    };
    row("inversion", fp_reciprocal(eng, mine, rp), r_inv);
    row("division-private", fp_div(eng, mine, mined, dp), r_div);
    row("inv-sqrt", fp_rsqrt(eng, mine, sp), r_rsq);
    row("sqrt", fp_sqrt(eng, mine, sp), r_sq);
    row("exponential", fp_exp(eng, mine, tb, 38, 0, 9.8), r_exp);
    return out;
  });
  rep.extend(rows);
  add_metrics(rep, g, m);
}

// -------------------------------------------------------------------- train

struct TrainCfg {
  std::string arch = "3dnn";
  std::string dataset;
  u64 subset = 6000;
  u64 test_subset = 1000;
  u64 batch = 128;
  u64 epochs = 1;
  std::string mode = "passive";  // passive | cleartext-ref
  int eta_log2 = -10;
  u64 init_seed = 8001;
  std::string out_dir;
};

struct LoadedData {
  size_t dim = 0, classes = 0, ntr = 0, nte = 0;
  std::vector<u64> xtr, onehot, xte;
  std::vector<u8> yte;
};

LoadedData load_dataset(const Field& F, const TrainCfg& t) {
  namespace fs = std::filesystem;
  auto need = [&](const char* name) {
    fs::path p = fs::path(t.dataset) / name;
    if (!fs::exists(p)) throw ConfigError("dataset: missing " + p.string());
    return p.string();
  };
  IdxImages tri = read_idx_images(need("train-images-idx3-ubyte"));
  IdxLabels trl = read_idx_labels(need("train-labels-idx1-ubyte"));
  IdxImages tei = read_idx_images(need("t10k-images-idx3-ubyte"));
  IdxLabels tel = read_idx_labels(need("t10k-labels-idx1-ubyte"));
  if (tri.n != trl.n || tei.n != tel.n) throw ConfigError("dataset: image/label counts disagree");

  LoadedData d;
  d.dim = static_cast<size_t>(tri.rows) * tri.cols;
  d.ntr = std::min<size_t>(t.subset ? t.subset : tri.n, tri.n);
  d.nte = std::min<size_t>(t.test_subset ? t.test_subset : tei.n, tei.n);
  u8 maxl = 0;
  for (size_t i = 0; i < d.ntr; ++i) maxl = std::max(maxl, trl.labels[i]);
  for (size_t i = 0; i < d.nte; ++i) maxl = std::max(maxl, tel.labels[i]);
  d.classes = static_cast<size_t>(maxl) + 1;

  d.xtr.resize(d.ntr * d.dim);
  d.onehot.assign(d.ntr * d.classes, F.encode(0));
  for (size_t i = 0; i < d.ntr; ++i) {
    for (size_t j = 0; j < d.dim; ++j)
      d.xtr[i * d.dim + j] =
          F.encode(static_cast<i64>(tri.pixels[i * d.dim + j]) << (kActBits - 8));
    d.onehot[i * d.classes + trl.labels[i]] = F.encode(i64{1} << kProbBits);
  }
  d.xte.resize(d.nte * d.dim);
  d.yte.assign(tel.labels.begin(), tel.labels.begin() + static_cast<long>(d.nte));
  for (size_t i = 0; i < d.nte; ++i)
    for (size_t j = 0; j < d.dim; ++j)
      d.xte[i * d.dim + j] =
          F.encode(static_cast<i64>(tei.pixels[i * d.dim + j]) << (kActBits - 8));
  return d;
}

// One engine-generic pass over the training config: epochs of batches, then
// test accuracy.  Emits the per-batch lines and the result row.
template <class E>
std::vector<std::string> train_run(E& eng, const Field& F, const TrainCfg& t, const LoadedData& d,
                                   const FpVec<E>& xtr, const FpVec<E>& onehot, const FpVec<E>& xte,
                                   Ffnn<E>* net_out) {
  std::vector<size_t> dims{d.dim, 128, 128, d.classes};
  SoftmaxParams sp = make_softmax_params();
  FfnnOpts opts;
  opts.adam.eta_log2 = t.eta_log2;
  Ffnn<E> net = make_ffnn(eng, dims, t.init_seed);
  std::vector<std::string> out;
  size_t step_base = 0;
  for (u64 e = 0; e < t.epochs; ++e) {
    auto ms = ffnn_train_epoch(eng, net, xtr, onehot, d.ntr, t.batch, sp, opts, step_base);
    char buf[160];
    for (const auto& m : ms) {
      snprintf(buf, sizeof buf, "batch step=%zu loss=%.6f acc=%.6f", m.step, m.loss_proxy,
               m.accuracy);
      out.emplace_back(buf);
    }
    step_base += ms.size();
  }
  double acc = ffnn_accuracy(eng, net, xte, d.yte, opts);
  char buf[96];
  snprintf(buf, sizeof buf, "result test_accuracy=%.6f", acc);
  out.emplace_back(buf);
  (void)F;
  if (net_out) *net_out = std::move(net);
  return out;
}

void cmd_train(const GlobalCfg& g, const TrainCfg& t, Report& rep) {
  if (t.arch != "3dnn") throw ConfigError("train: unknown architecture " + t.arch);
  if (t.mode != "passive" && t.mode != "cleartext-ref")
    throw ConfigError("train: mode must be passive or cleartext-ref");
  Field F(g.prime);
  LoadedData d = load_dataset(F, t);
  rep.addf(
      "param cmd=train arch=%s mode=%s prime=%llu seed=%llu init_seed=%llu subset=%zu "
      "test_subset=%zu batch=%llu epochs=%llu eta_log2=%d dim=%zu classes=%zu role=%s",
      t.arch.c_str(), t.mode.c_str(), static_cast<unsigned long long>(g.prime),
      static_cast<unsigned long long>(g.seed), static_cast<unsigned long long>(t.init_seed), d.ntr,
      d.nte, static_cast<unsigned long long>(t.batch), static_cast<unsigned long long>(t.epochs),
      t.eta_log2, d.dim, d.classes, t.mode == "cleartext-ref" ? "oracle" : g.role.c_str());

  if (t.mode == "cleartext-ref") {
    ClearEngine eng(F);
    rep.extend(train_run(eng, F, t, d, d.xtr, d.onehot, d.xte, nullptr));
    return;
  }

  auto xs = deal_public(F, g.seed ^ 0x7a1, d.xtr);
  auto os = deal_public(F, g.seed ^ 0x7a2, d.onehot);
  auto ts = deal_public(F, g.seed ^ 0x7a3, d.xte);
  auto [rows, m] = with_session(F, g, [&](PartyCtx& ctx) {
    SecEngine eng(ctx);
    size_t p = static_cast<size_t>(ctx.id);
    Ffnn<SecEngine> net;
    auto out = train_run(eng, F, t, d, xs[p], os[p], ts[p], &net);
    if (!t.out_dir.empty()) {
      std::filesystem::create_directories(t.out_dir);
      for (size_t l = 0; l < net.wt.size(); ++l) {
        ShareFile sf;
        sf.prime = F.p;
        sf.kind = ShareKind::FieldRep;
        sf.elems = net.wt[l];
        write_share_file(t.out_dir + "/model.l" + std::to_string(l) + ".p" + std::to_string(p) +
                             ".shares",
                         sf);
      }
    }
    return out;
  });
  rep.extend(rows);
  add_metrics(rep, g, m);
  if (!t.out_dir.empty()) rep.addf("result model_dir=%s layers=3", t.out_dir.c_str());
}

// -------------------------------------------------------------- verify dist

bool cmd_verify_dist(const GlobalCfg& g, u64 p, const std::vector<u64>& divisors,
                     const std::string& a_grid, bool full, Report& rep) {
  if (p > (u64{1} << 13) - 1) throw ConfigError("verify dist: enumeration needs p <= 2^13-1");
  Field F(p);
  rep.addf("param cmd=verify-dist prime=%llu", static_cast<unsigned long long>(p));
  std::vector<u64> as;
  if (a_grid == "even") {
    for (u64 a = 0; a < p; a += 2) as.push_back(a);
  } else {
    std::stringstream ss(a_grid);
    std::string tok;
    while (std::getline(ss, tok, ',')) as.push_back(std::stoull(tok));
  }
  u64 mismatches = 0;
  for (u64 d : divisors) {
    if (d == 0) throw ConfigError("verify dist: divisor must be nonzero");
    u64 local = 0;
    for (u64 a : as) {
      if (a >= p) throw ConfigError("verify dist: dividend outside the field");
      auto emp = oracle::enumerate_add(F, d, a);
      auto pred = oracle::closed_form_add(F, d, a);
      bool ok = emp == pred && emp.n0 + emp.n1 + emp.n2 == p;
      if (p % d == d - 1) ok = ok && emp.n2 == 0 && emp.n0 == oracle::exact_output_count(F, d, a);
      if (!ok || full)
        rep.addf("dist d=%llu a=%llu n0=%llu n1=%llu n2=%llu pred0=%llu pred1=%llu pred2=%llu "
                 "match=%s",
                 static_cast<unsigned long long>(d), static_cast<unsigned long long>(a),
                 static_cast<unsigned long long>(emp.n0), static_cast<unsigned long long>(emp.n1),
                 static_cast<unsigned long long>(emp.n2), static_cast<unsigned long long>(pred.n0),
                 static_cast<unsigned long long>(pred.n1), static_cast<unsigned long long>(pred.n2),
                 ok ? "yes" : "NO");
      local += ok ? 0 : 1;
    }
    rep.addf("row divisor=%llu cases=%zu mismatches=%llu", static_cast<unsigned long long>(d),
             as.size(), static_cast<unsigned long long>(local));
    mismatches += local;
  }
  rep.addf("result mismatches=%llu", static_cast<unsigned long long>(mismatches));
  return mismatches == 0;
}

// ------------------------------------------------------------------- ingest

void cmd_ingest(const GlobalCfg& g, const std::string& dir, const std::string& out, u64 count,
                Report& rep) {
  namespace fs = std::filesystem;
  Field F(g.prime);
  fs::path ip = fs::path(dir) / "train-images-idx3-ubyte";
  fs::path lp = fs::path(dir) / "train-labels-idx1-ubyte";
  if (!fs::exists(ip) || !fs::exists(lp))
    throw ConfigError("ingest: no IDX pair under " + dir);
  IdxImages im = read_idx_images(ip.string());
  IdxLabels lb = read_idx_labels(lp.string());
  if (im.n != lb.n) throw ConfigError("ingest: image/label counts disagree");
  size_t n = std::min<size_t>(count ? count : im.n, im.n);
  size_t dim = static_cast<size_t>(im.rows) * im.cols;
  u8 maxl = 0;
  for (size_t i = 0; i < n; ++i) maxl = std::max(maxl, lb.labels[i]);
  size_t classes = static_cast<size_t>(maxl) + 1;

  std::vector<u64> px(n * dim), oh(n * classes, F.encode(0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < dim; ++j)
      px[i * dim + j] = F.encode(static_cast<i64>(im.pixels[i * dim + j]) << (kActBits - 8));
    oh[i * classes + lb.labels[i]] = F.encode(i64{1} << kProbBits);
  }
  auto pxs = deal_public(F, g.seed ^ 0x16e5, px);
  auto ohs = deal_public(F, g.seed ^ 0x16e6, oh);

  fs::create_directories(out);
  for (int p = 0; p < 3; ++p) {
    ShareFile si{F.p, ShareKind::FieldRep, pxs[static_cast<size_t>(p)], {}};
    ShareFile sl{F.p, ShareKind::FieldRep, ohs[static_cast<size_t>(p)], {}};
    write_share_file(out + "/images.p" + std::to_string(p) + ".shares", si);
    write_share_file(out + "/labels.p" + std::to_string(p) + ".shares", sl);
  }
  std::ofstream mf(out + "/ingest.manifest");
  mf << "count=" << n << " rows=" << im.rows << " cols=" << im.cols << " classes=" << classes
     << " act_bits=" << kActBits << " prob_bits=" << kProbBits << " prime=" << F.p
     << " seed=" << g.seed << '\n';
  rep.addf("param cmd=ingest prime=%llu seed=%llu count=%zu rows=%u cols=%u classes=%zu",
           static_cast<unsigned long long>(g.prime), static_cast<unsigned long long>(g.seed), n,
           im.rows, im.cols, classes);
  rep.addf("result dir=%s files=7", out.c_str());
}

// --------------------------------------------------------------- synth-data

void cmd_synth(const std::string& out, u64 train_n, u64 test_n, u64 seed, u64 classes,
               Report& rep) {
  namespace fs = std::filesystem;
  Dataset all = synth_digits(seed, static_cast<u32>(train_n + test_n), static_cast<u32>(classes));
  size_t dim = static_cast<size_t>(all.images.rows) * all.images.cols;
  auto slice = [&](size_t from, size_t cnt) {
    Dataset ds;
    ds.images.n = static_cast<u32>(cnt);
    ds.images.rows = all.images.rows;
    ds.images.cols = all.images.cols;
    ds.images.pixels.assign(all.images.pixels.begin() + static_cast<long>(from * dim),
                            all.images.pixels.begin() + static_cast<long>((from + cnt) * dim));
    ds.labels.n = static_cast<u32>(cnt);
    ds.labels.labels.assign(all.labels.labels.begin() + static_cast<long>(from),
                            all.labels.labels.begin() + static_cast<long>(from + cnt));
    return ds;
  };
  fs::create_directories(out);
  Dataset tr = slice(0, train_n), te = slice(train_n, test_n);
  write_idx_images(out + "/train-images-idx3-ubyte", tr.images);
  write_idx_labels(out + "/train-labels-idx1-ubyte", tr.labels);
  write_idx_images(out + "/t10k-images-idx3-ubyte", te.images);
  write_idx_labels(out + "/t10k-labels-idx1-ubyte", te.labels);
  rep.addf("param cmd=synth-data seed=%llu train=%llu test=%llu classes=%llu",
           static_cast<unsigned long long>(seed), static_cast<unsigned long long>(train_n),
           static_cast<unsigned long long>(test_n), static_cast<unsigned long long>(classes));
  rep.addf("result dir=%s files=4", out.c_str());
}

}  // namespace
}  // namespace tmpc

int main(int argc, char** argv) {
  using namespace tmpc;
  CLI::App app{"three-party replicated-sharing MPC: benchmarks, training, verification"};
  app.require_subcommand(1);

  GlobalCfg g;
  app.add_option("--prime", g.prime, "field modulus, a Mersenne prime")
      ->envname("TMPC_PRIME")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "master seed for shares and PRGs")
      ->envname("TMPC_SEED")
      ->capture_default_str();
  app.add_option("--role", g.role, "local, oracle, or party id 0..2")
      ->envname("TMPC_ROLE")
      ->capture_default_str();
  app.add_option("--hosts", g.hosts, "comma-separated party hosts (TCP roles)")
      ->envname("TMPC_HOSTS")
      ->capture_default_str();
  app.add_option("--base-port", g.base_port, "first TCP port of the pairwise mesh")
      ->envname("TMPC_BASE_PORT")
      ->capture_default_str();
  app.add_option("--report", g.report, "report file (default: stdout)")
      ->envname("TMPC_REPORT");

  // bench div / bench elem
  auto* bench = app.add_subcommand("bench", "accuracy/communication benchmarks");
  u64 bd_n = 10000, bd_div = 3;
  int bd_offset = 10;
  auto* bdiv = bench->add_subcommand("div", "division and truncation error rows");
  bdiv->add_option("--n", bd_n, "inputs 1..n")->envname("TMPC_BENCH_N")->capture_default_str();
  bdiv->add_option("--offset", bd_offset, "truncation offset bits")
      ->envname("TMPC_BENCH_OFFSET")
      ->capture_default_str();
  bdiv->add_option("--divisor", bd_div, "public divisor for the division row")
      ->envname("TMPC_BENCH_DIVISOR")
      ->capture_default_str();
  u64 be_n = 10000;
  int be_iters = 5, be_taylor = 4;
  auto* belem = bench->add_subcommand("elem", "elementary-function accuracy rows");
  belem->add_option("--n", be_n, "inputs 1..n")->envname("TMPC_BENCH_N")->capture_default_str();
  belem->add_option("--iters", be_iters, "Newton iterations")
      ->envname("TMPC_ITERS")
      ->capture_default_str();
  belem->add_option("--taylor", be_taylor, "Taylor terms for the exponential")
      ->envname("TMPC_TAYLOR")
      ->capture_default_str();

  // train
  TrainCfg t;
  auto* train = app.add_subcommand("train", "feedforward training demonstrator");
  train->add_option("--arch", t.arch, "network architecture")->capture_default_str();
  train->add_option("--dataset", t.dataset, "directory with IDX files")
      ->envname("TMPC_DATASET")
      ->required();
  train->add_option("--subset", t.subset, "training samples (0 = all)")->capture_default_str();
  train->add_option("--test-subset", t.test_subset, "test samples (0 = all)")
      ->capture_default_str();
  train->add_option("--batch", t.batch, "batch size (power of two)")->capture_default_str();
  train->add_option("--epochs", t.epochs, "training epochs")->capture_default_str();
  train->add_option("--mode", t.mode, "passive | cleartext-ref")->capture_default_str();
  train->add_option("--eta-log2", t.eta_log2, "log2 of the Adam learning rate")
      ->capture_default_str();
  train->add_option("--init-seed", t.init_seed, "weight initialization seed")
      ->capture_default_str();
  train->add_option("--out", t.out_dir, "directory for per-party model share files");

  // verify dist
  u64 vd_p = 31;
  std::string vd_divs = "2,3,4,8", vd_grid = "even";
  bool vd_full = false;
  auto* verify = app.add_subcommand("verify", "oracle cross-checks");
  auto* vdist = verify->add_subcommand("dist", "division output distribution vs closed form");
  vdist->add_option("--p", vd_p, "small Mersenne prime to enumerate")->capture_default_str();
  vdist->add_option("--d", vd_divs, "comma-separated divisors")->capture_default_str();
  vdist->add_option("--a-grid", vd_grid, "'even' or comma-separated dividends")
      ->capture_default_str();
  vdist->add_flag("--full", vd_full, "emit every (d,a) row, not just mismatches");

  // ingest
  std::string ig_dir, ig_out = "ingested";
  u64 ig_count = 0;
  auto* ingest = app.add_subcommand("ingest", "reshare an IDX dataset into per-party files");
  ingest->add_option("--dataset", ig_dir, "directory with IDX files")->required();
  ingest->add_option("--out", ig_out, "output directory")->capture_default_str();
  ingest->add_option("--count", ig_count, "images to ingest (0 = all)")->capture_default_str();

  // synth-data
  std::string sy_out = "data";
  u64 sy_train = 7000, sy_test = 1000, sy_seed = 55001, sy_classes = 10;
  auto* synth = app.add_subcommand("synth-data", "write a seeded synthetic IDX dataset");
  synth->add_option("--out", sy_out, "output directory")->capture_default_str();
  synth->add_option("--train", sy_train, "training images")->capture_default_str();
  synth->add_option("--test", sy_test, "test images")->capture_default_str();
  synth->add_option("--data-seed", sy_seed, "generator seed")->capture_default_str();
  synth->add_option("--classes", sy_classes, "label classes")->capture_default_str();

  // run-party: explicit TCP party runner for a selected job.
  int rp_id = 0;
  std::string rp_job = "div";
  auto* rparty = app.add_subcommand("run-party", "run one TCP party of a benchmark/training job");
  rparty->add_option("--id", rp_id, "party id 0..2")->required();
  rparty->add_option("--job", rp_job, "div | elem | train")->capture_default_str();
  rparty->add_option("--n", bd_n, "inputs 1..n")->capture_default_str();
  rparty->add_option("--offset", bd_offset, "truncation offset bits")->capture_default_str();
  rparty->add_option("--divisor", bd_div, "public divisor")->capture_default_str();
  rparty->add_option("--dataset", t.dataset, "directory with IDX files (train job)");
  rparty->add_option("--subset", t.subset, "training samples")->capture_default_str();
  rparty->add_option("--test-subset", t.test_subset, "test samples")->capture_default_str();
  rparty->add_option("--batch", t.batch, "batch size")->capture_default_str();
  rparty->add_option("--epochs", t.epochs, "training epochs")->capture_default_str();
  rparty->add_option("--out", t.out_dir, "model share output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "config: %s\n", e.what());
    return 2;
  }

  Report rep;
  try {
    if (bdiv->parsed()) {
      cmd_bench_div(g, bd_n, bd_offset, bd_div, rep);
    } else if (belem->parsed()) {
      cmd_bench_elem(g, be_n, be_iters, be_taylor, rep);
    } else if (train->parsed()) {
      cmd_train(g, t, rep);
    } else if (vdist->parsed()) {
      std::vector<u64> divisors;
      std::stringstream ss(vd_divs);
      std::string tok;
      while (std::getline(ss, tok, ',')) divisors.push_back(std::stoull(tok));
      bool ok = cmd_verify_dist(g, vd_p, divisors, vd_grid, vd_full, rep);
      rep.write(g.report);
      if (!ok) {
        std::fprintf(stderr, "verify: distribution mismatch\n");
        return 4;
      }
      return 0;
    } else if (ingest->parsed()) {
      cmd_ingest(g, ig_dir, ig_out, ig_count, rep);
    } else if (synth->parsed()) {
      cmd_synth(sy_out, sy_train, sy_test, sy_seed, sy_classes, rep);
    } else if (rparty->parsed()) {
      g.role = std::to_string(rp_id);
      if (rp_job == "div") {
        cmd_bench_div(g, bd_n, bd_offset, bd_div, rep);
      } else if (rp_job == "elem") {
        cmd_bench_elem(g, be_n, be_iters, be_taylor, rep);
      } else if (rp_job == "train") {
        cmd_train(g, t, rep);
      } else {
        throw ConfigError("run-party: job must be div, elem, or train");
      }
    } else if (bench->parsed()) {
      throw ConfigError("bench: pick a benchmark (div or elem)");
    } else if (verify->parsed()) {
      throw ConfigError("verify: pick a check (dist)");
    }
    rep.write(g.report);
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config: %s\n", e.what());
    return 2;
  } catch (const VerificationError& e) {
    std::fprintf(stderr, "verify: %s\n", e.what());
    return 4;
  } catch (const ProtocolAbort& e) {
    std::fprintf(stderr, "abort: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
