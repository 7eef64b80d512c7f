#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tanaka/verify.hpp"

using namespace tanaka;

namespace {

enum Exit { kPass = 0, kFail = 1, kIndeterminate = 2, kUsage = 3 };

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Common {
  std::string format = "text";
  std::string out;
  std::uint64_t seed = 0;
  bool timings = false;
  bool json() const { return format == "json"; }
};

struct Params {
  std::string family;
  std::optional<int> n, k;
  std::optional<int> max_level;
  std::string in;
  std::string point;
  std::string recognize;
  int prolong = 0;
  std::string action;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"text", "json"}));
  sub->add_option("--out", c.out, "output path (relative paths honour TANAKA_OUT_DIR)");
  sub->add_option("--seed", c.seed, "seed for generic points");
  sub->add_flag("--timings", c.timings, "record wall time per check");
}

void add_nk(CLI::App* sub, Params& p) {
  sub->add_option("--n", p.n, "parameter n");
  sub->add_option("--k", p.k, "shift k");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::path p(c.out);
  if (const char* dir = std::getenv("TANAKA_OUT_DIR"); dir && *dir && p.is_relative()) p = std::filesystem::path(dir) / p;
  std::ofstream f(p, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + p.string() + "'");
  f << text;
}

int need(const std::optional<int>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing ") + flag);
  return *v;
}

int need_n(const Params& p, int min_n = 5) {
  int n = need(p.n, "--n");
  if (n < min_n) throw UsageError("--n must be at least " + std::to_string(min_n));
  return n;
}

int need_k(const Params& p, int n, int max_k) {
  int k = p.k.value_or(0);
  if (k < 0 || k > max_k)
    throw UsageError("need 0 <= k <= " + std::to_string(max_k) + " for n=" + std::to_string(n) + " (got k=" +
                     std::to_string(k) + ")");
  return k;
}

int skn_max_k(int n) { return n == 5 ? 1 : n - 4; }

std::string join_levels(const std::map<int, std::size_t>& m) {
  std::string s;
  for (const auto& [w, d] : m) s += (s.empty() ? "" : " ") + std::to_string(w) + ":" + std::to_string(d);
  return s;
}

std::string tuple(const std::vector<std::size_t>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

std::string point_text(const std::vector<std::string>& coords, const std::vector<Rational>& q) {
  std::string s;
  for (std::size_t i = 0; i < q.size(); ++i) s += (i ? "," : "") + coords[i] + "=" + q[i].str();
  return s;
}

Json point_json(const std::vector<std::string>& coords, const std::vector<Rational>& q) {
  Json j = Json::object();
  for (std::size_t i = 0; i < q.size(); ++i) j[coords[i]] = q[i].str();
  return j;
}

/// "x=1/2,y=0"; unnamed coordinates are 0.
std::vector<Rational> parse_point(const std::string& spec, const std::vector<std::string>& coords) {
  std::vector<Rational> q(coords.size());
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--point entries look like name=p/q, got '" + item + "'");
    std::string name = item.substr(0, eq);
    auto it = std::find(coords.begin(), coords.end(), name);
    if (it == coords.end()) throw UsageError("--point names unknown coordinate '" + name + "'");
    try {
      q[it - coords.begin()] = Rational::parse(item.substr(eq + 1));
    } catch (const Error& e) {
      throw UsageError(std::string("--point: ") + e.what());
    }
  }
  return q;
}

// ---------------------------------------------------------------------------
// prolong

int cmd_prolong(const Common& c, const Params& p) {
  SymbolAlgebra m;
  std::string what;
  if (!p.in.empty()) {
    m = SymbolAlgebra(negative_part(load_algebra(read_file(p.in))));
    what = p.in;
  } else if (p.family == "skn") {
    int n = need_n(p);
    int k = need_k(p, n, skn_max_k(n));
    m = build_skn(k, n);
    what = "s^{" + std::to_string(k) + "," + std::to_string(n) + "}";
  } else if (p.family == "symp") {
    int n = need_n(p);
    m = symp_symbol(n);
    what = "Symp symbol, n=" + std::to_string(n);
  } else {
    throw UsageError("prolong needs --family skn|symp or --in FILE");
  }
  if (p.max_level && *p.max_level < 0) throw UsageError("--max-level must be non-negative");
  auto r = tanaka_prolong(m, p.max_level);
  if (c.json()) {
    emit(c, dump_canonical(prolongation_to_json(r)));
  } else {
    std::ostringstream os;
    os << "prolongation of " << what << "\n"
       << "levels " << join_levels(r.level_dims) << "\n"
       << "total dim " << r.full.dim() << "\n"
       << "terminated " << (r.terminated ? "yes" : "no (level cap reached)") << "\n";
    emit(c, os.str());
  }
  return r.terminated ? kPass : kIndeterminate;
}

// ---------------------------------------------------------------------------
// normcheck

int cmd_normcheck(const Common& c, const Params& p) {
  GradedLieAlgebra g;
  std::optional<int> n;
  std::optional<NonexistenceCertificate> cert;
  std::string what;
  if (!p.in.empty()) {
    g = load_algebra(read_file(p.in));
    what = p.in;
  } else if (p.family == "skn") {
    n = need_n(p, 6);
    int k = need_k(p, *n, *n - 4);
    g = tanaka_prolong(build_skn(k, *n)).full;
    if (k <= *n - 5) cert = nonexistence_witness(k, *n);
    what = "g(s^{" + std::to_string(k) + "," + std::to_string(*n) + "})";
  } else if (p.family == "symp") {
    n = need_n(p, 6);
    g = grade(build_gl2_semidirect_heis(*n), GradingScheme::symp);
    what = "gl2 x| heis_" + std::to_string(2 * *n - 5) + " with the Symp grading";
  } else {
    throw UsageError("normcheck needs --family skn|symp or --in FILE");
  }
  NormOptions opt;
  if (n) opt.hint = standard_morimoto_data_for(g, *n);
  auto d = normalization_exists(g, opt);
  if (c.json()) {
    Json j = decision_to_json(d, g);
    if (cert) j["certificate"] = certificate_to_json(*cert);
    emit(c, dump_canonical(j));
  } else {
    std::ostringstream os;
    os << "normalization condition for " << what << "\n"
       << "status " << to_string(d.status) << " (exists=" << (d.exists ? "true" : "false") << ", method " << d.method
       << ")\n"
       << "dim C^1_+ " << d.dim_c1 << ", dim C^2_+ " << d.dim_c2 << ", dim im d " << d.dim_image << "\n";
    if (d.status == NormStatus::exists) os << "invariant complement dim " << d.complement.size() << "\n";
    if (d.obstruction) {
      const auto& o = *d.obstruction;
      os << "obstruction block";
      for (const auto& [name, v] : o.block) os << " " << name << "=" << v.str();
      os << "\n  generator " << o.generator.format(g) << "\n  word";
      for (const auto& l : o.chain) os << " ad(" << l << ")";
      os << "\n  result " << o.result.format(g) << "\n  = d(" << o.preimage.format(g) << ")\n";
    }
    if (cert) {
      GradedLieAlgebra gk = grade(build_gl2_semidirect_heis(cert->n), GradingScheme::skn, cert->k);
      os << "certificate\n"
         << "  (a) top ad(H) eigenvalue " << cert->lambda.str() << " on " << cert->eigen_cochain.format(gk) << "\n"
         << "  (b) closed " << (cert->eigen_cochain_closed ? "yes" : "no") << "\n"
         << "  (c) start " << cert->start.format(gk) << ", weight " << cert->start_weight << ", block im d dim "
         << cert->start_block_image_dim << "\n";
      for (std::size_t i = 0; i < cert->chain.size(); ++i)
        os << "  (d" << i + 1 << ") " << cert->chain[i].format(gk) << "\n";
      os << "  result = d(" << cert->preimage.format(gk) << ")\n";
    }
    if (!d.note.empty()) os << "note " << d.note << "\n";
    emit(c, os.str());
  }
  return d.status == NormStatus::undecided ? kIndeterminate : kPass;
}

// ---------------------------------------------------------------------------
// vf

PolyFrame frame_for(const Params& p) {
  if (!p.in.empty()) return load_frame(read_file(p.in));
  if (p.family == "monge1" || p.family == "monge2") return monge_frame(need_n(p, 6), p.family == "monge1" ? 1 : 2);
  if (p.family == "flat-skn") {
    int n = need_n(p);
    return flat_model_frame(build_skn(need_k(p, n, skn_max_k(n)), n));
  }
  throw UsageError("vf needs --family monge1|monge2|flat-skn or --in FILE");
}

/// Given point, or the first seeded point where the flag is equiregular.
std::optional<std::vector<Rational>> choose_point(const PolyFrame& f, const Params& p, const Common& c,
                                                  std::string* why) {
  if (!p.point.empty()) return parse_point(p.point, f.coords);
  PointSampler ps(c.seed);
  for (int t = 0; t < resample_limit; ++t) {
    auto q = ps.point(f.dim());
    try {
      auto rep = weak_derived_flag(f, q);
      if (equiregular_at(f, q, rep, c.seed)) return q;
      *why = "flag not equiregular at sampled points";
    } catch (const Error& e) {
      *why = e.what();
    }
  }
  return std::nullopt;
}

int cmd_vf(const Common& c, const Params& p) {
  PolyFrame base = frame_for(p);
  if (p.prolong < 0) throw UsageError("--prolong must be non-negative");
  std::optional<ChartTower> tower;
  if (p.prolong > 0) tower = iterate_prolong(base, p.prolong);
  const PolyFrame& f = tower ? tower->top() : base;
  std::optional<std::pair<int, int>> rec;
  if (!p.recognize.empty()) {
    int rk = 0, rn = 0;
    char comma = 0;
    std::istringstream is(p.recognize);
    if (!(is >> rk >> comma >> rn) || comma != ',' || !is.eof()) throw UsageError("--recognize expects k,n");
    if (rn < 5 || rk < 0 || rk > skn_max_k(rn)) throw UsageError("--recognize: (k,n) out of range");
    rec = {{rk, rn}};
  }

  if (p.action == "involutivity") {
    if (!tower) throw UsageError("involutivity needs --prolong of at least 1");
    std::vector<std::vector<Rational>> points;
    if (!p.point.empty()) points.push_back(parse_point(p.point, f.coords));
    PointSampler ps(c.seed);
    std::vector<InvolutivityReport> reps;
    std::string last;
    for (int t = 0; reps.size() < (p.point.empty() ? 3u : 1u) && t < 3 * resample_limit; ++t) {
      auto q = p.point.empty() ? ps.point(f.dim()) : points[0];
      try {
        reps.push_back(check_involutivity_flags(*tower, q, c.seed));
      } catch (const Error& e) {
        last = e.what();
        if (!p.point.empty()) break;
      }
    }
    bool ok = !reps.empty();
    for (const auto& r : reps) ok = ok && r.ok();
    auto checks_json = [](const std::vector<InclusionCheck>& v) {
      Json a = Json::array();
      for (const auto& i : v)
        a.push_back({{"v_dim", i.v_dim}, {"j_level", i.j_level}, {"vv", i.vv}, {"vj", i.vj}, {"witness", i.witness}});
      return a;
    };
    if (c.json()) {
      Json pts = Json::array();
      for (const auto& r : reps)
        pts.push_back({{"point", point_json(f.coords, r.point)},
                       {"paired", checks_json(r.paired)},
                       {"indexed", checks_json(r.indexed)},
                       {"ok", r.ok()}});
      Json j = {{"points", pts}, {"ok", ok}, {"tower", tower_to_json(*tower)}};
      if (reps.empty()) j["error"] = last;
      emit(c, dump_canonical(j));
    } else {
      std::ostringstream os;
      for (const auto& r : reps) {
        os << "point " << point_text(f.coords, r.point) << "\n";
        for (const auto& i : r.paired)
          os << "  V dim " << i.v_dim << ", J level " << i.j_level << ": [V,V] in V " << (i.vv ? "yes" : "no")
             << ", [V,J] in J " << (i.vj ? "yes" : "no") << (i.witness.empty() ? "" : " (" + i.witness + ")") << "\n";
        for (const auto& i : r.indexed)
          if (!i.vv || !i.vj) os << "  note: V dim " << i.v_dim << " against J level " << i.j_level << " fails\n";
      }
      if (reps.empty()) os << "no usable point: " << last << "\n";
      os << "involutivity " << (ok ? "pass" : reps.empty() ? "indeterminate" : "fail") << "\n";
      emit(c, os.str());
    }
    return reps.empty() ? kIndeterminate : ok ? kPass : kFail;
  }

  std::string why;
  auto q = choose_point(f, p, c, &why);
  if (!q) {
    std::cerr << "no generic point found after " << resample_limit << " samples: " << why << "\n";
    return kIndeterminate;
  }

  if (p.action == "growth") {
    auto rep = weak_derived_flag(f, *q);
    bool eq = equiregular_at(f, *q, rep, c.seed);
    if (c.json()) {
      Json words = Json::array();
      for (const auto& w : rep.words) words.push_back(word_label(w));
      emit(c, dump_canonical({{"point", point_json(f.coords, *q)},
                              {"growth", rep.dims},
                              {"words", words},
                              {"equiregular", eq},
                              {"bracket_generating", rep.dims.back() == f.dim()}}));
    } else {
      emit(c, "point " + point_text(f.coords, *q) + "\ngrowth " + tuple(rep.dims) + "\nequiregular " +
                  (eq ? "yes" : "no") + "\n");
    }
    return kPass;
  }

  // symbol
  SymbolAlgebra s;
  FlagReport rep;
  try {
    s = tanaka_symbol_at(f, *q, c.seed, &rep);
  } catch (const Error& e) {
    std::cerr << "symbol undefined at " << point_text(f.coords, *q) << ": " << e.what() << "\n";
    return kIndeterminate;
  }
  std::optional<RecognizeResult> rr;
  if (rec) rr = recognize_skn(s, rec->first, rec->second);
  if (c.json()) {
    Json j = {{"point", point_json(f.coords, *q)}, {"growth", rep.dims}, {"symbol", algebra_to_json(s.alg())}};
    if (rr) {
      j["recognized"] = to_string(rr->status);
      j["target"] = {{"k", rec->first}, {"n", rec->second}};
      if (!rr->failure.empty()) j["failure"] = rr->failure;
    }
    emit(c, dump_canonical(j));
  } else {
    std::ostringstream os;
    os << "point " << point_text(f.coords, *q) << "\ngrowth " << tuple(rep.dims) << "\nsymbol levels "
       << join_levels(s.alg().weight_dims()) << "\n";
    for (const auto& [key, v] : s.alg().structure_constants())
      os << "  [" << s.alg().label(key.first) << "," << s.alg().label(key.second) << "] = " << s.alg().format(v) << "\n";
    if (rr) {
      os << "recognized as s^{" << rec->first << "," << rec->second << "}: " << to_string(rr->status) << "\n";
      if (!rr->failure.empty()) os << "  " << rr->failure << "\n";
    }
    emit(c, os.str());
  }
  if (!rr) return kPass;
  return rr->status == Recognition::yes ? kPass : rr->status == Recognition::no ? kFail : kIndeterminate;
}

// ---------------------------------------------------------------------------
// family

int cmd_family(const Common& c, const Params& p) {
  std::optional<GradedLieAlgebra> g;
  std::optional<PolyFrame> f;
  const std::string& fam = p.family;
  if (fam == "heis") g = build_heisenberg(need_n(p));
  else if (fam == "gl2_heis") {
    int n = need_n(p);
    g = p.k ? grade(build_gl2_semidirect_heis(n), GradingScheme::skn, need_k(p, n, n - 4))
            : build_gl2_semidirect_heis(n);
  } else if (fam == "skn") {
    int n = need_n(p);
    g = build_skn(need_k(p, n, skn_max_k(n)), n).alg();
  } else if (fam == "symp_symbol") g = symp_symbol(need_n(p)).alg();
  else if (fam == "monge1" || fam == "monge2") f = monge_frame(need_n(p, 6), fam == "monge1" ? 1 : 2);
  else if (fam == "flat") {
    int n = need_n(p);
    f = flat_model_frame(build_skn(need_k(p, n, skn_max_k(n)), n));
  } else {
    throw UsageError("--family must be one of heis, gl2_heis, skn, symp_symbol, monge1, monge2, flat");
  }
  if (p.prolong > 0) {
    if (!f) throw UsageError("--prolong applies to frame families");
    emit(c, dump_canonical(tower_to_json(iterate_prolong(*f, p.prolong))));
    return kPass;
  }
  if (c.json()) {
    emit(c, g ? dump_algebra(*g) : dump_frame(*f));
  } else {
    std::ostringstream os;
    if (g) {
      for (Index i = 0; i < g->dim(); ++i) os << g->label(i) << " weight " << g->weight(i) << "\n";
      for (const auto& [key, v] : g->structure_constants())
        os << "[" << g->label(key.first) << "," << g->label(key.second) << "] = " << g->format(v) << "\n";
    } else {
      os << "coords";
      for (const auto& x : f->coords) os << " " << x;
      os << "\n";
      for (std::size_t i = 0; i < f->fields.size(); ++i) os << "X" << i + 1 << " = " << f->fields[i].format() << "\n";
    }
    emit(c, os.str());
  }
  return kPass;
}

// ---------------------------------------------------------------------------
// verify-paper

int cmd_verify(const Common& c, const Params& p) {
  int n = need(p.n, "--n");
  if (n < verify_min_n || n > verify_max_n)
    throw UsageError("range error: verify-paper needs " + std::to_string(verify_min_n) + " <= n <= " +
                     std::to_string(verify_max_n) + " (got " + std::to_string(n) + ")");
  auto rep = verify_suite({n, c.seed, c.timings});
  emit(c, c.json() ? dump_canonical(report_to_json(rep)) : report_to_text(rep));
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tanaka prolongations, normalization conditions and rank-2 distributions"};
  app.require_subcommand(1);
  Common common;
  Params p;

  auto* prolong = app.add_subcommand("prolong", "universal Tanaka prolongation of a symbol");
  add_common(prolong, common);
  add_nk(prolong, p);
  prolong->add_option("--family", p.family, "skn | symp")->check(CLI::IsMember({"skn", "symp"}));
  prolong->add_option("--in", p.in, "algebra file (its negative part is used)");
  prolong->add_option("--max-level", p.max_level, "level cap");

  auto* normcheck = app.add_subcommand("normcheck", "decide existence of a linear invariant normalization condition");
  add_common(normcheck, common);
  add_nk(normcheck, p);
  normcheck->add_option("--family", p.family, "skn | symp")->check(CLI::IsMember({"skn", "symp"}));
  normcheck->add_option("--in", p.in, "graded algebra file");

  auto* vf = app.add_subcommand("vf", "growth vector, symbol or involutivity of a rank-2 frame");
  add_common(vf, common);
  add_nk(vf, p);
  vf->add_option("action", p.action, "growth | symbol | involutivity")
      ->required()
      ->check(CLI::IsMember({"growth", "symbol", "involutivity"}));
  vf->add_option("--family", p.family, "monge1 | monge2 | flat-skn")
      ->check(CLI::IsMember({"monge1", "monge2", "flat-skn"}));
  vf->add_option("--in", p.in, "frame file");
  vf->add_option("--prolong", p.prolong, "number of Cartan prolongations");
  vf->add_option("--point", p.point, "point as name=p/q,...; unnamed coordinates are 0");
  vf->add_option("--recognize", p.recognize, "k,n: test the symbol against s^{k,n}");

  auto* family = app.add_subcommand("family", "emit a catalog algebra or frame");
  add_common(family, common);
  add_nk(family, p);
  family->add_option("--family", p.family, "heis | gl2_heis | skn | symp_symbol | monge1 | monge2 | flat")->required();
  family->add_option("--prolong", p.prolong, "emit the chart tower of this many prolongations (frames only)");

  auto* verify = app.add_subcommand("verify-paper", "run the theorem suite for one n");
  add_common(verify, common);
  verify->add_option("--n", p.n, "5 <= n <= 8")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*prolong) return cmd_prolong(common, p);
    if (*normcheck) return cmd_normcheck(common, p);
    if (*vf) return cmd_vf(common, p);
    if (*family) return cmd_family(common, p);
    return cmd_verify(common, p);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
}
