#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tanaka/cohomo.hpp"
#include "tanaka/normcond.hpp"
#include "tanaka/prolong.hpp"
#include "tanaka/vf.hpp"

namespace tanaka {

using Json = nlohmann::json;

/// Malformed input. Syntax errors carry a 1-based line/column and a byte
/// offset; schema errors carry the JSON path of the offending value.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column, std::size_t offset)
      : Error("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + " (offset " +
              std::to_string(offset) + "): " + what),
        line(line), column(column), offset(offset) {}
  ParseError(const std::string& path, const std::string& what)
      : Error("parse error at " + (path.empty() ? std::string("top level") : path) + ": " + what), path(path) {}

  std::size_t line = 0, column = 0, offset = 0;
  std::string path;
};

/// Canonical text: sorted keys, two-space indent, trailing newline.
inline std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // e.byte is one past the offending character
    std::size_t off = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < off; ++i) {
      if (text[i] == '\n') { ++line; col = 1; }
      else ++col;
    }
    std::string msg = e.what();
    auto colon = msg.rfind(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ParseError(msg, line, col, off);
  }
}

namespace detail {

inline const Json& member(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path, std::string("missing key \"") + key + "\"");
  return *it;
}

inline void only_keys(const Json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  for (const auto& [k, _] : obj.items())
    if (std::none_of(keys.begin(), keys.end(), [&](const char* s) { return k == s; }))
      throw ParseError(path, "unexpected key \"" + k + "\"");
}

inline const Json& array_at(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  return j;
}

inline long integer_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  return j.get<long>();
}

inline std::size_t index_at(const Json& j, std::size_t bound, const std::string& path) {
  long v = integer_at(j, path);
  if (v < 0 || static_cast<std::size_t>(v) >= bound)
    throw ParseError(path, "index " + std::to_string(v) + " out of range [0," + std::to_string(bound) + ")");
  return static_cast<std::size_t>(v);
}

inline std::string string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  return j.get<std::string>();
}

inline Rational rational_at(const Json& j, const std::string& path) {
  std::string s = string_at(j, path);
  try {
    return Rational::parse(s);
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
}

inline std::string at(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }
inline std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

}  // namespace detail

inline Json to_json(const Rational& r) { return r.str(); }

// ---------------------------------------------------------------------------
// Algebras

inline Json algebra_to_json(const GradedLieAlgebra& g) {
  Json basis = Json::array();
  for (const auto& b : g.basis()) basis.push_back({{"label", b.label}, {"weight", b.weight}});
  Json brackets = Json::array();
  for (const auto& [key, v] : g.structure_constants()) {
    Json result = Json::array();
    for (const auto& [k, c] : v) result.push_back({{"c", c.str()}, {"k", k}});
    brackets.push_back({{"i", key.first}, {"j", key.second}, {"result", result}});
  }
  return {{"basis", basis}, {"brackets", brackets}};
}

inline Json prolongation_to_json(const ProlongationResult& r) {
  Json j = algebra_to_json(r.full);
  Json levels = Json::array();
  for (const auto& [w, d] : r.level_dims) levels.push_back({{"dim", d}, {"weight", w}});
  j["levels"] = levels;
  j["terminated"] = r.terminated;
  return j;
}

/// Reads the algebra format; "levels" and "terminated" from prolongation
/// output are accepted and ignored. The result is checked for Jacobi and
/// grading.
inline GradedLieAlgebra algebra_from_json(const Json& j) {
  using namespace detail;
  only_keys(j, {"basis", "brackets", "levels", "terminated"}, "");
  const Json& basis = array_at(member(j, "basis", ""), "basis");
  std::vector<BasisElement> elems;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    std::string p = at("basis", i);
    only_keys(basis[i], {"label", "weight"}, p);
    std::string label = string_at(member(basis[i], "label", p), at(p, "label"));
    if (label.empty()) throw ParseError(at(p, "label"), "empty label");
    if (!seen.insert(label).second) throw ParseError(at(p, "label"), "duplicate label \"" + label + "\"");
    long w = integer_at(member(basis[i], "weight", p), at(p, "weight"));
    elems.push_back({label, static_cast<int>(w)});
  }
  const std::size_t d = elems.size();
  StructureConstants sc;
  const Json& brackets = array_at(member(j, "brackets", ""), "brackets");
  for (std::size_t b = 0; b < brackets.size(); ++b) {
    std::string p = at("brackets", b);
    only_keys(brackets[b], {"i", "j", "result"}, p);
    std::size_t i = index_at(member(brackets[b], "i", p), d, at(p, "i"));
    std::size_t jj = index_at(member(brackets[b], "j", p), d, at(p, "j"));
    if (i >= jj) throw ParseError(p, "brackets must have i < j");
    if (sc.count({i, jj})) throw ParseError(p, "duplicate bracket (" + std::to_string(i) + "," + std::to_string(jj) + ")");
    const Json& res = array_at(member(brackets[b], "result", p), at(p, "result"));
    SparseVector v;
    std::set<std::size_t> ks;
    for (std::size_t t = 0; t < res.size(); ++t) {
      std::string q = at(at(p, "result"), t);
      only_keys(res[t], {"c", "k"}, q);
      std::size_t k = index_at(member(res[t], "k", q), d, at(q, "k"));
      if (!ks.insert(k).second) throw ParseError(q, "duplicate result index " + std::to_string(k));
      v.add_to(k, rational_at(member(res[t], "c", q), at(q, "c")));
    }
    sc[{i, jj}] = v;
  }
  GradedLieAlgebra g(std::move(elems), std::move(sc));
  auto rep = validate(g);
  if (!rep.jacobi_failures.empty()) {
    auto [a, b, c] = rep.jacobi_failures.front();
    throw Error("algebra violates the Jacobi identity on (" + g.label(a) + "," + g.label(b) + "," + g.label(c) + ")");
  }
  if (!rep.grading_violations.empty()) throw Error("algebra brackets do not respect the grading");
  return g;
}

inline GradedLieAlgebra load_algebra(std::string_view text) { return algebra_from_json(parse_json_text(text)); }
inline std::string dump_algebra(const GradedLieAlgebra& g) { return dump_canonical(algebra_to_json(g)); }

// ---------------------------------------------------------------------------
// Cochains. Arguments are listed in basis order (the stored wedge order);
// entries are sorted by (argument labels, target label).

inline Json cochain_to_json(const Cochain& c, const GradedLieAlgebra& g) {
  std::vector<std::pair<std::pair<std::vector<std::string>, std::string>, Json>> rows;
  for (const auto& [key, v] : c.terms()) {
    std::vector<std::string> args;
    for (Index a : key.args) args.push_back(g.label(a));
    Json e = {{"args", args}, {"c", v.str()}, {"target", g.label(key.target)}};
    rows.push_back({{args, g.label(key.target)}, std::move(e)});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Json out = Json::array();
  for (auto& [_, e] : rows) out.push_back(std::move(e));
  return out;
}

inline Cochain cochain_from_json(const Json& j, const GradedLieAlgebra& g, int degree, const std::string& path = "") {
  using namespace detail;
  array_at(j, path);
  Cochain c(degree);
  auto label_index = [&](const Json& x, const std::string& p) {
    std::string l = string_at(x, p);
    auto i = g.find(l);
    if (!i) throw ParseError(p, "unknown label \"" + l + "\"");
    return *i;
  };
  for (std::size_t t = 0; t < j.size(); ++t) {
    std::string p = at(path, t);
    only_keys(j[t], {"args", "c", "target"}, p);
    const Json& args = array_at(member(j[t], "args", p), at(p, "args"));
    if (static_cast<int>(args.size()) != degree)
      throw ParseError(at(p, "args"), "expected " + std::to_string(degree) + " arguments");
    std::vector<Index> idx;
    for (std::size_t a = 0; a < args.size(); ++a) idx.push_back(label_index(args[a], at(at(p, "args"), a)));
    Index target = label_index(member(j[t], "target", p), at(p, "target"));
    c.add(idx, target, rational_at(member(j[t], "c", p), at(p, "c")));
  }
  return c;
}

inline Cochain load_cochain(std::string_view text, const GradedLieAlgebra& g, int degree) {
  return cochain_from_json(parse_json_text(text), g, degree);
}

// ---------------------------------------------------------------------------
// Normalization decisions and certificates

inline Json decision_to_json(const NormDecision& d, const GradedLieAlgebra& g) {
  Json j = {{"status", to_string(d.status)},
            {"exists", d.exists},
            {"method", d.method},
            {"dim_c1", d.dim_c1},
            {"dim_c2", d.dim_c2},
            {"dim_image", d.dim_image},
            {"note", d.note}};
  if (d.status == NormStatus::exists) {
    Json comp = Json::array();
    for (const auto& c : d.complement) comp.push_back(cochain_to_json(c, g));
    j["witness"] = {{"complement_dim", d.complement.size()}, {"complement", comp}};
  }
  if (d.obstruction) {
    const Obstruction& o = *d.obstruction;
    Json block = Json::object();
    for (const auto& [name, v] : o.block) block[name] = v.str();
    Json steps = Json::array();
    for (const auto& s : o.steps) steps.push_back(cochain_to_json(s, g));
    j["obstruction"] = {{"block", block},
                        {"generator", cochain_to_json(o.generator, g)},
                        {"chain", o.chain},
                        {"steps", steps},
                        {"result", cochain_to_json(o.result, g)},
                        {"preimage", cochain_to_json(o.preimage, g)},
                        {"single_word", o.single_word}};
  }
  return j;
}

inline Json certificate_to_json(const NonexistenceCertificate& c) {
  GradedLieAlgebra g = grade(build_gl2_semidirect_heis(c.n), GradingScheme::skn, c.k);
  Json chain = Json::array();
  for (const auto& s : c.chain) chain.push_back(cochain_to_json(s, g));
  return {{"k", c.k},
          {"n", c.n},
          {"eigenvalue", c.lambda.str()},
          {"eigen_cochain", cochain_to_json(c.eigen_cochain, g)},
          {"eigen_cochain_weight", c.eigen_cochain_weight},
          {"eigenspace_dim", c.eigenspace_dim},
          {"eigenspace_dim_positive", c.eigenspace_dim_positive},
          {"eigen_cochain_closed", c.eigen_cochain_closed},
          {"classical_start", cochain_to_json(c.classical_start, g)},
          {"classical_start_weight", c.classical_start_weight},
          {"start", cochain_to_json(c.start, g)},
          {"start_weight", c.start_weight},
          {"start_h", c.start_h.str()},
          {"start_block_c1_dim", c.start_block_c1_dim},
          {"start_block_image_dim", c.start_block_image_dim},
          {"chain", chain},
          {"result", cochain_to_json(c.result, g)},
          {"preimage", cochain_to_json(c.preimage, g)},
          {"literal_reference", cochain_to_json(c.literal_reference, g)},
          {"literal_identity", c.literal_identity}};
}

// ---------------------------------------------------------------------------
// Frames and towers. Monomials appear in ascending exponent order; zero
// components are omitted.

inline Json polynomial_to_json(const Polynomial& p) {
  Json out = Json::array();
  for (const auto& [e, c] : p.terms()) out.push_back({{"c", c.str()}, {"exps", e}});
  return out;
}

inline Json frame_to_json(const PolyFrame& f) {
  Json fields = Json::array();
  for (const auto& v : f.fields) {
    Json comp = Json::object();
    for (std::size_t i = 0; i < v.dim(); ++i)
      if (!v.component(i).is_zero()) comp[f.coords[i]] = polynomial_to_json(v.component(i));
    fields.push_back(comp);
  }
  return {{"coords", f.coords}, {"fields", fields}};
}

inline PolyFrame frame_from_json(const Json& j, const std::string& path = "") {
  using namespace detail;
  only_keys(j, {"coords", "fields"}, path);
  const Json& cj = array_at(member(j, "coords", path), at(path, "coords"));
  std::vector<std::string> coords;
  for (std::size_t i = 0; i < cj.size(); ++i) {
    std::string p = at(at(path, "coords"), i);
    std::string name = string_at(cj[i], p);
    if (name.empty()) throw ParseError(p, "empty coordinate name");
    if (std::find(coords.begin(), coords.end(), name) != coords.end())
      throw ParseError(p, "duplicate coordinate \"" + name + "\"");
    coords.push_back(name);
  }
  const Json& fj = array_at(member(j, "fields", path), at(path, "fields"));
  if (fj.size() != 2) throw ParseError(at(path, "fields"), "a frame has exactly two fields");
  std::vector<PolyVectorField> fields;
  for (std::size_t f = 0; f < fj.size(); ++f) {
    std::string p = at(at(path, "fields"), f);
    if (!fj[f].is_object()) throw ParseError(p, "expected an object keyed by coordinate");
    PolyVectorField v(coords);
    for (const auto& [name, mons] : fj[f].items()) {
      std::string q = p + "." + name;
      auto it = std::find(coords.begin(), coords.end(), name);
      if (it == coords.end()) throw ParseError(q, "unknown coordinate \"" + name + "\"");
      array_at(mons, q);
      Polynomial poly(coords.size());
      std::set<Exponents> seen;
      for (std::size_t m = 0; m < mons.size(); ++m) {
        std::string r = at(q, m);
        only_keys(mons[m], {"c", "exps"}, r);
        const Json& ej = array_at(member(mons[m], "exps", r), at(r, "exps"));
        if (ej.size() != coords.size())
          throw ParseError(at(r, "exps"), "expected " + std::to_string(coords.size()) + " exponents");
        Exponents e;
        for (std::size_t t = 0; t < ej.size(); ++t) {
          long x = integer_at(ej[t], at(at(r, "exps"), t));
          if (x < 0) throw ParseError(at(at(r, "exps"), t), "negative exponent");
          e.push_back(static_cast<int>(x));
        }
        if (!seen.insert(e).second) throw ParseError(r, "duplicate monomial");
        poly.add_term(e, rational_at(member(mons[m], "c", r), at(r, "c")));
      }
      v.set_component(static_cast<std::size_t>(it - coords.begin()), std::move(poly));
    }
    fields.push_back(std::move(v));
  }
  return PolyFrame(std::move(coords), std::move(fields));
}

inline PolyFrame load_frame(std::string_view text) { return frame_from_json(parse_json_text(text)); }
inline std::string dump_frame(const PolyFrame& f) { return dump_canonical(frame_to_json(f)); }

inline Json tower_to_json(const ChartTower& t) {
  Json levels = Json::array();
  for (const auto& l : t.levels)
    levels.push_back({{"fiber_coord", l.fiber_coord}, {"frame", frame_to_json(l.frame)}, {"shift", l.shift.str()}});
  return {{"base", frame_to_json(t.base)}, {"levels", levels}};
}

inline ChartTower tower_from_json(const Json& j) {
  using namespace detail;
  only_keys(j, {"base", "levels"}, "");
  ChartTower t;
  t.base = frame_from_json(member(j, "base", ""), "base");
  const Json& lj = array_at(member(j, "levels", ""), "levels");
  for (std::size_t i = 0; i < lj.size(); ++i) {
    std::string p = at("levels", i);
    only_keys(lj[i], {"fiber_coord", "frame", "shift"}, p);
    ChartLevel l{frame_from_json(member(lj[i], "frame", p), at(p, "frame")),
                 string_at(member(lj[i], "fiber_coord", p), at(p, "fiber_coord")),
                 rational_at(member(lj[i], "shift", p), at(p, "shift"))};
    if (l.frame.coords.empty() || l.frame.coords.back() != l.fiber_coord)
      throw ParseError(at(p, "fiber_coord"), "fiber coordinate must be the last coordinate of its frame");
    t.levels.push_back(std::move(l));
  }
  return t;
}

inline ChartTower load_tower(std::string_view text) { return tower_from_json(parse_json_text(text)); }

}  // namespace tanaka
