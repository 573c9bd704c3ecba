#include "limitalg/io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace limitalg::io {

namespace {

[[noreturn]] void schema(const std::string& pointer, const std::string& message) {
  throw Error::about(ErrorCode::SchemaError, pointer.empty() ? "/" : pointer, message);
}

std::string child(const std::string& pointer, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~')
      escaped += "~0";
    else if (c == '/')
      escaped += "~1";
    else
      escaped += c;
  }
  return pointer + "/" + escaped;
}

std::string child(const std::string& pointer, std::size_t index) {
  return pointer + "/" + std::to_string(index);
}

void expect_object(const Json& j, const std::string& p) {
  if (!j.is_object()) schema(p, "expected an object");
}

void expect_array(const Json& j, const std::string& p) {
  if (!j.is_array()) schema(p, "expected an array");
}

void allow_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& p) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : keys) ok = ok || k == a;
    if (!ok) schema(child(p, k), "unexpected key");
  }
}

const Json& field(const Json& j, const char* key, const std::string& p) {
  auto it = j.find(key);
  if (it == j.end()) schema(child(p, key), "missing");
  return *it;
}

long get_int(const Json& j, const std::string& p) {
  if (!j.is_number_integer()) schema(p, "expected an integer");
  return j.get<long>();
}

double get_double(const Json& j, const std::string& p) {
  if (!j.is_number()) schema(p, "expected a number");
  return j.get<double>();
}

Complex get_complex(const Json& j, const std::string& p) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    schema(p, "expected a complex number [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string get_string(const Json& j, const std::string& p) {
  if (!j.is_string()) schema(p, "expected a string");
  return j.get<std::string>();
}

int index_1based(const Json& j, int n, const std::string& p) {
  long v = get_int(j, p);
  if (v < 1 || v > n) schema(p, "index " + std::to_string(v) + " outside 1.." + std::to_string(n));
  return static_cast<int>(v - 1);
}

Matrix parse_matrix(const Json& j, int n, const std::string& p) {
  expect_array(j, p);
  Matrix m(n, n);
  const bool nested = !j.empty() && j[0].is_array() && !j[0].empty() && j[0][0].is_array();
  if (nested) {
    if (static_cast<int>(j.size()) != n) schema(p, "expected " + std::to_string(n) + " rows");
    for (int r = 0; r < n; ++r) {
      const auto& row = j[r];
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        schema(child(p, r), "expected " + std::to_string(n) + " entries");
      for (int c = 0; c < n; ++c) m(r, c) = get_complex(row[c], child(child(p, r), c));
    }
  } else {
    if (static_cast<int>(j.size()) != n * n)
      schema(p, "expected " + std::to_string(n * n) + " entries in row-major order");
    for (int k = 0; k < n * n; ++k) m(k / n, k % n) = get_complex(j[k], child(p, k));
  }
  return m;
}

std::pair<int, int> parse_unit_key(const std::string& key, int n, const std::string& p) {
  int i = 0, j = 0;
  char comma = 0;
  std::istringstream in(key);
  if (!(in >> i >> comma >> j) || comma != ',' || !in.eof())
    schema(p, "matrix unit keys look like \"i,j\"");
  if (i < 1 || i > n || j < 1 || j > n) schema(p, "matrix unit outside the source");
  return {i - 1, j - 1};
}

DiagramMode parse_mode(const std::string& s, const std::string& p) {
  if (s == "exact") return DiagramMode::Exact;
  if (s == "approximate" || s == "approx") return DiagramMode::Approximate;
  schema(p, "mode is exact or approximate");
}

class Parser {
 public:
  explicit Parser(const Workspace* ws) : ws_(ws) {}

  AlgebraEntry algebra(const Json& j, const std::string& p) {
    if (j.is_string()) {
      const std::string name = j.get<std::string>();
      if (ws_) {
        auto it = ws_->algebras.find(name);
        if (it != ws_->algebras.end()) return it->second;
      }
      throw Error::about(ErrorCode::DanglingReference, name, "no algebra of this name");
    }
    expect_object(j, p);
    if (j.contains("tr")) {
      allow_keys(j, {"tr"}, p);
      const std::string tp = child(p, "tr");
      const Json& t = j["tr"];
      expect_object(t, tp);
      allow_keys(t, {"r", "summands"}, tp);
      TrShape shape;
      shape.r = static_cast<int>(get_int(field(t, "r", tp), child(tp, "r")));
      const Json& s = field(t, "summands", tp);
      expect_array(s, child(tp, "summands"));
      for (std::size_t k = 0; k < s.size(); ++k)
        shape.multiplicities.push_back(
            static_cast<int>(get_int(s[k], child(child(tp, "summands"), k))));
      return {tr_stage(shape), shape};
    }
    allow_keys(j, {"n", "edges"}, p);
    const long n = get_int(field(j, "n", p), child(p, "n"));
    if (n < 1) schema(child(p, "n"), "must be positive");
    const Json& e = field(j, "edges", p);
    const std::string ep = child(p, "edges");
    expect_array(e, ep);
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < e.size(); ++k) {
      const std::string kp = child(ep, k);
      if (!e[k].is_array() || e[k].size() != 2) schema(kp, "expected a pair [i, j]");
      edges.push_back({index_1based(e[k][0], static_cast<int>(n), child(kp, 0)),
                       index_1based(e[k][1], static_cast<int>(n), child(kp, 1))});
    }
    return {build_digraph_algebra(static_cast<int>(n), edges), std::nullopt};
  }

  CrossoverMap map(const Json& j, const std::string& p, const AlgebraPtr& source_hint,
                   const AlgebraPtr& target_hint, std::string* ref) {
    if (j.is_string()) {
      const std::string name = j.get<std::string>();
      if (ws_) {
        auto it = ws_->maps.find(name);
        if (it != ws_->maps.end()) {
          if (ref) *ref = name;
          return it->second;
        }
      }
      throw Error::about(ErrorCode::DanglingReference, name, "no map of this name");
    }
    expect_object(j, p);
    allow_keys(j, {"source", "target", "summands", "phases", "images", "tolerance"}, p);
    AlgebraPtr source = j.contains("source") ? algebra(j["source"], child(p, "source")).algebra
                                             : source_hint;
    AlgebraPtr target = j.contains("target") ? algebra(j["target"], child(p, "target")).algebra
                                             : target_hint;
    if (!source) schema(child(p, "source"), "missing");
    if (!target) schema(child(p, "target"), "missing");
    const int n1 = source->size(), n2 = target->size();
    if (j.contains("summands") == j.contains("images"))
      schema(p, "a map has either summands or images");
    if (j.contains("summands")) {
      if (j.contains("tolerance")) schema(child(p, "tolerance"), "only numeric maps carry one");
      const std::string sp = child(p, "summands");
      const Json& s = j["summands"];
      expect_array(s, sp);
      std::vector<MultiplicityOneMap> summands;
      for (std::size_t k = 0; k < s.size(); ++k) {
        const std::string kp = child(sp, k);
        expect_object(s[k], kp);
        allow_keys(s[k], {"iota"}, kp);
        const Json& pairs = field(s[k], "iota", kp);
        const std::string ip = child(kp, "iota");
        expect_array(pairs, ip);
        std::vector<int> iota(n1, -1);
        for (std::size_t q = 0; q < pairs.size(); ++q) {
          const std::string qp = child(ip, q);
          if (!pairs[q].is_array() || pairs[q].size() != 2) schema(qp, "expected a pair [i, j]");
          const int a = index_1based(pairs[q][0], n1, child(qp, 0));
          const int b = index_1based(pairs[q][1], n2, child(qp, 1));
          if (iota[a] >= 0) schema(qp, "index " + std::to_string(a + 1) + " mapped twice");
          iota[a] = b;
        }
        summands.push_back(validate_multiplicity_one(std::move(iota), source, target));
      }
      std::vector<Complex> phases;
      if (j.contains("phases")) {
        const std::string pp = child(p, "phases");
        expect_array(j["phases"], pp);
        if (static_cast<int>(j["phases"].size()) != n2)
          schema(pp, "expected one phase per target index");
        for (std::size_t k = 0; k < j["phases"].size(); ++k)
          phases.push_back(get_complex(j["phases"][k], child(pp, k)));
      }
      return assemble_regular(source, target, std::move(summands), std::move(phases));
    }
    if (j.contains("phases")) schema(child(p, "phases"), "only standard maps carry phases");
    const std::string ip = child(p, "images");
    const Json& images = j["images"];
    expect_object(images, ip);
    NumericStarMap::ImageMap out;
    for (const auto& [key, value] : images.items()) {
      const std::string kp = child(ip, key);
      auto unit = parse_unit_key(key, n1, kp);
      if (!source->has_edge(unit.first, unit.second)) schema(kp, "not an edge of the source");
      if (out.count(unit)) schema(kp, "matrix unit given twice");
      out.emplace(unit, parse_matrix(value, n2, kp));
    }
    for (const Edge& e : source->edges())
      if (!out.count({e.from, e.to}))
        schema(child(ip, std::to_string(e.from + 1) + "," + std::to_string(e.to + 1)), "missing");
    double tol = kDefaultTolerance;
    if (j.contains("tolerance")) {
      tol = get_double(j["tolerance"], child(p, "tolerance"));
      if (tol < 0) schema(child(p, "tolerance"), "must be nonnegative");
    }
    return NumericStarMap(source, target, std::move(out), tol);
  }

  SystemEntry system(const Json& j, const std::string& p, std::string* ref) {
    if (j.is_string()) {
      const std::string name = j.get<std::string>();
      if (ws_) {
        auto it = ws_->systems.find(name);
        if (it != ws_->systems.end()) {
          if (ref) *ref = name;
          return it->second;
        }
      }
      throw Error::about(ErrorCode::DanglingReference, name, "no system of this name");
    }
    expect_object(j, p);
    allow_keys(j, {"stages", "connectors", "periodic"}, p);
    SystemEntry out;
    const std::string sp = child(p, "stages");
    const Json& stages = field(j, "stages", p);
    expect_array(stages, sp);
    if (stages.empty()) schema(sp, "a system needs at least one stage");
    for (std::size_t k = 0; k < stages.size(); ++k) {
      AlgebraEntry a = algebra(stages[k], child(sp, k));
      out.system.stages.push_back(a.algebra);
      out.shapes.push_back(a.shape);
    }
    if (j.contains("periodic")) {
      if (!j["periodic"].is_boolean()) schema(child(p, "periodic"), "expected a boolean");
      out.system.periodic = j["periodic"].get<bool>();
    }
    const std::string cp = child(p, "connectors");
    const Json empty = Json::array();
    const Json& conns = j.contains("connectors") ? j["connectors"] : empty;
    expect_array(conns, cp);
    const auto& st = out.system.stages;
    for (std::size_t k = 0; k < conns.size(); ++k) {
      AlgebraPtr s = k < st.size() ? st[k] : nullptr;
      AlgebraPtr t = k + 1 < st.size() ? st[k + 1] : (k + 1 == st.size() ? st.back() : nullptr);
      std::string name;
      CrossoverMap m = map(conns[k], child(cp, k), s, t, &name);
      if (!std::holds_alternative<StandardRegularMap>(m))
        schema(child(cp, k), "connectors must be standard regular maps");
      out.system.connectors.push_back(std::get<StandardRegularMap>(std::move(m)));
      out.connector_refs.push_back(name);
    }
    check_system(out.system);
    return out;
  }

  DiagramEntry diagram(const Json& j, const std::string& p) {
    expect_object(j, p);
    allow_keys(j, {"top", "bottom", "n", "m", "alphas", "betas", "mode", "budgets", "tolerance"},
               p);
    DiagramEntry out;
    out.top = system(field(j, "top", p), child(p, "top"), &out.top_ref);
    out.bottom = system(field(j, "bottom", p), child(p, "bottom"), &out.bottom_ref);
    auto& d = out.diagram;
    d.top = out.top.system;
    d.bottom = out.bottom.system;
    auto stages = [&](const char* key, const DirectSystem& sys, std::vector<int>& dst) {
      const std::string kp = child(p, key);
      const Json& a = field(j, key, p);
      expect_array(a, kp);
      for (std::size_t k = 0; k < a.size(); ++k) {
        long v = get_int(a[k], child(kp, k));
        if (v < 1 || (!sys.periodic && v > static_cast<long>(sys.stages.size())))
          schema(child(kp, k), "stage " + std::to_string(v) + " does not exist");
        dst.push_back(static_cast<int>(v - 1));
      }
    };
    stages("n", d.top, d.n);
    stages("m", d.bottom, d.m);
    auto at = [](const DirectSystem& s, const std::vector<int>& idx, std::size_t k) {
      return k < idx.size() ? stage(s, idx[k]) : AlgebraPtr{};
    };
    auto crossovers = [&](const char* key, bool alpha, std::vector<CrossoverMap>& dst,
                          std::vector<std::string>& refs) {
      const std::string kp = child(p, key);
      const Json& a = field(j, key, p);
      expect_array(a, kp);
      for (std::size_t k = 0; k < a.size(); ++k) {
        AlgebraPtr s = alpha ? at(d.top, d.n, k) : at(d.bottom, d.m, k);
        AlgebraPtr t = alpha ? at(d.bottom, d.m, k) : at(d.top, d.n, k + 1);
        std::string name;
        dst.push_back(map(a[k], child(kp, k), s, t, &name));
        refs.push_back(name);
      }
    };
    crossovers("alphas", true, d.alphas, out.alpha_refs);
    crossovers("betas", false, d.betas, out.beta_refs);
    if (j.contains("mode")) d.mode = parse_mode(get_string(j["mode"], child(p, "mode")), child(p, "mode"));
    if (j.contains("budgets")) {
      const std::string bp = child(p, "budgets");
      expect_array(j["budgets"], bp);
      for (std::size_t k = 0; k < j["budgets"].size(); ++k)
        d.budgets.push_back(get_double(j["budgets"][k], child(bp, k)));
    }
    if (j.contains("tolerance")) {
      d.tolerance = get_double(j["tolerance"], child(p, "tolerance"));
      if (d.tolerance < 0) schema(child(p, "tolerance"), "must be nonnegative");
    }
    check_diagram(d);
    return out;
  }

 private:
  const Workspace* ws_;
};

// Serialization helpers.

class Writer {
 public:
  explicit Writer(const Workspace& ws) {
    for (const auto& [name, entry] : ws.algebras) names_.emplace(entry.algebra.get(), name);
  }

  Json algebra(const AlgebraPtr& a, const std::optional<TrShape>& shape) const {
    auto it = names_.find(a.get());
    if (it != names_.end()) return it->second;
    return inline_algebra(*a, shape);
  }

  static Json inline_algebra(const DigraphAlgebra& a, const std::optional<TrShape>& shape) {
    if (shape) return Json{{"tr", {{"r", shape->r}, {"summands", shape->multiplicities}}}};
    return algebra_json(a);
  }

  Json map(const CrossoverMap& m, bool with_ends) const {
    Json j = map_json(m);
    if (with_ends) {
      j["source"] = algebra(source_of(m), std::nullopt);
      j["target"] = algebra(target_of(m), std::nullopt);
    } else {
      j.erase("source");
      j.erase("target");
    }
    return j;
  }

  Json system(const SystemEntry& s) const {
    Json j;
    j["stages"] = Json::array();
    for (std::size_t k = 0; k < s.system.stages.size(); ++k)
      j["stages"].push_back(algebra(s.system.stages[k], s.shapes[k]));
    j["connectors"] = Json::array();
    for (std::size_t k = 0; k < s.system.connectors.size(); ++k) {
      if (k < s.connector_refs.size() && !s.connector_refs[k].empty())
        j["connectors"].push_back(s.connector_refs[k]);
      else
        j["connectors"].push_back(map(s.system.connectors[k], false));
    }
    if (s.system.periodic) j["periodic"] = true;
    return j;
  }

 private:
  std::map<const DigraphAlgebra*, std::string> names_;
};

template <class T>
const T& one_entry(const std::map<std::string, T>& section, const std::string& name,
                   const char* kind) {
  if (!name.empty()) {
    auto it = section.find(name);
    if (it == section.end())
      throw Error::about(ErrorCode::DanglingReference, name, std::string("no ") + kind);
    return it->second;
  }
  if (section.size() != 1)
    throw Error(ErrorCode::UsageError,
                std::string("workspace holds ") + std::to_string(section.size()) + " " + kind +
                    " entries; pick one by name");
  return section.begin()->second;
}

bool is_workspace(const Json& doc) { return doc.is_object() && doc.contains("version"); }

}  // namespace

std::vector<TrShape> SystemEntry::tr_shapes() const {
  std::vector<TrShape> out;
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    if (!shapes[k])
      throw Error(ErrorCode::NotTrBand,
                  "stage " + std::to_string(k + 1) + " is not declared as a sum of T_r summands",
                  {static_cast<long>(k) + 1});
    out.push_back(*shapes[k]);
  }
  return out;
}

Json parse_document(std::string_view bytes) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    schema("", std::string("not valid JSON: ") + e.what());
  }
}

Json read_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UsageError, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str());
}

Workspace parse_workspace(std::string_view bytes) {
  return workspace_from_json(parse_document(bytes));
}

Workspace workspace_from_json(const Json& doc) {
  expect_object(doc, "");
  allow_keys(doc, {"version", "algebras", "maps", "systems", "diagrams"}, "");
  Workspace ws;
  ws.version = static_cast<int>(get_int(field(doc, "version", ""), "/version"));
  if (ws.version != kWorkspaceVersion)
    schema("/version", "unsupported version " + std::to_string(ws.version));
  Parser parser(&ws);
  auto section = [&](const char* key) -> const Json* {
    if (!doc.contains(key)) return nullptr;
    expect_object(doc[key], child("", key));
    return &doc[key];
  };
  if (const Json* s = section("algebras"))
    for (const auto& [name, j] : s->items()) {
      if (j.is_string()) schema(child("/algebras", name), "algebras are declared inline");
      ws.algebras.emplace(name, parser.algebra(j, child("/algebras", name)));
    }
  if (const Json* s = section("maps"))
    for (const auto& [name, j] : s->items()) {
      if (j.is_string()) schema(child("/maps", name), "maps are declared inline");
      ws.maps.emplace(name, parser.map(j, child("/maps", name), nullptr, nullptr, nullptr));
    }
  if (const Json* s = section("systems"))
    for (const auto& [name, j] : s->items()) {
      if (j.is_string()) schema(child("/systems", name), "systems are declared inline");
      ws.systems.emplace(name, parser.system(j, child("/systems", name), nullptr));
    }
  if (const Json* s = section("diagrams"))
    for (const auto& [name, j] : s->items())
      ws.diagrams.emplace(name, parser.diagram(j, child("/diagrams", name)));
  return ws;
}

Json to_json(const Workspace& ws) {
  Writer w(ws);
  Json j;
  j["version"] = ws.version;
  j["algebras"] = Json::object();
  for (const auto& [name, a] : ws.algebras) j["algebras"][name] = Writer::inline_algebra(*a.algebra, a.shape);
  j["maps"] = Json::object();
  for (const auto& [name, m] : ws.maps) j["maps"][name] = w.map(m, true);
  j["systems"] = Json::object();
  for (const auto& [name, s] : ws.systems) j["systems"][name] = w.system(s);
  j["diagrams"] = Json::object();
  for (const auto& [name, e] : ws.diagrams) {
    const auto& d = e.diagram;
    Json dj;
    dj["top"] = e.top_ref.empty() ? w.system(e.top) : Json(e.top_ref);
    dj["bottom"] = e.bottom_ref.empty() ? w.system(e.bottom) : Json(e.bottom_ref);
    dj["n"] = Json::array();
    for (int v : d.n) dj["n"].push_back(v + 1);
    dj["m"] = Json::array();
    for (int v : d.m) dj["m"].push_back(v + 1);
    auto list = [&](const std::vector<CrossoverMap>& maps, const std::vector<std::string>& refs) {
      Json a = Json::array();
      for (std::size_t k = 0; k < maps.size(); ++k)
        a.push_back(k < refs.size() && !refs[k].empty() ? Json(refs[k]) : w.map(maps[k], false));
      return a;
    };
    dj["alphas"] = list(d.alphas, e.alpha_refs);
    dj["betas"] = list(d.betas, e.beta_refs);
    dj["mode"] = d.mode == DiagramMode::Exact ? "exact" : "approximate";
    if (!d.budgets.empty()) dj["budgets"] = d.budgets;
    dj["tolerance"] = d.tolerance;
    j["diagrams"][name] = dj;
  }
  return j;
}

std::string serialize(const Workspace& ws) { return to_json(ws).dump(2) + "\n"; }

CrossoverMap load_map(const Json& doc, const std::string& name) {
  if (!is_workspace(doc)) return Parser(nullptr).map(doc, "", nullptr, nullptr, nullptr);
  Workspace ws = workspace_from_json(doc);
  return one_entry(ws.maps, name, "map");
}

SystemEntry load_system(const Json& doc, const std::string& name) {
  if (!is_workspace(doc)) return Parser(nullptr).system(doc, "", nullptr);
  Workspace ws = workspace_from_json(doc);
  return one_entry(ws.systems, name, "system");
}

DiagramEntry load_diagram(const Json& doc, const std::string& name) {
  if (!is_workspace(doc)) return Parser(nullptr).diagram(doc, "");
  Workspace ws = workspace_from_json(doc);
  return one_entry(ws.diagrams, name, "diagram");
}

// Encoders.

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json matrix_json(const Matrix& m) {
  Json a = Json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) a.push_back(complex_json(m(r, c)));
  return a;
}

Json algebra_json(const DigraphAlgebra& a) {
  Json edges = Json::array();
  for (const Edge& e : a.edges()) edges.push_back({e.from + 1, e.to + 1});
  return Json{{"n", a.size()}, {"edges", edges}};
}

Json summand_json(const MultiplicityOneMap& m) {
  Json pairs = Json::array();
  for (int i = 0; i < static_cast<int>(m.iota().size()); ++i)
    if (m(i) >= 0) pairs.push_back({i + 1, m(i) + 1});
  return Json{{"iota", pairs}};
}

Json map_json(const CrossoverMap& m) {
  Json j;
  j["source"] = algebra_json(*source_of(m));
  j["target"] = algebra_json(*target_of(m));
  if (const auto* s = std::get_if<StandardRegularMap>(&m)) {
    j["summands"] = Json::array();
    for (const auto& x : s->summands()) j["summands"].push_back(summand_json(x));
    if (s->has_phases()) {
      j["phases"] = Json::array();
      for (Complex z : s->phases()) j["phases"].push_back(complex_json(z));
    }
    return j;
  }
  const auto& n = std::get<NumericStarMap>(m);
  j["images"] = Json::object();
  for (const auto& [key, mat] : n.images())
    j["images"][std::to_string(key.first + 1) + "," + std::to_string(key.second + 1)] =
        matrix_json(mat);
  j["tolerance"] = n.tolerance();
  return j;
}

Json index_map_json(const IndexMap& pi) {
  Json a = Json::array();
  for (int v : pi.pi) a.push_back(v >= 0 ? Json(v + 1) : Json(nullptr));
  return a;
}

Json rank_matrix_json(const RankMatrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json class_key_json(const ClassKey& key) {
  Json ms = Json::array();
  for (const auto& pi : key.multiset) ms.push_back(index_map_json(pi));
  return Json{{"multiset", ms}, {"rank_profile", rank_matrix_json(key.profile)}};
}

Json census_json(const SummandCensus& c) {
  Json classes = Json::array();
  for (const auto& [pi, mult] : c.classes)
    classes.push_back({{"index_map", index_map_json(pi)}, {"multiplicity", mult}});
  return Json{{"classes", classes}, {"residual_rank", c.residual_rank}};
}

Json unitary_json(const Unitary& u) {
  if (const auto* s = std::get_if<StandardPartialIsometry>(&u)) {
    Json targets = Json::array(), phases = Json::array();
    for (int i = 0; i < s->size(); ++i) {
      targets.push_back(s->target(i) >= 0 ? Json(s->target(i) + 1) : Json(nullptr));
      phases.push_back(complex_json(s->phase(i)));
    }
    return Json{{"kind", "standard"}, {"targets", targets}, {"phases", phases}};
  }
  const Matrix& m = std::get<Matrix>(u);
  return Json{{"kind", "dense"}, {"size", m.rows()}, {"entries", matrix_json(m)}};
}

Json diagram_report_json(const DiagramReport& r) {
  Json tri = Json::array();
  for (const auto& t : r.triangles)
    tri.push_back({{"triangle", t.top ? "top" : "bottom"},
                   {"index", t.index},
                   {"residual", t.residual},
                   {"budget", t.budget ? Json(*t.budget) : Json(nullptr)},
                   {"within_budget", t.within_budget}});
  Json cross = Json::array();
  for (const auto& c : r.crossovers)
    cross.push_back({{"crossover", c.alpha ? "alpha" : "beta"},
                     {"index", c.index},
                     {"maps_diagonal", c.maps_diagonal},
                     {"normalizing", c.normalizing},
                     {"witness", c.witness ? Json::array({c.witness->from + 1, c.witness->to + 1})
                                           : Json(nullptr)}});
  return Json{{"triangles", tri},
              {"crossovers", cross},
              {"residual_sum", r.residual_sum},
              {"max_residual", r.max_residual},
              {"within_budgets", r.within_budgets}};
}

Json relation_json(const CylinderRelation& rel) {
  Json paths = Json::array();
  for (const auto& p : rel.paths) {
    Json a = Json::array();
    for (int i : p) a.push_back(i + 1);
    paths.push_back(a);
  }
  Json pairs = Json::array();
  for (const auto& p : rel.pairs)
    pairs.push_back({{"x", p.x + 1},
                     {"y", p.y + 1},
                     {"level", p.level + 1},
                     {"unit", {p.unit.from + 1, p.unit.to + 1}}});
  return Json{{"depth", rel.depth}, {"paths", paths}, {"pairs", pairs}};
}

Json statistics_json(const RelationStatistics& st) {
  return Json{{"paths", st.paths},
              {"pairs", st.pairs},
              {"out_degrees", st.out_degrees},
              {"in_degrees", st.in_degrees},
              {"antisymmetric", st.antisymmetric},
              {"symmetric", st.symmetric},
              {"witness_histogram", st.witness_histogram}};
}

Json semiring_json(const SemiringElement& s) {
  Json terms = Json::array();
  for (const auto& [theta, c] : s.terms()) terms.push_back({{"map", theta.values}, {"coeff", c}});
  return Json{{"terms", terms}};
}

Json module_json(const StageModule& x) {
  Json a = Json::array();
  for (const auto& s : x) a.push_back(semiring_json(s));
  return a;
}

Json module_matrix_json(const ModuleMapMatrix& m) {
  Json rows = Json::array();
  for (int c = 0; c < m.rows; ++c) {
    Json row = Json::array();
    for (int b = 0; b < m.cols; ++b) row.push_back(semiring_json(m.at(c, b)));
    rows.push_back(row);
  }
  return Json{{"r", m.r}, {"rows", m.rows}, {"cols", m.cols}, {"entries", rows}};
}

SemiringElement parse_semiring(const Json& j, int r, const std::string& pointer) {
  expect_object(j, pointer);
  allow_keys(j, {"terms"}, pointer);
  const std::string tp = child(pointer, "terms");
  const Json& terms = field(j, "terms", pointer);
  expect_array(terms, tp);
  SemiringElement out = SemiringElement::zero(r);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const std::string kp = child(tp, k);
    expect_object(terms[k], kp);
    allow_keys(terms[k], {"map", "coeff"}, kp);
    const Json& m = field(terms[k], "map", kp);
    expect_array(m, child(kp, "map"));
    std::vector<int> values;
    for (std::size_t q = 0; q < m.size(); ++q)
      values.push_back(static_cast<int>(get_int(m[q], child(child(kp, "map"), q))));
    if (static_cast<int>(values.size()) != r)
      throw Error(ErrorCode::BandMismatch,
                  kp + ": map has " + std::to_string(values.size()) + " values, expected " +
                      std::to_string(r),
                  {static_cast<long>(values.size()), r});
    long c = get_int(field(terms[k], "coeff", kp), child(kp, "coeff"));
    if (c < 0) schema(child(kp, "coeff"), "coefficients are nonnegative");
    out = out + SemiringElement::of(make_monotone(std::move(values)), static_cast<std::uint64_t>(c));
  }
  return out;
}

ColimitElement parse_colimit_element(const Json& j, int r, const std::string& pointer) {
  expect_object(j, pointer);
  allow_keys(j, {"stage", "value"}, pointer);
  ColimitElement e;
  const long stage = get_int(field(j, "stage", pointer), child(pointer, "stage"));
  if (stage < 1) schema(child(pointer, "stage"), "stages are numbered from 1");
  e.stage = static_cast<int>(stage - 1);
  const std::string vp = child(pointer, "value");
  const Json& v = field(j, "value", pointer);
  expect_array(v, vp);
  for (std::size_t k = 0; k < v.size(); ++k) e.value.push_back(parse_semiring(v[k], r, child(vp, k)));
  return e;
}

}  // namespace limitalg::io
