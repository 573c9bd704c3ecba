#include "limitalg/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "limitalg/io.hpp"

namespace limitalg::cli {

namespace {

using io::Json;

struct Outcome {
  Json report;
  int code = kSuccess;
};

// Input errors carry exit code 2; everything else raised by a module while
// answering a question is a negative verdict.
bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::SchemaError:
    case ErrorCode::DanglingReference:
    case ErrorCode::UsageError:
    case ErrorCode::InvalidInput:
    case ErrorCode::NotReflexive:
    case ErrorCode::NotTransitive:
    case ErrorCode::NotInjective:
    case ErrorCode::EdgeIncompatible:
    case ErrorCode::BlockPartial:
    case ErrorCode::ImageOverlap:
    case ErrorCode::SourceTargetMismatch:
    case ErrorCode::NotMultiplicative:
    case ErrorCode::NotStarConsistent:
    case ErrorCode::NotInRange:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::NotTrBand:
    case ErrorCode::BandMismatch:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DepthUnavailable:
    case ErrorCode::CapacityExceeded:
      return true;
    default:
      return false;
  }
}

Json error_json(const Error& e) {
  Json j{{"code", std::string(to_string(e.code()))},
         {"message", e.what()},
         {"witness", e.witness()}};
  if (!e.subject().empty()) j["subject"] = e.subject();
  if (e.residual() != 0.0) j["residual"] = e.residual();
  return j;
}

double tolerance_from_env() {
  const char* v = std::getenv("LIMITALG_TOL");
  if (!v || !*v) return kDefaultTolerance;
  char* end = nullptr;
  double t = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(t >= 0))
    throw Error(ErrorCode::UsageError, std::string("LIMITALG_TOL is not a tolerance: ") + v);
  return t;
}

bool env_tolerance_set() {
  const char* v = std::getenv("LIMITALG_TOL");
  return v && *v;
}

CrossoverMap with_tolerance(CrossoverMap m, double tol) {
  if (auto* n = std::get_if<NumericStarMap>(&m); n && env_tolerance_set())
    return NumericStarMap(n->source(), n->target(), n->images(), tol);
  return m;
}

double tolerance_of(const CrossoverMap& m, double tol) {
  if (const auto* n = std::get_if<NumericStarMap>(&m)) return n->tolerance();
  return tol;
}

CrossoverMap load_map(const std::string& path, const std::string& name, double tol) {
  return with_tolerance(io::load_map(io::read_document(path), name), tol);
}

NumericStarMap validated(const CrossoverMap& m) {
  if (const auto* s = std::get_if<StandardRegularMap>(&m)) return to_numeric(*s);
  const auto& n = std::get<NumericStarMap>(m);
  return validate_numeric(n.images(), n.source(), n.target(), n.tolerance());
}

const StandardRegularMap& require_standard(const CrossoverMap& m, const char* what) {
  if (const auto* s = std::get_if<StandardRegularMap>(&m)) return *s;
  throw Error(ErrorCode::UsageError, std::string(what) + " must be a standard regular map");
}

Json summands_json(const StandardRegularMap& phi) {
  Json out = Json::array();
  for (const auto& m : decompose_maximal(phi)) {
    Json j = io::summand_json(m);
    j["index_map"] = io::index_map_json(m.index_map());
    out.push_back(j);
  }
  return out;
}

Outcome cmd_validate(const std::string& path, double tol) {
  Json doc = io::read_document(path);
  Outcome o;
  o.report["tolerance"] = tol;
  io::Workspace ws;
  try {
    ws = io::workspace_from_json(doc);
    for (const auto& [name, m] : ws.maps)
      if (std::holds_alternative<NumericStarMap>(m)) {
        try {
          validated(with_tolerance(m, tol));
        } catch (const Error& e) {
          throw Error::about(e.code(), "/maps/" + name, e.what());
        }
      }
    for (const auto& [name, d] : ws.diagrams) {
      auto check = [&](const std::vector<CrossoverMap>& maps, const char* kind) {
        for (std::size_t k = 0; k < maps.size(); ++k)
          if (std::holds_alternative<NumericStarMap>(maps[k])) try {
              validated(with_tolerance(maps[k], tol));
            } catch (const Error& e) {
              throw Error::about(e.code(),
                                 "/diagrams/" + name + "/" + kind + "/" + std::to_string(k),
                                 e.what());
            }
      };
      check(d.diagram.alphas, "alphas");
      check(d.diagram.betas, "betas");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaError || e.code() == ErrorCode::DanglingReference) throw;
    o.report["valid"] = false;
    o.report["error"] = error_json(e);
    o.code = kNegative;
    return o;
  }
  o.report["valid"] = true;
  o.report["counts"] = {{"algebras", ws.algebras.size()},
                        {"maps", ws.maps.size()},
                        {"systems", ws.systems.size()},
                        {"diagrams", ws.diagrams.size()}};
  return o;
}

Outcome cmd_decompose(const std::string& path, const std::string& name, double tol) {
  CrossoverMap m = load_map(path, name, tol);
  Outcome o;
  o.report["tolerance"] = tolerance_of(m, tol);
  o.report["source_reduced_has_cycle"] = reduced_has_cycle(*source_of(m));
  const StandardRegularMap* phi = std::get_if<StandardRegularMap>(&m);
  std::optional<RegularityVerdict> verdict;
  if (!phi) {
    verdict = is_regular(validated(m));
    if (!verdict->regular) {
      o.report["regular"] = false;
      o.report["reason"] = verdict->reason;
      o.code = kNegative;
      return o;
    }
    phi = &*verdict->standard;
  }
  o.report["regular"] = true;
  o.report["summands"] = summands_json(*phi);
  o.report["class_key"] = io::class_key_json(conjugacy_class(*phi));
  o.report["rank"] = phi->rank();
  return o;
}

Outcome cmd_conjugacy(const std::string& lhs, const std::string& lhs_name, const std::string& rhs,
                      const std::string& rhs_name, double tol) {
  CrossoverMap a = load_map(lhs, lhs_name, tol);
  CrossoverMap b = load_map(rhs, rhs_name, tol);
  const auto& p = require_standard(a, "--lhs");
  const auto& q = require_standard(b, "--rhs");
  Outcome o;
  o.report["tolerance"] = tol;
  ClassKey kp = conjugacy_class(p), kq = conjugacy_class(q);
  o.report["lhs_key"] = io::class_key_json(kp);
  o.report["rhs_key"] = io::class_key_json(kq);
  const bool parallel = *p.source() == *q.source() && *p.target() == *q.target();
  if (parallel && kp == kq) {
    o.report["equivalent"] = true;
    o.report["witness"] = io::unitary_json(standard_witness(p, q));
  } else {
    o.report["equivalent"] = false;
    o.report["witness"] = nullptr;
    o.code = kNegative;
  }
  return o;
}

Outcome cmd_standardize(const std::string& path, const std::string& name,
                        const std::string& theta_path, const std::string& phi1_path, double tol) {
  CrossoverMap m = load_map(path, name, tol);
  Outcome o;
  o.report["tolerance"] = tolerance_of(m, tol);
  if (!theta_path.empty() || !phi1_path.empty()) {
    if (theta_path.empty() || phi1_path.empty())
      throw Error(ErrorCode::UsageError, "--theta and --phi1 go together");
    const auto theta = load_map(theta_path, "", tol);
    const auto phi1 = load_map(phi1_path, "", tol);
    if (std::holds_alternative<NumericStarMap>(m)) m = validated(m);
    try {
      Restandardized r = restandardize_triangle(require_standard(theta, "--theta"),
                                                require_standard(phi1, "--phi1"), m,
                                                tolerance_of(m, tol));
      o.report["standard"] = io::map_json(r.standard);
      o.report["unitary"] = io::unitary_json(r.unitary);
    } catch (const Error& e) {
      if (is_input_error(e.code())) throw;
      o.report["error"] = error_json(e);
      o.code = kNegative;
    }
    return o;
  }
  if (const auto* s = std::get_if<StandardRegularMap>(&m)) {
    o.report["regular"] = true;
    o.report["standard"] = io::map_json(*s);
    o.report["unitary"] = io::unitary_json(StandardPartialIsometry::identity(s->target()->size()));
    return o;
  }
  RegularityVerdict v = is_regular(validated(m));
  o.report["regular"] = v.regular;
  if (!v.regular) {
    o.report["reason"] = v.reason;
    o.code = kNegative;
    return o;
  }
  o.report["standard"] = io::map_json(*v.standard);
  o.report["unitary"] = io::unitary_json(v.unitary);
  o.report["residual"] = v.residual;
  return o;
}

Outcome cmd_intertwine(const std::string& path, const std::string& name,
                       const std::string& mode, double tol) {
  io::DiagramEntry e = io::load_diagram(io::read_document(path), name);
  CrossoverDiagram& d = e.diagram;
  if (env_tolerance_set()) d.tolerance = tol;
  for (auto* list : {&d.alphas, &d.betas})
    for (auto& m : *list) {
      m = with_tolerance(m, d.tolerance);
      if (std::holds_alternative<NumericStarMap>(m)) m = validated(m);
    }
  if (mode == "exact")
    d.mode = DiagramMode::Exact;
  else if (mode == "approx" || mode == "approximate")
    d.mode = DiagramMode::Approximate;
  else if (!mode.empty())
    throw Error(ErrorCode::UsageError, "--mode is exact or approx");
  Outcome o;
  o.report["tolerance"] = d.tolerance;
  o.report["mode"] = d.mode == DiagramMode::Exact ? "exact" : "approximate";
  o.report["input_report"] = io::diagram_report_json(verify_diagram(d));
  try {
    CorrectedDiagram c = intertwine(d);
    Json alphas = Json::array(), betas = Json::array(), v = Json::array(), u = Json::array();
    for (const auto& a : c.alphas) alphas.push_back(io::map_json(a));
    for (const auto& b : c.betas) betas.push_back(io::map_json(b));
    for (const auto& x : c.v_hat) v.push_back(io::unitary_json(x));
    for (const auto& x : c.u_hat) u.push_back(io::unitary_json(x));
    o.report["corrected"] = {{"alphas", alphas}, {"betas", betas}, {"v_hat", v}, {"u_hat", u}};
    o.report["report"] = io::diagram_report_json(c.report);
    o.code = c.report.max_residual <= kDefaultTolerance ? kSuccess : kNegative;
  } catch (const Error& err) {
    if (is_input_error(err.code())) throw;
    o.report["error"] = error_json(err);
    o.code = kNegative;
  }
  return o;
}

Outcome cmd_detect(const std::string& path, const std::string& name, const std::string& against,
                   double tol) {
  CrossoverMap m = load_map(path, name, tol);
  NumericStarMap phi = validated(m);
  Outcome o;
  o.report["tolerance"] = std::max(phi.tolerance(), tolerance_of(m, tol));
  o.report["threshold"] = threshold(*phi.source());
  if (!against.empty()) {
    CrossoverMap a = load_map(against, "", tol);
    const auto& alpha = require_standard(a, "--against");
    if (alpha.summands().size() != 1)
      throw Error(ErrorCode::UsageError, "--against must have exactly one summand");
    TestProductResult r = test_product(phi, alpha.summands().front());
    o.report["norm"] = r.norm;
    o.report["present"] = r.present;
    o.report["index_map"] = io::index_map_json(alpha.summands().front().index_map());
    o.code = r.present ? kSuccess : kNegative;
    return o;
  }
  try {
    o.report["census"] = io::census_json(summand_census(phi));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InconsistentRanks) throw;
    o.report["error"] = error_json(e);
    o.code = kNegative;
  }
  return o;
}

Outcome cmd_regular_test(const std::string& path, const std::string& name, double tol) {
  CrossoverMap m = load_map(path, name, tol);
  NumericStarMap phi = validated(m);
  RegularityVerdict v = is_regular(phi);
  Outcome o;
  o.report["tolerance"] = std::max(phi.tolerance(), tolerance_of(m, tol));
  o.report["regular"] = v.regular;
  o.report["threshold"] = v.threshold;
  o.report["census"] = io::census_json(v.census);
  Json ms = Json::array();
  for (const auto& [pi, mult] : v.census.classes)
    for (int k = 0; k < mult; ++k) ms.push_back(io::index_map_json(pi));
  o.report["class_multiset"] = ms;
  o.report["residual"] = v.residual;
  if (v.regular) {
    o.report["standard"] = io::map_json(*v.standard);
  } else {
    o.report["reason"] = v.reason;
    o.code = kNegative;
  }
  return o;
}

Outcome cmd_spectrum(const std::string& path, const std::string& name, int depth,
                     const std::string& compare, const std::string& compare_name, double tol) {
  io::SystemEntry s = io::load_system(io::read_document(path), name);
  Outcome o;
  o.report["tolerance"] = tol;
  o.report["depth"] = depth;
  if (!compare.empty()) {
    io::SystemEntry t = io::load_system(io::read_document(compare), compare_name);
    DepthVerdict v = relation_isomorphic_at_depth(s.system, t.system, depth);
    o.report["distinguished"] = v.distinguished;
    o.report["statistic"] = v.distinguished ? Json(v.statistic) : Json(nullptr);
    o.report["first"] = io::statistics_json(v.first);
    o.report["second"] = io::statistics_json(v.second);
    o.code = v.distinguished ? kNegative : kSuccess;
    return o;
  }
  CylinderRelation rel = cylinder_relation(s.system, depth);
  o.report["relation"] = io::relation_json(rel);
  o.report["statistics"] = io::statistics_json(relation_statistics(rel));
  return o;
}

Outcome cmd_dimmod(const std::string& path, const std::string& name, int r,
                   const std::string& element, int push_to, const std::string& compare,
                   double tol) {
  io::SystemEntry s = io::load_system(io::read_document(path), name);
  LimitPresentation p(s.system, s.tr_shapes());
  if (p.r() != r)
    throw Error(ErrorCode::BandMismatch,
                "system has r = " + std::to_string(p.r()) + ", --r is " + std::to_string(r),
                {p.r(), r});
  Outcome o;
  o.report["tolerance"] = tol;
  o.report["r"] = r;
  o.report["monotone_count"] = enumerate_monotone(r).size();
  Json classes = Json::array(), injective = Json::array();
  for (std::size_t k = 0; k < s.system.connectors.size(); ++k) {
    classes.push_back(io::module_matrix_json(p.connector_class(static_cast<int>(k))));
    injective.push_back(is_injective(p.connector_class(static_cast<int>(k))));
  }
  o.report["connector_classes"] = classes;
  o.report["injective"] = injective;
  if (element.empty()) return o;
  ColimitElement e = io::parse_colimit_element(io::read_document(element), r);
  const int target = push_to > 0 ? push_to - 1 : e.stage;
  o.report["pushed"] = {{"stage", target + 1}, {"value", io::module_json(p.push(e, target))}};
  if (!compare.empty()) {
    ColimitElement f = io::parse_colimit_element(io::read_document(compare), r);
    Comparison c = equal_up_to_stage(p, e, f, target);
    o.report["comparison"] = c == Comparison::Equal                   ? "Equal"
                             : c == Comparison::Distinct              ? "Distinct"
                                                                      : "NotYetDistinguishable";
    o.code = c == Comparison::Equal ? kSuccess : kNegative;
  }
  return o;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Digraph algebras, regular maps and their limits", "limitalg"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string output;
  app.add_option("--output", output, "Write the report to this file");

  std::function<Outcome(double)> action;

  auto* validate = app.add_subcommand("validate", "Check every object of a workspace");
  std::string ws_path;
  validate->add_option("workspace,--workspace", ws_path, "Workspace file")->required();
  validate->callback([&] { action = [&](double tol) { return cmd_validate(ws_path, tol); }; });

  std::string map_path, map_name;
  auto map_options = [&](CLI::App* sub) {
    sub->add_option("--map", map_path, "Map file (bare map or workspace)")->required();
    sub->add_option("--name", map_name, "Entry name inside a workspace");
  };

  auto* decompose = app.add_subcommand("decompose", "Maximal multiplicity-one decomposition");
  map_options(decompose);
  decompose->callback(
      [&] { action = [&](double tol) { return cmd_decompose(map_path, map_name, tol); }; });

  auto* conj = app.add_subcommand("conjugacy", "Inner conjugacy of two standard maps");
  std::string lhs, rhs, lhs_name, rhs_name;
  conj->add_option("--lhs", lhs, "First map")->required();
  conj->add_option("--rhs", rhs, "Second map")->required();
  conj->add_option("--lhs-name", lhs_name, "Entry name inside the first file");
  conj->add_option("--rhs-name", rhs_name, "Entry name inside the second file");
  conj->callback([&] {
    action = [&](double tol) { return cmd_conjugacy(lhs, lhs_name, rhs, rhs_name, tol); };
  });

  auto* standardize = app.add_subcommand("standardize", "Standard form of a regular map");
  map_options(standardize);
  std::string theta_path, phi1_path;
  standardize->add_option("--theta", theta_path, "Restandardize the triangle theta = map ∘ phi1");
  standardize->add_option("--phi1", phi1_path, "Inner map of the triangle");
  standardize->callback([&] {
    action = [&](double tol) {
      return cmd_standardize(map_path, map_name, theta_path, phi1_path, tol);
    };
  });

  auto* inter = app.add_subcommand("intertwine", "Correct a crossover diagram");
  std::string diagram_path, diagram_name, mode;
  inter->add_option("--diagram", diagram_path, "Diagram file")->required();
  inter->add_option("--name", diagram_name, "Entry name inside a workspace");
  inter->add_option("--mode", mode, "exact or approx (default: the diagram's mode)");
  inter->callback([&] {
    action = [&](double tol) { return cmd_intertwine(diagram_path, diagram_name, mode, tol); };
  });

  auto* detect = app.add_subcommand("detect", "Summand census or a single test product");
  map_options(detect);
  std::string against;
  detect->add_option("--against", against, "Single-summand standard map to test for");
  detect->callback(
      [&] { action = [&](double tol) { return cmd_detect(map_path, map_name, against, tol); }; });

  auto* regular = app.add_subcommand("regular-test", "Decide regularity of a numeric map");
  map_options(regular);
  regular->callback(
      [&] { action = [&](double tol) { return cmd_regular_test(map_path, map_name, tol); }; });

  auto* spectrum = app.add_subcommand("spectrum", "Finite-depth path space and relation");
  std::string system_path, system_name, compare, compare_name;
  int depth = 1;
  spectrum->add_option("--system", system_path, "System file")->required();
  spectrum->add_option("--name", system_name, "Entry name inside a workspace");
  spectrum->add_option("--depth", depth, "Depth")->required()->check(CLI::PositiveNumber);
  spectrum->add_option("--compare", compare, "Second system to compare against");
  spectrum->add_option("--compare-name", compare_name, "Entry name inside the second file");
  spectrum->callback([&] {
    action = [&](double tol) {
      return cmd_spectrum(system_path, system_name, depth, compare, compare_name, tol);
    };
  });

  auto* dimmod = app.add_subcommand("dimmod", "Dimension module of a T_r system");
  int r = 1, push_to = 0;
  std::string element, compare_element;
  dimmod->add_option("--system", system_path, "System file")->required();
  dimmod->add_option("--name", system_name, "Entry name inside a workspace");
  dimmod->add_option("--r", r, "Band count")->required()->check(CLI::PositiveNumber);
  dimmod->add_option("--element", element, "Element {stage, value} to push forward");
  dimmod->add_option("--push-to", push_to, "Stage to push to (1-based)");
  dimmod->add_option("--compare", compare_element, "Second element for equal_up_to_stage");
  dimmod->callback([&] {
    action = [&](double tol) {
      return cmd_dimmod(system_path, system_name, r, element, push_to, compare_element, tol);
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "limitalg: " << e.what() << "\n";
    return kInputError;
  }

  Outcome outcome;
  try {
    outcome = action(tolerance_from_env());
  } catch (const Error& e) {
    err << "limitalg: " << e.what() << "\n";
    outcome.report = {{"error", error_json(e)}};
    outcome.code = is_input_error(e.code()) ? kInputError : kNegative;
  } catch (const std::exception& e) {
    err << "limitalg: " << e.what() << "\n";
    outcome.report = {{"error", {{"code", "InvalidInput"}, {"message", e.what()}}}};
    outcome.code = kInputError;
  }

  const std::string text = outcome.report.dump(2) + "\n";
  if (output.empty()) {
    out << text;
  } else {
    std::ofstream f(output, std::ios::binary);
    if (!f) {
      err << "limitalg: cannot write " << output << "\n";
      return kInputError;
    }
    f << text;
  }
  return outcome.code;
}

}  // namespace limitalg::cli
