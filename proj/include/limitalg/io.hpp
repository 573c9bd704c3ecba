#pragma once

// JSON documents: workspaces of named algebras, maps, systems and diagrams,
// their canonical serialization, and encoders for reports.
//
// Indices in JSON are 1-based. Complex numbers are [re, im] pairs.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "limitalg/detect.hpp"
#include "limitalg/dimmod.hpp"
#include "limitalg/intertwine.hpp"
#include "limitalg/spectrum.hpp"

namespace limitalg::io {

using Json = nlohmann::json;

inline constexpr int kWorkspaceVersion = 1;

struct AlgebraEntry {
  AlgebraPtr algebra;
  std::optional<TrShape> shape;  // declared as a sum of T_r summands
};

struct SystemEntry {
  DirectSystem system;
  std::vector<std::optional<TrShape>> shapes;  // per stage
  std::vector<std::string> connector_refs;     // empty string: inline
  /// All stage shapes, or NotTrBand naming the first undeclared stage.
  std::vector<TrShape> tr_shapes() const;
};

struct DiagramEntry {
  CrossoverDiagram diagram;
  SystemEntry top;  // as declared, for serialization
  SystemEntry bottom;
  std::string top_ref;
  std::string bottom_ref;
  std::vector<std::string> alpha_refs;
  std::vector<std::string> beta_refs;
};

struct Workspace {
  int version = kWorkspaceVersion;
  std::map<std::string, AlgebraEntry> algebras;
  std::map<std::string, CrossoverMap> maps;
  std::map<std::string, SystemEntry> systems;
  std::map<std::string, DiagramEntry> diagrams;
};

/// Throws SchemaError (subject: JSON pointer) or DanglingReference (subject:
/// the missing name). Mathematical validation errors of the contents
/// propagate with their own codes.
Workspace parse_workspace(std::string_view bytes);
Workspace workspace_from_json(const Json& doc);

Json to_json(const Workspace& ws);
/// Sorted keys, two-space indentation, trailing newline.
std::string serialize(const Workspace& ws);

Json parse_document(std::string_view bytes);
Json read_document(const std::string& path);

// Standalone documents are either a bare object or a workspace; `name`
// selects the entry of a workspace and may be empty when there is only one.
CrossoverMap load_map(const Json& doc, const std::string& name = "");
SystemEntry load_system(const Json& doc, const std::string& name = "");
DiagramEntry load_diagram(const Json& doc, const std::string& name = "");

// Encoders.
Json complex_json(Complex z);
Json matrix_json(const Matrix& m);
Json algebra_json(const DigraphAlgebra& a);
Json map_json(const CrossoverMap& m);
Json summand_json(const MultiplicityOneMap& m);
Json index_map_json(const IndexMap& pi);
Json class_key_json(const ClassKey& key);
Json rank_matrix_json(const RankMatrix& m);
Json census_json(const SummandCensus& c);
Json unitary_json(const Unitary& u);
Json diagram_report_json(const DiagramReport& r);
Json relation_json(const CylinderRelation& rel);
Json statistics_json(const RelationStatistics& st);
Json semiring_json(const SemiringElement& s);
Json module_json(const StageModule& x);
Json module_matrix_json(const ModuleMapMatrix& m);

// Decoders for small report-side inputs.
SemiringElement parse_semiring(const Json& j, int r, const std::string& pointer = "");
/// {"stage": k (1-based), "value": [element per summand]}.
ColimitElement parse_colimit_element(const Json& j, int r, const std::string& pointer = "");

}  // namespace limitalg::io
