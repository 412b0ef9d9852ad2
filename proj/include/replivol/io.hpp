#pragma once

#include "replivol/arborescent.hpp"
#include "replivol/bounds.hpp"
#include "replivol/graphs.hpp"
#include "replivol/pieces.hpp"
#include "replivol/words.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

/// JSON formats of every module. Parse failures throw replivol::Error named
/// "ParseError" (input class).
namespace replivol::io {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::filesystem::path& path);
Json parse_json(const std::string& text, const std::string& what = "input");

// words: {"order": 10, "indices": [...]}; rationals as "p/q" strings
words::CyclicWord word_from_json(const Json& j);
Json to_json(const words::CyclicWord& w);
Json to_json(const words::Coefficients& c);
words::Coefficients coefficients_from_json(const Json& j);
Json to_json(const words::ReductionCertificate& cert);
words::ReductionCertificate certificate_from_json(const Json& j);

// pieces: strands as [[face, label], [face, label]] with 0-based faces
pieces::PieceTemplate template_from_json(const Json& j);
Json to_json(const pieces::PieceTemplate& t);
pieces::GluingComplex complex_from_json(const Json& j);
Json to_json(const pieces::GluingComplex& c);
pieces::ReplicantSchedule schedule_from_json(const Json& j);

// arborescent: a string in the expression syntax or a node tree
arborescent::ArbExpr expression_from_json(const Json& j);
Json to_json(const arborescent::ArbExpr& e);
Json to_json(const arborescent::Classification& c);

// graphs
graphs::ReflectionGraph reflection_graph_from_json(const Json& j);
Json to_json(const graphs::ReflectionGraph& g);
/// The "rotation" member of a graph file; nullopt when absent.
std::optional<graphs::RotationSystem> rotation_from_json(const Json& j);
Json to_json(const graphs::ValidationReport& r);
Json to_json(const graphs::FaceReport& f);

// bounds
bounds::VolumeDB database_from_json(const Json& j);
Json to_json(const bounds::VolumeDB& db);
bounds::DbKey key_from_json(const Json& j);
bounds::DbEntry entry_from_json(const Json& j);
/// Default family, ambient and named templates come from the enclosing spec.
bounds::TangleRef tangle_from_json(const Json& j, bounds::Family family, Ambient ambient,
                                   const std::map<std::string, pieces::PieceTemplate>& templates = {});
bounds::LinkSpec link_spec_from_json(const Json& j);
Json to_json(const bounds::HyperbolicityCertificate& c);
Json to_json(const bounds::BoundReport& r, int precision);
std::string render_markdown(const bounds::BoundReport& r, int precision);
std::string render_plain(const bounds::BoundReport& r, int precision);

}  // namespace replivol::io
