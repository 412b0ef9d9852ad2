#pragma once

#include "replivol/error.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace replivol::pieces {

enum class Errc {
  BadTemplate,
  ScheduleMismatch,
  SizeExceeded,
  OddLength,
  OddDimension,
  EndpointMismatch,
  TooFewStrands,
  BadGluing,
};
const char* to_string(Errc code);

class PieceError : public Error {
 public:
  PieceError(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// (face slot, endpoint label); faces are 0-based, labels 1-based.
struct Endpoint {
  int face = 0;
  int label = 1;
  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

struct Strand {
  Endpoint a;
  Endpoint b;
  friend bool operator==(const Strand&, const Strand&) = default;
};

struct BoundaryComponent {
  std::string name;
  int genus = 0;
  friend bool operator==(const BoundaryComponent&, const BoundaryComponent&) = default;
};

/// A piece: face slots V^1..V^k with endpoint counts, a perfect matching of
/// the endpoints (strands) and closed components. Faces 2k and 2k+1 (0-based)
/// form the k-th face pair.
struct PieceTemplate {
  std::string id;
  std::vector<int> faces;  // endpoint count per face slot
  std::vector<Strand> strands;
  int closed_components = 0;
  std::vector<BoundaryComponent> free_boundary;
  std::vector<int> pair_e_data;  // intersection circles/arcs shared by each face pair

  /// Set on templates produced by `reflect`: the template they mirror and,
  /// per face slot here, the face slot of that template.
  std::string mirror_of;
  std::vector<int> mirror_faces;

  int ell() const { return static_cast<int>(faces.size() / 2); }
  int endpoint_count() const;

  /// Partner of an endpoint under the strand matching.
  Endpoint partner(const Endpoint& e) const;

  friend bool operator==(const PieceTemplate&, const PieceTemplate&) = default;
};

/// Checks counts, labels and that the strands form a fixed-point-free
/// involution covering every endpoint. Throws BadTemplate.
void validate_template(const PieceTemplate& t);

/// The mirror image across face pair `pair`: faces 2*pair and 2*pair+1 trade
/// places, endpoint labels are kept. Reflecting twice gives back `t`.
PieceTemplate reflect(const PieceTemplate& t, int pair = 0);

/// Disjoint union of two templates with the same number of face slots: face
/// slot k of the result carries the endpoints of slot k of `a` followed by
/// those of `b`.
PieceTemplate disjoint_union(const PieceTemplate& a, const PieceTemplate& b, const std::string& id);

struct SlotRef {
  std::size_t copy = 0;
  int face = 0;
  friend auto operator<=>(const SlotRef&, const SlotRef&) = default;
};

struct Gluing {
  SlotRef a;
  SlotRef b;
  /// bijection[k-1] is the label on b identified with label k on a.
  std::vector<int> bijection;
};

struct Copy {
  std::size_t template_index = 0;
  std::vector<int> coords;  // replication coordinates, one per face pair (or a builder position)
};

class GluingComplex {
 public:
  std::size_t add_template(const PieceTemplate& t);
  std::size_t add_copy(std::size_t template_index, std::vector<int> coords = {});
  /// Glues two distinct free slots with equal endpoint counts. An empty
  /// bijection means the identity.
  void glue(SlotRef a, SlotRef b, std::vector<int> bijection = {});

  const std::vector<PieceTemplate>& templates() const noexcept { return templates_; }
  const std::vector<Copy>& copies() const noexcept { return copies_; }
  const std::vector<Gluing>& gluings() const noexcept { return gluings_; }
  const PieceTemplate& template_of(std::size_t copy) const { return templates_[copies_[copy].template_index]; }

  /// Index into gluings() of the gluing at a slot, if any.
  std::optional<std::size_t> gluing_at(SlotRef s) const;
  bool fully_glued() const;
  std::size_t free_slot_count() const;

 private:
  std::vector<PieceTemplate> templates_;
  std::vector<Copy> copies_;
  std::vector<Gluing> gluings_;
  std::vector<std::vector<std::optional<std::size_t>>> slot_gluing_;
};

struct ReplicantSchedule {
  std::vector<int> indices;  // 2m_1, ..., 2m_l
  std::vector<int> order;    // permutation of 1..l; empty means 1..l
};

/// The multi-index replicant built by replicating one face pair at a time in
/// the schedule's order. Copy k of a step glues to copy k+1 along the pair's
/// second face for even k and along its first face for odd k (0-based).
GluingComplex replicate(const PieceTemplate& p, const ReplicantSchedule& sched);

/// Disjoint union of complexes (templates merged by id).
GluingComplex disjoint_union(const GluingComplex& a, const GluingComplex& b);

struct IsoResult {
  bool isomorphic = false;
  std::vector<std::size_t> witness;  // copy of a -> copy of b
  std::string reason;
};

/// Isomorphism of gluing complexes up to copy relabelling. Mirror templates
/// are identified with their base and face slots re-mapped accordingly.
IsoResult isomorphic(const GluingComplex& a, const GluingComplex& b);

/// Checks that `witness` maps every gluing of a onto a gluing of b with the
/// same faces and bijection, over the same normalized templates.
bool verify_witness(const GluingComplex& a, const GluingComplex& b, const std::vector<std::size_t>& witness);

struct ComponentCount {
  std::size_t closed = 0;  // closed curves, including closed components of copies
  std::size_t open = 0;    // arcs ending on free faces
};

ComponentCount count_components(const GluingComplex& c);

/// Bracelet: tangle i's second face glued to tangle i+1's first face, cyclically.
/// `min_strands` is the least number of connecting strands allowed per gluing.
GluingComplex build_bracelet(const std::vector<PieceTemplate>& tangles, int min_strands = 2);

/// Torus lattice: cell (i,j) glues face 1 to face 0 of (i+1,j) and face 3 to
/// face 2 of (i,j+1), with wraparound.
GluingComplex build_torus_lattice(const std::vector<std::vector<PieceTemplate>>& grid);

/// Cyclic stack of two-faced tangles (face 1 of i to face 0 of i+1); a single
/// tangle is glued to itself. At least one connecting strand per gluing.
GluingComplex build_cylinder_stack(const std::vector<PieceTemplate>& tangles);

/// Collapses a partially glued complex to a single template whose faces are
/// the listed free slots concatenated in order. Strands are traced through
/// the gluings; cycles become closed components.
PieceTemplate collapse(const GluingComplex& c, const std::vector<std::vector<SlotRef>>& faces,
                       const std::string& id);

/// Column of cubical tangles (faces W, E, S, N) stacked S-to-N cyclically,
/// collapsed to a two-faced tangle with the W faces on one side and E on the other.
PieceTemplate cube_column(const std::vector<PieceTemplate>& cubes, const std::string& id);

}  // namespace replivol::pieces
