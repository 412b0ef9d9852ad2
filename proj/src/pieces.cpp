#include "replivol/pieces.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace replivol::pieces {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::BadTemplate: return "BadTemplate";
    case Errc::ScheduleMismatch: return "ScheduleMismatch";
    case Errc::SizeExceeded: return "SizeExceeded";
    case Errc::OddLength: return "OddLength";
    case Errc::OddDimension: return "OddDimension";
    case Errc::EndpointMismatch: return "EndpointMismatch";
    case Errc::TooFewStrands: return "TooFewStrands";
    case Errc::BadGluing: return "BadGluing";
  }
  return "PieceError";
}

PieceError::PieceError(Errc code, const std::string& message)
    : Error(pieces::to_string(code), message,
            code == Errc::SizeExceeded ? ErrorClass::Domain : ErrorClass::Input),
      code_(code) {}

namespace {

std::string ep_string(const Endpoint& e) {
  return "(" + std::to_string(e.face) + "," + std::to_string(e.label) + ")";
}

}  // namespace

int PieceTemplate::endpoint_count() const { return std::accumulate(faces.begin(), faces.end(), 0); }

Endpoint PieceTemplate::partner(const Endpoint& e) const {
  for (const Strand& s : strands) {
    if (s.a == e) return s.b;
    if (s.b == e) return s.a;
  }
  throw PieceError(Errc::BadTemplate, "endpoint " + ep_string(e) + " is not matched in template " + id);
}

void validate_template(const PieceTemplate& t) {
  auto bad = [&](const std::string& why) { throw PieceError(Errc::BadTemplate, "template '" + t.id + "': " + why); };
  if (t.id.empty()) bad("empty id");
  for (int n : t.faces) {
    if (n < 0) bad("negative endpoint count");
  }
  if (t.closed_components < 0) bad("negative closed component count");
  std::set<Endpoint> seen;
  auto check = [&](const Endpoint& e) {
    if (e.face < 0 || e.face >= static_cast<int>(t.faces.size())) bad("endpoint " + ep_string(e) + " on a missing face");
    if (e.label < 1 || e.label > t.faces[static_cast<std::size_t>(e.face)]) bad("endpoint " + ep_string(e) + " label out of range");
    if (!seen.insert(e).second) bad("endpoint " + ep_string(e) + " matched twice");
  };
  for (const Strand& s : t.strands) {
    if (s.a == s.b) bad("strand from " + ep_string(s.a) + " to itself");
    check(s.a);
    check(s.b);
  }
  if (static_cast<int>(seen.size()) != t.endpoint_count()) bad("strands do not cover every endpoint");
  if (!t.pair_e_data.empty() && t.pair_e_data.size() != t.faces.size() / 2) bad("one E-count per face pair expected");
  if (!t.mirror_of.empty()) {
    std::vector<int> p = t.mirror_faces;
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] != static_cast<int>(i)) bad("mirror face map is not a permutation");
    }
    if (p.size() != t.faces.size()) bad("mirror face map has the wrong length");
  }
}

namespace {

PieceTemplate permute_faces(const PieceTemplate& t, const std::vector<int>& new_of_old) {
  PieceTemplate out = t;
  for (std::size_t f = 0; f < t.faces.size(); ++f) out.faces[static_cast<std::size_t>(new_of_old[f])] = t.faces[f];
  for (Strand& s : out.strands) {
    s.a.face = new_of_old[static_cast<std::size_t>(s.a.face)];
    s.b.face = new_of_old[static_cast<std::size_t>(s.b.face)];
  }
  return out;
}

// Base template of a mirror template, reconstructed from its face map.
PieceTemplate unmirror(const PieceTemplate& t) {
  if (t.mirror_of.empty()) return t;
  PieceTemplate base = permute_faces(t, t.mirror_faces);
  base.id = t.mirror_of;
  base.mirror_of.clear();
  base.mirror_faces.clear();
  return base;
}

}  // namespace

PieceTemplate reflect(const PieceTemplate& t, int pair) {
  validate_template(t);
  if (pair < 0 || pair >= t.ell()) {
    throw PieceError(Errc::BadTemplate, "template '" + t.id + "' has no face pair " + std::to_string(pair));
  }
  const std::size_t nf = t.faces.size();
  std::vector<int> swap(nf);
  std::iota(swap.begin(), swap.end(), 0);
  std::swap(swap[static_cast<std::size_t>(2 * pair)], swap[static_cast<std::size_t>(2 * pair + 1)]);

  const PieceTemplate base = unmirror(t);
  std::vector<int> to_base(nf);  // slot here -> base slot
  if (t.mirror_of.empty()) {
    std::iota(to_base.begin(), to_base.end(), 0);
  } else {
    to_base = t.mirror_faces;
  }
  std::vector<int> composed(nf);
  for (std::size_t f = 0; f < nf; ++f) composed[f] = to_base[static_cast<std::size_t>(swap[f])];

  bool identity = true;
  for (std::size_t f = 0; f < nf; ++f) identity = identity && composed[f] == static_cast<int>(f);
  if (identity) return base;

  // base slot b sits at slot inverse(composed)[b]
  std::vector<int> new_of_base(nf);
  for (std::size_t f = 0; f < nf; ++f) new_of_base[static_cast<std::size_t>(composed[f])] = static_cast<int>(f);
  PieceTemplate out = permute_faces(base, new_of_base);
  out.mirror_of = base.id;
  out.mirror_faces = composed;
  out.id = base.id + "^R";
  if (base.ell() > 1) {
    std::string tag;
    for (int k = 0; k < base.ell(); ++k) {
      if (composed[static_cast<std::size_t>(2 * k)] != 2 * k) tag += (tag.empty() ? "" : ",") + std::to_string(k + 1);
    }
    out.id += "(" + tag + ")";
  }
  return out;
}

PieceTemplate disjoint_union(const PieceTemplate& a, const PieceTemplate& b, const std::string& id) {
  validate_template(a);
  validate_template(b);
  if (a.faces.size() != b.faces.size()) {
    throw PieceError(Errc::BadTemplate, "disjoint union needs equal numbers of face slots");
  }
  PieceTemplate out;
  out.id = id;
  out.faces.resize(a.faces.size());
  for (std::size_t f = 0; f < a.faces.size(); ++f) out.faces[f] = a.faces[f] + b.faces[f];
  out.strands = a.strands;
  for (Strand s : b.strands) {
    s.a.label += a.faces[static_cast<std::size_t>(s.a.face)];
    s.b.label += a.faces[static_cast<std::size_t>(s.b.face)];
    out.strands.push_back(s);
  }
  out.closed_components = a.closed_components + b.closed_components;
  out.free_boundary = a.free_boundary;
  out.free_boundary.insert(out.free_boundary.end(), b.free_boundary.begin(), b.free_boundary.end());
  if (!a.pair_e_data.empty() && a.pair_e_data.size() == b.pair_e_data.size()) {
    out.pair_e_data.resize(a.pair_e_data.size());
    for (std::size_t k = 0; k < a.pair_e_data.size(); ++k) out.pair_e_data[k] = a.pair_e_data[k] + b.pair_e_data[k];
  }
  return out;
}

std::size_t GluingComplex::add_template(const PieceTemplate& t) {
  for (std::size_t i = 0; i < templates_.size(); ++i) {
    if (templates_[i].id == t.id) {
      if (!(templates_[i] == t)) {
        throw PieceError(Errc::BadTemplate, "two different templates named '" + t.id + "'");
      }
      return i;
    }
  }
  validate_template(t);
  templates_.push_back(t);
  return templates_.size() - 1;
}

std::size_t GluingComplex::add_copy(std::size_t template_index, std::vector<int> coords) {
  if (template_index >= templates_.size()) throw PieceError(Errc::BadGluing, "copy of a missing template");
  copies_.push_back(Copy{template_index, std::move(coords)});
  slot_gluing_.emplace_back(templates_[template_index].faces.size());
  return copies_.size() - 1;
}

void GluingComplex::glue(SlotRef a, SlotRef b, std::vector<int> bijection) {
  auto check_slot = [&](SlotRef s) {
    if (s.copy >= copies_.size()) throw PieceError(Errc::BadGluing, "gluing refers to missing copy " + std::to_string(s.copy));
    const auto& faces = template_of(s.copy).faces;
    if (s.face < 0 || s.face >= static_cast<int>(faces.size())) {
      throw PieceError(Errc::BadGluing, "copy " + std::to_string(s.copy) + " has no face slot " + std::to_string(s.face));
    }
    if (slot_gluing_[s.copy][static_cast<std::size_t>(s.face)]) {
      throw PieceError(Errc::BadGluing, "face slot " + std::to_string(s.face) + " of copy " + std::to_string(s.copy) +
                                            " is already glued");
    }
    return faces[static_cast<std::size_t>(s.face)];
  };
  if (a == b) throw PieceError(Errc::BadGluing, "a face slot cannot be glued to itself");
  const int na = check_slot(a);
  const int nb = check_slot(b);
  if (na != nb) {
    throw PieceError(Errc::EndpointMismatch, "face slot " + std::to_string(a.face) + " of copy " + std::to_string(a.copy) +
                                                 " has " + std::to_string(na) + " endpoints but face slot " +
                                                 std::to_string(b.face) + " of copy " + std::to_string(b.copy) +
                                                 " has " + std::to_string(nb));
  }
  if (bijection.empty()) {
    bijection.resize(static_cast<std::size_t>(na));
    std::iota(bijection.begin(), bijection.end(), 1);
  }
  std::vector<int> sorted = bijection;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != static_cast<int>(i) + 1 || static_cast<int>(sorted.size()) != na) {
      throw PieceError(Errc::BadGluing, "endpoint bijection is not a permutation of 1.." + std::to_string(na));
    }
  }
  gluings_.push_back(Gluing{a, b, std::move(bijection)});
  slot_gluing_[a.copy][static_cast<std::size_t>(a.face)] = gluings_.size() - 1;
  slot_gluing_[b.copy][static_cast<std::size_t>(b.face)] = gluings_.size() - 1;
}

std::optional<std::size_t> GluingComplex::gluing_at(SlotRef s) const {
  if (s.copy >= copies_.size() || s.face < 0 || s.face >= static_cast<int>(slot_gluing_[s.copy].size())) {
    return std::nullopt;
  }
  return slot_gluing_[s.copy][static_cast<std::size_t>(s.face)];
}

std::size_t GluingComplex::free_slot_count() const {
  std::size_t n = 0;
  for (const auto& slots : slot_gluing_) {
    for (const auto& g : slots) n += g ? 0 : 1;
  }
  return n;
}

bool GluingComplex::fully_glued() const { return free_slot_count() == 0; }

GluingComplex replicate(const PieceTemplate& p, const ReplicantSchedule& sched) {
  validate_template(p);
  const int ell = p.ell();
  if (p.faces.size() % 2 != 0) {
    throw PieceError(Errc::ScheduleMismatch, "template '" + p.id + "' has an odd number of face slots");
  }
  if (static_cast<int>(sched.indices.size()) != ell) {
    throw PieceError(Errc::ScheduleMismatch, "schedule has " + std::to_string(sched.indices.size()) +
                                                 " indices but template '" + p.id + "' has " + std::to_string(ell) +
                                                 " face pairs");
  }
  for (int n : sched.indices) {
    if (n < 2 || n % 2 != 0) {
      throw PieceError(Errc::ScheduleMismatch, "replication indices must be positive even integers, got " + std::to_string(n));
    }
  }
  std::vector<int> order = sched.order;
  if (order.empty()) {
    order.resize(static_cast<std::size_t>(ell));
    std::iota(order.begin(), order.end(), 1);
  }
  {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] != static_cast<int>(i) + 1 || static_cast<int>(sorted.size()) != ell) {
        throw PieceError(Errc::ScheduleMismatch, "schedule order is not a permutation of 1.." + std::to_string(ell));
      }
    }
  }
  std::size_t total = 1;
  for (int n : sched.indices) {
    total *= static_cast<std::size_t>(n);
    if (total > 1000000) throw PieceError(Errc::SizeExceeded, "replicant would exceed 10^6 copies");
  }

  // coords of each copy and gluings, grown one face pair at a time
  std::vector<std::vector<int>> coords{std::vector<int>(static_cast<std::size_t>(ell), 0)};
  std::vector<Gluing> glue;
  for (int step : order) {
    const int k = step - 1;
    const int n = sched.indices[static_cast<std::size_t>(k)];
    const std::size_t inner = coords.size();
    std::vector<std::vector<int>> next;
    std::vector<Gluing> next_glue;
    for (int c = 0; c < n; ++c) {
      for (std::size_t i = 0; i < inner; ++i) {
        next.push_back(coords[i]);
        next.back()[static_cast<std::size_t>(k)] = c;
      }
      const std::size_t offset = static_cast<std::size_t>(c) * inner;
      for (const Gluing& g : glue) {
        next_glue.push_back(Gluing{{g.a.copy + offset, g.a.face}, {g.b.copy + offset, g.b.face}, g.bijection});
      }
    }
    for (int c = 0; c < n; ++c) {
      const int d = (c + 1) % n;
      const int face = (c % 2 == 0) ? 2 * k + 1 : 2 * k;
      for (std::size_t i = 0; i < inner; ++i) {
        next_glue.push_back(Gluing{{static_cast<std::size_t>(c) * inner + i, face},
                                   {static_cast<std::size_t>(d) * inner + i, face},
                                   {}});
      }
    }
    coords = std::move(next);
    glue = std::move(next_glue);
  }

  GluingComplex out;
  const std::size_t t = out.add_template(p);
  for (auto& c : coords) out.add_copy(t, std::move(c));
  for (auto& g : glue) out.glue(g.a, g.b, std::move(g.bijection));
  return out;
}

GluingComplex disjoint_union(const GluingComplex& a, const GluingComplex& b) {
  GluingComplex out;
  std::vector<std::size_t> ta, tb;
  for (const auto& t : a.templates()) ta.push_back(out.add_template(t));
  for (const auto& t : b.templates()) tb.push_back(out.add_template(t));
  for (const auto& c : a.copies()) out.add_copy(ta[c.template_index], c.coords);
  for (const auto& c : b.copies()) out.add_copy(tb[c.template_index], c.coords);
  for (const auto& g : a.gluings()) out.glue(g.a, g.b, g.bijection);
  const std::size_t off = a.copies().size();
  for (const auto& g : b.gluings()) out.glue({g.a.copy + off, g.a.face}, {g.b.copy + off, g.b.face}, g.bijection);
  return out;
}

namespace {

constexpr std::size_t kIsoLimit = 10000;

struct NormSlot {
  bool glued = false;
  std::size_t copy = 0;
  int face = 0;
  std::vector<int> map;  // label here -> label on the partner slot
};

struct NormCopy {
  std::size_t key = 0;  // index of the normalized template
  std::vector<NormSlot> slots;
};

struct Normalized {
  std::vector<PieceTemplate> bases;
  std::vector<NormCopy> copies;
};

std::vector<int> inverse_perm(const std::vector<int>& bij) {
  std::vector<int> inv(bij.size());
  for (std::size_t i = 0; i < bij.size(); ++i) inv[static_cast<std::size_t>(bij[i] - 1)] = static_cast<int>(i) + 1;
  return inv;
}

std::size_t base_key(std::vector<PieceTemplate>& bases, const PieceTemplate& base) {
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (bases[i].id == base.id) return i;
  }
  bases.push_back(base);
  return bases.size() - 1;
}

Normalized normalize(const GluingComplex& c) {
  Normalized n;
  std::vector<std::size_t> key_of_template;
  std::vector<std::vector<int>> to_base;
  for (const auto& t : c.templates()) {
    key_of_template.push_back(base_key(n.bases, unmirror(t)));
    std::vector<int> map(t.faces.size());
    if (t.mirror_of.empty()) {
      std::iota(map.begin(), map.end(), 0);
    } else {
      map = t.mirror_faces;
    }
    to_base.push_back(std::move(map));
  }
  n.copies.resize(c.copies().size());
  for (std::size_t i = 0; i < c.copies().size(); ++i) {
    const std::size_t ti = c.copies()[i].template_index;
    n.copies[i].key = key_of_template[ti];
    n.copies[i].slots.resize(c.templates()[ti].faces.size());
  }
  auto base_face = [&](const SlotRef& s) {
    return to_base[c.copies()[s.copy].template_index][static_cast<std::size_t>(s.face)];
  };
  for (const Gluing& g : c.gluings()) {
    const int fa = base_face(g.a);
    const int fb = base_face(g.b);
    n.copies[g.a.copy].slots[static_cast<std::size_t>(fa)] = NormSlot{true, g.b.copy, fb, g.bijection};
    n.copies[g.b.copy].slots[static_cast<std::size_t>(fb)] = NormSlot{true, g.a.copy, fa, inverse_perm(g.bijection)};
  }
  return n;
}

// Breadth-first order from `root`, following face slots in order. Returns the
// visit order; `code` receives a description that is equal for two roots iff
// the slot-respecting relabelling they induce is an isomorphism.
std::vector<std::size_t> bfs_code(const Normalized& n, const std::vector<std::string>& key_names, std::size_t root,
                                  std::vector<long long>& code) {
  std::map<std::size_t, std::size_t> order;
  std::vector<std::size_t> visit{root};
  order[root] = 0;
  code.clear();
  for (std::size_t head = 0; head < visit.size(); ++head) {
    const NormCopy& c = n.copies[visit[head]];
    for (const NormSlot& s : c.slots) {
      if (s.glued && !order.count(s.copy)) {
        order[s.copy] = visit.size();
        visit.push_back(s.copy);
      }
    }
  }
  for (std::size_t v : visit) {
    const NormCopy& c = n.copies[v];
    code.push_back(-7);
    // template identity by name, hashed into the code stream
    for (char ch : key_names[c.key]) code.push_back(static_cast<unsigned char>(ch));
    code.push_back(-8);
    for (const NormSlot& s : c.slots) {
      if (!s.glued) {
        code.push_back(-1);
        continue;
      }
      code.push_back(static_cast<long long>(order.at(s.copy)));
      code.push_back(s.face);
      for (int x : s.map) code.push_back(x);
      code.push_back(-2);
    }
  }
  return visit;
}

std::vector<std::vector<std::size_t>> components(const Normalized& n) {
  std::vector<int> comp(n.copies.size(), -1);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < n.copies.size(); ++s) {
    if (comp[s] >= 0) continue;
    out.emplace_back();
    std::deque<std::size_t> q{s};
    comp[s] = static_cast<int>(out.size() - 1);
    while (!q.empty()) {
      std::size_t v = q.front();
      q.pop_front();
      out.back().push_back(v);
      for (const NormSlot& sl : n.copies[v].slots) {
        if (sl.glued && comp[sl.copy] < 0) {
          comp[sl.copy] = comp[s];
          q.push_back(sl.copy);
        }
      }
    }
  }
  return out;
}

}  // namespace

IsoResult isomorphic(const GluingComplex& a, const GluingComplex& b) {
  if (a.copies().size() > kIsoLimit || b.copies().size() > kIsoLimit) {
    throw PieceError(Errc::SizeExceeded, "isomorphism test limited to 10^4 copies");
  }
  IsoResult r;
  if (a.copies().size() != b.copies().size()) {
    r.reason = "different numbers of copies (" + std::to_string(a.copies().size()) + " vs " +
               std::to_string(b.copies().size()) + ")";
    return r;
  }
  if (a.gluings().size() != b.gluings().size()) {
    r.reason = "different numbers of gluings";
    return r;
  }
  const Normalized na = normalize(a);
  const Normalized nb = normalize(b);
  for (const auto& ta : na.bases) {
    for (const auto& tb : nb.bases) {
      if (ta.id == tb.id && !(ta == tb)) {
        r.reason = "template '" + ta.id + "' differs between the complexes";
        return r;
      }
    }
  }
  std::vector<std::string> names_a, names_b;
  for (const auto& t : na.bases) names_a.push_back(t.id);
  for (const auto& t : nb.bases) names_b.push_back(t.id);

  const auto comps_a = components(na);
  const auto comps_b = components(nb);
  if (comps_a.size() != comps_b.size()) {
    r.reason = "different numbers of connected components";
    return r;
  }
  std::vector<bool> used(comps_b.size(), false);
  std::vector<std::size_t> witness(a.copies().size());
  std::vector<long long> code_a, code_b;
  for (const auto& ca : comps_a) {
    std::vector<std::size_t> visit_a = bfs_code(na, names_a, ca.front(), code_a);
    bool matched = false;
    for (std::size_t j = 0; j < comps_b.size() && !matched; ++j) {
      if (used[j] || comps_b[j].size() != ca.size()) continue;
      for (std::size_t root : comps_b[j]) {
        if (names_b[nb.copies[root].key] != names_a[na.copies[ca.front()].key]) continue;
        std::vector<std::size_t> visit_b = bfs_code(nb, names_b, root, code_b);
        if (code_a == code_b) {
          for (std::size_t k = 0; k < visit_a.size(); ++k) witness[visit_a[k]] = visit_b[k];
          used[j] = true;
          matched = true;
          break;
        }
      }
    }
    if (!matched) {
      r.reason = "no component of the second complex matches the component containing copy " +
                 std::to_string(ca.front());
      return r;
    }
  }
  r.isomorphic = true;
  r.witness = std::move(witness);
  return r;
}

bool verify_witness(const GluingComplex& a, const GluingComplex& b, const std::vector<std::size_t>& witness) {
  if (witness.size() != a.copies().size() || a.copies().size() != b.copies().size()) return false;
  std::vector<bool> hit(b.copies().size(), false);
  for (std::size_t w : witness) {
    if (w >= hit.size() || hit[w]) return false;
    hit[w] = true;
  }
  const Normalized na = normalize(a);
  const Normalized nb = normalize(b);
  for (std::size_t i = 0; i < na.copies.size(); ++i) {
    const NormCopy& x = na.copies[i];
    const NormCopy& y = nb.copies[witness[i]];
    if (!(na.bases[x.key] == nb.bases[y.key])) return false;
    if (x.slots.size() != y.slots.size()) return false;
    for (std::size_t f = 0; f < x.slots.size(); ++f) {
      const NormSlot& s = x.slots[f];
      const NormSlot& t = y.slots[f];
      if (s.glued != t.glued) return false;
      if (!s.glued) continue;
      if (witness[s.copy] != t.copy || s.face != t.face || s.map != t.map) return false;
    }
  }
  return true;
}

namespace {

// Endpoint graph of a complex: strands inside copies and identifications
// across gluings. Returns, for every endpoint node, its strand partner and
// its glue partner (or npos).
struct EndpointGraph {
  std::vector<std::size_t> strand;
  std::vector<std::size_t> glue;
  std::vector<std::size_t> copy_offset;
  std::vector<std::vector<std::size_t>> face_offset;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t node(std::size_t copy, int face, int label) const {
    return face_offset[copy][static_cast<std::size_t>(face)] + static_cast<std::size_t>(label - 1);
  }
};

EndpointGraph endpoint_graph(const GluingComplex& c) {
  EndpointGraph g;
  std::size_t total = 0;
  for (std::size_t i = 0; i < c.copies().size(); ++i) {
    const auto& t = c.template_of(i);
    g.copy_offset.push_back(total);
    g.face_offset.emplace_back();
    for (int n : t.faces) {
      g.face_offset.back().push_back(total);
      total += static_cast<std::size_t>(n);
    }
  }
  g.strand.assign(total, EndpointGraph::npos);
  g.glue.assign(total, EndpointGraph::npos);
  for (std::size_t i = 0; i < c.copies().size(); ++i) {
    for (const Strand& s : c.template_of(i).strands) {
      const std::size_t x = g.node(i, s.a.face, s.a.label);
      const std::size_t y = g.node(i, s.b.face, s.b.label);
      g.strand[x] = y;
      g.strand[y] = x;
    }
  }
  for (const Gluing& gl : c.gluings()) {
    for (std::size_t k = 0; k < gl.bijection.size(); ++k) {
      const std::size_t x = g.node(gl.a.copy, gl.a.face, static_cast<int>(k) + 1);
      const std::size_t y = g.node(gl.b.copy, gl.b.face, gl.bijection[k]);
      g.glue[x] = y;
      g.glue[y] = x;
    }
  }
  return g;
}

}  // namespace

ComponentCount count_components(const GluingComplex& c) {
  const EndpointGraph g = endpoint_graph(c);
  const std::size_t n = g.strand.size();
  std::vector<bool> seen(n, false);
  ComponentCount out;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s] || g.glue[s] != EndpointGraph::npos) continue;
    // walk an arc from a free endpoint
    std::size_t x = s;
    while (true) {
      seen[x] = true;
      const std::size_t y = g.strand[x];
      seen[y] = true;
      if (g.glue[y] == EndpointGraph::npos) break;
      x = g.glue[y];
    }
    ++out.open;
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::size_t x = s;
    do {
      seen[x] = true;
      const std::size_t y = g.strand[x];
      seen[y] = true;
      x = g.glue[y];
    } while (x != s);
    ++out.closed;
  }
  for (std::size_t i = 0; i < c.copies().size(); ++i) out.closed += static_cast<std::size_t>(c.template_of(i).closed_components);
  return out;
}

PieceTemplate collapse(const GluingComplex& c, const std::vector<std::vector<SlotRef>>& faces, const std::string& id) {
  const EndpointGraph g = endpoint_graph(c);
  std::map<std::size_t, Endpoint> new_label;  // free node -> endpoint of the result
  PieceTemplate out;
  out.id = id;
  std::set<SlotRef> listed;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    int label = 0;
    for (const SlotRef& s : faces[f]) {
      if (c.gluing_at(s)) throw PieceError(Errc::BadGluing, "collapse lists a glued slot");
      if (s.copy >= c.copies().size() || s.face < 0 ||
          s.face >= static_cast<int>(c.template_of(s.copy).faces.size())) {
        throw PieceError(Errc::BadGluing, "collapse lists a missing slot");
      }
      if (!listed.insert(s).second) throw PieceError(Errc::BadGluing, "collapse lists a slot twice");
      const int n = c.template_of(s.copy).faces[static_cast<std::size_t>(s.face)];
      for (int k = 1; k <= n; ++k) new_label[g.node(s.copy, s.face, k)] = Endpoint{static_cast<int>(f), ++label};
    }
    out.faces.push_back(label);
  }
  if (listed.size() != c.free_slot_count()) throw PieceError(Errc::BadGluing, "collapse leaves a free slot unassigned");

  const std::size_t n = g.strand.size();
  std::vector<bool> seen(n, false);
  for (const auto& [start, ep] : new_label) {
    if (seen[start]) continue;
    std::size_t x = start;
    std::size_t end = x;
    while (true) {
      seen[x] = true;
      const std::size_t y = g.strand[x];
      seen[y] = true;
      if (g.glue[y] == EndpointGraph::npos) {
        end = y;
        break;
      }
      x = g.glue[y];
    }
    out.strands.push_back(Strand{ep, new_label.at(end)});
  }
  int closed = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::size_t x = s;
    do {
      seen[x] = true;
      const std::size_t y = g.strand[x];
      seen[y] = true;
      x = g.glue[y];
    } while (x != s);
    ++closed;
  }
  for (std::size_t i = 0; i < c.copies().size(); ++i) closed += c.template_of(i).closed_components;
  out.closed_components = closed;
  validate_template(out);
  return out;
}

namespace {

void require_faces(const PieceTemplate& t, std::size_t n, const char* what) {
  validate_template(t);
  if (t.faces.size() != n) {
    throw PieceError(Errc::BadTemplate, "template '" + t.id + "' has " + std::to_string(t.faces.size()) +
                                            " faces; " + what + " needs " + std::to_string(n));
  }
}

void check_counts(const PieceTemplate& a, int fa, const PieceTemplate& b, int fb, const std::string& where) {
  const int na = a.faces[static_cast<std::size_t>(fa)];
  const int nb = b.faces[static_cast<std::size_t>(fb)];
  if (na != nb) {
    throw PieceError(Errc::EndpointMismatch, where + ": '" + a.id + "' face " + std::to_string(fa) + " has " +
                                                 std::to_string(na) + " endpoints, '" + b.id + "' face " +
                                                 std::to_string(fb) + " has " + std::to_string(nb));
  }
}

GluingComplex cyclic_chain(const std::vector<PieceTemplate>& tangles, int min_strands, const char* what) {
  const std::size_t n = tangles.size();
  for (const auto& t : tangles) require_faces(t, 2, what);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = tangles[i];
    const auto& u = tangles[(i + 1) % n];
    const std::string where = std::string(what) + " position " + std::to_string(i);
    check_counts(t, 1, u, 0, where);
    if (t.faces[1] < min_strands) {
      throw PieceError(Errc::TooFewStrands, where + ": " + std::to_string(t.faces[1]) +
                                                " connecting endpoints, at least " + std::to_string(min_strands) +
                                                " required");
    }
  }
  GluingComplex c;
  for (std::size_t i = 0; i < n; ++i) c.add_copy(c.add_template(tangles[i]), {static_cast<int>(i)});
  for (std::size_t i = 0; i < n; ++i) c.glue({i, 1}, {(i + 1) % n, 0});
  return c;
}

}  // namespace

GluingComplex build_bracelet(const std::vector<PieceTemplate>& tangles, int min_strands) {
  if (tangles.empty() || tangles.size() % 2 != 0) {
    throw PieceError(Errc::OddLength, "a bracelet needs an even, positive number of tangles, got " +
                                          std::to_string(tangles.size()));
  }
  return cyclic_chain(tangles, min_strands, "bracelet");
}

GluingComplex build_cylinder_stack(const std::vector<PieceTemplate>& tangles) {
  if (tangles.empty()) throw PieceError(Errc::OddLength, "a cylinder stack needs at least one tangle");
  return cyclic_chain(tangles, 1, "cylinder stack");
}

GluingComplex build_torus_lattice(const std::vector<std::vector<PieceTemplate>>& grid) {
  const std::size_t rows = grid.size();
  const std::size_t cols = rows ? grid[0].size() : 0;
  for (const auto& row : grid) {
    if (row.size() != cols) throw PieceError(Errc::OddDimension, "lattice rows have different lengths");
  }
  if (rows < 2 || cols < 2 || rows % 2 != 0 || cols % 2 != 0) {
    throw PieceError(Errc::OddDimension, "lattice dimensions must be even and at least 2, got " + std::to_string(rows) +
                                             "x" + std::to_string(cols));
  }
  for (const auto& row : grid) {
    for (const auto& t : row) require_faces(t, 4, "a lattice cell");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::string at = "cell (" + std::to_string(i) + "," + std::to_string(j) + ")";
      check_counts(grid[i][j], 1, grid[(i + 1) % rows][j], 0, at);
      check_counts(grid[i][j], 3, grid[i][(j + 1) % cols], 2, at);
    }
  }
  GluingComplex c;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      c.add_copy(c.add_template(grid[i][j]), {static_cast<int>(i), static_cast<int>(j)});
    }
  }
  auto at = [&](std::size_t i, std::size_t j) { return (i % rows) * cols + (j % cols); };
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      c.glue({at(i, j), 1}, {at(i + 1, j), 0});
      c.glue({at(i, j), 3}, {at(i, j + 1), 2});
    }
  }
  return c;
}

PieceTemplate cube_column(const std::vector<PieceTemplate>& cubes, const std::string& id) {
  if (cubes.empty()) throw PieceError(Errc::OddLength, "a cube column needs at least one cube");
  for (const auto& t : cubes) require_faces(t, 4, "a cube column");
  const std::size_t n = cubes.size();
  for (std::size_t j = 0; j < n; ++j) {
    check_counts(cubes[j], 3, cubes[(j + 1) % n], 2, "cube column position " + std::to_string(j));
  }
  GluingComplex c;
  for (std::size_t j = 0; j < n; ++j) c.add_copy(c.add_template(cubes[j]), {static_cast<int>(j)});
  for (std::size_t j = 0; j < n; ++j) c.glue({j, 3}, {(j + 1) % n, 2});
  std::vector<std::vector<SlotRef>> faces(2);
  for (std::size_t j = 0; j < n; ++j) {
    faces[0].push_back({j, 0});
    faces[1].push_back({j, 1});
  }
  return collapse(c, faces, id);
}

}  // namespace replivol::pieces
