#include "replivol/words.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

namespace replivol::words {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::BadOrder: return "BadOrder";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DeltaOutOfRange: return "DeltaOutOfRange";
    case Errc::FlagInconsistent: return "FlagInconsistent";
    case Errc::BadCut: return "BadCut";
    case Errc::NonTermination: return "NonTermination";
    case Errc::MissingBasisVolume: return "MissingBasisVolume";
    case Errc::BadCertificate: return "BadCertificate";
  }
  return "WordError";
}

namespace {

ErrorClass class_of(Errc code) {
  switch (code) {
    case Errc::NonTermination:
    case Errc::BadCertificate:
      return ErrorClass::Internal;
    case Errc::MissingBasisVolume:
      return ErrorClass::Domain;
    default:
      return ErrorClass::Input;
  }
}

}  // namespace

WordError::WordError(Errc code, const std::string& message)
    : Error(words::to_string(code), message, class_of(code)), code_(code) {}

namespace {

std::vector<int> rotated(const std::vector<int>& seq, std::size_t by) {
  std::vector<int> out(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) out[i] = seq[(i + by) % seq.size()];
  return out;
}

std::vector<int> doubled_with_reverse(const std::vector<int>& half) {
  std::vector<int> out = half;
  out.insert(out.end(), half.rbegin(), half.rend());
  return out;
}

std::string seq_string(const std::vector<int>& seq) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < seq.size(); ++i) os << (i ? "," : "") << seq[i];
  os << ']';
  return os.str();
}

// +1, 0 or -1 for an allowed step, 2 otherwise. For order 2 a step of one is
// reported as +1 (the two directions coincide).
int step_delta(int order, int from, int to) {
  const int d = ((to - from) % order + order) % order;
  if (d == 0) return 0;
  if (d == 1) return 1;
  if (d == order - 1) return -1;
  return 2;
}

void check_shape(int order, const std::vector<int>& indices) {
  if (order < 2 || order % 2 != 0) {
    throw WordError(Errc::BadOrder, "order must be an even integer >= 2, got " + std::to_string(order));
  }
  if (static_cast<int>(indices.size()) != order) {
    throw WordError(Errc::LengthMismatch, "word of order " + std::to_string(order) + " needs " +
                                              std::to_string(order) + " letters, got " +
                                              std::to_string(indices.size()));
  }
  for (int v : indices) {
    if (v < 1 || v > order) {
      throw WordError(Errc::IndexOutOfRange,
                      "letter index " + std::to_string(v) + " outside 1.." + std::to_string(order));
    }
  }
}

}  // namespace

std::size_t least_rotation(const std::vector<int>& seq) {
  const std::size_t n = seq.size();
  std::size_t best = 0;
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      const int a = seq[(r + k) % n];
      const int b = seq[(best + k) % n];
      if (a != b) {
        if (a < b) best = r;
        break;
      }
    }
  }
  return best;
}

std::vector<bool> derive_flags(int order, const std::vector<int>& indices) {
  check_shape(order, indices);
  const std::size_t n = indices.size();
  std::vector<int> delta(n);
  for (std::size_t i = 0; i < n; ++i) {
    delta[i] = step_delta(order, indices[i], indices[(i + 1) % n]);
    if (delta[i] == 2) {
      throw WordError(Errc::DeltaOutOfRange, "step T" + std::to_string(indices[i]) + " -> T" +
                                                 std::to_string(indices[(i + 1) % n]) + " in " +
                                                 seq_string(indices) + " is not in {-1,0,+1}");
    }
  }
  if (order == 2) {
    // Steps of one are consistent with either uniform flag choice.
    std::vector<bool> flags(n, false);
    if (delta[0] == 0) flags[1] = true;
    return flags;
  }
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (delta[i] != 0) {
      start = i;
      break;
    }
  }
  std::vector<bool> flags(n, false);
  if (start == n) {
    for (std::size_t i = 0; i < n; ++i) flags[i] = (i % 2) == 1;
    return flags;
  }
  bool f = delta[start] < 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = (start + k) % n;
    flags[i] = f;
    const int d = delta[i];
    if (d == 1 && f) {
      throw WordError(Errc::FlagInconsistent, "step +1 after reflected letter at position " +
                                                  std::to_string(i) + " in " + seq_string(indices));
    }
    if (d == -1 && !f) {
      throw WordError(Errc::FlagInconsistent, "step -1 after unreflected letter at position " +
                                                  std::to_string(i) + " in " + seq_string(indices));
    }
    if (d == 0) f = !f;
  }
  if (f != flags[start]) {
    throw WordError(Errc::FlagInconsistent, "reflection flags do not close around " + seq_string(indices));
  }
  return flags;
}

CyclicWord CyclicWord::make(int order, std::vector<int> indices, bool first_reflected) {
  derive_flags(order, indices);
  std::vector<int> canon = rotated(indices, least_rotation(indices));
  const bool keep_flag = order == 2 && canon[0] != canon[1] && first_reflected;
  return CyclicWord(order, std::move(canon), keep_flag);
}

std::vector<bool> CyclicWord::flags() const {
  std::vector<bool> f = derive_flags(order_, indices_);
  if (order_ == 2 && indices_[0] != indices_[1]) f.assign(2, first_reflected_);
  return f;
}

bool CyclicWord::is_basis() const {
  return std::all_of(indices_.begin(), indices_.end(), [&](int v) { return v == indices_[0]; });
}

std::string CyclicWord::to_string() const { return seq_string(indices_); }

CyclicWord validate_word(int order, const std::vector<int>& indices) {
  return CyclicWord::make(order, indices);
}

CyclicWord reverse(const CyclicWord& w) {
  std::vector<int> r(w.indices().rbegin(), w.indices().rend());
  return CyclicWord::make(w.order(), std::move(r), w.first_reflected());
}

namespace {

std::pair<CyclicWord, CyclicWord> split_rotation(int order, const std::vector<int>& rot) {
  const std::size_t m = rot.size() / 2;
  std::vector<int> a1(rot.begin(), rot.begin() + static_cast<std::ptrdiff_t>(m));
  std::vector<int> a2(rot.begin() + static_cast<std::ptrdiff_t>(m), rot.end());
  return {CyclicWord::make(order, doubled_with_reverse(a1)), CyclicWord::make(order, doubled_with_reverse(a2))};
}

}  // namespace

std::pair<CyclicWord, CyclicWord> split_relation(const CyclicWord& w, int cut) {
  if (cut < 0 || cut >= w.order()) {
    throw WordError(Errc::BadCut, "cut position " + std::to_string(cut) + " outside 0.." +
                                      std::to_string(w.order() - 1));
  }
  return split_rotation(w.order(), rotated(w.indices(), static_cast<std::size_t>(cut)));
}

std::pair<CyclicWord, CyclicWord> split_relation(const CyclicWord& w, int cut1, int cut2) {
  const int n = w.order();
  if (cut1 < 0 || cut1 >= n || cut2 < 0 || cut2 >= n) {
    throw WordError(Errc::BadCut, "cut positions must lie in 0.." + std::to_string(n - 1));
  }
  const int arc = ((cut2 - cut1) % n + n) % n;
  if (arc != n / 2) {
    throw WordError(Errc::BadCut, "cuts " + std::to_string(cut1) + " and " + std::to_string(cut2) +
                                      " give halves of lengths " + std::to_string(arc) + " and " +
                                      std::to_string(n - arc));
  }
  return split_relation(w, cut1);
}

std::map<int, std::int64_t> letter_counts(const CyclicWord& w) {
  std::map<int, std::int64_t> counts;
  for (int v : w.indices()) ++counts[v];
  return counts;
}

Coefficients closed_form(const CyclicWord& w) {
  Coefficients out;
  for (const auto& [letter, count] : letter_counts(w)) out[letter] = Rational(count, w.order());
  return out;
}

std::uint64_t palindrome_bound(int order) {
  // A palindromic word is determined by its first half: a start letter and
  // m - 1 steps in {-1, 0, +1}.
  const int m = order / 2;
  std::uint64_t bound = static_cast<std::uint64_t>(order);
  for (int i = 1; i < m; ++i) {
    if (bound > std::numeric_limits<std::uint64_t>::max() / 3) return std::numeric_limits<std::uint64_t>::max() / 4;
    bound *= 3;
  }
  return bound;
}

namespace {

Coefficients unit(int letter) { return Coefficients{{letter, Rational(1)}}; }

Coefficients axpy(const Coefficients& x, const Rational& a, Coefficients y) {
  for (const auto& [k, v] : x) {
    y[k] += a * v;
    if (y[k] == 0) y.erase(k);
  }
  return y;
}

Coefficients scaled(const Coefficients& x, const Rational& a) { return axpy(x, a, {}); }

const Rational kHalf(1, 2);

struct Descent {
  std::vector<int> rotation;
  std::vector<int> x;
  std::vector<int> y;
};

// Picks the representation t1^{2a1} t2^{a2} ... t_i^{2a_i} ... t2^{a2} with
// a1 <= a_i, least in lexicographic order among all such readings.
Descent choose_descent(const CyclicWord& w) {
  const auto& idx = w.indices();
  const std::size_t n = idx.size();
  const std::size_t m = n / 2;
  std::optional<std::vector<int>> best;
  for (std::size_t r = 0; r < n; ++r) {
    const std::vector<int> s = rotated(idx, r);
    bool palindrome = true;
    for (std::size_t k = 0; k < m && palindrome; ++k) palindrome = s[k] == s[n - 1 - k];
    if (!palindrome) continue;
    std::size_t lead = 0;
    while (lead < m && s[lead] == s[0]) ++lead;
    if (lead == m) continue;
    std::size_t trail = 0;
    while (trail < m && s[m - 1 - trail] == s[m - 1]) ++trail;
    if (lead > trail) continue;
    std::vector<int> u = rotated(s, n - lead);
    if (!best || u < *best) best = std::move(u);
  }
  if (!best) {
    throw WordError(Errc::NonTermination, "descent requested for word without a palindromic reading: " +
                                              w.to_string());
  }
  Descent d;
  d.rotation = *best;
  d.x.assign(best->begin(), best->begin() + static_cast<std::ptrdiff_t>(m));
  d.y.assign(best->begin() + static_cast<std::ptrdiff_t>(m), best->end());
  return d;
}

class Reducer {
 public:
  explicit Reducer(int order) : order_(order), limit_(4 * palindrome_bound(order)) {}

  Coefficients solve(const CyclicWord& w);

  std::vector<SplitStep> steps;
  std::vector<SolvedCycle> cycles;
  std::uint64_t iterations = 0;

 private:
  int order_;
  std::uint64_t limit_;
  std::map<CyclicWord, Coefficients> memo_;
};

Coefficients Reducer::solve(const CyclicWord& start) {
  if (start.is_basis()) return unit(start[0]);
  if (auto it = memo_.find(start); it != memo_.end()) return it->second;

  std::vector<CyclicWord> path;
  std::vector<Coefficients> lower;    // value of the lower-level product per path entry
  std::vector<std::size_t> step_ix;   // index into `steps` per path entry
  std::map<CyclicWord, std::size_t> position;

  CyclicWord cur = start;
  std::optional<Coefficients> terminal;
  std::optional<std::size_t> cycle_at;
  while (true) {
    if (cur.is_basis()) {
      terminal = unit(cur[0]);
      break;
    }
    if (auto it = memo_.find(cur); it != memo_.end()) {
      terminal = it->second;
      break;
    }
    if (auto it = position.find(cur); it != position.end()) {
      cycle_at = it->second;
      break;
    }
    if (++iterations > limit_) {
      throw WordError(Errc::NonTermination, "descent exceeded " + std::to_string(limit_) +
                                                " iterations at order " + std::to_string(order_));
    }
    position.emplace(cur, path.size());
    const Descent d = choose_descent(cur);
    CyclicWord upper = CyclicWord::make(order_, doubled_with_reverse(d.x));
    CyclicWord down = CyclicWord::make(order_, doubled_with_reverse(d.y));
    const std::size_t rot = [&] {
      for (std::size_t r = 0; r < cur.indices().size(); ++r) {
        if (rotated(cur.indices(), r) == d.rotation) return r;
      }
      return std::size_t{0};
    }();
    steps.push_back(SplitStep{cur, static_cast<int>(rot), d.rotation, d.x, d.y, upper, down, {}});
    step_ix.push_back(steps.size() - 1);
    path.push_back(cur);
    lower.push_back(solve(down));
    cur = std::move(upper);
  }

  const std::size_t len = path.size();
  std::vector<Coefficients> value(len);
  std::size_t tail_end = len;
  if (cycle_at) {
    const std::size_t j = *cycle_at;
    // x_j = sum_{k=j}^{len-1} (1/2)^{k-j+1} e_k + (1/2)^{len-j} x_j
    Coefficients e;
    Rational weight = kHalf;
    for (std::size_t k = j; k < len; ++k) {
      e = axpy(lower[k], weight, std::move(e));
      weight *= kHalf;
    }
    const Rational c = weight * 2;  // (1/2)^{len-j}
    value[j] = scaled(e, 1 / (1 - c));
    for (std::size_t k = len - 1; k > j; --k) {
      const Coefficients& next = (k + 1 == len) ? value[j] : value[k + 1];
      value[k] = axpy(lower[k], kHalf, scaled(next, kHalf));
    }
    cycles.push_back(SolvedCycle{path[j], c, value[j], len - j + 1, len - j});
    tail_end = j;
  } else {
    value[len - 1] = axpy(lower[len - 1], kHalf, scaled(*terminal, kHalf));
    tail_end = len - 1;
  }
  for (std::size_t k = tail_end; k-- > 0;) {
    value[k] = axpy(lower[k], kHalf, scaled(value[k + 1], kHalf));
  }
  for (std::size_t k = 0; k < len; ++k) {
    steps[step_ix[k]].value = value[k];
    memo_.emplace(path[k], value[k]);
  }
  return value[0];
}

}  // namespace

Reduction reduce(const CyclicWord& w) {
  Reduction out;
  out.certificate.input = w;
  if (w.is_basis()) {
    out.coefficients = unit(w[0]);
    out.certificate.result = out.coefficients;
    return out;
  }
  Reducer reducer(w.order());
  const std::vector<int>& rot = w.indices();
  auto [w1, w2] = split_rotation(w.order(), rot);
  const std::size_t m = rot.size() / 2;
  SplitStep top{w, 0, rot,
                std::vector<int>(rot.begin(), rot.begin() + static_cast<std::ptrdiff_t>(m)),
                std::vector<int>(rot.begin() + static_cast<std::ptrdiff_t>(m), rot.end()),
                w1, w2, {}};
  const Coefficients v1 = reducer.solve(w1);
  const Coefficients v2 = reducer.solve(w2);
  top.value = axpy(v1, kHalf, scaled(v2, kHalf));
  out.coefficients = top.value;
  out.certificate.steps.push_back(std::move(top));
  for (auto& s : reducer.steps) out.certificate.steps.push_back(std::move(s));
  out.certificate.solved_cycles = std::move(reducer.cycles);
  out.certificate.result = out.coefficients;
  out.certificate.iterations = reducer.iterations;
  return out;
}

void verify_certificate(const ReductionCertificate& cert) {
  auto fail = [](const std::string& why) { throw WordError(Errc::BadCertificate, why); };
  const CyclicWord& input = cert.input;
  const int order = input.order();
  const std::size_t m = static_cast<std::size_t>(input.half());

  std::map<CyclicWord, Coefficients> claimed;
  std::map<CyclicWord, std::vector<std::pair<CyclicWord, CyclicWord>>> edges;
  for (const SplitStep& s : cert.steps) {
    if (s.word.order() != order) fail("step word of a different order");
    if (s.rotation.size() != s.word.indices().size()) fail("step rotation has the wrong length");
    if (s.cut < 0 || s.cut >= order || rotated(s.word.indices(), static_cast<std::size_t>(s.cut)) != s.rotation) {
      fail("step rotation is not the stated rotation of " + s.word.to_string());
    }
    if (s.a1 != std::vector<int>(s.rotation.begin(), s.rotation.begin() + static_cast<std::ptrdiff_t>(m)) ||
        s.a2 != std::vector<int>(s.rotation.begin() + static_cast<std::ptrdiff_t>(m), s.rotation.end())) {
      fail("step halves do not match its rotation");
    }
    if (CyclicWord::make(order, doubled_with_reverse(s.a1)) != s.w1 ||
        CyclicWord::make(order, doubled_with_reverse(s.a2)) != s.w2) {
      fail("step products are not a1 a1^R and a2 a2^R");
    }
    if (s.word.is_basis()) fail("step applied to a basis word");
    auto [it, inserted] = claimed.emplace(s.word, s.value);
    if (!inserted && it->second != s.value) fail("two different values claimed for " + s.word.to_string());
    edges[s.word].emplace_back(s.w1, s.w2);
  }

  auto value_of = [&](const CyclicWord& w) -> const Coefficients* {
    static thread_local Coefficients scratch;
    if (w.is_basis()) {
      scratch = unit(w[0]);
      return &scratch;
    }
    auto it = claimed.find(w);
    return it == claimed.end() ? nullptr : &it->second;
  };

  for (const SplitStep& s : cert.steps) {
    const Coefficients* a = value_of(s.w1);
    if (!a) fail("no value for " + s.w1.to_string());
    const Coefficients left = *a;
    const Coefficients* b = value_of(s.w2);
    if (!b) fail("no value for " + s.w2.to_string());
    const Coefficients rhs = axpy(left, 1, *b);
    if (scaled(s.value, 2) != rhs) fail("relation 2w = w1 + w2 fails for " + s.word.to_string());
  }

  // Every word must reach a basis word through its relations, which makes the
  // solution of the relation system unique.
  std::set<CyclicWord> grounded;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [w, outs] : edges) {
      if (grounded.count(w)) continue;
      for (const auto& [p, q] : outs) {
        auto ok = [&](const CyclicWord& x) { return x.is_basis() || grounded.count(x) > 0; };
        if (ok(p) || ok(q)) {
          grounded.insert(w);
          changed = true;
          break;
        }
      }
    }
  }
  if (grounded.size() != edges.size()) fail("some relations never reach a basis word");

  for (const SolvedCycle& c : cert.solved_cycles) {
    auto it = claimed.find(c.word);
    if (it == claimed.end() || it->second != c.value) fail("solved cycle value disagrees for " + c.word.to_string());
  }

  const Coefficients* v = value_of(input);
  if (!v) fail("no relation for the input word");
  if (*v != cert.result) fail("certificate result differs from the derived value of the input");
}

Rational bound_from_reduction(const Coefficients& coeffs, const std::map<int, Rational>& basis_volumes) {
  Rational total = 0;
  for (const auto& [letter, c] : coeffs) {
    auto it = basis_volumes.find(letter);
    if (it == basis_volumes.end()) {
      throw WordError(Errc::MissingBasisVolume, "no volume supplied for T" + std::to_string(letter));
    }
    total += c * it->second;
  }
  return total;
}

WordVector::WordVector(const CyclicWord& w, Rational c) { add(w, c); }

void WordVector::add(const CyclicWord& w, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

WordVector& WordVector::operator+=(const WordVector& other) {
  for (const auto& [w, c] : other.terms_) add(w, c);
  return *this;
}

WordVector& WordVector::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, v] : terms_) v *= c;
  return *this;
}

Rational WordVector::coefficient(const CyclicWord& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Rational(0) : it->second;
}

Coefficients WordVector::to_letters() const {
  Coefficients out;
  for (const auto& [w, c] : terms_) out = axpy(reduce(w).coefficients, c, std::move(out));
  return out;
}

std::vector<CyclicWord> enumerate_words(int order) {
  if (order < 2 || order % 2 != 0) {
    throw WordError(Errc::BadOrder, "order must be an even integer >= 2");
  }
  std::set<CyclicWord> found;
  std::vector<int> seq(static_cast<std::size_t>(order));
  // Each step either flips the flag (repeat the letter) or moves in the
  // direction the current flag forces.
  auto rec = [&](auto&& self, int pos, bool flag, bool start_flag) -> void {
    if (pos == order) {
      const int last = seq[static_cast<std::size_t>(order - 1)];
      const int first = seq[0];
      const bool closes_by_flip = last == first && flag != start_flag;
      const int forced_next = ((last - 1 + (flag ? -1 : 1)) % order + order) % order + 1;
      const bool closes_by_move = forced_next == first && flag == start_flag;
      if (closes_by_flip || closes_by_move) found.insert(CyclicWord::make(order, seq));
      return;
    }
    const int prev = seq[static_cast<std::size_t>(pos - 1)];
    seq[static_cast<std::size_t>(pos)] = prev;
    self(self, pos + 1, !flag, start_flag);
    seq[static_cast<std::size_t>(pos)] = ((prev - 1 + (flag ? -1 : 1)) % order + order) % order + 1;
    self(self, pos + 1, flag, start_flag);
  };
  for (int first = 1; first <= order; ++first) {
    seq[0] = first;
    rec(rec, 1, false, false);
    rec(rec, 1, true, true);
  }
  return {found.begin(), found.end()};
}

}  // namespace replivol::words
