#include "blurreg/alignment.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "blurreg/error.hpp"

namespace blurreg {

const char* to_string(SegLabel label) {
  switch (label) {
    case SegLabel::F: return "F";
    case SegLabel::S: return "S";
    case SegLabel::Ab: return "A_b";
    case SegLabel::Ae: return "A_e";
  }
  return "?";
}

SegLabel parse_label(const std::string& text) {
  if (text == "F") return SegLabel::F;
  if (text == "S") return SegLabel::S;
  if (text == "A_b" || text == "Ab") return SegLabel::Ab;
  if (text == "A_e" || text == "Ae") return SegLabel::Ae;
  throw ValidationError("unknown segmentation label '" + text + "'");
}

namespace {

// |q| >= v for v > 0, without leaving integer arithmetic.
bool at_least(Q256 q, const Rational& v) {
  return abs(q).num * v.denominator() >= Q256::kDenominator * v.numerator();
}

Q256 entry(const std::vector<Q256>& d, int i) {
  return (i >= 0 && i < static_cast<int>(d.size())) ? d[static_cast<std::size_t>(i)] : Q256(0);
}

bool same_sign(Q256 a, Q256 b) { return (a.num > 0 && b.num > 0) || (a.num < 0 && b.num < 0); }

int sign(Q256 q) { return (q.num > 0) - (q.num < 0); }

}  // namespace

Q256 label_score(const std::vector<Q256>& d, int i, SegLabel label, const Rational& v) {
  if (v <= Rational(0)) throw ValidationError("threshold v must be positive");
  const Q256 here = entry(d, i);
  switch (label) {
    case SegLabel::F: {
      const Q256 next = entry(d, i + 1);
      if (same_sign(here, next) && abs(here) > abs(next) && at_least(next, v)) return here + next;
      return Q256(0);
    }
    case SegLabel::S: {
      const Q256 prev = entry(d, i - 1);
      if (same_sign(prev, here) && abs(here) > abs(prev) && at_least(prev, v)) return prev + here;
      return Q256(0);
    }
    case SegLabel::Ab: {
      if (at_least(entry(d, i - 1), v) || !at_least(here, v)) return Q256(0);
      if (at_least(entry(d, i + 1), v) && !(abs(here) < abs(entry(d, i + 1) + entry(d, i + 2)))) {
        return Q256(0);
      }
      return here;
    }
    case SegLabel::Ae: {
      if (at_least(entry(d, i + 1), v) || !at_least(here, v)) return Q256(0);
      if (!(abs(here) < abs(entry(d, i - 2) + entry(d, i - 1)))) return Q256(0);
      return here;
    }
  }
  return Q256(0);
}

int pair_weight(const std::vector<Q256>& d1, int i1, SegLabel l1, const std::vector<Q256>& d2,
                int i2, SegLabel l2, const Rational& v) {
  return same_sign(label_score(d1, i1, l1, v), label_score(d2, i2, l2, v)) ? 1 : 0;
}

bool admissible(SegLabel from, SegLabel to, int i, int step, int n) {
  const int target = i + step;
  if (i < 1 || target > n - 1) return false;
  if (to == SegLabel::F && target > n - 2) return false;
  switch (from) {
    case SegLabel::F:
      switch (to) {
        case SegLabel::F: return step >= 2;
        case SegLabel::S: return step >= 3;
        case SegLabel::Ab: return step >= 3;
        case SegLabel::Ae: return step == 2;
      }
      break;
    case SegLabel::S:
    case SegLabel::Ab:
      return to != SegLabel::Ae && step >= 2;
    case SegLabel::Ae:
      switch (to) {
        case SegLabel::F: return step >= 2;
        case SegLabel::S: return step >= 3;
        case SegLabel::Ab: return step >= 2;
        case SegLabel::Ae: return false;
      }
      break;
  }
  return false;
}

std::string to_string(const Vertex& v) {
  std::ostringstream os;
  switch (v.kind) {
    case VertexKind::Start: return "start";
    case VertexKind::Termination: return "end";
    case VertexKind::Alignment: os << "(" << v.k1 << "," << v.k2 << ")"; break;
    case VertexKind::Segmentation:
      os << "(" << v.seg.i1 << "," << to_string(v.seg.l1) << "," << v.seg.i2 << ","
         << to_string(v.seg.l2) << "," << v.seg.n << ")";
      break;
  }
  return os.str();
}

AlignmentGraph::AlignmentGraph(std::vector<Q256> d1, std::vector<Q256> d2, Rational v)
    : n_(static_cast<int>(d1.size())), d1_(std::move(d1)), d2_(std::move(d2)), v_(v) {
  if (d1_.size() != d2_.size()) throw ValidationError("difference sequences differ in length");
  if (v_ <= Rational(0)) throw ValidationError("threshold v must be positive");
  for (int k = 0; k < 2; ++k) {
    const auto& d = k == 0 ? d1_ : d2_;
    omega_[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(n_) * 4);
    for (int i = 0; i < n_; ++i) {
      for (auto l : kAllLabels) omega_[static_cast<std::size_t>(k)][cell(i, l)] = label_score(d, i, l, v_);
    }
  }
}

bool AlignmentGraph::valid(const SegVertex& s) const {
  auto index_ok = [&](int i, SegLabel l) {
    return i >= 1 && i <= n_ - 1 && (l != SegLabel::F || i <= n_ - 2);
  };
  if (!index_ok(s.i1, s.l1) || !index_ok(s.i2, s.l2)) return false;
  if (s.n < 0 || s.n > 2) return false;
  if ((s.i1 == 1 || s.i2 == 1) && s.n != 0) return false;
  return true;
}

int AlignmentGraph::weight(const SegVertex& s) const {
  return same_sign(omega1(s.i1, s.l1), omega2(s.i2, s.l2)) ? 1 : 0;
}

namespace {

bool drift_change_allowed(int from_n, int to_n) {
  if (from_n == 0) return true;
  return to_n == from_n || to_n == 0;
}

bool start_label(SegLabel l) { return l != SegLabel::Ae; }

}  // namespace

bool AlignmentGraph::has_edge(const Vertex& from, const SegVertex& to) const {
  if (!valid(to)) return false;
  if (from.kind == VertexKind::Alignment) {
    const int l = to.i1 - from.k1;
    return to.n == 0 && start_label(to.l1) && start_label(to.l2) && l >= 1 &&
           to.i2 - from.k2 == l;
  }
  if (from.kind != VertexKind::Segmentation) return false;
  const auto& s = from.seg;
  const int s1 = to.i1 - s.i1;
  const int s2 = to.i2 - s.i2;
  if (!drift_change_allowed(s.n, to.n)) return false;
  if (s1 - s2 != drift(to.n) - drift(s.n)) return false;
  return admissible(s.l1, to.l1, s.i1, s1, n_) && admissible(s.l2, to.l2, s.i2, s2, n_);
}

std::vector<Vertex> AlignmentGraph::successors(const Vertex& from) const {
  std::vector<Vertex> out;
  const int n = n_;
  switch (from.kind) {
    case VertexKind::Start:
      out.push_back(Vertex::alignment(0, 0));
      for (int k = 1; k <= n - 2; ++k) out.push_back(Vertex::alignment(0, k));
      for (int k = 1; k <= n - 2; ++k) out.push_back(Vertex::alignment(k, 0));
      break;
    case VertexKind::Alignment: {
      const std::array<SegLabel, 3> labels = {SegLabel::F, SegLabel::S, SegLabel::Ab};
      for (auto l1 : labels) {
        for (auto l2 : labels) {
          const int cap1 = l1 == SegLabel::F ? n - 2 - from.k1 : n - 1 - from.k1;
          const int cap2 = l2 == SegLabel::F ? n - 2 - from.k2 : n - 1 - from.k2;
          for (int l = 1; l <= std::min(cap1, cap2); ++l) {
            const SegVertex s{from.k1 + l, l1, from.k2 + l, l2, 0};
            if (valid(s)) out.push_back(Vertex::segmentation(s));
          }
        }
      }
      break;
    }
    case VertexKind::Segmentation: {
      out.push_back(Vertex::termination());
      const auto& s = from.seg;
      // (extra step in sequence 1, extra step in sequence 2, resulting tag)
      std::vector<std::tuple<int, int, int>> moves;
      if (s.n == 0) moves = {{0, 0, 0}, {1, 0, 1}, {0, 1, 2}};
      if (s.n == 1) moves = {{0, 0, 1}, {0, 1, 0}};
      if (s.n == 2) moves = {{0, 0, 2}, {1, 0, 0}};
      for (auto [e1, e2, tag] : moves) {
        for (int l = 1; l <= n; ++l) {
          for (auto l1 : kAllLabels) {
            if (!admissible(s.l1, l1, s.i1, l + e1, n)) continue;
            for (auto l2 : kAllLabels) {
              if (!admissible(s.l2, l2, s.i2, l + e2, n)) continue;
              const SegVertex t{s.i1 + l + e1, l1, s.i2 + l + e2, l2, tag};
              if (valid(t)) out.push_back(Vertex::segmentation(t));
            }
          }
        }
      }
      break;
    }
    case VertexKind::Termination:
      break;
  }
  return out;
}

int AlignmentGraph::segmentation_vertex_count() const {
  int count = 0;
  for (int i1 = 1; i1 < n_; ++i1) {
    for (int i2 = 1; i2 < n_; ++i2) {
      for (auto l1 : kAllLabels) {
        for (auto l2 : kAllLabels) {
          for (int n = 0; n < 3; ++n) count += valid({i1, l1, i2, l2, n}) ? 1 : 0;
        }
      }
    }
  }
  return count;
}

std::string AlignmentGraph::to_dot(std::size_t max_vertices) const {
  std::vector<Vertex> order{Vertex::start()};
  std::map<std::string, std::size_t> seen{{to_string(Vertex::start()), 0}};
  std::ostringstream edges;
  for (std::size_t next = 0; next < order.size(); ++next) {
    const Vertex from = order[next];
    for (const auto& to : successors(from)) {
      const auto key = to_string(to);
      if (!seen.count(key)) {
        if (order.size() >= max_vertices) {
          throw ValidationError("reachable subgraph exceeds " + std::to_string(max_vertices) +
                                " vertices");
        }
        seen.emplace(key, order.size());
        order.push_back(to);
      }
      const int w = to.kind == VertexKind::Segmentation ? weight(to.seg) : 0;
      edges << "  \"" << to_string(from) << "\" -> \"" << key << "\" [label=" << w << "];\n";
    }
  }
  std::ostringstream os;
  os << "digraph alignment {\n";
  for (const auto& v : order) {
    os << "  \"" << to_string(v) << "\"";
    if (v.kind == VertexKind::Segmentation && weight(v.seg)) os << " [style=bold]";
    os << ";\n";
  }
  os << edges.str() << "}\n";
  return os.str();
}

AlignmentGraph build_graph(const std::vector<Q256>& d1, const std::vector<Q256>& d2,
                           const Rational& v) {
  return AlignmentGraph(d1, d2, v);
}

std::vector<std::pair<int, int>> PathResult::pair_indices() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& p : pairs) out.emplace_back(p.i1, p.i2);
  return out;
}

// ---------------------------------------------------------------------------
// Longest path over the implicit graph.
//
// Segmentation vertices live on an N x N grid of cells with 48 states each
// (4 labels x 4 labels x 3 tags). For a fixed pair of source/target states,
// the admissible predecessors of (i1, i2) lie on one diagonal below a
// minimum step, so a running maximum along each diagonal answers the whole
// predecessor set in O(1).
// ---------------------------------------------------------------------------

namespace {

constexpr int kStates = 48;
constexpr int kNone = std::numeric_limits<int>::min() / 4;

struct StateInfo {
  SegLabel l1;
  SegLabel l2;
  int n;
};

StateInfo state_info(int st) {
  return {static_cast<SegLabel>(st / 12), static_cast<SegLabel>((st / 3) % 4), st % 3};
}

/// Per-sequence step constraint between two labels.
struct StepRule {
  bool allowed = false;
  bool exact = false;
  int min_step = 0;
};

StepRule step_rule(SegLabel from, SegLabel to) {
  if (to == SegLabel::Ae) return from == SegLabel::F ? StepRule{true, true, 2} : StepRule{};
  if (from == SegLabel::F) return {true, false, to == SegLabel::F ? 2 : 3};
  if (from == SegLabel::Ae) return {true, false, to == SegLabel::S ? 3 : 2};
  return {true, false, 2};
}

/// Links a source state to a target state. Predecessors of target cell
/// (i1, i2) sit at (i1 - s2 - c, i2 - s2): for diagonal rules every
/// s2 >= s2_min, for exact rules only s2 = s2_min.
struct Link {
  int source;
  int target;
  int c;
  int s2_min;
  bool exact;
};

std::vector<Link> build_links() {
  std::vector<Link> links;
  for (int t = 0; t < kStates; ++t) {
    const auto ti = state_info(t);
    for (int s = 0; s < kStates; ++s) {
      const auto si = state_info(s);
      if (!drift_change_allowed(si.n, ti.n)) continue;
      const int c = drift(ti.n) - drift(si.n);
      const auto r1 = step_rule(si.l1, ti.l1);
      const auto r2 = step_rule(si.l2, ti.l2);
      if (!r1.allowed || !r2.allowed) continue;
      if (r1.exact || r2.exact) {
        int s2 = r2.exact ? r2.min_step : r1.min_step - c;
        const int s1 = s2 + c;
        const bool ok1 = r1.exact ? s1 == r1.min_step : s1 >= r1.min_step;
        const bool ok2 = r2.exact ? s2 == r2.min_step : s2 >= r2.min_step;
        if (ok1 && ok2) links.push_back({s, t, c, s2, true});
      } else {
        links.push_back({s, t, c, std::max(r2.min_step, r1.min_step - c), false});
      }
    }
  }
  return links;
}

const std::vector<Link>& links() {
  static const std::vector<Link> all = build_links();
  return all;
}

const std::vector<std::vector<Link>>& links_by_target() {
  static const auto grouped = [] {
    std::vector<std::vector<Link>> g(kStates);
    for (const auto& l : links()) g[static_cast<std::size_t>(l.target)].push_back(l);
    return g;
  }();
  return grouped;
}

const std::vector<std::vector<Link>>& links_by_source() {
  static const auto grouped = [] {
    std::vector<std::vector<Link>> g(kStates);
    for (const auto& l : links()) g[static_cast<std::size_t>(l.source)].push_back(l);
    return g;
  }();
  return grouped;
}

/// Tie-break order for matched vertices: (i1, i2, l1, l2, n).
std::tuple<int, int, int, int, int> order_key(const SegVertex& v) {
  return {v.i1, v.i2, static_cast<int>(v.l1), static_cast<int>(v.l2), v.n};
}

class Solver {
 public:
  explicit Solver(const AlignmentGraph& g) : g_(g), n_(g.size()) {
    const std::size_t total = static_cast<std::size_t>(n_ * n_ * kStates);
    valid_.assign(total, 0);
    weight_.assign(total, 0);
    for (int i1 = 0; i1 < n_; ++i1) {
      for (int i2 = 0; i2 < n_; ++i2) {
        for (int st = 0; st < kStates; ++st) {
          const auto v = vertex(i1, i2, st);
          if (!g_.valid(v)) continue;
          valid_[id(i1, i2, st)] = 1;
          weight_[id(i1, i2, st)] = static_cast<std::uint8_t>(g_.weight(v));
        }
      }
    }
  }

  std::size_t id(int i1, int i2, int st) const {
    return (static_cast<std::size_t>(i1) * static_cast<std::size_t>(n_) +
            static_cast<std::size_t>(i2)) * kStates + static_cast<std::size_t>(st);
  }

  SegVertex vertex(int i1, int i2, int st) const {
    const auto info = state_info(st);
    return {i1, info.l1, i2, info.l2, info.n};
  }

  SegVertex vertex(std::size_t packed) const {
    const int st = static_cast<int>(packed % kStates);
    const int c = static_cast<int>(packed / kStates);
    return vertex(c / n_, c % n_, st);
  }

  bool start_eligible(int i1, int i2, int st) const {
    const auto info = state_info(st);
    return valid_[id(i1, i2, st)] && info.n == 0 && start_label(info.l1) && start_label(info.l2);
  }

  /// Best weight of a path from the vertex to termination, vertex included.
  void suffix_sweep() {
    const std::size_t total = valid_.size();
    suffix_.assign(total, kNone);
    suffix_diag_.assign(total, kNone);
    for (int i1 = n_ - 1; i1 >= 1; --i1) {
      for (int i2 = n_ - 1; i2 >= 1; --i2) {
        for (int st = 0; st < kStates; ++st) {
          const auto here = id(i1, i2, st);
          if (!valid_[here]) continue;
          int best = 0;
          for (const auto& l : links_by_source()[static_cast<std::size_t>(st)]) {
            const int q1 = i1 + l.s2_min + l.c;
            const int q2 = i2 + l.s2_min;
            if (q1 >= n_ || q2 >= n_) continue;
            const auto there = id(q1, q2, l.target);
            best = std::max(best, l.exact ? suffix_[there] : suffix_diag_[there]);
          }
          suffix_[here] = best + weight_[here];
        }
        for (int st = 0; st < kStates; ++st) {
          const auto here = id(i1, i2, st);
          int diag = suffix_[here];
          if (i1 + 1 < n_ && i2 + 1 < n_) diag = std::max(diag, suffix_diag_[id(i1 + 1, i2 + 1, st)]);
          suffix_diag_[here] = diag;
        }
      }
    }
  }

  /// Vertices reachable from `origin` (or from start when empty) through
  /// weight-0 intermediates. Fills reach_ and parent_ (kRoot = direct edge).
  void reach_sweep(const std::optional<SegVertex>& origin) {
    const std::size_t total = valid_.size();
    reach_.assign(total, 0);
    parent_.assign(total, kUnset);
    // Running "some weight-0 reachable vertex on this diagonal" and a witness.
    std::vector<std::size_t> diag_witness(total, kUnset);
    const Vertex from = origin ? Vertex::segmentation(*origin) : Vertex::start();
    for (int i1 = 1; i1 < n_; ++i1) {
      for (int i2 = 1; i2 < n_; ++i2) {
        for (int st = 0; st < kStates; ++st) {
          const auto here = id(i1, i2, st);
          if (!valid_[here]) continue;
          const auto v = vertex(i1, i2, st);
          if (origin ? g_.has_edge(from, v) : start_eligible(i1, i2, st)) {
            reach_[here] = 1;
            parent_[here] = kRoot;
            continue;
          }
          for (const auto& l : links_by_target()[static_cast<std::size_t>(st)]) {
            const int p1 = i1 - l.s2_min - l.c;
            const int p2 = i2 - l.s2_min;
            if (p1 < 1 || p2 < 1) continue;
            const auto there = id(p1, p2, l.source);
            const std::size_t witness =
                l.exact ? (reach_[there] && !weight_[there] ? there : kUnset) : diag_witness[there];
            if (witness != kUnset) {
              reach_[here] = 1;
              parent_[here] = witness;
              break;
            }
          }
        }
        for (int st = 0; st < kStates; ++st) {
          const auto here = id(i1, i2, st);
          std::size_t w = (valid_[here] && reach_[here] && !weight_[here]) ? here : kUnset;
          if (w == kUnset && i1 > 1 && i2 > 1) w = diag_witness[id(i1 - 1, i2 - 1, st)];
          diag_witness[here] = w;
        }
      }
    }
  }

  /// Best weight of any start-to-termination path.
  int best_total() const {
    int best = 0;
    for (int i1 = 1; i1 < n_; ++i1) {
      for (int i2 = 1; i2 < n_; ++i2) {
        for (int st = 0; st < kStates; ++st) {
          if (start_eligible(i1, i2, st)) best = std::max(best, suffix_[id(i1, i2, st)]);
        }
      }
    }
    return best;
  }

  PathResult solve() {
    suffix_sweep();
    PathResult out;
    out.total_weight = best_total();

    std::optional<SegVertex> current;
    int remaining = out.total_weight;
    while (remaining > 0) {
      reach_sweep(current);
      std::optional<std::size_t> pick;
      for (std::size_t k = 0; k < valid_.size(); ++k) {
        if (!reach_[k] || !weight_[k] || suffix_[k] != remaining) continue;
        if (!pick || order_key(vertex(k)) < order_key(vertex(*pick))) pick = k;
      }
      if (!pick) throw std::logic_error("longest path reconstruction lost its way");
      std::vector<SegVertex> chain;
      for (std::size_t k = *pick; k != kRoot; k = parent_[k]) chain.push_back(vertex(k));
      std::reverse(chain.begin(), chain.end());
      out.path.insert(out.path.end(), chain.begin(), chain.end());
      const auto chosen = vertex(*pick);
      out.pairs.push_back({chosen.i1, chosen.l1, chosen.i2, chosen.l2});
      current = chosen;
      --remaining;
    }

    if (out.path.empty()) {
      // Weight 0: any single start-eligible vertex; take the smallest.
      std::optional<SegVertex> first;
      for (int i1 = 1; i1 < n_; ++i1) {
        for (int i2 = 1; i2 < n_; ++i2) {
          for (int st = 0; st < kStates; ++st) {
            if (!start_eligible(i1, i2, st)) continue;
            const auto v = vertex(i1, i2, st);
            if (!first || order_key(v) < order_key(*first)) first = v;
          }
        }
      }
      if (first) out.path.push_back(*first);
    }
    if (!out.path.empty()) {
      const auto& head = out.path.front();
      const int diagonal = head.i1 - head.i2 - drift(head.n);
      out.k1 = std::max(diagonal, 0);
      out.k2 = std::max(-diagonal, 0);
    }
    return out;
  }

 private:
  static constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  static constexpr std::size_t kRoot = std::numeric_limits<std::size_t>::max() - 1;

  const AlignmentGraph& g_;
  int n_;
  std::vector<std::uint8_t> valid_;
  std::vector<std::uint8_t> weight_;
  std::vector<int> suffix_;
  std::vector<int> suffix_diag_;
  std::vector<std::uint8_t> reach_;
  std::vector<std::size_t> parent_;
};

}  // namespace

PathResult longest_path(const AlignmentGraph& graph) {
  Solver solver(graph);
  return solver.solve();
}

int longest_path_weight(const AlignmentGraph& graph) {
  Solver solver(graph);
  solver.suffix_sweep();
  return solver.best_total();
}

std::vector<Rational> threshold_grid(std::int64_t den) {
  std::vector<Rational> out;
  for (std::int64_t k = 1; k < den; ++k) out.emplace_back(k, den);
  return out;
}

std::vector<ScanEntry> scan_thresholds(const std::vector<Q256>& d1, const std::vector<Q256>& d2,
                                       const std::vector<Rational>& thresholds) {
  std::map<std::vector<int>, PathResult> cache;
  std::vector<ScanEntry> out;
  for (const auto& v : thresholds) {
    AlignmentGraph graph(d1, d2, v);
    std::vector<int> signature;
    for (int i = 0; i < graph.size(); ++i) {
      for (auto l : kAllLabels) {
        signature.push_back(sign(graph.omega1(i, l)));
        signature.push_back(sign(graph.omega2(i, l)));
      }
    }
    auto it = cache.find(signature);
    if (it == cache.end()) it = cache.emplace(signature, longest_path(graph)).first;
    out.push_back({v, it->second});
  }
  return out;
}

RecoveryThresholds recovery_thresholds(const MeasurementMatrix& m1, const MeasurementMatrix& m2,
                                       const Matrix<Rational>& md1, const Matrix<Rational>& md2,
                                       const std::vector<Q256>& g_d, const RegionCounts& rc1,
                                       const RegionCounts& rc2) {
  RecoveryThresholds out;
  const Rational zero(0);
  const Rational one(1);
  const Rational half(1, 2);
  auto absr = [&](const Rational& r) { return r < zero ? -r : r; };
  auto take_min = [](std::optional<Rational>& slot, const Rational& value) {
    if (!slot || value < *slot) slot = value;
  };

  const std::array<const MeasurementMatrix*, 2> ms = {&m1, &m2};
  const std::array<const Matrix<Rational>*, 2> mds = {&md1, &md2};
  const std::array<const RegionCounts*, 2> rcs = {&rc1, &rc2};
  const int cols = static_cast<int>(g_d.size());

  for (std::size_t k = 0; k < 2; ++k) {
    const auto& M = ms[k]->entries;
    const auto& MD = *mds[k];
    const int rows = M.rows();
    out.product[k] = multiply(MD, g_d);
    for (int i = 0; i < rows; ++i) {
      if (out.product[k][static_cast<std::size_t>(i)] == zero) out.zero_set[k].push_back(i);
    }
    auto md = [&](int i, int j) {
      return (i >= 0 && i < rows && j >= 0 && j < cols) ? MD(i, j) : zero;
    };
    auto step = [&](int j) { return absr(g_d[static_cast<std::size_t>(j)].to_rational()); };

    for (int j = 0; j < cols; ++j) {
      const int iota = rcs[k]->iota[static_cast<std::size_t>(j)];
      if (iota < rows && M(iota, j) < one) {
        const Rational m = M(iota, j);
        take_min(out.tau_f, std::min(m - half, one - m) * step(j));
      }
      if (iota - 1 >= 0 && M(iota - 1, j) > zero) {
        const Rational m = M(iota - 1, j);
        take_min(out.tau_s, std::min(half - m, m) * step(j));
      }
      if (md(iota, j) == one) {
        take_min(out.tau_a, step(j));
        if (j + 1 < cols && md(iota + 1, j + 1) > zero) {
          take_min(out.tau_ab, half * absr(step(j) - md(iota + 1, j + 1) * step(j + 1)));
          out.b_pure_before_split[k].push_back(iota);
        }
        if (j >= 1 && md(iota - 1, j - 1) > zero) {
          take_min(out.tau_ae, half * absr(step(j) - md(iota - 1, j - 1) * step(j - 1)));
          out.b_pure_after_split[k].push_back(iota);
        }
      }
      if (md(iota + 1, j) > zero) out.b_first[k].push_back(iota);
      if (md(iota - 1, j) > zero) out.b_second[k].push_back(iota);
    }
  }
  for (const auto* slot : {&out.tau_f, &out.tau_s, &out.tau_a, &out.tau_ab, &out.tau_ae}) {
    if (*slot) take_min(out.tau, **slot);
  }
  return out;
}

ConditionReport verify_noise_conditions(const std::vector<Q256>& d1,
                                           const std::vector<Q256>& d2,
                                           const RecoveryThresholds& th, const Rational& v) {
  ConditionReport report;
  auto fail = [&](std::string what) { report.violations.push_back(std::move(what)); };
  if (v <= Rational(0) || (th.tau && v >= *th.tau)) fail("v outside (0, tau)");

  const std::array<const std::vector<Q256>*, 2> ds = {&d1, &d2};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& d = *ds[k];
    const auto& product = th.product[k];
    const std::string seq = "d" + std::to_string(k + 1);
    if (d.size() != product.size()) {
      fail(seq + " length differs from its ground truth");
      continue;
    }
    const bool v_ok = v > Rational(0);
    for (std::size_t i = 0; i < d.size() && v_ok; ++i) {
      const auto& truth = product[i];
      const std::string at = seq + "[" + std::to_string(i) + "]";
      if (truth == Rational(0)) {
        if (at_least(d[i], v)) fail(at + " on the zero set has magnitude >= v");
      } else if (truth > Rational(0)) {
        if (!(d[i].num > 0 && at_least(d[i], v))) fail(at + " should be >= v");
      } else {
        if (!(d[i].num < 0 && at_least(d[i], v))) fail(at + " should be <= -v");
      }
    }
    for (int i : th.b_first[k]) {
      if (!(abs(entry(d, i)) > abs(entry(d, i + 1)))) {
        fail(seq + " split at " + std::to_string(i) + " lost its larger first share");
      }
    }
    for (int i : th.b_second[k]) {
      if (!(abs(entry(d, i)) > abs(entry(d, i - 1)))) {
        fail(seq + " split at " + std::to_string(i) + " lost its larger second share");
      }
    }
  }
  report.satisfied = report.violations.empty();
  return report;
}

std::string path_result_json(const Rational& v, const PathResult& result) {
  nlohmann::ordered_json j;
  j["v"] = format_rational(v);
  j["total_weight"] = result.total_weight;
  auto& pairs = j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : result.pairs) {
    pairs.push_back({{"i1", p.i1},
                     {"lambda1", to_string(p.l1)},
                     {"i2", p.i2},
                     {"lambda2", to_string(p.l2)}});
  }
  j["alignment"] = {result.k1, result.k2};
  return j.dump(2) + "\n";
}

}  // namespace blurreg
