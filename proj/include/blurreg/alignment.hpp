#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blurreg/matrices.hpp"
#include "blurreg/rational.hpp"
#include "blurreg/signal.hpp"

namespace blurreg {

/// How a step shows up around the first sample after a discontinuity.
///   F   split, larger share at i and the rest at i+1
///   S   split, smaller share at i-1 and the rest at i
///   Ab  unsplit; a split step may follow
///   Ae  unsplit; directly after a split step
enum class SegLabel : std::uint8_t { F = 0, S = 1, Ab = 2, Ae = 3 };

inline constexpr std::array<SegLabel, 4> kAllLabels = {SegLabel::F, SegLabel::S, SegLabel::Ab,
                                                       SegLabel::Ae};

const char* to_string(SegLabel label);
SegLabel parse_label(const std::string& text);

/// Cluster weight of d[i] under `label` with magnitude threshold v; zero
/// when the label's shape conditions fail. Entries outside d read as 0.
Q256 label_score(const std::vector<Q256>& d, int i, SegLabel label, const Rational& v);

/// 1 iff both cluster weights are nonzero with the same sign.
int pair_weight(const std::vector<Q256>& d1, int i1, SegLabel l1, const std::vector<Q256>& d2,
                int i2, SegLabel l2, const Rational& v);

/// Whether a path may go from (i, from) to (i + step, to) within one
/// sequence of length n.
bool admissible(SegLabel from, SegLabel to, int i, int step, int n);

/// Segmentation vertex (i1, l1, i2, l2, n). The offset tag n records the
/// drift of i1 - i2 against the starting alignment: 0 none, 1 one extra
/// sample in sequence 1, 2 one extra sample in sequence 2.
struct SegVertex {
  int i1 = 0;
  SegLabel l1 = SegLabel::F;
  int i2 = 0;
  SegLabel l2 = SegLabel::F;
  int n = 0;

  friend bool operator==(const SegVertex&, const SegVertex&) = default;
  friend auto operator<=>(const SegVertex&, const SegVertex&) = default;
};

/// Drift of i1 - i2 encoded by an offset tag.
constexpr int drift(int n) { return n == 1 ? 1 : (n == 2 ? -1 : 0); }

enum class VertexKind : std::uint8_t { Start, Alignment, Segmentation, Termination };

struct Vertex {
  VertexKind kind = VertexKind::Start;
  /// Alignment vertex (k1, k2).
  int k1 = 0;
  int k2 = 0;
  SegVertex seg;

  static Vertex start() { return {VertexKind::Start, 0, 0, {}}; }
  static Vertex termination() { return {VertexKind::Termination, 0, 0, {}}; }
  static Vertex alignment(int k1, int k2) { return {VertexKind::Alignment, k1, k2, {}}; }
  static Vertex segmentation(SegVertex s) { return {VertexKind::Segmentation, 0, 0, s}; }

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

std::string to_string(const Vertex& v);

/// The directed acyclic graph over two difference sequences of equal
/// length. Vertices and edges are implicit; `successors` enumerates the
/// out-edges of a vertex on demand and `weight` gives the weight carried by
/// every edge entering a segmentation vertex.
class AlignmentGraph {
 public:
  AlignmentGraph(std::vector<Q256> d1, std::vector<Q256> d2, Rational v);

  int size() const { return n_; }
  const Rational& v() const { return v_; }
  const std::vector<Q256>& d1() const { return d1_; }
  const std::vector<Q256>& d2() const { return d2_; }

  bool valid(const SegVertex& s) const;
  int weight(const SegVertex& s) const;
  Q256 omega1(int i, SegLabel l) const { return omega_[0][cell(i, l)]; }
  Q256 omega2(int i, SegLabel l) const { return omega_[1][cell(i, l)]; }

  /// Out-neighbours, built directly from the edge lists: start to every
  /// alignment vertex, alignment vertex to matching segmentation vertices,
  /// segmentation vertices to each other and to termination.
  std::vector<Vertex> successors(const Vertex& from) const;

  /// Edge test between segmentation vertices (or from an alignment vertex).
  bool has_edge(const Vertex& from, const SegVertex& to) const;

  /// Number of valid segmentation vertices.
  int segmentation_vertex_count() const;

  /// Graphviz dump of everything reachable from start; throws if that
  /// exceeds `max_vertices`.
  std::string to_dot(std::size_t max_vertices = 5000) const;

 private:
  std::size_t cell(int i, SegLabel l) const {
    return static_cast<std::size_t>(i) * 4 + static_cast<std::size_t>(l);
  }

  int n_;
  std::vector<Q256> d1_;
  std::vector<Q256> d2_;
  Rational v_;
  std::array<std::vector<Q256>, 2> omega_;
};

AlignmentGraph build_graph(const std::vector<Q256>& d1, const std::vector<Q256>& d2,
                           const Rational& v);

struct MatchedPair {
  int i1 = 0;
  SegLabel l1 = SegLabel::F;
  int i2 = 0;
  SegLabel l2 = SegLabel::F;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct PathResult {
  int total_weight = 0;
  std::vector<MatchedPair> pairs;
  /// Alignment vertex (k1, k2) the path leaves start through.
  int k1 = 0;
  int k2 = 0;
  /// Segmentation vertices on the chosen path, weight-0 ones included.
  std::vector<SegVertex> path;

  std::vector<std::pair<int, int>> pair_indices() const;
};

/// Maximum-weight start-to-termination path.
///
/// Among maximum-weight paths the one whose list of weight-1 vertices is
/// lexicographically smallest (by (i1, i2, l1, l2, n)) is reported. Uses
/// diagonal prefix maxima so each vertex costs O(48) instead of O(48 N).
PathResult longest_path(const AlignmentGraph& graph);

/// Best path weight only (one sweep, no reconstruction).
int longest_path_weight(const AlignmentGraph& graph);

struct ScanEntry {
  Rational v;
  PathResult result;
};

/// Runs the longest-path search for each threshold. Thresholds that yield
/// identical weight tables share one search.
std::vector<ScanEntry> scan_thresholds(const std::vector<Q256>& d1, const std::vector<Q256>& d2,
                                       const std::vector<Rational>& thresholds);

/// k/den for k = 1 .. den-1 (multiples of 1/den inside (0, 1)).
std::vector<Rational> threshold_grid(std::int64_t den = 512);

/// Ground-truth quantities bounding the noise under which the scheme is
/// guaranteed to recover every first-sample-after-discontinuity pair.
struct RecoveryThresholds {
  std::optional<Rational> tau_f;
  std::optional<Rational> tau_s;
  std::optional<Rational> tau_a;
  std::optional<Rational> tau_ab;
  std::optional<Rational> tau_ae;
  /// Minimum over the components present; empty means unbounded.
  std::optional<Rational> tau;

  /// Per sequence: ground-truth M_D g_D, its zero set and the B-sets.
  std::array<std::vector<Rational>, 2> product;
  std::array<std::vector<int>, 2> zero_set;
  std::array<std::vector<int>, 2> b_first;
  std::array<std::vector<int>, 2> b_second;
  std::array<std::vector<int>, 2> b_pure_before_split;
  std::array<std::vector<int>, 2> b_pure_after_split;
};

/// Both sequences' measurement/difference matrices and region counts
/// against the same signal.
RecoveryThresholds recovery_thresholds(const MeasurementMatrix& m1, const MeasurementMatrix& m2,
                                       const Matrix<Rational>& md1, const Matrix<Rational>& md2,
                                       const std::vector<Q256>& g_d, const RegionCounts& rc1,
                                       const RegionCounts& rc2);

struct ConditionReport {
  bool satisfied = false;
  std::vector<std::string> violations;
};

/// Checks the noise conditions (v inside (0, tau), small entries on the
/// zero set, signed entries elsewhere, ordered split pairs).
ConditionReport verify_noise_conditions(const std::vector<Q256>& d1,
                                           const std::vector<Q256>& d2,
                                           const RecoveryThresholds& thresholds,
                                           const Rational& v);

/// JSON {v, total_weight, pairs, alignment}.
std::string path_result_json(const Rational& v, const PathResult& result);

}  // namespace blurreg
