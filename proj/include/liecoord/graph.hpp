#pragma once

#include <Eigen/Core>
#include <vector>

#include "liecoord/common.hpp"

namespace liecoord {

/// Directed link `from ~> to`: agent `from` sends information to agent `to`.
struct Edge {
  int from;
  int to;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/**
 * Communication topology with a piecewise-constant edge schedule.
 *
 * Segment i is active on [start_i, start_{i+1}); the last one stays active
 * until the end of the period (or forever for aperiodic schedules). With a
 * positive period the schedule repeats, time being taken modulo the period.
 * All edge weights are 1.
 */
class CommGraph {
 public:
  struct Segment {
    double start = 0.0;
    std::vector<Edge> edges;
  };

  /// Throws UsageError on self-loops, out-of-range ids, non-increasing
  /// breakpoints, or an asymmetric edge set when `undirected` is set.
  CommGraph(int agents, std::vector<Segment> segments, bool undirected, double period = 0.0);

  static CommGraph fixed(int agents, std::vector<Edge> edges, bool undirected);
  /// Each pair (a, b) is added in both directions.
  static CommGraph undirected(int agents, const std::vector<std::pair<int, int>>& pairs);
  static CommGraph complete(int agents);
  static CommGraph empty(int agents);
  /// 0 ~> 1 ~> ... ~> N-1.
  static CommGraph directed_chain(int agents);
  static CommGraph ring(int agents);  // undirected cycle
  static CommGraph path(int agents);  // undirected path (a tree)
  static CommGraph star(int agents);  // undirected star centred on agent 0

  int size() const { return agents_; }
  bool is_static() const { return segments_.size() == 1; }
  bool is_undirected() const { return undirected_; }
  double period() const { return period_; }
  const std::vector<Segment>& segments() const { return segments_; }

  /// Sorted ids j with j ~> k active at time t.
  const std::vector<int>& in_neighbors(int k, double t) const;
  const std::vector<Edge>& edges_at(double t) const;
  std::size_t segment_index(double t) const;

  /// Graph Laplacian L = D_in - A of the edge set active at t (row k sums in-links).
  Eigen::MatrixXd laplacian(double t = 0.0) const;

 private:
  int agents_;
  std::vector<Segment> segments_;
  bool undirected_;
  double period_;
  std::vector<std::vector<std::vector<int>>> in_lists_;  // [segment][agent]
};

inline const std::vector<int>& in_neighbors(const CommGraph& graph, int k, double t) {
  return graph.in_neighbors(k, t);
}

/**
 * Uniform connectivity over [0, horizon]: true iff one root agent reaches
 * every other agent through the union of links that are continuously active
 * for at least `dwell` inside every window [t, t + window].
 *
 * Qualification of a link changes only at t = s + dwell - window and
 * t = e - dwell for each maximal active interval [s, e), so those points and
 * the midpoints between them cover every distinct window.
 */
bool is_uniformly_connected(const CommGraph& graph, double dwell, double window, double horizon);

/// Standard connectivity; requires a static undirected graph.
bool is_connected_undirected(const CommGraph& graph);

/// Second-smallest Laplacian eigenvalue of a static undirected graph.
double algebraic_connectivity(const CommGraph& graph);

}  // namespace liecoord
