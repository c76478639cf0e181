#include "liecoord/graph.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace liecoord {

CommGraph::CommGraph(int agents, std::vector<Segment> segments, bool undirected, double period)
    : agents_(agents), segments_(std::move(segments)), undirected_(undirected), period_(period) {
  if (agents_ < 1) throw UsageError("graph: agent count must be >= 1");
  if (segments_.empty()) throw UsageError("graph: schedule has no segments");
  if (!(period_ >= 0.0)) throw UsageError("graph: period must be >= 0");
  if (segments_.front().start != 0.0) throw UsageError("graph: first segment must start at 0");
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (!(segments_[i].start > segments_[i - 1].start)) {
      throw UsageError("graph: schedule breakpoints must be strictly increasing");
    }
  }
  if (period_ > 0.0 && !(segments_.back().start < period_)) {
    throw UsageError("graph: every segment must start before the period ends");
  }
  in_lists_.resize(segments_.size());
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    auto& edges = segments_[s].edges;
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    in_lists_[s].assign(agents_, {});
    for (const Edge& e : edges) {
      if (e.from < 0 || e.from >= agents_ || e.to < 0 || e.to >= agents_) {
        throw UsageError("graph: edge (" + std::to_string(e.from) + ", " + std::to_string(e.to) +
                         ") out of range");
      }
      if (e.from == e.to) throw UsageError("graph: self-loop on agent " + std::to_string(e.from));
      if (undirected_ && !std::binary_search(edges.begin(), edges.end(), Edge{e.to, e.from})) {
        throw UsageError("graph: undirected flag set but edge set is not symmetric");
      }
      in_lists_[s][e.to].push_back(e.from);
    }
    for (auto& list : in_lists_[s]) std::sort(list.begin(), list.end());
  }
}

CommGraph CommGraph::fixed(int agents, std::vector<Edge> edges, bool undirected) {
  return CommGraph(agents, {Segment{0.0, std::move(edges)}}, undirected);
}

CommGraph CommGraph::undirected(int agents, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<Edge> edges;
  for (auto [a, b] : pairs) {
    edges.push_back({a, b});
    edges.push_back({b, a});
  }
  return fixed(agents, std::move(edges), true);
}

CommGraph CommGraph::complete(int agents) {
  std::vector<Edge> edges;
  for (int j = 0; j < agents; ++j)
    for (int k = 0; k < agents; ++k)
      if (j != k) edges.push_back({j, k});
  return fixed(agents, std::move(edges), true);
}

CommGraph CommGraph::empty(int agents) { return fixed(agents, {}, true); }

CommGraph CommGraph::directed_chain(int agents) {
  std::vector<Edge> edges;
  for (int k = 0; k + 1 < agents; ++k) edges.push_back({k, k + 1});
  return fixed(agents, std::move(edges), false);
}

CommGraph CommGraph::ring(int agents) {
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k < agents && agents > 2; ++k) pairs.emplace_back(k, (k + 1) % agents);
  if (agents == 2) pairs.emplace_back(0, 1);
  return undirected(agents, pairs);
}

CommGraph CommGraph::path(int agents) {
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k + 1 < agents; ++k) pairs.emplace_back(k, k + 1);
  return undirected(agents, pairs);
}

CommGraph CommGraph::star(int agents) {
  std::vector<std::pair<int, int>> pairs;
  for (int k = 1; k < agents; ++k) pairs.emplace_back(0, k);
  return undirected(agents, pairs);
}

std::size_t CommGraph::segment_index(double t) const {
  if (segments_.size() == 1) return 0;
  double local = t;
  if (period_ > 0.0) {
    local = std::fmod(t, period_);
    if (local < 0.0) local += period_;
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), local,
                             [](double value, const Segment& s) { return value < s.start; });
  if (it == segments_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(segments_.begin(), it) - 1);
}

const std::vector<int>& CommGraph::in_neighbors(int k, double t) const {
  if (k < 0 || k >= agents_) throw UsageError("in_neighbors: agent " + std::to_string(k) + " out of range");
  return in_lists_[segment_index(t)][k];
}

const std::vector<Edge>& CommGraph::edges_at(double t) const {
  return segments_[segment_index(t)].edges;
}

Eigen::MatrixXd CommGraph::laplacian(double t) const {
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(agents_, agents_);
  for (const Edge& e : edges_at(t)) {
    lap(e.to, e.from) -= 1.0;
    lap(e.to, e.to) += 1.0;
  }
  return lap;
}

namespace {

struct Interval {
  double start;
  double end;
};

/// Maximal contiguous activity intervals of every edge over [0, horizon].
std::vector<std::pair<Edge, std::vector<Interval>>> activity(const CommGraph& graph, double horizon) {
  // Unroll the schedule into (start, end, segment) pieces.
  struct Piece {
    double start;
    double end;
    std::size_t segment;
  };
  std::vector<Piece> pieces;
  const auto& segs = graph.segments();
  if (graph.period() > 0.0) {
    const double period = graph.period();
    for (double base = 0.0; base < horizon; base += period) {
      for (std::size_t s = 0; s < segs.size(); ++s) {
        const double a = base + segs[s].start;
        const double b = base + (s + 1 < segs.size() ? segs[s + 1].start : period);
        if (a >= horizon) break;
        pieces.push_back({a, std::min(b, horizon), s});
      }
    }
  } else {
    for (std::size_t s = 0; s < segs.size(); ++s) {
      const double a = segs[s].start;
      const double b = s + 1 < segs.size() ? segs[s + 1].start : horizon;
      if (a >= horizon) break;
      pieces.push_back({a, std::min(b, horizon), s});
    }
  }

  std::set<Edge> all_edges;
  for (const auto& s : segs) all_edges.insert(s.edges.begin(), s.edges.end());

  std::vector<std::pair<Edge, std::vector<Interval>>> out;
  for (const Edge& e : all_edges) {
    std::vector<Interval> intervals;
    for (const Piece& p : pieces) {
      const auto& edges = segs[p.segment].edges;
      if (!std::binary_search(edges.begin(), edges.end(), e)) continue;
      if (!intervals.empty() && intervals.back().end == p.start) {
        intervals.back().end = p.end;
      } else {
        intervals.push_back({p.start, p.end});
      }
    }
    out.emplace_back(e, std::move(intervals));
  }
  return out;
}

std::vector<bool> roots_reaching_all(int agents, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> out_lists(agents);
  for (const Edge& e : edges) out_lists[e.from].push_back(e.to);
  std::vector<bool> roots(agents, false);
  for (int root = 0; root < agents; ++root) {
    std::vector<bool> seen(agents, false);
    std::vector<int> stack{root};
    seen[root] = true;
    int count = 1;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b : out_lists[a]) {
        if (!seen[b]) {
          seen[b] = true;
          ++count;
          stack.push_back(b);
        }
      }
    }
    roots[root] = count == agents;
  }
  return roots;
}

}  // namespace

bool is_uniformly_connected(const CommGraph& graph, double dwell, double window, double horizon) {
  if (!(dwell > 0.0) || !(dwell <= window) || !(window <= horizon)) {
    throw UsageError("is_uniformly_connected: require 0 < dwell <= window <= horizon");
  }
  const int n = graph.size();
  if (n == 1) return true;
  const auto act = activity(graph, horizon);

  const double last = horizon - window;
  std::vector<double> critical{0.0, last};
  for (const auto& [edge, intervals] : act) {
    for (const Interval& iv : intervals) {
      for (double c : {iv.start + dwell - window, iv.end - dwell}) {
        if (c > 0.0 && c < last) critical.push_back(c);
      }
    }
  }
  std::sort(critical.begin(), critical.end());
  critical.erase(std::unique(critical.begin(), critical.end()), critical.end());
  std::vector<double> starts = critical;
  for (std::size_t i = 0; i + 1 < critical.size(); ++i) {
    starts.push_back(0.5 * (critical[i] + critical[i + 1]));
  }

  constexpr double kSlack = 1e-12;
  std::vector<bool> candidates(n, true);
  for (double t : starts) {
    std::vector<Edge> qualifying;
    for (const auto& [edge, intervals] : act) {
      for (const Interval& iv : intervals) {
        if (std::min(iv.end, t + window) - std::max(iv.start, t) >= dwell - kSlack) {
          qualifying.push_back(edge);
          break;
        }
      }
    }
    const auto roots = roots_reaching_all(n, qualifying);
    bool any = false;
    for (int k = 0; k < n; ++k) {
      candidates[k] = candidates[k] && roots[k];
      any = any || candidates[k];
    }
    if (!any) return false;
  }
  return true;
}

bool is_connected_undirected(const CommGraph& graph) {
  if (!graph.is_static() || !graph.is_undirected()) {
    throw UsageError("is_connected_undirected: graph must be static and undirected");
  }
  return roots_reaching_all(graph.size(), graph.edges_at(0.0))[0];
}

double algebraic_connectivity(const CommGraph& graph) {
  if (!graph.is_static() || !graph.is_undirected()) {
    throw UsageError("algebraic_connectivity: graph must be static and undirected");
  }
  if (graph.size() < 2) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(graph.laplacian());
  return eig.eigenvalues()(1);
}

}  // namespace liecoord
