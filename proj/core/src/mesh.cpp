#include "viscogrid/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "viscogrid/error.hpp"

namespace viscogrid {

namespace {

constexpr double kCircleTol = 1e-12;

void number_free_nodes(MeshLevel& mesh) {
  mesh.free_index.assign(mesh.nodes.size(), -1);
  mesh.free_nodes.clear();
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (!mesh.is_boundary[i]) {
      mesh.free_index[i] = static_cast<int>(mesh.free_nodes.size());
      mesh.free_nodes.push_back(i);
    }
  }
}

std::pair<int, int> sorted_edge(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

}  // namespace

double MeshLevel::signed_area(int t) const {
  const auto& [a, b, c] = triangles[t];
  const Point& pa = nodes[a];
  const Point& pb = nodes[b];
  const Point& pc = nodes[c];
  return 0.5 * ((pb.x - pa.x) * (pc.y - pa.y) - (pc.x - pa.x) * (pb.y - pa.y));
}

double MeshLevel::total_area() const {
  double area = 0.0;
  for (int t = 0; t < num_triangles(); ++t) area += signed_area(t);
  return area;
}

void MeshLevel::check_invariants() const {
  const std::string where = "level " + std::to_string(level) + ": ";
  if (is_boundary.size() != nodes.size()) throw StructuralError(where + "boundary flags size mismatch");
  for (int t = 0; t < num_triangles(); ++t) {
    for (int v : triangles[t]) {
      if (v < 0 || v >= num_nodes()) throw StructuralError(where + "triangle references missing node");
    }
    if (!(signed_area(t) > 0.0)) {
      throw StructuralError(where + "triangle " + std::to_string(t) + " has non-positive area");
    }
  }
  for (int i = 0; i < num_nodes(); ++i) {
    if (is_boundary[i] && std::abs(std::hypot(nodes[i].x, nodes[i].y) - 1.0) > kCircleTol) {
      throw StructuralError(where + "boundary node " + std::to_string(i) + " is off the unit circle");
    }
  }
  const int expected_parents = n_coarse == 0 ? 0 : num_nodes() - n_coarse;
  if (static_cast<int>(parents.size()) != expected_parents) {
    throw StructuralError(where + "parent table does not cover the midpoint nodes");
  }
  for (const ParentPair& pp : parents) {
    if (pp.first >= pp.second || pp.first < 0 || pp.second >= n_coarse) {
      throw StructuralError(where + "invalid parent pair");
    }
  }
}

MeshLevel build_unit_disk_coarse() {
  MeshLevel mesh;
  mesh.level = 0;
  mesh.nodes = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  mesh.is_boundary = {0, 1, 1, 1, 1};
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 1}};
  mesh.n_coarse = 0;
  number_free_nodes(mesh);
  return mesh;
}

MeshLevel refine(const MeshLevel& coarse) {
  for (int t = 0; t < coarse.num_triangles(); ++t) {
    if (!(coarse.signed_area(t) > 0.0)) {
      throw StructuralError("refine: coarse triangle " + std::to_string(t) + " is degenerate");
    }
  }

  // Edge -> number of incident triangles; boundary edges have exactly one.
  std::map<std::pair<int, int>, int> edges;
  for (const Triangle& tri : coarse.triangles) {
    for (int e = 0; e < 3; ++e) ++edges[sorted_edge(tri[e], tri[(e + 1) % 3])];
  }

  MeshLevel fine;
  fine.level = coarse.level + 1;
  fine.n_coarse = coarse.num_nodes();
  fine.nodes = coarse.nodes;
  fine.is_boundary = coarse.is_boundary;
  fine.nodes.reserve(coarse.nodes.size() + edges.size());
  fine.parents.reserve(edges.size());

  std::map<std::pair<int, int>, int> midpoint_of;
  for (const auto& [edge, count] : edges) {
    const auto [a, b] = edge;
    const Point& pa = coarse.nodes[a];
    const Point& pb = coarse.nodes[b];
    Point mid{0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)};
    const bool on_boundary = count == 1 && coarse.is_boundary[a] && coarse.is_boundary[b];
    if (on_boundary) {
      const double r = std::hypot(mid.x, mid.y);
      mid = {mid.x / r, mid.y / r};
    }
    midpoint_of[edge] = fine.num_nodes();
    fine.nodes.push_back(mid);
    fine.is_boundary.push_back(on_boundary ? 1 : 0);
    fine.parents.push_back({a, b});
  }

  fine.triangles.reserve(4 * coarse.triangles.size());
  for (const Triangle& tri : coarse.triangles) {
    const auto [a, b, c] = tri;
    const int ab = midpoint_of.at(sorted_edge(a, b));
    const int bc = midpoint_of.at(sorted_edge(b, c));
    const int ca = midpoint_of.at(sorted_edge(c, a));
    fine.triangles.push_back({a, ab, ca});
    fine.triangles.push_back({ab, b, bc});
    fine.triangles.push_back({ca, bc, c});
    fine.triangles.push_back({ab, bc, ca});
  }

  number_free_nodes(fine);
  fine.check_invariants();
  return fine;
}

MeshHierarchy MeshHierarchy::unit_disk(int num_levels) {
  if (num_levels < 1) throw ArgumentError("unit_disk: need at least one level");
  std::vector<MeshLevel> levels;
  levels.reserve(num_levels);
  levels.push_back(build_unit_disk_coarse());
  for (int k = 1; k < num_levels; ++k) levels.push_back(refine(levels.back()));
  return MeshHierarchy(std::move(levels));
}

MeshHierarchy::MeshHierarchy(std::vector<MeshLevel> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw ArgumentError("MeshHierarchy: no levels");
  for (std::size_t k = 1; k < levels_.size(); ++k) {
    if (levels_[k].n_coarse != levels_[k - 1].num_nodes()) {
      throw StructuralError("MeshHierarchy: level " + std::to_string(k) + " is not nested in its parent");
    }
  }
}

MeshHierarchy MeshHierarchy::finest_levels(int count) const {
  if (count < 1 || count > num_levels()) throw ArgumentError("finest_levels: count out of range");
  std::vector<MeshLevel> kept(levels_.end() - count, levels_.end());
  for (int k = 0; k < count; ++k) kept[k].level = k;
  // The new coarsest level has no parent inside this hierarchy.
  kept.front().n_coarse = 0;
  kept.front().parents.clear();
  return MeshHierarchy(std::move(kept));
}

NodalField prolongate(const NodalField& coarse_values, const MeshLevel& fine) {
  if (coarse_values.level != fine.level - 1 || coarse_values.values.size() != fine.n_coarse) {
    throw ArgumentError("prolongate: field does not live on the parent of level " + std::to_string(fine.level));
  }
  NodalField out{fine.level, Eigen::VectorXd(fine.num_nodes())};
  out.values.head(fine.n_coarse) = coarse_values.values;
  for (std::size_t m = 0; m < fine.parents.size(); ++m) {
    const ParentPair& pp = fine.parents[m];
    out.values[fine.n_coarse + static_cast<int>(m)] =
        0.5 * (coarse_values.values[pp.first] + coarse_values.values[pp.second]);
  }
  return out;
}

NodalField restrict_field(const NodalField& w, const MeshLevel& fine) {
  if (w.level != fine.level || w.values.size() != fine.num_nodes() || fine.level == 0) {
    throw ArgumentError("restrict_field: field does not live on level " + std::to_string(fine.level));
  }
  NodalField out{fine.level - 1, w.values.head(fine.n_coarse)};
  for (std::size_t m = 0; m < fine.parents.size(); ++m) {
    const ParentPair& pp = fine.parents[m];
    const double half = 0.5 * w.values[fine.n_coarse + static_cast<int>(m)];
    out.values[pp.first] += half;
    out.values[pp.second] += half;
  }
  return out;
}

NodalField inject(const NodalField& w, const MeshLevel& fine) {
  if (w.level != fine.level || w.values.size() != fine.num_nodes() || fine.level == 0) {
    throw ArgumentError("inject: field does not live on level " + std::to_string(fine.level));
  }
  return {fine.level - 1, w.values.head(fine.n_coarse)};
}

Eigen::SparseMatrix<double> prolongation_matrix(const MeshLevel& fine) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(fine.n_coarse + 2 * fine.parents.size());
  for (int i = 0; i < fine.n_coarse; ++i) entries.emplace_back(i, i, 1.0);
  for (std::size_t m = 0; m < fine.parents.size(); ++m) {
    const int row = fine.n_coarse + static_cast<int>(m);
    entries.emplace_back(row, fine.parents[m].first, 0.5);
    entries.emplace_back(row, fine.parents[m].second, 0.5);
  }
  Eigen::SparseMatrix<double> p(fine.num_nodes(), fine.n_coarse);
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

void apply_dirichlet_mask(const MeshLevel& mesh, Eigen::VectorXd& values) {
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mesh.is_boundary[i]) values[i] = 0.0;
  }
}

}  // namespace viscogrid
