#include "stokesmg/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace stokesmg {

BcSpec BcSpec::all_periodic() {
  BcSpec bc;
  bc.periodic = {true, true, true};
  return bc;
}

BcSpec BcSpec::all_dirichlet() {
  BcSpec bc;
  bc.facet.fill(BoundaryKind::Dirichlet);
  return bc;
}

BcSpec BcSpec::all_stress() {
  BcSpec bc;
  bc.facet.fill(BoundaryKind::Stress);
  return bc;
}

bool CartesianMesh::fully_periodic() const {
  for (int k = 0; k < dim_; ++k)
    if (!bc_.periodic[k]) return false;
  return true;
}

bool CartesianMesh::has_dirichlet() const {
  for (int k = 0; k < dim_; ++k) {
    if (bc_.periodic[k]) continue;
    if (bc_.facet[2 * k] == BoundaryKind::Dirichlet || bc_.facet[2 * k + 1] == BoundaryKind::Dirichlet)
      return true;
  }
  return false;
}

bool CartesianMesh::has_stress() const {
  for (int k = 0; k < dim_; ++k) {
    if (bc_.periodic[k]) continue;
    if (bc_.facet[2 * k] == BoundaryKind::Stress || bc_.facet[2 * k + 1] == BoundaryKind::Stress)
      return true;
  }
  return false;
}

bool CartesianMesh::has_interface() const { return num_phases_ > 1; }

std::array<int, 3> CartesianMesh::cell_index(int e) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    idx[k] = e % n_;
    e /= n_;
  }
  return idx;
}

int CartesianMesh::element_id(const std::array<int, 3>& idx) const {
  int e = 0;
  for (int k = dim_ - 1; k >= 0; --k) e = e * n_ + idx[k];
  return e;
}

Vec3 CartesianMesh::element_low_corner(int e) const {
  const auto idx = cell_index(e);
  Vec3 x = Vec3::Zero();
  for (int k = 0; k < dim_; ++k) x[k] = idx[k] * h_;
  return x;
}

Vec3 CartesianMesh::element_center(int e) const {
  Vec3 x = element_low_corner(e);
  for (int k = 0; k < dim_; ++k) x[k] += 0.5 * h_;
  return x;
}

int CartesianMesh::locate(const Vec3& x) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    if (x[k] < 0.0 || x[k] > 1.0) throw std::invalid_argument("locate: point outside the unit box");
    int i = static_cast<int>(std::floor(x[k] / h_));
    if (i == n_) i = n_ - 1;
    idx[k] = i;
  }
  return element_id(idx);
}

void CartesianMesh::set_lambda(int face_id, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("set_lambda: lambda must lie in [0,1]");
  faces_[face_id].lambda = lambda;
}

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Orientation of an interior face between `left` (lower coordinate along the
// face axis) and `right`: left-to-right when the phases agree, otherwise from
// the smaller phase index into the larger.
void classify_interior(const std::vector<int>& phase, Face& f, int left, int right) {
  if (phase[left] == phase[right]) {
    f.kind = FaceKind::Intraphase;
    f.minus = left;
    f.plus = right;
    f.sign = +1;
  } else {
    f.kind = FaceKind::Interphase;
    if (phase[left] < phase[right]) {
      f.minus = left;
      f.plus = right;
      f.sign = +1;
    } else {
      f.minus = right;
      f.plus = left;
      f.sign = -1;
    }
  }
}

}  // namespace

CartesianMesh build_mesh(int dim, int n, const std::function<int(const std::array<int, 3>&)>& phase_of,
                         const BcSpec& bc) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("build_mesh: dim must be 2 or 3");
  if (n < 2 || !is_power_of_two(n)) throw std::invalid_argument("build_mesh: n must be a power of two >= 2");

  CartesianMesh mesh;
  mesh.dim_ = dim;
  mesh.n_ = n;
  mesh.h_ = 1.0 / n;
  mesh.bc_ = bc;

  int nelem = 1;
  for (int k = 0; k < dim; ++k) nelem *= n;
  mesh.phase_.resize(nelem);
  int max_phase = 1;
  for (int e = 0; e < nelem; ++e) {
    const int chi = phase_of(mesh.cell_index(e));
    if (chi < 1) throw std::invalid_argument("build_mesh: phase labels are 1-based");
    mesh.phase_[e] = chi;
    max_phase = std::max(max_phase, chi);
  }
  mesh.num_phases_ = max_phase;

  const double h = mesh.h_;
  // Faces orthogonal to each axis, planes in lexicographic order of the
  // transverse cell index.
  for (int axis = 0; axis < dim; ++axis) {
    int ntrans = nelem / n;  // cells in the transverse directions
    for (int t = 0; t < ntrans; ++t) {
      // Decode the transverse index into a cell index with slot `axis` free.
      std::array<int, 3> idx{0, 0, 0};
      int rem = t;
      for (int k = 0; k < dim; ++k) {
        if (k == axis) continue;
        idx[k] = rem % n;
        rem /= n;
      }
      auto at = [&](int i) {
        auto full = idx;
        full[axis] = i;
        return mesh.element_id(full);
      };
      auto face_center = [&](int plane) {
        Vec3 c = Vec3::Zero();
        for (int k = 0; k < dim; ++k) c[k] = (k == axis) ? plane * h : (idx[k] + 0.5) * h;
        return c;
      };
      for (int plane = 0; plane <= n; ++plane) {
        const bool low_end = (plane == 0), high_end = (plane == n);
        if ((low_end || high_end) && bc.periodic[axis]) {
          if (high_end) continue;  // wrap face emitted once, at plane 0
          Face f;
          f.axis = axis;
          f.center = face_center(0);
          classify_interior(mesh.phase_, f, at(n - 1), at(0));
          mesh.faces_.push_back(f);
          continue;
        }
        if (low_end || high_end) {
          Face f;
          f.axis = axis;
          f.minus = low_end ? at(0) : at(n - 1);
          f.sign = low_end ? -1 : +1;
          f.center = face_center(plane);
          const BoundaryKind tag = bc.facet[2 * axis + (high_end ? 1 : 0)];
          if (tag == BoundaryKind::Periodic)
            throw std::invalid_argument("build_mesh: periodic facets must use the per-axis flag");
          f.kind = (tag == BoundaryKind::Dirichlet) ? FaceKind::Dirichlet : FaceKind::Stress;
          mesh.faces_.push_back(f);
          continue;
        }
        Face f;
        f.axis = axis;
        f.center = face_center(plane);
        classify_interior(mesh.phase_, f, at(plane - 1), at(plane));
        mesh.faces_.push_back(f);
      }
    }
  }
  return mesh;
}

HierarchyMap build_hierarchy(const CartesianMesh& mesh) {
  HierarchyMap map;
  map.cells_per_axis.push_back(mesh.cells_per_axis());
  map.phase.emplace_back();
  map.phase.back().resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) map.phase.back()[e] = mesh.phase(e);

  const int d = mesh.dim();
  while (map.cells_per_axis.back() > 2) {
    const int nf = map.cells_per_axis.back();
    const int nc = nf / 2;
    const auto& fine_phase = map.phase.back();

    auto coarse_id = [&](const std::array<int, 3>& idx) {
      int e = 0;
      for (int k = d - 1; k >= 0; --k) e = e * nc + idx[k];
      return e;
    };
    auto fine_id = [&](const std::array<int, 3>& idx) {
      int e = 0;
      for (int k = d - 1; k >= 0; --k) e = e * nf + idx[k];
      return e;
    };

    int ncelem = 1;
    for (int k = 0; k < d; ++k) ncelem *= nc;
    std::vector<int> coarse_phase(ncelem, -1);
    bool ok = true;
    std::vector<int> parent(fine_phase.size());
    for (int e = 0; e < static_cast<int>(fine_phase.size()) && ok; ++e) {
      std::array<int, 3> idx{0, 0, 0};
      int rem = e;
      for (int k = 0; k < d; ++k) {
        idx[k] = rem % nf;
        rem /= nf;
      }
      std::array<int, 3> cidx{idx[0] / 2, idx[1] / 2, idx[2] / 2};
      const int c = coarse_id(cidx);
      parent[fine_id(idx)] = c;
      if (coarse_phase[c] == -1)
        coarse_phase[c] = fine_phase[e];
      else if (coarse_phase[c] != fine_phase[e])
        ok = false;  // agglomeration would merge phases
    }
    if (!ok) break;
    map.parent.push_back(std::move(parent));
    map.cells_per_axis.push_back(nc);
    map.phase.push_back(std::move(coarse_phase));
  }
  return map;
}

CartesianMesh coarse_mesh(const CartesianMesh& fine, const HierarchyMap& map, int level) {
  const int nc = map.cells_per_axis.at(level);
  const auto& phase = map.phase.at(level);
  const int d = fine.dim();
  return build_mesh(d, nc,
                    [&](const std::array<int, 3>& idx) {
                      int e = 0;
                      for (int k = d - 1; k >= 0; --k) e = e * nc + idx[k];
                      return phase[e];
                    },
                    fine.bc());
}

}  // namespace stokesmg
