#pragma once

#include "stokesmg/basis.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace stokesmg {

enum class FaceKind : std::uint8_t { Intraphase, Interphase, Dirichlet, Stress };
enum class BoundaryKind : std::uint8_t { Periodic, Dirichlet, Stress };

/// Mesh face. The unit normal is sign * e_axis and points away from the
/// "minus" element: left-to-right on intraphase faces, from the smaller phase
/// index into the larger on interphase faces, outward on boundary faces.
struct Face {
  FaceKind kind = FaceKind::Intraphase;
  int minus = -1;
  int plus = -1;  // -1 on boundary faces
  int axis = 0;
  int sign = +1;
  double lambda = 0.5;  // interphase flux weight
  Vec3 center = Vec3::Zero();
};

/// Boundary conditions on the unit box: per-axis periodicity plus a tag per
/// boundary facet (facet 2*axis = low side, 2*axis+1 = high side).
struct BcSpec {
  std::array<bool, 3> periodic{false, false, false};
  std::array<BoundaryKind, 6> facet{BoundaryKind::Dirichlet, BoundaryKind::Dirichlet,
                                    BoundaryKind::Dirichlet, BoundaryKind::Dirichlet,
                                    BoundaryKind::Dirichlet, BoundaryKind::Dirichlet};
  static BcSpec all_periodic();
  static BcSpec all_dirichlet();
  static BcSpec all_stress();
};

/// Uniform Cartesian mesh of the unit box (0,1)^d with per-element phase
/// labels. Phase regions are unions of whole elements; interphase faces exist
/// exactly where neighboring elements differ in phase. Immutable after
/// construction except for the interphase flux weights.
class CartesianMesh {
public:
  int dim() const { return dim_; }
  int cells_per_axis() const { return n_; }
  double element_size() const { return h_; }
  int num_elements() const { return static_cast<int>(phase_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int phase(int e) const { return phase_[e]; }
  int num_phases() const { return num_phases_; }
  const std::vector<Face>& faces() const { return faces_; }
  const BcSpec& bc() const { return bc_; }

  bool fully_periodic() const;
  bool has_dirichlet() const;
  bool has_stress() const;
  bool has_interface() const;

  std::array<int, 3> cell_index(int e) const;
  int element_id(const std::array<int, 3>& idx) const;
  Vec3 element_low_corner(int e) const;
  Vec3 element_center(int e) const;
  /// Element owning an interior point of (0,1)^d; throws outside the box.
  int locate(const Vec3& x) const;

  void set_lambda(int face_id, double lambda);

  friend CartesianMesh build_mesh(int dim, int n, const std::function<int(const std::array<int, 3>&)>& phase_of,
                                  const BcSpec& bc);

private:
  int dim_ = 2;
  int n_ = 0;
  double h_ = 0.0;
  int num_phases_ = 1;
  BcSpec bc_;
  std::vector<int> phase_;
  std::vector<Face> faces_;
};

/// Builds the mesh and classifies every face. `phase_of` maps a cell index to
/// its 1-based phase label. Requires n >= 2 and a power of two.
CartesianMesh build_mesh(int dim, int n, const std::function<int(const std::array<int, 3>&)>& phase_of,
                         const BcSpec& bc);

/// Nested element hierarchy for multigrid, coarsening by a factor of two per
/// axis per level. Level 0 is the finest mesh; parent[l][e] maps a level-l
/// element to its level-(l+1) parent. Coarsening stops at 2 cells per axis or
/// as soon as a 2^d sibling group would mix phases.
struct HierarchyMap {
  std::vector<int> cells_per_axis;        // per level, size = num_levels
  std::vector<std::vector<int>> parent;   // size = num_levels - 1
  std::vector<std::vector<int>> phase;    // per level, per element
  int num_levels() const { return static_cast<int>(cells_per_axis.size()); }
  int bottom_level() const { return num_levels() - 1; }
};

HierarchyMap build_hierarchy(const CartesianMesh& mesh);

/// Explicit mesh of hierarchy level l (same boundary conditions, inherited
/// phases). Used by direct-assembly checks; the solver itself never meshes
/// coarse levels.
CartesianMesh coarse_mesh(const CartesianMesh& fine, const HierarchyMap& map, int level);

}  // namespace stokesmg
