#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stokesmg/mesh.hpp"

#include <cmath>
#include <set>

using namespace stokesmg;

namespace {
int single_phase(const std::array<int, 3>&) { return 1; }

// Inner square (1/4,3/4)^2 on an n x n grid.
auto square_phase(int n) {
  return [n](const std::array<int, 3>& idx) {
    for (int k = 0; k < 2; ++k) {
      const double c = (idx[k] + 0.5) / n;
      if (c < 0.25 || c > 0.75) return 2;
    }
    return 1;
  };
}
}  // namespace

TEST_CASE("periodic 2d mesh counts") {
  const auto mesh = build_mesh(2, 4, single_phase, BcSpec::all_periodic());
  CHECK(mesh.num_elements() == 16);
  CHECK(mesh.num_faces() == 32);
  for (const Face& f : mesh.faces()) CHECK(f.kind == FaceKind::Intraphase);
}

TEST_CASE("periodic 3d mesh counts") {
  const auto mesh = build_mesh(3, 2, single_phase, BcSpec::all_periodic());
  CHECK(mesh.num_elements() == 8);
  CHECK(mesh.num_faces() == 24);
}

TEST_CASE("dirichlet 2d mesh counts") {
  const auto mesh = build_mesh(2, 4, single_phase, BcSpec::all_dirichlet());
  // per axis: 3 interior planes * 4 + 2 boundary planes * 4
  CHECK(mesh.num_faces() == 2 * (3 * 4 + 2 * 4));
  int boundary = 0;
  for (const Face& f : mesh.faces())
    if (f.kind == FaceKind::Dirichlet) ++boundary;
  CHECK(boundary == 16);
}

TEST_CASE("square interface face ring at n=8") {
  const auto mesh = build_mesh(2, 8, square_phase(8), BcSpec::all_dirichlet());
  // Brute-force enumeration of the interface: count adjacent cell pairs with
  // differing phases.
  int expected = 0;
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) {
      auto phase = [&](int a, int b) { return square_phase(8)({a, b, 0}); };
      if (i + 1 < 8 && phase(i, j) != phase(i + 1, j)) ++expected;
      if (j + 1 < 8 && phase(i, j) != phase(i, j + 1)) ++expected;
    }
  CHECK(expected == 16);
  int interphase = 0;
  for (const Face& f : mesh.faces())
    if (f.kind == FaceKind::Interphase) {
      ++interphase;
      // normal points from phase 1 (inner) into phase 2 (outer)
      CHECK(mesh.phase(f.minus) == 1);
      CHECK(mesh.phase(f.plus) == 2);
    }
  CHECK(interphase == expected);
}

TEST_CASE("interphase orientation is involution consistent") {
  const auto mesh = build_mesh(2, 8, square_phase(8), BcSpec::all_periodic());
  for (const Face& f : mesh.faces()) {
    if (f.kind == FaceKind::Interphase) {
      CHECK(mesh.phase(f.minus) < mesh.phase(f.plus));
      // the normal leaves the minus element along sign * e_axis
      const Vec3 cm = mesh.element_center(f.minus);
      double delta = f.center[f.axis] - cm[f.axis];
      if (delta > 0.25) delta -= 1.0;  // wrap
      if (delta < -0.25) delta += 1.0;
      CHECK(delta * f.sign > 0.0);
    }
  }
}

TEST_CASE("rejects invalid meshes") {
  CHECK_THROWS(build_mesh(2, 3, single_phase, BcSpec::all_periodic()));
  CHECK_THROWS(build_mesh(2, 0, single_phase, BcSpec::all_periodic()));
  CHECK_THROWS(build_mesh(4, 4, single_phase, BcSpec::all_periodic()));
  CHECK_THROWS(build_mesh(2, 4, [](const std::array<int, 3>&) { return 0; }, BcSpec::all_periodic()));
}

TEST_CASE("hierarchy halves down to two cells") {
  const auto mesh = build_mesh(2, 64, single_phase, BcSpec::all_periodic());
  const auto map = build_hierarchy(mesh);
  CHECK(map.cells_per_axis == std::vector<int>({64, 32, 16, 8, 4, 2}));
  for (int l = 0; l + 1 < map.num_levels(); ++l) {
    // each coarse element has exactly 2^d children
    std::vector<int> count(map.phase[l + 1].size(), 0);
    for (int e = 0; e < static_cast<int>(map.parent[l].size()); ++e) {
      ++count[map.parent[l][e]];
      CHECK(map.phase[l][e] == map.phase[l + 1][map.parent[l][e]]);
    }
    for (int c : count) CHECK(c == 4);
  }
}

TEST_CASE("hierarchy stops before breaking the interface") {
  const auto mesh = build_mesh(2, 8, square_phase(8), BcSpec::all_dirichlet());
  const auto map = build_hierarchy(mesh);
  CHECK(map.cells_per_axis == std::vector<int>({8, 4}));
}

TEST_CASE("n=2 mesh yields a single level") {
  const auto mesh = build_mesh(2, 2, single_phase, BcSpec::all_periodic());
  const auto map = build_hierarchy(mesh);
  CHECK(map.num_levels() == 1);
}

TEST_CASE("phase measure preserved across levels") {
  const auto mesh = build_mesh(2, 16, square_phase(16), BcSpec::all_periodic());
  const auto map = build_hierarchy(mesh);
  for (int l = 0; l < map.num_levels(); ++l) {
    const double h = 1.0 / map.cells_per_axis[l];
    double inner = 0.0;
    for (int p : map.phase[l])
      if (p == 1) inner += h * h;
    CHECK(std::abs(inner - 0.25) < 1e-14);
  }
}

TEST_CASE("coarse mesh matches hierarchy phases") {
  const auto mesh = build_mesh(2, 16, square_phase(16), BcSpec::all_periodic());
  const auto map = build_hierarchy(mesh);
  const auto coarse = coarse_mesh(mesh, map, 1);
  CHECK(coarse.cells_per_axis() == 8);
  for (int e = 0; e < coarse.num_elements(); ++e) CHECK(coarse.phase(e) == map.phase[1][e]);
}

TEST_CASE("locate finds the owning element") {
  const auto mesh = build_mesh(2, 4, single_phase, BcSpec::all_periodic());
  CHECK(mesh.locate(Vec3(0.1, 0.9, 0.0)) == mesh.element_id({0, 3, 0}));
  CHECK_THROWS(mesh.locate(Vec3(1.5, 0.0, 0.0)));
}
