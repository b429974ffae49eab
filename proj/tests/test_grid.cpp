#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lod/grid.hpp"

using namespace lod;

TEST(Mesh, CountsAndNumbering) {
  CartesianMesh m = build_mesh(Domain::unit_square(), 4);
  EXPECT_EQ(m.num_elements(), 16);
  EXPECT_EQ(m.num_nodes(), 25);
  EXPECT_DOUBLE_EQ(m.h(), 0.25);
  EXPECT_EQ(m.element_id(1, 2), 9);
  EXPECT_EQ(m.element_ij(9), std::make_pair(1, 2));
  auto nodes = m.element_nodes(m.element_id(1, 2));
  EXPECT_EQ(nodes[0], m.node_id(1, 2));
  EXPECT_EQ(nodes[1], m.node_id(2, 2));
  EXPECT_EQ(nodes[2], m.node_id(1, 3));
  EXPECT_EQ(nodes[3], m.node_id(2, 3));
  EXPECT_TRUE(m.is_boundary_node(m.node_id(0, 2)));
  EXPECT_FALSE(m.is_boundary_node(m.node_id(2, 2)));
  EXPECT_EQ(m.elements_around_node(m.node_id(0, 0)).size(), 1u);
  EXPECT_EQ(m.elements_around_node(m.node_id(2, 0)).size(), 2u);
  EXPECT_EQ(m.elements_around_node(m.node_id(2, 2)).size(), 4u);
}

TEST(Mesh, Coordinates) {
  CartesianMesh m = build_mesh(Domain::centered(6.0), 8);
  auto c = m.node_coords(m.node_id(4, 4));
  EXPECT_DOUBLE_EQ(c[0], 0.0);
  EXPECT_DOUBLE_EQ(c[1], 0.0);
  auto o = m.element_origin(m.element_id(0, 7));
  EXPECT_DOUBLE_EQ(o[0], -6.0);
  EXPECT_DOUBLE_EQ(o[1], 4.5);
}

TEST(Mesh, RejectsBadInput) {
  EXPECT_THROW(build_mesh(Domain::unit_square(), 0), std::invalid_argument);
  EXPECT_THROW(build_mesh({0, 0, -1}, 2), std::invalid_argument);
}

TEST(Refinement, ParentOfFineElement) {
  Refinement r = refine(build_mesh(Domain::unit_square(), 2), 4);
  EXPECT_EQ(r.fine.n(), 8);
  EXPECT_EQ(r.parent(r.fine.element_id(5, 3)), r.coarse.element_id(1, 0));
}

TEST(Refinement, IdentityAndCounts) {
  Refinement id = refine(build_mesh(Domain::unit_square(), 1), 1);
  EXPECT_EQ(id.fine.n(), 1);
  EXPECT_EQ(id.parent(0), 0);
  Refinement big = refine(build_mesh(Domain::unit_square(), 4), 32);
  EXPECT_EQ(big.fine.n(), 128);
  EXPECT_EQ(big.fine.num_elements(), 16384);
}

TEST(Refinement, ChildrenRoundTrip) {
  Refinement r = refine(build_mesh(Domain::unit_square(), 3), 5);
  std::vector<int> seen(r.fine.num_elements(), 0);
  for (int T = 0; T < r.coarse.num_elements(); ++T) {
    auto kids = r.children(T);
    EXPECT_EQ(kids.size(), 25u);
    EXPECT_TRUE(std::is_sorted(kids.begin(), kids.end()));
    for (int e : kids) {
      EXPECT_EQ(r.parent(e), T);
      ++seen[e];
    }
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(Refinement, RejectsBadRatio) {
  EXPECT_THROW(refine(build_mesh(Domain::unit_square(), 2), 0), std::invalid_argument);
  EXPECT_THROW(refine(build_mesh(Domain::unit_square(), 1 << 16), 1 << 16), std::invalid_argument);
}

TEST(Patch, Examples) {
  CartesianMesh m = build_mesh(Domain::unit_square(), 8);
  EXPECT_EQ(patch(m, m.element_id(3, 3), 1).size(), 9u);
  EXPECT_EQ(patch(m, m.element_id(0, 0), 1).size(), 4u);
  EXPECT_EQ(patch(m, m.element_id(3, 3), 2).size(), 25u);
  Patch p0 = patch(m, m.element_id(3, 3), 0);
  ASSERT_EQ(p0.size(), 1u);
  EXPECT_EQ(p0.elements[0], m.element_id(3, 3));
}

TEST(Patch, RejectsEmptyCenters) {
  CartesianMesh m = build_mesh(Domain::unit_square(), 4);
  EXPECT_THROW(patch(m, std::vector<int>{}, 1), std::invalid_argument);
  EXPECT_THROW(patch(m, 99, 1), std::invalid_argument);
}

TEST(Patch, NestedAndMonotone) {
  CartesianMesh m = build_mesh(Domain::unit_square(), 10);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, m.num_elements() - 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> s{pick(rng)};
    std::vector<int> s2 = s;
    s2.push_back(pick(rng));
    for (int ell = 0; ell < 4; ++ell) {
      Patch a = patch(m, s, ell), b = patch(m, s, ell + 1), c = patch(m, s2, ell);
      for (int e : a.elements) {
        EXPECT_TRUE(b.contains(e));
        EXPECT_TRUE(c.contains(e));
      }
    }
  }
}

TEST(Patch, InteriorSize) {
  CartesianMesh m = build_mesh(Domain::unit_square(), 16);
  for (int ell = 0; ell <= 4; ++ell)
    EXPECT_EQ(patch(m, m.element_id(8, 8), ell).size(), static_cast<std::size_t>((2 * ell + 1) * (2 * ell + 1)));
}

TEST(Patch, FineDofs) {
  Refinement r = refine(build_mesh(Domain::unit_square(), 2), 2);
  std::vector<int> all{0, 1, 2, 3};
  EXPECT_EQ(fine_dofs_in_patch(r, patch(r.coarse, all, 0), 1).size(), 9u);
  EXPECT_EQ(fine_dofs_in_patch(r, patch(r.coarse, 0, 0), 1).size(), 1u);
  Refinement r4 = refine(build_mesh(Domain::unit_square(), 2), 4);
  EXPECT_EQ(fine_dofs_in_patch(r4, patch(r4.coarse, 0, 0), 1).size(), 9u);
}

TEST(Patch, FineDofsWithoutDomainBoundary) {
  Refinement r = refine(build_mesh(Domain::unit_square(), 2), 2);
  // Corner element: the two edges on the domain boundary keep their nodes.
  EXPECT_EQ(fine_dofs_in_patch(r, patch(r.coarse, 0, 0), 1, false).size(), 4u);
  std::vector<int> all{0, 1, 2, 3};
  EXPECT_EQ(fine_dofs_in_patch(r, patch(r.coarse, all, 0), 1, false).size(), 25u);
  EXPECT_EQ(fine_dofs_in_patch(r, patch(r.coarse, all, 0), 2).size(), 49u);
}
