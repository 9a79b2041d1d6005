#include "automate/dataset/generator.hpp"
#include "automate/dataset/part_builder.hpp"
#include "automate/graph.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace automate;

using oracle::face_distance;

TEST(Graph, CubeStructure) {
  const Part cube = dataset::unit_cube();
  const StructuredBrepGraph g = build_graph(cube);
  EXPECT_EQ(g.count(Tier::face), 6);
  EXPECT_EQ(g.vertex_edge.size(), 24u);
  EXPECT_EQ(g.edge_loop.size(), 24u);
  EXPECT_EQ(g.loop_face.size(), 6u);
  EXPECT_EQ(g.edge_vertex, transposed(g.vertex_edge));
  EXPECT_TRUE(g.face_face.empty());

  const StructuredBrepGraph full = add_meta_paths(g);
  EXPECT_EQ(full.face_face.size(), 12u);
  // top (f1) and -y side (f3) share an edge
  EXPECT_EQ(face_distance(g, 0, 2), 4);
  EXPECT_EQ(face_distance(full, 0, 2), 1);
}

TEST(Graph, FeatureLayout) {
  dataset::PartBuilder pb("cyl");
  dataset::add_cylinder(pb, 0.5, 2);
  const Part p = pb.build();
  const StructuredBrepGraph g = build_graph(p);
  const double* side = g.feature_row(Tier::face, 0);
  EXPECT_EQ(side[static_cast<int>(FunctionKind::cylinder)], 1.0);
  EXPECT_EQ(side[features::kParams + 2], 1.0);
  EXPECT_EQ(side[features::kParams + 3], 0.5);
  EXPECT_EQ(side[features::kParams + 4], 0.0);
  EXPECT_NEAR(side[features::kCenterOfMass + 2], 1.0, 1e-12);
  const double* vertexless = g.feature_row(Tier::edge, 0);
  EXPECT_EQ(vertexless[static_cast<int>(FunctionKind::circle)], 1.0);
  EXPECT_NEAR(vertexless[features::kSize], std::numbers::pi, 1e-12);
}

TEST(Graph, PointPositionIsNotFeaturized) {
  const StructuredBrepGraph g = build_graph(dataset::unit_cube());
  const double* v = g.feature_row(Tier::vertex, 6);
  for (int i = 0; i < features::kParamSlots; ++i) EXPECT_EQ(v[features::kParams + i], 0.0);
  EXPECT_NE(v[features::kCenterOfMass], 0.0);
}

TEST(Graph, NormalizePair) {
  dataset::PartBuilder pa("a"), pb("b");
  dataset::add_box(pa, 10, 4, 2, {});
  dataset::add_cylinder(pb, 1, 20);
  const auto n = normalize_pair(pa.build(), pb.build());
  EXPECT_DOUBLE_EQ(n.scale, 1.0 / 20);
  EXPECT_NEAR(largest_dimension(n.b), 1.0, 1e-12);
  EXPECT_NEAR(largest_dimension(n.a), 0.5, 1e-12);
  EXPECT_NEAR(n.b.faces()[0].function.radius(), 0.05, 1e-15);
  EXPECT_NEAR(n.a.faces()[0].summary.size, 40.0 / 400, 1e-12);
}

TEST(Graph, MetaPathsMatchBruteForceOnSyntheticParts) {
  dataset::FamilyCounts c;
  c.plate_peg = c.block_stack = c.hinge = c.shaft_bushing = c.rail_slider = c.offset_plates = 3;
  const auto raw = dataset::generate_corpus(17, c);
  ASSERT_GE(raw.parts.size(), 30u);
  for (const auto& [id, part] : raw.parts)
    EXPECT_EQ(build_full_graph(part).face_face, oracle::brute_force_face_pairs(part)) << id;
}
