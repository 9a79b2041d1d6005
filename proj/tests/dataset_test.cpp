#include "automate/dataset/corpus.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace automate;
using namespace automate::dataset;

namespace {

FamilyCounts one_of_each(int n = 1) {
  FamilyCounts c;
  c.plate_peg = c.block_stack = c.hinge = c.shaft_bushing = c.rail_slider = c.offset_plates = n;
  return c;
}

Part cube_with_hole() {
  PartBuilder pb("holed");
  add_box(pb, 1, 1, 1, {{0, 0, 0.2}});
  return pb.build();
}

std::string corpus_bytes(const RawCorpus& c) {
  std::string s;
  for (const auto& [id, p] : c.parts) s += save_part(p);
  for (const auto& a : c.assemblies) s += save_assembly(a);
  return s;
}

}  // namespace

TEST(Fingerprint, Cases) {
  EXPECT_EQ(fingerprint(unit_cube("a")), fingerprint(unit_cube("b")));
  EXPECT_NE(fingerprint(unit_cube()), fingerprint(cube_with_hole()));

  PartData renamed = unit_cube().data();
  for (auto& f : renamed.faces) f.id = "face_" + f.id;
  for (auto& l : renamed.loops) {
    l.id = "loop_" + l.id;
  }
  for (auto& f : renamed.faces)
    for (auto& r : f.refs) r = "loop_" + r;
  EXPECT_EQ(fingerprint(Part::from_data(renamed)), fingerprint(unit_cube()));

  PartBuilder pb("bigger");
  add_box(pb, 2, 1, 1, {});
  EXPECT_NE(fingerprint(pb.build()), fingerprint(unit_cube()));
}

TEST(Generator, SeedSevenPlatePeg) {
  FamilyCounts c;
  c.plate_peg = 1;
  const RawCorpus raw = generate_corpus(7, c);
  ASSERT_EQ(raw.assemblies.size(), 1u);
  const Assembly& a = raw.assemblies[0];
  ASSERT_FALSE(a.mates.empty());
  const Mate& m = a.mates[0];
  const Part& plate = raw.parts.at(a.instance(m.a)->part);
  const Part& peg = raw.parts.at(a.instance(m.b)->part);
  EXPECT_EQ(plate.entity(plate.require(m.mcf_a.origin_ref)).function.kind, FunctionKind::cylinder);
  EXPECT_EQ(m.mcf_a.origin_ref, m.mcf_a.orient_ref);
  EXPECT_EQ(m.mcf_a.origin_type, OriginType::top_axis_point);
  EXPECT_EQ(peg.entity(peg.require(m.mcf_b.origin_ref)).function.kind, FunctionKind::cylinder);
  EXPECT_EQ(m.mcf_b.origin_ref, m.mcf_b.orient_ref);
  EXPECT_EQ(m.mcf_b.origin_type, OriginType::top_axis_point);
  EXPECT_EQ(m.mate_type, MateType::revolute);
}

TEST(Generator, Deterministic) {
  const auto a = generate_corpus(11, one_of_each(3));
  const auto b = generate_corpus(11, one_of_each(3));
  EXPECT_EQ(corpus_bytes(a), corpus_bytes(b));
  EXPECT_NE(corpus_bytes(a), corpus_bytes(generate_corpus(12, one_of_each(3))));
}

TEST(Generator, BlockStackIsCentroidToCentroid) {
  FamilyCounts c;
  c.block_stack = 20;
  for (const auto& a : generate_corpus(5, c).assemblies) {
    const Mate& m = a.mates.at(0);
    EXPECT_EQ(m.mcf_a.origin_type, OriginType::centroid);
    EXPECT_EQ(m.mcf_b.origin_type, OriginType::centroid);
    EXPECT_TRUE(m.mate_type == MateType::fastened || m.mate_type == MateType::planar);
  }
}

TEST(Generator, PosesAlignGroundTruthFrames) {
  const auto raw = generate_corpus(3, one_of_each(4));
  for (const auto& a : raw.assemblies) {
    validate_assembly(a);
    for (const auto& m : a.mates) {
      const Instance* ia = a.instance(m.a);
      const Instance* ib = a.instance(m.b);
      const Frame fa = transform_frame(ia->pose, resolve_frame(raw.parts.at(ia->part), m.mcf_a));
      const Frame fb = transform_frame(ib->pose, resolve_frame(raw.parts.at(ib->part), m.mcf_b));
      EXPECT_TRUE(mcfs_equivalent(fa, fb, 1e-9, 1e-9)) << a.id;
    }
  }
}

TEST(Dedup, VerbatimDuplicateAssembly) {
  RawCorpus raw = generate_corpus(1, one_of_each());
  raw.assemblies.push_back(raw.assemblies[0]);
  raw.assemblies.back().id = "copy";
  const DedupResult d = dedup(raw);
  EXPECT_EQ(d.corpus.assemblies.size(), 6u);
  EXPECT_EQ(d.stats.duplicate_assemblies, 1);
}

TEST(Dedup, MateTypeIsPartOfKey) {
  RawCorpus raw = generate_corpus(1, FamilyCounts{.block_stack = 1});
  Assembly other = raw.assemblies[0];
  other.id = "other";
  other.mates[0].mate_type = MateType::slider;
  raw.assemblies.push_back(other);
  const DedupResult d = dedup(raw);
  EXPECT_EQ(d.mates.size(), 2u);
  EXPECT_EQ(d.corpus.assemblies.size(), 2u);
}

TEST(Dedup, RenamedPartsCollapse) {
  FamilyCounts c = one_of_each(2);
  c.duplicates = 4;
  const RawCorpus raw = generate_corpus(9, c);
  const DedupResult d = dedup(raw);
  EXPECT_EQ(d.stats.duplicate_assemblies, 4);
  EXPECT_LT(d.corpus.parts.size(), raw.parts.size());
  for (const auto& a : d.corpus.assemblies)
    for (const auto& i : a.instances) EXPECT_TRUE(d.corpus.parts.count(i.part)) << i.part;
  std::set<std::string> keys;
  for (const auto& [id, key] : d.fingerprints) EXPECT_TRUE(keys.insert(key).second);
}

TEST(Dedup, Idempotent) {
  FamilyCounts c = one_of_each(3);
  c.duplicates = 5;
  const DedupResult once = dedup(generate_corpus(4, c));
  const DedupResult twice = dedup(once.corpus);
  EXPECT_EQ(corpus_bytes(once.corpus), corpus_bytes(twice.corpus));
  ASSERT_EQ(once.mates.size(), twice.mates.size());
  for (std::size_t i = 0; i < once.mates.size(); ++i) EXPECT_EQ(once.mates[i].key, twice.mates[i].key);
}

TEST(Dedup, IncompleteAndMultiMatesRemoved) {
  RawCorpus raw = generate_corpus(2, FamilyCounts{.hinge = 1, .rail_slider = 1});
  raw.assemblies[0].mates[0].mcf_a.origin_ref = "missing";
  raw.assemblies[1].mates.push_back(raw.assemblies[1].mates[0]);
  const DedupResult d = dedup(raw);
  EXPECT_EQ(d.stats.incomplete_mates, 1);
  EXPECT_EQ(d.stats.multi_mate_pairs, 2);
  EXPECT_TRUE(d.corpus.assemblies.empty());
}

TEST(Examples, PlatePegHasTwentyFiveCandidates) {
  FamilyCounts c;
  c.plate_peg = 1;
  const auto built = build_examples(dedup(generate_corpus(7, c)));
  ASSERT_FALSE(built.examples.empty());
  const SelectionExample& ex = built.examples[0];
  EXPECT_EQ(ex.candidates.size(), 25u);
  // {top axis point, top circle center} on each side
  EXPECT_EQ(ex.positives.size(), 4u);
  bool axis_pair = false, alias = false;
  for (int p : ex.positives) {
    const auto& [a, b] = ex.candidates[p];
    axis_pair |= a.origin_type == OriginType::top_axis_point && b.origin_type == OriginType::top_axis_point;
    alias |= a.origin_type == OriginType::center || b.origin_type == OriginType::center;
  }
  EXPECT_TRUE(axis_pair);
  EXPECT_TRUE(alias);
}

TEST(Examples, DropRules) {
  const Part a = unit_cube("a"), b = unit_cube("b");
  ExampleStats st;
  const McfPair gt{{"f1", OriginType::centroid, "f1", {}}, {"f2", OriginType::centroid, "f2", {}}};
  auto ok = make_example(a, b, gt, MateType::fastened, st);
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->candidates.size(), 81u);
  EXPECT_EQ(ok->positives.size(), 1u);

  McfPair unresolvable = gt;
  unresolvable.first.origin_ref = "e5";
  unresolvable.first.origin_type = OriginType::mid_point;
  unresolvable.first.orient_ref = "f2";  // e5 (top ring) does not bound f2 (bottom)
  EXPECT_FALSE(make_example(a, b, unresolvable, MateType::fastened, st));
  EXPECT_EQ(st.no_positives, 1);

  EXPECT_FALSE(make_example(a, b, gt, MateType::fastened, st, kDefaultTolPos, kDefaultTolAng, 80));
  EXPECT_EQ(st.too_many_candidates, 1);

  McfPair edge = gt;
  edge.first.orient_ref = "e1";
  EXPECT_FALSE(make_example(a, b, edge, MateType::fastened, st));
  EXPECT_EQ(st.non_face_selection, 1);
}

TEST(Examples, SplitDependsOnFingerprintsOnly) {
  FamilyCounts c = one_of_each(5);
  const auto x = build_examples(dedup(generate_corpus(21, c)));
  const auto y = build_examples(dedup(generate_corpus(21, c)));
  ASSERT_EQ(x.examples.size(), y.examples.size());
  for (std::size_t i = 0; i < x.examples.size(); ++i) EXPECT_EQ(x.examples[i].split, y.examples[i].split);
  EXPECT_EQ(split_of("p", "q"), split_of("q", "p"));
}

TEST(Examples, JsonRoundTrip) {
  const auto set = build_examples(dedup(generate_corpus(8, one_of_each())));
  for (const auto& ex : set.examples) {
    const Json j = example_to_json(ex);
    EXPECT_EQ(example_to_json(example_from_json(j)).dump(), j.dump());
  }
}

TEST(Corpus, WriteIsByteStable) {
  CorpusOptions opt;
  opt.seed = 5;
  opt.counts = one_of_each(2);
  const auto dir = fs::temp_directory_path() / "automate_corpus_test";
  write_corpus(dir / "a", build_corpus(opt));
  write_corpus(dir / "b", build_corpus(opt));
  for (const char* f : {"examples/train.jsonl", "examples/test.jsonl", "stats.json"})
    EXPECT_EQ(read_file(dir / "a" / f), read_file(dir / "b" / f)) << f;
  const auto parts = load_parts(dir / "a");
  EXPECT_FALSE(parts.empty());
  fs::remove_all(dir);
}
