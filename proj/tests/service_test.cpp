#include "automate/dataset/part_builder.hpp"
#include "automate/service/server.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace automate;
using namespace automate::service;

namespace {

struct Cube {
  Part part;
  std::string top, bottom;
};

Cube cube(const std::string& id, double size) {
  dataset::PartBuilder pb(id);
  const auto h = dataset::add_box(pb, size, size, size, {});
  return {pb.build(), h.top, h.bottom};
}

model::ModelConfig tiny(model::Head head) {
  model::ModelConfig c;
  c.width = 8;
  c.inner_layers = 1;
  c.head = head;
  return c;
}

Suggester suggester() {
  return Suggester(std::make_shared<model::SbgcnModel<float>>(tiny(model::Head::location), 7),
                   std::make_shared<model::SbgcnModel<float>>(tiny(model::Head::type), 7));
}

std::unique_ptr<Service> make_service() {
  auto svc = std::make_unique<Service>(suggester());
  svc->parts().put(cube("a", 1).part);
  svc->parts().put(cube("b", 2).part);
  svc->set_model_hash("h");
  return svc;
}

Json suggest_body(const std::string& face_a, const std::string& face_b, int k = 6) {
  return Json{{"part_a", "a"}, {"part_b", "b"}, {"face_a", face_a}, {"face_b", face_b}, {"k", k}};
}

Frame apply(const Mat4& t, const Frame& f) {
  Frame out;
  out.origin = (t * f.origin.homogeneous()).head<3>();
  out.x = t.topLeftCorner<3, 3>() * f.x;
  out.y = t.topLeftCorner<3, 3>() * f.y;
  out.z = t.topLeftCorner<3, 3>() * f.z;
  return out;
}

}  // namespace

TEST(Suggest, TwoCubesTopBottom) {
  const Cube a = cube("a", 1), b = cube("b", 2);
  const auto r = suggester().suggest(a.part, b.part, a.top, b.bottom);
  EXPECT_EQ(r.candidate_count, 81);
  EXPECT_FALSE(r.truncated);
  ASSERT_EQ(r.suggestions.size(), 6u);
  for (std::size_t i = 0; i < r.suggestions.size(); ++i) {
    const auto& s = r.suggestions[i];
    EXPECT_EQ(s.rank, static_cast<int>(i) + 1);
    EXPECT_GT(s.score, 0);
    EXPECT_LT(s.score, 1);
    if (i > 0) EXPECT_LE(s.score, r.suggestions[i - 1].score);
    const Mat3 rot = s.transform_b.topLeftCorner<3, 3>();
    EXPECT_LT((rot.transpose() * rot - Mat3::Identity()).norm(), 1e-9);
  }
}

TEST(Suggest, TransformAlignsFramesInOriginalCoordinates) {
  const Cube a = cube("a", 1), b = cube("b", 2);
  const auto r = suggester().suggest(a.part, b.part, a.top, b.bottom, 81);
  ASSERT_EQ(r.suggestions.size(), 81u);
  for (const auto& s : r.suggestions) {
    // frames are reported on the un-normalized parts
    EXPECT_LT((s.mcf_b.resolved_frame.origin - resolve_frame(b.part, s.mcf_b).origin).norm(), 1e-12);
    const Frame moved = apply(s.transform_b, s.mcf_b.resolved_frame);
    const Frame& fa = s.mcf_a.resolved_frame;
    EXPECT_LT((moved.origin - fa.origin).norm(), 1e-9);
    EXPECT_LT((moved.x - fa.x).norm() + (moved.y - fa.y).norm() + (moved.z - fa.z).norm(), 1e-9);
  }
}

TEST(Suggest, KOneReturnsTopCandidate) {
  const Cube a = cube("a", 1), b = cube("b", 2);
  const Suggester s = suggester();
  const auto one = s.suggest(a.part, b.part, a.top, b.bottom, 1);
  const auto six = s.suggest(a.part, b.part, a.top, b.bottom, 6);
  ASSERT_EQ(one.suggestions.size(), 1u);
  EXPECT_EQ(one.suggestions[0].rank, 1);
  EXPECT_EQ(one.suggestions[0].candidate, six.suggestions[0].candidate);
  EXPECT_GT(one.suggestions[0].score, 0);
  EXPECT_LT(one.suggestions[0].score, 1);
}

TEST(Suggest, CandidateCapIsDeterministicPrefix) {
  const Cube a = cube("a", 1), b = cube("b", 2);
  const auto r = suggester().suggest(a.part, b.part, a.top, b.bottom, 100, false, 10);
  EXPECT_EQ(r.candidate_count, 10);
  EXPECT_TRUE(r.truncated);
  ASSERT_EQ(r.suggestions.size(), 10u);
  for (const auto& s : r.suggestions) EXPECT_LT(s.candidate, 10);
}

TEST(Suggest, MergeEquivalentCollapsesAliases) {
  const Cube a = cube("a", 1), b = cube("b", 2);
  const Suggester s = suggester();
  const auto all = s.suggest(a.part, b.part, a.top, b.bottom, 81);
  const auto merged = s.suggest(a.part, b.part, a.top, b.bottom, 81, true);
  EXPECT_LE(merged.suggestions.size(), all.suggestions.size());
  for (std::size_t i = 0; i < merged.suggestions.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const auto& x = merged.suggestions[i];
      const auto& y = merged.suggestions[j];
      EXPECT_FALSE(mcfs_equivalent(x.mcf_a.resolved_frame, y.mcf_a.resolved_frame, 1e-6, 1e-6) &&
                   mcfs_equivalent(x.mcf_b.resolved_frame, y.mcf_b.resolved_frame, 2e-6, 1e-6));
    }
}

TEST(Suggest, Errors) {
  const Cube a = cube("a", 1), b = cube("b", 2);
  const Suggester s = suggester();
  try {
    s.suggest(a.part, b.part, "nope", b.bottom);
    FAIL();
  } catch (const NotFoundError& e) {
    EXPECT_EQ(e.id(), "nope");
  }
  const std::string edge = a.part.edges().front().id;
  EXPECT_THROW(s.suggest(a.part, b.part, edge, b.bottom), RequestError);
  EXPECT_THROW(s.suggest(a.part, b.part, a.top, b.bottom, 0), RequestError);
  EXPECT_THROW(Suggester(nullptr).suggest(a.part, b.part, a.top, b.bottom), RequestError);
}

TEST(RankTypes, ProbabilitiesSumToOneDescending) {
  const Cube a = cube("a", 1), b = cube("b", 2);
  const auto ma = enumerate_mcfs(a.part, a.top);
  const auto mb = enumerate_mcfs(b.part, b.bottom);
  const auto types = suggester().rank_types(a.part, b.part, ma[0], mb[3]);
  ASSERT_EQ(types.size(), static_cast<std::size_t>(kMateTypeCount));
  double sum = 0;
  for (std::size_t i = 0; i < types.size(); ++i) {
    sum += types[i].probability;
    if (i > 0) EXPECT_LE(types[i].probability, types[i - 1].probability);
  }
  EXPECT_NEAR(sum, 1.0, 1e-6);
}

TEST(RankTypes, RandomInitIsNearUniformOnAverage) {
  const Cube a = cube("a", 1), b = cube("b", 2);
  const auto ma = enumerate_mcfs(a.part, a.top);
  const auto mb = enumerate_mcfs(b.part, b.bottom);
  std::array<double, kMateTypeCount> mean{};
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    const Suggester s(nullptr, std::make_shared<model::SbgcnModel<float>>(tiny(model::Head::type), seed));
    for (const auto& t : s.rank_types(a.part, b.part, ma[0], mb[0]))
      mean[static_cast<int>(t.type)] += t.probability / seeds;
  }
  for (double p : mean) EXPECT_NEAR(p, 0.125, 0.05);
}

TEST(RankTypes, InvalidReference) {
  const Cube a = cube("a", 1), b = cube("b", 2);
  Mcf bad = enumerate_mcfs(a.part, a.top)[0];
  bad.origin_ref = "missing";
  EXPECT_THROW(suggester().rank_types(a.part, b.part, bad, enumerate_mcfs(b.part, b.bottom)[0]), NotFoundError);
}

TEST(Api, HealthAndParts) {
  auto owned = make_service();
  Service& svc = *owned;
  EXPECT_EQ(Json::parse(svc.health().body), (Json{{"status", "ok"}, {"model_hash", "h"}}));
  const ApiResponse up = svc.post_part(save_part(cube("c", 3).part));
  EXPECT_EQ(up.status, 201);
  EXPECT_EQ(Json::parse(up.body)["part_id"], "c");
  const ApiResponse got = svc.get_part("c");
  EXPECT_EQ(got.status, 200);
  EXPECT_EQ(got.body, part_to_json(cube("c", 3).part).dump());
  EXPECT_EQ(svc.get_part("zzz").status, 404);
  EXPECT_EQ(svc.post_part("{").status, 400);
  const Json mesh = Json::parse(svc.get_mesh("a", 32).body);
  EXPECT_EQ(mesh["triangles"].size(), 12u);
  EXPECT_EQ(svc.get_mesh("a", 1).status, 400);
}

TEST(Api, LastWriteWins) {
  auto owned = make_service();
  Service& svc = *owned;
  svc.post_part(save_part(cube("c", 3).part));
  svc.post_part(save_part(cube("c", 5).part));
  EXPECT_EQ(svc.get_part("c").body, part_to_json(cube("c", 5).part).dump());
}

TEST(Api, SuggestBytesAreDeterministic) {
  auto owned = make_service();
  Service& svc = *owned;
  const Cube a = cube("a", 1), b = cube("b", 2);
  const ApiResponse r1 = svc.post_suggest(suggest_body(a.top, b.bottom).dump());
  const ApiResponse r2 = svc.post_suggest(suggest_body(a.top, b.bottom).dump());
  ASSERT_EQ(r1.status, 200);
  EXPECT_EQ(r1.body, r2.body);
  const Json j = Json::parse(r1.body);
  EXPECT_EQ(j["candidate_count"], 81);
  EXPECT_EQ(j["suggestions"].size(), 6u);
  EXPECT_EQ(j["suggestions"][0]["transform_b"].size(), 4u);
  EXPECT_TRUE(j["suggestions"][0]["mcf_a"].contains("origin_type"));
}

TEST(Api, UnknownFaceIs404NamingTheId) {
  auto owned = make_service();
  Service& svc = *owned;
  const ApiResponse r = svc.post_suggest(suggest_body("f999", cube("b", 2).bottom).dump());
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(Json::parse(r.body)["id"], "f999");
  EXPECT_NE(r.body.find("f999"), std::string::npos);
  EXPECT_EQ(svc.post_suggest(R"({"part_a":"a"})").status, 400);
  EXPECT_EQ(svc.post_suggest(R"({"part_a":"x","part_b":"b","face_a":"f1","face_b":"f1"})").status, 404);
}

TEST(Api, MateTypeAcceptsObjectsAndTriples) {
  auto owned = make_service();
  Service& svc = *owned;
  const Cube a = cube("a", 1), b = cube("b", 2);
  const Mcf ma = enumerate_mcfs(a.part, a.top)[0];
  const Mcf mb = enumerate_mcfs(b.part, b.bottom)[0];
  const Json obj{{"part_a", "a"},
                 {"part_b", "b"},
                 {"mcf_a", {{"origin_ref", ma.origin_ref}, {"origin_type", to_string(ma.origin_type)}, {"orient_ref", ma.orient_ref}}},
                 {"mcf_b", {mb.origin_ref, to_string(mb.origin_type), mb.orient_ref}}};
  const ApiResponse r = svc.post_mate_type(obj.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  double sum = 0;
  const Json types = Json::parse(r.body)["types"];
  ASSERT_EQ(types.size(), 8u);
  for (const auto& t : types) sum += t["probability"].get<double>();
  EXPECT_NEAR(sum, 1.0, 1e-6);

  Service no_type(Suggester(std::make_shared<model::SbgcnModel<float>>(tiny(model::Head::location), 1)));
  no_type.parts().put(a.part);
  no_type.parts().put(b.part);
  EXPECT_EQ(no_type.post_mate_type(obj.dump()).status, 503);
}

TEST(Api, ConcurrentIdenticalRequestsOverHttp) {
  auto owned = make_service();
  Service& svc = *owned;
  const Cube a = cube("a", 1), b = cube("b", 2);
  httplib::Server server;
  mount_routes(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::string body = suggest_body(a.top, b.bottom).dump();
  std::vector<std::string> bodies(50);
  std::vector<int> status(50, 0);
  std::vector<std::thread> clients;
  for (int i = 0; i < 50; ++i)
    clients.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port);
      c.set_read_timeout(120, 0);
      if (auto res = c.Post("/api/suggest", body, "application/json")) {
        status[i] = res->status;
        bodies[i] = res->body;
      }
    });
  for (auto& t : clients) t.join();

  httplib::Client c("127.0.0.1", port);
  auto health = c.Get("/api/health");
  auto mesh = c.Get("/api/parts/a/mesh?resolution=8");
  auto missing = c.Get("/api/parts/none");
  server.stop();
  loop.join();

  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(status[i], 200);
    EXPECT_EQ(bodies[i], bodies[0]);
  }
  ASSERT_TRUE(health);
  EXPECT_EQ(Json::parse(health->body)["status"], "ok");
  ASSERT_TRUE(mesh);
  EXPECT_EQ(mesh->status, 200);
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
}
