// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.
// Optional argument: directory for artifacts (noisy-oracle CSV, reports).

#include "automate/automate.hpp"
#include "automate/dataset/part_builder.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace automate;
using namespace automate::train;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path g_artifacts = fs::temp_directory_path() / "automate_acceptance";

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

dataset::FamilyCounts per_family(int n, int duplicates = 0) {
  dataset::FamilyCounts c;
  c.plate_peg = c.block_stack = c.hinge = c.shaft_bushing = c.rail_slider = c.offset_plates = n;
  c.duplicates = duplicates;
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<PreparedExample> of_split(const std::vector<PreparedExample>& all, Split s) {
  std::vector<PreparedExample> out;
  for (const auto& ex : all)
    if (ex.split == s) out.push_back(ex);
  return out;
}

// ---------------------------------------------------------------- gradient

Outcome gradient_oracle() {
  double prim = 0;
  std::string worst;
  for (const auto& c : nn::primitive_gradient_cases(3)) {
    const auto r = nn::check_gradients(c.inputs, c.op, 1e-5);
    if (r.max_rel_error >= prim) {
      prim = r.max_rel_error;
      worst = c.name;
    }
  }
  dataset::CorpusOptions opt;
  opt.seed = 3;
  opt.counts = per_family(1);
  const auto c = dataset::build_corpus(opt);
  const auto ex = prepare_examples(c.examples.examples, c.dedup.corpus.parts);
  double composed = 0;
  std::string cworst;
  int entries = 0, skipped = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, ex.size()); ++i) {
    const auto r = composed_location_gradcheck(ex[i], ModelConfig{}, 1 + i);
    entries += r.entries;
    skipped += r.skipped;
    if (r.max_rel_error >= composed) {
      composed = r.max_rel_error;
      cworst = ex[i].id + ":" + r.worst;
    }
  }
  const bool few_kinks = skipped * 10 <= entries + skipped;
  return {prim < 1e-4 && composed < 1e-4 && few_kinks && entries > 0,
          "primitives max rel err " + fmt(prim) + " (" + worst + "), composed loss " + fmt(composed) + " (" + cworst +
              ", " + std::to_string(entries) + " entries, " + std::to_string(skipped) + " kink samples skipped)"};
}

// ---------------------------------------------------------------- meta-paths

Outcome meta_path_oracle() {
  const auto raw = dataset::generate_corpus(17, per_family(10));
  int checked = 0, mismatched = 0;
  for (const auto& [id, part] : raw.parts) {
    if (checked == 100) break;
    ++checked;
    if (build_full_graph(part).face_face != oracle::brute_force_face_pairs(part)) ++mismatched;
  }
  const Part cube = dataset::unit_cube();
  const auto g = build_graph(cube);
  const auto full = add_meta_paths(g);
  const int before = oracle::face_distance(g, 0, 2), after = oracle::face_distance(full, 0, 2);
  const int ff = static_cast<int>(full.face_face.size());
  return {checked == 100 && mismatched == 0 && ff == 12 && before == 4 && after == 1,
          std::to_string(checked) + " parts, " + std::to_string(mismatched) + " mismatches; cube F-F " +
              std::to_string(ff) + ", neighbor distance " + std::to_string(before) + " -> " + std::to_string(after)};
}

// ---------------------------------------------------------------- MCFs

Outcome mcf_oracle() {
  const Part cube = dataset::unit_cube();
  const int square = static_cast<int>(enumerate_mcfs(cube, cube.faces()[0].id).size());
  dataset::PartBuilder pb("cyl");
  const auto h = dataset::add_cylinder(pb, 1, 0.4);
  const Part cyl = pb.build();
  const int side = static_cast<int>(enumerate_mcfs(cyl, h.side).size());

  int frames = 0, bad = 0;
  const auto raw = dataset::generate_corpus(5, per_family(5));
  for (const auto& [id, part] : raw.parts)
    for (const auto& f : part.faces())
      for (const auto& m : enumerate_mcfs(part, f.id)) {
        ++frames;
        if (!m.resolved_frame.is_orthonormal(1e-9) || !m.resolved_frame.is_right_handed(1e-9)) ++bad;
      }
  const std::string circle = cyl.edges()[0].id;
  const bool alias =
      mcfs_equivalent(resolve_frame(cyl, {h.side, OriginType::top_axis_point, h.side, {}}),
                      resolve_frame(cyl, {circle, OriginType::center, h.side, {}})) &&
      !mcfs_equivalent(resolve_frame(cyl, {h.side, OriginType::top_axis_point, h.side, {}}),
                       resolve_frame(cyl, {h.side, OriginType::mid_axis_point, h.side, {}}));
  return {square == 9 && side == 5 && bad == 0 && frames > 0 && alias,
          "square face " + std::to_string(square) + ", cylinder side " + std::to_string(side) + ", " +
              std::to_string(frames) + " frames with " + std::to_string(bad) + " non-orthonormal, alias " +
              (alias ? "detected" : "missed")};
}

// ---------------------------------------------------------------- overfit

Outcome overfit() {
  dataset::CorpusOptions opt;
  opt.seed = 1;
  opt.counts = per_family(20);
  const auto c = dataset::build_corpus(opt);
  const auto all = prepare_examples(c.examples.examples, c.dedup.corpus.parts);
  std::vector<PreparedExample> subset;
  for (std::size_t i = 0; i < all.size() && subset.size() < 20; i += all.size() / 20) subset.push_back(all[i]);
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.seed = 0;
  cfg.stop_at_score = 1.0;
  const auto r = train_model<float>(cfg, subset, subset);
  const double hit1 = hit_at_k(first_correct_ranks(*r.best, subset), 1);
  return {subset.size() == 20 && hit1 == 1.0,
          std::to_string(subset.size()) + " examples, hit@1 " + fmt(hit1) + " at epoch " + std::to_string(r.best_epoch) +
              " of " + std::to_string(r.history.size())};
}

// ---------------------------------------------------------------- desk benchmark

struct Desk {
  dataset::BuiltCorpus corpus;
  std::vector<PreparedExample> train, val, test;
  BaselineOptions baselines;
};

const Desk& desk() {
  static const Desk d = [] {
    Desk d;
    dataset::CorpusOptions opt;
    opt.seed = 1;
    opt.counts = per_family(300, 50);
    d.corpus = dataset::build_corpus(opt);
    const auto all = prepare_examples(d.corpus.examples.examples, d.corpus.dedup.corpus.parts);
    d.train = of_split(all, Split::train);
    d.val = of_split(all, Split::val);
    d.test = of_split(all, Split::test);
    d.baselines = {1, OriginTypeTable::fit(d.train), LabelDistribution::fit(d.train)};
    return d;
  }();
  return d;
}

Json train_and_eval(TrainConfig cfg, const std::string& name) {
  const Desk& d = desk();
  cfg.epochs = 10;
  cfg.seed = 1;
  const auto r = train_model<float>(cfg, d.train, d.val);
  Json report = evaluate(*r.best, d.test, "test", d.baselines);
  report["best_epoch"] = r.best_epoch;
  dataset::write_file(g_artifacts / (name + ".json"), report.dump(2) + "\n");
  dataset::write_file(g_artifacts / (name + ".checkpoint.json"), save_checkpoint(*r.best, {}).dump());
  return report;
}

Outcome desk_benchmark() {
  const Desk& d = desk();
  const int assemblies = static_cast<int>(d.corpus.dedup.corpus.assemblies.size());
  TrainConfig full;
  TrainConfig plain;
  plain.model.variant = model::Variant::plain;
  plain.model.features = model::FeatureSet::fn_type_only;
  const Json a = train_and_eval(full, "location_sbgcn_all");
  const Json b = train_and_eval(plain, "location_plain_fn_type");
  const double hit6 = a.at("accuracy_at_6"), snap = a["baselines"]["snap_to_selection"]["accuracy_at_6"],
               rnd = a["baselines"]["random"]["accuracy_at_6"];
  const double ndcg = a.at("ndcg_star"), ndcg_plain = b.at("ndcg_star");
  const bool pass = assemblies >= 500 && d.test.size() >= 200 && hit6 - snap >= 0.10 && hit6 - rnd >= 0.10 &&
                    ndcg >= ndcg_plain;
  return {pass, std::to_string(assemblies) + " assemblies, " + std::to_string(d.train.size()) + "/" +
                    std::to_string(d.val.size()) + "/" + std::to_string(d.test.size()) + " examples; hit@6 " +
                    fmt(hit6) + " vs snap " + fmt(snap) + ", random " + fmt(rnd) + "; NDCG* sbgcn/all " + fmt(ndcg) +
                    " vs plain/fn_type " + fmt(ndcg_plain)};
}

// ---------------------------------------------------------------- mate type

Outcome mate_type() {
  const Desk& d = desk();
  TrainConfig cfg;
  cfg.model.head = Head::type;
  cfg.epochs = 10;
  cfg.seed = 1;
  auto r = train_model<float>(cfg, d.train, d.val);
  const Json report = evaluate(*r.best, d.test, "test", d.baselines);
  dataset::write_file(g_artifacts / "type_sbgcn_all.json", report.dump(2) + "\n");
  const double acc = report.at("accuracy"), label = report["baselines"]["label_distribution"]["accuracy"];

  const service::Suggester s(nullptr, std::shared_ptr<SbgcnModel<float>>(r.best.release()));
  const auto& parts = d.corpus.dedup.corpus.parts;
  double worst = 0;
  int checked = 0, pegs = 0, peg_top2 = 0;
  for (const auto& ex : d.corpus.examples.examples) {
    if (ex.split != Split::test) continue;
    const auto types = s.rank_types(parts.at(ex.part_a), parts.at(ex.part_b), ex.ground_truth.first,
                                    ex.ground_truth.second);
    double sum = 0;
    for (const auto& t : types) sum += t.probability;
    worst = std::max(worst, std::abs(sum - 1.0));
    ++checked;
    if (ex.id.rfind("pp", 0) == 0 && ex.mate_type == MateType::revolute) {
      ++pegs;
      peg_top2 += types[0].type == MateType::revolute || types[1].type == MateType::revolute;
    }
  }
  return {acc > label && worst <= 1e-6 && checked > 0,
          "accuracy " + fmt(acc) + " vs label distribution " + fmt(label) + "; max |sum p - 1| " + fmt(worst, 3) +
              " over " + std::to_string(checked) + " examples; peg revolute in top 2: " + std::to_string(peg_top2) +
              "/" + std::to_string(pegs)};
}

// ---------------------------------------------------------------- noisy oracle

Outcome noisy_oracle() {
  const auto& test = desk().test;
  const std::vector<double> lambdas{0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
  const auto curve = noisy_oracle_curve(test, lambdas, 7);
  const std::string csv = noisy_oracle_csv(curve);
  const fs::path out = g_artifacts / "noisy_oracle.csv";
  dataset::write_file(out, csv);
  const bool reproducible = noisy_oracle_csv(noisy_oracle_curve(test, lambdas, 7)) == csv;
  const double at0 = curve[0].accuracy, at05 = curve[6].accuracy;
  return {at0 == 1.0 && at05 < at0 && reproducible && dataset::read_file(out) == csv,
          "accuracy " + fmt(at0) + " at 0, " + fmt(at05) + " at 0.5; reproducible " + (reproducible ? "yes" : "no") +
              "; " + out.string()};
}

// ---------------------------------------------------------------- determinism

std::string tree_bytes(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string s;
  for (const auto& f : files) s += fs::relative(f, dir).string() + "\n" + dataset::read_file(f);
  return s;
}

Outcome determinism() {
  dataset::CorpusOptions opt;
  opt.seed = 42;
  opt.counts = per_family(4, 6);
  const fs::path a = g_artifacts / "det_a", b = g_artifacts / "det_b";
  dataset::write_corpus(a, dataset::build_corpus(opt));
  dataset::write_corpus(b, dataset::build_corpus(opt));
  const bool corpus = tree_bytes(a) == tree_bytes(b);
  bool splits = true;
  for (Split s : {Split::train, Split::val, Split::test}) {
    const auto x = dataset::load_examples(a, s), y = dataset::load_examples(b, s);
    splits = splits && x.size() == y.size();
    for (std::size_t i = 0; splits && i < x.size(); ++i) splits = x[i].id == y[i].id;
  }

  const auto parts = dataset::load_parts(a);
  const auto train_set = prepare_examples(dataset::load_examples(a, Split::train), parts);
  const auto val_set = prepare_examples(dataset::load_examples(a, Split::val), parts);
  TrainConfig cfg;
  cfg.model.width = 16;
  cfg.model.inner_layers = 2;
  cfg.epochs = 3;
  cfg.seed = 9;
  auto r1 = train_model<float>(cfg, train_set, val_set);
  auto r2 = train_model<float>(cfg, train_set, val_set);
  bool history = r1.history.size() == r2.history.size();
  for (std::size_t i = 0; history && i < r1.history.size(); ++i)
    history = r1.history[i].to_json().dump() == r2.history[i].to_json().dump();
  history = history && save_checkpoint(*r1.best, {}).dump() == save_checkpoint(*r2.best, {}).dump();

  const service::Suggester s1(std::shared_ptr<SbgcnModel<float>>(r1.best.release()));
  const service::Suggester s2(std::shared_ptr<SbgcnModel<float>>(r2.best.release()));
  int compared = 0;
  bool suggestions = true;
  for (const auto& ex : dataset::load_examples(a, Split::train)) {
    if (compared == 10) break;
    const Part& pa = parts.at(ex.part_a);
    const Part& pb = parts.at(ex.part_b);
    const std::string x = service::to_json(s1.suggest(pa, pb, ex.face_a, ex.face_b)).dump();
    suggestions = suggestions && x == service::to_json(s1.suggest(pa, pb, ex.face_a, ex.face_b)).dump() &&
                  x == service::to_json(s2.suggest(pa, pb, ex.face_a, ex.face_b)).dump();
    ++compared;
  }
  fs::remove_all(a);
  fs::remove_all(b);
  auto yn = [](bool v) { return v ? "identical" : "DIFFERENT"; };
  return {corpus && splits && history && suggestions && compared > 0,
          std::string("corpus ") + yn(corpus) + ", splits " + yn(splits) + ", histories " + yn(history) +
              ", suggestions " + yn(suggestions) + " (" + std::to_string(compared) + " requests)"};
}

// ---------------------------------------------------------------- metrics

Outcome metrics() {
  const bool perfect = ndcg_star({1, 1, 1, 1}) == 1.0;
  const bool rank3 = std::abs(ndcg_star({3}) - 0.5) < 1e-15;
  std::mt19937_64 rng(2);
  std::vector<int> ranks;
  for (int i = 0; i < 500; ++i) ranks.push_back(std::uniform_int_distribution<int>(1, 40)(rng));
  const auto curve = hit_curve(ranks, 40);
  const bool monotone = std::is_sorted(curve.begin(), curve.end()) && curve.back() == 1.0;
  const double k1 = cohen_kappa({0, 1, 2, 3, 1}, {0, 1, 2, 3, 1}, kMateTypeCount);
  const double k0 = cohen_kappa({0, 0, 0, 0}, {0, 0, 1, 1}, kMateTypeCount);
  const bool kappa = k1 == 1.0 && std::abs(k0) < 1e-12;
  return {perfect && rank3 && monotone && kappa,
          "NDCG* perfect " + fmt(ndcg_star({1, 1, 1, 1})) + ", rank 3 " + fmt(ndcg_star({3})) + ", hit@k monotone " +
              (monotone ? "yes" : "no") + ", kappa " + fmt(k1) + " / " + fmt(k0)};
}

// ---------------------------------------------------------------- dedup

std::string raw_bytes(const dataset::RawCorpus& c) {
  std::string s;
  for (const auto& [id, p] : c.parts) s += save_part(p);
  for (const auto& a : c.assemblies) s += save_assembly(a);
  return s;
}

Outcome dedup() {
  const int dups = 12;
  const auto raw = dataset::generate_corpus(13, per_family(4, dups));
  const auto once = dataset::dedup(raw);
  const auto twice = dataset::dedup(once.corpus);

  std::set<std::string> fingerprints, mate_keys;
  bool unique_parts = true, unique_mates = true;
  for (const auto& [id, part] : once.corpus.parts) unique_parts &= fingerprints.insert(once.fingerprints.at(id)).second;
  for (const auto& m : once.mates) unique_mates &= mate_keys.insert(m.key).second;
  const bool assemblies = once.stats.duplicate_assemblies == dups &&
                          static_cast<int>(once.corpus.assemblies.size()) == static_cast<int>(raw.assemblies.size()) - dups;
  const bool idempotent = raw_bytes(once.corpus) == raw_bytes(twice.corpus) && twice.stats.duplicate_assemblies == 0 &&
                          twice.stats.duplicate_mates == 0 && once.mates.size() == twice.mates.size();
  return {unique_parts && unique_mates && assemblies && idempotent,
          std::to_string(raw.assemblies.size()) + " -> " + std::to_string(once.corpus.assemblies.size()) +
              " assemblies, " + std::to_string(raw.parts.size()) + " -> " + std::to_string(once.corpus.parts.size()) +
              " parts, " + std::to_string(once.mates.size()) + " unique mates; idempotent " +
              (idempotent ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_artifacts = argv[1];
  fs::create_directories(g_artifacts);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient-oracle", gradient_oracle}, {"meta-path-oracle", meta_path_oracle},
      {"mcf-enumeration", mcf_oracle},      {"overfit-sanity", overfit},
      {"desk-benchmark", desk_benchmark},   {"mate-type", mate_type},
      {"noisy-oracle", noisy_oracle},       {"determinism", determinism},
      {"metrics-suite", metrics},           {"dedup", dedup},
  };
  const std::string only = argc > 2 ? argv[2] : "";
  int failed = 0, run = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && name != only) continue;
    ++run;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %-18s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", run - failed, run);
  return failed == 0 ? 0 : 1;
}
