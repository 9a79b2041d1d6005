// automate: corpus synthesis, training, evaluation and the suggestion service.

#include "automate/automate.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

using namespace automate;
namespace fs = std::filesystem;

namespace {

std::vector<train::PreparedExample> load_split(const fs::path& corpus, dataset::Split split,
                                               const std::map<std::string, Part>& parts) {
  return train::prepare_examples(dataset::load_examples(corpus, split), parts);
}

dataset::Split parse_split(const std::string& s) {
  auto v = dataset::split_from_string(s);
  if (!v) throw CLI::ValidationError("--split", "expected train, val or test");
  return *v;
}

void emit(const std::string& out, const std::string& bytes) {
  if (out.empty() || out == "-")
    std::cout << bytes;
  else
    dataset::write_file(out, bytes);
}

template <class T>
std::shared_ptr<model::SbgcnModel<T>> load_checkpoint_file(const std::string& path) {
  return train::load_model<T>(automate::detail::parse_json(dataset::read_file(path), path));
}

std::vector<double> parse_lambdas(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) out.push_back(std::stod(tok));
  if (out.empty()) throw CLI::ValidationError("--lambdas", "no values");
  return out;
}

httplib::Server* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AutoMate mate-location and mate-type prediction"};
  app.set_config("--config", "", "TOML/INI file with option values");
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::string out;
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--out", out, "output path (default: stdout or ./corpus)");

  // synth
  auto* synth = app.add_subcommand("synth", "generate, deduplicate and split a synthetic corpus");
  dataset::CorpusOptions copt;
  int per_family = -1;
  synth->add_option("--per-family", per_family, "assemblies per family (overrides the family flags)");
  synth->add_option("--plates", copt.counts.plate_peg, "plate-and-peg assemblies");
  synth->add_option("--blocks", copt.counts.block_stack, "stacked blocks");
  synth->add_option("--hinges", copt.counts.hinge, "hinges");
  synth->add_option("--shafts", copt.counts.shaft_bushing, "shaft-bushing pairs");
  synth->add_option("--rails", copt.counts.rail_slider, "rail-slider pairs");
  synth->add_option("--offsets", copt.counts.offset_plates, "offset plates");
  synth->add_option("--duplicates", copt.counts.duplicates, "duplicated assemblies");
  synth->add_option("--min-faces", copt.filter.min_faces)->capture_default_str();
  synth->add_option("--max-faces", copt.filter.max_faces)->capture_default_str();

  // featurize
  auto* featurize = app.add_subcommand("featurize", "dump the featurized B-rep graph of a part");
  std::string part_file;
  featurize->add_option("part", part_file, "part JSON file")->required()->check(CLI::ExistingFile);

  // train
  auto* trn = app.add_subcommand("train", "train a location or type model");
  std::string corpus = "corpus", task = "location", variant = "sbgcn", features = "all", norm = "batch";
  train::TrainConfig tcfg;
  trn->add_option("--corpus", corpus, "corpus directory")->capture_default_str();
  trn->add_option("--task", task)->check(CLI::IsMember({"location", "type"}))->capture_default_str();
  trn->add_option("--variant", variant)->check(CLI::IsMember({"sbgcn", "plain"}))->capture_default_str();
  trn->add_option("--features", features)->check(CLI::IsMember({"all", "fn-type", "fn_type_only"}))->capture_default_str();
  trn->add_option("--inference-norm", norm)->check(CLI::IsMember({"batch", "running"}))->capture_default_str();
  trn->add_option("--epochs", tcfg.epochs)->capture_default_str();
  trn->add_option("--batch-size", tcfg.batch_size)->capture_default_str();
  trn->add_option("--lr", tcfg.adam.lr)->capture_default_str();
  trn->add_option("--width", tcfg.model.width)->capture_default_str();
  trn->add_option("--layers", tcfg.model.inner_layers, "inner message-passing layers")->capture_default_str();
  std::string resume;
  trn->add_option("--resume", resume, "checkpoint to continue from")->check(CLI::ExistingFile);

  // eval
  auto* evl = app.add_subcommand("eval", "metrics report for a checkpoint");
  std::string checkpoint, split = "test";
  evl->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  evl->add_option("--corpus", corpus)->capture_default_str();
  evl->add_option("--split", split)->check(CLI::IsMember({"train", "val", "test"}))->capture_default_str();

  // noisy-oracle
  auto* noisy = app.add_subcommand("noisy-oracle", "accuracy of a perturbed oracle as a CSV curve");
  std::string lambdas = "0,0.01,0.02,0.05,0.1,0.2,0.5,1";
  noisy->add_option("--lambdas", lambdas)->capture_default_str();
  noisy->add_option("--corpus", corpus)->capture_default_str();
  noisy->add_option("--split", split)->check(CLI::IsMember({"train", "val", "test"}))->capture_default_str();

  // suggest
  auto* sug = app.add_subcommand("suggest", "rank mate locations for two selected faces");
  std::string part_a, part_b, face_a, face_b;
  int k = service::kDefaultK;
  bool merge = false;
  sug->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  sug->add_option("--part-a", part_a)->required()->check(CLI::ExistingFile);
  sug->add_option("--part-b", part_b)->required()->check(CLI::ExistingFile);
  sug->add_option("--face-a", face_a)->required();
  sug->add_option("--face-b", face_b)->required();
  sug->add_option("-k", k)->capture_default_str();
  sug->add_flag("--merge-equivalent", merge);

  // serve
  auto* srv = app.add_subcommand("serve", "run the HTTP JSON API");
  std::string host = "127.0.0.1", type_checkpoint, static_dir, part_dir;
  int port = 8080;
  srv->add_option("--checkpoint", checkpoint, "location model")->required()->check(CLI::ExistingFile);
  srv->add_option("--type-checkpoint", type_checkpoint, "mate type model")->check(CLI::ExistingFile);
  srv->add_option("--corpus", corpus, "preload parts from this corpus directory");
  srv->add_option("--parts", part_dir, "directory that uploaded parts are written to");
  srv->add_option("--static", static_dir, "static files served at /")->check(CLI::ExistingDirectory);
  srv->add_option("--host", host)->capture_default_str();
  srv->add_option("--port", port)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      copt.seed = seed;
      if (per_family >= 0)
        copt.counts.plate_peg = copt.counts.block_stack = copt.counts.hinge = copt.counts.shaft_bushing =
            copt.counts.rail_slider = copt.counts.offset_plates = per_family;
      const auto built = dataset::build_corpus(copt);
      const fs::path dir = out.empty() ? fs::path("corpus") : fs::path(out);
      dataset::write_corpus(dir, built);
      std::cout << built.stats.dump(2) << "\n";
    } else if (*featurize) {
      emit(out, graph_to_json(build_full_graph(load_part(dataset::read_file(part_file)))).dump() + "\n");
    } else if (*trn) {
      tcfg.seed = seed;
      tcfg.model.head = *model::head_from_string(task);
      tcfg.model.variant = *model::variant_from_string(variant);
      tcfg.model.features = *model::feature_set_from_string(features);
      tcfg.model.inference_norm = norm == "batch" ? model::InferenceNorm::batch : model::InferenceNorm::running;
      const auto parts = dataset::load_parts(corpus);
      const auto train_set = load_split(corpus, dataset::Split::train, parts);
      const auto val_set = load_split(corpus, dataset::Split::val, parts);
      std::shared_ptr<model::SbgcnModel<float>> start;
      int start_epoch = 0;
      if (!resume.empty()) {
        const Json ck = automate::detail::parse_json(dataset::read_file(resume), resume);
        start = train::load_model<float>(ck);
        start_epoch = ck.at("metadata").value("epochs_run", 0);
      }
      std::cerr << "train " << train_set.size() << " val " << val_set.size() << " params "
                << model::SbgcnModel<float>(tcfg.model).parameter_count() << "\n";
      auto result = train::train_model<float>(
          tcfg, train_set, val_set, [](const train::EpochRecord& r) { std::cerr << r.to_json().dump() << "\n"; },
          start.get(), start_epoch);
      Json history = Json::array();
      for (const auto& r : result.history) history.push_back(r.to_json());
      const Json ck = train::save_checkpoint(*result.best, Json{{"train", tcfg.to_json()},
                                                               {"corpus", corpus},
                                                               {"history", history},
                                                               {"best_epoch", result.best_epoch},
                                                               {"best_val_score", result.best_score},
                                                               {"epochs_run", start_epoch + tcfg.epochs}});
      dataset::write_file(out.empty() ? "checkpoint.json" : out, ck.dump());
    } else if (*evl) {
      auto m = load_checkpoint_file<float>(checkpoint);
      const auto parts = dataset::load_parts(corpus);
      const auto train_set = load_split(corpus, dataset::Split::train, parts);
      const auto examples = load_split(corpus, parse_split(split), parts);
      train::BaselineOptions b{seed, train::OriginTypeTable::fit(train_set), train::LabelDistribution::fit(train_set)};
      emit(out, train::evaluate(*m, examples, split, b).dump(2) + "\n");
    } else if (*noisy) {
      const auto parts = dataset::load_parts(corpus);
      const auto examples = load_split(corpus, parse_split(split), parts);
      emit(out, train::noisy_oracle_csv(train::noisy_oracle_curve(examples, parse_lambdas(lambdas), seed)));
    } else if (*sug) {
      const service::Suggester s(load_checkpoint_file<float>(checkpoint));
      const Part a = load_part(dataset::read_file(part_a));
      const Part b = load_part(dataset::read_file(part_b));
      emit(out, service::to_json(s.suggest(a, b, face_a, face_b, k, merge)).dump(2) + "\n");
    } else if (*srv) {
      auto loc = load_checkpoint_file<float>(checkpoint);
      auto typ = type_checkpoint.empty() ? nullptr : load_checkpoint_file<float>(type_checkpoint);
      const std::string hash = loc->config().hash() + (typ ? "+" + typ->config().hash() : "");
      service::ServiceOptions opt;
      opt.part_dir = part_dir;
      service::Service svc(service::Suggester(loc, typ), opt);
      svc.set_model_hash(hash);
      if (!corpus.empty() && fs::is_directory(fs::path(corpus) / "parts")) svc.load_part_dir(corpus);
      if (!part_dir.empty() && fs::is_directory(fs::path(part_dir) / "parts")) svc.load_part_dir(part_dir);
      httplib::Server server;
      service::mount_routes(server, svc, service::stderr_log(), static_dir);
      g_server = &server;
      std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
      std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
      std::cerr << "listening on " << host << ":" << port << " (" << svc.parts().size() << " parts, model " << hash
                << ")\n";
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
