#pragma once

// On-disk corpus layout:
//   parts/<id>.json  assemblies/<id>.json  examples/{train,val,test}.jsonl  stats.json

#include "automate/dataset/examples.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace automate::dataset {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, const std::string& bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << bytes;
}

struct CorpusOptions {
  std::uint64_t seed = 0;
  FamilyCounts counts;
  FaceCountFilter filter;
  double tol_pos = kDefaultTolPos;
  double tol_ang = kDefaultTolAng;

  Json to_json() const {
    return Json{{"seed", seed},
                {"plate_peg", counts.plate_peg},
                {"block_stack", counts.block_stack},
                {"hinge", counts.hinge},
                {"shaft_bushing", counts.shaft_bushing},
                {"rail_slider", counts.rail_slider},
                {"offset_plates", counts.offset_plates},
                {"duplicates", counts.duplicates},
                {"min_faces", filter.min_faces},
                {"max_faces", filter.max_faces},
                {"tol_pos", tol_pos},
                {"tol_ang", tol_ang}};
  }
};

struct BuiltCorpus {
  DedupResult dedup;
  ExampleSet examples;
  Json stats;
};

/// generate -> dedup -> build_examples.
inline BuiltCorpus build_corpus(const CorpusOptions& opt) {
  BuiltCorpus out;
  const RawCorpus raw = generate_corpus(opt.seed, opt.counts);
  out.dedup = dedup(raw, opt.filter);
  out.examples = build_examples(out.dedup, opt.tol_pos, opt.tol_ang);
  out.stats = Json{{"options", opt.to_json()},
                   {"dedup", out.dedup.stats.to_json()},
                   {"examples", out.examples.stats.to_json()}};
  return out;
}

inline void write_corpus(const fs::path& dir, const BuiltCorpus& c) {
  fs::remove_all(dir / "parts");
  fs::remove_all(dir / "assemblies");
  fs::remove_all(dir / "examples");
  for (const auto& [id, part] : c.dedup.corpus.parts) write_file(dir / "parts" / (id + ".json"), save_part(part));
  for (const auto& a : c.dedup.corpus.assemblies) write_file(dir / "assemblies" / (a.id + ".json"), save_assembly(a));
  std::string lines[3];
  for (const auto& ex : c.examples.examples) lines[static_cast<int>(ex.split)] += example_to_json(ex).dump() + "\n";
  for (Split s : {Split::train, Split::val, Split::test})
    write_file(dir / "examples" / (std::string(to_string(s)) + ".jsonl"), lines[static_cast<int>(s)]);
  write_file(dir / "stats.json", c.stats.dump(2) + "\n");
}

inline std::map<std::string, Part> load_parts(const fs::path& dir) {
  const fs::path pdir = dir / "parts";
  if (!fs::is_directory(pdir)) throw std::runtime_error("corpus missing: no parts directory in " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(pdir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::map<std::string, Part> parts;
  for (const auto& f : files) {
    Part p = load_part(read_file(f));
    parts.emplace(p.id(), std::move(p));
  }
  return parts;
}

inline std::vector<SelectionExample> load_examples(const fs::path& dir, Split split) {
  const fs::path f = dir / "examples" / (std::string(to_string(split)) + ".jsonl");
  if (!fs::exists(f)) throw std::runtime_error("corpus missing: " + f.string());
  std::istringstream in(read_file(f));
  std::vector<SelectionExample> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(example_from_json(automate::detail::parse_json(line, "example")));
  return out;
}

}  // namespace automate::dataset
