// fpsynth command-line tool: generate synthetic fingerprint datasets and
// run the evaluation battery (quality report, match-score protocols,
// TAR/FAR tables, histograms, uniqueness and privacy scans).

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fpsynth/dataset.hpp"
#include "fpsynth/eval.hpp"
#include "fpsynth/manifest.hpp"
#include "fpsynth/matcher.hpp"
#include "fpsynth/minutiae.hpp"
#include "fpsynth/parallel.hpp"
#include "fpsynth/spoof.hpp"

namespace fs = std::filesystem;
using namespace fpsynth;

namespace {

// "1-3,5,9" -> {1,2,3,5,9}
std::vector<FingerClass> parse_classes(const std::string& text) {
  std::vector<FingerClass> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const size_t dash = token.find('-');
    if (dash == std::string::npos) {
      out.push_back(FingerClass(std::stoi(token)));
    } else {
      const int lo = std::stoi(token.substr(0, dash));
      const int hi = std::stoi(token.substr(dash + 1));
      if (hi < lo) throw std::invalid_argument("bad class range: " + token);
      for (int c = lo; c <= hi; ++c) out.push_back(FingerClass(c));
    }
  }
  if (out.empty()) throw std::invalid_argument("class list is empty");
  return out;
}

Material parse_material(const std::string& name) {
  const auto m = material_from_string(name);
  if (!m) {
    std::string allowed;
    for (Material mm : kAllMaterials) {
      allowed += allowed.empty() ? "" : ", ";
      allowed += to_string(mm);
    }
    throw std::invalid_argument("unknown material \"" + name + "\" (expected one of: " +
                                allowed + ")");
  }
  return *m;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  return f;
}

void write_quality_report(const QualityReport& r, const fs::path& path) {
  std::ofstream f = open_out(path);
  write_quality_csv(r, f);
}

void write_hist_csv(const ScoreDistribution& d, const fs::path& path) {
  std::ofstream f = open_out(path);
  f << "bin_lo,bin_hi,count\n";
  const double width = (d.hi - d.lo) / d.counts.size();
  for (size_t i = 0; i < d.counts.size(); ++i) {
    f << d.lo + i * width << ',' << d.lo + (i + 1) * width << ',' << d.counts[i] << '\n';
  }
}

void write_scores_csv(const DatasetManifest& m, const std::vector<IndexPair>& pairs,
                      const std::vector<double>& scores, const fs::path& path) {
  std::ofstream f = open_out(path);
  f << "id_a,id_b,score\n";
  for (size_t i = 0; i < pairs.size(); ++i) {
    f << m.records[pairs[i].first].path << ',' << m.records[pairs[i].second].path << ','
      << scores[i] << '\n';
  }
}

void write_balance_csv(const BalanceReport& r, const fs::path& path) {
  std::ofstream f = open_out(path);
  f << "material,live,spoof,balanced,deficit\n";
  for (const MaterialBalance& b : r.materials) {
    f << to_string(b.material) << ',' << b.live << ',' << b.spoof << ','
      << (b.balanced ? "yes" : "no") << ',' << b.deficit << '\n';
  }
}

std::vector<double> read_score_column(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open score file: " + path.string());
  std::vector<double> scores;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (first && line.find("score") != std::string::npos) {
      first = false;
      continue;  // header
    }
    first = false;
    const size_t comma = line.rfind(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    scores.push_back(std::stod(field));
  }
  return scores;
}

struct DatasetInputs {
  fs::path manifest_path;
  fs::path root;
  std::string name;
  DatasetManifest manifest;
};

DatasetInputs load_dataset(const fs::path& manifest_path, double missing_limit_pct) {
  DatasetInputs d;
  d.manifest_path = manifest_path;
  d.root = manifest_path.parent_path();
  d.name = manifest_path.stem().string();
  d.manifest = read_manifest(manifest_path);

  const std::vector<size_t> missing = d.manifest.missing_files(d.root);
  for (size_t i : missing) {
    std::cerr << "warning: missing image for record " << (i + 1) << ": "
              << d.manifest.records[i].path << "\n";
  }
  if (!d.manifest.records.empty()) {
    const double pct = 100.0 * missing.size() / d.manifest.records.size();
    if (pct > 1.0) {
      throw std::runtime_error(d.name + ": " + std::to_string(missing.size()) +
                               " of " + std::to_string(d.manifest.records.size()) +
                               " images missing (>1%)");
    }
  }
  if (!missing.empty()) {
    DatasetManifest pruned;
    std::set<size_t> drop(missing.begin(), missing.end());
    for (size_t i = 0; i < d.manifest.records.size(); ++i) {
      if (!drop.count(i)) pruned.records.push_back(d.manifest.records[i]);
    }
    d.manifest = std::move(pruned);
    std::cerr << "warning: " << missing.size() << " records dropped from " << d.name << "\n";
  }
  (void)missing_limit_pct;
  return d;
}

int cmd_generate(const std::string& classes_text, int subjects, int impressions,
                 const std::string& material_text, uint64_t seed, const fs::path& out_dir,
                 int workers) {
  GenerateSpec spec;
  spec.classes = parse_classes(classes_text);
  spec.subjects_per_class = subjects;
  spec.impressions = impressions;
  spec.material = parse_material(material_text);
  spec.master_seed = seed;
  spec.workers = workers;
  spec.validate();

  const DatasetManifest manifest = generate_dataset(spec, out_dir);
  std::cout << "wrote " << manifest.records.size() << " images and manifest.jsonl under "
            << out_dir.string() << "\n";
  return 0;
}

int cmd_evaluate(const fs::path& manifest_a, std::optional<fs::path> manifest_b,
                 std::vector<double> thresholds, double far_target, int bins, int workers,
                 const fs::path& out_dir, std::optional<fs::path> genuine_csv,
                 std::optional<fs::path> imposter_csv) {
  fs::create_directories(out_dir);
  DatasetInputs a = load_dataset(manifest_a, 1.0);

  std::ofstream summary = open_out(out_dir / "protocol_summary.csv");
  summary << "dataset,records,mated_pairs,nonmated_pairs\n";

  struct DatasetEval {
    std::string name;
    FeatureSet features;
    std::vector<double> genuine;
    std::vector<double> imposter;
  };

  auto evaluate_one = [&](DatasetInputs& d, const char* suffix,
                          bool precomputed) -> DatasetEval {
    DatasetEval ev;
    ev.name = d.name;
    const uint64_t mated_n = mated_pair_count(d.manifest);
    const uint64_t nonmated_n = nonmated_pair_count(d.manifest);
    summary << d.name << ',' << d.manifest.records.size() << ',' << mated_n << ','
            << nonmated_n << '\n';

    write_quality_report(quality_report_from_files(d.manifest, d.root, workers),
                         out_dir / (std::string("quality_") + suffix + ".csv"));

    if (precomputed) {
      ev.genuine = read_score_column(*genuine_csv);
      ev.imposter = read_score_column(*imposter_csv);
      std::cout << d.name << ": using precomputed scores (" << ev.genuine.size()
                << " genuine, " << ev.imposter.size() << " imposter)\n";
      return ev;
    }

    ev.features = extract_features(d.manifest, d.root, workers);
    const std::vector<IndexPair> mated = build_mated_pairs(d.manifest);
    const std::vector<IndexPair> nonmated = build_nonmated_pairs(d.manifest);
    ev.genuine = score_pairs(ev.features, mated, workers);
    ev.imposter = score_pairs(ev.features, nonmated, workers);
    write_scores_csv(d.manifest, mated, ev.genuine,
                     out_dir / (std::string("genuine_scores_") + suffix + ".csv"));
    write_scores_csv(d.manifest, nonmated, ev.imposter,
                     out_dir / (std::string("imposter_scores_") + suffix + ".csv"));
    write_balance_csv(validate_balanced(d.manifest),
                      out_dir / (std::string("balance_") + suffix + ".csv"));
    return ev;
  };

  const bool precomputed = genuine_csv.has_value() && imposter_csv.has_value();
  DatasetEval eval_a = evaluate_one(a, "a", precomputed);

  std::optional<DatasetInputs> b;
  std::optional<DatasetEval> eval_b;
  if (manifest_b) {
    b = load_dataset(*manifest_b, 1.0);
    eval_b = evaluate_one(*b, "b", false);
  }

  // TAR/FAR table: explicit thresholds plus the FAR-target operating point
  std::ofstream tarfar = open_out(out_dir / "tarfar.csv");
  tarfar << "threshold,dataset,tar_percent,far_percent\n";
  auto emit_rows = [&](const DatasetEval& ev) {
    if (ev.genuine.empty() || ev.imposter.empty()) return 0.0;
    std::vector<double> all = thresholds;
    const ThresholdResult at_target = threshold_for_far(ev.imposter, far_target);
    all.push_back(at_target.threshold);
    for (double t : all) {
      const TarFarPoint p = tar_far(ev.genuine, ev.imposter, t);
      tarfar << p.threshold << ',' << ev.name << ',' << p.tar << ',' << p.far << '\n';
    }
    if (at_target.saturated) {
      std::cerr << "warning: " << ev.name << ": FAR target " << far_target
                << "% unattainable, threshold saturated\n";
    }
    return at_target.threshold;
  };
  const double threshold_a = emit_rows(eval_a);
  if (eval_b) emit_rows(*eval_b);

  if (!eval_a.genuine.empty()) {
    write_hist_csv(histogram(eval_a.genuine, bins, 0.0, 100.0),
                   out_dir / "hist_genuine_a.csv");
    write_hist_csv(histogram(eval_a.imposter, bins, 0.0, 100.0),
                   out_dir / "hist_imposter_a.csv");
  }

  if (eval_b) {
    write_hist_csv(histogram(eval_b->genuine, bins, 0.0, 100.0),
                   out_dir / "hist_genuine_b.csv");
    write_hist_csv(histogram(eval_b->imposter, bins, 0.0, 100.0),
                   out_dir / "hist_imposter_b.csv");

    // uniqueness: do the two datasets' imposter scores look alike?
    if (!eval_a.imposter.empty() && !eval_b->imposter.empty()) {
      const double tv = uniqueness_compare(histogram(eval_a.imposter, bins, 0.0, 100.0),
                                           histogram(eval_b->imposter, bins, 0.0, 100.0));
      std::ofstream uf = open_out(out_dir / "uniqueness.csv");
      uf << "metric,value\n";
      uf << "imposter_tv_distance," << tv << '\n';
    }

    // privacy: full cross join at the requested operating point
    if (!eval_a.features.empty() && !eval_b->features.empty()) {
      const double scan_threshold = thresholds.empty() ? threshold_a : thresholds.front();
      const PrivacyScanResult scan =
          privacy_scan(eval_a.features, eval_b->features, scan_threshold, workers);
      std::ofstream pf = open_out(out_dir / "privacy.csv");
      pf << "threshold,pairs_compared,matches_above_threshold,effective_far_percent\n";
      pf << scan_threshold << ',' << scan.pairs_compared << ','
         << scan.matches_above_threshold << ',' << scan.effective_far << '\n';
      std::cout << "privacy scan: " << scan.matches_above_threshold << " of "
                << scan.pairs_compared << " cross pairs at or above " << scan_threshold
                << " (effective FAR " << scan.effective_far << "%)\n";
    }
  }

  std::cout << "evaluation reports written under " << out_dir.string() << "\n";
  return 0;
}

int cmd_score_pairs(const fs::path& manifest_path, const fs::path& pairs_path,
                    const fs::path& out_path, int workers) {
  DatasetInputs d = load_dataset(manifest_path, 1.0);
  std::map<std::string, uint32_t> by_path;
  for (uint32_t i = 0; i < d.manifest.records.size(); ++i) {
    by_path[d.manifest.records[i].path] = i;
  }

  std::ifstream pf(pairs_path);
  if (!pf) throw std::runtime_error("cannot open pair list: " + pairs_path.string());
  std::vector<IndexPair> pairs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(pf, line)) {
    ++line_no;
    if (line.empty() || line.starts_with("id_a")) continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("pair list line " + std::to_string(line_no) +
                               ": expected \"id_a,id_b\"");
    }
    const std::string ida = line.substr(0, comma);
    const std::string idb = line.substr(comma + 1);
    const auto ita = by_path.find(ida);
    const auto itb = by_path.find(idb);
    if (ita == by_path.end() || itb == by_path.end()) {
      throw std::runtime_error("pair list line " + std::to_string(line_no) +
                               ": unknown id \"" + (ita == by_path.end() ? ida : idb) + "\"");
    }
    pairs.push_back({ita->second, itb->second});
  }

  const FeatureSet features = extract_features(d.manifest, d.root, workers);
  std::vector<MatchScore> scores(pairs.size());
  parallel_for(pairs.size(), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      scores[i] = match(features[pairs[i].first], features[pairs[i].second]);
    }
  });

  std::ofstream out = open_out(out_path);
  out << "id_a,id_b,score,pairs\n";
  for (size_t i = 0; i < pairs.size(); ++i) {
    out << d.manifest.records[pairs[i].first].path << ','
        << d.manifest.records[pairs[i].second].path << ',' << scores[i].value << ','
        << scores[i].supporting_pairs << '\n';
  }
  std::cout << "scored " << pairs.size() << " pairs -> " << out_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fpsynth: synthetic fingerprint dataset generation and evaluation"};
  app.require_subcommand(1);

  // generate
  std::string classes_text = "1-10";
  int subjects = 1;
  int impressions = 1;
  std::string material_text = "Live";
  uint64_t seed = 0;
  std::string out_dir;
  int workers = default_workers();

  CLI::App* gen = app.add_subcommand("generate", "generate a synthetic dataset");
  gen->add_option("--classes", classes_text, "finger classes, e.g. 1-10 or 1,3,5")
      ->capture_default_str();
  gen->add_option("--subjects", subjects, "subjects per class")->required();
  gen->add_option("--impressions", impressions, "impressions per finger")->required();
  gen->add_option("--material", material_text, "Live or a spoof material")
      ->capture_default_str();
  gen->add_option("--seed", seed, "master seed; all randomness derives from it")->required();
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_option("--workers", workers, "worker threads")->capture_default_str();

  // evaluate
  std::string manifest_a_text;
  std::string manifest_b_text;
  std::vector<double> thresholds;
  double far_target = 0.01;
  int bins = 50;
  std::string eval_out;
  std::string genuine_csv_text;
  std::string imposter_csv_text;

  CLI::App* ev = app.add_subcommand("evaluate", "run the evaluation battery");
  ev->add_option("--manifest-a", manifest_a_text, "primary dataset manifest")->required();
  ev->add_option("--manifest-b", manifest_b_text,
                 "second dataset manifest (enables uniqueness and privacy scans)");
  ev->add_option("--threshold", thresholds, "explicit score thresholds for the TAR/FAR table");
  ev->add_option("--far-target", far_target, "FAR target in percent for threshold search")
      ->capture_default_str();
  ev->add_option("--bins", bins, "histogram bins")->capture_default_str();
  ev->add_option("--workers", workers, "worker threads")->capture_default_str();
  ev->add_option("--out", eval_out, "report output directory")->required();
  ev->add_option("--genuine-scores", genuine_csv_text,
                 "precomputed genuine scores CSV for dataset A (skips matching)");
  ev->add_option("--imposter-scores", imposter_csv_text,
                 "precomputed imposter scores CSV for dataset A (skips matching)");

  // score-pairs
  std::string sp_manifest;
  std::string sp_pairs;
  std::string sp_out;
  CLI::App* sp = app.add_subcommand("score-pairs", "batch-score an explicit pair list");
  sp->add_option("--manifest", sp_manifest, "dataset manifest")->required();
  sp->add_option("--pairs", sp_pairs, "CSV pair list: id_a,id_b per line")->required();
  sp->add_option("--out", sp_out, "output CSV (id_a,id_b,score,pairs)")->required();
  sp->add_option("--workers", workers, "worker threads")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_generate(classes_text, subjects, impressions, material_text, seed, out_dir,
                          workers);
    }
    if (ev->parsed()) {
      std::optional<fs::path> mb;
      if (!manifest_b_text.empty()) mb = manifest_b_text;
      std::optional<fs::path> gcsv, icsv;
      if (!genuine_csv_text.empty()) gcsv = genuine_csv_text;
      if (!imposter_csv_text.empty()) icsv = imposter_csv_text;
      return cmd_evaluate(manifest_a_text, mb, thresholds, far_target, bins, workers,
                          eval_out, gcsv, icsv);
    }
    if (sp->parsed()) {
      return cmd_score_pairs(sp_manifest, sp_pairs, sp_out, workers);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
