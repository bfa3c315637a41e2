#include "wscl/io.hpp"

#include <openssl/evp.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "wscl/error.hpp"

namespace wscl::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

double parse_double(std::string_view s) {
  const std::string buf(s);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str() || *end != '\0') {
    throw Error(ErrorCode::kIo, "not a number: '" + buf + "'");
  }
  return v;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string rows_to_csv(const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix rows_from_lines(const std::vector<std::string_view>& ls, std::size_t first) {
  if (ls.size() <= first) return Matrix(0, 0);
  const std::size_t cols = split(ls[first], ',').size();
  Matrix m(static_cast<Index>(ls.size() - first), static_cast<Index>(cols));
  for (std::size_t i = first; i < ls.size(); ++i) {
    const auto cells = split(ls[i], ',');
    if (cells.size() != cols) {
      throw Error(ErrorCode::kIo, "ragged CSV row " + std::to_string(i + 1));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Index>(i - first), static_cast<Index>(j)) = parse_double(cells[j]);
    }
  }
  return m;
}

}  // namespace

std::string matrix_to_csv(const Matrix& m) { return rows_to_csv(m); }

Matrix matrix_from_csv(std::string_view text) { return rows_from_lines(lines(text), 0); }

void write_matrix_csv(const fs::path& path, const Matrix& m) { write_text(path, matrix_to_csv(m)); }

Matrix read_matrix_csv(const fs::path& path) { return matrix_from_csv(read_text(path)); }

json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

json graph_to_json(const SymmetricGraph& g) {
  json rows = json::array();
  for (Index i = 0; i < g.n(); ++i) {
    json row = json::array();
    for (Index j = 0; j < g.n(); ++j) row.push_back(g.weights()(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"n", g.n()}, {"mass_normalized", g.mass_normalized()}, {"rows", std::move(rows)}};
}

SymmetricGraph graph_from_json(const json& j) {
  try {
    const auto n = j.at("n").get<Index>();
    const auto& rows = j.at("rows");
    if (static_cast<Index>(rows.size()) != n) throw Error(ErrorCode::kIo, "row count differs from n");
    Matrix w(n, n);
    for (Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (static_cast<Index>(row.size()) != n) throw Error(ErrorCode::kIo, "row length differs from n");
      for (Index c = 0; c < n; ++c) w(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return SymmetricGraph(std::move(w), j.value("mass_normalized", false));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("graph JSON: ") + e.what());
  }
}

std::string posterior_to_csv(const PosteriorMatrix& y) {
  std::string out;
  for (Index c = 0; c < y.classes(); ++c) {
    if (c) out += ',';
    out += std::to_string(c);
  }
  out += '\n';
  return out + rows_to_csv(y.eta());
}

PosteriorMatrix posterior_from_csv(std::string_view text) {
  const auto ls = lines(text);
  if (ls.empty()) throw Error(ErrorCode::kIo, "posterior CSV lacks a header");
  const auto classes = static_cast<Index>(split(ls[0], ',').size());
  Matrix eta = rows_from_lines(ls, 1);
  if (eta.size() == 0) eta.resize(0, classes);
  return PosteriorMatrix(classes, std::move(eta));
}

json noise_to_json(const NoiseModel& nm) {
  return json{{"r", nm.r}, {"gamma", number(nm.gamma)}, {"alpha", number(nm.alpha)}, {"beta", number(nm.beta)}};
}

NoiseModel noise_from_json(const json& j) {
  try {
    return make_noise_model(j.at("r").get<int>(), j.at("gamma").get<double>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("noise JSON: ") + e.what());
  }
}

json scenario_to_json(const ScenarioConfig& cfg) {
  return json{{"seed", cfg.seed},
              {"r", cfg.r},
              {"naturals_per_class", cfg.naturals_per_class},
              {"augs_per_natural", cfg.augs_per_natural},
              {"intra_class_overlap", cfg.intra_class_overlap},
              {"inter_class_overlap", cfg.inter_class_overlap},
              {"class_priors", cfg.class_priors},
              {"labeled_fraction", cfg.labeled_fraction},
              {"gamma", cfg.gamma},
              {"overlap_jitter", cfg.overlap_jitter},
              {"label_graph_mode", to_string(cfg.label_graph_mode)}};
}

ScenarioConfig scenario_from_json(const json& j) {
  static const std::set<std::string> known = {
      "seed", "r", "naturals_per_class", "augs_per_natural", "intra_class_overlap",
      "inter_class_overlap", "class_priors", "labeled_fraction", "gamma", "overlap_jitter",
      "label_graph_mode"};
  if (!j.is_object()) throw Error(ErrorCode::kConfigInvalid, "scenario must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::kConfigInvalid, "unknown scenario key '" + key + "'");
  }
  ScenarioConfig cfg;
  try {
    cfg.seed = j.value("seed", cfg.seed);
    cfg.r = j.value("r", cfg.r);
    cfg.naturals_per_class = j.value("naturals_per_class", cfg.naturals_per_class);
    cfg.augs_per_natural = j.value("augs_per_natural", cfg.augs_per_natural);
    cfg.intra_class_overlap = j.value("intra_class_overlap", cfg.intra_class_overlap);
    cfg.inter_class_overlap = j.value("inter_class_overlap", cfg.inter_class_overlap);
    cfg.class_priors = j.value("class_priors", cfg.class_priors);
    cfg.labeled_fraction = j.value("labeled_fraction", cfg.labeled_fraction);
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.overlap_jitter = j.value("overlap_jitter", cfg.overlap_jitter);
    if (j.contains("label_graph_mode")) {
      cfg.label_graph_mode = label_graph_mode_from_string(j.at("label_graph_mode").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("scenario: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

namespace {

struct WorldFiles {
  std::string aug_graph, aug_dist, labels, layout;
};

WorldFiles world_files(const World& w) {
  WorldFiles f;
  f.aug_graph = matrix_to_csv(w.aug_graph.weights());
  f.aug_dist = matrix_to_csv(w.aug_dist);
  f.labels = "natural,label,noisy_label,prior\n";
  for (Index j = 0; j < w.naturals(); ++j) {
    const auto u = static_cast<std::size_t>(j);
    f.labels += fmt::format("{},{},{},{}\n", j, w.label_of_natural[u], w.noisy_label_of_natural[u],
                            format_double(w.natural_prior[j]));
  }
  f.layout = fmt::format("n_labeled,{}\nn_unlabeled,{}\nindex,natural\n", w.layout.n_labeled,
                         w.layout.n_unlabeled);
  for (std::size_t x = 0; x < w.natural_of.size(); ++x) f.layout += fmt::format("{},{}\n", x, w.natural_of[x]);
  return f;
}

std::string hash_files(const WorldFiles& f) {
  return sha256_hex(f.aug_graph + '\0' + f.aug_dist + '\0' + f.labels + '\0' + f.layout);
}

}  // namespace

std::string world_content_hash(const World& w) { return hash_files(world_files(w)); }

void save_world(const fs::path& dir, const World& w, const ScenarioConfig& cfg) {
  fs::create_directories(dir);
  const WorldFiles f = world_files(w);
  write_text(dir / "aug_graph.csv", f.aug_graph);
  write_text(dir / "aug_dist.csv", f.aug_dist);
  write_text(dir / "labels.csv", f.labels);
  write_text(dir / "layout.csv", f.layout);
  const json manifest{{"config", scenario_to_json(cfg)},
                      {"n", w.n()},
                      {"naturals", w.naturals()},
                      {"n_labeled", w.layout.n_labeled},
                      {"n_unlabeled", w.layout.n_unlabeled},
                      {"sha256", hash_files(f)}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

World load_world(const fs::path& dir, ScenarioConfig* cfg_out) {
  json manifest;
  try {
    manifest = json::parse(read_text(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("world manifest: ") + e.what());
  }
  const ScenarioConfig cfg = scenario_from_json(manifest.at("config"));
  World w = gen_block_world(cfg);
  const std::string on_disk = hash_files(WorldFiles{read_text(dir / "aug_graph.csv"), read_text(dir / "aug_dist.csv"),
                                                    read_text(dir / "labels.csv"), read_text(dir / "layout.csv")});
  const std::string expected = manifest.value("sha256", std::string());
  if (on_disk != expected || world_content_hash(w) != expected) {
    throw Error(ErrorCode::kIo, "world content hash mismatch in " + dir.string());
  }
  if (cfg_out) *cfg_out = cfg;
  return w;
}

void save_factor(const fs::path& stem, const TrainOutcome& out, std::uint64_t seed) {
  fs::path csv = stem;
  csv += ".csv";
  fs::path meta = stem;
  meta += ".json";
  write_matrix_csv(csv, out.factor.f);
  const json j{{"n", out.factor.n()},
               {"k", out.factor.k()},
               {"loss", number(out.loss)},
               {"iters", out.iters},
               {"converged", out.converged},
               {"seed", seed}};
  write_text(meta, j.dump(2) + "\n");
}

json bound_report_to_json(const BoundReport& rep) {
  const BoundInputs& bi = rep.inputs;
  std::vector<double> nu(bi.nu.data(), bi.nu.data() + bi.nu.size());
  return json{{"value", number(rep.value)},
              {"active_term", rep.active_term},
              {"lambda", number(rep.lambda)},
              {"k_prime", rep.k_prime},
              {"warnings", rep.warnings},
              {"inputs",
               {{"delta_u", bi.delta_u},
                {"delta_s", bi.delta_s},
                {"rho", bi.rho},
                {"nu", nu},
                {"k", bi.k},
                {"theta", bi.theta},
                {"alpha", bi.alpha},
                {"gamma", number(bi.gamma)},
                {"r", bi.r},
                {"n_labeled", bi.n_labeled},
                {"n_unlabeled", bi.n_unlabeled}}}};
}

json eval_report_to_json(const EvalReport& rep) {
  return json{{"per_aug_error", rep.per_aug_error},
              {"natural_vote_error", rep.natural_vote_error},
              {"delta_u", rep.delta_u},
              {"delta_s", rep.delta_s},
              {"probe_norm", rep.probe_norm},
              {"theorem_norm_cap", number(rep.theorem_norm_cap)},
              {"gate", rep.gate}};
}

}  // namespace wscl::io
