#include "jamlab/signal_forge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "jamlab/common/error.hpp"
#include "jamlab/common/parallel.hpp"
#include "jamlab/signal_forge/cpx_file.hpp"
#include "jamlab/signal_forge/json_io.hpp"

namespace jamlab::signal_forge {

namespace fs = std::filesystem;

const char* to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  throw Error(ErrorKind::invalid_config, "unknown split '" + name + "'");
}

SplitFractions SplitFractions::preset(const std::string& name) {
  if (name == "80/10/10") return {0.8, 0.1, 0.1};
  // Train 0.3, test 0.6, validation 0.1.
  if (name == "30/60/10") return {0.3, 0.1, 0.6};
  throw Error(ErrorKind::invalid_config, "unknown split preset '" + name + "'");
}

void DatasetConfig::validate() const {
  for (auto c : counts) require(c > 0, ErrorKind::invalid_config, "per-class counts must be positive");
  radar.validate();
  auto ordered = [](const Range& r) { return std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi; };
  for (const Range* r : {&jnr_db, &aj_bandwidth_hz, &aj_center_offset_hz, &aj_duration_s, &rftj_delay_s,
                         &rdftj_delay_s, &doppler_hz, &target_delay_s})
    require(ordered(*r), ErrorKind::invalid_config, "range with lo > hi or non-finite bound");
  require(aj_bandwidth_hz.lo > 0.0, ErrorKind::invalid_config, "AJ bandwidth must be positive");
  require(aj_duration_s.lo > 0.0, ErrorKind::invalid_config, "AJ duration must be positive");
  require(rdftj_min_targets >= 1 && rdftj_min_targets <= rdftj_max_targets, ErrorKind::invalid_config,
          "RDFTJ target count range invalid");
  require(split.train >= 0 && split.val >= 0 && split.test >= 0 &&
              std::abs(split.train + split.val + split.test - 1.0) < 1e-9,
          ErrorKind::invalid_config, "split fractions must be nonnegative and sum to 1");
}

std::array<std::size_t, kJammingKinds> Dataset::class_histogram() const {
  std::array<std::size_t, kJammingKinds> h{};
  for (const auto& s : scenes) ++h[std::size_t(s.label)];
  return h;
}

std::vector<const SceneRecord*> Dataset::in_split(Split s) const {
  std::vector<const SceneRecord*> out;
  for (const auto& rec : scenes)
    if (rec.split == s) out.push_back(&rec);
  return out;
}

SceneRequest sample_scene_request(const DatasetConfig& cfg, JammingKind label, Rng& rng) {
  SceneRequest req;
  JammingSpec& j = req.jamming;
  j.kind = label;
  j.jnr_db = uniform(rng, cfg.jnr_db.lo, cfg.jnr_db.hi);
  j.jam_center_hz = cfg.radar.carrier_hz;
  j.jam_bandwidth_hz = cfg.radar.bandwidth_hz;
  req.target_delay_s = uniform(rng, cfg.target_delay_s.lo, cfg.target_delay_s.hi);
  switch (label) {
    case JammingKind::AJ:
      j.jam_bandwidth_hz = uniform(rng, cfg.aj_bandwidth_hz.lo, cfg.aj_bandwidth_hz.hi);
      j.jam_center_hz = cfg.radar.carrier_hz + uniform(rng, cfg.aj_center_offset_hz.lo, cfg.aj_center_offset_hz.hi);
      req.aj_duration_s = uniform(rng, cfg.aj_duration_s.lo, cfg.aj_duration_s.hi);
      break;
    case JammingKind::RFTJ:
      j.delay_s = uniform(rng, cfg.rftj_delay_s.lo, cfg.rftj_delay_s.hi);
      j.doppler_hz = uniform(rng, cfg.doppler_hz.lo, cfg.doppler_hz.hi);
      break;
    case JammingKind::RDFTJ: {
      const std::size_t k =
          cfg.rdftj_min_targets + uniform_index(rng, cfg.rdftj_max_targets - cfg.rdftj_min_targets + 1);
      for (std::size_t i = 0; i < k; ++i) {
        FalseTarget t;
        t.delay_s = uniform(rng, cfg.rdftj_delay_s.lo, cfg.rdftj_delay_s.hi);
        t.doppler_hz = uniform(rng, cfg.doppler_hz.lo, cfg.doppler_hz.hi);
        j.false_targets.push_back(t);
      }
      j.anchor_s = rdftj_anchor(j);
      break;
    }
  }
  return req;
}

namespace {

std::string scene_file_name(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene%04zu.cpx", id);
  return buf;
}

Json request_to_json(const SceneRequest& r) {
  const auto& j = r.jamming;
  Json targets = Json::array();
  for (const auto& t : j.false_targets)
    targets.push_back({{"delay_s", t.delay_s}, {"doppler_hz", t.doppler_hz}, {"amplitude", t.amplitude}});
  return Json{{"jnr_db", j.jnr_db},
              {"jam_center_hz", j.jam_center_hz},
              {"jam_bandwidth_hz", j.jam_bandwidth_hz},
              {"aj_duration_s", r.aj_duration_s},
              {"delay_s", j.delay_s},
              {"doppler_hz", j.doppler_hz},
              {"false_targets", targets},
              {"anchor_s", j.anchor_s},
              {"angle_deg", j.angle_deg},
              {"target_delay_s", r.target_delay_s}};
}

SceneRequest request_from_json(const Json& p, JammingKind kind) {
  SceneRequest r;
  auto& j = r.jamming;
  j.kind = kind;
  j.jnr_db = p.at("jnr_db").get<double>();
  j.jam_center_hz = p.at("jam_center_hz").get<double>();
  j.jam_bandwidth_hz = p.at("jam_bandwidth_hz").get<double>();
  r.aj_duration_s = p.at("aj_duration_s").get<double>();
  j.delay_s = p.at("delay_s").get<double>();
  j.doppler_hz = p.at("doppler_hz").get<double>();
  for (const auto& t : p.at("false_targets"))
    j.false_targets.push_back(
        {t.at("delay_s").get<double>(), t.at("doppler_hz").get<double>(), t.at("amplitude").get<double>()});
  j.anchor_s = p.at("anchor_s").get<double>();
  j.angle_deg = p.at("angle_deg").get<double>();
  r.target_delay_s = p.at("target_delay_s").get<double>();
  return r;
}

}  // namespace

Dataset gen_dataset(const DatasetConfig& cfg, const fs::path& dir) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorKind::io, "cannot create dataset directory " + dir.string());

  // Balanced label list, shuffled once with the master seed.
  std::vector<JammingKind> labels;
  for (std::size_t k = 0; k < kJammingKinds; ++k) labels.insert(labels.end(), cfg.counts[k], JammingKind(k));
  Rng order_rng(derive_seed(cfg.seed, 0xD47A5E7ULL));
  std::shuffle(labels.begin(), labels.end(), order_rng);

  // Per-class split assignment so every split stays balanced.
  std::vector<Split> splits(labels.size(), Split::train);
  for (std::size_t k = 0; k < kJammingKinds; ++k) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == JammingKind(k)) members.push_back(i);
    Rng split_rng(derive_seed(cfg.seed, 0x5B117ULL + k));
    std::shuffle(members.begin(), members.end(), split_rng);
    const auto n = members.size();
    const auto n_train = std::size_t(std::llround(cfg.split.train * double(n)));
    const auto n_val = std::min(n - n_train, std::size_t(std::llround(cfg.split.val * double(n))));
    for (std::size_t r = 0; r < n; ++r)
      splits[members[r]] = r < n_train ? Split::train : (r < n_train + n_val ? Split::val : Split::test);
  }

  Dataset ds;
  ds.dir = dir;
  ds.config = cfg;
  ds.scenes.resize(labels.size());
  parallel_for(labels.size(), [&](std::size_t i) {
    const std::uint64_t scene_seed = derive_seed(cfg.seed, i);
    Rng rng(scene_seed);
    SceneRecord rec;
    rec.id = i;
    rec.file = scene_file_name(i);
    rec.label = labels[i];
    rec.split = splits[i];
    rec.request = sample_scene_request(cfg, labels[i], rng);
    const EchoScene scene = compose_scene(cfg.radar, rec.request, derive_seed(scene_seed, 0xEC40ULL));
    rec.length = scene.composite.size();
    write_cpx(dir / rec.file, scene.composite);
    ds.scenes[i] = std::move(rec);
  });

  Json scenes = Json::array();
  for (const auto& rec : ds.scenes)
    scenes.push_back({{"id", rec.id},
                      {"file", rec.file},
                      {"label", to_string(rec.label)},
                      {"split", to_string(rec.split)},
                      {"data_offset", kCpxHeaderBytes},
                      {"length", rec.length},
                      {"params", request_to_json(rec.request)}});
  const auto hist = ds.class_histogram();
  Json manifest{{"format", "jamlab-dataset"},
                {"version", 1},
                {"config", cfg},
                {"class_counts", {{"AJ", hist[0]}, {"RFTJ", hist[1]}, {"RDFTJ", hist[2]}}},
                {"scenes", scenes}};
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  require(bool(out), ErrorKind::io, "cannot write manifest in " + dir.string());
  out << manifest.dump(1) << '\n';
  require(bool(out), ErrorKind::io, "manifest write failed");
  return ds;
}

Dataset load_dataset(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  require(bool(in), ErrorKind::io, "no manifest.json in " + dir.string());
  Json manifest;
  try {
    in >> manifest;
    Dataset ds;
    ds.dir = dir;
    ds.config = manifest.at("config").get<DatasetConfig>();
    for (const auto& s : manifest.at("scenes")) {
      SceneRecord rec;
      rec.id = s.at("id").get<std::size_t>();
      rec.file = s.at("file").get<std::string>();
      rec.label = jamming_kind_from_string(s.at("label").get<std::string>());
      rec.split = split_from_string(s.at("split").get<std::string>());
      rec.length = s.at("length").get<std::size_t>();
      rec.request = request_from_json(s.at("params"), rec.label);
      ds.scenes.push_back(std::move(rec));
    }
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::io, "malformed manifest in " + dir.string() + ": " + e.what());
  }
}

ComplexSeries load_scene(const Dataset& ds, const SceneRecord& rec) {
  ComplexSeries x = read_cpx(ds.dir / rec.file);
  x.carrier_hz = ds.config.radar.carrier_hz;
  return x;
}

}  // namespace jamlab::signal_forge
