#include "jamlab/signal_forge/json_io.hpp"

namespace jamlab::signal_forge {

void to_json(Json& j, const RadarParams& p) {
  j = Json{{"carrier_hz", p.carrier_hz},       {"bandwidth_hz", p.bandwidth_hz},
           {"pulse_width_s", p.pulse_width_s}, {"pri_s", p.pri_s},
           {"sample_rate_hz", p.sample_rate_hz}, {"snr_db", p.snr_db}};
}

void from_json(const Json& j, RadarParams& p) {
  read_opt(j, "carrier_hz", p.carrier_hz);
  read_opt(j, "bandwidth_hz", p.bandwidth_hz);
  read_opt(j, "pulse_width_s", p.pulse_width_s);
  read_opt(j, "pri_s", p.pri_s);
  read_opt(j, "sample_rate_hz", p.sample_rate_hz);
  read_opt(j, "snr_db", p.snr_db);
}

void to_json(Json& j, const Range& r) { j = Json::array({r.lo, r.hi}); }

void from_json(const Json& j, Range& r) {
  if (!j.is_array() || j.size() != 2)
    throw Error(ErrorKind::config_parse, "range must be a two-element array");
  r.lo = j[0].get<double>();
  r.hi = j[1].get<double>();
}

void to_json(Json& j, const DatasetConfig& c) {
  j = Json{{"counts", {{"AJ", c.counts[0]}, {"RFTJ", c.counts[1]}, {"RDFTJ", c.counts[2]}}},
           {"radar", c.radar},
           {"jnr_db", c.jnr_db},
           {"aj_bandwidth_hz", c.aj_bandwidth_hz},
           {"aj_center_offset_hz", c.aj_center_offset_hz},
           {"aj_duration_s", c.aj_duration_s},
           {"rftj_delay_s", c.rftj_delay_s},
           {"rdftj_delay_s", c.rdftj_delay_s},
           {"rdftj_targets", Json::array({c.rdftj_min_targets, c.rdftj_max_targets})},
           {"doppler_hz", c.doppler_hz},
           {"target_delay_s", c.target_delay_s},
           {"split", {{"train", c.split.train}, {"val", c.split.val}, {"test", c.split.test}}},
           {"seed", c.seed}};
}

void from_json(const Json& j, DatasetConfig& c) {
  if (j.contains("counts")) {
    const auto& counts = j.at("counts");
    if (counts.is_number_unsigned()) {
      c.counts.fill(counts.get<std::size_t>());
    } else {
      read_opt(counts, "AJ", c.counts[0]);
      read_opt(counts, "RFTJ", c.counts[1]);
      read_opt(counts, "RDFTJ", c.counts[2]);
    }
  }
  read_opt(j, "radar", c.radar);
  read_opt(j, "jnr_db", c.jnr_db);
  read_opt(j, "aj_bandwidth_hz", c.aj_bandwidth_hz);
  read_opt(j, "aj_center_offset_hz", c.aj_center_offset_hz);
  read_opt(j, "aj_duration_s", c.aj_duration_s);
  read_opt(j, "rftj_delay_s", c.rftj_delay_s);
  read_opt(j, "rdftj_delay_s", c.rdftj_delay_s);
  if (j.contains("rdftj_targets")) {
    const auto& k = j.at("rdftj_targets");
    if (!k.is_array() || k.size() != 2) throw Error(ErrorKind::config_parse, "rdftj_targets must be [min, max]");
    c.rdftj_min_targets = k[0].get<std::size_t>();
    c.rdftj_max_targets = k[1].get<std::size_t>();
  }
  read_opt(j, "doppler_hz", c.doppler_hz);
  read_opt(j, "target_delay_s", c.target_delay_s);
  if (j.contains("split")) {
    const auto& s = j.at("split");
    if (s.is_string()) {
      c.split = SplitFractions::preset(s.get<std::string>());
    } else {
      read_opt(s, "train", c.split.train);
      read_opt(s, "val", c.split.val);
      read_opt(s, "test", c.split.test);
    }
  }
  read_opt(j, "seed", c.seed);
}

}  // namespace jamlab::signal_forge
