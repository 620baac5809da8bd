#include "chokefit/data/synthetic.hpp"

#include <cmath>
#include <random>
#include <string>

#include "chokefit/random.hpp"

namespace chokefit::data {

namespace {

constexpr int kCompositionAttempts = 1000;

void check_interval(const Interval& iv, const std::string& name, double min_lo, double max_hi,
                    bool open_lo = false, bool open_hi = false) {
  const bool finite = std::isfinite(iv.lo) && std::isfinite(iv.hi);
  const bool lo_ok = open_lo ? iv.lo > min_lo : iv.lo >= min_lo;
  const bool hi_ok = open_hi ? iv.hi < max_hi : iv.hi <= max_hi;
  if (!finite || iv.lo > iv.hi || !lo_ok || !hi_ok) {
    throw DataError("invalid synthetic range: " + name);
  }
}

double draw(std::mt19937_64& rng, const Interval& iv) {
  if (iv.lo == iv.hi) return iv.lo;
  return std::uniform_real_distribution<double>(iv.lo, iv.hi)(rng);
}

Dataset sample(const SyntheticConfig& cfg, std::size_t n, std::mt19937_64& rng) {
  Dataset ds;
  ds.provenance = Provenance::synthetic;
  ds.generator_truth = GeneratorTruth{cfg.true_params, cfg.area};
  ds.rows.reserve(n);
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma > 0.0 ? cfg.noise_sigma : 1.0);
  const InputRanges& r = cfg.ranges;
  for (std::size_t i = 0; i < n; ++i) {
    Row row;
    row.x.p1 = draw(rng, r.p1);
    row.x.p2 = draw(rng, r.pr_raw) * row.x.p1;
    row.x.t1 = draw(rng, r.t1);
    row.x.u = draw(rng, r.u);
    bool placed = false;
    for (int attempt = 0; attempt < kCompositionAttempts && !placed; ++attempt) {
      const double eg = draw(rng, r.eta_g);
      const double eo = draw(rng, r.eta_o);
      if (eg + eo <= 1.0) {
        row.x.composition = {eg, eo};
        placed = true;
      }
    }
    if (!placed) throw DataError("invalid synthetic range: eta_g + eta_o rarely within 1");
    row.y = physics::mm_predict(row.x, cfg.true_params, cfg.consts, cfg.area);
    if (cfg.noise_sigma > 0.0) row.y += noise(rng);
    ds.rows.push_back(row);
  }
  return ds;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (!true_params.valid()) throw DataError("invalid synthetic true_params");
  if (!(area.a_max > 0.0) || !std::isfinite(area.a_max)) throw DataError("invalid synthetic area.a_max");
  if (n_points == 0) throw DataError("invalid synthetic n_points: must be positive");
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) throw DataError("invalid synthetic noise_sigma");
  check_interval(ranges.p1, "p1", 0.0, INFINITY, true);
  check_interval(ranges.pr_raw, "pr_raw", 0.0, 1.0, true, true);
  check_interval(ranges.t1, "t1", 0.0, INFINITY, true);
  check_interval(ranges.u, "u", 0.0, 1.0);
  check_interval(ranges.eta_g, "eta_g", 0.0, 1.0);
  check_interval(ranges.eta_o, "eta_o", 0.0, 1.0);
  if (ranges.eta_g.lo + ranges.eta_o.lo > 1.0) {
    throw DataError("invalid synthetic range: eta_g and eta_o lower bounds sum above 1");
  }
}

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  auto rng = make_rng(cfg.seed, 0, StreamPurpose::synthetic_train);
  return sample(cfg, cfg.n_points, rng);
}

std::pair<Dataset, Dataset> generate_synthetic_split(const SyntheticConfig& cfg) {
  Dataset train = generate_synthetic(cfg);
  if (cfg.n_test_points == 0) throw DataError("invalid synthetic n_test_points: must be positive");
  auto rng = make_rng(cfg.seed, 1, StreamPurpose::synthetic_test);
  Dataset test = sample(cfg, cfg.n_test_points, rng);
  return {std::move(train), std::move(test)};
}

Dataset generate_mismatch_synthetic(const SyntheticConfig& cfg, physics::AreaShape alt_shape) {
  SyntheticConfig alt = cfg;
  alt.area.shape = alt_shape;
  return generate_synthetic(alt);
}

Dataset concatenate(const Dataset& head, const Dataset& tail) {
  Dataset out = head;
  out.rows.insert(out.rows.end(), tail.rows.begin(), tail.rows.end());
  return out;
}

}  // namespace chokefit::data
