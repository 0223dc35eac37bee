#include "regnet/synthgen.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "regnet/csv.hpp"
#include "regnet/error.hpp"

namespace regnet {

namespace {

using json = nlohmann::json;
using Rng = std::mt19937_64;

void validate(const SynthConfig& config) {
  if (config.regions.empty()) throw Error(ErrorCode::Config, "synthetic config needs at least one region");
  int total = 0;
  for (const auto& r : config.regions) {
    if (r.countries < 2)
      throw Error(ErrorCode::Config, "region '" + r.label + "' needs at least 2 countries");
    total += r.countries;
  }
  if (config.periods < 1) throw Error(ErrorCode::Config, "synthetic config needs at least one period");
  if (!(config.base_rate > 0.0)) throw Error(ErrorCode::Config, "base_rate must be positive");
  if (!(config.publication_rate > 0.0)) throw Error(ErrorCode::Config, "publication_rate must be positive");
  if (!(config.activity_spread >= 1.0)) throw Error(ErrorCode::Config, "activity_spread must be >= 1");
  if (config.period_length < 1) throw Error(ErrorCode::Config, "period_length must be >= 1");
  if (config.within_mix.size() != static_cast<std::size_t>(config.periods))
    throw Error(ErrorCode::Config, "within_mix needs one value per period");
  for (double m : config.within_mix)
    if (!(m >= 0.0 && m <= 1.0)) throw Error(ErrorCode::Config, "within_mix values must lie in [0, 1]");
  if (config.regions.size() == 1)
    for (double m : config.within_mix)
      if (m < 1.0)
        throw Error(ErrorCode::Config, "a single region cannot host cross-region collaborations (within_mix < 1)");
  if (!config.production_profile.empty() && config.production_profile.size() != static_cast<std::size_t>(total))
    throw Error(ErrorCode::Config, "production_profile needs one trend per country");
}

std::vector<int> region_membership(const SynthConfig& config) {
  std::vector<int> region_of;
  for (std::size_t r = 0; r < config.regions.size(); ++r)
    region_of.insert(region_of.end(), static_cast<std::size_t>(config.regions[r].countries), static_cast<int>(r));
  return region_of;
}

// Activities come first from the seeded stream so that they depend on the
// seed and country count only.
std::vector<double> draw_activity(const SynthConfig& config, std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> a(n);
  for (auto& x : a) x = std::exp(unit(rng) * std::log(config.activity_spread));
  return a;
}

// Sums of a_i a_j over ordered pairs i != j inside and across regions.
std::pair<double, double> pair_mass(const std::vector<double>& a, const std::vector<int>& region_of) {
  double within = 0, between = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i == j) continue;
      (region_of[i] == region_of[j] ? within : between) += a[i] * a[j];
    }
  return {within, between};
}

double trend_factor(ProductionTrend trend, int t, int periods) {
  if (periods < 2 || trend == ProductionTrend::Stable) return 1.0;
  const double x = static_cast<double>(t) / (periods - 1);
  return trend == ProductionTrend::Rising ? 0.5 + 1.5 * x : 2.0 - 1.5 * x;
}

std::string trend_name(ProductionTrend t) {
  switch (t) {
    case ProductionTrend::Stable: return "stable";
    case ProductionTrend::Rising: return "rising";
    case ProductionTrend::Falling: return "falling";
  }
  return "stable";
}

ProductionTrend parse_trend(const std::string& s) {
  if (s == "stable") return ProductionTrend::Stable;
  if (s == "rising") return ProductionTrend::Rising;
  if (s == "falling") return ProductionTrend::Falling;
  throw Error(ErrorCode::Config, "unknown production trend '" + s + "'");
}

std::string country_code(const std::string& region, int index) {
  std::string prefix;
  for (char c : region) {
    if (std::isalnum(static_cast<unsigned char>(c))) prefix.push_back(static_cast<char>(std::toupper(c)));
    if (prefix.size() == 2) break;
  }
  while (prefix.size() < 2) prefix.push_back('X');
  std::ostringstream code;
  code << prefix << (index < 10 ? "0" : "") << index;
  return code.str();
}

}  // namespace

double neutral_within_mix(const SynthConfig& config) {
  validate(config);
  const auto region_of = region_membership(config);
  Rng rng(config.seed);
  const auto a = draw_activity(config, region_of.size(), rng);
  const auto [within, between] = pair_mass(a, region_of);
  return within / (within + between);
}

SyntheticPanel generate_panel(const SynthConfig& config) {
  validate(config);
  const auto region_of = region_membership(config);
  const std::size_t n = region_of.size();
  Rng rng(config.seed);
  const auto a = draw_activity(config, n, rng);
  const auto [mass_in, mass_out] = pair_mass(a, region_of);

  std::vector<std::string> regions;
  for (const auto& r : config.regions) regions.push_back(r.label);
  std::vector<CountryRecord> countries;
  std::vector<int> index_in_region(config.regions.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& label = regions[region_of[i]];
    const int k = ++index_in_region[region_of[i]];
    countries.push_back({country_code(label, k), label + " " + std::to_string(k), label});
  }
  std::vector<PeriodSpec> periods;
  for (int t = 0; t < config.periods; ++t) {
    const int start = config.start_year + t * config.period_length;
    const int end = start + config.period_length - 1;
    periods.push_back({std::to_string(start) + "-" + std::to_string(end), start, end});
  }

  SyntheticPanel out{PanelDataset(regions, countries, periods, CountMatrix::Zero(static_cast<Eigen::Index>(n), config.periods),
                                  std::vector<CountMatrix>(static_cast<std::size_t>(config.periods),
                                                           CountMatrix::Zero(static_cast<Eigen::Index>(n),
                                                                             static_cast<Eigen::Index>(n)))),
                     {}, a, {}, {}};

  const double total_mass = mass_in + mass_out;
  CountMatrix publications(static_cast<Eigen::Index>(n), config.periods);
  std::vector<CountMatrix> collaborations;
  for (int t = 0; t < config.periods; ++t) {
    const double mix = config.within_mix[t];
    const double w_in = mix * total_mass / mass_in;
    const double w_out = mass_out > 0.0 ? (1.0 - mix) * total_mass / mass_out : 0.0;
    out.within_weight.push_back(w_in);
    out.between_weight.push_back(w_out);

    CountMatrix m = CountMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double mean = config.base_rate * a[i] * a[j] * (region_of[i] == region_of[j] ? w_in : w_out);
        if (!(mean > 0.0)) continue;
        std::poisson_distribution<long long> draw(mean);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = draw(rng);
      }
    collaborations.push_back(std::move(m));

    for (std::size_t i = 0; i < n; ++i) {
      const auto trend = config.production_profile.empty() ? ProductionTrend::Stable : config.production_profile[i];
      std::poisson_distribution<long long> draw(config.publication_rate * a[i] * trend_factor(trend, t, config.periods));
      publications(static_cast<Eigen::Index>(i), t) = draw(rng);
    }
    out.planted.push_back({region_of, periods[t].label});
  }
  out.dataset = PanelDataset(std::move(regions), std::move(countries), std::move(periods), std::move(publications),
                             std::move(collaborations));
  return out;
}

std::string synth_config_to_json(const SynthConfig& config) {
  json doc;
  doc["regions"] = json::array();
  for (const auto& r : config.regions) doc["regions"].push_back({{"label", r.label}, {"countries", r.countries}});
  doc["periods"] = config.periods;
  doc["base_rate"] = config.base_rate;
  doc["within_mix"] = config.within_mix;
  doc["production_profile"] = json::array();
  for (auto t : config.production_profile) doc["production_profile"].push_back(trend_name(t));
  doc["publication_rate"] = config.publication_rate;
  doc["activity_spread"] = config.activity_spread;
  doc["start_year"] = config.start_year;
  doc["period_length"] = config.period_length;
  doc["seed"] = config.seed;
  return doc.dump(2) + "\n";
}

SynthConfig synth_config_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    SynthConfig c;
    for (const auto& r : doc.at("regions"))
      c.regions.push_back({r.at("label").get<std::string>(), r.at("countries").get<int>()});
    c.periods = doc.value("periods", c.periods);
    c.base_rate = doc.value("base_rate", c.base_rate);
    if (doc.contains("within_mix")) {
      const auto& mix = doc.at("within_mix");
      if (mix.is_number())
        c.within_mix.assign(static_cast<std::size_t>(c.periods), mix.get<double>());
      else
        c.within_mix = mix.get<std::vector<double>>();
    }
    if (doc.contains("production_profile")) {
      const auto& prof = doc.at("production_profile");
      if (prof.is_string()) {
        int total = 0;
        for (const auto& r : c.regions) total += r.countries;
        c.production_profile.assign(static_cast<std::size_t>(total), parse_trend(prof.get<std::string>()));
      } else {
        for (const auto& t : prof) c.production_profile.push_back(parse_trend(t.get<std::string>()));
      }
    }
    c.publication_rate = doc.value("publication_rate", c.publication_rate);
    c.activity_spread = doc.value("activity_spread", c.activity_spread);
    c.start_year = doc.value("start_year", c.start_year);
    c.period_length = doc.value("period_length", c.period_length);
    c.seed = doc.value("seed", c.seed);
    validate(c);
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("synthetic config: ") + e.what());
  }
}

void write_synthetic_panel(const SyntheticPanel& panel, const std::filesystem::path& directory) {
  const auto& d = panel.dataset;
  std::ostringstream pubs, collabs, meta, planted;
  pubs << "year,country_code,count\n";
  collabs << "year,country_a,country_b,count\n";
  meta << "country_code,name,region\n";
  planted << "country,period,community\n";
  for (const auto& c : d.countries())
    meta << csv::quote_if_needed(c.code) << ',' << csv::quote_if_needed(c.name) << ','
         << csv::quote_if_needed(c.region) << '\n';
  for (std::size_t t = 0; t < d.n_periods(); ++t) {
    // Whole-period totals are written against the first year of the period.
    const int year = d.periods()[t].start_year;
    const auto& m = d.collaborations(t);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      pubs << year << ',' << d.countries()[i].code << ',' << d.publications()(i, static_cast<Eigen::Index>(t)) << '\n';
      for (Eigen::Index j = i + 1; j < m.cols(); ++j)
        if (m(i, j) > 0)
          collabs << year << ',' << d.countries()[i].code << ',' << d.countries()[j].code << ',' << m(i, j) << '\n';
    }
  }
  for (const auto& p : panel.planted)
    for (std::size_t i = 0; i < p.labels.size(); ++i)
      planted << d.countries()[i].code << ',' << p.period << ',' << p.labels[i] << '\n';

  json config;
  config["inputs"] = {{"publications", "publications.csv"},
                      {"collaborations", "collaborations.csv"},
                      {"metadata", "metadata.csv"}};
  config["regions"] = d.regions();
  config["periods"] = json::array();
  for (const auto& p : d.periods())
    config["periods"].push_back({{"label", p.label}, {"start_year", p.start_year}, {"end_year", p.end_year}});

  csv::write_text(directory / "publications.csv", pubs.str());
  csv::write_text(directory / "collaborations.csv", collabs.str());
  csv::write_text(directory / "metadata.csv", meta.str());
  csv::write_text(directory / "planted_partition.csv", planted.str());
  csv::write_text(directory / "pipeline.json", config.dump(2) + "\n");
}

}  // namespace regnet
