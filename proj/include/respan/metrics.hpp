#pragma once

// Fidelity and savings metrics of the two-stage method against the full
// benchmark: site reduction share, screening accuracy, geographic matching of
// misidentified sites, capacity correlation, cost error and size deltas.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "respan/pipeline.hpp"
#include "respan/screening.hpp"
#include "respan/system_model.hpp"

namespace respan {

inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

/// Share of candidate sites of `tech` discarded by screening. Throws
/// std::invalid_argument when the instance has no site of that tech.
double gamma(const SystemInstance& inst, const ScreeningResult& screening, const std::string& tech);

/// |site ∩ flp| / |flp|; nullopt when `flp_sites` is empty.
std::optional<double> alpha(const std::set<std::string>& flp_sites, const std::set<std::string>& site_sites);

struct SitePoint {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
};

struct MatchedPair {
  std::string flp_site;
  std::string matched_site;
  double km = 0.0;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;
  std::vector<std::string> unmatched_flp;
  std::vector<std::string> unmatched_site;
};

/// Greedy matching: FLP sites in ascending id order each take the nearest
/// still-unpaired site from `exclusive` (ties: smaller id). Paired sites are
/// never reused.
MatchResult match_sites(std::vector<SitePoint> unidentified, std::vector<SitePoint> exclusive);

/// (rlp - flp) / flp. Throws std::invalid_argument unless flp > 0.
double tsce(double flp_objective, double rlp_objective);

struct SizeDeltas {
  double variables = 0.0;  // percent reductions relative to the FLP
  double constraints = 0.0;
  double nonzeros = 0.0;
  double pmr = 0.0;
  double srt = 0.0;
};

/// 100 (1 - rlp/flp) for sizes; PMR uses the larger of the SITE and RLP
/// peaks, SRT the sum of their solve times.
SizeDeltas size_deltas(const RunRecord& flp, const RunRecord& rlp, const RunRecord& site);

/// Installed (kappa0 + K) capacity threshold for "selected" sites.
inline constexpr double kSelectionMw = 1.0;

/// Site ids with kappa0 + K >= threshold in `design`.
std::set<std::string> selected_sites(const SystemInstance& inst, const SolvedDesign& design,
                                     const std::string& tech, double threshold = kSelectionMw);

/// Site ids retained by screening for `tech`.
std::set<std::string> retained_sites(const SystemInstance& inst, const ScreeningResult& screening,
                                     const std::string& tech);

struct CapacityPair {
  std::string flp_site;
  std::string rlp_site;
  double flp_mw = 0.0;
  double rlp_mw = 0.0;
  bool common = false;
};

struct TechComparison {
  std::string tech;
  std::size_t candidates = 0;
  std::size_t retained = 0;
  std::size_t flp_selected = 0;
  double gamma = 0.0;
  std::optional<double> alpha;
  std::vector<MatchedPair> matching;  // common sites at 0 km, then greedy pairs
  std::vector<std::string> unmatched_flp;
  std::vector<CapacityPair> capacity_pairs;
  std::optional<double> distance_p95_km;
  std::optional<double> distance_max_km;
};

struct CapacityDelta {
  std::string key;   // technology tag, or LINE_AC / LINE_DC (MW km)
  double flp = 0.0;
  double rlp = 0.0;
  double diff = 0.0;
  std::optional<double> pct;
};

struct ComparisonReport {
  std::vector<TechComparison> techs;
  std::optional<double> capacity_pearson;
  double tsce = 0.0;
  double flp_objective = 0.0;
  double rlp_objective = 0.0;
  SizeDeltas deltas;
  std::vector<CapacityDelta> capacity_deltas;
};

/// Full comparison of an SM run (screening + RLP design) with an FLP run on
/// the same instance.
ComparisonReport compare_runs(const SystemInstance& inst, const RunRecord& flp, const RunRecord& site,
                              const RunRecord& rlp);

/// Empirical CDF points (sorted value, cumulative fraction).
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

/// Linear-interpolated percentile (q in [0,100]) of `values`.
double percentile(std::vector<double> values, double q);

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace respan
