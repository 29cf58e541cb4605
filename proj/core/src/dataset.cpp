#include "ddelast/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <set>

#include "ddelast/csv.hpp"
#include "ddelast/errors.hpp"

namespace ddelast {

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kLinear: return "linear";
    case DatasetKind::kSigmoid: return "sigmoid";
    case DatasetKind::kCsv: return "csv";
    case DatasetKind::kNoisy: return "noisy";
    case DatasetKind::kUnsymmetric: return "unsymmetric";
    case DatasetKind::kSubset: return "subset";
  }
  return "unknown";
}

Dataset::Dataset(std::vector<DataPoint> points, Provenance provenance)
    : points_(std::move(points)), provenance_(std::move(provenance)) {
  require(!points_.empty(), ErrorCode::kInvalidArgument, "dataset must contain at least one point");
  for (const auto& p : points_) {
    require(std::isfinite(p.strain) && std::isfinite(p.stress), ErrorCode::kInvalidArgument,
            "dataset points must be finite");
  }
}

std::optional<std::size_t> Dataset::origin_index() const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].strain == 0.0 && points_[i].stress == 0.0) return i;
  }
  return std::nullopt;
}

double Dataset::max_abs_strain() const {
  double m = 0.0;
  for (const auto& p : points_) m = std::max(m, std::abs(p.strain));
  return m;
}

double Dataset::max_abs_stress() const {
  double m = 0.0;
  for (const auto& p : points_) m = std::max(m, std::abs(p.stress));
  return m;
}

double LawSpec::stress_at(double strain) const {
  switch (law) {
    case Law::kLinear: return scale * strain;
    case Law::kSigmoid: return scale * (2.0 / (1.0 + std::exp(-strain)) - 1.0);
  }
  return 0.0;
}

namespace {

void check_grid_args(std::size_t n_points, double strain_max) {
  require(n_points >= 3, ErrorCode::kInvalidArgument, "n_points must be at least 3");
  require(n_points % 2 == 1, ErrorCode::kInvalidArgument,
          "n_points must be odd so the symmetric grid contains the origin");
  require(strain_max > 0.0 && std::isfinite(strain_max), ErrorCode::kInvalidArgument,
          "strain_max must be positive");
}

// Mirrored points are built by negation so that the symmetry is exact in floating point.
std::vector<DataPoint> symmetric_grid(const LawSpec& spec) {
  const std::size_t half = (spec.n_points - 1) / 2;
  std::vector<DataPoint> positive;
  positive.reserve(half);
  for (std::size_t k = 1; k <= half; ++k) {
    const double e = spec.strain_max * static_cast<double>(k) / static_cast<double>(half);
    positive.push_back({e, spec.stress_at(e)});
  }
  std::vector<DataPoint> points;
  points.reserve(spec.n_points);
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) points.push_back({-it->strain, -it->stress});
  points.push_back({0.0, 0.0});
  points.insert(points.end(), positive.begin(), positive.end());
  return points;
}

Provenance law_provenance(const LawSpec& spec) {
  Provenance prov;
  prov.kind = spec.law == LawSpec::Law::kLinear ? DatasetKind::kLinear : DatasetKind::kSigmoid;
  prov.params[spec.law == LawSpec::Law::kLinear ? "modulus" : "max_stress"] = spec.scale;
  prov.params["n_points"] = static_cast<double>(spec.n_points);
  prov.params["strain_max"] = spec.strain_max;
  return prov;
}

// Standard normal pairs from mt19937_64 via Box-Muller; std::normal_distribution
// is implementation-defined and would break cross-platform reproducibility.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * kScale;  // (0, 1]
    const double u2 = static_cast<double>(rng_() >> 11) * kScale;          // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

Dataset generate_linear(double modulus, std::size_t n_points, double strain_max) {
  require(modulus > 0.0 && std::isfinite(modulus), ErrorCode::kInvalidArgument, "modulus must be positive");
  check_grid_args(n_points, strain_max);
  const LawSpec spec{LawSpec::Law::kLinear, modulus, n_points, strain_max};
  return Dataset(symmetric_grid(spec), law_provenance(spec));
}

Dataset generate_sigmoid(double max_stress, std::size_t n_points, double strain_max) {
  require(max_stress > 0.0 && std::isfinite(max_stress), ErrorCode::kInvalidArgument,
          "max_stress must be positive");
  check_grid_args(n_points, strain_max);
  const LawSpec spec{LawSpec::Law::kSigmoid, max_stress, n_points, strain_max};
  return Dataset(symmetric_grid(spec), law_provenance(spec));
}

Dataset generate(const LawSpec& spec) {
  return spec.law == LawSpec::Law::kLinear ? generate_linear(spec.scale, spec.n_points, spec.strain_max)
                                           : generate_sigmoid(spec.scale, spec.n_points, spec.strain_max);
}

Dataset make_unsymmetric(const LawSpec& spec, double fraction_positive) {
  require(fraction_positive > 0.0 && fraction_positive < 1.0, ErrorCode::kInvalidArgument,
          "fraction_positive must lie in (0, 1)");
  require(spec.scale > 0.0, ErrorCode::kInvalidArgument, "law scale must be positive");
  require(spec.strain_max > 0.0, ErrorCode::kInvalidArgument, "strain_max must be positive");
  const auto n = spec.n_points;
  const auto n_pos = static_cast<std::size_t>(std::llround(fraction_positive * static_cast<double>(n)));
  require(n_pos >= 2 && n_pos < n, ErrorCode::kInvalidArgument,
          "fraction_positive leaves one branch without points");
  const std::size_t n_neg = n - n_pos;

  std::vector<DataPoint> points;
  points.reserve(n);
  for (std::size_t k = n_neg; k >= 1; --k) {
    const double e = spec.strain_max * static_cast<double>(k) / static_cast<double>(n_neg);
    points.push_back({-e, -spec.stress_at(e)});
  }
  for (std::size_t k = 0; k < n_pos; ++k) {
    const double e = spec.strain_max * static_cast<double>(k) / static_cast<double>(n_pos - 1);
    points.push_back({e, spec.stress_at(e)});
  }

  Provenance prov = law_provenance(spec);
  prov.notes["law"] = to_string(prov.kind);
  prov.kind = DatasetKind::kUnsymmetric;
  prov.params["fraction_positive"] = fraction_positive;
  return Dataset(std::move(points), std::move(prov));
}

Dataset add_noise(const Dataset& data, double sigma, std::uint64_t seed) {
  require(sigma >= 0.0 && std::isfinite(sigma), ErrorCode::kInvalidArgument, "sigma must be non-negative");

  Provenance prov = data.provenance();
  prov.notes["base"] = to_string(prov.kind);
  prov.kind = DatasetKind::kNoisy;
  prov.params["sigma"] = sigma;
  prov.params["seed"] = static_cast<double>(seed);
  prov.notes["rng"] = "mt19937_64+box-muller";
  if (sigma == 0.0) {
    return Dataset(std::vector<DataPoint>(data.points().begin(), data.points().end()), std::move(prov));
  }

  auto [e_lo, e_hi] = std::pair{data[0].strain, data[0].strain};
  auto [s_lo, s_hi] = std::pair{data[0].stress, data[0].stress};
  for (const auto& p : data.points()) {
    e_lo = std::min(e_lo, p.strain);
    e_hi = std::max(e_hi, p.strain);
    s_lo = std::min(s_lo, p.stress);
    s_hi = std::max(s_hi, p.stress);
  }
  const auto perturb = [](double x, double lo, double hi, double noise) {
    if (hi == lo) return x;
    const double normalised = 2.0 * (x - lo) / (hi - lo) - 1.0;
    return lo + (normalised + noise + 1.0) * 0.5 * (hi - lo);
  };

  GaussianSource gauss(seed);
  std::vector<DataPoint> out;
  out.reserve(data.size());
  for (const auto& p : data.points()) {
    const double de = sigma * gauss.next();
    const double ds = sigma * gauss.next();
    out.push_back({perturb(p.strain, e_lo, e_hi, de), perturb(p.stress, s_lo, s_hi, ds)});
  }
  return Dataset(std::move(out), std::move(prov));
}

ConsistencyReport check_consistency(std::span<const DataPoint> points) {
  require(points.size() >= 2, ErrorCode::kInvalidArgument, "consistency check needs at least two points");
  double max_e = 0.0;
  double max_s = 0.0;
  for (const auto& p : points) {
    max_e = std::max(max_e, std::abs(p.strain));
    max_s = std::max(max_s, std::abs(p.stress));
  }
  const double tol = 1e-12 * max_e * max_s;
  ConsistencyReport report;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double product = (points[i].stress - points[j].stress) * (points[i].strain - points[j].strain);
      if (product < -tol) report.violations.push_back({i, j, -product});
    }
  }
  report.consistent = report.violations.empty();
  return report;
}

ConsistencyReport check_consistency(const Dataset& data) { return check_consistency(data.points()); }

Dataset repair_with_originals(const Dataset& noisy, const Dataset& original) {
  require(noisy.size() == original.size(), ErrorCode::kInvalidArgument,
          "noisy and original datasets differ in length");
  std::vector<DataPoint> points(noisy.points().begin(), noisy.points().end());
  std::size_t replaced = 0;
  while (true) {
    const auto report = check_consistency(std::span<const DataPoint>(points));
    if (report.consistent) break;
    std::set<std::size_t> flagged;
    for (const auto& v : report.violations) {
      flagged.insert(v.first);
      flagged.insert(v.second);
    }
    bool changed = false;
    for (auto i : flagged) {
      if (points[i] != original[i]) {
        points[i] = original[i];
        ++replaced;
        changed = true;
      }
    }
    require(changed, ErrorCode::kInvalidArgument, "original dataset is itself inconsistent");
  }
  Provenance prov = noisy.provenance();
  prov.params["repaired_points"] = static_cast<double>(replaced);
  return Dataset(std::move(points), std::move(prov));
}

Dataset load_csv(const std::filesystem::path& path, const ColumnMapping& mapping) {
  const CsvTable table = read_csv(path);
  const auto strains = table.column(mapping.strain_column);
  std::vector<double> stresses;
  Provenance prov;
  prov.kind = DatasetKind::kCsv;
  prov.notes["path"] = path.string();
  if (mapping.force_column) {
    require(mapping.area.has_value() && *mapping.area > 0.0, ErrorCode::kConfig,
            "force column requires a positive cross-section area");
    for (double f : table.column(*mapping.force_column)) stresses.push_back(f / *mapping.area);
    prov.params["area"] = *mapping.area;
  } else {
    require(mapping.stress_column.has_value(), ErrorCode::kConfig, "no stress or force column configured");
    stresses = table.column(*mapping.stress_column);
  }
  std::vector<DataPoint> points;
  points.reserve(strains.size());
  for (std::size_t i = 0; i < strains.size(); ++i) points.push_back({strains[i], stresses[i]});
  require(!points.empty(), ErrorCode::kParse, path.string() + ": no data rows");
  return Dataset(std::move(points), std::move(prov));
}

std::vector<Dataset> split_subsets(const Dataset& data, std::span<const IndexRange> ranges, bool prepend_origin) {
  require(!ranges.empty(), ErrorCode::kInvalidArgument, "at least one index range is required");
  std::size_t previous_end = 0;
  for (const auto& r : ranges) {
    require(r.begin < r.end, ErrorCode::kInvalidArgument, "index ranges must be non-empty");
    require(r.end <= data.size(), ErrorCode::kInvalidArgument, "index range exceeds dataset size");
    require(r.begin >= previous_end, ErrorCode::kInvalidArgument, "index ranges must be ordered and disjoint");
    previous_end = r.end;
  }
  std::vector<Dataset> out;
  out.reserve(ranges.size());
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    std::vector<DataPoint> points;
    if (prepend_origin) points.push_back({0.0, 0.0});
    points.insert(points.end(), data.points().begin() + static_cast<std::ptrdiff_t>(ranges[k].begin),
                  data.points().begin() + static_cast<std::ptrdiff_t>(ranges[k].end));
    Provenance prov = data.provenance();
    prov.notes["parent"] = to_string(prov.kind);
    prov.kind = DatasetKind::kSubset;
    prov.params["subset"] = static_cast<double>(k);
    prov.params["begin"] = static_cast<double>(ranges[k].begin);
    prov.params["end"] = static_cast<double>(ranges[k].end);
    prov.params["origin_prepended"] = prepend_origin ? 1.0 : 0.0;
    out.emplace_back(std::move(points), std::move(prov));
  }
  return out;
}

double least_squares_modulus(const Dataset& data) {
  double es = 0.0;
  double ee = 0.0;
  for (const auto& p : data.points()) {
    es += p.strain * p.stress;
    ee += p.strain * p.strain;
  }
  require(ee > 0.0, ErrorCode::kInvalidArgument, "dataset has no nonzero strain; cannot derive c");
  const double c = es / ee;
  require(c > 0.0, ErrorCode::kInvalidArgument, "least-squares modulus of the dataset is not positive");
  return c;
}

void write_csv(const Dataset& data, std::ostream& out) {
  const auto& prov = data.provenance();
  out << "# kind: " << to_string(prov.kind) << '\n';
  for (const auto& [key, value] : prov.params) out << "# " << key << ": " << format_double(value) << '\n';
  for (const auto& [key, value] : prov.notes) out << "# " << key << ": " << value << '\n';
  out << "strain,stress\n";
  for (const auto& p : data.points()) out << format_double(p.strain) << ',' << format_double(p.stress) << '\n';
}

}  // namespace ddelast
