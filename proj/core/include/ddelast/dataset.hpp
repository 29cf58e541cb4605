#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ddelast {

/// One measured material state: axial strain (dimensionless) and axial stress (Pa).
struct DataPoint {
  double strain = 0.0;
  double stress = 0.0;

  friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

enum class DatasetKind { kLinear, kSigmoid, kCsv, kNoisy, kUnsymmetric, kSubset };

std::string to_string(DatasetKind kind);

/// How a dataset came to be. `params` holds the numeric generator arguments,
/// `notes` free-form tags such as the PRNG algorithm or the source file.
struct Provenance {
  DatasetKind kind = DatasetKind::kCsv;
  std::map<std::string, double> params;
  std::map<std::string, std::string> notes;
};

/// Immutable, ordered collection of stress-strain pairs. Indices are 0-based
/// and stable: assignments refer to points by position.
class Dataset {
 public:
  Dataset(std::vector<DataPoint> points, Provenance provenance);

  std::size_t size() const noexcept { return points_.size(); }
  const DataPoint& operator[](std::size_t i) const { return points_[i]; }
  std::span<const DataPoint> points() const noexcept { return points_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  /// Index of the exact point (0, 0) if present.
  std::optional<std::size_t> origin_index() const;

  double max_abs_strain() const;
  double max_abs_stress() const;

 private:
  std::vector<DataPoint> points_;
  Provenance provenance_;
};

/// Constitutive law used by the synthetic generators.
struct LawSpec {
  enum class Law { kLinear, kSigmoid };
  Law law = Law::kLinear;
  double scale = 1.0;  ///< Young's modulus E for kLinear, maximum stress S_max for kSigmoid (Pa)
  std::size_t n_points = 3;
  double strain_max = 1.0;

  double stress_at(double strain) const;
};

/// Points (e_k, E*e_k) on an equally spaced symmetric grid over [-strain_max, strain_max].
/// `n_points` must be odd so that the grid contains the origin.
Dataset generate_linear(double modulus, std::size_t n_points, double strain_max);

/// Points sampled from s(e) = S_max * (2 / (1 + exp(-e)) - 1) on the same grid as generate_linear.
Dataset generate_sigmoid(double max_stress, std::size_t n_points, double strain_max);

/// Dispatches on `spec.law` to one of the two symmetric generators.
Dataset generate(const LawSpec& spec);

/// round(fraction_positive * n) points on the non-negative strain branch (origin included),
/// the remainder on the negative branch. Both branches span the full strain range.
Dataset make_unsymmetric(const LawSpec& spec, double fraction_positive);

/// Strains and stresses are min-max normalised to [-1, 1], perturbed with independent
/// N(0, sigma^2) noise and mapped back. Deterministic for a fixed seed on every platform:
/// the normal variates come from mt19937_64 through a Box-Muller transform.
Dataset add_noise(const Dataset& data, double sigma, std::uint64_t seed);

struct ConsistencyViolation {
  std::size_t first = 0;
  std::size_t second = 0;
  double magnitude = 0.0;  ///< -(s_i - s_j)(e_i - e_j), positive for a violation
};

struct ConsistencyReport {
  bool consistent = true;
  std::vector<ConsistencyViolation> violations;
};

/// Pairwise monotonicity: (s_i - s_j)(e_i - e_j) >= -tol for every pair, with
/// tol = 1e-12 * max|s| * max|e|.
ConsistencyReport check_consistency(std::span<const DataPoint> points);
ConsistencyReport check_consistency(const Dataset& data);

/// Replaces every point that takes part in a monotonicity violation by its
/// pre-noise original, repeating until the result is consistent.
/// `noisy` and `original` must have the same length.
Dataset repair_with_originals(const Dataset& noisy, const Dataset& original);

/// Column names used when building a dataset from a CSV table. Stress comes either
/// from `stress_column` directly or from `force_column` divided by `area`.
struct ColumnMapping {
  std::string strain_column = "strain";
  std::optional<std::string> stress_column = "stress";
  std::optional<std::string> force_column;
  std::optional<double> area;
};

Dataset load_csv(const std::filesystem::path& path, const ColumnMapping& mapping);

/// Half-open row range [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Cuts `data` into consecutive sub-datasets. Ranges must be non-empty, ordered,
/// disjoint and within bounds. With `prepend_origin` every subset starts with (0, 0).
std::vector<Dataset> split_subsets(const Dataset& data, std::span<const IndexRange> ranges,
                                   bool prepend_origin = false);

/// Least-squares slope of the data through the origin, sum(e*s) / sum(e^2).
/// Used as the default objective weight c.
double least_squares_modulus(const Dataset& data);

/// Writes "strain,stress" rows preceded by '#'-prefixed provenance comments.
void write_csv(const Dataset& data, std::ostream& out);

}  // namespace ddelast
