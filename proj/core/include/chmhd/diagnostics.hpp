#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chmhd/schemes.hpp"

namespace chmhd {

struct ErrorNorms {
  double l2_phi = 0.0;
  double h1semi_phi = 0.0;
  double l2_v = 0.0;
  double h1semi_v = 0.0;
  double l2_b = 0.0;
  double h1semi_b = 0.0;
  double l2_p = 0.0;

  static constexpr std::array<const char*, 7> names{"l2_phi", "h1semi_phi", "l2_v", "h1semi_v",
                                                    "l2_b",   "h1semi_b",   "l2_p"};
  std::array<double, 7> values() const noexcept {
    return {l2_phi, h1semi_phi, l2_v, h1semi_v, l2_b, h1semi_b, l2_p};
  }
};

/// Exact closures compared against a State. Empty members are skipped and
/// leave the corresponding norms at zero.
struct ExactFields {
  PointFn phi;
  PointFn u;
  PointFn v;
  PointFn p;
  PointFn b1;
  PointFn b2;
};

/// L2 norms by midpoint quadrature at each field's own sample points and H1
/// seminorms from neighbour differences of the error. Velocity is compared
/// on interior faces, pressure after removing the mean of both fields.
ErrorNorms error_norms(const State& s, const ExactFields& exact, double t);

struct RateRow {
  double h = 0.0;
  ErrorNorms errors;
  /// log2(e_{2h} / e_h) per norm; empty on the first row.
  std::optional<std::array<double, 7>> rates;
};

/// Throws ConfigError unless consecutive h values halve.
std::vector<RateRow> rate_table(const std::vector<std::pair<double, ErrorNorms>>& rows);

void write_rate_table(std::ostream& os, const std::vector<RateRow>& table);

struct DiagnosticsRow {
  long k = 0;
  double t = 0.0;
  double e_total = 0.0;
  double e_kin = 0.0;
  double e_mag = 0.0;
  double e_interf = 0.0;
  double e_pot = 0.0;
  double e_pgrad = 0.0;
  double mass = 0.0;
  double div_inf = 0.0;
  int iters_ch = 0;
  int iters_b = 0;
  int iters_v = 0;
  int iters_p = 0;

  bool operator==(const DiagnosticsRow&) const = default;
};

/// Append-only time series of per-step diagnostics.
class DiagnosticsRecord {
 public:
  static constexpr const char* header =
      "k,t,E_total,E_kin,E_mag,E_interf,E_pot,E_pgrad,mass,div_inf,iters_ch,iters_b,iters_v,iters_p";

  void record(const State& s, const EnergyReport& e, double mass, const StepBreakdown& bd);
  void append(const DiagnosticsRow& row) { rows_.push_back(row); }

  const std::vector<DiagnosticsRow>& rows() const noexcept { return rows_; }
  bool empty() const noexcept { return rows_.empty(); }
  std::size_t size() const noexcept { return rows_.size(); }

  /// Reals with 17 significant digits, so a read-back is exact.
  void write_csv(std::ostream& os) const;
  void write_csv(const std::string& path) const;
  static DiagnosticsRecord read_csv(std::istream& is);

 private:
  std::vector<DiagnosticsRow> rows_;
};

}  // namespace chmhd
