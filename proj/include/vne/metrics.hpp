#ifndef VNE_METRICS_HPP
#define VNE_METRICS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <stdexcept>
#include <vector>

#include "vne/network_model.hpp"

namespace vne {

class NonMonotonicTime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sum of CPU and bandwidth demands.
Units revenue(const VirtualNetworkRequest& vnr);

/// Sum of CPU demands plus each bandwidth demand times its path length.
Units cost(const VirtualNetworkRequest& vnr, const Embedding& emb);

/// Cumulative values at the end of one reporting window.
struct WindowRecord {
  double time = 0.0;
  Units cum_revenue = 0;
  Units cum_cost = 0;
  std::optional<double> avg_revenue;
  std::optional<double> rc_ratio;
  std::optional<double> acceptance_rate;
  std::int64_t arrivals = 0;
  std::int64_t acceptances = 0;

  friend bool operator==(const WindowRecord&, const WindowRecord&) = default;
};

/// Running totals over simulated time. Ratios with a zero denominator are
/// reported as nullopt rather than 0.
class MetricsLedger {
 public:
  void record_arrival() { ++arrivals_; }
  void record_acceptance(Units revenue, Units cost);

  Units total_revenue() const { return total_revenue_; }
  Units total_cost() const { return total_cost_; }
  std::int64_t arrivals() const { return arrivals_; }
  std::int64_t acceptances() const { return acceptances_; }
  /// Time of the latest snapshot.
  double horizon() const { return horizon_; }

  std::optional<double> rc_ratio() const;
  std::optional<double> acceptance_rate() const;
  /// Cumulative revenue divided by the horizon.
  std::optional<double> long_term_average_revenue() const;
  std::optional<double> long_term_average_revenue(double horizon) const;

  /// Throws NonMonotonicTime unless window_end is past the previous snapshot.
  const WindowRecord& snapshot_window(double window_end);

  const std::vector<WindowRecord>& window_series() const { return windows_; }

 private:
  Units total_revenue_ = 0;
  Units total_cost_ = 0;
  std::int64_t arrivals_ = 0;
  std::int64_t acceptances_ = 0;
  double horizon_ = 0.0;
  std::vector<WindowRecord> windows_;
};

/// Header: time,cum_revenue,cum_cost,avg_revenue,rc_ratio,acceptance_rate,
/// arrivals,acceptances. Absent ratios are written as empty fields.
void write_window_csv(std::ostream& out, const std::vector<WindowRecord>& rows);

/// Empty string for nullopt, otherwise shortest round-trip form.
std::string format_optional(const std::optional<double>& v);
std::string format_double(double v);

}  // namespace vne

#endif  // VNE_METRICS_HPP
