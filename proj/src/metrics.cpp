#include "vne/metrics.hpp"

#include <charconv>
#include <string>

namespace vne {

Units revenue(const VirtualNetworkRequest& vnr) {
  Units total = 0;
  for (const auto& n : vnr.nodes) total += n.cpu_demand;
  for (const auto& l : vnr.links) total += l.bw_demand;
  return total;
}

Units cost(const VirtualNetworkRequest& vnr, const Embedding& emb) {
  Units total = 0;
  for (const auto& n : vnr.nodes) total += n.cpu_demand;
  for (std::size_t i = 0; i < vnr.links.size(); ++i)
    total += vnr.links[i].bw_demand *
             static_cast<Units>(emb.link_assignment.at(i).size());
  return total;
}

void MetricsLedger::record_acceptance(Units revenue, Units cost) {
  total_revenue_ += revenue;
  total_cost_ += cost;
  ++acceptances_;
}

std::optional<double> MetricsLedger::rc_ratio() const {
  if (total_cost_ <= 0) return std::nullopt;
  return static_cast<double>(total_revenue_) / static_cast<double>(total_cost_);
}

std::optional<double> MetricsLedger::acceptance_rate() const {
  if (arrivals_ <= 0) return std::nullopt;
  return static_cast<double>(acceptances_) / static_cast<double>(arrivals_);
}

std::optional<double> MetricsLedger::long_term_average_revenue() const {
  return long_term_average_revenue(horizon_);
}

std::optional<double> MetricsLedger::long_term_average_revenue(
    double horizon) const {
  if (!(horizon > 0.0)) return std::nullopt;
  return static_cast<double>(total_revenue_) / horizon;
}

const WindowRecord& MetricsLedger::snapshot_window(double window_end) {
  if (!windows_.empty() && !(window_end > horizon_))
    throw NonMonotonicTime("window end " + format_double(window_end) +
                           " does not follow " + format_double(horizon_));
  horizon_ = window_end;
  WindowRecord rec;
  rec.time = window_end;
  rec.cum_revenue = total_revenue_;
  rec.cum_cost = total_cost_;
  rec.avg_revenue = long_term_average_revenue(window_end);
  rec.rc_ratio = rc_ratio();
  rec.acceptance_rate = acceptance_rate();
  rec.arrivals = arrivals_;
  rec.acceptances = acceptances_;
  windows_.push_back(rec);
  return windows_.back();
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

void write_window_csv(std::ostream& out,
                      const std::vector<WindowRecord>& rows) {
  out << "time,cum_revenue,cum_cost,avg_revenue,rc_ratio,acceptance_rate,"
         "arrivals,acceptances\n";
  for (const auto& r : rows) {
    out << format_double(r.time) << ',' << r.cum_revenue << ',' << r.cum_cost
        << ',' << format_optional(r.avg_revenue) << ','
        << format_optional(r.rc_ratio) << ','
        << format_optional(r.acceptance_rate) << ',' << r.arrivals << ','
        << r.acceptances << '\n';
  }
}

}  // namespace vne
