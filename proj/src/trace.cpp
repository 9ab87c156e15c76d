#include "bilevel/trace.hpp"

#include <cmath>
#include <cstdio>

namespace bilevel {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void Trace::set_meta(const std::string& key, const std::string& value) {
  metadata.emplace_back(key, value);
}
void Trace::set_meta(const std::string& key, double value) {
  metadata.emplace_back(key, format_double(value));
}
void Trace::set_meta(const std::string& key, std::uint64_t value) {
  metadata.emplace_back(key, std::to_string(value));
}

const std::string* Trace::find_meta(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return &v;
  return nullptr;
}

void Trace::write_csv(std::ostream& os, bool with_metadata) const {
  if (with_metadata)
    for (const auto& [k, v] : metadata) os << "# " << k << " = " << v << "\n";
  os << kCsvHeader << "\n";
  for (const TraceRow& r : rows) {
    os << r.iter << ',' << r.epoch << ',' << r.k << ',' << format_double(r.step_norm)
       << ',' << format_double(r.grad_est_norm) << ',' << r.counters.gc_f << ','
       << r.counters.gc_g << ',' << r.counters.jv_g << ',' << r.counters.hv_g << ','
       << r.counters.val_f << ',' << r.counters.val_g << ',' << r.counters.zo_phi << ','
       << r.wall_ns << "\n";
  }
}

bool semantically_equal(const Trace& a, const Trace& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const TraceRow& x = a.rows[i];
    const TraceRow& y = b.rows[i];
    if (x.iter != y.iter || x.epoch != y.epoch || x.k != y.k) return false;
    if (x.step_norm != y.step_norm || x.grad_est_norm != y.grad_est_norm) return false;
    const bool aux_same =
        (std::isnan(x.aux) && std::isnan(y.aux)) || x.aux == y.aux;
    if (!aux_same) return false;
    if (!(x.counters == y.counters)) return false;
  }
  return true;
}

}  // namespace bilevel
