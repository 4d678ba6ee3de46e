#include "dk/trajectory.hpp"

#include <ostream>

namespace dk {

void write_records_csv(std::ostream& os, const std::vector<StepRecord>& records) {
  const auto old_precision = os.precision(17);
  os << "t,mass,min,max,entropy,dissipation_cum,l2\n";
  for (const auto& r : records) {
    os << r.t << ',' << r.mass << ',' << r.min << ',' << r.max << ',' << r.entropy << ','
       << r.dissipation_cum << ',' << r.l2 << '\n';
  }
  os.precision(old_precision);
}

}  // namespace dk
