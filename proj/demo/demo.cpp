// Walks through the library on the smallest interesting case: two streams
// over F_2. Prints a profile, the exact drain distribution after a few
// columns, and how close it already is to the stationary gamma values.

#include <iostream>

#include "bdm/bdm.hpp"

int main() {
  using namespace bdm;

  const Multisequence seq(FieldSpec(2), {{1, 0, 1, 1, 0, 0, 1, 0}, {0, 1, 1, 0, 1, 0, 0, 1}});
  const Profile p = profile(seq);
  std::cout << "column  L  d\n";
  for (std::size_t k = 0; k <= p.n; ++k)
    std::cout << "  " << k << "     " << p.column_lc[k] << "  " << p.deviation[k] << '\n';

  const std::int64_t n = 12;
  const auto mu = run_to_column(2, 2, n, 3 * n);
  const auto [T, t] = slot_of(3 * n, 2);
  std::cout << "\nafter " << n << " columns (slot T=" << T << ", t=" << t << ")\n";
  std::cout << "   d  exact mass            gamma\n";
  for (const auto& [d, m] : mass_by_drain(mu))
    std::cout << "  " << d << "  " << to_double(m) << "  " << to_double(gamma_closed({2, 2, T, t, d})) << '\n';

  const auto s = BdmState{{-5, 4, -4}, 2, 1, 2};
  std::cout << "\nclass of " << to_string(s) << " is " << class_of(s) << '\n';
  return 0;
}
