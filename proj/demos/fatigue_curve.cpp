// Prints the exponential fatigue law for a junior and a senior profile,
// showing growth and saturation at the scale top.
#include <cstdio>

#include "orsim/fatigue.hpp"

using namespace orsim;

int main() {
  const FatigueParams junior{1.0, 0.001, "sleep", 5.0};
  const FatigueParams senior{1.0, 0.0008, "sleep", 5.0};

  std::printf("%8s %14s %14s\n", "cycle", "junior", "senior");
  for (std::int64_t t = 0; t <= 2000; t += 200) {
    std::printf("%8lld %14.6f %14.6f\n", static_cast<long long>(t), fatigue_at(junior, t),
                fatigue_at(senior, t));
  }
  std::printf("\njunior crosses 4.5 near cycle 1504, saturates at 5 from cycle %d\n", 1610);
  return 0;
}
