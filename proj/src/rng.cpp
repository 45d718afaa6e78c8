#include "fptrack/rng.hpp"

#include <cmath>

namespace fptrack {

namespace {

// zigset from Marsaglia & Tsang (2000), 128 layers, double precision.
ZigguratTables make_tables() {
  ZigguratTables t{};
  const double m1 = 2147483648.0;  // 2^31
  double dn = 3.442619855899;
  double tn = dn;
  const double vn = 9.91256303526217e-3;

  const double q = vn / std::exp(-0.5 * dn * dn);
  t.kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
  t.kn[1] = 0;
  t.wn[0] = q / m1;
  t.wn[127] = dn / m1;
  t.fn[0] = 1.0;
  t.fn[127] = std::exp(-0.5 * dn * dn);
  for (int i = 126; i >= 1; --i) {
    dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
    t.kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
    tn = dn;
    t.fn[i] = std::exp(-0.5 * dn * dn);
    t.wn[i] = dn / m1;
  }
  return t;
}

}  // namespace

const ZigguratTables kZiggurat = make_tables();

double RandomStream::normal_slow(std::int32_t hz, std::uint32_t iz) noexcept {
  static constexpr double r = 3.442619855899;
  for (;;) {
    if (iz == 0) {  // base layer: exact exponential tail beyond r
      double x, y;
      do {
        x = -std::log(uniform_open()) / r;
        y = -std::log(uniform_open());
      } while (y + y < x * x);
      return hz > 0 ? r + x : -(r + x);
    }
    const double x = double(hz) * kZiggurat.wn[iz];
    if (kZiggurat.fn[iz] +
            uniform_open() * (kZiggurat.fn[iz - 1] - kZiggurat.fn[iz]) <
        std::exp(-0.5 * x * x)) {
      return x;
    }
    const std::uint32_t u = next_u32();
    hz = static_cast<std::int32_t>(u);
    iz = u & 127u;
    const std::uint32_t mag = hz >= 0 ? u : 0u - u;
    if (mag < kZiggurat.kn[iz]) return double(hz) * kZiggurat.wn[iz];
  }
}

}  // namespace fptrack
