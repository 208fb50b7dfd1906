#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "vicious/double_double.hpp"

using vicious::DoubleDouble;
using mp = boost::multiprecision::cpp_bin_float_50;

namespace {
mp to_mp(DoubleDouble a) { return mp(a.hi) + mp(a.lo); }
double rel(DoubleDouble a, const mp& ref) { return static_cast<double>(abs((to_mp(a) - ref) / ref)); }
}  // namespace

TEST(DoubleDouble, Arithmetic) {
    DoubleDouble a = DoubleDouble(1.0) / DoubleDouble(3.0);
    EXPECT_LT(rel(a, mp(1) / 3), 1e-31);
    DoubleDouble b = a * DoubleDouble(3.0) - DoubleDouble(1.0);
    EXPECT_LT(std::abs(b.hi), 1e-31);
    DoubleDouble c = DoubleDouble(1e16) + DoubleDouble(1.0) - DoubleDouble(1e16);
    EXPECT_EQ(double(c), 1.0);
}

TEST(DoubleDouble, Transcendentals) {
    for (double x : {-40.0, -3.7, -0.01, 0.5, 2.0, 30.0}) {
        DoubleDouble e = vicious::exp(DoubleDouble(x));
        EXPECT_LT(rel(e, boost::multiprecision::exp(mp(x))), 1e-30) << x;
    }
    for (double x : {1e-10, 0.3, 2.0, 7e5}) {
        DoubleDouble l = vicious::log(DoubleDouble(x));
        EXPECT_LT(rel(l, boost::multiprecision::log(mp(x))), 1e-30) << x;
    }
    DoubleDouble s = vicious::sqrt(DoubleDouble(2.0));
    EXPECT_LT(rel(s, boost::multiprecision::sqrt(mp(2))), 1e-31);
    EXPECT_LT(rel(DoubleDouble::pi(), boost::math::constants::pi<mp>()), 1e-31);
}

TEST(DoubleDouble, CancellationBeyondDouble) {
    // sum_{n} (-1)^n n exp(-n^2/8): strong cancellation, compare with 50-digit reference
    DoubleDouble acc(0.0);
    mp ref = 0;
    for (int n = 1; n < 60; ++n) {
        DoubleDouble t = vicious::exp(DoubleDouble(-double(n) * n / 8.0)) * DoubleDouble(double(n));
        mp tr = boost::multiprecision::exp(mp(-n * n) / 8) * n;
        if (n % 2) acc -= t, ref -= tr;
        else acc += t, ref += tr;
    }
    EXPECT_LT(rel(acc, ref), 1e-24);
}
