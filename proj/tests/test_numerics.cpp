#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <sstream>

#include "statetrace/csv.hpp"
#include "statetrace/matrix.hpp"
#include "statetrace/random.hpp"
#include "statetrace/signal.hpp"

#include "helpers.hpp"

using namespace statetrace;

TEST_CASE("gaussian_kernel basic shape", "[numerics]") {
    const auto w = gaussian_kernel(1.0);
    REQUIRE(w.size() == 7);
    double sum = 0.0;
    for (double v : w) sum += v;
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));

    // center weight from evaluating exp(-x^2/2) at x = -3..3 by hand
    double hand_sum = 0.0;
    for (int x = -3; x <= 3; ++x) hand_sum += std::exp(-0.5 * x * x);
    REQUIRE(w[3] == Catch::Approx(1.0 / hand_sum).margin(1e-12));
    REQUIRE(w[3] == Catch::Approx(0.39905).margin(1e-5));
}

TEST_CASE("gaussian_kernel symmetry and monotonicity", "[numerics]") {
    RandomSource rng(71);
    for (int c = 0; c < 50; ++c) {
        const double std_samples = rng.uniform(0.05, 5.0);
        const auto w = gaussian_kernel(std_samples);
        REQUIRE(w.size() % 2 == 1);
        const std::size_t r = w.size() / 2;
        REQUIRE(r == static_cast<std::size_t>(std::max(1.0, std::ceil(3.0 * std_samples))));
        for (std::size_t k = 0; k <= r; ++k) {
            REQUIRE(w[r - k] == w[r + k]);  // exact: same exp argument
        }
        for (std::size_t k = r; k + 1 < w.size(); ++k) {
            REQUIRE(w[k] > 0.0);
            REQUIRE(w[k] > w[k + 1]);  // strictly decreasing from center
        }
    }
}

TEST_CASE("gaussian_kernel rejects non-positive std", "[numerics]") {
    REQUIRE_THROWS_AS(gaussian_kernel(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(gaussian_kernel(-1.0), std::invalid_argument);
}

TEST_CASE("convolve_same identity and constant", "[numerics]") {
    const std::vector<double> sig{0.3, -1.2, 4.0, 2.5};
    REQUIRE(convolve_same(sig, {1.0}) == sig);

    const std::vector<double> constant(11, 3.25);
    const auto out = convolve_same(constant, gaussian_kernel(1.7));
    for (double v : out) {
        REQUIRE(v == Catch::Approx(3.25).margin(1e-12));
    }
}

TEST_CASE("convolve_same reflect endpoints", "[numerics]") {
    const auto out = convolve_same({1, 2, 3, 4, 5}, {0.25, 0.5, 0.25});
    const std::vector<double> expected{1.25, 2.0, 3.0, 4.0, 4.75};
    REQUIRE(out.size() == expected.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        REQUIRE(out[i] == Catch::Approx(expected[i]).margin(1e-12));
    }
}

TEST_CASE("convolve_same rejects even kernels", "[numerics]") {
    REQUIRE_THROWS_AS(convolve_same({1.0, 2.0}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("convolve_same matches padded-array oracle", "[numerics]") {
    RandomSource base(2024);
    for (int c = 0; c < 100; ++c) {
        RandomSource rng = base.derive(static_cast<std::uint64_t>(c));
        const std::size_t n = static_cast<std::size_t>(rng.uniform_int(8, 64));
        const std::size_t radius = static_cast<std::size_t>(rng.uniform_int(1, 7));
        std::vector<double> sig(n), kernel(2 * radius + 1);
        for (double& v : sig) v = rng.uniform(-3.0, 3.0);
        for (double& v : kernel) v = rng.uniform(0.0, 1.0);
        const auto got = convolve_same(sig, kernel);
        const auto want = testutil::convolve_reflect_oracle(sig, kernel);
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(got[i] == Catch::Approx(want[i]).margin(1e-12));
        }
    }
}

TEST_CASE("RandomSource reproduces sequences bit-exactly", "[numerics]") {
    RandomSource a(123456789ULL);
    RandomSource b(123456789ULL);
    for (int i = 0; i < 2000; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
    RandomSource c(42), d(42);
    for (int i = 0; i < 2000; ++i) {
        REQUIRE(std::bit_cast<std::uint64_t>(c.normal()) ==
                std::bit_cast<std::uint64_t>(d.normal()));
    }
}

TEST_CASE("RandomSource uniform_int stays in range", "[numerics]") {
    RandomSource rng(7);
    for (int i = 0; i < 5000; ++i) {
        const auto v = rng.uniform_int(-3, 11);
        REQUIRE(v >= -3);
        REQUIRE(v <= 11);
    }
    REQUIRE_THROWS_AS(rng.uniform_int(2, 1), std::invalid_argument);
}

TEST_CASE("RandomSource normal moments", "[numerics]") {
    RandomSource rng(99);
    const int n = 40000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    REQUIRE(mean == Catch::Approx(0.0).margin(0.02));
    REQUIRE(var == Catch::Approx(1.0).margin(0.03));
}

TEST_CASE("RandomSource derived streams differ", "[numerics]") {
    RandomSource rng(5);
    RandomSource s0 = rng.derive(0);
    RandomSource s1 = rng.derive(1);
    REQUIRE(s0.next_u64() != s1.next_u64());
    // derivation ignores draw position
    RandomSource used(5);
    used.next_u64();
    RandomSource again = used.derive(0);
    RandomSource fresh = RandomSource(5).derive(0);
    REQUIRE(again.next_u64() == fresh.next_u64());
}

TEST_CASE("Matrix construction and invariants", "[numerics]") {
    auto m = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 2);
    REQUIRE(m(1, 0) == 3.0);
    REQUIRE(m.all_finite());
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_FALSE(m.all_finite());
    REQUIRE_THROWS_AS(Matrix::from_rows({{1.0}, {2.0, 3.0}}), std::invalid_argument);
}

TEST_CASE("TimeCourses CSV round-trip", "[numerics]") {
    TimeCourses tc;
    tc.subject_id = "s1";
    tc.data = Matrix(4, 3);
    RandomSource rng(11);
    for (auto& v : tc.data.values()) v = rng.normal();

    std::ostringstream out;
    write_time_courses_csv(out, tc);
    std::istringstream in(out.str());
    const TimeCourses back = read_time_courses_csv(in, "s1");
    REQUIRE(back.data == tc.data);
}

TEST_CASE("TimeCourses CSV accepts headerless input", "[numerics]") {
    std::istringstream in("1.5,2\n-0.25,3e-2\n4,5\n");
    const TimeCourses tc = read_time_courses_csv(in, "x");
    REQUIRE(tc.length() == 3);
    REQUIRE(tc.channels() == 2);
    REQUIRE(tc.data(1, 1) == 0.03);
}

TEST_CASE("TimeCourses CSV rejects malformed input", "[numerics]") {
    std::istringstream ragged("1,2\n3\n4,5\n");
    REQUIRE_THROWS_AS(read_time_courses_csv(ragged, "x"), ParseError);
    std::istringstream text_mid("1,2\n3,oops\n");
    REQUIRE_THROWS_AS(read_time_courses_csv(text_mid, "x"), ParseError);
    std::istringstream too_short("h1,h2\n1,2\n");
    REQUIRE_THROWS_AS(read_time_courses_csv(too_short, "x"), ParseError);
}
