#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "seq2form/tensor.hpp"

using namespace s2f;

TEST_CASE("numel and shape_str") {
    CHECK(numel({3, 4}) == 12);
    CHECK(numel({}) == 1);
    CHECK(numel({7}) == 7);
    CHECK(shape_str({3, 4}) == "[3,4]");
}

TEST_CASE("constructors fill as documented") {
    Tensor z = Tensor::zeros({2, 3});
    CHECK(z.size() == 6);
    for (double v : z.values) CHECK(v == 0.0);

    Tensor f = Tensor::full({4}, -1.5);
    for (double v : f.values) CHECK(v == -1.5);

    SeededRng rng(3, 9);
    Tensor u = Tensor::uniform({100}, rng, -0.08, 0.08);
    for (double v : u.values) {
        CHECK(v >= -0.08);
        CHECK(v <= 0.08);
    }
}

TEST_CASE("2-D accessor is row-major") {
    Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK(t.at(0, 0) == 1);
    CHECK(t.at(0, 2) == 3);
    CHECK(t.at(1, 0) == 4);
    CHECK(t.at(1, 2) == 6);
}

TEST_CASE("grad slot lifecycle") {
    Tensor t({3});
    CHECK(!t.has_grad());
    t.ensure_grad();
    CHECK(t.has_grad());
    t.grad[1] = 5.0;
    t.zero_grad();
    CHECK(t.grad[1] == 0.0);
    t.drop_grad();
    CHECK(!t.has_grad());
}

TEST_CASE("softmax of [1, 2, 3] matches the closed form") {
    std::vector<double> in{1.0, 2.0, 3.0};
    std::vector<double> out = softmax(in);
    REQUIRE(out.size() == 3);
    // exp(k) / (e + e^2 + e^3) for k = 1..3
    CHECK(out[0] == doctest::Approx(0.09003057).epsilon(1e-5));
    CHECK(out[1] == doctest::Approx(0.24472847).epsilon(1e-5));
    CHECK(out[2] == doctest::Approx(0.66524096).epsilon(1e-5));
}

TEST_CASE("softmax normalizes and is shift invariant") {
    std::vector<double> in{-3.0, 0.5, 2.0, 2.0, -10.0};
    std::vector<double> a = softmax(in);
    CHECK(std::accumulate(a.begin(), a.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));

    for (double& v : in) v += 1234.5;
    std::vector<double> b = softmax(in);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("softmax survives large magnitudes") {
    std::vector<double> in{1000.0, 1000.0};
    std::vector<double> out = softmax(in);
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-12));
    std::vector<double> lo{-1000.0, 0.0};
    std::vector<double> out2 = softmax(lo);
    CHECK(out2[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("softmax rejects non-finite input") {
    std::vector<double> in{1.0, std::nan(""), 2.0};
    CHECK_THROWS(softmax(in));
    std::vector<double> inf{1.0, std::numeric_limits<double>::infinity()};
    CHECK_THROWS(softmax(inf));
}

TEST_CASE("logsumexp matches brute force and handles extremes") {
    std::vector<double> in{0.1, -0.7, 2.5};
    double brute = std::log(std::exp(0.1) + std::exp(-0.7) + std::exp(2.5));
    CHECK(logsumexp(in) == doctest::Approx(brute).epsilon(1e-12));

    std::vector<double> big{10000.0, 10000.0};
    CHECK(logsumexp(big) == doctest::Approx(10000.0 + std::log(2.0)).epsilon(1e-12));

    std::vector<double> one{-5.0};
    CHECK(logsumexp(one) == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("logsumexp dominates its max") {
    std::vector<double> in{3.0, -1.0, 0.0};
    CHECK(logsumexp(in) >= 3.0);
    CHECK(logsumexp(in) <= 3.0 + std::log(3.0));
}
