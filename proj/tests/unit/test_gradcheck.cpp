#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "seq2form/gradcheck.hpp"
#include "seq2form/rng.hpp"
#include "seq2form/tape.hpp"

using namespace s2f;

TEST_CASE("passes a correct analytic gradient") {
    Tensor w({3}, {0.2, -0.5, 1.1});
    Tensor x({3}, {1.0, 2.0, -1.0});
    auto f = [&]() {
        Tape t;
        Var l = t.logsumexp(t.mul(t.param(w), t.input(x)));
        t.backward_from(l);
        return t.scalar(l);
    };
    GradCheckReport rep = finite_diff_check(f, {{"w", &w}});
    CHECK(rep.pass);
    CHECK(rep.max_rel_err < 1e-3);
    CHECK(rep.to_string().find("PASS") != std::string::npos);
}

TEST_CASE("negative control: a deliberately wrong gradient fails and is named") {
    Tensor good({2}, {0.3, -0.4});
    Tensor bugged({2}, {0.7, 0.1});
    auto f = [&]() {
        Tape t;
        Var l = t.sum(t.mul(t.param(good), t.param(bugged)));
        t.backward_from(l);
        // sabotage: double one tensor's analytic gradient after backward
        for (double& g : bugged.grad) g *= 2.0;
        return t.scalar(l);
    };
    GradCheckReport rep = finite_diff_check(f, {{"good", &good}, {"bugged", &bugged}});
    CHECK(!rep.pass);
    bool good_ok = false, bugged_bad = false;
    for (const auto& e : rep.entries) {
        if (e.name == "good") good_ok = e.pass;
        if (e.name == "bugged") bugged_bad = !e.pass;
    }
    CHECK(good_ok);
    CHECK(bugged_bad);
    CHECK(rep.to_string().find("FAIL bugged") != std::string::npos);
}

TEST_CASE("parameters are restored after the check") {
    Tensor w({2}, {1.5, -2.5});
    std::vector<double> before = w.values;
    auto f = [&]() {
        Tape t;
        Var l = t.sum(t.tanh(t.param(w)));
        t.backward_from(l);
        return t.scalar(l);
    };
    finite_diff_check(f, {{"w", &w}});
    CHECK(w.values == before);
}

TEST_CASE("non-deterministic objective is rejected") {
    Tensor w({1}, {1.0});
    SeededRng noise(1);
    auto f = [&]() {
        Tape t;
        Var l = t.sum(t.param(w));
        t.backward_from(l);
        return t.scalar(l) + noise.uniform01() * 1e-9;
    };
    CHECK_THROWS_WITH_AS(finite_diff_check(f, {{"w", &w}}),
                         doctest::Contains("non-deterministic"), std::runtime_error);
}

TEST_CASE("step size outside [1e-7, 1e-3] is rejected") {
    Tensor w({1}, {1.0});
    auto f = [&]() {
        Tape t;
        Var l = t.sum(t.param(w));
        t.backward_from(l);
        return t.scalar(l);
    };
    CHECK_THROWS(finite_diff_check(f, {{"w", &w}}, 1e-2));
    CHECK_THROWS(finite_diff_check(f, {{"w", &w}}, 1e-8));
}

TEST_CASE("relative error uses the 1e-4 floor near zero") {
    // loss = w[0]^3 at w = 0: analytic and numeric are both ~0; floor keeps
    // the ratio finite and the check passing.
    Tensor w({1}, {0.0});
    auto f = [&]() {
        Tape t;
        Var v = t.param(w);
        Var l = t.sum(t.mul(t.mul(v, v), v));
        t.backward_from(l);
        return t.scalar(l);
    };
    GradCheckReport rep = finite_diff_check(f, {{"w", &w}});
    CHECK(rep.pass);
}
