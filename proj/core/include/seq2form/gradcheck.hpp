#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "seq2form/tensor.hpp"

namespace s2f {

// One named tensor entry for gradient checking.
struct NamedParam {
    std::string name;
    Tensor* tensor = nullptr;
};

struct GradCheckEntry {
    std::string name;
    double max_rel_err = 0.0;
    int worst_index = -1;
    double analytic = 0.0;
    double numeric = 0.0;
    bool pass = true;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_rel_err = 0.0;
    bool pass = true;

    std::string to_string() const;
};

// Central-difference gradient check. `f` must evaluate the scalar loss from
// the current parameter values AND leave each parameter's grad filled with
// the analytic gradient (i.e. f runs forward + backward). Parameters are
// perturbed in place and restored.
//
// Relative error per entry: |a - n| / max(1e-4, |a| + |n|).
// Throws std::runtime_error if f is non-deterministic (two baseline calls
// disagree bitwise).
GradCheckReport finite_diff_check(const std::function<double()>& f,
                                  const std::vector<NamedParam>& params,
                                  double step = 1e-5, double tol = 1e-3);

}  // namespace s2f
