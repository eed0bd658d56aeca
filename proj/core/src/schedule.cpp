#include "propflow/schedule.hpp"

#include "propflow/errors.hpp"

namespace propflow {

EpsilonSchedule make_schedule(int d, int n, double eps) {
    if (d < 1 || n < 1 || !(eps > 0.0 && eps < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "make_schedule requires d >= 1, n >= 1, eps in (0,1)");
    }
    EpsilonSchedule s;
    s.top_epsilon = eps;
    s.per_layer.assign(d, 0.0);
    s.per_layer[d - 1] = eps / d;
    for (int j = d - 1; j >= 1; --j) {
        s.per_layer[j - 1] = s.per_layer[j] / (2.0 * n);
    }
    s.eps_min = s.per_layer.front();
    s.eps_max = s.per_layer.back();
    if (s.eps_min < 1e-12) {
        throw Error(ErrorKind::UnderflowRisk,
                    "eps_1 = " + std::to_string(s.eps_min) + " is below 1e-12; instance too deep or wide");
    }
    return s;
}

EpsilonSchedule flat_schedule(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "epsilon must be in (0,1)");
    }
    EpsilonSchedule s;
    s.top_epsilon = eps;
    s.per_layer = {eps};
    s.eps_min = s.eps_max = eps;
    return s;
}

}  // namespace propflow
