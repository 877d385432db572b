#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "kschem/errors.hpp"

namespace kschem::quad {

namespace detail {
inline constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                  0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                  0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                  0.207784955007898467600689403773245, 0.0};
inline constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                  0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                  0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                  0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * wgk[7], g = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double d = hl * xgk[j];
        const double s = f(c - d) + f(c + d);
        k += wgk[j] * s;
        if (j % 2 == 1) g += wg[j / 2] * s;
    }
    return {a, b, k * hl, std::abs((k - g) * hl)};
}
}  // namespace detail

struct Result {
    double value;
    double error;
};

// Adaptive Gauss–Kronrod 7/15 with global error control.
template <class F>
Result integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
                 std::size_t max_panels = 20000) {
    if (a == b) return {0.0, 0.0};
    std::priority_queue<detail::Panel> heap;
    const std::size_t init = 8;
    double value = 0.0, error = 0.0;
    for (std::size_t i = 0; i < init; ++i) {
        const double lo = a + (b - a) * i / init, hi = (i + 1 == init) ? b : a + (b - a) * (i + 1) / init;
        detail::Panel p = detail::gk15(f, lo, hi);
        value += p.value;
        error += p.error;
        heap.push(p);
    }
    while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
        if (heap.size() >= max_panels) throw ToleranceNotReached("quadrature panel budget exhausted");
        detail::Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            heap.push(p);
            break;
        }
        detail::Panel l = detail::gk15(f, p.a, m), r = detail::gk15(f, m, p.b);
        value += l.value + r.value - p.value;
        error += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
    }
    // Re-sum to shed the drift of incremental updates.
    value = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error};
}

}  // namespace kschem::quad
