#pragma once

namespace bda {

/// One classical fourth-order Runge-Kutta step for y' = f(y). Y needs
/// Y + Y and double * Y; this covers plain scalars as well as field pairs.
template <class Y, class F>
Y rk4(const Y& y, double dt, F&& f) {
    const Y k1 = f(y);
    const Y k2 = f(y + (0.5 * dt) * k1);
    const Y k3 = f(y + (0.5 * dt) * k2);
    const Y k4 = f(y + dt * k3);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace bda
