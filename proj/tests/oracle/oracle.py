"""Arbitrary-precision reference values for the C++ tests.

Run with `python3 tests/oracle/oracle.py`; the printed values are frozen in
tests/cpp/oracle_values.hpp.
"""

import mpmath as mp

mp.mp.dps = 40

HBAR = mp.mpf("6.62607015e-34") / (2 * mp.pi)
C = mp.mpf(299792458)
KB = mp.mpf("1.380649e-23")
EV = mp.mpf("1.602176634e-19")


def s_l(l, x):
    return mp.sqrt(mp.pi * x / 2) * mp.besseli(l + mp.mpf(1) / 2, x)


def e_l(l, x):
    return mp.sqrt(2 * x / mp.pi) * mp.besselk(l + mp.mpf(1) / 2, x)


def j_l(l, x):
    return mp.sqrt(mp.pi * x / 2) * mp.besselj(l + mp.mpf(1) / 2, x)


def y_l(l, x):
    return mp.sqrt(mp.pi * x / 2) * mp.bessely(l + mp.mpf(1) / 2, x)


def d(f, l, x):
    return mp.diff(lambda t: f(l, t), x)


def shares(l, x, chi, Q):
    z = chi * x
    s, sp = s_l(l, x), d(s_l, l, x)
    ex, exp_ = e_l(l, x), d(e_l, l, x)
    ez, ezp = e_l(l, z), d(e_l, l, z)
    f_te = 1 + Q / x * s * ex
    f_tm = 1 - Q / x * sp * exp_
    te = s**2 * ez**2 / f_te
    tm = sp**2 * (ezp**2 + ez**2 * l * (l + 1) / z**2) / f_tm
    return te, tm


def fmt(v):
    return mp.nstr(v, 17, min_fixed=-3, max_fixed=4)


def riccati_tables():
    print("// ln s, ln e, s'/s, e'/e")
    for l in (1, 2, 5, 10, 30, 60, 100, 300, 1000):
        for x in ("1e-3", "0.1", "1", "10", "50"):
            x = mp.mpf(x)
            s, e = s_l(l, x), e_l(l, x)
            print(f"  {{{l}, {fmt(x)}, {fmt(mp.log(s))}, {fmt(mp.log(e))}, "
                  f"{fmt(d(s_l, l, x) / s)}, {fmt(d(e_l, l, x) / e)}}},")
    print("// J, Y (values)")
    for l in (1, 2, 5, 10, 30):
        for x in ("0.1", "1", "5", "20"):
            x = mp.mpf(x)
            print(f"  {{{l}, {fmt(x)}, {fmt(j_l(l, x))}, {fmt(y_l(l, x))}, "
                  f"{fmt(d(j_l, l, x))}, {fmt(d(y_l, l, x))}}},")


def mode_tables():
    print("// l, x, chi, Q, te, tm")
    for Q in ("0.0494", "5"):
        for l in (1, 3, 10):
            for x in ("0.05", "0.5", "3"):
                te, tm = shares(l, mp.mpf(x), mp.mpf("1.5"), mp.mpf(Q))
                print(f"  {{{l}, {x}, 1.5, {Q}, {fmt(te)}, {fmt(tm)}}},")
    print("// jost l=1 x=1 Q=1")
    x = mp.mpf(1)
    print(fmt(1 + s_l(1, x) * e_l(1, x)), fmt(1 - d(s_l, 1, x) * d(e_l, 1, x)))


def matsubara_free_energy(R, Q, omega_a, alpha0, dist, T, static):
    chi = 1 + dist / R
    Omega = Q / R
    xi1 = 2 * mp.pi * KB * T / HBAR
    total = mp.mpf(0)
    for n in range(0, 400):
        x = xi1 * n * R / C if n else mp.mpf("1e-12")
        alpha = alpha0 if (static or n == 0) else alpha0 / (1 + (xi1 * n / omega_a) ** 2)
        row = mp.mpf(0)
        for l in range(1, 400):
            te, tm = shares(l, x, chi, Q)
            term = (l + mp.mpf(1) / 2) * (te + tm)
            row += term
            if l > 5 and term < mp.mpf("1e-22") * row:
                break
        weight = mp.mpf(1) / 2 if n == 0 else 1
        total += weight * alpha * row
        if n > 3 and alpha * row < mp.mpf("1e-22") * abs(total):
            break
    return -2 * KB * T * Omega / (R + dist) ** 2 * total


def matsubara_table():
    R = mp.mpf("0.342e-9")
    omega_a = mp.mpf("11.65") * EV / HBAR
    alpha0 = mp.mpf("0.667e-30")
    print("// R, Q, d, T, static, F [J]")
    for Q, r, T, static in (("0.5", "1", "3e5", False), ("0.5", "1", "3e5", True), ("5", "2", "1e6", False)):
        dist = mp.mpf(r) * R
        F = matsubara_free_energy(R, mp.mpf(Q), omega_a, alpha0, dist, mp.mpf(T), static)
        print(f"  {{{Q}, {r}, {T}, {'true' if static else 'false'}, {fmt(F)}}},")


def eta0(tau):
    E = mp.exp(tau)
    return tau / 6 * (1 + 2 / (E - 1) + 2 * tau * E / (E - 1) ** 2 + tau**2 * E * (E + 1) / (E - 1) ** 3)


def eta1(tau):
    E = mp.exp(tau)
    elem = -tau / 6 * (1 + 2 / (E - 1) + 2 * tau * E / (E - 1) ** 2
                       + 3 * tau**2 * E * (E + 1) / (2 * (E - 1) ** 3)
                       + tau**3 * E * (E**2 + 4 * E + 1) / (2 * (E - 1) ** 4))
    i5 = mp.quad(lambda t: mp.cosh(t) / (t * mp.sinh(t) ** 5), [tau / 2, tau / 2 + 1, mp.inf])
    i3 = mp.quad(lambda t: mp.cosh(t) / (t * mp.sinh(t) ** 3), [tau / 2, tau / 2 + 1, mp.inf])
    return elem + tau**5 / 16 * i5 + tau**3 * (tau**2 - 4) / 48 * i3


def eta_table():
    print("// tau, eta0, eta1, eta0', eta1'")
    for tau in ("0.1", "0.5", "1", "3", "10"):
        t = mp.mpf(tau)
        print(f"  {{{tau}, {fmt(eta0(t))}, {fmt(eta1(t))}, {fmt(mp.diff(eta0, t))}, {fmt(mp.diff(eta1, t))}}},")


if __name__ == "__main__":
    riccati_tables()
    mode_tables()
    eta_table()
    matsubara_table()
