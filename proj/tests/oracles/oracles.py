"""Reference values for the unit and acceptance tests, computed with mpmath.

Run: python3 tests/oracles/oracles.py
The printed numbers are frozen as constants in the C++ tests.
"""
import mpmath as mp

mp.mp.dps = 40


def levy_constant(d, a):
    return a * 2 ** (a - 1) * mp.gamma((d + a) / 2) / (mp.pi ** (d / 2) * mp.gamma(1 - a / 2))


def gauss(t, z):
    return (4 * mp.pi * t) ** -0.5 * mp.e ** (-z * z / (4 * t))


def stable_density_1d(a, t, z):
    # convergent series in x = z t^{-1/a}: powers of x for a > 1, of 1/x for a < 1
    s = mp.mpf(t) ** (-1 / a)
    x = abs(z) * s
    if a > 1:
        terms = lambda k: (-1) ** k * mp.gamma((2 * k + 1) / a) / mp.factorial(2 * k) * x ** (2 * k)
        return s * mp.nsum(terms, [0, mp.inf]) / (mp.pi * a)
    terms = lambda k: (-1) ** (k + 1) * mp.gamma(a * k + 1) / mp.factorial(k) * mp.sin(mp.pi * a * k / 2) * x ** (-a * k - 1)
    return s * mp.nsum(terms, [1, mp.inf]) / mp.pi


def main():
    out = {}
    out["levy_d1_a1"] = levy_constant(1, mp.mpf(1))
    out["levy_d2_a1"] = levy_constant(2, mp.mpf(1))
    out["levy_d1_a1.5"] = levy_constant(1, mp.mpf(1.5))
    out["p_a2_t1_z0"] = gauss(1, 0)
    out["p_a1_t1_z0"] = 1 / mp.pi
    out["p_a1.5_t1_z0.7"] = stable_density_1d(mp.mpf(1.5), 1, mp.mpf(0.7))
    out["p_a0.5_t1_z3"] = stable_density_1d(mp.mpf(0.5), 1, mp.mpf(3))
    out["p_a1.2_t2_z5"] = stable_density_1d(mp.mpf(1.2), 2, mp.mpf(5))
    # torus, alpha = 2, M = 1, t = 0.5, x = y
    out["torus_fold_gauss"] = mp.nsum(lambda j: gauss(mp.mpf(0.5), j), [-mp.inf, mp.inf])
    out["torus_fourier_gauss"] = mp.nsum(lambda k: mp.e ** (-0.5 * (2 * mp.pi * k) ** 2), [-mp.inf, mp.inf])
    # nu_M, d = 1, alpha = 1, M = 4, x = 0, y = 1
    out["nu_M_a1_M4"] = mp.nsum(lambda j: abs(1 + 4 * j) ** -2, [-mp.inf, mp.inf]) / mp.pi
    # C1 = sum_j p(1, 0, j)
    out["C1_a2"] = mp.nsum(lambda j: gauss(1, j), [-mp.inf, mp.inf])
    out["C1_a1"] = mp.nsum(lambda j: 1 / (mp.pi * (1 + j * j)), [-mp.inf, mp.inf])
    out["coth_pi"] = mp.coth(mp.pi)
    out["C1_a1.5"] = mp.nsum(lambda k: mp.e ** (-(2 * mp.pi * abs(k)) ** 1.5), [-mp.inf, mp.inf])
    # Cauchy tail P(|Z| > 10)
    out["cauchy_tail_10"] = 1 - 2 / mp.pi * mp.atan(10)
    # periodization example
    e = mp.e
    out["gap_lhs"] = (1 + e ** -1 + e ** -2 + e ** -3) / 4
    out["gap_rhs"] = (1 + e ** -3) / 2
    # rate function, d = 1, alpha = 2
    lam = mp.pi ** 2 / 4
    out["rate_const_12"] = 2 ** (mp.mpf(2) / 3) * mp.mpf(1.5) * (mp.pi ** 2 / 2) ** (mp.mpf(1) / 3)
    f = lambda r: lam * r ** -2 + 2 * r
    rstar = mp.findroot(lambda r: mp.diff(f, r), 1.3)
    out["rate_min_12"] = f(rstar)
    out["rate_argmin_12"] = rstar
    # theory constants
    out["theory_const_bern"] = -mp.log(2) * mp.pi / 2
    out["laplace_synth_prefactor"] = -mp.mpf(4.05) * mp.log(2) ** (mp.mpf(2) / 3)
    # Weyl: omega_1 / (2 pi)
    out["weyl_d1"] = 1 / mp.pi
    for k, v in out.items():
        print(f"{k:24s} {mp.nstr(v, 20)}")


if __name__ == "__main__":
    main()
