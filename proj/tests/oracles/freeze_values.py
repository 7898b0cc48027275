"""Reference values frozen into the C++ tests.

Each value is computed from an independent route (mpmath quadrature of an
integral representation) and cross-checked against mpmath's closed-form
implementation where one exists. Run with: python3 freeze_values.py
"""
from mpmath import mp, mpf, quad, gamma, hyp2f1, exp, log, sqrt, npdf, ncdf, inf

mp.dps = 40


def euler_2f1(a, b, c, x):
    # Euler integral, valid for c > b > 0.
    # t = u^(1/b) absorbs the t^(b-1) endpoint singularity.
    pref = gamma(c) / (gamma(b) * gamma(c - b)) / b
    def integrand(u):
        t = u ** (1 / b)
        return (1 - t) ** (c - b - 1) * (1 - x * t) ** (-a)
    return pref * quad(integrand, [0, 0.5, 1])


def kernel(h, t, s):
    a, b, c = h - mpf(1) / 2, mpf(1) / 2 - h, h + mpf(1) / 2
    # use the positive one of (a, b) as the Euler integral's b
    lo, hi = (a, b) if b > 0 else (b, a)
    return (t - s) ** (h - mpf(1) / 2) / gamma(c) * euler_2f1(lo, hi, c, 1 - t / s)


def call_plus_binary_density(s0, k, r, sigma, t):
    # E[e^{-rT}((S_T-K)^+ + 1{S_T>K})] by quadrature over the standard normal.
    zstar = (log(mpf(k) / s0) - (r - sigma ** 2 / 2) * t) / (sigma * sqrt(t))
    def payoff(z):
        st = s0 * exp((r - sigma ** 2 / 2) * t + sigma * sqrt(t) * z)
        return (st - k + 1) * npdf(z)
    return exp(-r * t) * quad(payoff, [zstar, zstar + 5, inf])


if __name__ == "__main__":
    print("2F1(0.2,0.3;1.2;-5) euler  =", euler_2f1(mpf("0.2"), mpf("0.3"), mpf("1.2"), -5))
    print("2F1(0.2,0.3;1.2;-5) mpmath =", hyp2f1(mpf("0.2"), mpf("0.3"), mpf("1.2"), -5))
    for x in ["-0.5", "0.3", "0.9", "-200"]:
        print(f"2F1(0.2,0.3;1.2;{x}) =", euler_2f1(mpf("0.2"), mpf("0.3"), mpf("1.2"), mpf(x)),
              hyp2f1(mpf("0.2"), mpf("0.3"), mpf("1.2"), mpf(x)))
    print("kernel(0.7,1,0.5) =", kernel(mpf("0.7"), 1, mpf("0.5")))
    print("kernel(0.3,1,0.5) =", kernel(mpf("0.3"), 1, mpf("0.5")))
    print("kernel(0.3,2,0.001) =", kernel(mpf("0.3"), 2, mpf("0.001")))
    print("kernel(0.9,1,1e-5) =", kernel(mpf("0.9"), 1, mpf("1e-5")))
    s0, k, r, sig, t = 1, 1, mpf("0.2"), mpf("0.2"), 1
    q = call_plus_binary_density(s0, k, r, sig, t)
    d1 = (log(mpf(s0) / k) + (r + sig ** 2 / 2) * t) / (sig * sqrt(t))
    d2 = d1 - sig * sqrt(t)
    cf = s0 * ncdf(d1) - k * exp(-r * t) * ncdf(d2) + exp(-r * t) * ncdf(d2)
    print("call+binary quadrature =", q)
    print("call+binary closed     =", cf)
