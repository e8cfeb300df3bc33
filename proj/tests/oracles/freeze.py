"""Independent high-precision reference values for the frozen constants in the unit tests.

Kernels use the Laplace representation E_a(-k^a) = int_0^inf exp(-k r) K_a(r) dr, whose
Fourier inversion gives X_a(y) = int K_a(r) r / (pi (r^2 + y^2)) dr without oscillation.
Mittag-Leffler and Wright functions are summed as power series in 100-digit arithmetic.
Run: python3 tests/oracles/freeze.py
"""
from mpmath import mp, mpf, gamma, rgamma, quad, pi, sin, cos, log, inf, nsum, factorial

mp.dps = 100


def ml(beta, mu, z, terms=6000):
    s = mpf(0)
    for n in range(terms):
        t = mpf(z) ** n * rgamma(beta * n + mu)
        s += t
        if n > 10 and abs(t) < mpf(10) ** (-60):
            break
    return s


def wright(lam, mu, z, terms=3000):
    with mp.workdps(max(mp.dps, 90)):
        return +_wright(lam, mu, z, terms)


def _wright(lam, mu, z, terms):
    # Some terms vanish at poles of Gamma; stop only after a run of small nonzero terms.
    s, small = mpf(0), 0
    for n in range(terms):
        t = mpf(z) ** n / factorial(n) * rgamma(lam * n + mu)
        s += t
        if t != 0:
            small = small + 1 if abs(t) < mpf(10) ** (-60) else 0
        if small >= 3:
            break
    return s


def M(g, z):
    return wright(-g, 1 - g, -z)


def N(g, z):
    return wright(-g, 2 - g, -z)


def K(a, r):
    return sin(a * pi) / pi * r ** (a - 1) / (r ** (2 * a) + 2 * r ** a * cos(a * pi) + 1)


# For a <= 1 the Laplace kernel is nonnegative and gives an independent path; for 1 < a < 2
# E_a(-k^a) is not completely monotone and the closed form is used, checked by its cosine transform.
def X_closed(a, y):
    return sin(a * pi / 2) / pi * y ** (a - 1) / (1 + 2 * y ** a * cos(a * pi / 2) + y ** (2 * a))


def X(a, y):
    if a <= 1:
        return quad(lambda r: K(a, r) * r / (pi * (r * r + y * y)), [0, 1, inf])
    return X_closed(a, y)


def Y(a, y):
    if a <= 1:
        return quad(lambda r: K(a, r) * log(1 + r * r / (y * y)) / (2 * pi * r), [0, 1, inf])
    return quad(lambda z: X_closed(a, z) / z, [y, max(y, 1), inf])


def Xd1(a, y):
    if a <= 1:
        return quad(lambda r: -K(a, r) * 2 * r * y / (pi * (r * r + y * y) ** 2), [0, 1, inf])
    return mp.diff(lambda u: X_closed(a, u), y)


def Z(a, y):
    return y ** (3 - a) * (-Xd1(a, y) / (2 * pi * y))


def xi_cut(g):
    # M_g(xi) ~ exp(-(1-g) (g^g xi)^(1/(1-g))); beyond this it is below e^-80.
    return (80 / (1 - g)) ** (1 - g) / g ** g


def xi_nodes(g):
    c = xi_cut(g)
    return [0, 1] + [1 + (c - 1) * k / 4 for k in range(1, 5)]


def G1(beta, alpha, x, which):
    g = mpf(beta) / alpha
    w = M if which == "G" else N
    return quad(lambda xi: w(g, xi) * X(alpha, x / xi) / xi, xi_nodes(g))


def G3(beta, alpha, r, which):
    g = mpf(beta) / alpha
    w = M if which == "G" else N
    # -d/dr of X(r/xi)/xi over 2 pi r
    return quad(lambda xi: w(g, xi) * (-Xd1(alpha, r / xi)) / (xi * xi) / (2 * pi * r), xi_nodes(g))


def show(name, v):
    print(f"{name:40s} {mp.nstr(v, 17, min_fixed=-400, max_fixed=400)}")


if __name__ == "__main__":
    mp.dps = 40
    for z in [mpf("0.3") + 50j, mpf("-2.5") + mpf("0.7") * 1j, mpf("0.5") + 200j]:
        v = gamma(z)
        show(f"gamma({z})", v.real)
        show(f"   imag", v.imag)
    mp.dps = 100
    for b, m, z in [(1.5, 1, -3), (1.5, 1, -10), (0.8, 1, -5), (1.2, 2, -7), (1.8, 1, -30), (0.5, 1, -2),
                    (0.6, 1, -45), (1.5, 2, -20)]:
        mp.dps = 400 if b < 1 else 100  # the series for beta < 1 cancels through e^(|z|^(1/beta))
        show(f"E_{b},{m}({z})", ml(mpf(b), mpf(m), z))
    mp.dps = 30
    for a in ["1.5", "1.9"]:
        a = mpf(a)
        ft = 2 * mp.quadosc(lambda y: X_closed(a, y) * cos(y), [0, inf], omega=1)
        print(f"check: cosine transform of X_{mp.nstr(a, 3)} at k=1 minus E_a(-1): {mp.nstr(ft - ml(a, 1, -1), 3)}")
    mp.dps = 100
    for g, z in [(mpf(1) / 3, 1), (mpf(2) / 3, "2.5"), (mpf("0.25"), 3), (mpf("0.8"), "1.2")]:
        show(f"M_{mp.nstr(g,6)}({z})", M(g, mpf(z)))
        show(f"N_{mp.nstr(g,6)}({z})", N(g, mpf(z)))
    mp.dps = 30
    for a in ["0.5", "1.2", "1.9"]:
        for y in ["0.3", "2"]:
            show(f"X_{a}({y})", X(mpf(a), mpf(y)))
            show(f"Y_{a}({y})", Y(mpf(a), mpf(y)))
            show(f"Z_{a}({y})", Z(mpf(a), mpf(y)))
    mp.dps = 25
    for b, a, x in [("1.2", "1.6", "0.5"), ("1.2", "1.6", "1.5"), ("1.3", "1.9", "0.8")]:
        for w in ["G", "H"]:
            show(f"G1 {w} ({b},{a}) x={x}", G1(mpf(b), mpf(a), mpf(x), w))
    for w in ["G", "H"]:
        show(f"G3 {w} (1.2,1.6) r=0.7", G3(mpf("1.2"), mpf("1.6"), mpf("0.7"), w))
