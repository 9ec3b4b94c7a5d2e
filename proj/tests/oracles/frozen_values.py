"""Regenerates the high-precision reference values frozen in the C++ tests.

Run: python3 tests/oracles/frozen_values.py
"""
import mpmath as mp

mp.mp.dps = 40


def slab_energy(b, sigma, delta):
    e0 = mp.pi**2 / b**2
    f = lambda p: e0 - p**2 * mp.tan(delta * p / 2) ** 2 - (e0 + p**2) / (1 + sigma)
    hi = min(mp.pi * mp.sqrt(sigma) / b, mp.pi / delta) * (1 - mp.mpf(10) ** -12)
    p2 = mp.findroot(f, (mp.mpf(10) ** -20, hi), solver="anderson")
    p1 = p2 * mp.tan(delta * p2 / 2)
    return p2, p1, e0 - p1**2


def g2(x1, y1, x2, y2, b, terms=4000):
    dx = abs(x1 - x2)
    a1 = mp.pi * (y1 + b / 2) / b
    a2 = mp.pi * (y2 + b / 2) / b
    s = mp.mpf(0)
    for n in range(2, terms + 2):
        k = mp.sqrt(n * n - 1)
        s += mp.exp(-mp.pi * k * dx / b) / (mp.pi * k) * mp.sin(n * a1) * mp.sin(n * a2)
    return s


def mode_sum(dx, b):
    # closed-form sum of exp(-n u)/(pi n) plus a fast-decaying remainder
    u = mp.pi * dx / b
    q = mp.exp(-u)
    k = lambda n: mp.sqrt(n * n - 1)
    rest = mp.nsum(lambda n: mp.exp(-k(n) * u) / (mp.pi * k(n)) - mp.exp(-n * u) / (mp.pi * n),
                   [2, mp.inf])
    return (-mp.log(1 - q) - q) / mp.pi + rest


def projected_field_ib(A, B, delta, b):
    # sigma = A - B sin(pi y / b) on |x| < delta/2: only the n = 2 mode couples.
    k = mp.sqrt(3)
    kap = mp.pi * k / b
    c2 = B * b / 4
    pair = 2 * delta / kap - 2 * (1 - mp.exp(-kap * delta)) / kap**2
    return c2**2 * pair / (mp.pi * k)


def show(name, v):
    print(f"{name} = {mp.nstr(v, 20)}")


for b, s, d in [(1, 0.1, 0.5), (1, 0.02, 0.5), (2, 0.1, 1.0)]:
    p2, p1, e = slab_energy(mp.mpf(b), mp.mpf(s), mp.mpf(d))
    show(f"slab b={b} sigma={s} delta={d} p2", p2)
    show(f"slab b={b} sigma={s} delta={d} p1", p1)
    show(f"slab b={b} sigma={s} delta={d} E", e)

show("g2(0,0.25,0.5,0.25;b=1)", g2(0, mp.mpf("0.25"), mp.mpf("0.5"), mp.mpf("0.25"), 1))
show("g2(0,0.1,0.3,-0.2;b=1)", g2(0, mp.mpf("0.1"), mp.mpf("0.3"), mp.mpf("-0.2"), 1))
show("g2(0,0,0.2,0;b=1)", g2(0, 0, mp.mpf("0.2"), 0, 1))
show("g2(1,0.3,1.02,0.1;b=1)", g2(1, mp.mpf("0.3"), mp.mpf("1.02"), mp.mpf("0.1"), 1, terms=20000))
show("g2(0,0.5,1,0.25;b=2)", g2(0, mp.mpf("0.5"), 1, mp.mpf("0.25"), 2))
show("g2(0,0.25,10,0.25;b=1)", g2(0, mp.mpf("0.25"), 10, mp.mpf("0.25"), 1, terms=100))
show("mode_sum(1e-4;b=1)", mode_sum(mp.mpf("1e-4"), 1))
show("mode_sum(0.3;b=1)", mode_sum(mp.mpf("0.3"), 1))
show("I_B(A=0.1,B=0.05,delta=0.5,b=1)", projected_field_ib(mp.mpf("0.1"), mp.mpf("0.05"), mp.mpf("0.5"), 1))
show("polylog(2,0.3)", mp.polylog(2, mp.mpf("0.3")))
show("polylog(3,0.9)", mp.polylog(3, mp.mpf("0.9")))
show("polylog(2,0.999)", mp.polylog(2, mp.mpf("0.999")))
show("zeta(3)", mp.zeta(3))
show("zeta(5)", mp.zeta(5))
