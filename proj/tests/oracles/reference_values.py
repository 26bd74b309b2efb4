"""Independent oracle for the frozen leading coefficients.

Run with python3; prints the values compiled into the catalogue.  The two
registered pairs reduce to low-dimensional integrals because the phase is
s * p_phi (resp. s * p) in canonical coordinates, so the transversal Hessian
has |det| = 1 and the critical set is {p_phi = 0, s = 0}.
"""
import mpmath as mp

mp.mp.dps = 30


def bump(t):
    t2 = t * t
    if t2 >= 1:
        return mp.mpf(0)
    return mp.e ** (1 - 1 / (1 - t2))


def circle_A():
    # a = chi(|m - q0| / 1) chi(|p - 0.5| / 2) chi(|s - 0.3| / 1) at p = s = 0
    q0 = (mp.cos(1), mp.sin(1))

    def f(th):
        return bump(mp.sqrt((mp.cos(th) - q0[0]) ** 2 + (mp.sin(th) - q0[1]) ** 2))

    # support: chord < 1  <=>  |th - 1| < 2 asin(1/2) = pi/3
    base = mp.quad(f, [1 - mp.pi / 3, 1, 1 + mp.pi / 3])
    return base * bump(mp.mpf("0.25")) * bump(mp.mpf("0.3"))


def sphere_B():
    # a = chi(|m - q0| / 1.6) chi(|p_theta| / 2) chi(0), integrated in d theta d phi d p_theta
    th0 = mp.mpf("1.3")
    q0 = (mp.sin(th0), 0, mp.cos(th0))
    r = mp.mpf("1.6")

    def inner(th):
        # chord^2 = 2 - 2 (sin th sin th0 cos phi + cos th cos th0)
        c = mp.cos(th) * mp.cos(th0)
        s = mp.sin(th) * mp.sin(th0)
        # support in phi: 2 - 2(s cos phi + c) < r^2
        lim = (2 - r * r - 2 * c) / (2 * s) if s > 0 else mp.mpf(2)
        if lim >= 1:
            return mp.mpf(0)
        pmax = mp.pi if lim <= -1 else mp.acos(lim)

        def g(ph):
            return bump(mp.sqrt(max(0, 2 - 2 * (s * mp.cos(ph) + c))) / r)

        return 2 * mp.quad(g, [0, pmax / 2, pmax])

    # support in theta: |th - th0| < 2 asin(0.8)
    a = 2 * mp.asin(r / 2)
    lo, hi = max(mp.mpf(0), th0 - a), min(mp.pi, th0 + a)
    base = mp.quad(inner, mp.linspace(lo, hi, 9))
    fiber = mp.quad(lambda t: bump(t / 2), [-2, 0, 2])
    return base * fiber


if __name__ == "__main__":
    print("circle_on_circle bump_A", mp.nstr(circle_A(), 17))
    print("circle_on_sphere bump_B", mp.nstr(sphere_B(), 17))
