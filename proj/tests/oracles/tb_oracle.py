"""Symbolic reference values for the builtin models.

Computes, in exact arithmetic, the eigenbasis normalization, c, nu and the
determinant d0 straight from the bilinear-form expressions (state directions
(phi(0), phi(-1)) fed to the second derivative of f), with no use of the
A1/A2/B1/B2 matrix shortcuts the library uses. Run with `python3 tb_oracle.py`.
"""
import sympy as sp

x1, x2, y1, y2, lam, mu = sp.symbols("x1 x2 y1 y2 lam mu")
X = sp.Matrix([x1, x2])
Y = sp.Matrix([y1, y2])


def predator_prey(r=1, a=1, m=1):
    D, K = lam, mu
    return sp.Matrix([
        r * x1 * (1 - x1 / K) - y1 * x2 / (a + y1**2),
        x2 * (m * y1 / (a + y1**2) - D),
    ])


def synthetic(qxx=1, qxy=1, unfold=2, lam_delay=1, mu_shift=1):
    h = sp.Rational(1, 2)
    q = sp.Rational(1, 4)
    return sp.Matrix([
        -h * x1 + 3 * q * x2 + h * y1 + q * y2 + lam_delay * lam * y1 + mu_shift * mu,
        h * x2 - h * y2 + lam + unfold * mu + mu * x2 + qxx * x1**2 + qxy * x1 * y2,
    ])


def analyse(F, point, lamv, muv, beta=0):
    subs = {x1: point[0], x2: point[1], y1: point[0], y2: point[1], lam: lamv, mu: muv}
    f1 = F.jacobian(X)
    f2 = F.jacobian(Y)
    f1v, f2v = f1.subs(subs), f2.subs(subs)
    J = f1v + f2v
    I = sp.eye(2)
    ns = J.nullspace()[0]
    phi1 = ns / sp.sqrt((ns.T * ns)[0])
    k = max(range(2), key=lambda i: (abs(phi1[i]), -i))
    if phi1[k] < 0:
        phi1 = -phi1
    ls = J.T.nullspace()[0]
    psi2hat = (ls / sp.sqrt((ls.T * ls)[0])).T
    k = max(range(2), key=lambda i: (abs(psi2hat[i]), -i))
    if psi2hat[k] < 0:
        psi2hat = -psi2hat

    # Unknowns: phi2 (2), psi1 (2), b (scale of psi2). Equations (2),(4),(5),(6) + pin.
    p = sp.Matrix(sp.symbols("p0 p1"))
    s = sp.Matrix(sp.symbols("s0 s1")).T
    b = sp.Symbol("b")
    psi2 = b * psi2hat
    eqs = []
    eqs += list(J * p - (f2v + I) * phi1)
    eqs += [(phi1.T * p)[0] - beta]
    eqs += list(s * J - psi2 * (f2v + I))
    e5 = (s * phi1 - sp.Rational(1, 2) * psi2 * f2v * phi1 + s * f2v * phi1)[0] - 1
    e6 = (s * p - sp.Rational(1, 2) * s * f2v * phi1 + s * f2v * p
          + sp.Rational(1, 6) * psi2 * f2v * phi1 - sp.Rational(1, 2) * psi2 * f2v * p)[0]
    eqs += [e5, e6]
    sol = sp.solve(eqs, list(p) + list(s) + [b], dict=True)
    assert len(sol) == 1, sol
    sol = sol[0]
    phi2 = p.subs(sol)
    psi1 = s.subs(sol)
    psi2 = psi2.subs(sol)

    flam = F.diff(lam).subs(subs)
    fmu = F.diff(mu).subs(subs)
    c = -(psi2 * fmu)[0] / (psi2 * flam)[0]
    nu = sp.Matrix(sp.symbols("n0 n1"))
    nsol = sp.solve(list(J * nu + c * flam + fmu) + [(phi1.T * nu)[0]], list(nu), dict=True)[0]
    nu = nu.subs(nsol)

    # second derivative of f along state directions U=(ux,uy), W=(wx,wy)
    t1, t2 = sp.symbols("t1 t2")

    def d2(U, W):
        sub = {x1: point[0] + t1 * U[0][0] + t2 * W[0][0],
               x2: point[1] + t1 * U[0][1] + t2 * W[0][1],
               y1: point[0] + t1 * U[1][0] + t2 * W[1][0],
               y2: point[1] + t1 * U[1][1] + t2 * W[1][1],
               lam: lamv, mu: muv}
        G = F.subs(sub, simultaneous=True)
        return G.diff(t1).diff(t2).subs({t1: 0, t2: 0})

    def dpar(U, par, weight):
        sub = {x1: point[0] + t1 * U[0][0], x2: point[1] + t1 * U[0][1],
               y1: point[0] + t1 * U[1][0], y2: point[1] + t1 * U[1][1],
               lam: lamv, mu: muv}
        G = F.diff(par).subs(sub, simultaneous=True)
        return weight * G.diff(t1).subs({t1: 0})

    U1 = (list(phi1), list(phi1))
    U2 = (list(phi2), list(phi2 - phi1))
    N = (list(nu), list(nu))

    def Bop(U):
        return d2(N, U) + dpar(U, lam, c) + dpar(U, mu, 1)

    d0m = sp.Matrix([
        [(psi2 * d2(U1, U1))[0], (psi2 * Bop(U1))[0]],
        [(psi2 * d2(U1, U2))[0] + (psi1 * d2(U1, U1))[0], (psi2 * Bop(U2))[0] + (psi1 * Bop(U1))[0]],
    ])
    d0 = sp.simplify(d0m.det())
    cond_iii = (psi2 * phi2 - sp.Rational(1, 2) * psi2 * f2v * phi1 + psi2 * f2v * phi2)[0]
    cond_i = (psi2 * flam)[0]
    return dict(phi1=phi1.T, phi2=phi2.T, psi1=psi1, psi2=psi2, c=c, nu=nu.T,
                psi2_nu=(psi2 * nu)[0], d0=d0, cond_i=cond_i, cond_iii=sp.simplify(cond_iii))


def newton_point(F, l1, l2):
    """Exact zero of the defining system at x=0, lam=mu=0 for the synthetic model."""
    subs = {x1: 0, x2: 0, y1: 0, y2: 0, lam: 0, mu: 0}
    f1v = F.jacobian(X).subs(subs)
    f2v = F.jacobian(Y).subs(subs)
    J = f1v + f2v
    ph1 = sp.Matrix(sp.symbols("a0 a1"))
    ph2 = sp.Matrix(sp.symbols("c0 c1"))
    l1 = sp.Matrix([l1]); l2 = sp.Matrix([l2])
    h = sp.Rational(1, 2)
    eqs = list(J * ph1) + list(J * ph2 - (f2v + sp.eye(2)) * ph1)
    eqs += [(l1 * ph1 - h * l2 * f2v * ph1 + l1 * f2v * ph1)[0] - 1]
    eqs += [(l1 * ph2 - h * l1 * f2v * ph1 + l1 * f2v * ph2 + sp.Rational(1, 6) * l2 * f2v * ph1
             - h * l2 * f2v * ph2)[0]]
    sol = sp.solve(eqs, list(ph1) + list(ph2), dict=True)
    return sol


def show(name, d):
    print(f"== {name}")
    for k, v in d.items():
        if isinstance(v, sp.MatrixBase):
            print(f"  {k} = {[sp.nsimplify(e) for e in v]}  ~ {[float(e) for e in v]}")
        else:
            print(f"  {k} = {v}  ~ {float(v):.17g}")


if __name__ == "__main__":
    show("predator-prey at (1,1), D=1/2, K=2", analyse(predator_prey(), (1, 1), sp.Rational(1, 2), 2))
    show("predator-prey, beta=3/10", analyse(predator_prey(), (1, 1), sp.Rational(1, 2), 2, beta=sp.Rational(3, 10)))
    show("synthetic at origin", analyse(synthetic(), (0, 0), 0, 0))
    show("synthetic, beta=-7/10", analyse(synthetic(), (0, 0), 0, 0, beta=sp.Rational(-7, 10)))
    swapped = synthetic().subs({lam: sp.Symbol("tmp")}).subs({mu: lam}).subs({sp.Symbol("tmp"): mu})
    show("synthetic, parameters swapped", analyse(swapped, (0, 0), 0, 0))
    print("== synthetic defining-system zero, l1=l2=(1,0):", newton_point(synthetic(), [1, 0], [1, 0]))
