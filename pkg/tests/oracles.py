"""Independent sympy oracles for the symbolic checks.

Unknowns are sympy functions of the base symbols, so derivatives and the
chain rule come from sympy rather than from the package's jet machinery.
"""

import sympy as sp

x, y, t = sp.symbols("x y t")
u = sp.Function("u")
v = sp.Function("v")
w = sp.Function("w")


def lax_residual(A, B, X=x, Y=y):
    """D_y A - D_x B + [A, B] for sympy matrices."""
    A, B = sp.Matrix(A), sp.Matrix(B)
    return sp.simplify(A.diff(Y) - B.diff(X) + A * B - B * A)


def liouville_pair():
    uu = u(x, y)
    c = -sp.exp(uu / 2) / sp.sqrt(2)
    A = [[uu.diff(x) / 4, 0], [c, -uu.diff(x) / 4]]
    B = [[-uu.diff(y) / 4, c], [0, uu.diff(y) / 4]]
    return A, B


def burgers_residual():
    """u_xt - (u^2)_xx + 2 u_xxx - 2 u_x^2, expanded."""
    uu = u(x, t)
    return sp.expand(uu.diff(x, t) - (uu ** 2).diff(x, 2) + 2 * uu.diff(x, 3) - 2 * uu.diff(x) ** 2)


def cross_difference(P, Q, unknown, X, Y):
    """D_Y P - D_X Q after replacing the unknown's first derivatives by P and Q."""
    f = unknown
    rules = {f.diff(X): P, f.diff(Y): Q}
    e = P.diff(Y) - Q.diff(X)
    for _ in range(4):
        e = e.subs(rules)
    return sp.expand(sp.simplify(e))


def to_jet(e, funcs, base):
    """Rewrite sympy derivatives as the package's atom names (u_xy, ...)."""
    reps = {}
    for d in e.atoms(sp.Derivative):
        name = d.expr.func.__name__
        idx = sorted(str(s) for s, n in d.variable_count for _ in range(n))
        idx.sort(key=lambda s: base.index(s))
        reps[d] = sp.Symbol(f"{name}_{''.join(idx)}")
    e = e.subs(reps)
    for f in funcs:
        e = e.subs(f(*[sp.Symbol(b) for b in base]), sp.Symbol(f.__name__))
    return sp.expand(e)
