"""Divisor-class arithmetic on odd-degree hyperelliptic Jacobians.

Classes are held in Mumford form ``(u, v)``: ``u`` monic with
``deg u <= g``, ``deg v < deg u``, and ``u | v^2 - h``.  Cantor
composition/reduction realizes the group law, and a correspondence acts on
classes by pulling a balanced affine support back through the kernel
polynomial and pushing the roots forward to the partner curve.

Only single-infinity (odd-degree) models are supported: every linear
construction produces one, and the even-degree quadratic models never need
divisor arithmetic — their kernel analysis runs entirely through the
multiplicity-matrix formula.
"""

from math import gcd

from .catalog import HyperellipticModel
from .fields import (
    FF,
    _det_rng,
    ff_embedding,
    ff_factor,
    ff_irreducible_orbit,
    ff_roots,
    up_add,
    up_deriv,
    up_divmod,
    up_eval,
    up_gcd,
    up_monic,
    up_mul,
    up_powmod,
    up_sub,
    up_trim,
    up_xgcd,
)
from .poly import MPoly

__all__ = [
    "InvalidDivisor",
    "JacobianCtx",
    "LeadingDrop",
    "MumfordDivisor",
    "PointAtInfinityInSupport",
    "RequiresSplitModel",
    "apply_correspondence",
    "cantor_add",
    "difference_support",
    "divisor_neg",
    "random_divisor",
    "scalar_mul",
    "support_points",
    "two_torsion_class",
]


class InvalidDivisor(ValueError):
    """A pair (u, v) violating the Mumford invariants for this curve."""


class PointAtInfinityInSupport(ValueError):
    """The formal support contains the point at infinity (re-represent)."""


class LeadingDrop(ArithmeticError):
    """The kernel polynomial loses x2-degree at some support x-coordinate.

    The divisor class must be re-represented by the caller; ``values``
    lists the offending x-coordinates.
    """

    def __init__(self, values):
        self.values = tuple(values)
        super().__init__("leading coefficient vanishes at %d support "
                         "x-coordinate(s)" % len(self.values))


class RequiresSplitModel(ArithmeticError):
    """The operation needs the curve polynomial fully split over the field."""


class MumfordDivisor:
    """A reduced divisor class: ``u`` monic, ``deg v < deg u``, lowest-first
    coefficient tuples.  The zero polynomial is the empty tuple."""

    __slots__ = ("u", "v")

    def __init__(self, u, v):
        self.u = tuple(u)
        self.v = tuple(v)

    @property
    def degree(self):
        return len(self.u) - 1

    def is_identity(self):
        return len(self.u) == 1 and not self.v

    def canonical(self):
        return (tuple(c.canonical() for c in self.u),
                tuple(c.canonical() for c in self.v))

    def __eq__(self, other):
        if not isinstance(other, MumfordDivisor):
            return NotImplemented
        if len(self.u) != len(other.u) or len(self.v) != len(other.v):
            return False
        return all(a == b for a, b in zip(self.u + self.v,
                                          other.u + other.v))

    def __hash__(self):
        return hash(self.canonical())

    def __repr__(self):
        fmt = lambda cs: "[" + ", ".join(str(c.canonical()) for c in cs) + "]"
        return "MumfordDivisor(u=%s, v=%s)" % (fmt(self.u), fmt(self.v))


def _dense(h, var):
    """Dense field-element coefficient list of a univariate curve polynomial."""
    out = []
    for k in range(h.degree(var) + 1):
        c = h.coeff(var, k)
        if not c.is_const():
            raise ValueError("polynomial is not univariate in %s" % var)
        out.append(c.const_value())
    return out


def _identity_map(c):
    return c


def _emb_pair(small, big):
    """(embedding, section) for small -> big, the identity when they agree."""
    if small.k == big.k:
        return _identity_map, _identity_map
    e = ff_embedding(small.p, small.k, big.k)
    return e, e.section


class JacobianCtx:
    """Arithmetic context for ``y^2 = h(x)`` with ``h`` squarefree of odd
    degree ``2g + 1`` over a finite field of odd characteristic."""

    def __init__(self, model):
        h = model.h
        field = h.field
        if getattr(field, "p", 0) == 2:
            raise ValueError("y^2 = h(x) models are singular in "
                             "characteristic 2")
        coeffs = _dense(h, model.var)
        degree = len(coeffs) - 1
        if degree < 3 or degree % 2 == 0:
            raise ValueError("model degree must be odd and at least 3, "
                             "got %d" % degree)
        if len(up_gcd(field, coeffs, up_deriv(field, coeffs))) > 1:
            raise ValueError("curve polynomial is not squarefree")
        self.model = model
        self.field = field
        self.h = tuple(coeffs)
        self.genus = (degree - 1) // 2

    @property
    def identity(self):
        return MumfordDivisor((self.field.one,), ())

    def validate(self, D):
        """Raise :class:`InvalidDivisor` unless D is reduced and on-curve."""
        F = self.field
        if not isinstance(D, MumfordDivisor) or not D.u:
            raise InvalidDivisor("not a Mumford pair")
        for c in D.u + D.v:
            if not isinstance(c, type(F.zero)) or c.field != F:
                raise InvalidDivisor("coefficients from a different field")
        if D.u[-1] != F.one:
            raise InvalidDivisor("u is not monic")
        if D.degree > self.genus:
            raise InvalidDivisor("deg u = %d exceeds the genus %d"
                                 % (D.degree, self.genus))
        if D.v and (not D.v[-1] or len(D.v) >= len(D.u)):
            raise InvalidDivisor("v is not reduced below deg u")
        probe = up_sub(F, up_mul(F, list(D.v), list(D.v)), list(self.h))
        if up_divmod(F, probe, list(D.u))[1]:
            raise InvalidDivisor("u does not divide v^2 - h")

    def __repr__(self):
        return "JacobianCtx(g=%d over %r)" % (self.genus, self.field)


def cantor_add(J, D1, D2):
    """The reduced representative of [D1] + [D2] (Cantor composition)."""
    J.validate(D1)
    J.validate(D2)
    F = J.field
    h = list(J.h)
    u1, v1 = list(D1.u), list(D1.v)
    u2, v2 = list(D2.u), list(D2.v)
    d1, e1, e2 = up_xgcd(F, u1, u2)
    d, c1, c2 = up_xgcd(F, d1, up_add(F, v1, v2))
    u3, rem = up_divmod(F, up_mul(F, u1, u2), up_mul(F, d, d))
    if rem:
        raise InvalidDivisor("composition gcd does not divide u1*u2")
    t = up_add(F, up_mul(F, up_mul(F, c1, e1), up_mul(F, u1, v2)),
               up_mul(F, up_mul(F, c1, e2), up_mul(F, u2, v1)))
    t = up_add(F, t, up_mul(F, c2, up_add(F, up_mul(F, v1, v2), h)))
    tq, rem = up_divmod(F, t, d)
    if rem:
        raise InvalidDivisor("composition gcd does not divide the v-combination")
    v3 = up_divmod(F, tq, u3)[1]
    return _reduce(J, u3, v3)


def _reduce(J, u, v):
    """Reduce a semi-reduced pair (u | v^2 - h) to a MumfordDivisor."""
    F = J.field
    h = list(J.h)
    while len(u) - 1 > J.genus:
        un, rem = up_divmod(F, up_sub(F, h, up_mul(F, v, v)), u)
        if rem:
            raise InvalidDivisor("reduction step lost exactness")
        v = up_trim(F, [-c for c in up_divmod(F, v, un)[1]])
        u = un
    u = up_monic(F, u)
    return MumfordDivisor(tuple(u), tuple(up_trim(F, v)))


def divisor_neg(J, D):
    """The inverse class: the hyperelliptic involution flips v to -v."""
    J.validate(D)
    return MumfordDivisor(D.u, tuple(up_trim(J.field, [-c for c in D.v])))


def scalar_mul(J, D, m):
    """[m]D by double-and-add; negative m goes through the involution."""
    if m < 0:
        D, m = divisor_neg(J, D), -m
    J.validate(D)
    acc = J.identity
    base = D
    while m:
        if m & 1:
            acc = cantor_add(J, acc, base)
        m >>= 1
        if m:
            base = cantor_add(J, base, base)
    return acc


# ---------------------------------------------------------------------------
# sampling and torsion classes


def _quotient_sqrt(F, r, mod, rng):
    """Square root of ``r`` in the field F_q[x]/(mod), or None.

    ``mod`` is irreducible of degree d, so the quotient is a field of odd
    order Q = q^d; Tonelli–Shanks runs directly on polynomial residues.
    """
    r = up_divmod(F, r, mod)[1]
    if not r:
        return []
    d = len(mod) - 1
    Q = F.q ** d
    one = [F.one]
    if up_powmod(F, r, (Q - 1) // 2, mod) != one:
        return None

    def qmul(a, b):
        return up_divmod(F, up_mul(F, a, b), mod)[1]

    t, e = Q - 1, 0
    while t % 2 == 0:
        t //= 2
        e += 1
    minus_one = [-F.one]
    while True:
        z = up_trim(F, [F.from_canonical(rng.randrange(F.q))
                        for _ in range(d)])
        if z and up_powmod(F, z, (Q - 1) // 2, mod) == minus_one:
            break
    c = up_powmod(F, z, t, mod)
    w = up_powmod(F, r, (t + 1) // 2, mod)
    b = up_powmod(F, r, t, mod)
    while b != one:
        m, bb = 0, b
        while bb != one:
            bb = qmul(bb, bb)
            m += 1
        if m == e:
            return None
        cc = c
        for _ in range(e - m - 1):
            cc = qmul(cc, cc)
        w = qmul(w, cc)
        c = qmul(cc, cc)
        b = qmul(b, c)
        e = m
    return w


def _crt(F, residues, moduli):
    v, M = residues[0], moduli[0]
    for w, mo in zip(residues[1:], moduli[1:]):
        _, a, _ = up_xgcd(F, M, mo)
        corr = up_divmod(F, up_mul(F, a, up_sub(F, w, v)), mo)[1]
        v = up_add(F, v, up_mul(F, M, corr))
        M = up_mul(F, M, mo)
    return v


def random_divisor(J, seed):
    """A pseudorandom class, deterministic in ``seed``.

    Samples a monic squarefree u of degree g, then solves v^2 = h (mod u)
    factor by factor with square roots in the quotient fields, glued by
    CRT; resamples whenever some factor sees a non-residue.
    """
    F = J.field
    g = J.genus
    rng = _det_rng(F, list(J.h), salt=b"random-divisor:" + repr(seed).encode())
    while True:
        u = [F.from_canonical(rng.randrange(F.q)) for _ in range(g)] + [F.one]
        facs = ff_factor(u, F)
        if any(mult > 1 for _, mult in facs):
            continue
        residues, moduli = [], []
        for fac, _ in facs:
            r = up_divmod(F, list(J.h), fac)[1]
            w = _quotient_sqrt(F, r, fac, rng)
            if w is None:
                break
            residues.append(w)
            moduli.append(fac)
        else:
            v = _crt(F, residues, moduli)
            D = MumfordDivisor(tuple(u), tuple(up_trim(F, v)))
            J.validate(D)
            return D


def two_torsion_class(J, i):
    """The class (x - gamma_i, 0) of the i-th smallest branch point.

    Needs h fully split over the base field; 1 <= i <= 2g (the last branch
    point is dependent on the others and is not offered)."""
    F = J.field
    roots = ff_roots(list(J.h), F)
    if len(roots) != len(J.h) - 1:
        raise RequiresSplitModel("h has %d of %d roots in %r"
                                 % (len(roots), len(J.h) - 1, F))
    if not 1 <= i <= 2 * J.genus:
        raise ValueError("index %d outside 1..%d" % (i, 2 * J.genus))
    gamma = roots[i - 1][0]
    return MumfordDivisor((-gamma, F.one), ())


# ---------------------------------------------------------------------------
# supports and the correspondence action


def support_points(J, D, field=None):
    """The affine support of D over a splitting extension.

    Returns ``(E, [((x, y), mult), ...])``: E is the smallest canonical
    extension holding every point of the support (or ``field``, which must
    be such an extension).
    """
    J.validate(D)
    F = J.field
    if D.degree == 0:
        return (field or F), []
    facs = ff_factor(list(D.u), F)
    lcm = 1
    for fac, _ in facs:
        d = len(fac) - 1
        lcm = lcm * d // gcd(lcm, d)
    E = field or FF(F.p, F.k * lcm)
    if E.p != F.p or E.k % (F.k * lcm):
        raise ValueError("field %r cannot split this support" % (E,))
    emb, _ = _emb_pair(F, E)
    v_big = [emb(c) for c in D.v]
    points = []
    for fac, mult in facs:
        if len(fac) - 1 == 1:
            rs = [emb(-fac[0])]
        else:
            rs = ff_irreducible_orbit([emb(c) for c in fac], F.q, E)
        for r in rs:
            points.append(((r, up_eval(E, v_big, r)), mult))
    return E, points


def difference_support(J, plus, minus, field=None):
    """Balanced affine support representing the class [plus] - [minus]."""
    if plus.degree != minus.degree:
        raise InvalidDivisor("supports of degree %d and %d do not balance"
                             % (plus.degree, minus.degree))
    F = J.field
    lcm = 1
    for D in (plus, minus):
        if D.degree == 0:
            continue
        for fac, _ in ff_factor(list(D.u), F):
            d = len(fac) - 1
            lcm = lcm * d // gcd(lcm, d)
    E = field or FF(F.p, F.k * lcm)
    out = {}
    for D, sign in ((plus, 1), (minus, -1)):
        _, pts = support_points(J, D, field=E)
        for (x, y), mult in pts:
            key = (x.canonical(), y.canonical())
            cur = out.get(key)
            total = (cur[1] if cur else 0) + sign * mult
            out[key] = ((x, y), total)
    return E, [(pt, m) for pt, m in out.values() if m]


def apply_correspondence(corr, support):
    """Push a balanced affine support on X through the correspondence.

    ``support`` is ``[((x, y), mult), ...]`` with all coordinates in one
    extension E of the correspondence's field; each point (a, b) maps to
    the sum of (r, b) over the roots r of A(a, x2) with multiplicity.
    An irreducible factor U of the fiber A(a, x2) pairs with the constant
    b into a Mumford divisor (U, b) outright — b^2 - h_Y is divisible by
    the fiber, so no splitting field is ever needed — and the signed
    Cantor sum of those, checked to be Galois-stable, descends to the
    base field as a :class:`MumfordDivisor` on the partner curve.
    """
    F = corr.field
    merged = {}
    for entry in support:
        point, mult = entry
        if point is None or point[0] is None:
            raise PointAtInfinityInSupport(
                "infinity cannot appear in the support; re-represent the "
                "class")
        x, y = point
        key = (x.canonical(), y.canonical())
        cur = merged.get(key)
        merged[key] = ((x, y), (cur[1] if cur else 0) + mult)
    points = [(pt, m) for pt, m in merged.values() if m]
    J_Y = JacobianCtx(corr.Y)
    if not points:
        return J_Y.identity
    if sum(m for _, m in points):
        raise InvalidDivisor("support has nonzero degree %d"
                             % sum(m for _, m in points))
    E = points[0][0][0].field
    if E.p != F.p or E.k % F.k:
        raise ValueError("support field %r does not extend %r" % (E, F))
    for (x, y), _ in points:
        if x.field != E or y.field != E:
            raise ValueError("support coordinates must share one field")
    emb1, sec1 = _emb_pair(F, E)

    hx = [emb1(c) for c in _dense(corr.X.h, corr.X.var)]
    for (x, y), _ in points:
        if y * y != up_eval(E, hx, x):
            raise InvalidDivisor("support point is not on the curve")

    A_E = corr.A.map_coefficients(emb1, E) if E.k != F.k else corr.A
    deg_A = A_E.degree("x2")
    fibers = []
    drops = []
    for (x, y), mult in points:
        a_poly = A_E.substitute({"x1": MPoly.const(E, x)})
        if a_poly.degree("x2") < deg_A:
            drops.append(x)
            continue
        fibers.append((_dense(a_poly, "x2"), y, mult))
    if drops:
        raise LeadingDrop(drops)

    # each irreducible fiber factor U pairs with the constant y-value into
    # a closed point (U, b) of the partner curve, directly over E
    hy_E = [emb1(c) for c in _dense(corr.Y.h, corr.Y.var)]
    image = {}
    for coeffs, b, mult in fibers:
        target = up_sub(E, [b * b], hy_E)
        for fac, fmult in ff_factor(coeffs, E):
            if up_divmod(E, target, fac)[1]:
                raise InvalidDivisor(
                    "kernel polynomial does not transport the curve "
                    "equation; not a correspondence pair")
            key = (tuple(c.canonical() for c in fac), b.canonical())
            cur = image.get(key)
            image[key] = ((fac, b), (cur[1] if cur else 0) + mult * fmult)
    image = {k: v for k, v in image.items() if v[1]}

    # the image divisor must be stable under the base Frobenius before any
    # reduction to the base field makes sense
    frob = {}
    for (fac, b), mult in image.values():
        ff, bf = [c ** F.q for c in fac], b ** F.q
        frob[(tuple(c.canonical() for c in ff), bf.canonical())] = mult
    if frob != {k: v[1] for k, v in image.items()}:
        raise InvalidDivisor("image support is not Galois-stable over the "
                             "base field")

    Y_E = HyperellipticModel(corr.Y.var, corr.Y.h.map_coefficients(
        emb1, E)) if E.k != F.k else corr.Y
    J_E = JacobianCtx(Y_E)
    acc = J_E.identity
    for (fac, b), mult in image.values():
        P = _reduce(J_E, list(fac), [b] if b else [])
        acc = cantor_add(J_E, acc, scalar_mul(J_E, P, mult))

    try:
        u = tuple(sec1(c) for c in acc.u)
        v = tuple(sec1(c) for c in acc.v)
    except ValueError:
        raise InvalidDivisor("image class does not descend to the base "
                             "field; support was not Galois-stable")
    out = MumfordDivisor(u, v)
    J_Y.validate(out)
    return out
