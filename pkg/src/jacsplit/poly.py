"""Sparse multivariate polynomials over an exact coefficient field.

The variable universe is fixed: ``x`` (curve coordinate), ``x1``/``x2``
(correspondence coordinates), ``t`` (family parameter), ``s``/``s1``/``s2``
(construction parameters).  A term maps an exponent tuple over that universe
to a nonzero field element; the coefficient field is any handle exposing
``zero``/``one``/``coerce``/``inv`` (rationals, a number-field tower, or a
finite field).

Division, resultants and discriminants follow the classical univariate
conventions: ``poly_divrem`` divides in one designated variable and insists
on a unit (constant) leading coefficient; ``poly_resultant`` is the Sylvester
determinant (rows of ``a`` first), evaluated fraction-free (Bareiss), so
``Res_x(x^2 + b x + c, 2x + b) = 4c - b^2`` exactly.
"""

from __future__ import annotations

from .fields import DivisionByZero, QQ, rat, up_gcd

VARS = ("x", "x1", "x2", "t", "s", "s1", "s2")
_VIDX = {v: i for i, v in enumerate(VARS)}
_ZEXP = (0,) * len(VARS)


class NonUnitLeadingCoefficient(ArithmeticError):
    """Division attempted by a polynomial whose leading coefficient is not a unit."""


class MultivariateInput(ValueError):
    """A univariate-only operation received a genuinely multivariate input."""


class MPoly:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("field", "terms")

    def __init__(self, field, terms):
        self.field = field
        clean = {}
        for e, c in terms.items():
            if c:
                clean[e] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------------

    @classmethod
    def const(cls, field, c):
        c = field.coerce(c)
        return cls(field, {_ZEXP: c} if c else {})

    @classmethod
    def var(cls, field, name, power=1):
        e = [0] * len(VARS)
        e[_VIDX[name]] = power
        return cls(field, {tuple(e): field.one})

    @classmethod
    def zero(cls, field):
        return cls(field, {})

    # -- inspection -----------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and _ZEXP in self.terms)

    def const_value(self):
        if not self.terms:
            return self.field.zero
        if self.is_const():
            return self.terms[_ZEXP]
        raise ValueError("polynomial is not constant")

    def variables(self):
        used = [False] * len(VARS)
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used[i] = True
        return tuple(v for i, v in enumerate(VARS) if used[i])

    def degree(self, var):
        i = _VIDX[var]
        return max((e[i] for e in self.terms), default=-1)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def coeff(self, var, k):
        """Coefficient of var^k, as a polynomial in the remaining variables."""
        i = _VIDX[var]
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                e2 = list(e)
                e2[i] = 0
                out[tuple(e2)] = c
        return MPoly(self.field, out)

    def as_dense(self, var):
        """Dense coefficient list [c_0, ..., c_d] of MPoly coefficients."""
        d = self.degree(var)
        return [self.coeff(var, k) for k in range(d + 1)]

    def scalar(self):
        """The constant term's field value (zero if absent)."""
        return self.terms.get(_ZEXP, self.field.zero)

    # -- arithmetic -----------------------------------------------------------

    def _co(self, other):
        if isinstance(other, MPoly):
            if other.field == self.field:
                return other
            return NotImplemented
        try:
            return MPoly.const(self.field, other)
        except (TypeError, ValueError):
            return NotImplemented

    def __add__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for e, c in o.terms.items():
            if e in out:
                v = out[e] + c
                if v:
                    out[e] = v
                else:
                    del out[e]
            else:
                out[e] = c
        return MPoly(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.field, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        if not self.terms or not o.terms:
            return MPoly(self.field, {})
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                if e in out:
                    v = out[e] + v
                if v:
                    out[e] = v
                elif e in out:
                    del out[e]
        return MPoly(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = MPoly.const(self.field, self.field.one)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        """Division by a unit (constant) only."""
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.is_const() or o.is_zero():
            raise NonUnitLeadingCoefficient("can only divide by a nonzero constant")
        inv = self.field.inv(o.const_value())
        return MPoly(self.field, {e: c * inv for e, c in self.terms.items()})

    def __eq__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return self.terms == o.terms

    def __bool__(self):
        return bool(self.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, key=lambda e: (sum(e), e), reverse=True):
            c = self.terms[e]
            mono = "*".join(
                (VARS[i] if k == 1 else "%s^%d" % (VARS[i], k))
                for i, k in enumerate(e) if k)
            if mono:
                bits.append("(%s)*%s" % (c, mono))
            else:
                bits.append("(%s)" % (c,))
        return " + ".join(bits)

    # -- calculus / substitution ----------------------------------------------

    def derivative(self, var):
        i = _VIDX[var]
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = list(e)
                e2[i] = k - 1
                e2 = tuple(e2)
                v = c * k
                if e2 in out:
                    v = out[e2] + v
                if v:
                    out[e2] = v
        return MPoly(self.field, out)

    def substitute(self, assignments):
        """Ring morphism sending each named variable to a polynomial or scalar.

        Variables not mentioned are left alone.  Substitution is simultaneous.
        """
        subs = {}
        for name, val in assignments.items():
            if not isinstance(val, MPoly):
                val = MPoly.const(self.field, val)
            elif val.field != self.field:
                raise ValueError("substitution value over a different field")
            subs[_VIDX[name]] = val
        one = MPoly.const(self.field, self.field.one)
        # power cache per substituted variable
        pows = {i: [one] for i in subs}
        acc = MPoly.zero(self.field)
        for e, c in self.terms.items():
            term = MPoly.const(self.field, c)
            keep = [0] * len(VARS)
            for i, k in enumerate(e):
                if not k:
                    continue
                if i in subs:
                    cache = pows[i]
                    while len(cache) <= k:
                        cache.append(cache[-1] * subs[i])
                    term = term * cache[k]
                else:
                    keep[i] = k
            if any(keep):
                term = term * MPoly(self.field, {tuple(keep): self.field.one})
            acc = acc + term
        return acc

    def map_coefficients(self, fn, new_field):
        """Apply ``fn`` to every coefficient, producing a polynomial over ``new_field``."""
        out = {}
        for e, c in self.terms.items():
            v = fn(c)
            if v:
                out[e] = v
        return MPoly(new_field, out)


def poly_divrem(a: MPoly, b: MPoly, var: str):
    """Long division of ``a`` by ``b`` in ``var``: a = q*b + r, deg_var r < deg_var b.

    The leading coefficient of ``b`` in ``var`` must be a nonzero constant
    (else :class:`NonUnitLeadingCoefficient`), so the division is exact
    arithmetic over the coefficient field.
    """
    if a.field != b.field:
        raise ValueError("mixed fields")
    db = b.degree(var)
    if db < 0:
        raise DivisionByZero("division by the zero polynomial")
    lc = b.coeff(var, db)
    if not lc.is_const():
        raise NonUnitLeadingCoefficient(
            "leading coefficient in %s is not a unit constant" % var)
    lcv = lc.const_value()
    inv = a.field.inv(lcv)
    q = MPoly.zero(a.field)
    r = a
    while True:
        da = r.degree(var)
        if da < db or r.is_zero():
            break
        lead = r.coeff(var, da)
        piece = lead.map_coefficients(lambda c: c * inv, a.field) * \
            MPoly.var(a.field, var, da - db)
        q = q + piece
        r = r - piece * b
        if r.degree(var) == da:  # no progress: defensive, should not happen
            raise ArithmeticError("division failed to reduce degree")
    return q, r


def poly_exact_div(a: MPoly, b: MPoly) -> MPoly:
    """Exact division a/b (raises ArithmeticError when not exact)."""
    if b.is_zero():
        raise DivisionByZero("exact division by zero")
    if a.is_zero():
        return a
    if b.is_const():
        inv = a.field.inv(b.const_value())
        return a.map_coefficients(lambda c: c * inv, a.field)
    var = b.variables()[0]
    db = b.degree(var)
    q = MPoly.zero(a.field)
    r = a
    while not r.is_zero():
        da = r.degree(var)
        if da < db:
            raise ArithmeticError("division is not exact")
        piece = poly_exact_div(r.coeff(var, da), b.coeff(var, db)) * \
            MPoly.var(a.field, var, da - db)
        q = q + piece
        r = r - piece * b
        if not r.is_zero() and r.degree(var) == da:
            raise ArithmeticError("division is not exact")
    return q


def _bareiss_det(M, field, exact_div):
    """Fraction-free determinant; ``M`` is a square list-of-lists (mutated)."""
    n = len(M)
    if n == 0:
        return None
    sign = 1
    prev = None
    for k in range(n - 1):
        if not M[k][k]:
            piv = next((i for i in range(k + 1, n) if M[i][k]), None)
            if piv is None:
                return None  # zero column -> zero determinant
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[k][k] * M[i][j] - M[i][k] * M[k][j]
                M[i][j] = exact_div(num, prev) if prev is not None else num
            M[i][k] = None  # cleared; never read again
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return -det if sign < 0 else det


def poly_resultant(a: MPoly, b: MPoly, var: str) -> MPoly:
    """Sylvester resultant of ``a`` and ``b`` with respect to ``var``.

    Rows of ``a`` come first (deg b of them), so
    ``Res_x(x^2+bx+c, 2x+b) = 4c - b^2`` and
    ``Res_y(y^2-2, x-y^2) = (x-2)^2``.
    """
    if a.field != b.field:
        raise ValueError("mixed fields")
    F = a.field
    da, db = a.degree(var), b.degree(var)
    if da < 0 or db < 0:
        raise DivisionByZero("resultant with the zero polynomial")
    zero = MPoly.zero(F)
    if da == 0 and db == 0:
        return MPoly.const(F, F.one)
    if da == 0:
        return a ** db
    if db == 0:
        return b ** da
    ca = [a.coeff(var, k) for k in range(da, -1, -1)]  # leading first
    cb = [b.coeff(var, k) for k in range(db, -1, -1)]
    n = da + db
    M = []
    for i in range(db):
        M.append([zero] * i + ca + [zero] * (n - da - 1 - i))
    for i in range(da):
        M.append([zero] * i + cb + [zero] * (n - db - 1 - i))
    # fast path: all entries constant -> plain field elimination
    if all(e.is_const() for row in M for e in row):
        vals = [[e.const_value() for e in row] for row in M]
        det = _field_det(vals, F)
        return MPoly.const(F, det)
    det = _bareiss_det(M, F, poly_exact_div)
    return det if det is not None else zero


def _field_det(M, F):
    n = len(M)
    det = F.one
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            return F.zero
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        pv = M[col][col]
        det = det * pv
        inv = F.inv(pv)
        for r in range(col + 1, n):
            if M[r][col]:
                f = M[r][col] * inv
                M[r] = [v - f * w for v, w in zip(M[r], M[col])]
    return det


def poly_discriminant(a: MPoly, var: str) -> MPoly:
    """disc(a) = (-1)^{n(n-1)/2} Res(a, a') / lc(a), n = deg_var a."""
    n = a.degree(var)
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    res = poly_resultant(a, a.derivative(var), var)
    lc = a.coeff(var, n)
    out = poly_exact_div(res, lc)
    if (n * (n - 1) // 2) % 2:
        out = -out
    return out


def poly_gcd(a: MPoly, b: MPoly) -> MPoly:
    """Monic gcd of univariate polynomials (same single variable or constants)."""
    avars, bvars = a.variables(), b.variables()
    if len(avars) > 1 or len(bvars) > 1:
        raise MultivariateInput("gcd is defined for univariate inputs only")
    if avars and bvars and avars != bvars:
        raise MultivariateInput("gcd inputs use different variables")
    var = (avars or bvars or ("x",))[0]
    F = a.field
    da, db = a.degree(var), b.degree(var)
    ca = [a.coeff(var, k).scalar() for k in range(da + 1)] if da >= 0 else []
    cb = [b.coeff(var, k).scalar() for k in range(db + 1)] if db >= 0 else []
    g = up_gcd(F, ca, cb)
    out = MPoly.zero(F)
    for k, c in enumerate(g):
        out = out + MPoly.const(F, c) * MPoly.var(F, var, k)
    return out


def poly_substitute(a: MPoly, assignments) -> MPoly:
    """Module-level alias for :meth:`MPoly.substitute`."""
    return a.substitute(assignments)


def mp(field, expr_terms):
    """Terse builder: ``expr_terms`` is a list of (coeff, {var: exp}) pairs."""
    out = {}
    for c, mono in expr_terms:
        e = [0] * len(VARS)
        for v, k in mono.items():
            e[_VIDX[v]] = k
        e = tuple(e)
        c = field.coerce(c)
        if e in out:
            out[e] = out[e] + c
        else:
            out[e] = c
    return MPoly(field, out)


def rational_mpoly(expr_terms):
    """Rational-coefficient builder used by tests."""
    return mp(QQ, [(rat(c), m) for c, m in expr_terms])
