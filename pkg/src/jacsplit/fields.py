"""Exact coefficient arithmetic: rationals, number-field towers, finite fields.

Conventions used throughout the package:

* Rational scalars are ``gmpy2.mpq`` (exact, hashable, fast).  ``rat()``
  coerces ints, strings like ``"3/4"``, and Fractions.

* A :class:`FieldTower` is Q extended by finitely many named generators, each
  with a monic minimal polynomial over the tower below it.  Elements are kept
  in nested dense form internally; the *flat basis* used for serialization is
  the list of monomials ``prod_i gen_i^{e_i}`` ordered lexicographically by the
  exponent tuple ``(e_0, ..., e_{r-1})`` (generators in declaration order).
  For a tower Q(beta, alpha) with degrees (3, 2) the flat basis is
  ``[1, alpha, beta, beta*alpha, beta^2, beta^2*alpha]``.

* A tower may carry an involution ``sigma`` given by the images of the
  generators (as flat coefficient vectors).  ``nf_conjugate`` applies it by
  evaluation; construction checks that each image is a root of the
  (sigma-transported) minimal polynomial of its generator.

* ``FiniteField(p, k)`` is F_{p^k} with the deterministic modulus: the monic
  irreducible ``x^k + sum c_i x^i`` minimizing ``sum c_i p^i``.  Elements are
  coefficient tuples; the *canonical integer* of an element is
  ``sum c_i p^i``, which fixes all orderings (root ordering, embedding
  choices) so runs are reproducible.

Univariate polynomials over a finite field are plain low-first coefficient
lists; the ``up_*`` helpers below work over any object exposing
``zero``/``one``/``coerce``/``inv`` whose elements support ``+ - *``.
"""

from __future__ import annotations

import hashlib
import random
from functools import lru_cache, reduce

from gmpy2 import mpq

Rational = type(mpq(0))


def rat(x) -> Rational:
    """Coerce ``x`` (int, string ``"a/b"``, Fraction, mpq) to an exact rational."""
    if isinstance(x, Rational):
        return x
    return mpq(x)


class DivisionByZero(ZeroDivisionError):
    """Inversion of zero in an exact field."""


class NoPrimeAbove(ValueError):
    """The rational prime p admits no residue map for this tower's data."""


# ---------------------------------------------------------------------------
# number-field towers
# ---------------------------------------------------------------------------

def _nzero(degs):
    """Nested zero element for generator degrees ``degs`` (innermost first)."""
    if not degs:
        return mpq(0)
    inner = _nzero(degs[:-1])
    return tuple(inner for _ in range(degs[-1]))


def _nconst(degs, c):
    if not degs:
        return mpq(c)
    head = _nconst(degs[:-1], c)
    pad = _nzero(degs[:-1])
    return (head,) + tuple(pad for _ in range(degs[-1] - 1))


def _nadd(a, b, level):
    if level == 0:
        return a + b
    return tuple(_nadd(x, y, level - 1) for x, y in zip(a, b))


def _nneg(a, level):
    if level == 0:
        return -a
    return tuple(_nneg(x, level - 1) for x in a)


def _nscale(a, c, level):
    if level == 0:
        return a * c
    return tuple(_nscale(x, c, level - 1) for x in a)


def _niszero(a, level):
    if level == 0:
        return a == 0
    return all(_niszero(x, level - 1) for x in a)


class FieldTower:
    """Q extended by ``gens``; immutable.

    Parameters
    ----------
    gens:
        list of ``(name, minpoly)`` pairs.  ``minpoly`` lists the coefficients
        ``c_0 ... c_{d-1}`` (ascending) of the *monic* minimal polynomial
        ``x^d + c_{d-1} x^{d-1} + ... + c_0``; each ``c_j`` is a flat
        coefficient vector over the subtower spanned by the previous
        generators (plain rationals for the first generator).
    sigma:
        optional involution: list of flat vectors (over the full tower) giving
        the image of each generator.  Checked on construction.
    """

    def __init__(self, gens=(), sigma=None):
        self.gen_names = tuple(name for name, _ in gens)
        self.degrees = []
        self._mp = []  # minpoly coeffs as nested reps of the subtower
        for name, coeffs in gens:
            nested = [self._unflatten_at(len(self.degrees), c) for c in coeffs]
            self._mp.append(tuple(nested))
            self.degrees.append(len(coeffs))
        self.degrees = tuple(self.degrees)
        self.degree = reduce(lambda a, b: a * b, self.degrees, 1)
        self.levels = len(self.degrees)
        self.zero = NFElement(self, _nzero(self.degrees))
        self.one = NFElement(self, _nconst(self.degrees, 1))
        self._basis_cache = None
        self._sigma_monomials = None
        self.sigma_images = None
        if sigma is not None:
            self.sigma_images = tuple(self.element(v) for v in sigma)
            self._check_sigma()

    # -- construction helpers ------------------------------------------------

    def _unflatten_at(self, level, flat):
        """Flat vector over the first ``level`` generators -> nested rep."""
        degs = self.degrees[:level] if isinstance(self.degrees, tuple) else tuple(self.degrees[:level])
        size = reduce(lambda a, b: a * b, degs, 1)
        if not isinstance(flat, (list, tuple)):
            flat = [flat]
        vals = [rat(v) for v in flat]
        if len(vals) > size:
            raise ValueError("coefficient vector longer than subtower basis")
        vals += [mpq(0)] * (size - len(vals))

        # flat index = sum e_i * stride_i, stride_i = prod_{j>i} degs[j];
        # the recursion peels generators outermost-last.
        def build2(lvl, offset):
            if lvl == 0:
                return vals[offset]
            d = degs[lvl - 1]
            stride = reduce(lambda a, b: a * b, degs[lvl:], 1)
            return tuple(build2(lvl - 1, offset + e * stride) for e in range(d))

        return build2(len(degs), 0)

    def element(self, flat) -> "NFElement":
        """Element from a flat coefficient vector (or a single rational)."""
        return NFElement(self, self._unflatten_at(self.levels, flat))

    def coerce(self, x) -> "NFElement":
        if isinstance(x, NFElement):
            if x.tower is not self and x.tower.fingerprint() != self.fingerprint():
                raise ValueError("element of a different tower")
            return x
        return NFElement(self, _nconst(self.degrees, rat(x)))

    def gen(self, i=None) -> "NFElement":
        """The i-th generator (default: the last one) as an element."""
        if i is None:
            i = self.levels - 1
        flat = [0] * self.degree
        stride = reduce(lambda a, b: a * b, self.degrees[i + 1:], 1)
        flat[stride] = 1
        return self.element(flat)

    def inv(self, x) -> "NFElement":
        return nf_invert(self.coerce(x))

    def fingerprint(self):
        key = (self.gen_names, self.degrees,
               tuple(tuple(_flatten(c, self.degrees[:i]) for c in mp)
                     for i, mp in enumerate(self._mp)))
        return key

    def __eq__(self, other):
        return isinstance(other, FieldTower) and (
            self is other or self.fingerprint() == other.fingerprint())

    def __hash__(self):
        return hash(("FieldTower",) + (self.gen_names, self.degrees))

    def __repr__(self):
        if not self.gen_names:
            return "Q"
        return "Q(%s)" % ", ".join(self.gen_names)

    # -- basis and sigma -----------------------------------------------------

    def basis(self):
        """All basis monomials as elements, in flat order."""
        if self._basis_cache is None:
            out = []
            for idx in range(self.degree):
                flat = [0] * self.degree
                flat[idx] = 1
                out.append(self.element(flat))
            self._basis_cache = tuple(out)
        return self._basis_cache

    def _sigma_monomial_images(self):
        if self._sigma_monomials is None:
            if self.sigma_images is None:
                raise ValueError("tower has no involution")
            # image of each flat-basis monomial under sigma
            pows = []
            for i in range(self.levels):
                p = [self.one]
                for _ in range(1, self.degrees[i]):
                    p.append(p[-1] * self.sigma_images[i])
                pows.append(p)
            images = []
            for idx in range(self.degree):
                exps = self._exps_of_index(idx)
                acc = self.one
                for i, e in enumerate(exps):
                    if e:
                        acc = acc * pows[i][e]
                images.append(acc)
            self._sigma_monomials = tuple(images)
        return self._sigma_monomials

    def _exps_of_index(self, idx):
        exps = []
        for i in range(self.levels):
            stride = reduce(lambda a, b: a * b, self.degrees[i + 1:], 1)
            exps.append((idx // stride) % self.degrees[i])
        return tuple(exps)

    def _check_sigma(self):
        # each generator image must satisfy the sigma-transported minimal
        # polynomial, and sigma must square to the identity on generators.
        for i in range(self.levels):
            img = self.sigma_images[i]
            coeffs = [self._lift_sub(i, c) for c in self._mp[i]]
            acc = self.zero
            p = self.one
            for c in coeffs:
                acc = acc + nf_conjugate(c) * p
                p = p * img
            acc = acc + p  # monic leading term
            if acc != self.zero:
                raise ValueError(
                    "sigma image of %s is not a conjugate root" % self.gen_names[i])
        for i in range(self.levels):
            if nf_conjugate(self.sigma_images[i]) != self.gen(i):
                raise ValueError("sigma is not an involution on %s" % self.gen_names[i])

    def _lift_sub(self, level, nested) -> "NFElement":
        """Lift a nested rep over the first ``level`` gens into the full tower."""
        flat_sub = _flatten(nested, self.degrees[:level])
        sub_size = len(flat_sub)
        flat = [mpq(0)] * self.degree
        # monomials of the subtower keep their exponent tuple; strides differ.
        for sub_idx, v in enumerate(flat_sub):
            if v == 0:
                continue
            # decode exponents in subtower, re-encode in full tower
            exps = []
            rem = sub_idx
            for i in range(level):
                stride = reduce(lambda a, b: a * b, self.degrees[i + 1:level], 1)
                exps.append(rem // stride)
                rem %= stride
            idx = 0
            for i, e in enumerate(exps):
                stride = reduce(lambda a, b: a * b, self.degrees[i + 1:], 1)
                idx += e * stride
            flat[idx] = v
        return self.element(flat)


def _flatten(nested, degs):
    if not degs:
        return [nested]
    out = []
    size = reduce(lambda a, b: a * b, degs, 1)
    flat = [mpq(0)] * size

    def walk(lvl, node, offset):
        if lvl == 0:
            flat[offset] = node
            return
        stride = reduce(lambda a, b: a * b, degs[lvl:], 1)
        for e, sub in enumerate(node):
            walk(lvl - 1, sub, offset + e * stride)

    walk(len(degs), nested, 0)
    return flat


def _nmul(a, b, level, tower):
    """Nested multiplication with reduction by the level's minimal polynomial."""
    if level == 0:
        return a * b
    d = len(a)
    conv = [None] * (2 * d - 1)
    for i, ai in enumerate(a):
        if _niszero(ai, level - 1):
            continue
        for j, bj in enumerate(b):
            if _niszero(bj, level - 1):
                continue
            t = _nmul(ai, bj, level - 1, tower)
            conv[i + j] = t if conv[i + j] is None else _nadd(conv[i + j], t, level - 1)
    z = _nzero(tower.degrees[:level - 1])
    conv = [z if c is None else c for c in conv]
    mp = tower._mp[level - 1]  # coeffs c_0..c_{d-1}, x^d = -sum c_j x^j
    for k in range(2 * d - 2, d - 1, -1):
        top = conv[k]
        if _niszero(top, level - 1):
            continue
        conv[k] = z
        for j in range(d):
            if _niszero(mp[j], level - 1):
                continue
            conv[k - d + j] = _nadd(conv[k - d + j],
                                    _nneg(_nmul(top, mp[j], level - 1, tower), level - 1),
                                    level - 1)
    return tuple(conv[:d])


class NFElement:
    """Element of a :class:`FieldTower`.  Immutable, hashable."""

    __slots__ = ("tower", "rep", "_hash")

    def __init__(self, tower, rep):
        self.tower = tower
        self.rep = rep
        self._hash = None

    # -- views ---------------------------------------------------------------

    def flat(self):
        """Flat coefficient vector (list of mpq) on the tower's basis."""
        return _flatten(self.rep, self.tower.degrees)

    def as_rational(self) -> Rational:
        flat = self.flat()
        if any(c != 0 for c in flat[1:]):
            raise ValueError("element is not rational")
        return flat[0]

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.flat()[1:])

    # -- arithmetic ----------------------------------------------------------

    def _coerce_other(self, other):
        if isinstance(other, NFElement):
            if other.tower is self.tower or other.tower == self.tower:
                return other
            return NotImplemented
        if isinstance(other, (int, Rational)):
            return self.tower.coerce(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce_other(other)
        if o is NotImplemented:
            return NotImplemented
        return NFElement(self.tower, _nadd(self.rep, o.rep, self.tower.levels))

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.tower, _nneg(self.rep, self.tower.levels))

    def __sub__(self, other):
        o = self._coerce_other(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce_other(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return NFElement(self.tower, _nscale(self.rep, rat(other), self.tower.levels))
        o = self._coerce_other(other)
        if o is NotImplemented:
            return NotImplemented
        return NFElement(self.tower, _nmul(self.rep, o.rep, self.tower.levels, self.tower))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            c = rat(other)
            if c == 0:
                raise DivisionByZero("division by zero")
            return self * (1 / c)
        o = self._coerce_other(other)
        if o is NotImplemented:
            return NotImplemented
        return self * nf_invert(o)

    def __rtruediv__(self, other):
        o = self._coerce_other(other)
        if o is NotImplemented:
            return NotImplemented
        return o * nf_invert(self)

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return nf_invert(self) ** (-e)
        result = self.tower.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            other = self.tower.coerce(other)
        if not isinstance(other, NFElement):
            return NotImplemented
        return self.tower == other.tower and self.flat() == other.flat()

    def __bool__(self):
        return not _niszero(self.rep, self.tower.levels)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self.flat()))
        return self._hash

    def __repr__(self):
        names = self.tower.gen_names
        flat = self.flat()
        terms = []
        for idx, c in enumerate(flat):
            if c == 0:
                continue
            exps = self.tower._exps_of_index(idx)
            mono = "*".join(
                (names[i] if e == 1 else "%s^%d" % (names[i], e))
                for i, e in enumerate(exps) if e)
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append("%s*%s" % (c, mono))
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def nf_invert(a: NFElement) -> NFElement:
    """Inverse via the regular representation (exact linear solve over Q)."""
    if not a:
        raise DivisionByZero("inverse of zero")
    T = a.tower
    n = T.degree
    if n == 1:
        return T.coerce(1 / a.flat()[0])
    cols = [(a * b).flat() for b in T.basis()]
    # solve M x = e_0 where M[i][j] = cols[j][i]
    M = [[cols[j][i] for j in range(n)] + [mpq(1) if i == 0 else mpq(0)]
         for i in range(n)]
    x = _solve_rat(M, n)
    return T.element(x)


def _solve_rat(M, n):
    """Gaussian elimination over mpq on an n x (n+1) augmented matrix."""
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise DivisionByZero("singular regular representation")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [v - f * w for v, w in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]


def nf_conjugate(a: NFElement) -> NFElement:
    """Apply the tower's involution (generator-image evaluation)."""
    T = a.tower
    if T.levels == 0:
        return a
    images = T._sigma_monomial_images()
    flat = a.flat()
    acc = T.zero
    for c, mono in zip(flat, images):
        if c != 0:
            acc = acc + mono * c
    return acc


def nf_norm(a: NFElement) -> Rational:
    """Norm to Q: determinant of the multiplication-by-``a`` matrix."""
    T = a.tower
    n = T.degree
    if n == 1:
        return a.flat()[0]
    cols = [(a * b).flat() for b in T.basis()]
    M = [[cols[j][i] for j in range(n)] for i in range(n)]
    det = mpq(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return mpq(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        inv = 1 / M[col][col]
        for r in range(col + 1, n):
            if M[r][col] != 0:
                f = M[r][col] * inv
                M[r] = [v - f * w for v, w in zip(M[r], M[col])]
    return det


class RationalField:
    """Field handle for plain rationals (so generic code can treat Q uniformly)."""

    zero = mpq(0)
    one = mpq(1)

    @staticmethod
    def coerce(x):
        return rat(x)

    @staticmethod
    def inv(x):
        if x == 0:
            raise DivisionByZero("inverse of zero")
        return 1 / rat(x)

    def __repr__(self):
        return "QQ"


QQ = RationalField()


# ---------------------------------------------------------------------------
# dense univariate polynomials mod p over plain ints (fast path helpers)
# ---------------------------------------------------------------------------

def ip_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def ip_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return ip_trim(out)


def ip_rem(a, b, p):
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], p - 2, p)
    while len(a) - 1 >= db and a:
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] * inv % p
        off = len(a) - 1 - db
        for j in range(db + 1):
            a[off + j] = (a[off + j] - f * b[j]) % p
        a.pop()
    return ip_trim(a)


def ip_gcd(a, b, p):
    a, b = ip_trim(list(a)), ip_trim(list(b))
    while b:
        a, b = b, ip_rem(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [v * inv % p for v in a]
    return a


def ip_powmod(base, e, mod, p):
    result = [1]
    base = ip_rem(base, mod, p)
    while e:
        if e & 1:
            result = ip_rem(ip_mul(result, base, p), mod, p)
        base = ip_rem(ip_mul(base, base, p), mod, p)
        e >>= 1
    return result


def ip_is_irreducible(f, p):
    """Rabin irreducibility test for monic f over F_p."""
    n = len(f) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    x = [0, 1]
    xq = ip_powmod(x, p ** n, f, p)
    if ip_trim([(a - b) % p for a, b in _zip_pad(xq, x)]):
        # x^{p^n} != x mod f
        return False
    for ell in set(_prime_factors(n)):
        xe = ip_powmod(x, p ** (n // ell), f, p)
        d = [(a - b) % p for a, b in _zip_pad(xe, x)]
        if len(ip_gcd(d, f, p)) - 1 != 0:
            return False
    return True


def _zip_pad(a, b):
    n = max(len(a), len(b))
    return zip(a + [0] * (n - len(a)), b + [0] * (n - len(b)))


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# finite fields F_{p^k}
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _find_modulus(p, k):
    """Deterministic modulus: first monic irreducible x^k + sum c_i x^i
    by ascending N = sum c_i p^i."""
    for N in range(p ** k):
        c = []
        n = N
        for _ in range(k):
            c.append(n % p)
            n //= p
        f = c + [1]
        if ip_is_irreducible(f, p):
            return tuple(c)
    raise RuntimeError("no irreducible polynomial found (impossible)")


@lru_cache(maxsize=None)
def FF(p, k=1):
    """Cached finite-field constructor (shared instances)."""
    return FiniteField(p, k)


class FiniteField:
    """F_{p^k} with the deterministic lex-first modulus."""

    def __init__(self, p, k=1):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.p = p
        self.k = k
        self.q = p ** k
        if k == 1:
            self.modulus = None
            self._red = None
        else:
            self.modulus = _find_modulus(p, k)
            # reduction rows: x^{k+j} mod modulus, j = 0..k-2
            rows = []
            cur = [(-c) % p for c in self.modulus]  # x^k
            rows.append(tuple(cur))
            for _ in range(k - 2):
                cur = [0] + cur
                if len(cur) > k:
                    top = cur[k]
                    cur = cur[:k]
                    if top:
                        cur = [(v + top * r) % p for v, r in zip(cur, rows[0])]
                rows.append(tuple(cur))
            self._red = rows
            # packed-integer multiplication data: coefficients in byte-aligned
            # slots wide enough for the worst reduction accumulation k^2 p^3
            slot = (((k * k * p * p * p).bit_length() + 8) // 8) * 8
            self._slot_bits = slot
            self._slot_bytes = slot // 8
            self._slot_mask = (1 << slot) - 1
            self._low_mask = (1 << (slot * k)) - 1
            self._packed_rows = tuple(self._pack(row) for row in rows)
        self.zero = FFElement(self, (0,) * k)
        self.one = FFElement(self, (1,) + (0,) * (k - 1))

    def _pack(self, coeffs):
        nb = self._slot_bytes
        return int.from_bytes(
            b"".join(v.to_bytes(nb, "little") for v in coeffs), "little")

    def gen(self):
        """The class of x (a root of the modulus); only for k >= 2."""
        if self.k == 1:
            raise ValueError("prime field has no generator")
        return FFElement(self, (0, 1) + (0,) * (self.k - 2))

    def coerce(self, x):
        if isinstance(x, FFElement):
            if x.field is self:
                return x
            if x.field.p == self.p and x.field.k == self.k and x.field.modulus == self.modulus:
                return FFElement(self, x.c)
            raise ValueError("element of a different finite field")
        if isinstance(x, Rational):
            num = int(x.numerator) % self.p
            den = int(x.denominator) % self.p
            if den == 0:
                raise NoPrimeAbove("denominator divisible by p")
            val = num * pow(den, self.p - 2, self.p) % self.p
            return FFElement(self, (val,) + (0,) * (self.k - 1))
        if isinstance(x, int):
            return FFElement(self, (x % self.p,) + (0,) * (self.k - 1))
        raise TypeError("cannot coerce %r" % (x,))

    def inv(self, a):
        a = self.coerce(a)
        if not a:
            raise DivisionByZero("inverse of zero in F_%d^%d" % (self.p, self.k))
        if self.k == 1:
            return FFElement(self, (pow(a.c[0], self.p - 2, self.p),))
        # extended gcd of a (as poly) with modulus
        f = list(self.modulus) + [1]
        g = ip_trim(list(a.c))
        s0, s1 = [], [1]
        r0, r1 = f, g
        p = self.p
        while r1:
            # divide r0 by r1
            q, r = _ip_divmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, ip_trim([(x - y) % p for x, y in _zip_pad(s0, ip_mul(q, s1, p))])
        if len(r0) != 1:
            raise DivisionByZero("element not invertible (non-field modulus?)")
        c = pow(r0[0], p - 2, p)
        inv = [v * c % p for v in s0]
        inv += [0] * (self.k - len(inv))
        return FFElement(self, tuple(inv[: self.k]))

    def from_canonical(self, n):
        """Element whose canonical integer is n (base-p digits)."""
        c = []
        for _ in range(self.k):
            c.append(n % self.p)
            n //= self.p
        return FFElement(self, tuple(c))

    def elements(self):
        """Iterate all elements in canonical order (use only for small q)."""
        for n in range(self.q):
            yield self.from_canonical(n)

    def __eq__(self, other):
        return (isinstance(other, FiniteField) and self.p == other.p
                and self.k == other.k and self.modulus == other.modulus)

    def __hash__(self):
        return hash(("FiniteField", self.p, self.k, self.modulus))

    def __repr__(self):
        return "F_%d" % self.p if self.k == 1 else "F_%d^%d" % (self.p, self.k)


def _ip_divmod(a, b, p):
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], p - 2, p)
    q = [0] * max(0, len(a) - db)
    while len(a) - 1 >= db and a:
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] * inv % p
        q[len(a) - 1 - db] = f
        off = len(a) - 1 - db
        for j in range(db + 1):
            a[off + j] = (a[off + j] - f * b[j]) % p
        a.pop()
    return ip_trim(q), ip_trim(a)


class FFElement:
    """Element of F_{p^k}: coefficient tuple on the power basis of the modulus root."""

    __slots__ = ("field", "c", "_pk")

    def __init__(self, field, c):
        self.field = field
        self.c = c

    def _packed(self):
        # memoized byte-slot packing; elements are reused across many products
        try:
            return self._pk
        except AttributeError:
            v = self.field._pack(self.c)
            self._pk = v
            return v

    def canonical(self) -> int:
        n = 0
        for v in reversed(self.c):
            n = n * self.field.p + v
        return n

    def _co(self, other):
        if isinstance(other, FFElement):
            if other.field is self.field:
                return other
            if other.field == self.field:
                return FFElement(self.field, other.c)
            return NotImplemented
        if isinstance(other, (int, Rational)):
            return self.field.coerce(other)
        return NotImplemented

    def __add__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FFElement(self.field, tuple((a + b) % p for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FFElement(self.field, tuple((-a) % p for a in self.c))

    def __sub__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FFElement(self.field, tuple((a - b) % p for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        F = self.field
        p = F.p
        k = F.k
        if k == 1:
            return FFElement(F, (self.c[0] * o.c[0] % p,))
        if k <= 4:
            conv = [0] * (2 * k - 1)
            for i, ai in enumerate(self.c):
                if ai:
                    for j, bj in enumerate(o.c):
                        conv[i + j] += ai * bj
            out = conv[:k]
            for j in range(k - 1):
                t = conv[k + j]
                if t:
                    row = F._red[j]
                    for i in range(k):
                        out[i] += t * row[i]
            return FFElement(F, tuple(v % p for v in out))
        # packed path: one big-integer product holds the whole convolution in
        # byte-aligned slots, then the overflow slots fold back via the
        # precomputed packed reduction rows
        prod = self._packed() * o._packed()
        acc = prod & F._low_mask
        tops = prod >> (F._slot_bits * k)
        mask = F._slot_mask
        j = 0
        while tops:
            t = tops & mask
            if t:
                acc += t * F._packed_rows[j]
            tops >>= F._slot_bits
            j += 1
        nb = F._slot_bytes
        data = acc.to_bytes(nb * k, "little")
        return FFElement(F, tuple(
            int.from_bytes(data[i * nb:(i + 1) * nb], "little") % p
            for i in range(k)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return self * self.field.inv(o)

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.field.inv(self)

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        F = self.field
        if e < 0:
            return F.inv(self) ** (-e)
        result = F.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        o = self._co(other)
        if o is NotImplemented:
            return NotImplemented
        return self.c == o.c

    def __bool__(self):
        return any(self.c)

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.c))

    def __repr__(self):
        return "ff(%d)" % self.canonical()


# ---------------------------------------------------------------------------
# generic dense univariate helpers (any field handle)
# ---------------------------------------------------------------------------

def up_trim(F, a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def up_add(F, a, b):
    out = [x + y for x, y in _pad_zip(F, a, b)]
    return up_trim(F, out)


def up_sub(F, a, b):
    out = [x - y for x, y in _pad_zip(F, a, b)]
    return up_trim(F, out)


def _pad_zip(F, a, b):
    n = max(len(a), len(b))
    z = F.zero
    return zip(list(a) + [z] * (n - len(a)), list(b) + [z] * (n - len(b)))


def up_scale(F, a, c):
    return up_trim(F, [x * c for x in a])


def up_mul(F, a, b):
    if not a or not b:
        return []
    z = F.zero
    out = [z] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = out[i + j] + ai * bj
    return up_trim(F, out)


def up_divmod(F, a, b):
    a = list(a)
    b = up_trim(F, b)
    if not b:
        raise DivisionByZero("polynomial division by zero")
    db = len(b) - 1
    inv = F.inv(b[-1])
    z = F.zero
    q = [z] * max(0, len(a) - db)
    while True:
        a = up_trim(F, a)
        if len(a) - 1 < db or not a:
            break
        f = a[-1] * inv
        off = len(a) - 1 - db
        q[off] = f
        for j in range(db + 1):
            a[off + j] = a[off + j] - f * b[j]
        a.pop()
    return up_trim(F, q), up_trim(F, a)


def up_monic(F, a):
    a = up_trim(F, a)
    if not a:
        return a
    inv = F.inv(a[-1])
    return [x * inv for x in a]


def up_gcd(F, a, b):
    a, b = up_trim(F, a), up_trim(F, b)
    while b:
        _, r = up_divmod(F, a, b)
        a, b = b, r
    return up_monic(F, a)


def up_xgcd(F, a, b):
    """Return (g, s, t) with s*a + t*b = g, g monic (or zero)."""
    r0, r1 = up_trim(F, a), up_trim(F, b)
    s0, s1 = [F.one], []
    t0, t1 = [], [F.one]
    while r1:
        q, r = up_divmod(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, up_sub(F, s0, up_mul(F, q, s1))
        t0, t1 = t1, up_sub(F, t0, up_mul(F, q, t1))
    if r0:
        inv = F.inv(r0[-1])
        r0 = [x * inv for x in r0]
        s0 = [x * inv for x in s0]
        t0 = [x * inv for x in t0]
    return r0, s0, t0


def up_powmod(F, base, e, mod):
    result = [F.one]
    _, base = up_divmod(F, base, mod)
    while e:
        if e & 1:
            _, result = up_divmod(F, up_mul(F, result, base), mod)
        base = up_divmod(F, up_mul(F, base, base), mod)[1]
        e >>= 1
    return result


def up_eval(F, a, x):
    acc = F.zero
    for c in reversed(a):
        acc = acc * x + c
    return acc


def up_deriv(F, a):
    return up_trim(F, [a[i] * i for i in range(1, len(a))])


# ---------------------------------------------------------------------------
# root finding over finite fields
# ---------------------------------------------------------------------------

def _det_rng(field, coeffs, salt=b""):
    h = hashlib.sha256()
    h.update(b"jacsplit-roots")
    h.update(repr((field.p, field.k, field.modulus)).encode())
    h.update(repr([c.canonical() for c in coeffs]).encode())
    h.update(salt)
    return random.Random(int.from_bytes(h.digest(), "big"))


def ff_roots(coeffs, field):
    """Roots (with multiplicity) of a univariate polynomial over ``field``.

    ``coeffs`` lists coefficients lowest-first (ints or FFElements).  Returns
    ``[(root, multiplicity), ...]`` sorted by the root's canonical integer.
    Brute-force scan for q <= 10^4, gcd splitting + equal-degree splitting
    above (deterministically seeded, so repeated runs agree).
    """
    F = field
    cs = up_trim(F, [F.coerce(c) for c in coeffs])
    if not cs:
        raise ValueError("zero polynomial has every element as a root")
    if len(cs) == 1:
        return []
    if F.q <= 10 ** 4:
        roots = [x for x in F.elements() if not up_eval(F, cs, x)]
    else:
        roots = _roots_large(F, cs)
    out = []
    for r in sorted(roots, key=lambda x: x.canonical()):
        m = 0
        rem = cs
        while True:
            q, s = up_divmod(F, rem, [-r, F.one])
            if s:
                break
            m += 1
            rem = q
        out.append((r, m))
    return out


def _roots_large(F, cs):
    """Distinct roots via x^q - x gcd then equal-degree splitting."""
    f = up_monic(F, cs)
    # squarefree part
    g = up_gcd(F, f, up_deriv(F, f))
    if len(g) > 1:
        f = up_divmod(F, f, g)[0]
    xq = up_powmod(F, [F.zero, F.one], F.q, f)
    lin = up_gcd(F, up_sub(F, xq, [F.zero, F.one]), f)
    if len(lin) <= 1:
        return []
    rng = _det_rng(F, cs)
    roots = []
    stack = [lin]
    while stack:
        h = stack.pop()
        d = len(h) - 1
        if d == 0:
            continue
        if d == 1:
            roots.append(-h[0])
            continue
        while True:
            a = F.from_canonical(rng.randrange(F.q))
            # (x + a)^((q-1)/2) - 1 splits the product of linear factors
            t = up_powmod(F, [a, F.one], (F.q - 1) // 2, h)
            t = up_sub(F, t, [F.one])
            g1 = up_gcd(F, t, h)
            if 0 < len(g1) - 1 < d:
                g2 = up_divmod(F, h, g1)[0]
                stack.append(g1)
                stack.append(g2)
                break
    return roots


def _one_root_descent(F, h, rng):
    """One root of monic ``h``, a product of distinct linear factors over F.

    Quadratic-character gcd splitting, keeping the smaller half, so only a
    single branch of the usual equal-degree recursion is ever expanded.
    """
    while len(h) - 1 > 1:
        a = F.from_canonical(rng.randrange(F.q))
        t = up_powmod(F, [a, F.one], (F.q - 1) // 2, h)
        t = up_sub(F, t, [F.one])
        g1 = up_gcd(F, t, h)
        if 0 < len(g1) - 1 < len(h) - 1:
            g2 = up_divmod(F, h, g1)[0]
            h = g1 if len(g1) <= len(g2) else g2
    return -h[0]


def ff_irreducible_orbit(coeffs, sub_order, field, salt=b""):
    """All roots in ``field`` of a polynomial irreducible over a subfield.

    ``coeffs`` (lowest-first) must have coefficients in the subfield of order
    ``sub_order`` and be irreducible over it, with ``field`` large enough to
    split it.  The roots then form a single orbit under z -> z^sub_order, so
    one root found by gcd descent yields the rest by iterated Frobenius —
    much cheaper than generic root extraction.  Returns the distinct roots
    sorted by canonical integer.
    """
    F = field
    cs = up_trim(F, [F.coerce(c) for c in coeffs])
    if len(cs) <= 1:
        raise ValueError("constant polynomial")
    cs = up_monic(F, cs)
    d = len(cs) - 1
    if d == 1:
        return [-cs[0]]
    rng = _det_rng(F, cs, salt=salt or b"orbit")
    r = _one_root_descent(F, cs, rng)
    roots = [r]
    for _ in range(d - 1):
        r = r ** sub_order
        roots.append(r)
    if len({v.canonical() for v in roots}) != d:
        raise ArithmeticError("roots did not form a single Frobenius orbit")
    return sorted(roots, key=lambda x: x.canonical())


def ff_factor(coeffs, field, salt=b""):
    """Monic irreducible factorization over ``field``.

    Returns ``[(factor_coeffs, multiplicity), ...]`` sorted by (degree,
    coefficient canonical tuple).  Distinct-degree then equal-degree
    (Cantor–Zassenhaus), deterministically seeded.
    """
    F = field
    f = up_trim(F, [F.coerce(c) for c in coeffs])
    if len(f) <= 1:
        raise ValueError("constant polynomial")
    f = up_monic(F, f)
    factors = {}

    def add(fac, mult):
        key = tuple(c.canonical() for c in fac)
        if key in factors:
            factors[key] = (fac, factors[key][1] + mult)
        else:
            factors[key] = (fac, mult)

    for g, mult in _squarefree_parts(F, f, 1):
        # g squarefree: distinct-degree then equal-degree splitting
        x = [F.zero, F.one]
        h = x
        rest = g
        dd = 0
        while len(rest) - 1 > 0:
            dd += 1
            if 2 * dd > len(rest) - 1:
                add(rest, mult)
                break
            h = up_powmod(F, h, F.q, rest)
            gd = up_gcd(F, up_sub(F, h, x), rest)
            if len(gd) - 1 > 0:
                for piece in _edf(F, gd, dd, salt):
                    add(piece, mult)
                rest = up_divmod(F, rest, gd)[0]
                _, h = up_divmod(F, h, rest)
    out = sorted(factors.values(),
                 key=lambda fm: (len(fm[0]), tuple(c.canonical() for c in fm[0])))
    return out


def _pth_root(F, f):
    """For f with f' = 0 (so f = g(x^p)), return the polynomial p-th root."""
    p = F.p
    e = F.q // p  # a^(q/p) is the p-th root of a in F_q
    out = []
    for i in range(0, len(f), p):
        out.append(f[i] ** e)
    return out


def _squarefree_parts(F, f, base):
    """Yun-style squarefree decomposition over F_q (handles char-p powers).

    Yields (g, multiplicity) with f = prod g^multiplicity, each g squarefree.
    """
    if len(f) <= 1:
        return []
    out = []
    fp = up_deriv(F, f)
    if not fp:
        return _squarefree_parts(F, _pth_root(F, f), base * F.p)
    c = up_gcd(F, f, fp)
    w = up_divmod(F, f, c)[0]
    i = 1
    while len(w) > 1:
        y = up_gcd(F, w, c)
        z = up_divmod(F, w, y)[0]
        if len(z) > 1:
            out.append((z, base * i))
        w = y
        c = up_divmod(F, c, y)[0]
        i += 1
    if len(c) > 1:
        # everything left in c has multiplicity divisible by p
        out.extend(_squarefree_parts(F, _pth_root(F, c), base * F.p))
    return out


def _edf(F, f, d, salt=b""):
    """Equal-degree splitting: f = product of irreducibles of degree d."""
    n = len(f) - 1
    if n == d:
        return [f]
    rng = _det_rng(F, f, b"edf" + salt)
    out = []
    stack = [f]
    e = (F.q ** d - 1) // 2
    while stack:
        h = stack.pop()
        if len(h) - 1 == d:
            out.append(h)
            continue
        while True:
            a = [F.from_canonical(rng.randrange(F.q)) for _ in range(len(h) - 1)] + [F.one]
            t = up_powmod(F, a, e, h)
            t = up_sub(F, t, [F.one])
            g1 = up_gcd(F, t, h)
            if 0 < len(g1) - 1 < len(h) - 1:
                stack.append(g1)
                stack.append(up_divmod(F, h, g1)[0])
                break
    return out


def ff_sqrt(a, field):
    """A square root of ``a`` in the field, or None.  Deterministic choice:
    of the two roots, the one with smaller canonical integer."""
    F = field
    a = F.coerce(a)
    if not a:
        return F.zero
    rs = ff_roots([-a, F.zero, F.one], F)
    if not rs:
        return None
    return rs[0][0]


# ---------------------------------------------------------------------------
# embeddings and reduction maps
# ---------------------------------------------------------------------------

class Embedding:
    """Field embedding F_{p^a} -> F_{p^b} (a | b), generator to the smallest
    root of the small modulus; supports the exact inverse on its image."""

    def __init__(self, small, big):
        if small.p != big.p or big.k % small.k != 0:
            raise ValueError("no embedding F_%d^%d -> F_%d^%d"
                             % (small.p, small.k, big.p, big.k))
        self.small = small
        self.big = big
        if small.k == 1:
            self._pows = [big.one]
        else:
            mod = list(small.modulus) + [1]
            # the modulus is irreducible over the prime field, so its roots
            # form one Frobenius orbit; the smallest is the canonical image
            img = ff_irreducible_orbit([big.coerce(c) for c in mod],
                                       big.p, big, salt=b"embedding")[0]
            pows = [big.one]
            for _ in range(1, small.k):
                pows.append(pows[-1] * img)
            self._pows = pows
        # gaussian data for the section: columns = images of small basis
        p = small.p
        cols = [list(v.c) for v in self._pows]
        self._sec = _f2_style_solver(cols, p, big.k)

    def __call__(self, x):
        x = self.small.coerce(x)
        acc = self.big.zero
        for c, w in zip(x.c, self._pows):
            if c:
                acc = acc + w * c
        return acc

    def section(self, y):
        """Preimage of y (raises ValueError if y is outside the image)."""
        y = self.big.coerce(y)
        sol = self._sec(list(y.c))
        if sol is None:
            raise ValueError("element not in the embedded subfield")
        return FFElement(self.small, tuple(sol))


def _f2_style_solver(cols, p, nrows):
    """Prepares an exact mod-p least-solution solver for A x = y where A's
    columns are ``cols`` (length nrows).  Returns a function y -> x or None."""
    ncols = len(cols)
    # row-reduce [A | I] transposed bookkeeping: store elimination steps
    A = [[cols[j][i] % p for j in range(ncols)] for i in range(nrows)]
    # augmented identity tracking not needed; solve fresh each call (sizes tiny)

    def solve(y):
        M = [row[:] + [y[i] % p] for i, row in enumerate(A)]
        piv_cols = []
        r = 0
        for c in range(ncols):
            piv = next((i for i in range(r, nrows) if M[i][c]), None)
            if piv is None:
                continue
            M[r], M[piv] = M[piv], M[r]
            inv = pow(M[r][c], p - 2, p)
            M[r] = [v * inv % p for v in M[r]]
            for i in range(nrows):
                if i != r and M[i][c]:
                    f = M[i][c]
                    M[i] = [(v - f * w) % p for v, w in zip(M[i], M[r])]
            piv_cols.append(c)
            r += 1
        # consistency
        for i in range(r, nrows):
            if M[i][ncols]:
                return None
        x = [0] * ncols
        for i, c in enumerate(piv_cols):
            x[c] = M[i][ncols]
        return x

    return solve


@lru_cache(maxsize=None)
def ff_embedding(p, a, b):
    """Cached embedding F_{p^a} -> F_{p^b} between the canonical fields."""
    return Embedding(FF(p, a), FF(p, b))


class ReductionMap:
    """Residue map from a FieldTower to F_{p^k} fixing images of generators."""

    def __init__(self, tower, p, field, images):
        self.tower = tower
        self.p = p
        self.field = field
        self.images = tuple(images)
        # precompute image of every flat-basis monomial
        pows = []
        for i in range(tower.levels):
            ps = [field.one]
            for _ in range(1, tower.degrees[i]):
                ps.append(ps[-1] * self.images[i])
            pows.append(ps)
        monos = []
        for idx in range(tower.degree):
            exps = tower._exps_of_index(idx)
            acc = field.one
            for i, e in enumerate(exps):
                if e:
                    acc = acc * pows[i][e]
            monos.append(acc)
        self._monos = monos

    def __call__(self, x):
        if isinstance(x, NFElement):
            if x.tower != self.tower:
                raise ValueError("element of a different tower")
            acc = self.field.zero
            for c, mono in zip(x.flat(), self._monos):
                if c != 0:
                    acc = acc + mono * self.field.coerce(c)
            return acc
        return self.field.coerce(rat(x))

    def __repr__(self):
        return "ReductionMap(%r -> %r)" % (self.tower, self.field)


def build_reduction(tower, p, seed=0):
    """Reduction map ``tower -> F_{p^k}`` with k minimal.

    Searches k = 1, 2, ... and, per k, enumerates all compatible systems of
    generator images (depth-first, roots in canonical order); ``seed`` selects
    among the complete systems, so different seeds give Galois-conjugate maps.
    Raises :class:`NoPrimeAbove` if p divides a denominator in the tower data.
    """
    if p < 2:
        raise ValueError("p must be a prime")
    # denominators of tower data must be prime to p
    for i in range(tower.levels):
        for c in tower._mp[i]:
            for v in _flatten(c, tower.degrees[:i]):
                if int(v.denominator) % p == 0:
                    raise NoPrimeAbove("p divides a minimal-polynomial denominator")
    if tower.sigma_images is not None:
        for img in tower.sigma_images:
            for v in img.flat():
                if int(v.denominator) % p == 0:
                    raise NoPrimeAbove("p divides an involution denominator")
    kmax = max(1, tower.degree)
    for k in range(1, kmax + 1):
        field = FF(p, k)
        systems = []

        def dfs(level, images):
            if level == tower.levels:
                systems.append(tuple(images))
                return
            # map minpoly coefficients using images chosen so far
            coeffs = []
            for c in tower._mp[level]:
                flat = _flatten(c, tower.degrees[:level])
                acc = field.zero
                for sub_idx, v in enumerate(flat):
                    if v == 0:
                        continue
                    exps = []
                    rem = sub_idx
                    for i in range(level):
                        stride = reduce(lambda a, b: a * b,
                                        tower.degrees[i + 1:level], 1)
                        exps.append(rem // stride)
                        rem %= stride
                    mono = field.one
                    for i, e in enumerate(exps):
                        for _ in range(e):
                            mono = mono * images[i]
                    acc = acc + mono * field.coerce(v)
                coeffs.append(acc)
            coeffs.append(field.one)
            roots = ff_roots(coeffs, field)
            for r, _m in roots:
                dfs(level + 1, images + [r])

        dfs(0, [])
        if systems:
            images = systems[seed % len(systems)]
            return ReductionMap(tower, p, field, images)
    raise NoPrimeAbove("no residue map found for p=%d (tower degree %d)"
                       % (p, tower.degree))
