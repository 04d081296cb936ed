"""Differential matrices of correspondences and their Rosati products.

For a kernel polynomial ``A(x1, x2)`` of degree ``d`` in ``x1``, the i-th
*trace function* is the sum of the i-th powers of the ``x1``-roots of ``A``,
an element of ``K[params][x2]`` computed by the Newton–Girard recurrence
(no root is ever extracted).  The correspondence acts on the holomorphic
differentials ``x^{j-1} dx / y``; in that monomial basis the action is the
lower-triangular *trace matrix* whose ``(i, j)`` entry is ``(j/i)`` times
the ``x2^j``-coefficient of the i-th trace function.

Exchanging the roles of the two curves (swap ``x1`` and ``x2``, rescale to
be monic in ``x1`` again) yields the matrix of the dual map; the product of
the two matrices being an integer scalar ``m·I`` certifies that the
correspondence splits multiplication by ``m``.
"""

from gmpy2 import mpq

from .catalog import (
    Correspondence,
    HyperellipticModel,
    LINEAR,
    _real_cyclotomic,
    build_construction,
    dickson,
    dickson_family,
)
from .fields import NFElement, nf_conjugate, rat
from .poly import MPoly


class NotMonic(ArithmeticError):
    """The x1-leading coefficient of A is not a nonzero constant."""


class NotScalar(ArithmeticError):
    """A Rosati product that is not an integer multiple of the identity."""

    def __init__(self, product, message="product is not an integer scalar matrix"):
        self.product = product
        super().__init__("%s:\n%r" % (message, product))


class ClosedFormMismatch(ArithmeticError):
    """Computed matrix data disagrees with its predicted closed form."""


class DiffMatrix:
    """A matrix of polynomial entries acting on differentials.

    ``entries[i][j]`` (0-indexed) is an :class:`MPoly` over ``field``;
    ``entry(i, j)`` provides 1-indexed access matching the row/column
    numbering of the differential basis.  ``rescale_unit`` records the
    constant by which the kernel polynomial was divided to make it monic
    (the trace matrix itself is unchanged by such a rescale, since the
    roots are).
    """

    def __init__(self, field, entries, rescale_unit=None):
        self.field = field
        self.entries = tuple(tuple(row) for row in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        self.rescale_unit = rescale_unit if rescale_unit is not None else field.one

    def entry(self, i, j):
        """1-indexed entry t_{i,j}."""
        return self.entries[i - 1][j - 1]

    def diagonal(self):
        return [self.entries[k][k] for k in range(min(self.rows, self.cols))]

    def is_lower_triangular(self):
        return all(self.entries[i][j].is_zero()
                   for i in range(self.rows)
                   for j in range(i + 1, self.cols))

    def conjugate(self):
        """Entrywise image under the field involution."""
        return DiffMatrix(
            self.field,
            [[e.map_coefficients(nf_conjugate, self.field) for e in row]
             for row in self.entries])

    def __mul__(self, other):
        if not isinstance(other, DiffMatrix) or self.cols != other.rows:
            return NotImplemented
        zero = MPoly.zero(self.field)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if not (a.is_zero() or b.is_zero()):
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return DiffMatrix(self.field, out)

    def scalar_value(self):
        """The constant c with self == c*I, or ``None`` if there is none."""
        if self.rows != self.cols or self.rows == 0:
            return None
        first = self.entries[0][0]
        if not first.is_const():
            return None
        for i in range(self.rows):
            for j in range(self.cols):
                e = self.entries[i][j]
                if i == j:
                    if e != first:
                        return None
                elif not e.is_zero():
                    return None
        return first.const_value()

    def __eq__(self, other):
        return (isinstance(other, DiffMatrix) and self.field == other.field
                and self.entries == other.entries)

    def __repr__(self):
        body = "\n".join(
            "  [" + ", ".join(repr(e) for e in row) + "]"
            for row in self.entries)
        return "DiffMatrix(%dx%d,\n%s)" % (self.rows, self.cols, body)


def _monic_in_x1(A):
    """Rescale A by its constant x1-leading coefficient; return (A', unit).

    Raises :class:`NotMonic` when the leading coefficient involves other
    variables, in which case no constant rescale can fix it.
    """
    d = A.degree("x1")
    lead = A.coeff("x1", d)
    if not lead.is_const():
        raise NotMonic(
            "x1-leading coefficient %r is not a unit constant" % lead)
    unit = lead.const_value()
    if unit == A.field.one:
        return A, unit
    return A * MPoly.const(A.field, A.field.inv(unit)), unit


def newton_traces(A, count):
    """Power sums t_1 .. t_count of the x1-roots of A, without root-taking.

    With ``A = x1^d - e_1 x1^{d-1} + e_2 x1^{d-2} - ...`` (so ``e_i`` is the
    i-th elementary symmetric function of the roots), the recurrence is

        t_k = sum_{i=1}^{min(k-1, d)} (-1)^{i-1} e_i t_{k-i}
              + (-1)^{k-1} k e_k   (last term only while k <= d),

    and continues past ``d`` with the missing ``e_j`` treated as zero.
    Accepts any constant unit leading coefficient (the roots, hence the
    traces, are unchanged by a constant rescale); raises :class:`NotMonic`
    otherwise.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    A, _unit = _monic_in_x1(A)
    field = A.field
    d = A.degree("x1")
    # e[i] = (-1)^i * coefficient of x1^(d-i), the elementary symmetric funcs
    e = [None] * (d + 1)
    for i in range(1, d + 1):
        c = A.coeff("x1", d - i)
        e[i] = c if i % 2 == 0 else -c
    minus_one = MPoly.const(field, field.coerce(-1))
    traces = [None] * (count + 1)
    for k in range(1, count + 1):
        acc = MPoly.zero(field)
        for i in range(1, min(k - 1, d) + 1):
            term = e[i] * traces[k - i]
            acc = acc + (term if i % 2 == 1 else minus_one * term)
        if k <= d:
            term = MPoly.const(field, field.coerce(k)) * e[k]
            acc = acc + (term if k % 2 == 1 else minus_one * term)
        traces[k] = acc
    return traces[1:]


def diff_matrix(corr):
    """The matrix of the correspondence on holomorphic differentials.

    Row ``i`` expresses the image of ``x1^{i-1} dx1 / y1`` in the basis
    ``x2^{j-1} dx2 / y2``: the ``(i, j)`` entry is ``(j/i)`` times the
    ``x2^j``-coefficient of the i-th trace function of ``A``.  Rows run to
    the genus of ``X``, columns to the genus of ``Y``.
    """
    field = corr.field
    g_rows, g_cols = corr.X.genus, corr.Y.genus
    A, unit = _monic_in_x1(corr.A)
    traces = newton_traces(A, g_rows)
    entries = []
    for i in range(1, g_rows + 1):
        t_i = traces[i - 1]
        row = []
        for j in range(1, g_cols + 1):
            c = t_i.coeff("x2", j)
            if c.is_zero():
                row.append(c)
            else:
                row.append(c * MPoly.const(field, field.coerce(mpq(j, i))))
        entries.append(row)
    return DiffMatrix(field, entries, rescale_unit=unit)


def rosati_dual(corr):
    """The role-swapped correspondence: exchange the two curves.

    The kernel polynomial has ``x1`` and ``x2`` exchanged (and is left as
    is — :func:`diff_matrix` performs the unit rescale); the models swap
    with their variables renamed so the new ``X`` again lives in ``x1``.
    """
    field = corr.field
    x1, x2 = MPoly.var(field, "x1"), MPoly.var(field, "x2")
    A_swapped = corr.A.substitute({"x1": x2, "x2": x1})
    newX = HyperellipticModel("x1", corr.Y.h.substitute({"x2": x1}))
    newY = HyperellipticModel("x2", corr.X.h.substitute({"x1": x2}))
    return Correspondence(corr.family, corr.kind, newX, newY, A_swapped,
                          field, values=corr.values, reduction=corr.reduction)


def rosati_product(corr):
    """The integer m with M(phi) * M(dual phi) = m * I.

    The dual matrix is computed from the role-swapped correspondence (the
    defining construction, valid for every family); the relation
    ``M(dual) = M^sigma`` for conjugate-paired families is a separate
    cross-check, not used here.  Raises :class:`NotScalar` with the
    offending product when the result is not an integer scalar matrix.
    """
    M = diff_matrix(corr)
    Md = diff_matrix(rosati_dual(corr))
    product = M * Md
    value = product.scalar_value()
    if value is None:
        raise NotScalar(product)
    if isinstance(value, NFElement):
        if not value.is_rational():
            raise NotScalar(product, "scalar %r is not rational" % value)
        value = value.as_rational()
    if hasattr(value, "canonical"):
        # finite-field scalar from a specialized correspondence
        return int(value.canonical())
    value = rat(value)
    if value.denominator != 1:
        raise NotScalar(product, "scalar %r is not an integer" % value)
    return int(value)


def _is_prime(n):
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def triangular_charpoly(M):
    """Dense characteristic polynomial (ascending) of a triangular matrix.

    For lower-triangular matrices the characteristic polynomial is the
    product of ``(x - diagonal entry)``; the input is checked.
    """
    if not M.is_lower_triangular():
        raise ValueError("matrix is not lower-triangular")
    field = M.field
    poly = [field.one]
    for d in M.diagonal():
        if not d.is_const():
            raise ValueError("diagonal entry %r is not constant" % d)
        dv = d.const_value()
        shifted = [field.zero] + poly           # x * poly
        scaled = [c * dv for c in poly] + [field.zero]
        poly = [a - b for a, b in zip(shifted, scaled)]
    return poly


def _matrix_annihilated(M, dense_rational):
    """Whether the rational polynomial (dense, ascending) kills the matrix."""
    field = M.field
    zero = MPoly.zero(field)
    size = M.rows
    acc = None
    for c in reversed(dense_rational):
        if acc is None:
            acc = _scalar_matrix(field, size, field.coerce(c))
        else:
            acc = acc * M
            acc = DiffMatrix(field, [
                [acc.entries[i][j] + (MPoly.const(field, field.coerce(c))
                                      if i == j else zero)
                 for j in range(size)]
                for i in range(size)])
    return all(acc.entries[i][j].is_zero()
               for i in range(size) for j in range(size))


def _scalar_matrix(field, size, value):
    zero = MPoly.zero(field)
    const = MPoly.const(field, value)
    return DiffMatrix(field, [
        [const if i == j else zero for j in range(size)]
        for i in range(size)])


def verify_rm_charpoly(n, i, kind):
    """Check the closed form of the Dickson correspondence matrix.

    For the index-``i`` Dickson correspondence in degree ``n`` (an odd
    prime), the trace matrix is diagonal-dominant with ``(j, j)`` entry
    ``zeta^{ij} + zeta^{-ij}``, and its characteristic polynomial is the
    minimal polynomial ``m`` of ``zeta + 1/zeta`` for the linear
    construction and ``m^2`` for the quadratic one.  Returns a report dict
    (with an ``annihilates`` flag telling whether ``m(M) = 0`` happens to
    hold as matrices — reported, not required); raises
    :class:`ClosedFormMismatch` on any disagreement.
    """
    if not _is_prime(n) or n == 2:
        raise ValueError("n must be an odd prime")
    rec = dickson_family(n, i)
    corr = build_construction(rec, kind)
    M = diff_matrix(corr)
    if not M.is_lower_triangular():
        raise ClosedFormMismatch("matrix is not lower-triangular")
    tower = rec.tower
    if tower.degree > 1:
        c = tower.gen()
    else:
        c = tower.coerce(-_real_cyclotomic(n)[0])
    u = _eval(dickson(i), c)
    g = corr.X.genus
    expected_diag = [_eval(dickson(j), u) for j in range(1, g + 1)]
    diag = [d.const_value() for d in M.diagonal()]
    if diag != expected_diag:
        raise ClosedFormMismatch(
            "diagonal %r does not match the closed form %r"
            % (diag, expected_diag))
    minimal = _real_cyclotomic(n)
    expected = minimal if kind == LINEAR else _poly_square(minimal)
    char = triangular_charpoly(M)
    target = [tower.coerce(c) for c in expected]
    if char != target:
        raise ClosedFormMismatch(
            "characteristic polynomial %r != expected %r" % (char, target))
    return {
        "n": n,
        "i": i,
        "kind": kind,
        "genus": g,
        "diagonal": diag,
        "charpoly": [rat(c) for c in expected],
        "annihilates": _matrix_annihilated(M, minimal),
    }


def _poly_square(dense):
    out = [rat(0)] * (2 * len(dense) - 1)
    for a, ca in enumerate(dense):
        for b, cb in enumerate(dense):
            out[a + b] += ca * cb
    return out


def _eval(poly_qq, value):
    tower = value.tower
    acc = tower.zero
    for c in reversed(poly_qq.as_dense("x")):
        acc = acc * value + tower.coerce(c.scalar())
    return acc
