"""Kernel structure of the correspondence isogenies.

Over a finite field where both curve polynomials split, the action of the
correspondence on 2-torsion is encoded by a matrix over F_2 built from root
multiplicities of the kernel polynomial: entry (i, j) is the multiplicity of
``x2 - delta_j`` in ``A(gamma_i, x2)`` plus the multiplicity at the
distinguished root ``delta_{2gY+1}``, mod 2.  The nullity of that matrix is
the 2-rank of ``ker(phi) ∩ Jac(X)[2]``, which together with the Rosati
multiplier ``m`` pins down the kernel group:

* ``m`` squarefree:  ``(Z/m)^g``;
* ``m = 4``:  ``(Z/4)^(2g - nu) x (Z/2)^(2(nu - g))``;
* ``m = 8``:  ``(Z/8)^(2g - nu) x (Z/4)^(nu - g) x (Z/2)^(nu - g)``.

:func:`full_kernel_report` runs the whole pipeline: build the construction,
re-derive ``m`` from the differential matrices (the catalog's declared value
is never trusted), specialize at a prime, extend to a splitting field, and
classify.
"""

from math import gcd

from .catalog import (
    BadReduction,
    Correspondence,
    HyperellipticModel,
    InvariantViolation,
    OnDiscriminantLocus,
    build_construction,
    specialize,
)
from .differential import rosati_product
from .fields import (
    FF,
    build_reduction,
    ff_embedding,
    ff_factor,
    ff_irreducible_orbit,
    ff_roots,
    up_eval,
)
from .poly import MPoly

__all__ = [
    "KernelReport",
    "NotSplit",
    "NuOutOfRange",
    "RepeatedRoots",
    "TwoTorsionMatrix",
    "UnsupportedM",
    "full_kernel_report",
    "kernel_group",
    "multiplicity_matrix",
    "splitting_extension",
    "two_rank",
]


class NotSplit(ArithmeticError):
    """A curve polynomial has roots outside the coefficient field."""

    def __init__(self, side, message):
        self.side = side
        super().__init__("%s: %s" % (side, message))


class RepeatedRoots(ArithmeticError):
    """A curve polynomial has a repeated root (curve is singular)."""

    def __init__(self, side, message):
        self.side = side
        super().__init__("%s: %s" % (side, message))


class NuOutOfRange(ValueError):
    """The 2-rank is outside the range the kernel formula permits."""


class UnsupportedM(ValueError):
    """No classification formula for this Rosati multiplier."""


class TwoTorsionMatrix:
    """The F_2 matrix of the correspondence acting on 2-torsion.

    ``entries[i][j]`` (0-indexed, values 0/1) is ``nu_{i,j} + nu_{i,2gY+1}``
    mod 2 for the recorded root orderings ``gamma`` (of the left curve) and
    ``delta`` (of the right curve, including the distinguished trailing
    roots that index the basis relations).  ``nu_table`` keeps the raw
    multiplicities of every ``delta`` in every row, and ``degree_drops``
    lists the rows i (1-indexed) where ``A(gamma_i, x2)`` lost x2-degree —
    the torsion formula presumes generic degree, so drops are surfaced.
    """

    def __init__(self, entries, gamma, delta, nu_table, degree_drops=()):
        self.entries = tuple(tuple(row) for row in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        self.gamma = tuple(gamma)
        self.delta = tuple(delta)
        self.nu_table = tuple(tuple(row) for row in nu_table)
        self.degree_drops = tuple(degree_drops)

    def entry(self, i, j):
        """1-indexed entry."""
        return self.entries[i - 1][j - 1]

    def __repr__(self):
        body = "\n".join("  " + "".join(str(v) for v in row)
                         for row in self.entries)
        return "TwoTorsionMatrix(%dx%d,\n%s)" % (self.rows, self.cols, body)


class KernelReport:
    """Classified kernel of a specialized correspondence isogeny.

    ``group`` is a tuple of ``(cyclic order, exponent)`` pairs, largest
    order first; its total order must equal ``m^genus``.
    """

    def __init__(self, family, construction, values, p, m, nu, genus, group,
                 matrix=None, seed=None):
        self.family = family
        self.construction = construction
        self.values = dict(values)
        self.p = p
        self.m = m
        self.nu = nu
        self.genus = genus
        self.group = tuple(group)
        self.matrix = matrix
        self.seed = seed
        order = 1
        for base, exp in self.group:
            order *= base ** exp
        if order != m ** genus:
            raise ValueError(
                "group order %d does not equal m^g = %d^%d" % (order, m, genus))

    def group_as_dict(self):
        return {base: exp for base, exp in self.group}

    def __repr__(self):
        shape = " x ".join("(Z/%d)^%d" % be for be in self.group) or "trivial"
        return "KernelReport(%s %s, p=%d, m=%d, nu=%d, %s)" % (
            self.family, self.construction, self.p, self.m, self.nu, shape)


def _dense_constant_coeffs(h, var):
    """Dense lowest-first coefficient list of a univariate curve polynomial."""
    out = []
    for k in range(h.degree(var) + 1):
        c = h.coeff(var, k)
        if not c.is_const():
            raise ValueError("polynomial is not univariate in %s" % var)
        out.append(c.const_value())
    return out


def _split_roots(h, var, field, side):
    """All roots of ``h`` in ``field``, or raise NotSplit / RepeatedRoots."""
    coeffs = _dense_constant_coeffs(h, var)
    degree = len(coeffs) - 1
    roots = ff_roots(coeffs, field)
    for r, mult in roots:
        if mult > 1:
            raise RepeatedRoots(side, "root %r has multiplicity %d"
                                % (r, mult))
    if len(roots) != degree:
        raise NotSplit(side, "only %d of %d roots lie in %r"
                       % (len(roots), degree, field))
    return [r for r, _ in roots]


def _check_root_list(h, var, field, roots, side):
    """Validate a caller-supplied complete simple-root list for ``h``."""
    coeffs = _dense_constant_coeffs(h, var)
    if len(roots) != len(coeffs) - 1:
        raise ValueError("%s: %d roots supplied for degree %d"
                         % (side, len(roots), len(coeffs) - 1))
    if len({r.canonical() for r in roots}) != len(roots):
        raise ValueError("%s: repeated entries in the root list" % side)
    for r in roots:
        if up_eval(field, coeffs, r):
            raise ValueError("%s: %r is not a root" % (side, r))


def multiplicity_matrix(corr, gamma=None, delta=None):
    """The 2-torsion matrix of a specialized correspondence.

    Both curve polynomials must split completely over ``corr.field`` with
    simple roots.  ``gamma`` and ``delta`` override the root orderings
    (default: sorted by canonical integer, found by factoring); supplied
    lists are validated against the curve polynomials.  The orderings fix
    the torsion bases, but the matrix nullity does not depend on them.
    """
    field = corr.field
    if getattr(field, "p", 0) == 2:
        raise ValueError("2-torsion analysis needs odd characteristic")
    g_X, g_Y = corr.X.genus, corr.Y.genus
    if gamma is None:
        gamma = _split_roots(corr.X.h, corr.X.var, field, "X")
    else:
        gamma = list(gamma)
        _check_root_list(corr.X.h, corr.X.var, field, gamma, "gamma")
    if delta is None:
        delta = _split_roots(corr.Y.h, corr.Y.var, field, "Y")
    else:
        delta = list(delta)
        _check_root_list(corr.Y.h, corr.Y.var, field, delta, "delta")

    deg_A = corr.A.degree("x2")
    drops = []
    nu_table = []
    for i in range(g_X * 2):
        a_i = corr.A.substitute({"x1": MPoly.const(field, gamma[i])})
        if a_i.degree("x2") < deg_A:
            drops.append(i + 1)
        coeffs = _dense_constant_coeffs(a_i, "x2")
        row = []
        for d in delta:
            # multiplicity of (x2 - d) by repeated exact division
            mult = 0
            rem = coeffs
            while len(rem) > 1:
                q, r = _linear_divmod(rem, d, field)
                if r:
                    break
                mult += 1
                rem = q
            row.append(mult)
        nu_table.append(row)
    anchor = 2 * g_Y  # 0-indexed position of delta_{2gY+1}
    entries = [[(row[j] + row[anchor]) % 2 for j in range(2 * g_Y)]
               for row in nu_table]
    return TwoTorsionMatrix(entries, gamma, delta, nu_table, drops)


def _linear_divmod(coeffs, root, field):
    """Divide a dense polynomial by (x - root); return (quotient, remainder)."""
    d = len(coeffs) - 1
    q = [field.zero] * d
    acc = coeffs[d]
    for k in range(d - 1, -1, -1):
        q[k] = acc
        acc = coeffs[k] + acc * root
    return q, acc


def two_rank(matrix):
    """Nullity of the 2-torsion matrix over F_2 (bitmask elimination)."""
    if isinstance(matrix, TwoTorsionMatrix):
        rows, cols = matrix.entries, matrix.cols
    else:
        rows, cols = matrix, (len(matrix[0]) if matrix else 0)
    masks = []
    for row in rows:
        bits = 0
        for j, v in enumerate(row):
            if v % 2:
                bits |= 1 << j
        masks.append(bits)
    rank = 0
    for col in range(cols):
        bit = 1 << col
        piv = next((i for i in range(rank, len(masks)) if masks[i] & bit),
                   None)
        if piv is None:
            continue
        masks[rank], masks[piv] = masks[piv], masks[rank]
        for i in range(len(masks)):
            if i != rank and masks[i] & bit:
                masks[i] ^= masks[rank]
        rank += 1
    return cols - rank


def kernel_group(m, genus, nu=None):
    """Kernel group as ``((order, exponent), ...)``, largest order first.

    ``nu`` (the 2-rank of the kernel's intersection with the 2-torsion) is
    required exactly when ``m`` is 4 or 8 and must satisfy
    ``genus <= nu <= 2*genus``; squarefree ``m`` needs no rank data.
    """
    if m not in (2, 3, 4, 8):
        raise UnsupportedM("no classification for m = %r" % (m,))
    if m in (2, 3):
        if nu is not None:
            raise ValueError("nu only applies to m = 4 or 8")
        return ((m, genus),)
    if nu is None:
        raise ValueError("m = %d needs the 2-rank nu" % m)
    if not genus <= nu <= 2 * genus:
        raise NuOutOfRange("nu = %d outside [g, 2g] = [%d, %d]"
                           % (nu, genus, 2 * genus))
    if m == 4:
        parts = ((4, 2 * genus - nu), (2, 2 * (nu - genus)))
    else:
        parts = ((8, 2 * genus - nu), (4, nu - genus), (2, nu - genus))
    return tuple((base, exp) for base, exp in parts if exp > 0)


def splitting_extension(corr):
    """Base-change a specialized correspondence so both curves split.

    Factors both curve polynomials over the current (small) field, finds
    the least common extension degree of the irreducible factors, and maps
    every coefficient through the canonical embedding.  The roots are then
    extracted factor by factor over the big field — each factor has small
    degree, so no large-degree root search ever runs there.  Repeated
    factors raise :class:`RepeatedRoots` immediately (no extension can
    separate them).

    Returns ``(corr', gamma, delta)`` with the complete sorted root lists
    of the two curve polynomials over the possibly extended field.
    """
    field = corr.field
    factored = []
    lcm = 1
    for model, side in ((corr.X, "X"), (corr.Y, "Y")):
        coeffs = _dense_constant_coeffs(model.h, model.var)
        facs = ff_factor(coeffs, field)
        for fac, mult in facs:
            if mult > 1:
                raise RepeatedRoots(side, "factor of multiplicity %d" % mult)
            d = len(fac) - 1
            lcm = lcm * d // gcd(lcm, d)
        factored.append(facs)
    if lcm == 1:
        big, emb = field, lambda c: c
        out = corr
    else:
        big = FF(field.p, field.k * lcm)
        emb = ff_embedding(field.p, field.k, big.k)
        X = HyperellipticModel(corr.X.var,
                               corr.X.h.map_coefficients(emb, big))
        Y = HyperellipticModel(corr.Y.var,
                               corr.Y.h.map_coefficients(emb, big))
        A = corr.A.map_coefficients(emb, big)
        out = Correspondence(corr.family, corr.kind, X, Y, A, big,
                             values=corr.values, reduction=corr.reduction)
    root_lists = []
    for facs in factored:
        roots = []
        for fac, _mult in facs:
            roots.extend(_factor_roots(fac, field, big, emb))
        root_lists.append(sorted(roots, key=lambda r: r.canonical()))
    return out, root_lists[0], root_lists[1]


def _factor_roots(fac, base, big, emb):
    """All roots in ``big`` of a monic irreducible factor over ``base``.

    The coefficients live in the embedded base field, so the roots form one
    orbit under the base Frobenius ``z -> z^(base.q)`` and the shared
    orbit-walk root finder applies.
    """
    if len(fac) - 1 == 1:
        return [emb(-fac[0])]
    return ff_irreducible_orbit([emb(c) for c in fac], base.q, big,
                                salt=b"factor-root")


def _specialize_above(corr_generic, record, values, p, seed):
    """Specialize at a prime above p, searching conjugate primes if needed.

    With an explicit ``seed`` only that reduction is tried.  Otherwise the
    conjugate reductions are scanned in order until one avoids both the
    discriminant locus and reduction failures; if every prime above p is
    bad, the last error propagates.
    """
    seeds = (seed,) if seed is not None else range(max(1, record.tower.degree))
    tried = set()
    last = None
    for s in seeds:
        red = build_reduction(record.tower, p, s)
        key = tuple(v.canonical() for v in red.images)
        if key in tried:
            continue
        tried.add(key)
        try:
            return specialize(corr_generic, values, reduction=red), s
        except (OnDiscriminantLocus, BadReduction) as exc:
            last = exc
    raise last


def _classify_at_prime(corr_generic, record, values, p, seed, m):
    sp, used_seed = _specialize_above(corr_generic, record, values, p, seed)
    sp, gamma, delta = splitting_extension(sp)
    matrix = multiplicity_matrix(sp, gamma=gamma, delta=delta)
    nu = two_rank(matrix)
    genus = corr_generic.X.genus
    if m == 2 and nu != genus:
        raise NuOutOfRange(
            "m = 2 forces the kernel inside the 2-torsion with rank g = %d, "
            "got %d" % (genus, nu))
    if m == 3 and nu != 0:
        raise NuOutOfRange(
            "m = 3 kernel meets the 2-torsion trivially, got rank %d" % nu)
    group = kernel_group(m, genus, nu if m in (4, 8) else None)
    return matrix, nu, group, used_seed


def full_kernel_report(record, construction, values, p, seed=None,
                       check_prime=None):
    """Specialize, build the torsion matrix, and classify the kernel.

    ``m`` is re-derived from the differential matrices of the generic
    fibre — the catalog's declared multiplier is treated as an expectation,
    not an input.  ``seed`` picks a specific prime above ``p`` (default:
    scan the conjugates for one where the specialization is good).  With
    ``check_prime`` the classification is repeated at a second prime and
    the group structures must agree (the kernel lives in characteristic
    zero, so they always should).
    """
    corr = build_construction(record, construction)
    m = rosati_product(corr)
    matrix, nu, group, used = _classify_at_prime(corr, record, values, p,
                                                 seed, m)
    if check_prime is not None:
        _, nu2, group2, _ = _classify_at_prime(corr, record, values,
                                               check_prime, seed, m)
        if group2 != group:
            raise InvariantViolation(
                record.name, "prime independence",
                "kernel %r at p=%d but %r at p=%d"
                % (group, p, group2, check_prime))
    return KernelReport(record.name, construction, values, p, m, nu,
                        corr.X.genus, group, matrix=matrix, seed=used)
