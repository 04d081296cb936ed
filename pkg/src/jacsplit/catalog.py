"""Catalog of correspondence families between hyperelliptic curves.

A *family record* bundles everything needed to build a pair of hyperelliptic
curves whose Jacobians are linked by an explicit correspondence: a coefficient
field (a :class:`~jacsplit.fields.FieldTower` with involution), a polynomial
``f`` (and a rule producing its partner ``g``), the kernel polynomial ``A``
of the correspondence, and the declared invariants — symmetry sign, Rosati
multiplier ``m``, normalization constants, and expected kernel structure.

Six fixed families (pair degrees 7, 11, 13, 15, 21 and 31) are loaded
verbatim from packaged fixture files; the loader never normalizes or rewrites
them.  Two parametric families are generated in code: the cyclic family
``x^n`` over ``Q(zeta_n)`` and the Dickson family ``D_n`` over the real
subfield ``Q(zeta_n + 1/zeta_n)``.

The two *constructions* attach curves to a record: the linear construction
``y^2 = f(x) + s`` (odd degree ``n``, genus ``(n-1)/2``) and the quadratic
construction ``y^2 = f(x)^2 + s1*f(x) + s2`` (degree ``2n``, genus ``n-1``).
"""

import hashlib
from pathlib import Path

from .fields import (
    DivisionByZero,
    FieldTower,
    NoPrimeAbove,
    QQ,
    nf_conjugate,
    rat,
    up_divmod,
)
from .poly import MPoly, mp, poly_divrem, poly_gcd, poly_resultant

# ---------------------------------------------------------------------------
# errors


class ParseError(ValueError):
    """A catalog fixture file is missing, truncated, or malformed."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        where = self.path if line is None else "%s:%d" % (self.path, line)
        super().__init__("%s: %s" % (where, message))


class InvariantViolation(ValueError):
    """Loaded family data contradicts one of its declared invariants."""

    def __init__(self, family, check, message):
        self.family = family
        self.check = check
        super().__init__("%s: invariant %r failed: %s" % (family, check, message))


class FactorizationFails(ArithmeticError):
    """``A`` does not divide ``f(x1) - g(x2)``; carries the nonzero remainder."""

    def __init__(self, family, remainder, message="A does not divide f(x1) - g(x2)"):
        self.family = family
        self.remainder = remainder
        super().__init__("%s: %s (remainder %r)" % (family, message, remainder))


class SymmetryFails(ArithmeticError):
    """``A(x2, x1)`` is not the declared sign times ``A^sigma(x1, x2)``."""

    def __init__(self, family, message):
        self.family = family
        super().__init__("%s: %s" % (family, message))


class ConstantMismatch(ArithmeticError):
    """A declared normalization constant disagrees with the recomputed ratio."""

    def __init__(self, family, which, lhs, rhs):
        self.family = family
        self.which = which
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(
            "%s: %s relation fails: %r != %r" % (family, which, lhs, rhs))


class OnDiscriminantLocus(ValueError):
    """A specialization lands where one of the two curves degenerates."""

    def __init__(self, curve, message):
        self.curve = curve
        super().__init__("curve %s degenerates: %s" % (curve, message))


class BadReduction(ValueError):
    """Reduction mod p hits a denominator or drops the model degree."""

    def __init__(self, p, message):
        self.p = p
        super().__init__("bad reduction at %d: %s" % (p, message))


# ---------------------------------------------------------------------------
# records

#: tokens for the partner rule turning f into the second polynomial g
PARTNER_RULES = ("sigma", "negsigma", "self")

#: admissible Rosati multipliers for the splitting families
ROSATI_MULTIPLIERS = (1, 2, 3, 4, 8)

LINEAR, QUADRATIC = "linear", "quadratic"
CONSTRUCTIONS = (LINEAR, QUADRATIC)


class FamilyRecord:
    """One correspondence family, as loaded or generated.

    Attributes
    ----------
    name, kind:
        ``f7`` ... ``f31`` with kind ``pair``, or ``cyclic-n`` / ``dickson-n``.
    n:
        degree of ``f`` (always odd here).
    tower:
        coefficient field, a :class:`FieldTower` whose involution realizes
        the conjugation used by the partner rule and the symmetry relation.
    f:
        the defining polynomial, in ``x`` (coefficients may involve ``t``).
    A:
        kernel polynomial of the correspondence, in ``x1``, ``x2`` (and ``t``).
    partner:
        one of :data:`PARTNER_RULES`; ``partner_poly`` applies it.
    lead:
        declared leading coefficient of ``f``.
    symmetry:
        declared sign in ``A(x2, x1) = sign * A^sigma(x1, x2)``, or ``None``
        when the family satisfies no such two-sided relation (cyclic).
    m:
        declared Rosati multiplier (``None`` for Dickson families, whose
        correspondences induce real multiplication rather than ``sqrt(m)``).
    kappa, lam:
        normalization constants tying consecutive coefficients of ``f``
        (and of ``f^2``); ``None`` for the parametric families.
    nu:
        expected 2-rank data ``{"linear": nu, "quadratic": nu}`` for the
        kernel computation, when declared.
    kernel_cases:
        worked specializations with known kernel structure, as dicts with
        keys ``construction``, ``p``, ``values``, ``groups``.
    weil:
        characteristic-polynomial test data ``{construction: (q, g, [w_i])}``.
    param:
        the exponent ``e`` (cyclic) or index ``i`` (Dickson), else ``None``.
    """

    def __init__(self, name, kind, n, tower, f, A, partner, lead,
                 symmetry=None, m=None, kappa=None, lam=None, nu=None,
                 kernel_cases=(), weil=None, param=None, source=None):
        self.name = name
        self.kind = kind
        self.n = n
        self.tower = tower
        self.f = f
        self.A = A
        self.partner = partner
        self.lead = lead
        self.symmetry = symmetry
        self.m = m
        self.kappa = kappa
        self.lam = lam
        self.nu = nu
        self.kernel_cases = tuple(kernel_cases)
        self.weil = dict(weil) if weil else {}
        self.param = param
        self.source = source

    @property
    def has_t(self):
        """Whether the family carries the extra parameter ``t``."""
        return self.f.degree("t") > 0

    def partner_poly(self):
        """The second polynomial ``g``: f itself, f^sigma, or -f^sigma."""
        if self.partner == "self":
            return self.f
        fs = self.f.map_coefficients(nf_conjugate, self.tower)
        return -fs if self.partner == "negsigma" else fs

    def parameters(self, construction):
        """Names of the free parameters of the given construction."""
        base = ("s",) if construction == LINEAR else ("s1", "s2")
        return (("t",) if self.has_t else ()) + base

    def __repr__(self):
        return "FamilyRecord(%s, n=%d, m=%r)" % (self.name, self.n, self.m)


class HyperellipticModel:
    """A curve ``y^2 = h(var)`` with its genus and degree parity."""

    def __init__(self, var, h):
        self.var = var
        self.h = h
        d = h.degree(var)
        self.degree = d
        self.genus = (d - 1) // 2
        self.parity = "odd" if d % 2 else "even"

    def __repr__(self):
        return "HyperellipticModel(y^2 = h(%s), degree %d, genus %d)" % (
            self.var, self.degree, self.genus)


class Correspondence:
    """A pair of curves plus the kernel polynomial ``A`` relating them.

    ``X`` lives in ``x1`` and ``Y`` in ``x2``, so the curve of the
    correspondence is cut out by ``y1 - y2`` and ``A(x1, x2)`` on the product.
    ``values`` and ``reduction`` record how a specialization was formed;
    both are ``None`` for the generic fibre.
    """

    def __init__(self, family, kind, X, Y, A, field, values=None, reduction=None):
        self.family = family
        self.kind = kind
        self.X = X
        self.Y = Y
        self.A = A
        self.field = field
        self.values = values
        self.reduction = reduction

    def __repr__(self):
        tag = "generic" if self.values is None else "specialized"
        return "Correspondence(%s, %s, %s, genus %d -> %d)" % (
            self.family.name, self.kind, tag, self.X.genus, self.Y.genus)


# ---------------------------------------------------------------------------
# expected invariants of the twelve constructions
#
# Columns: family, construction, genus, family dimension (number of free
# parameters), Rosati multiplier, kernel group as {order: multiplicity},
# and a display label for the endomorphism field of the generic fibre.

CONSTRUCTION_TABLE = (
    ("f7", LINEAR, 3, 2, 2, {2: 3}, "Q(sqrt(-7))"),
    ("f11", LINEAR, 5, 1, 3, {3: 5}, "Q(sqrt(-11))"),
    ("f7", QUADRATIC, 6, 3, 2, {2: 6}, "Q(sqrt(-7))"),
    ("f13", LINEAR, 6, 2, 3, {3: 6}, "Q(sqrt(-3*sqrt(13)+1))"),
    ("f15", LINEAR, 7, 2, 4, {4: 4, 2: 6}, "Q(sqrt(-15))"),
    ("f11", QUADRATIC, 10, 2, 3, {3: 10}, "Q(sqrt(-11))"),
    ("f21", LINEAR, 10, 1, 4, {4: 9, 2: 2}, "Q(sqrt(-7))"),
    ("f13", QUADRATIC, 12, 3, 3, {3: 12}, "Q(sqrt(-3*sqrt(13)+1))"),
    ("f15", QUADRATIC, 14, 3, 4, {4: 9, 2: 10}, "Q(sqrt(-15))"),
    ("f31", LINEAR, 15, 1, 8, {8: 5, 4: 10, 2: 10}, "sextic CM field"),
    ("f21", QUADRATIC, 20, 2, 4, {4: 19, 2: 2}, "Q(sqrt(-7))"),
    ("f31", QUADRATIC, 30, 2, 8, {8: 11, 4: 19, 2: 19}, "sextic CM field"),
)


def expected_kernel(m, genus, nu=None):
    """Kernel group {order: multiplicity} implied by ``m`` and the 2-rank.

    For squarefree ``m`` the kernel is ``(Z/m)^genus``.  For ``m = 4`` it is
    ``(Z/4)^(2g - nu) x (Z/2)^(2(nu - g))`` and for ``m = 8`` it is
    ``(Z/8)^(2g - nu) x (Z/4)^(nu - g) x (Z/2)^(nu - g)``, where ``nu`` is
    the 2-rank of the multiplicity matrix of ``A`` on the branch points.
    """
    if m in (1, 2, 3):
        return {m: genus} if m > 1 else {}
    if nu is None:
        raise ValueError("m = %d requires the 2-rank nu" % m)
    if not genus <= nu <= 2 * genus:
        raise ValueError("nu = %d out of range for genus %d" % (nu, genus))
    if m == 4:
        return _drop_zero({4: 2 * genus - nu, 2: 2 * (nu - genus)})
    if m == 8:
        return _drop_zero({8: 2 * genus - nu, 4: nu - genus, 2: nu - genus})
    raise ValueError("no kernel formula for m = %r" % m)


def _drop_zero(groups):
    return {k: v for k, v in groups.items() if v}


# ---------------------------------------------------------------------------
# fixture parsing

_FIXTURE_DIR = Path(__file__).parent / "fixtures"
_FIXTURE_FAMILIES = ("f7", "f11", "f13", "f15", "f21", "f31")


def _verify_checksum(path, text):
    lines = text.split("\n")
    head = lines[0] if lines else ""
    if not head.startswith("checksum sha256:"):
        raise ParseError(path, 1, "missing checksum header")
    declared = head.split(":", 1)[1].strip()
    body = "\n".join(lines[1:])
    actual = hashlib.sha256(body.encode()).hexdigest()
    if actual != declared:
        raise ParseError(path, 1, "checksum mismatch (file edited or corrupt)")
    return lines


def _vec(tok):
    return [rat(c) for c in tok.split(",")]


def _element(tower, tok, path, lineno):
    try:
        v = _vec(tok)
        if len(v) > tower.degree:
            raise ValueError("vector longer than field degree")
        return tower.element(v + [0] * (tower.degree - len(v)))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(path, lineno, "bad field element %r: %s" % (tok, exc))


def _layers(tower, toks, path, lineno):
    """Parse ``tdeg:vec`` groups into [(tdeg, element)] pairs."""
    out = []
    for tok in toks:
        if ":" not in tok:
            raise ParseError(path, lineno, "expected tdeg:coeffs, got %r" % tok)
        td, vec = tok.split(":", 1)
        try:
            td = int(td)
        except ValueError:
            raise ParseError(path, lineno, "bad t-degree %r" % td)
        out.append((td, _element(tower, vec, path, lineno)))
    return out


def _parse_assignments(tok, path, lineno):
    values = {}
    for item in tok.split(","):
        if "=" not in item:
            raise ParseError(path, lineno, "bad assignment %r" % item)
        k, v = item.split("=", 1)
        values[k] = rat(v)
    return values


def load_weil_table(path):
    """Read a characteristic-polynomial table file: (q, g, [w_1 .. w_g])."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(path, None, "cannot read table: %s" % exc)
    lines = _verify_checksum(path, text)
    q = g = None
    ws = []
    for i, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        if line.startswith("q "):
            q = int(line[2:])
        elif line.startswith("g "):
            g = int(line[2:])
        else:
            try:
                ws.append(int(line))
            except ValueError:
                raise ParseError(path, i, "bad coefficient %r" % line)
    if q is None or g is None:
        raise ParseError(path, None, "missing q or g header")
    if len(ws) != g:
        raise ParseError(path, None,
                         "expected %d coefficients, found %d" % (g, len(ws)))
    return q, g, ws


def _load_family(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(path, None, "cannot read fixture: %s" % exc)
    lines = _verify_checksum(path, text)

    fields = {}
    gens = []
    sigmas = {}
    f_rows = []
    a_rows = []
    kernel_rows = []
    weil_files = {}
    elt_keys = []  # (key, token, lineno) resolved once the tower exists

    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        key, args = toks[0], toks[1:]
        if key in ("family", "partner"):
            fields[key] = args[0]
        elif key in ("n", "m"):
            fields[key] = int(args[0])
        elif key == "symmetry":
            fields[key] = int(args[0])
        elif key == "lead":
            fields[key] = rat(args[0])
        elif key == "gen":
            gens.append((args[0], [_vec(c) for c in args[1:]]))
        elif key == "sigma":
            sigmas[args[0]] = _vec(args[1])
        elif key in ("kappa", "lambda"):
            elt_keys.append((key, args[0], lineno))
        elif key == "f":
            f_rows.append((int(args[0]), args[1:], lineno))
        elif key == "A":
            a_rows.append((int(args[0]), int(args[1]), args[2:], lineno))
        elif key == "nu":
            fields["nu"] = {LINEAR: int(args[0]), QUADRATIC: int(args[1])}
        elif key == "kernel":
            groups = {}
            for tok in args[3:]:
                order, mult = tok.split(":")
                groups[int(order)] = int(mult)
            kernel_rows.append({
                "construction": args[0],
                "p": int(args[1]),
                "values": _parse_assignments(args[2], path, lineno),
                "groups": groups,
            })
        elif key == "weil":
            weil_files[args[0]] = args[1]
        else:
            raise ParseError(path, lineno, "unknown key %r" % key)

    for req in ("family", "n", "m", "lead", "partner", "symmetry"):
        if req not in fields:
            raise ParseError(path, None, "missing %r line" % req)
    if not gens:
        raise ParseError(path, None, "missing generator lines")
    for name, _ in gens:
        if name not in sigmas:
            raise ParseError(path, None, "missing sigma image for %r" % name)

    try:
        tower = FieldTower(gens, sigma=[sigmas[name] for name, _ in gens])
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(path, None, "bad field tower: %s" % exc)

    consts = {}
    for key, tok, lineno in elt_keys:
        consts[key] = _element(tower, tok, path, lineno)

    f_terms = []
    for xdeg, toks, lineno in f_rows:
        for td, elt in _layers(tower, toks, path, lineno):
            f_terms.append((elt, {"x": xdeg, "t": td}))
    a_terms = []
    for i, j, toks, lineno in a_rows:
        for td, elt in _layers(tower, toks, path, lineno):
            a_terms.append((elt, {"x1": i, "x2": j, "t": td}))
    if not f_terms or not a_terms:
        raise ParseError(path, None, "missing f or A data")

    weil = {}
    for construction, fname in weil_files.items():
        weil[construction] = load_weil_table(path.parent / fname)

    rec = FamilyRecord(
        name=fields["family"],
        kind="pair",
        n=fields["n"],
        tower=tower,
        f=mp(tower, [(c, e) for c, e in f_terms]),
        A=mp(tower, [(c, e) for c, e in a_terms]),
        partner=fields["partner"],
        lead=tower.coerce(fields["lead"]),
        symmetry=fields["symmetry"],
        m=fields["m"],
        kappa=consts.get("kappa"),
        lam=consts.get("lambda"),
        nu=fields.get("nu"),
        kernel_cases=kernel_rows,
        weil=weil,
        source=str(path),
    )
    _check_record_invariants(rec)
    return rec


def _check_record_invariants(rec):
    name = rec.name
    if rec.partner not in PARTNER_RULES:
        raise InvariantViolation(name, "partner rule",
                                 "unknown rule %r" % rec.partner)
    if rec.m is not None and rec.m not in ROSATI_MULTIPLIERS:
        raise InvariantViolation(name, "multiplier",
                                 "m = %r not in %r" % (rec.m, ROSATI_MULTIPLIERS))
    if rec.symmetry not in (None, 1, -1):
        raise InvariantViolation(name, "symmetry sign",
                                 "sign %r not in {+1, -1}" % rec.symmetry)
    if rec.n % 2 == 0 or rec.n < 3:
        raise InvariantViolation(name, "degree parity",
                                 "n = %d is not an odd degree >= 3" % rec.n)
    if rec.f.degree("x") != rec.n:
        raise InvariantViolation(
            name, "degree of f",
            "deg f = %d, declared n = %d" % (rec.f.degree("x"), rec.n))
    lead = rec.f.coeff("x", rec.n)
    if lead != MPoly.const(rec.tower, rec.lead):
        raise InvariantViolation(
            name, "leading coefficient",
            "lead of f is %r, declared %r" % (lead, rec.lead))
    d1, d2 = rec.A.degree("x1"), rec.A.degree("x2")
    if d1 != d2 or not 1 <= d1 < rec.n:
        raise InvariantViolation(
            name, "kernel degree",
            "deg A = (%d, %d), expected equal degrees below n" % (d1, d2))
    if rec.nu is not None:
        for construction, nu in rec.nu.items():
            g = rec.n - 1 if construction == QUADRATIC else (rec.n - 1) // 2
            if not g <= nu <= 2 * g:
                raise InvariantViolation(
                    name, "2-rank range",
                    "nu = %d outside [g, 2g] = [%d, %d]" % (nu, g, 2 * g))


def load_catalog(path=None):
    """Load all eight family records.

    ``path`` is the fixture directory; ``None`` selects the packaged data.
    The six fixed families come from ``<path>/f*.fix`` (checksummed,
    loaded verbatim); the cyclic and Dickson families are generated with
    their smallest parameters (use :func:`cyclic_family` and
    :func:`dickson_family` directly for other values of ``n``).

    Raises :class:`ParseError` for unreadable or malformed fixtures and
    :class:`InvariantViolation` when loaded data contradicts its own
    declarations.
    """
    if path is None:
        base = _FIXTURE_DIR
    else:
        if isinstance(path, str) and not path.strip():
            raise ParseError("", None, "empty catalog path")
        base = Path(path)
    if not base.is_dir():
        raise ParseError(base, None, "fixture directory does not exist")
    records = []
    for fam in _FIXTURE_FAMILIES:
        records.append(_load_family(base / ("%s.fix" % fam)))
    records.append(cyclic_family(3))
    records.append(dickson_family(3))
    return records


# ---------------------------------------------------------------------------
# parametric families


def dickson(n):
    """The degree-``n`` Dickson polynomial with parameter 1, over Q.

    Defined by ``D_0 = 2``, ``D_1 = x`` and ``D_k = x*D_{k-1} - D_{k-2}``;
    it satisfies ``D_n(z + 1/z) = z^n + 1/z^n``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    prev = MPoly.const(QQ, 2)
    cur = MPoly.var(QQ, "x")
    if n == 0:
        return prev
    x = cur
    for _ in range(n - 1):
        prev, cur = cur, x * cur - prev
    return cur


def _cyclotomic(n):
    """Dense rational coefficient list of the n-th cyclotomic polynomial."""
    f = [rat(-1)] + [rat(0)] * (n - 1) + [rat(1)]
    for d in range(1, n):
        if n % d == 0:
            q, r = up_divmod(QQ, f, _cyclotomic(d))
            if any(r):
                raise ArithmeticError("cyclotomic division not exact")
            f = q
    return f


def _real_cyclotomic(n):
    """Dense minimal polynomial of ``zeta_n + 1/zeta_n`` over Q (monic).

    Eliminates ``z`` between the n-th cyclotomic polynomial and
    ``z^2 - y*z + 1`` (the relation ``y = z + 1/z``); the resultant is the
    square of the sought polynomial up to a constant, so the squarefree
    part is taken and the result made monic.
    """
    phi = _cyclotomic(n)
    pz = mp(QQ, [(c, {"t": k}) for k, c in enumerate(phi) if c])
    rel = mp(QQ, [(1, {"t": 2}), (-1, {"t": 1, "x": 1}), (1, {})])
    res = poly_resultant(pz, rel, "t")
    rep = poly_gcd(res, res.derivative("x"))
    rep = rep * MPoly.const(QQ, QQ.inv(rep.coeff("x", rep.degree("x")).scalar()))
    sqfree, rem = poly_divrem(res, rep, "x")
    if rem:
        raise ArithmeticError("squarefree part division not exact")
    lead = sqfree.coeff("x", sqfree.degree("x")).scalar()
    sqfree = sqfree * MPoly.const(QQ, QQ.inv(lead))
    return [sqfree.coeff("x", k).scalar() for k in range(sqfree.degree("x") + 1)]


def _eval_tower(poly_qq, value):
    """Evaluate a univariate rational polynomial at a tower element."""
    tower = value.tower
    acc = tower.zero
    for c in reversed(poly_qq.as_dense("x")):
        acc = acc * value + tower.coerce(c.scalar())
    return acc


def cyclic_family(n, e=1):
    """The family ``x^n`` over ``Q(zeta_n)`` with kernel ``x1 - zeta^e x2``.

    ``n`` must be odd and at least 3; ``e`` ranges over ``1 .. n-1``.  The
    correspondence identifies points under the order-``n`` rotation, so the
    Rosati product is the identity (``m = 1``).  No two-sided symmetry sign
    is declared: swapping the roles sends ``A`` to a unit multiple of its
    conjugate, not to ``+/- A^sigma``.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError("n must be odd and >= 3")
    if not 1 <= e <= n - 1:
        raise ValueError("exponent e must lie in 1 .. n-1")
    phi = _cyclotomic(n)
    deg = len(phi) - 1
    _, zinv = up_divmod(QQ, [rat(0)] * (n - 1) + [rat(1)], phi)
    zinv = list(zinv) + [rat(0)] * (deg - len(zinv))
    tower = FieldTower(
        (("z%d" % n, [c for c in phi[:-1]]),), sigma=[zinv])
    z = tower.gen()
    f = mp(tower, [(tower.one, {"x": n})])
    A = mp(tower, [(tower.one, {"x1": 1}), (-(z ** e), {"x2": 1})])
    return FamilyRecord(
        name="cyclic-%d" % n, kind="cyclic", n=n, tower=tower, f=f, A=A,
        partner="self", lead=tower.one, symmetry=None, m=1, param=e)


def dickson_family(n, i=1):
    """The family ``D_n`` over the real field ``Q(c)``, ``c = zeta_n + 1/zeta_n``.

    The kernel polynomial of index ``i`` is
    ``A = x1^2 - u*x1*x2 + x2^2 + (u^2 - 4)`` with ``u = D_i(c)``, and
    the product over all indices satisfies
    ``(x1 - x2) * prod_i A_i = D_n(x1) - D_n(x2)``.  The involution acts
    trivially (the field is totally real), so the symmetry sign is +1.
    These correspondences induce real multiplication; no single Rosati
    multiplier is declared.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError("n must be odd and >= 3")
    if not 1 <= i <= (n - 1) // 2:
        raise ValueError("index i must lie in 1 .. (n-1)/2")
    psi = _real_cyclotomic(n)
    if len(psi) == 2:
        # degree-one real field: c is rational (n = 3 gives c = -1)
        tower = FieldTower((), sigma=())
        c = tower.coerce(-psi[0])
    else:
        # the involution is trivial on a totally real field
        ident = [[rat(1) if k == 1 else rat(0) for k in range(len(psi) - 1)]]
        tower = FieldTower((("c%d" % n, psi[:-1]),), sigma=ident)
        c = tower.gen()
    u = _eval_tower(dickson(i), c)
    f = dickson(n).map_coefficients(tower.coerce, tower)
    A = mp(tower, [
        (tower.one, {"x1": 2}),
        (-u, {"x1": 1, "x2": 1}),
        (tower.one, {"x2": 2}),
        (u * u - tower.coerce(4), {}),
    ])
    return FamilyRecord(
        name="dickson-%d" % n, kind="dickson", n=n, tower=tower, f=f, A=A,
        partner="self", lead=tower.one, symmetry=1, m=None, param=i)


# ---------------------------------------------------------------------------
# verification operations


def verify_factorization(rec):
    """Check ``A | f(x1) - g(x2)`` and return the cofactor ``B``.

    For the parametric families the full product identity is verified as
    well: the cyclic kernels multiply to ``x1^n - x2^n`` and the Dickson
    kernels (times ``x1 - x2``) to ``D_n(x1) - D_n(x2)``.  Raises
    :class:`FactorizationFails` with the offending remainder or product.
    """
    tower = rec.tower
    x1, x2 = MPoly.var(tower, "x1"), MPoly.var(tower, "x2")
    f1 = rec.f.substitute({"x": x1})
    g2 = rec.partner_poly().substitute({"x": x2})
    diff = f1 - g2
    quotient, remainder = poly_divrem(diff, rec.A, "x1")
    if remainder:
        raise FactorizationFails(rec.name, remainder)
    if rec.kind == "cyclic":
        z = tower.gen()
        product = MPoly.const(tower, tower.one)
        for e in range(rec.n):
            product = product * (x1 - MPoly.const(tower, z ** e) * x2)
        target = f1 - g2
        if product != target:
            raise FactorizationFails(
                rec.name, product - target,
                "product of the n rotation kernels is not x1^n - x2^n")
    elif rec.kind == "dickson":
        # rebuild every index over this record's own field and multiply up
        if tower.degree > 1:
            c = tower.gen()
        else:
            c = tower.coerce(-_real_cyclotomic(rec.n)[0])
        product = x1 - x2
        for i in range(1, (rec.n - 1) // 2 + 1):
            u = _eval_tower(dickson(i), c)
            Ai = mp(tower, [
                (tower.one, {"x1": 2}),
                (-u, {"x1": 1, "x2": 1}),
                (tower.one, {"x2": 2}),
                (u * u - tower.coerce(4), {}),
            ])
            product = product * Ai
        if product != diff:
            raise FactorizationFails(
                rec.name, product - diff,
                "kernel product does not match D_n(x1) - D_n(x2)")
    return quotient


def verify_symmetry(rec):
    """Check ``A(x2, x1) = sign * A^sigma(x1, x2)`` and return the sign.

    Raises :class:`SymmetryFails` when the family declares no sign (cyclic)
    or when the declared relation does not hold identically.
    """
    if rec.symmetry is None:
        raise SymmetryFails(rec.name, "no symmetry sign declared")
    tower = rec.tower
    swapped = rec.A.substitute(
        {"x1": MPoly.var(tower, "x2"), "x2": MPoly.var(tower, "x1")})
    conj = rec.A.map_coefficients(nf_conjugate, tower)
    if swapped != conj * MPoly.const(tower, tower.coerce(rec.symmetry)):
        raise SymmetryFails(
            rec.name,
            "A(x2, x1) != %+d * A^sigma(x1, x2)" % rec.symmetry)
    return rec.symmetry


def check_normalization_constants(rec):
    """Verify the declared coefficient ratios of ``f`` and ``f^2``.

    The linear constant ties the two coefficients of ``f`` just below the
    top: ``[x^(n-3)] f = kappa * [x^(n-2)] f``; the quadratic constant does
    the same for ``f^2``: ``[x^(2n-5)] f^2 = lambda * [x^(2n-4)] f^2``.
    Both identities hold in ``K[t]``.  Returns ``{"kappa": .., "lambda": ..}``
    or raises :class:`ConstantMismatch` carrying both sides.
    """
    if rec.kappa is None or rec.lam is None:
        raise ValueError(
            "%s declares no normalization constants" % rec.name)
    tower, n = rec.tower, rec.n
    c2 = rec.f.coeff("x", n - 2)
    c3 = rec.f.coeff("x", n - 3)
    if c3 != c2 * MPoly.const(tower, rec.kappa):
        raise ConstantMismatch(rec.name, "kappa", c3,
                               c2 * MPoly.const(tower, rec.kappa))
    square = rec.f * rec.f
    c4 = square.coeff("x", 2 * n - 4)
    c5 = square.coeff("x", 2 * n - 5)
    if c5 != c4 * MPoly.const(tower, rec.lam):
        raise ConstantMismatch(rec.name, "lambda", c5,
                               c4 * MPoly.const(tower, rec.lam))
    return {"kappa": rec.kappa, "lambda": rec.lam}


# ---------------------------------------------------------------------------
# constructions and specialization


def build_construction(rec, kind):
    """Attach the two curves of the given construction to a family record.

    ``linear`` builds ``y^2 = f + s`` against ``y^2 = g + s`` (genus
    ``(n-1)/2`` each); ``quadratic`` builds ``y^2 = f^2 + s1*f + s2``
    against the same in ``g`` (genus ``n-1``).  Returns a generic
    :class:`Correspondence` over the record's tower.
    """
    if kind not in CONSTRUCTIONS:
        raise ValueError("unknown construction %r" % kind)
    tower = rec.tower
    x1, x2 = MPoly.var(tower, "x1"), MPoly.var(tower, "x2")
    f1 = rec.f.substitute({"x": x1})
    g2 = rec.partner_poly().substitute({"x": x2})
    if kind == LINEAR:
        s = MPoly.var(tower, "s")
        hX, hY = f1 + s, g2 + s
    else:
        s1, s2 = MPoly.var(tower, "s1"), MPoly.var(tower, "s2")
        hX = f1 * f1 + s1 * f1 + s2
        hY = g2 * g2 + s1 * g2 + s2
    X = HyperellipticModel("x1", hX)
    Y = HyperellipticModel("x2", hY)
    expected = rec.n - 1 if kind == QUADRATIC else (rec.n - 1) // 2
    if X.genus != expected or Y.genus != expected:
        raise InvariantViolation(
            rec.name, "construction genus",
            "got (%d, %d), expected %d" % (X.genus, Y.genus, expected))
    return Correspondence(rec, kind, X, Y, rec.A, tower)


def _squarefree(h, var):
    """Whether the univariate polynomial ``h`` in ``var`` is squarefree."""
    return poly_gcd(h, h.derivative(var)).degree(var) == 0


def specialize(corr, values, reduction=None):
    """Substitute parameter values (and optionally reduce mod p).

    ``values`` must assign exactly the free parameters of the construction
    (``t`` where the family has one, plus ``s`` or ``s1``/``s2``), as
    rationals or tower elements.  With a :class:`ReductionMap` the curve
    and kernel data are pushed to its finite field.

    Raises :class:`OnDiscriminantLocus` when either specialized curve fails
    to be squarefree of full degree, and :class:`BadReduction` when a
    coefficient denominator vanishes mod p or a model loses degree.
    """
    rec = corr.family
    tower = rec.tower
    needed = set(rec.parameters(corr.kind))
    given = set(values)
    if given != needed:
        raise ValueError("construction parameters are %s, got %s" %
                         (sorted(needed), sorted(given)))
    assign = {k: MPoly.const(tower, tower.coerce(v)) for k, v in values.items()}
    hX = corr.X.h.substitute(assign)
    hY = corr.Y.h.substitute(assign)
    A = corr.A.substitute(assign)

    if reduction is None:
        for var, h, orig, label in (("x1", hX, corr.X.h, "X"),
                                    ("x2", hY, corr.Y.h, "Y")):
            if h.degree(var) != orig.degree(var):
                raise OnDiscriminantLocus(label, "model degree dropped")
            if not _squarefree(h, var):
                raise OnDiscriminantLocus(
                    label, "discriminant vanishes at %r" % (values,))
        return Correspondence(rec, corr.kind, HyperellipticModel("x1", hX),
                              HyperellipticModel("x2", hY), A, tower,
                              values=dict(values))

    try:
        field = reduction.field
        hXb = hX.map_coefficients(reduction, field)
        hYb = hY.map_coefficients(reduction, field)
        Ab = A.map_coefficients(reduction, field)
    except (DivisionByZero, ZeroDivisionError, NoPrimeAbove) as exc:
        raise BadReduction(reduction.p, "denominator vanishes: %s" % exc)
    for var, h, orig, label in (("x1", hXb, corr.X.h, "X"),
                                ("x2", hYb, corr.Y.h, "Y")):
        if h.degree(var) != orig.degree(var):
            raise BadReduction(
                reduction.p, "curve %s loses degree mod p" % label)
        if not _squarefree(h, var):
            raise OnDiscriminantLocus(
                label, "reduced discriminant vanishes at %r mod %d"
                % (values, reduction.p))
    return Correspondence(rec, corr.kind, HyperellipticModel("x1", hXb),
                          HyperellipticModel("x2", hYb), Ab, field,
                          values=dict(values), reduction=reduction)
