"""Hash-consed differential-polynomial expressions.

Nodes form an immutable DAG over four generator kinds: coordinates
``u_i``, their x-jets ``u_i^{(p)}``, metric square roots ``h_i`` and
off-diagonal rotation coefficients ``g_{ij}`` (stored with i < j, the
matrix is symmetric).  Construction canonicalizes just enough to keep
identical subterms shared: sums are flattened with like terms combined,
products are flattened with powers collected and a single rational
coefficient folded out, integer powers distribute over products.  No
other rewriting happens; identities are checked by evaluation, not by
normal forms.

Every node carries a structural hash (``shash``) built bottom-up from
integers only, so child ordering and the S-expression dump are stable
across processes.
"""

from __future__ import annotations

from fractions import Fraction
from weakref import WeakValueDictionary

OP_CONST = 0
OP_GEN = 1
OP_ADD = 2
OP_MUL = 3
OP_POW = 4

GK_U = 0
GK_JET = 1
GK_H = 2
GK_GAMMA = 3

_GEN_NAMES = {GK_U: "u", GK_JET: "x", GK_H: "h", GK_GAMMA: "g"}

_MASK = (1 << 61) - 1


class Expr:
    __slots__ = ("op", "args", "shash", "sid", "__weakref__")

    def __repr__(self):
        return dump(self) if node_count(self) < 40 else "<Expr %d nodes>" % node_count(self)

    # interned: identity equality and hashing are inherited from object


_intern: "WeakValueDictionary[tuple, Expr]" = WeakValueDictionary()
_next_sid = [0]


def _mk(op, args, hcomps):
    key = (op,) + args
    node = _intern.get(key)
    if node is None:
        node = Expr()
        node.op = op
        node.args = args
        node.shash = hash((op,) + hcomps) & _MASK
        node.sid = _next_sid[0]
        _next_sid[0] += 1
        _intern[key] = node
    return node


def _skey(e):
    return (e.shash, e.sid)


def const(q):
    q = Fraction(q)
    return _mk(OP_CONST, (q,), (q.numerator, q.denominator))


ZERO = const(0)
ONE = const(1)
# keep the two ubiquitous constants alive for the life of the process
_pinned = (ZERO, ONE)


def gen(kind, i, p=0):
    return _mk(OP_GEN, (kind, i, p), (kind, i, p))


def u(i):
    return gen(GK_U, i)


def jet(i, p):
    if p < 1:
        raise ValueError("jet order must be >= 1")
    return gen(GK_JET, i, p)


def h(i):
    return gen(GK_H, i)


def gamma(i, j):
    if i == j:
        return ZERO
    if i > j:
        i, j = j, i
    return gen(GK_GAMMA, i, j)


def is_const(e):
    return e.op == OP_CONST


def const_value(e):
    return e.args[0]


def _split(term):
    """term -> (rational coefficient, coefficient-free base)."""
    if term.op == OP_CONST:
        return term.args[0], ONE
    if term.op == OP_MUL and term.args[0].op == OP_CONST:
        rest = term.args[1:]
        if len(rest) == 1:
            return term.args[0].args[0], rest[0]
        return term.args[0].args[0], _mk(
            OP_MUL, rest, tuple(c.shash for c in rest)
        )
    return Fraction(1), term


def add(*terms):
    acc = {}
    for t in terms:
        if t.op == OP_ADD:
            items = t.args
        else:
            items = (t,)
        for it in items:
            c, base = _split(it)
            if c == 0:
                continue
            s = acc.get(base, 0) + c
            if s:
                acc[base] = s
            else:
                del acc[base]
    out = []
    for base, c in acc.items():
        if base is ONE:
            out.append(const(c))
        elif c == 1:
            out.append(base)
        else:
            out.append(mul(const(c), base))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    out.sort(key=_skey)
    return _mk(OP_ADD, tuple(out), tuple(e.shash for e in out))


def mul(*factors):
    coeff = Fraction(1)
    powers = {}
    stack = list(factors)
    while stack:
        f = stack.pop()
        if f.op == OP_CONST:
            coeff *= f.args[0]
            if coeff == 0:
                return ZERO
        elif f.op == OP_MUL:
            stack.extend(f.args)
        elif f.op == OP_POW:
            powers[f.args[0]] = powers.get(f.args[0], 0) + f.args[1]
        else:
            powers[f] = powers.get(f, 0) + 1
    out = []
    for base, k in powers.items():
        if k == 0:
            continue
        if k == 1:
            out.append(base)
        else:
            out.append(_mk(OP_POW, (base, k), (base.shash, k)))
    if not out:
        return const(coeff)
    out.sort(key=_skey)
    if coeff != 1:
        out.insert(0, const(coeff))
    if len(out) == 1:
        return out[0]
    return _mk(OP_MUL, tuple(out), tuple(e.shash for e in out))


def pow_(b, k):
    k = int(k)
    if k == 0:
        return ONE
    if k == 1:
        return b
    if b.op == OP_CONST:
        return const(b.args[0] ** k)
    if b.op == OP_POW:
        return pow_(b.args[0], b.args[1] * k)
    if b.op == OP_MUL:
        return mul(*[pow_(f, k) for f in b.args])
    return _mk(OP_POW, (b, k), (b.shash, k))


def neg(e):
    return mul(const(-1), e)


def sub(a, b):
    return add(a, neg(b))


def div(a, b):
    return mul(a, pow_(b, -1))


# ---------------------------------------------------------------------------
# generic derivation


def derive(e, leaf_rule, cache):
    """Apply a derivation to e.  leaf_rule maps a GEN node to its image;
    cache is a dict shared across calls for the same derivation."""
    hit = cache.get(e)
    if hit is not None:
        return hit
    op = e.op
    if op == OP_CONST:
        out = ZERO
    elif op == OP_GEN:
        out = leaf_rule(e)
    elif op == OP_ADD:
        out = add(*[derive(t, leaf_rule, cache) for t in e.args])
    elif op == OP_MUL:
        terms = []
        args = e.args
        for i, f in enumerate(args):
            df = derive(f, leaf_rule, cache)
            if df is ZERO:
                continue
            terms.append(mul(df, *args[:i], *args[i + 1:]))
        out = add(*terms) if terms else ZERO
    else:  # OP_POW
        b, k = e.args
        db = derive(b, leaf_rule, cache)
        out = ZERO if db is ZERO else mul(const(k), pow_(b, k - 1), db)
    cache[e] = out
    return out


# ---------------------------------------------------------------------------
# traversal, evaluation


def _postorder(e):
    seen = set()
    order = []
    stack = [(e, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if node in seen:
            continue
        seen.add(node)
        stack.append((node, True))
        if node.op in (OP_ADD, OP_MUL):
            for c in node.args:
                stack.append((c, False))
        elif node.op == OP_POW:
            stack.append((node.args[0], False))
    return order


def node_count(e):
    return len(_postorder(e))


def generators(e):
    """All GEN nodes reachable from e."""
    return [n for n in _postorder(e) if n.op == OP_GEN]


class EvalStats:
    """Collects the largest magnitude seen among addends (numeric runs)."""

    __slots__ = ("max_mag",)

    def __init__(self):
        self.max_mag = 0.0

    def note(self, v):
        try:
            m = float(abs(v))
        except (TypeError, ValueError):
            return
        if m > self.max_mag:
            self.max_mag = m


def evaluate(e, gen_value, cache=None, stats=None):
    """Evaluate the DAG.  ``gen_value`` maps (kind, i, p) to a scalar,
    ``cache`` is a per-point memo shared across expressions."""
    if cache is None:
        cache = {}
    for node in _postorder(e):
        if node in cache:
            continue
        op = node.op
        if op == OP_CONST:
            v = node.args[0]
        elif op == OP_GEN:
            v = gen_value(node.args)
        elif op == OP_ADD:
            it = iter(node.args)
            v = cache[next(it)]
            if stats is not None:
                stats.note(v)
            for c in it:
                cv = cache[c]
                if stats is not None:
                    stats.note(cv)
                v = v + cv
        elif op == OP_MUL:
            it = iter(node.args)
            v = cache[next(it)]
            for c in it:
                v = v * cache[c]
        else:
            b, k = node.args
            v = cache[b] ** k
        cache[node] = v
    return cache[e]


# ---------------------------------------------------------------------------
# S-expression round-trip


def dump(e):
    """Deterministic S-expression text for the DAG."""
    out = []
    _dump(e, out)
    return "".join(out)


def _dump(e, out):
    op = e.op
    if op == OP_CONST:
        out.append(str(e.args[0]))
    elif op == OP_GEN:
        kind, i, p = e.args
        name = _GEN_NAMES[kind]
        if kind in (GK_JET, GK_GAMMA):
            out.append("%s%d.%d" % (name, i, p))
        else:
            out.append("%s%d" % (name, i))
    elif op in (OP_ADD, OP_MUL):
        out.append("(+ " if op == OP_ADD else "(* ")
        for k, c in enumerate(e.args):
            if k:
                out.append(" ")
            _dump(c, out)
        out.append(")")
    else:
        out.append("(^ ")
        _dump(e.args[0], out)
        out.append(" %d)" % e.args[1])


def parse(text):
    """Parse the output of dump back into an interned Expr."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = [0]

    def next_tok():
        t = tokens[pos[0]]
        pos[0] += 1
        return t

    def parse_expr():
        t = next_tok()
        if t == "(":
            op = next_tok()
            items = []
            while tokens[pos[0]] != ")":
                items.append(parse_expr())
            next_tok()
            if op == "+":
                return add(*items)
            if op == "*":
                return mul(*items)
            if op == "^":
                base, k = items
                return pow_(base, const_value(k))
            raise ValueError("bad operator %r" % op)
        if len(t) > 1 and t[0] in "uxhg" and t[1].isdigit():
            name, rest = t[0], t[1:]
            kind = {v: k for k, v in _GEN_NAMES.items()}[name]
            if "." in rest:
                a, b = rest.split(".")
                return gen(kind, int(a), int(b))
            return gen(kind, int(rest))
        return const(Fraction(t))

    e = parse_expr()
    if pos[0] != len(tokens):
        raise ValueError("trailing tokens")
    return e
