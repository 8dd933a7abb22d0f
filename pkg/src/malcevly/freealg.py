"""Association types, normal-form monomials and the symmetric group action.

A type is a nested tuple: ``LEAF`` for a variable slot, ``("B", y, z)`` for
an anticommutative bracket and ``("T", y, z, w)`` for a ternary product that
is skew in its first two arguments.  A labelled tree has the same shape with
integer variables at the leaves.

Types are kept in canonical form: the first two children of every node are
ordered by :func:`type_key`.  A monomial is a type plus the word of variables
read off its leaves; it is in normal form when each skew pair of children of
equal type has the smaller variable first in the left child.
"""

from __future__ import annotations

import itertools
import re
from functools import lru_cache
from math import factorial

import numpy as np

LEAF = 0
OPSETS = ("binary", "ternary", "mixed")
VARIABLES = "abcdefg"
MAX_DEGREE = 7


def degree(t) -> int:
    if t == LEAF or isinstance(t, int):
        return 1
    return sum(degree(c) for c in t[1:])


@lru_cache(maxsize=None)
def type_key(t) -> tuple:
    """Total order on types: higher degree first, brackets before ternary
    products, then children compared left to right."""
    if t == LEAF:
        return (-1,)
    return (-degree(t), 0 if t[0] == "B" else 1) + tuple(type_key(c) for c in t[1:])


def shape(tree):
    """Type of a labelled tree (variables replaced by LEAF)."""
    if isinstance(tree, int):
        return LEAF
    return (tree[0],) + tuple(shape(c) for c in tree[1:])


def leaves(tree) -> list[int]:
    if isinstance(tree, int):
        return [tree]
    out = []
    for c in tree[1:]:
        out.extend(leaves(c))
    return out


def fill(t, word):
    """Labelled tree with the type ``t`` and the given leaf word."""
    it = iter(word)

    def go(s):
        if s == LEAF:
            return int(next(it))
        return (s[0],) + tuple(go(c) for c in s[1:])

    return go(t)


def type_string(t) -> str:
    if t == LEAF:
        return "-"
    inner = ",".join(type_string(c) for c in t[1:])
    return f"[{inner}]" if t[0] == "B" else f"({inner})"


def uses(t) -> set:
    if t == LEAF:
        return set()
    out = {t[0]}
    for c in t[1:]:
        out |= uses(c)
    return out


def _ops(opset: str) -> tuple:
    if opset not in OPSETS:
        raise ValueError(f"unknown operation set {opset!r}")
    return {"binary": ("B",), "ternary": ("T",), "mixed": ("B", "T")}[opset]


@lru_cache(maxsize=None)
def _types(n: int, ops: tuple) -> tuple:
    if n == 1:
        return (LEAF,)
    found = set()
    if "B" in ops:
        for i in range(1, n):
            for y in _types(i, ops):
                for z in _types(n - i, ops):
                    if type_key(y) <= type_key(z):
                        found.add(("B", y, z))
    if "T" in ops:
        for i in range(1, n - 1):
            for j in range(1, n - i):
                k = n - i - j
                for y in _types(i, ops):
                    for z in _types(j, ops):
                        if type_key(y) > type_key(z):
                            continue
                        for w in _types(k, ops):
                            found.add(("T", y, z, w))
    return tuple(sorted(found, key=type_key))


def enumerate_types(n: int, opset: str) -> list:
    """Association types of degree n in standard order."""
    ops = _ops(opset)
    if not 1 <= n <= MAX_DEGREE:
        raise ValueError(f"degree must lie in 1..{MAX_DEGREE}")
    if opset == "ternary" and n % 2 == 0:
        raise ValueError("ternary types exist only in odd degree")
    return list(_types(n, ops))


def count_types(max_degree: int = MAX_DEGREE) -> list[dict]:
    """Per-degree counts of binary, ternary, mixed and all types, by enumeration."""
    rows = []
    for n in range(1, max_degree + 1):
        if n == 1:
            # the single variable is a type for either operation set
            rows.append({"degree": 1, "binary": 1, "ternary": 1, "mixed": 0, "total": 1,
                         "monomials": 1})
            continue
        every = _types(n, ("B", "T"))
        b = sum(1 for t in every if uses(t) == {"B"})
        t = sum(1 for t in every if uses(t) == {"T"})
        m = sum(1 for t in every if uses(t) == {"B", "T"})
        rows.append({"degree": n, "binary": b, "ternary": t, "mixed": m, "total": b + t + m,
                     "monomials": sum(monomial_count(s) for s in every)})
    return rows


# ----------------------------------------------------------------------------
# normal forms


def _swap_specs(t) -> list[tuple[int, int, int]]:
    """Skew pairs with equal child types, as (start1, start2, length), in post-order."""
    specs = []

    def go(s, start):
        if s == LEAF:
            return
        pos = start
        spans = []
        for c in s[1:]:
            go(c, pos)
            spans.append(pos)
            pos += degree(c)
        if s[1] == s[2]:
            specs.append((spans[0], spans[1], degree(s[1])))

    go(t, 0)
    return specs


def monomial_count(t) -> int:
    """n!/|Aut| where Aut is generated by the skew swaps of equal children."""
    return factorial(degree(t)) >> len(_swap_specs(t))


def _lehmer(words: np.ndarray) -> np.ndarray:
    n = words.shape[1]
    rank = np.zeros(words.shape[0], dtype=np.int64)
    for i in range(n):
        smaller = (words[:, i + 1:] < words[:, i:i + 1]).sum(axis=1)
        rank += smaller * factorial(n - 1 - i)
    return rank


@lru_cache(maxsize=None)
def _perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def canon(tree):
    """Canonical labelled tree and the sign picked up by the skew rules."""
    if isinstance(tree, int):
        return tree, 1
    sign = 1
    kids = []
    for c in tree[1:]:
        k, s = canon(c)
        kids.append(k)
        sign *= s
    y, z = kids[0], kids[1]
    ky, kz = type_key(shape(y)), type_key(shape(z))
    if kz < ky or (kz == ky and leaves(z)[0] < leaves(y)[0]):
        kids[0], kids[1] = z, y
        sign = -sign
    return (tree[0],) + tuple(kids), sign


class MonomialSpace:
    """Normal-form multilinear monomials of one degree and operation set.

    Columns are grouped by type in standard order; inside a type the words
    are in lexicographic order.
    """

    def __init__(self, n: int, opset: str):
        self.degree = n
        self.opset = opset
        self.types = enumerate_types(n, opset)
        self.type_index = {t: i for i, t in enumerate(self.types)}
        perms = _perms(n)
        self.words = []
        self.offsets = []
        self._specs = []
        self._lut = []
        total = 0
        for t in self.types:
            specs = _swap_specs(t)
            ok = np.ones(len(perms), dtype=bool)
            for a1, a2, _ in specs:
                ok &= perms[:, a1] < perms[:, a2]
            words = perms[ok]
            lut = np.full(len(perms), -1, dtype=np.int64)
            lut[_lehmer(words)] = np.arange(len(words))
            self.words.append(words)
            self.offsets.append(total)
            self._specs.append(specs)
            self._lut.append(lut)
            total += len(words)
        self.size = total
        self.column_type = np.repeat(np.arange(len(self.types)),
                                     [len(w) for w in self.words])

    def __len__(self) -> int:
        return self.size

    def type_counts(self) -> list[int]:
        return [len(w) for w in self.words]

    def monomial(self, index: int):
        """(type index, word) of a column."""
        ti = int(self.column_type[index])
        return ti, tuple(int(x) for x in self.words[ti][index - self.offsets[ti]])

    def tree(self, index: int):
        ti, word = self.monomial(index)
        return fill(self.types[ti], word)

    def normalize(self, ti: int, words) -> tuple[np.ndarray, np.ndarray]:
        """Column indices and signs of the normal forms of many words of one type."""
        w = np.array(words, dtype=np.int64, copy=True).reshape(-1, self.degree)
        sign = np.ones(len(w), dtype=np.int64)
        for a1, a2, ln in self._specs[ti]:
            flip = w[:, a2] < w[:, a1]
            if flip.any():
                left = w[flip, a1:a1 + ln].copy()
                w[flip, a1:a1 + ln] = w[flip, a2:a2 + ln]
                w[flip, a2:a2 + ln] = left
                sign[flip] = -sign[flip]
        local = self._lut[ti][_lehmer(w)]
        if (local < 0).any():
            raise AssertionError("normalization produced a non-normal word")
        return local + self.offsets[ti], sign

    def locate(self, tree) -> tuple[int, int]:
        """Column and sign of an arbitrary labelled tree of this degree."""
        t, sign = canon(tree)
        ti = self.type_index.get(shape(t))
        if ti is None:
            raise ValueError(f"type {type_string(shape(t))} is not in this space")
        idx, s = self.normalize(ti, [leaves(t)])
        return int(idx[0]), sign * int(s[0])

    def monomial_string(self, index: int) -> str:
        return tree_string(self.tree(index))


@lru_cache(maxsize=None)
def space(n: int, opset: str) -> MonomialSpace:
    return MonomialSpace(n, opset)


def enumerate_monomials(n: int, opset: str) -> list[tuple[int, tuple]]:
    sp = space(n, opset)
    return [sp.monomial(i) for i in range(len(sp))]


def normalize(n: int, opset: str, type_index: int, word) -> tuple[int, int]:
    idx, sign = space(n, opset).normalize(type_index, [word])
    return int(idx[0]), int(sign[0])


# ----------------------------------------------------------------------------
# polynomials


class MultilinearPolynomial:
    """Sparse integer combination of normal-form monomials."""

    def __init__(self, n: int, opset: str, coeffs=None):
        self.degree = n
        self.opset = opset
        self.coeffs = {int(k): int(v) for k, v in (coeffs or {}).items() if v}

    @property
    def space(self) -> MonomialSpace:
        return space(self.degree, self.opset)

    @classmethod
    def from_trees(cls, terms, n: int, opset: str) -> "MultilinearPolynomial":
        """Sum of ``coeff * tree`` over (coeff, labelled tree) pairs."""
        sp = space(n, opset)
        out = {}
        for c, tree in terms:
            if sorted(leaves(tree)) != list(range(n)):
                raise ValueError("monomial is not multilinear in the first n variables")
            idx, sign = sp.locate(tree)
            out[idx] = out.get(idx, 0) + sign * c
        return cls(n, opset, out)

    @classmethod
    def from_dense(cls, vec, n: int, opset: str, p: int | None = None):
        v = np.asarray(vec, dtype=np.int64)
        if p is not None:
            v = v % p
            v = np.where(v > p // 2, v - p, v)
        return cls(n, opset, {int(i): int(v[i]) for i in np.flatnonzero(v)})

    def dense(self, p: int | None = None) -> np.ndarray:
        v = np.zeros(len(self.space), dtype=np.int64)
        for k, c in self.coeffs.items():
            v[k] = c
        return v % p if p is not None else v

    def terms(self):
        """(coeff, labelled tree) pairs in column order."""
        sp = self.space
        return [(self.coeffs[k], sp.tree(k)) for k in sorted(self.coeffs)]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        return (isinstance(other, MultilinearPolynomial) and self.degree == other.degree
                and self.opset == other.opset and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.degree, self.opset, tuple(sorted(self.coeffs.items()))))

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return MultilinearPolynomial(self.degree, self.opset, out)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c: int):
        return MultilinearPolynomial(self.degree, self.opset,
                                     {k: v * c for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def _check(self, other):
        if (self.degree, self.opset) != (other.degree, other.opset):
            raise ValueError("polynomials live in different spaces")

    def square_sum(self) -> int:
        return sum(c * c for c in self.coeffs.values())

    def embed(self, opset: str) -> "MultilinearPolynomial":
        """The same polynomial in a larger (or equal) operation set."""
        if opset == self.opset:
            return self
        return MultilinearPolynomial.from_trees(self.terms(), self.degree, opset)

    def __repr__(self):
        return f"MultilinearPolynomial({self.degree}, {self.opset!r}, {len(self)} terms)"


def _term_arrays(poly: MultilinearPolynomial):
    sp = poly.space
    idx = np.array(sorted(poly.coeffs), dtype=np.int64)
    coef = np.array([poly.coeffs[k] for k in idx], dtype=np.int64)
    ti = sp.column_type[idx] if len(idx) else np.zeros(0, dtype=np.int64)
    words = np.array([sp.monomial(int(k))[1] for k in idx], dtype=np.int64).reshape(-1, sp.degree)
    return ti, words, coef


def permuted_rows(poly: MultilinearPolynomial, perms, p: int | None = None) -> np.ndarray:
    """Dense coefficient rows of ``act(pi, poly)`` for each permutation in ``perms``."""
    sp = poly.space
    perms = np.asarray(perms, dtype=np.int64).reshape(-1, sp.degree)
    rows = np.zeros((len(perms), len(sp)), dtype=np.int64)
    ti, words, coef = _term_arrays(poly)
    for t in np.unique(ti):
        sel = ti == t
        w = perms[:, words[sel]]                    # (k, terms, n)
        cols, signs = sp.normalize(int(t), w.reshape(-1, sp.degree))
        r = np.repeat(np.arange(len(perms)), sel.sum())
        vals = np.tile(coef[sel], len(perms)) * signs
        np.add.at(rows, (r, cols), vals)
    return rows % p if p is not None else rows


def orbit_blocks(poly: MultilinearPolynomial, p: int | None = None, block: int = 720):
    """All n! permuted images of ``poly`` as dense row blocks."""
    perms = _perms(poly.degree)
    for s in range(0, len(perms), block):
        yield permuted_rows(poly, perms[s:s + block], p)


def act(pi, poly: MultilinearPolynomial) -> MultilinearPolynomial:
    """Left action: variable v is replaced by pi[v]."""
    row = permuted_rows(poly, [pi])[0]
    return MultilinearPolynomial.from_dense(row, poly.degree, poly.opset)


def all_permutations(n: int) -> np.ndarray:
    return _perms(n)


def _substitute(tree, var, repl):
    if isinstance(tree, int):
        return repl if tree == var else tree
    return (tree[0],) + tuple(_substitute(c, var, repl) for c in tree[1:])


def lift(poly: MultilinearPolynomial, mode: str, opset: str | None = None,
         middle: bool = False) -> list[MultilinearPolynomial]:
    """Liftings to degree n+1 (``binary``) or n+2 (``ternary``).

    Binary: each x_i -> [x_i, x_{n+1}], then [I, x_{n+1}].
    Ternary: each x_i -> (x_i, x_{n+1}, x_{n+2}), then (I, x_{n+1}, x_{n+2})
    and (x_{n+1}, x_{n+2}, I); ``middle`` adds (x_{n+1}, I, x_{n+2}).
    """
    n = poly.degree
    opset = opset or poly.opset
    terms = poly.terms()
    if mode == "binary":
        new = n
        subs = [lambda t, i=i: _substitute(t, i, ("B", i, new)) for i in range(n)]
        subs.append(lambda t: ("B", t, new))
        target = n + 1
    elif mode == "ternary":
        a, b = n, n + 1
        subs = [lambda t, i=i: _substitute(t, i, ("T", i, a, b)) for i in range(n)]
        subs.append(lambda t: ("T", t, a, b))
        if middle:
            subs.append(lambda t: ("T", a, t, b))
        subs.append(lambda t: ("T", a, b, t))
        target = n + 2
    else:
        raise ValueError(f"unknown lifting mode {mode!r}")
    return [MultilinearPolynomial.from_trees([(c, f(t)) for c, t in terms], target, opset)
            for f in subs]


def substitute(poly: MultilinearPolynomial, images, opset: str | None = None,
               n: int | None = None) -> MultilinearPolynomial:
    """Replace variable i by the labelled tree ``images[i]``; the result has
    degree ``n`` (default: total leaf count)."""
    def go(t):
        if isinstance(t, int):
            return images[t]
        return (t[0],) + tuple(go(c) for c in t[1:])
    terms = [(c, go(t)) for c, t in poly.terms()]
    if n is None:
        n = sum(len(leaves(im)) for im in images)
    return MultilinearPolynomial.from_trees(terms, n, opset or poly.opset)


# ----------------------------------------------------------------------------
# text format


def tree_string(tree) -> str:
    if isinstance(tree, int):
        return VARIABLES[tree]
    inner = ",".join(tree_string(c) for c in tree[1:])
    return f"[{inner}]" if tree[0] == "B" else f"({inner})"


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*([\[\]\(\),]|[a-g])")


def parse_monomial(text: str):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    it = iter(tokens + [None])
    tok = [next(it)]

    def take(expected=None):
        cur = tok[0]
        if expected is not None and cur != expected:
            raise ParseError(f"expected {expected!r}, found {cur!r}")
        tok[0] = next(it)
        return cur

    def node():
        cur = tok[0]
        if cur is None:
            raise ParseError("unexpected end of monomial")
        if cur in VARIABLES:
            take()
            return VARIABLES.index(cur)
        if cur in "[(":
            close = "]" if cur == "[" else ")"
            take()
            kids = [node()]
            while tok[0] == ",":
                take()
                kids.append(node())
            take(close)
            if cur == "[" and len(kids) != 2:
                raise ParseError("a bracket needs two arguments")
            if cur == "(" and len(kids) != 3:
                raise ParseError("a ternary product needs three arguments")
            return ("B" if cur == "[" else "T",) + tuple(kids)
        raise ParseError(f"unexpected token {cur!r}")

    tree = node()
    if tok[0] is not None:
        raise ParseError(f"trailing input {tok[0]!r}")
    return tree


def parse_identity(text: str, opset: str | None = None) -> MultilinearPolynomial:
    """Parse ``<coefficient> <monomial>`` lines; ``#`` starts a comment."""
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected '<coefficient> <monomial>'")
        try:
            c = int(parts[0])
            tree = parse_monomial(parts[1])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        terms.append((c, tree, lineno))
    if not terms:
        raise ParseError("no terms")
    n = len(leaves(terms[0][1]))
    ops = set()
    for c, tree, lineno in terms:
        if sorted(leaves(tree)) != list(range(n)):
            raise ParseError(f"line {lineno}: monomial must use each of {VARIABLES[:n]} once")
        ops |= uses(shape(tree))
    if opset is None:
        opset = "mixed" if ops == {"B", "T"} else ("ternary" if ops == {"T"} else "binary")
    return MultilinearPolynomial.from_trees([(c, t) for c, t, _ in terms], n, opset)


def format_identity(poly: MultilinearPolynomial, header: str = "") -> str:
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines += [f"{c} {tree_string(t)}" for c, t in poly.terms()]
    return "\n".join(lines) + "\n"
