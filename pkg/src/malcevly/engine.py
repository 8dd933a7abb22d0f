"""Identity search: evaluation, fill-and-reduce, module generators, liftings.

A search in a fixed degree and operation set runs in stages:

1. evaluate every normal-form monomial on random arguments and reduce the
   evaluation rows until the rank stops growing; the nullspace of that
   matrix is the space of identities of the degree;
2. insert every permutation of every lifting of the known lower-degree
   identities to get the consequence space;
3. scan a sorted nullspace basis and keep the vectors whose permutations
   enlarge the span; these are generators for the new identities.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from fractions import Fraction
from math import gcd

import numpy as np

from . import exactla, freealg, sl2rep
from .exactla import DEFAULT_PRIME, EchelonBasis
from .freealg import LEAF, MultilinearPolynomial

_INT64_SAFE = 2**62


# ----------------------------------------------------------------------------
# the algebra


class AlgebraStructure:
    """The 7-dimensional module V(6) with its bracket and ternary product.

    ``bilinear[i, j, k]`` is the coefficient of basis vector k in
    ``[e_i, e_j]``; ``trilinear[i, j, k, l]`` the coefficient of e_l in
    ``(e_i, e_j, e_k)``.
    """

    def __init__(self, bilinear, trilinear, scale: int = 1):
        self.bilinear = np.asarray(bilinear, dtype=np.int64)
        self.trilinear = np.asarray(trilinear, dtype=np.int64)
        self.scale = scale
        self.dim = self.bilinear.shape[0]
        if not np.array_equal(self.bilinear, -self.bilinear.transpose(1, 0, 2)):
            raise ValueError("bracket constants are not anticommutative")
        if not np.array_equal(self.trilinear, -self.trilinear.transpose(1, 0, 2, 3)):
            raise ValueError("ternary constants are not skew in the first two slots")
        self._sparse_b = [(int(i), int(j), int(k), int(self.bilinear[i, j, k]))
                          for i, j, k in zip(*np.nonzero(self.bilinear))]
        self._sparse_t = [(int(i), int(j), int(k), int(l), int(self.trilinear[i, j, k, l]))
                          for i, j, k, l in zip(*np.nonzero(self.trilinear))]
        # largest output coordinate per unit inputs, for overflow bounds
        self.bound_b = int(np.abs(self.bilinear).sum(axis=(0, 1)).max())
        self.bound_t = int(np.abs(self.trilinear).sum(axis=(0, 1, 2)).max())

    @classmethod
    def from_sl2(cls, scale: int = 1) -> "AlgebraStructure":
        return cls(sl2rep.bilinear_tensor(), sl2rep.trilinear_tensor(scale), scale)

    def bracket(self, x, y):
        """[x, y] for coordinate vectors (exact integers)."""
        out = [0] * self.dim
        for i, j, k, c in self._sparse_b:
            out[k] += c * int(x[i]) * int(y[j])
        return out

    def triple(self, x, y, z):
        out = [0] * self.dim
        for i, j, k, l, c in self._sparse_t:
            out[l] += c * int(x[i]) * int(y[j]) * int(z[k])
        return out

    def tree_bound(self, t, leaf: int) -> int:
        """Bound on the coordinates of a monomial of type ``t`` when every
        argument coordinate is at most ``leaf`` in absolute value."""
        if t == LEAF:
            return leaf
        kids = [self.tree_bound(c, leaf) for c in t[1:]]
        out = self.bound_b if t[0] == "B" else self.bound_t
        for k in kids:
            out *= k
        return out


_ALGEBRAS: dict[int, AlgebraStructure] = {}


def algebra(scale: int = 1) -> AlgebraStructure:
    if scale not in _ALGEBRAS:
        _ALGEBRAS[scale] = AlgebraStructure.from_sl2(scale)
    return _ALGEBRAS[scale]


def default_scale(opset: str) -> int:
    """Ternary scale under which the mixed Jacobi identity has unit coefficients."""
    return -30 if opset == "mixed" else 1


# ----------------------------------------------------------------------------
# evaluation


def eval_monomial(tree, args, alg: AlgebraStructure, p: int | None = None) -> list[int]:
    """Evaluate a labelled tree; ``args[v]`` is the vector for variable v."""
    if isinstance(tree, int):
        out = [int(x) for x in args[tree]]
    else:
        kids = [eval_monomial(c, args, alg) for c in tree[1:]]
        out = alg.bracket(*kids) if tree[0] == "B" else alg.triple(*kids)
    return [x % p for x in out] if p is not None else out


def _combine_modular(op, kids, alg, p):
    a, b = kids[0], kids[1]
    k, m, d = a.shape
    outer = (a[..., :, None] * b[..., None, :]).reshape(k * m, d * d)
    if op == "B":
        out = outer @ alg._float_b
        return np.remainder(out, p).reshape(k, m, d)
    prod = np.remainder(outer @ alg._float_t, p).reshape(k, m, d, d)
    out = np.einsum("kmi,kmil->kml", kids[2], prod)
    return np.remainder(out, p)


def _combine_exact(op, kids, alg):
    a, b = kids[0], kids[1]
    k, m, d = a.shape
    out = np.zeros((k, m, d), dtype=a.dtype)
    if op == "B":
        for i, j, l, c in alg._sparse_b:
            out[:, :, l] += c * a[:, :, i] * b[:, :, j]
    else:
        x = kids[2]
        for i, j, q, l, c in alg._sparse_t:
            out[:, :, l] += c * a[:, :, i] * b[:, :, j] * x[:, :, q]
    return out


def _eval_type(t, words: np.ndarray, args: np.ndarray, combine):
    """Values of type ``t`` on all rows of ``words``: shape (tuples, words, dim).

    Sub-words shared by several monomials are evaluated once.
    """
    if t == LEAF:
        return args[:, words[:, 0], :]
    kids = []
    pos = 0
    for c in t[1:]:
        ln = freealg.degree(c)
        sub, inv = np.unique(words[:, pos:pos + ln], axis=0, return_inverse=True)
        kids.append(_eval_type(c, sub, args, combine)[:, inv.reshape(-1), :])
        pos += ln
    return combine(t[0], kids)


def _prepare(alg: AlgebraStructure, p: int):
    alg._float_b = np.remainder(alg.bilinear, p).reshape(-1, alg.dim).astype(np.float64)
    alg._float_t = np.remainder(alg.trilinear, p).reshape(alg.dim ** 2, -1).astype(np.float64)


def evaluation_block(alg: AlgebraStructure, sp: freealg.MonomialSpace, args,
                     p: int | None = None) -> np.ndarray:
    """Rows of monomial values: row ``7*k + l`` holds coordinate l of every
    monomial evaluated on argument tuple k.

    With ``p`` the values are residues; without it they are exact integers
    (int64 when a magnitude bound allows, Python integers otherwise).
    """
    args = np.asarray(args)
    ntup = args.shape[0]
    d = alg.dim
    if p is not None:
        _prepare(alg, p)
        a = np.remainder(args, p).astype(np.float64)
        out = np.zeros((ntup * d, len(sp)), dtype=np.int64)
        combine = lambda op, kids: _combine_modular(op, kids, alg, p)  # noqa: E731
    else:
        leaf = int(np.abs(args).max()) if args.size else 0
        worst = max(alg.tree_bound(t, leaf) for t in sp.types)
        dtype = np.int64 if worst < _INT64_SAFE else object
        a = args.astype(np.int64).astype(dtype)
        out = np.zeros((ntup * d, len(sp)), dtype=dtype)
        combine = lambda op, kids: _combine_exact(op, kids, alg)  # noqa: E731
    for ti, t in enumerate(sp.types):
        vals = _eval_type(t, sp.words[ti], a, combine)
        lo = sp.offsets[ti]
        block = vals.transpose(0, 2, 1).reshape(ntup * d, -1)
        out[:, lo:lo + block.shape[1]] = block if p is None else block.astype(np.int64)
    return out


def eval_polynomial(poly: MultilinearPolynomial, args, alg: AlgebraStructure) -> np.ndarray:
    """Exact value of a polynomial on many argument tuples: shape (tuples, dim).

    ``args`` has shape (tuples, degree, dim).  Repeated subtrees are shared.
    """
    args = np.asarray(args)
    leaf = int(np.abs(args).max()) if args.size else 0
    total = sum(abs(c) * alg.tree_bound(freealg.shape(t), leaf) for c, t in poly.terms())
    dtype = np.int64 if total < _INT64_SAFE else object
    a = args.astype(np.int64).astype(dtype)
    memo = {}

    def go(tree):
        if isinstance(tree, int):
            return a[:, tree, :]
        if tree not in memo:
            kids = [go(c)[:, None, :] for c in tree[1:]]
            memo[tree] = _combine_exact(tree[0], kids, alg)[:, 0, :]
        return memo[tree]

    out = np.zeros((args.shape[0], alg.dim), dtype=dtype)
    for c, tree in poly.terms():
        out = out + c * go(tree)
    return out


# ----------------------------------------------------------------------------
# fill and reduce


@dataclass
class FillResult:
    rank: int
    basis: EchelonBasis
    iterations: int
    history: list

    @property
    def nullspace_dim(self) -> int:
        return self.basis.ncols - self.rank


def fill_and_reduce(alg: AlgebraStructure, degree: int, opset: str,
                    prime: int = DEFAULT_PRIME, seed: int = 0, stall: int = 100,
                    batch: int | None = None) -> FillResult:
    """Grow the evaluation matrix until its rank is unchanged for ``stall``
    consecutive random argument tuples.

    Tuples are drawn ``batch`` at a time (10 for spaces of more than 600
    monomials, otherwise 1).  ``history`` records (tuples used, rank).
    """
    if prime <= degree:
        raise ValueError("the prime must exceed the degree")
    sp = freealg.space(degree, opset)
    if batch is None:
        batch = 10 if len(sp) > 600 else 1
    rng = np.random.default_rng(seed)
    basis = EchelonBasis(len(sp), prime)
    history = [(0, 0)]
    used = since = 0
    while since < stall:
        args = rng.integers(0, prime, size=(batch, degree, alg.dim))
        gained = basis.add(evaluation_block(alg, sp, args, prime))
        used += batch
        since = 0 if gained else since + batch
        history.append((used, basis.rank))
    return FillResult(basis.rank, basis, used, history)


def integer_fill(alg: AlgebraStructure, degree: int, opset: str, seed: int = 0,
                 bound: int = 9, stall: int = 20, prime: int = DEFAULT_PRIME):
    """Integer evaluation rows with arguments in [-bound, bound].

    Returns every generated row and the indices of the rows that raised the
    rank modulo ``prime`` (these span the row space over Q as well, since
    the modular rank never exceeds the rational one).
    """
    sp = freealg.space(degree, opset)
    rng = np.random.default_rng(seed)
    basis = EchelonBasis(len(sp), prime)
    rows, keep = [], []
    since = 0
    while since < stall:
        args = rng.integers(-bound, bound + 1, size=(1, degree, alg.dim))
        block = evaluation_block(alg, sp, args)
        gained = False
        for row in block:
            rows.append(row)
            if basis.add(np.remainder(row.astype(object), prime).astype(np.int64)):
                keep.append(len(rows) - 1)
                gained = True
        since = 0 if gained else since + 1
    return rows, keep


# ----------------------------------------------------------------------------
# module generators and liftings


def _as_poly(item, degree: int, opset: str, p: int) -> MultilinearPolynomial:
    if isinstance(item, MultilinearPolynomial):
        return item if item.opset == opset else item.embed(opset)
    if isinstance(item, IdentityRecord):
        return _as_poly(item.polynomial, degree, opset, p)
    return MultilinearPolynomial.from_dense(item, degree, opset, p)


def add_orbit(basis: EchelonBasis, poly: MultilinearPolynomial, block: int = 720) -> int:
    """Insert all permuted images of ``poly``; returns the rank increase."""
    before = basis.rank
    for rows in freealg.orbit_blocks(poly, basis.p, block):
        basis.add(rows)
    return basis.rank - before


@dataclass
class Generator:
    index: int
    polynomial: MultilinearPolynomial
    rank_increase: int
    rank_after: int


def module_generators(candidates, degree: int, opset: str, prime: int = DEFAULT_PRIME,
                      baseline: EchelonBasis | None = None, target: int | None = None,
                      check: int = 64):
    """Keep the candidates whose permutations enlarge the span.

    Candidates are processed in order; each is either a polynomial or a
    dense coefficient vector.  The span is closed under permutations at
    every step (``baseline`` must be as well), so a candidate already in it
    cannot raise the rank and is skipped without expanding its orbit.
    Stops once the rank reaches ``target``.
    Returns (generators, basis).
    """
    q = len(freealg.space(degree, opset))
    basis = baseline.copy() if baseline is not None else EchelonBasis(q, prime)
    gens = []
    items = list(candidates)
    i = 0
    while i < len(items):
        if target is not None and basis.rank >= target:
            break
        chunk = [_as_poly(c, degree, opset, prime) for c in items[i:i + check]]
        inside = basis.contains(np.array([c.dense(prime) for c in chunk]))
        fresh = np.flatnonzero(~inside)
        if len(fresh) == 0:
            i += len(chunk)
            continue
        j = int(fresh[0])
        gained = add_orbit(basis, chunk[j])
        if gained:
            gens.append(Generator(i + j, chunk[j], gained, basis.rank))
        i += j + 1
    return gens, basis


PLAN_CODES = {"B": ("binary", False), "T": ("ternary", False), "T*": ("ternary", True)}


def apply_plan(poly: MultilinearPolynomial, plan, opset: str) -> list[MultilinearPolynomial]:
    """Iterated liftings; ``plan`` is a sequence of codes B (binary lifting),
    T (ternary lifting) and T* (ternary lifting including the middle slot)."""
    current = [poly]
    for code in plan:
        mode, middle = PLAN_CODES[code]
        current = [q for p in current for q in freealg.lift(p, mode, opset, middle)]
    return current


def liftings(known, opset: str) -> list[MultilinearPolynomial]:
    """All liftings for a list of (polynomial, plan) pairs, without repeats."""
    out, seen = [], set()
    for poly, plan in known:
        for q in apply_plan(poly, plan, opset):
            if q not in seen:
                seen.add(q)
                out.append(q)
    return out


def consequence_space(known, degree: int, opset: str, prime: int = DEFAULT_PRIME,
                      target: int | None = None, baseline: EchelonBasis | None = None):
    """Span of all permutations of all liftings of ``known``.

    ``known`` lists (polynomial or record, plan) pairs.  Returns
    (rank, basis, number of liftings).
    """
    pairs = [(_as_poly(k, k.degree, k.opset, prime) if isinstance(k, IdentityRecord) else k, plan)
             for k, plan in known]
    lifted = liftings(pairs, opset)
    for q in lifted:
        if q.degree != degree:
            raise ValueError("lifting plan does not reach the target degree")
    _, basis = module_generators(lifted, degree, opset, prime, baseline, target)
    return basis.rank, basis, len(lifted)


def span_membership(poly: MultilinearPolynomial, generators, prime: int = DEFAULT_PRIME) -> bool:
    """Whether ``poly`` lies in the span of all permutations of the generators."""
    basis = EchelonBasis(len(poly.space), prime)
    for g in generators:
        add_orbit(basis, _as_poly(g, poly.degree, poly.opset, prime))
    return bool(basis.contains(poly.dense(prime))[0])


def orbit_rank(polys, prime: int = DEFAULT_PRIME, baseline: EchelonBasis | None = None) -> int:
    """Rank of the permutation span of ``polys`` (on top of ``baseline``)."""
    polys = list(polys)
    basis = baseline.copy() if baseline is not None else EchelonBasis(len(polys[0].space), prime)
    for q in polys:
        add_orbit(basis, q)
    return basis.rank


def sorted_nullspace(basis: EchelonBasis) -> np.ndarray:
    """Canonical nullspace basis of the row space, sorted by support size."""
    null = basis.nullspace()
    return null[exactla.support_order(null, basis.p)]


def annihilates(basis: EchelonBasis, poly: MultilinearPolynomial) -> bool:
    """Whether ``poly`` is orthogonal to every row (lies in the nullspace)."""
    v = poly.dense(basis.p)
    return bool(np.all(np.remainder(basis.matrix() @ v, basis.p) == 0))


# ----------------------------------------------------------------------------
# integer methods

# with 3/4 the degree-5 bracket scan needs two generators; 99/100 finds one
LLL_DELTA = Fraction(99, 100)


def primitive_poly(poly: MultilinearPolynomial) -> MultilinearPolynomial:
    g = 0
    for c in poly.coeffs.values():
        g = gcd(g, c)
    if g == 0:
        return poly
    lead = poly.coeffs[min(poly.coeffs)]
    if lead < 0:
        g = -g
    return MultilinearPolynomial(poly.degree, poly.opset,
                                 {k: v // g for k, v in poly.coeffs.items()})


def shortest_identities(alg: AlgebraStructure, degree: int, opset: str,
                        prime: int = DEFAULT_PRIME, seed: int = 0, max_columns: int = 510,
                        delta=LLL_DELTA) -> list[MultilinearPolynomial]:
    """Identities from an LLL-reduced basis of the integer nullspace lattice.

    The integer evaluation rows that raise the rank are replaced by the
    primitive rows of their rational row canonical form (same kernel,
    smaller entries); the kernel lattice is read off the transform of the
    Hermite normal form of the transpose and then LLL reduced.  The result
    is sorted by increasing Euclidean norm.
    """
    sp = freealg.space(degree, opset)
    if len(sp) > max_columns:
        raise ValueError(f"{len(sp)} columns exceed the limit of {max_columns}")
    rows, keep = integer_fill(alg, degree, opset, seed, prime=prime)
    if not keep:
        vectors = [[int(i == j) for j in range(len(sp))] for i in range(len(sp))]
    else:
        rref, _ = exactla.rref_primitive([rows[i] for i in keep])
        kernel = exactla.integer_kernel(rref)
        vectors = exactla.lll_reduce(kernel, delta) if kernel else []
    return [MultilinearPolynomial.from_dense(v, degree, opset) for v in vectors]


@dataclass
class VerifyResult:
    ok: bool
    trials: int
    witness: list | None = None
    value: list | None = None


def verify_identity_integer(identity, alg: AlgebraStructure, trials: int = 1000,
                            component_bound: int = 9, seed: int = 0,
                            batch: int = 100) -> VerifyResult:
    """Evaluate on random integer tuples; fail with the first nonzero witness."""
    if trials < 1:
        raise ValueError("at least one trial is needed")
    poly = identity.polynomial if isinstance(identity, IdentityRecord) else identity
    rng = np.random.default_rng(seed)
    done = 0
    while done < trials:
        k = min(batch, trials - done)
        args = rng.integers(-component_bound, component_bound + 1,
                            size=(k, poly.degree, alg.dim))
        vals = eval_polynomial(poly, args, alg)
        bad = np.flatnonzero(np.any(vals != 0, axis=1))
        if len(bad):
            i = int(bad[0])
            return VerifyResult(False, done + i + 1, args[i].tolist(),
                                [int(x) for x in vals[i]])
        done += k
    return VerifyResult(True, done)


def verify_identity_modular(identity, alg: AlgebraStructure, trials: int = 1000,
                            prime: int = DEFAULT_PRIME, seed: int = 0,
                            batch: int = 100) -> VerifyResult:
    """Like :func:`verify_identity_integer` with arguments and values in F_p."""
    if trials < 1:
        raise ValueError("at least one trial is needed")
    poly = identity.polynomial if isinstance(identity, IdentityRecord) else identity
    rng = np.random.default_rng(seed)
    done = 0
    while done < trials:
        k = min(batch, trials - done)
        args = rng.integers(0, prime, size=(k, poly.degree, alg.dim))
        vals = np.remainder(eval_polynomial(poly, args, alg), prime)
        bad = np.flatnonzero(np.any(vals != 0, axis=1))
        if len(bad):
            i = int(bad[0])
            return VerifyResult(False, done + i + 1, args[i].tolist(),
                                [int(x) for x in vals[i]])
        done += k
    return VerifyResult(True, done)


# ----------------------------------------------------------------------------
# corpus


@dataclass
class IdentityRecord:
    name: str
    degree: int
    opset: str
    polynomial: MultilinearPolynomial
    source: str

    def text(self) -> str:
        return freealg.format_identity(self.polynomial, self.source)


CORPUS_NAMES = ("malcev_deg4", "mixed_jacobi", "ly_deg4_a", "ly_deg4_b",
                "ternary_derivation", "filippov_h", "k18", "t141", "m31")


def load_identity(name: str) -> IdentityRecord:
    text = resources.files("malcevly").joinpath("data", f"{name}.txt").read_text("utf-8")
    source = text.splitlines()[0].lstrip("# ").strip()
    poly = primitive_poly(freealg.parse_identity(text))
    return IdentityRecord(name, poly.degree, poly.opset, poly, source)


def corpus() -> list[IdentityRecord]:
    return [load_identity(n) for n in CORPUS_NAMES]


def corpus_map() -> dict[str, IdentityRecord]:
    return {r.name: r for r in corpus()}


def record_algebra(record: IdentityRecord) -> AlgebraStructure:
    """The structure an identity is stated for (scale -30 when both products occur)."""
    return algebra(default_scale(record.opset))


# ----------------------------------------------------------------------------
# search pipelines

# lower-degree identities and how they are lifted into each search
LIFTING_PLANS = {
    ("binary", 5): [("malcev_deg4", "B")],
    ("binary", 6): [("malcev_deg4", "BB"), ("k18", "B")],
    ("binary", 7): [("malcev_deg4", "BBB"), ("k18", "BB")],
    ("ternary", 7): [("ternary_derivation", ("T*",))],
    ("mixed", 4): [("mixed_jacobi", "B")],
    ("mixed", 5): [("mixed_jacobi", "T"), ("mixed_jacobi", "BB"),
                   ("malcev_deg4", "B"), ("ly_deg4_a", "B"), ("ly_deg4_b", "B")],
    ("mixed", 6): [("mixed_jacobi", "BBB"), ("mixed_jacobi", ("B", "T")),
                   ("mixed_jacobi", ("T", "B")),
                   ("malcev_deg4", "BB"), ("ly_deg4_a", "BB"), ("ly_deg4_b", "BB"),
                   ("malcev_deg4", "T"), ("ly_deg4_a", "T"), ("ly_deg4_b", "T"),
                   ("k18", "B"), ("ternary_derivation", "B"), ("m31", "B")],
}

# identities of the search degree that are known before the scan
KNOWN_SAME_DEGREE = {
    ("mixed", 5): ["k18", "ternary_derivation"],
}

# searches whose nullspace scan uses the LLL-reduced integer lattice
LATTICE_SCAN = {("binary", 4), ("binary", 5), ("ternary", 5), ("mixed", 3), ("mixed", 4),
                ("mixed", 5)}


@dataclass
class SearchReport:
    degree: int
    opset: str
    prime: int
    seed: int
    scale: int
    stall: int
    monomial_count: int
    stable_rank: int
    nullspace_dim: int
    consequence_rank: int
    known_rank: int
    new_dim: int
    liftings: int
    iterations: int
    scan: str
    generators: list = field(default_factory=list)
    rank_history: list = field(default_factory=list)
    wall_time: float = 0.0

    def to_json(self, timing: bool = True) -> str:
        data = asdict(self)
        if not timing:
            data.pop("wall_time")
        return json.dumps(data, sort_keys=True, indent=2)


def plan_for(opset: str, degree: int):
    names = corpus_map()
    plans = [(names[n], tuple(p) if isinstance(p, str) else p)
             for n, p in LIFTING_PLANS.get((opset, degree), [])]
    known = [names[n] for n in KNOWN_SAME_DEGREE.get((opset, degree), [])]
    return plans, known


def run_search(degree: int, opset: str, prime: int = DEFAULT_PRIME, seed: int = 0,
               stall: int = 100, scale: int | None = None, scan: str | None = None,
               log=None):
    """Full pipeline for one degree and operation set.

    Returns the report together with the fill result and the final span.
    """
    start = time.perf_counter()
    say = log or (lambda msg: None)
    scale = default_scale(opset) if scale is None else scale
    alg = algebra(scale)
    sp = freealg.space(degree, opset)
    fill = fill_and_reduce(alg, degree, opset, prime, seed, stall)
    null_dim = fill.nullspace_dim
    say(f"fill: rank {fill.rank}, nullspace {null_dim}, {fill.iterations} tuples")

    plans, known = plan_for(opset, degree)
    rank, basis, nlift = consequence_space(plans, degree, opset, prime, target=null_dim)
    say(f"consequences: {nlift} liftings, rank {rank}")
    cons_rank = rank
    for rec in known:
        add_orbit(basis, rec.polynomial.embed(opset))
    known_rank = basis.rank
    if known:
        say(f"with known identities of degree {degree}: rank {known_rank}")

    if scan is None:
        scan = "lattice" if (opset, degree) in LATTICE_SCAN else "support"
    gens = []
    if known_rank < null_dim:
        if scan == "lattice":
            cands = shortest_identities(alg, degree, opset, prime, seed)
        else:
            cands = sorted_nullspace(fill.basis)
        found, basis = module_generators(cands, degree, opset, prime, basis, target=null_dim)
        for g in found:
            poly = primitive_poly(g.polynomial)
            gens.append({"index": g.index + 1, "rank_increase": g.rank_increase,
                         "rank_after": g.rank_after, "terms": len(poly),
                         "square_sum": poly.square_sum(),
                         "identity": freealg.format_identity(poly).splitlines()})
        say(f"scan: {len(gens)} generators, final rank {basis.rank}")
    report = SearchReport(
        degree=degree, opset=opset, prime=prime, seed=seed, scale=scale, stall=stall,
        monomial_count=len(sp), stable_rank=fill.rank, nullspace_dim=null_dim,
        consequence_rank=cons_rank, known_rank=known_rank, new_dim=null_dim - known_rank,
        liftings=nlift, iterations=fill.iterations, scan=scan, generators=gens,
        rank_history=[list(h) for h in fill.history],
        wall_time=round(time.perf_counter() - start, 3))
    return report, fill, basis


# values reported for each search, checked by ``--assert-reference``
REFERENCE_VALUES = {
    ("binary", 2): {"stable_rank": 1, "nullspace_dim": 0},
    ("binary", 3): {"stable_rank": 3, "nullspace_dim": 0},
    ("binary", 4): {"stable_rank": 10, "nullspace_dim": 5, "new_dim": 5, "generators": 1},
    ("binary", 5): {"stable_rank": 34, "nullspace_dim": 71, "consequence_rank": 61,
                    "new_dim": 10, "generators": 1},
    ("binary", 6): {"stable_rank": 120, "nullspace_dim": 825, "consequence_rank": 825,
                    "new_dim": 0},
    ("binary", 7): {"stable_rank": 454, "nullspace_dim": 9941, "consequence_rank": 9941,
                    "new_dim": 0},
    ("ternary", 3): {"stable_rank": 3, "nullspace_dim": 0},
    ("ternary", 5): {"stable_rank": 60, "nullspace_dim": 30, "new_dim": 30, "generators": 1},
    ("ternary", 7): {"stable_rank": 2793, "nullspace_dim": 4767, "consequence_rank": 4410,
                     "new_dim": 357},
    ("mixed", 3): {"stable_rank": 5, "nullspace_dim": 1, "new_dim": 1, "generators": 1},
    ("mixed", 4): {"stable_rank": 21, "nullspace_dim": 24, "consequence_rank": 10,
                   "new_dim": 14, "generators": 3},
    ("mixed", 5): {"stable_rank": 123, "nullspace_dim": 387, "consequence_rank": 341,
                   "known_rank": 367, "new_dim": 20, "generators": 1, "liftings": 40},
    ("mixed", 6): {"stable_rank": 751, "nullspace_dim": 6494, "consequence_rank": 6480,
                   "new_dim": 14, "liftings": 300},
}


def reference_mismatches(report: SearchReport) -> list[str]:
    """Differences between a report and the reported values for its search."""
    want = REFERENCE_VALUES.get((report.opset, report.degree))
    if want is None:
        return [f"no reported values for {report.opset} degree {report.degree}"]
    out = []
    for key, value in want.items():
        got = len(report.generators) if key == "generators" else getattr(report, key)
        if got != value:
            out.append(f"{key}: expected {value}, got {got}")
    return out
