"""The 7-dimensional Malcev algebra built from sl(2)-modules.

V(n) has the weight basis v_n, v_{n-2}, ..., v_{-n}; index ``i`` in every
coefficient vector below is the weight ``n - 2i``.  The exterior square of
V(6) splits as V(10) + V(6) + V(2), and the projections onto the last two
summands give the binary product and (through the adjoint action) the
ternary product.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, gcd

from .exactla import inverse_rational, primitive, rref_rational

N = 6
DIM = N + 1
WEIGHTS = [N - 2 * i for i in range(DIM)]
GENERATORS = ("H", "E", "F")


def weight_index(n: int, w: int) -> int:
    if (n - w) % 2 or abs(w) > n:
        raise ValueError(f"{w} is not a weight of V({n})")
    return (n - w) // 2


@dataclass(frozen=True)
class IrrepElement:
    n: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.n + 1:
            raise ValueError("coefficient vector must have length n+1")

    @classmethod
    def basis(cls, n: int, w: int) -> "IrrepElement":
        c = [Fraction(0)] * (n + 1)
        c[weight_index(n, w)] = Fraction(1)
        return cls(n, tuple(c))


def _act_index(n: int, g: str, i: int) -> list[tuple[int, int]]:
    """g . v_{n-2i} as a list of (index, coefficient)."""
    if g == "H":
        return [(i, n - 2 * i)]
    if g == "E":
        return [(i - 1, n - i + 1)] if i > 0 else []
    if g == "F":
        return [(i + 1, i + 1)] if i < n else []
    raise ValueError(f"unknown generator {g!r}")


def action_matrix(n: int, g: str) -> list[list[int]]:
    """Matrix of g on V(n); column i is the image of v_{n-2i}."""
    m = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        for j, c in _act_index(n, g, i):
            m[j][i] += c
    return m


def irrep_action(n: int, g: str, x: IrrepElement) -> IrrepElement:
    if x.n != n:
        raise ValueError(f"element of V({x.n}) passed for V({n})")
    out = [Fraction(0)] * (n + 1)
    for i, c in enumerate(x.coeffs):
        if c:
            for j, k in _act_index(n, g, i):
                out[j] += k * c
    return IrrepElement(n, tuple(out))


# ----------------------------------------------------------------------------
# exterior square


def wedge_pairs(n: int = N) -> list[tuple[int, int]]:
    """Tensor basis of the exterior square as index pairs (i < j).

    Index order equals the weight order v_a ^ v_b with a > b, sorted
    lexicographically by descending weights.
    """
    return [(i, j) for i in range(n + 1) for j in range(i + 1, n + 1)]


TENSOR_BASIS = wedge_pairs(N)
_PAIR_INDEX = {pair: k for k, pair in enumerate(TENSOR_BASIS)}


@dataclass(frozen=True)
class ExtSquareElement:
    coeffs: tuple
    n: int = N

    def __post_init__(self):
        if len(self.coeffs) != len(wedge_pairs(self.n)):
            raise ValueError("wrong length for an exterior square element")

    @classmethod
    def wedge(cls, wi: int, wj: int, n: int = N) -> "ExtSquareElement":
        """v_wi ^ v_wj for weights wi, wj."""
        pairs = wedge_pairs(n)
        c = [Fraction(0)] * len(pairs)
        i, j = weight_index(n, wi), weight_index(n, wj)
        if i != j:
            sign = 1 if i < j else -1
            c[pairs.index((min(i, j), max(i, j)))] = Fraction(sign)
        return cls(tuple(c), n)


def wedge_action(g: str, x: ExtSquareElement) -> ExtSquareElement:
    """Derivation action g.(a ^ b) = (g.a) ^ b + a ^ (g.b)."""
    pairs = wedge_pairs(x.n)
    index = {pair: k for k, pair in enumerate(pairs)}
    out = [Fraction(0)] * len(pairs)

    def put(i, j, c):
        if i == j:
            return
        if i > j:
            i, j, c = j, i, -c
        out[index[(i, j)]] += c

    for k, c in enumerate(x.coeffs):
        if not c:
            continue
        i, j = pairs[k]
        for i2, a in _act_index(x.n, g, i):
            put(i2, j, a * c)
        for j2, a in _act_index(x.n, g, j):
            put(i, j2, a * c)
    return ExtSquareElement(tuple(out), x.n)


def _ext_weight(n: int, pair: tuple[int, int]) -> int:
    return 2 * n - 2 * pair[0] - 2 * pair[1]


def _divided_chain(top: ExtSquareElement, hw: int) -> list[ExtSquareElement]:
    chain = [top]
    for k in range(1, hw + 1):
        nxt = wedge_action("F", chain[-1])
        chain.append(ExtSquareElement(tuple(c / k for c in nxt.coeffs), top.n))
    return chain


def highest_weight_vectors(n: int = N) -> list[tuple[int, ExtSquareElement]]:
    """Highest weight vectors of the summands of the exterior square of V(n).

    In each weight space the kernel of E is solved exactly; every kernel
    vector is scaled to a primitive integer vector with positive leading
    coefficient.  Returned in descending order of highest weight.
    """
    pairs = wedge_pairs(n)
    out = []
    for w in range(2 * n - 2, -1, -2):
        cols = [k for k, pr in enumerate(pairs) if _ext_weight(n, pr) == w]
        images = []
        for k in cols:
            c = [Fraction(0)] * len(pairs)
            c[k] = Fraction(1)
            images.append(wedge_action("E", ExtSquareElement(tuple(c), n)).coeffs)
        # kernel of the linear map sending basis k to images[k]
        system = [list(row) for row in zip(*images)]
        red, piv = rref_rational(system)
        free = [j for j in range(len(cols)) if j not in piv]
        for f in free:
            v = [Fraction(0)] * len(cols)
            v[f] = Fraction(1)
            for r, pc in enumerate(piv):
                v[pc] = -red[r][f]
            v = primitive(v)
            c = [Fraction(0)] * len(pairs)
            for j, k in enumerate(cols):
                c[k] = Fraction(v[j])
            out.append((w, ExtSquareElement(tuple(c), n)))
    return out


def exterior_square_decomposition(n: int) -> list[int]:
    """Highest weights of the irreducible summands of the exterior square of V(n)."""
    return [w for w, _ in highest_weight_vectors(n)]


def module_basis() -> list[ExtSquareElement]:
    """s_10..s_-10, t_6..t_-6, u_2, u_0, u_-2 in tensor coordinates."""
    basis = []
    for hw, top in highest_weight_vectors(N):
        basis.extend(_divided_chain(top, hw))
    return basis


def transition_matrix() -> list[list[Fraction]]:
    """21x21 matrix whose column j is module basis vector j."""
    cols = [v.coeffs for v in module_basis()]
    return [list(row) for row in zip(*cols)]


@dataclass(frozen=True)
class MorphismTable:
    """entries[i][j] = c such that the image of v_{w_i} ^ v_{w_j} is c times
    the target basis vector of weight w_i + w_j."""

    entries: tuple
    target: str

    def __getitem__(self, wpair):
        p, q = wpair
        return self.entries[weight_index(N, p)][weight_index(N, q)]


def _scaled_table(raw: list[list[Fraction]]) -> tuple:
    flat = [x for row in raw for x in row]
    den = 1
    for x in flat:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [[int(x * den) for x in row] for row in raw]
    g = 0
    for row in ints:
        for x in row:
            g = gcd(g, x)
    lead = next(x for row in ints for x in row if x)
    if lead < 0:
        g = -g
    return tuple(tuple(x // g for x in row) for row in ints)


def projection_tables() -> tuple[MorphismTable, MorphismTable]:
    """The morphisms onto V(6) and V(2) as tables of relatively prime integers."""
    a = transition_matrix()
    inv = inverse_rational(a)
    summands = highest_weight_vectors(N)
    offsets, start = {}, 0
    for hw, _ in summands:
        offsets[hw] = start
        start += hw + 1
    tables = []
    for hw, name in ((6, "alpha"), (2, "beta")):
        raw = [[Fraction(0)] * DIM for _ in range(DIM)]
        for i in range(DIM):
            for j in range(DIM):
                if i == j:
                    continue
                w = WEIGHTS[i] + WEIGHTS[j]
                if abs(w) > hw:
                    continue
                row = offsets[hw] + (hw - w) // 2
                k = _PAIR_INDEX[(min(i, j), max(i, j))]
                sign = 1 if i < j else -1
                raw[i][j] = sign * inv[row][k]
        tables.append(MorphismTable(_scaled_table(raw), name))
    return tables[0], tables[1]


# adjoint module V(2) acting on V(6): u_2 <-> -E, u_0 <-> H, u_-2 <-> F
_ADJOINT = {2: ("E", -1), 0: ("H", 1), -2: ("F", 1)}


@dataclass(frozen=True)
class TrilinearTable:
    """entries[i][j][k] is the coefficient of v_{w_i+w_j+w_k} in (v_{w_i}, v_{w_j}, v_{w_k})."""

    entries: tuple
    scale: int = 1

    def __getitem__(self, wtriple):
        p, q, r = (weight_index(N, w) for w in wtriple)
        return self.entries[p][q][r]


def trilinear_table(scale: int = 1) -> TrilinearTable:
    if scale == 0:
        raise ValueError("scale must be nonzero")
    _, beta = projection_tables()
    mats = {w: action_matrix(N, g) for w, (g, _) in _ADJOINT.items()}
    out = [[[0] * DIM for _ in range(DIM)] for _ in range(DIM)]
    for i in range(DIM):
        for j in range(DIM):
            c = beta.entries[i][j]
            if not c:
                continue
            w = WEIGHTS[i] + WEIGHTS[j]
            g, sign = _ADJOINT[w]
            for k in range(DIM):
                # the action matrix has a single nonzero per column
                for r in range(DIM):
                    a = mats[w][r][k]
                    if a:
                        out[i][j][k] = scale * sign * c * a
    return TrilinearTable(tuple(tuple(tuple(r) for r in m) for m in out), scale)


# ----------------------------------------------------------------------------
# integer structure tensors


def bilinear_tensor() -> list[list[list[int]]]:
    """C[i][j][k] = coefficient of basis k in [e_i, e_j]."""
    alpha, _ = projection_tables()
    c = [[[0] * DIM for _ in range(DIM)] for _ in range(DIM)]
    for i in range(DIM):
        for j in range(DIM):
            w = WEIGHTS[i] + WEIGHTS[j]
            if abs(w) <= N and alpha.entries[i][j]:
                c[i][j][weight_index(N, w)] = alpha.entries[i][j]
    return c


def trilinear_tensor(scale: int = 1) -> list[list[list[list[int]]]]:
    """T[i][j][k][l] = coefficient of basis l in (e_i, e_j, e_k)."""
    t = trilinear_table(scale)
    out = [[[[0] * DIM for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)]
    for i in range(DIM):
        for j in range(DIM):
            for k in range(DIM):
                w = WEIGHTS[i] + WEIGHTS[j] + WEIGHTS[k]
                if abs(w) <= N and t.entries[i][j][k]:
                    out[i][j][k][weight_index(N, w)] = t.entries[i][j][k]
    return out


def structure_constants(scale: int = 1) -> dict:
    alpha, _ = projection_tables()
    return {
        "dim": DIM,
        "weights": WEIGHTS,
        "bilinear": [list(r) for r in alpha.entries],
        "trilinear": [[list(r) for r in m] for m in trilinear_table(scale).entries],
        "scale": scale,
    }


def structure_constants_json(scale: int = 1) -> str:
    return json.dumps(structure_constants(scale), sort_keys=True) + "\n"


# ----------------------------------------------------------------------------
# gl(5) model


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def _bracket(a, b):
    ab, ba = _matmul(a, b), _matmul(b, a)
    return [[x - y for x, y in zip(r, s)] for r, s in zip(ab, ba)]


def gl5_generators() -> dict[str, list[list[int]]]:
    """H, E, F on homogeneous quartics in the monomial basis x^(4-i) y^i."""
    n = 4
    h = [[(n - 2 * i) if i == j else 0 for j in range(n + 1)] for i in range(n + 1)]
    e = [[0] * (n + 1) for _ in range(n + 1)]
    f = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        if i > 0:
            e[i - 1][i] = i          # x d/dy : x^(4-i) y^i -> i x^(5-i) y^(i-1)
        if i < n:
            f[i + 1][i] = n - i      # y d/dx : x^(4-i) y^i -> (4-i) x^(3-i) y^(i+1)
    return {"H": h, "E": e, "F": f}


def _matpow(a, k):
    n = len(a)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(k):
        out = _matmul(out, a)
    return out


def gl5_summand_bases() -> dict[int, list[list[list[Fraction]]]]:
    """Divided-power bases of the summands V(0), V(2), ..., V(8) of gl(5).

    The highest weight vector of V(2k) is E^k / k!, and the rest of the
    chain is ad(F)^i / i! applied to it.
    """
    gens = gl5_generators()
    out = {}
    for k in range(5):
        top = [[Fraction(x, factorial(k)) for x in row] for row in _matpow(gens["E"], k)]
        chain = [top]
        for i in range(1, 2 * k + 1):
            nxt = _bracket(gens["F"], chain[-1])
            chain.append([[x / i for x in row] for row in nxt])
        out[2 * k] = chain
    return out


@dataclass
class CrosscheckReport:
    ok: bool
    lambda_alpha: Fraction | None
    lambda_beta: Fraction | None
    exterior_square_v4: list[int]
    v6_highest: list[list[Fraction]]


def _proportional(found: dict, table: MorphismTable) -> Fraction | None:
    ratio = None
    for (i, j), val in found.items():
        ref = table.entries[i][j]
        if ref == 0:
            if val != 0:
                return None
            continue
        r = Fraction(val) / ref
        if ratio is None:
            ratio = r
        elif r != ratio:
            return None
    return ratio if ratio else None


def gl5_crosscheck() -> CrosscheckReport:
    """Recompute both products as projected commutators inside gl(5)."""
    bases = gl5_summand_bases()
    flat = []
    labels = []
    for hw in sorted(bases):
        for i, m in enumerate(bases[hw]):
            flat.append([x for row in m for x in row])
            labels.append((hw, hw - 2 * i))
    # coordinates in the decomposed basis: solve against the 25x25 matrix
    inv = inverse_rational([list(r) for r in zip(*flat)])
    six = bases[6]
    alpha, beta = projection_tables()
    found = {6: {}, 2: {}}
    for i in range(DIM):
        for j in range(DIM):
            br = _bracket(six[i], six[j])
            vec = [x for row in br for x in row]
            coords = [sum(r[k] * vec[k] for k in range(25)) for r in inv]
            w = WEIGHTS[i] + WEIGHTS[j]
            for idx, (hw, wt) in enumerate(labels):
                if coords[idx] and hw not in (2, 6):
                    raise ArithmeticError("commutator left the o(5) summands")
            for hw in (6, 2):
                if abs(w) <= hw:
                    found[hw][(i, j)] = coords[labels.index((hw, w))]
                else:
                    found[hw][(i, j)] = Fraction(0)
    la = _proportional(found[6], alpha)
    lb = _proportional(found[2], beta)
    return CrosscheckReport(
        ok=la is not None and lb is not None,
        lambda_alpha=la,
        lambda_beta=lb,
        exterior_square_v4=exterior_square_decomposition(4),
        v6_highest=six[0],
    )


def binomial_model_check(n: int = N) -> bool:
    """The monomials C(n,i) x^(n-i) y^i realise the weight-basis action."""
    for i in range(n + 1):
        # E = x d/dy on C(n,i) x^(n-i) y^i gives i C(n,i) x^(n-i+1) y^(i-1)
        if i > 0 and i * comb(n, i) != (n - i + 1) * comb(n, i - 1):
            return False
        # F = y d/dx gives (n-i) C(n,i) x^(n-i-1) y^(i+1)
        if i < n and (n - i) * comb(n, i) != (i + 1) * comb(n, i + 1):
            return False
    return True
