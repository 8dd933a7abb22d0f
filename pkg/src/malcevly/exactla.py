"""Exact dense linear algebra over F_p, Q and Z.

The modular part keeps a row canonical form incrementally: new rows are
reduced against the current basis with one BLAS product and the residue is
eliminated by a small numba kernel.  Because the pivot columns of a row
canonical form are unit vectors, only the free columns are stored.

Float64 products are exact as long as ``rank * (p - 1)**2 < 2**53``; the
contraction is split into pieces when that bound would be exceeded.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numba
import numpy as np

DEFAULT_PRIME = 101
_EXACT = 2**53


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@numba.njit(cache=True)
def _rref_inplace(x, p):
    """Row canonical form of the int64 matrix ``x`` modulo ``p``.

    Returns the rank and the pivot column of each of the leading rows.
    """
    m, n = x.shape
    pivots = np.empty(min(m, n), dtype=np.int64)
    row = 0
    for col in range(n):
        if row == m:
            break
        sel = -1
        for r in range(row, m):
            if x[r, col] != 0:
                sel = r
                break
        if sel < 0:
            continue
        if sel != row:
            for j in range(col, n):
                t = x[row, j]
                x[row, j] = x[sel, j]
                x[sel, j] = t
        # modular inverse by Fermat
        a = x[row, col]
        inv = 1
        e = p - 2
        while e > 0:
            if e & 1:
                inv = inv * a % p
            a = a * a % p
            e >>= 1
        for j in range(col, n):
            x[row, j] = x[row, j] * inv % p
        for r in range(m):
            if r != row:
                f = x[r, col]
                if f != 0:
                    for j in range(col, n):
                        v = x[r, j] - f * x[row, j]
                        x[r, j] = v % p
        pivots[row] = col
        row += 1
    return row, pivots[:row]


def _mulmod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact ``a @ b mod p`` for float64 arrays holding residues."""
    k = a.shape[1]
    step = max(1, (_EXACT - 1) // ((p - 1) ** 2 + 1) - 1)
    if k <= step:
        return np.remainder(a @ b, p)
    out = np.zeros((a.shape[0], b.shape[1]))
    for s in range(0, k, step):
        out += np.remainder(a[:, s:s + step] @ b[s:s + step], p)
    return np.remainder(out, p)


class EchelonBasis:
    """Row canonical form over F_p, grown by appending rows.

    Row ``i`` of the basis has a 1 in column ``pivots[i]``, zeros in every
    other pivot column, and the entries ``free_part[i]`` in ``free_cols``.
    """

    def __init__(self, ncols: int, p: int = DEFAULT_PRIME, chunk: int = 128):
        if not _is_prime(p) or p >= 46341:
            raise ValueError(f"modulus must be a prime below 46341, got {p}")
        self.ncols = ncols
        self.p = p
        self.chunk = chunk
        self.pivots = np.zeros(0, dtype=np.int64)
        self.free_cols = np.arange(ncols, dtype=np.int64)
        self.free_part = np.zeros((0, ncols))

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def copy(self) -> "EchelonBasis":
        other = EchelonBasis(self.ncols, self.p, self.chunk)
        other.pivots = self.pivots.copy()
        other.free_cols = self.free_cols.copy()
        other.free_part = self.free_part.copy()
        return other

    def _residue(self, block: np.ndarray) -> np.ndarray:
        """Reduce rows against the basis; result is in free-column coordinates."""
        p = self.p
        rest = np.remainder(block[:, self.free_cols], p).astype(np.float64)
        if self.rank:
            lead = np.remainder(block[:, self.pivots], p).astype(np.float64)
            rest = np.remainder(rest - _mulmod(lead, self.free_part, p), p)
        return rest

    def reduce(self, block) -> np.ndarray:
        """Full-width residues of ``block`` (zero rows are members of the span)."""
        block = np.atleast_2d(np.asarray(block, dtype=np.int64))
        out = np.zeros(block.shape, dtype=np.int64)
        out[:, self.free_cols] = self._residue(block).astype(np.int64)
        return out

    def contains(self, block) -> np.ndarray:
        """Boolean membership of each row in the current span."""
        block = np.atleast_2d(np.asarray(block, dtype=np.int64))
        return ~np.any(self._residue(block) != 0, axis=1)

    def add(self, block) -> int:
        """Append rows and return the increase in rank."""
        block = np.atleast_2d(np.asarray(block, dtype=np.int64))
        before = self.rank
        for s in range(0, block.shape[0], self.chunk):
            if len(self.free_cols) == 0:
                break
            res = self._residue(block[s:s + self.chunk]).astype(np.int64)
            res = res[np.any(res != 0, axis=1)]
            if len(res) == 0:
                continue
            k, lp = _rref_inplace(res, self.p)
            if k:
                self._merge(res[:k].astype(np.float64), lp)
        return self.rank - before

    def _merge(self, new: np.ndarray, lp: np.ndarray) -> None:
        p = self.p
        keep = np.ones(len(self.free_cols), dtype=bool)
        keep[lp] = False
        old = self.free_part
        if len(old):
            old = np.remainder(old - _mulmod(old[:, lp], new, p), p)
        self.free_part = np.vstack([old[:, keep], new[:, keep]])
        self.pivots = np.concatenate([self.pivots, self.free_cols[lp]])
        self.free_cols = self.free_cols[keep]

    def matrix(self) -> np.ndarray:
        """Dense row canonical form, rows ordered by pivot column."""
        order = np.argsort(self.pivots, kind="stable")
        out = np.zeros((self.rank, self.ncols), dtype=np.int64)
        out[np.arange(self.rank), self.pivots[order]] = 1
        out[:, self.free_cols] = self.free_part[order].astype(np.int64)
        return out

    def nullspace(self) -> np.ndarray:
        """Canonical nullspace basis, one row per free column."""
        nfree = len(self.free_cols)
        out = np.zeros((nfree, self.ncols), dtype=np.int64)
        out[np.arange(nfree), self.free_cols] = 1
        if self.rank:
            out[:, self.pivots] = np.remainder(-self.free_part.T, self.p).astype(np.int64)
        return out


def rcf(m, p: int = DEFAULT_PRIME) -> tuple[int, np.ndarray]:
    """Rank and row canonical form of ``m`` over F_p."""
    m = np.atleast_2d(np.asarray(m, dtype=np.int64))
    basis = EchelonBasis(m.shape[1], p)
    basis.add(m)
    return basis.rank, basis.matrix()


def nullspace_basis(m, p: int = DEFAULT_PRIME) -> np.ndarray:
    """Canonical nullspace basis of a matrix in row canonical form.

    For each free column f the vector has a 1 at f, 0 at the other free
    columns, and minus the column f entries at the pivot positions.
    """
    m = np.atleast_2d(np.asarray(m, dtype=np.int64)) % p
    ncols = m.shape[1]
    pivots = []
    for row in m:
        nz = np.flatnonzero(row)
        if len(nz):
            if row[nz[0]] != 1:
                raise ValueError("matrix is not in row canonical form")
            pivots.append(nz[0])
    free = [c for c in range(ncols) if c not in set(pivots)]
    out = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, c in enumerate(pivots):
            out[k, c] = (-m[i, f]) % p
    return out


def symmetric(v, p: int = DEFAULT_PRIME) -> np.ndarray:
    """Residues mapped to the symmetric range (-p/2, p/2]."""
    v = np.asarray(v, dtype=np.int64) % p
    return np.where(v > p // 2, v - p, v)


def support_order(vectors: np.ndarray, p: int = DEFAULT_PRIME) -> list[int]:
    """Row order by number of nonzeros, ties broken lexicographically on
    the symmetric residues."""
    if len(vectors) == 0:
        return []
    sym = symmetric(vectors, p)
    support = np.count_nonzero(sym, axis=1)
    # offset to unsigned bytes so that byte order equals signed order
    code = (sym + p // 2).astype(np.uint8 if p < 256 else np.uint16)
    if code.dtype != np.uint8:
        code = code.astype(">u2")
    return sorted(range(len(sym)), key=lambda i: (int(support[i]), code[i].tobytes()))


def sort_by_support(vectors: np.ndarray, p: int = DEFAULT_PRIME) -> np.ndarray:
    """Rows ordered by :func:`support_order`."""
    if len(vectors) == 0:
        return vectors
    return vectors[support_order(vectors, p)]


# ----------------------------------------------------------------------------
# rational and integer routines (pure Python, arbitrary precision)


def rref_rational(rows) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns the nonzero rows and pivots."""
    a = [[Fraction(x) for x in row] for row in rows]
    if not a:
        return [], []
    m, n = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        sel = next((i for i in range(r, m) if a[i][c] != 0), None)
        if sel is None:
            continue
        a[r], a[sel] = a[sel], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _primitive_int(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                break
    if g == 0:
        return row
    lead = next(x for x in row if x)
    if lead < 0:
        g = -g
    return [x // g for x in row] if g != 1 else row


def rref_primitive(rows) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over Q with each row scaled to primitive integers.

    Fraction-free Gauss-Jordan elimination: rows stay integral and are divided
    by their content after every update, so each final row is the primitive
    multiple of the corresponding row of the rational RREF.
    """
    a = [_primitive_int([int(x) for x in row]) for row in rows]
    a = [row for row in a if any(row)]
    if not a:
        return [], []
    m, n = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        cand = [i for i in range(r, m) if a[i][c] != 0]
        if not cand:
            continue
        sel = min(cand, key=lambda i: abs(a[i][c]))
        a[r], a[sel] = a[sel], a[r]
        pr, pv = a[r], a[r][c]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                g = gcd(pv, f)
                s, t = pv // g, f // g
                a[i] = _primitive_int([s * x - t * y for x, y in zip(a[i], pr)])
        pivots.append(c)
        r += 1
    return [a[i] for i in range(r)], pivots


def inverse_rational(a) -> list[list[Fraction]]:
    n = len(a)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    r, pivots = rref_rational(aug)
    if pivots[:n] != list(range(n)) or len(r) < n:
        raise ArithmeticError("matrix is singular")
    return [row[n:] for row in r]


def rank_rational(rows) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination on integer rows."""
    a = [[int(x) for x in row] for row in rows]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    r, prev = 0, 1
    for c in range(n):
        if r == m:
            break
        sel = next((i for i in range(r, m) if a[i][c] != 0), None)
        if sel is None:
            continue
        a[r], a[sel] = a[sel], a[r]
        piv = a[r][c]
        for i in range(r + 1, m):
            f = a[i][c]
            a[i] = [(piv * x - f * y) // prev for x, y in zip(a[i], a[r])]
        prev = piv
        r += 1
    return r


def primitive(v) -> list[int]:
    """Scale a rational vector to coprime integers with positive leading entry."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    lead = next(x for x in ints if x)
    if lead < 0:
        g = -g
    return [x // g for x in ints]


def hnf_with_transform(a) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style Hermite normal form ``h`` and unimodular ``u`` with ``u a = h``.

    Pivots are positive and entries above each pivot lie in ``[0, pivot)``.
    The rows of ``u`` past the rank of ``h`` form a basis of the integer
    left kernel of ``a``.
    """
    h = [[int(x) for x in row] for row in a]
    m = len(h)
    n = len(h[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]

    def sub(i, k, q):
        if q:
            h[i] = [x - q * y for x, y in zip(h[i], h[k])]
            u[i] = [x - q * y for x, y in zip(u[i], u[k])]

    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if h[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(h[i][c]))
            h[r], h[piv] = h[piv], h[r]
            u[r], u[piv] = u[piv], u[r]
            clean = True
            for i in range(r + 1, m):
                if h[i][c]:
                    sub(i, r, h[i][c] // h[r][c])
                    clean = clean and h[i][c] == 0
            if clean:
                break
        if h[r][c] == 0:
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            sub(i, r, h[i][c] // h[r][c])
        r += 1
    return h, u


def hnf_rank(h) -> int:
    return sum(1 for row in h if any(row))


def integer_kernel(a) -> list[list[int]]:
    """Lattice basis of ``{v in Z^n : a v = 0}`` read off the HNF transform of a^T."""
    if not a:
        raise ValueError("empty matrix")
    at = [list(col) for col in zip(*a)]
    h, u = hnf_with_transform(at)
    return u[hnf_rank(h):]


def _dot(x, y) -> int:
    return sum(a * b for a, b in zip(x, y))


def lll_reduce(basis, delta: Fraction = Fraction(3, 4), sort: bool = True) -> list[list[int]]:
    """LLL reduction with exact integer Gram-Schmidt data.

    Follows the integral formulation (Cohen, algorithm 2.6.7): the
    quantities ``d_i`` and ``lam[k][j]`` are the integers ``d_i = |b*_1|^2
    ... |b*_i|^2`` and ``lam = d_j mu_kj``.  The reduced basis is returned
    sorted by increasing Euclidean norm unless ``sort`` is false.
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must lie in (1/4, 1)")
    b = [[int(x) for x in v] for v in basis]
    n = len(b)
    if n == 0:
        return []
    num, den = delta.numerator, delta.denominator
    d = [1] + [0] * n          # d[i+1] belongs to b[i]
    lam = [[0] * n for _ in range(n)]

    def gram_row(k):
        for j in range(k + 1):
            u = _dot(b[k], b[j])
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            else:
                if u == 0:
                    raise ValueError("basis vectors are linearly dependent")
                d[k + 1] = u

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k, kmax):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lk = lam[k][k - 1]
        bb = (d[k - 1] * d[k + 1] + lk * lk) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lk * t) // d[k]
            lam[i][k - 1] = (bb * t + lk * lam[i][k]) // d[k + 1]
        d[k] = bb

    gram_row(0)
    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            gram_row(k)
        red(k, k - 1)
        lk = lam[k][k - 1]
        if den * d[k + 1] * d[k - 1] < num * d[k] * d[k] - den * lk * lk:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    if not sort:
        return b
    return sorted(b, key=lambda v: (_dot(v, v), [-x for x in v]))


def dump_matrix(m, p: int = 0) -> str:
    """Whitespace-separated text dump with a ``rows cols p`` header."""
    m = np.atleast_2d(np.asarray(m, dtype=object))
    lines = [f"{m.shape[0]} {m.shape[1]} {p}"]
    lines += [" ".join(str(int(x)) for x in row) for row in m]
    return "\n".join(lines) + "\n"


def load_matrix(text: str) -> tuple[list[list[int]], int]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    rows, cols, p = (int(x) for x in lines[0].split())
    data = [[int(x) for x in ln.split()] for ln in lines[1:1 + rows]]
    if len(data) != rows or any(len(r) != cols for r in data):
        raise ValueError("matrix dump does not match its header")
    return data, p
