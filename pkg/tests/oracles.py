"""Independent reference implementations used only by the tests.

Nothing here shares code with the package's matrix builders: cochains are
plain Python functions of their arguments, differentials are the textbook
formulas applied to basis tensors, and ranks come from dense fraction-free
elimination.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd

# ---------------------------------------------------------------- vectors


def zero(n):
    return [Fraction(0)] * n


def basis(n, i):
    v = zero(n)
    v[i] = Fraction(1)
    return v


def add(u, v):
    return [a + b for a, b in zip(u, v)]


def sub(u, v):
    return [a - b for a, b in zip(u, v)]


def smul(c, v):
    return [c * a for a in v]


def nz(v):
    return [(i, x) for i, x in enumerate(v) if x != 0]


def apply_lin(mat, v):
    """mat[j][i] is the e_j coefficient of the image of e_i."""
    out = zero(len(mat))
    for i, x in nz(v):
        for j in range(len(mat)):
            out[j] += mat[j][i] * x
    return out


# ---------------------------------------------------------------- structures


class Alg:
    def __init__(self, A):
        self.dim = A.dim
        self.c = A.mul.tolist()
        self.D = A.der.tolist()
        self.lam = A.weight
        self.unit = list(A.unit)

    def mul(self, u, v):
        out = zero(self.dim)
        for i, x in nz(u):
            for j, y in nz(v):
                for k in range(self.dim):
                    out[k] += x * y * self.c[i][j][k]
        return out

    def d(self, u):
        return apply_lin(self.D, u)


class Mod:
    def __init__(self, M):
        self.dim = M.dim
        self.l = M.left.tolist()
        self.r = M.right.tolist()
        self.D = M.der.tolist()

    def left(self, a, m):
        out = zero(self.dim)
        for i, x in nz(a):
            for j, y in nz(m):
                for k in range(self.dim):
                    out[k] += x * y * self.l[i][j][k]
        return out

    def right(self, m, a):
        out = zero(self.dim)
        for j, y in nz(m):
            for i, x in nz(a):
                for k in range(self.dim):
                    out[k] += x * y * self.r[j][i][k]
        return out

    def d(self, m):
        return apply_lin(self.D, m)


class TriangleMod(Mod):
    """Coefficients with a |> m = (a + lam d a) m and m <| a = m (a + lam d a)."""

    def __init__(self, M, A: Alg):
        super().__init__(M)
        self.A = A

    def _twist(self, a):
        return add(a, smul(self.A.lam, self.A.d(a)))

    def left(self, a, m):
        return super().left(self._twist(a), m)

    def right(self, m, a):
        return super().right(m, self._twist(a))


class Pulled(Mod):
    """N as an A-bimodule via phi."""

    def __init__(self, N: Mod, phi):
        self.__dict__.update(N.__dict__)
        self._N = N
        self.phi = phi

    def left(self, a, m):
        return self._N.left(apply_lin(self.phi, a), m)

    def right(self, m, a):
        return self._N.right(m, apply_lin(self.phi, a))


# ---------------------------------------------------------------- cochains as functions


class Cochain:
    """A multilinear map given by its table on basis tuples."""

    def __init__(self, arity, dom, cod, table):
        self.arity, self.dom, self.cod, self.table = arity, dom, cod, table

    def __call__(self, *args):
        out = zero(self.cod)
        supports = [nz(a) for a in args]
        for choice in product(*supports):
            coeff = Fraction(1)
            for _, x in choice:
                coeff *= x
            idx = tuple(i for i, _ in choice)
            val = self.table.get(idx)
            if val is not None:
                out = add(out, smul(coeff, val))
        return out


def coords_to_cochain(coords, arity, dom, cod):
    table = {}
    size = dom**arity
    for k, x in enumerate(coords):
        if x:
            y, rest = divmod(k, size)
            idx = _unlex(rest, dom, arity)
            table.setdefault(idx, zero(cod))
            table[idx][y] += x
    return Cochain(arity, dom, cod, table)


def _unlex(k, dom, arity):
    idx = []
    for _ in range(arity):
        k, i = divmod(k, dom)
        idx.append(i)
    return tuple(reversed(idx))


def tabulate(fn, arity, dom, cod):
    """Coordinates of the multilinear map ``fn`` (called on basis vectors)."""
    out = zero(cod * dom**arity)
    for k, idx in enumerate(product(range(dom), repeat=arity)):
        val = fn(*[basis(dom, i) for i in idx])
        for y, x in nz(val):
            out[y * dom**arity + k] = x
    return out


# ---------------------------------------------------------------- formulas


def hochschild(A: Alg, M: Mod, n, f: Cochain):
    def g(*a):
        out = M.left(a[0], f(*a[1:]))
        for i in range(1, n + 1):
            args = list(a[: i - 1]) + [A.mul(a[i - 1], a[i])] + list(a[i + 1 :])
            out = add(out, smul((-1) ** i, f(*args)))
        return add(out, smul((-1) ** (n + 1), M.right(f(*a[:n]), a[n])))

    return g


def phi_cap(A: Alg, M: Mod, n, f: Cochain):
    def g(*a):
        out = smul(-1, M.d(f(*a)))
        for k in range(1, n + 1):
            for S in combinations(range(n), k):
                args = [A.d(x) if i in S else x for i, x in enumerate(a)]
                out = add(out, smul(A.lam ** (k - 1), f(*args)))
        return out

    return g


def _as_fn(v):
    """A 0-ary 'cochain' (a vector) as a callable."""
    return lambda *a: list(v)


# Each map below takes a dict {block: coords} and returns a dict {block: coords}.


def alg_map(A: Alg, M: Mod, n, x):
    f = coords_to_cochain(x["f"], n, A.dim, M.dim)
    return {"f": tabulate(hochschild(A, M, n, f), n + 1, A.dim, M.dim)}


def phi_map(A: Alg, M: Mod, n, x):
    f = coords_to_cochain(x["f"], n, A.dim, M.dim)
    return {"f": tabulate(phi_cap(A, M, n, f), n, A.dim, M.dim)}


def da_map(A: Alg, M: Mod, Mt: Mod, n, x):
    f = coords_to_cochain(x["f"], n, A.dim, M.dim)
    d1 = tabulate(hochschild(A, M, n, f), n + 1, A.dim, M.dim)
    d2 = smul(-1, tabulate(phi_cap(A, M, n, f), n, A.dim, M.dim))
    if n >= 1:
        g = coords_to_cochain(x["g"], n - 1, A.dim, M.dim)
        d2 = sub(d2, tabulate(hochschild(A, Mt, n - 1, g), n, A.dim, M.dim))
    return {"f": d1, "g": d2}


class Triple:
    """Oracle view of a phi-bimodule."""

    def __init__(self, P):
        self.A, self.B = Alg(P.A), Alg(P.B)
        self.M, self.N = Mod(P.M), Mod(P.N)
        self.phi = P.morphism.phi.tolist()
        self.psi = P.psi.tolist()
        self.NA = Pulled(self.N, self.phi)


def mor_map(T: Triple, n, x):
    A, B, M, N = T.A, T.B, T.M, T.N
    f = coords_to_cochain(x["f"], n, A.dim, M.dim)
    g = coords_to_cochain(x["g"], n, B.dim, N.dim)
    out = {
        "f": tabulate(hochschild(A, M, n, f), n + 1, A.dim, M.dim),
        "g": tabulate(hochschild(B, N, n, g), n + 1, B.dim, N.dim),
    }

    def third(*a):
        val = sub(apply_lin(T.psi, f(*a)), g(*[apply_lin(T.phi, v) for v in a]))
        if n >= 1:
            val = sub(val, hochschild(A, T.NA, n - 1, h)(*a))
        return val

    if n >= 1:
        h = coords_to_cochain(x["h"], n - 1, A.dim, N.dim)
    out["h"] = tabulate(third, n, A.dim, N.dim)
    return out


def pi_map(T: Triple, n, x):
    A, B, M, N = T.A, T.B, T.M, T.N
    f = coords_to_cochain(x["f"], n, A.dim, M.dim)
    g = coords_to_cochain(x["g"], n, B.dim, N.dim)
    out = {
        "f": tabulate(phi_cap(A, M, n, f), n, A.dim, M.dim),
        "g": tabulate(phi_cap(B, N, n, g), n, B.dim, N.dim),
    }
    if n >= 1:
        h = coords_to_cochain(x["h"], n - 1, A.dim, N.dim)
        out["h"] = tabulate(phi_cap(A, T.NA, n - 1, h), n - 1, A.dim, N.dim)
    return out


def tau_map(T: Triple, n, x):
    """Comparison map into C^n(R, W), evaluated word by word."""
    A, B, M, N = T.A, T.B, T.M, T.N
    a, b, m, nn = A.dim, B.dim, M.dim, N.dim
    r, w = a + 2 * b, m + 2 * nn
    f = coords_to_cochain(x["f"], n, a, m)
    g = coords_to_cochain(x["g"], n, b, nn)
    h = coords_to_cochain(x["h"], n - 1, a, nn) if n >= 1 else None

    def kind(i):
        return "A" if i < a else ("B" if i < a + b else "P")

    def local(i):
        return i if i < a else (i - a if i < a + b else i - a - b)

    def place(vec, offset):
        out = zero(w)
        for k, v in nz(vec):
            out[offset + k] = v
        return out

    out = zero(w * r**n)
    for k, idx in enumerate(product(range(r), repeat=n)):
        kinds = "".join(kind(i) for i in idx)
        loc = [basis(a if kind(i) == "A" else b, local(i)) for i in idx]
        val = zero(w)
        if n == 0:
            val = add(place(x["f"], 0), place(x["g"], m))
        elif kinds == "A" * n:
            val = place(f(*loc), 0)
        elif kinds == "B" * n:
            val = place(g(*loc), m)
        elif "P" in kinds:
            j = kinds.index("P")
            if kinds == "B" * j + "P" + "A" * (n - j - 1):
                args = loc[: j + 1] + [apply_lin(T.phi, v) for v in loc[j + 1 :]]
                val = place(g(*args), m + nn)
                if j == 0:
                    val = add(val, place(N.left(loc[0], h(*loc[1:])), m + nn))
        for y, v in nz(val):
            out[y * r**n + k] = v
    return out


# ---------------------------------------------------------------- matrices and ranks


def matrix_of(fn, src_blocks, tgt_blocks):
    """Dense matrix of a map between block spaces.

    ``src_blocks``/``tgt_blocks`` are lists of (name, size); ``fn`` maps a dict of
    source block coordinates to a dict of target block coordinates.
    """
    src_total = sum(s for _, s in src_blocks)
    tgt_total = sum(s for _, s in tgt_blocks)
    cols = []
    for j in range(src_total):
        x, off = {}, 0
        for name, size in src_blocks:
            x[name] = [Fraction(int(off + i == j)) for i in range(size)]
            off += size
        y = fn(x)
        col = []
        for name, size in tgt_blocks:
            vals = y.get(name, zero(size))
            assert len(vals) == size, (name, len(vals), size)
            col.extend(vals)
        cols.append(col)
    return [[cols[j][i] for j in range(src_total)] for i in range(tgt_total)]


def dense_rank(rows):
    """Bareiss fraction-free elimination on a dense rational matrix."""
    mat = []
    for row in rows:
        den = 1
        for v in row:
            den = den * Fraction(v).denominator // gcd(den, Fraction(v).denominator)
        mat.append([int(Fraction(v) * den) for v in row])
    if not mat or not mat[0]:
        return 0
    nr, nc = len(mat), len(mat[0])
    rank, prev = 0, 1
    for col in range(nc):
        piv = next((i for i in range(rank, nr) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        for i in range(rank + 1, nr):
            mat[i] = [(mat[rank][col] * mat[i][k] - mat[i][col] * mat[rank][k]) // prev for k in range(nc)]
        prev = mat[rank][col]
        rank += 1
        if rank == nr:
            break
    return rank


def dense_betti(matrices, dims):
    """Betti numbers from dense differential matrices d_0..d_N and space dims C^0..C^N."""
    ranks = [dense_rank(m) for m in matrices]
    return [dims[n] - ranks[n] - (ranks[n - 1] if n else 0) for n in range(len(dims))]


# ---------------------------------------------------------------- truncated polynomials


def deformation_holds(T):
    """Check the defining identities of a deformation in R[t]/t^(N+1) on basis tuples."""
    N = T.order
    lam = T.weight

    def ser(vec):
        return [list(vec)] + [zero(len(vec)) for _ in range(N)]

    def trunc_mul(mus, u, v):
        dim = len(u[0])
        out = [zero(dim) for _ in range(N + 1)]
        for i in range(N + 1):
            for j in range(N + 1 - i):
                for k in range(N + 1 - i - j):
                    c = mus[i].tolist()
                    val = zero(dim)
                    for p, x in nz(u[j]):
                        for q, y in nz(v[k]):
                            for s in range(dim):
                                val[s] += x * y * c[p][q][s]
                    out[i + j + k] = add(out[i + j + k], val)
        return out

    def trunc_lin(mats, u):
        rows = len(mats[0])
        out = [zero(rows) for _ in range(N + 1)]
        for i in range(N + 1):
            for j in range(N + 1 - i):
                out[i + j] = add(out[i + j], apply_lin(mats[i].tolist(), u[j]))
        return out

    def ser_add(*xs):
        out = xs[0]
        for x in xs[1:]:
            out = [add(p, q) for p, q in zip(out, x)]
        return out

    for X, mus, ds in (("A", T.muA, T.dA), ("B", T.muB, T.dB)):
        dim = mus[0].shape[0]
        es = [ser(basis(dim, i)) for i in range(dim)]
        for u, v, w in product(es, repeat=3):
            if trunc_mul(mus, trunc_mul(mus, u, v), w) != trunc_mul(mus, u, trunc_mul(mus, v, w)):
                return False
        for u, v in product(es, repeat=2):
            du, dv = trunc_lin(ds, u), trunc_lin(ds, v)
            lhs = trunc_lin(ds, trunc_mul(mus, u, v))
            lam_term = [smul(lam, x) for x in trunc_mul(mus, du, dv)]
            rhs = ser_add(trunc_mul(mus, du, v), trunc_mul(mus, u, dv), lam_term)
            if lhs != rhs:
                return False
    a = T.muA[0].shape[0]
    es = [ser(basis(a, i)) for i in range(a)]
    for u, v in product(es, repeat=2):
        lhs = trunc_lin(T.phi, trunc_mul(T.muA, u, v))
        rhs = trunc_mul(T.muB, trunc_lin(T.phi, u), trunc_lin(T.phi, v))
        if lhs != rhs:
            return False
    for u in es:
        if trunc_lin(T.phi, trunc_lin(T.dA, u)) != trunc_lin(T.dB, trunc_lin(T.phi, u)):
            return False
    return True
