"""The ring O_{l,m} / p^N = (O_m / p^N)[Y] / Phi_{p^l}(Y).

``Y`` is a symbolic primitive p^l-th root of unity and ``Y - 1`` a
uniformizer; the ramification index is e = p^{l-1}(p-1).  An element is a
flat tuple of e*m residues mod p^N, index ``i*m + j`` holding the X^j part
of the Y^i coefficient.
"""
from __future__ import annotations

from functools import lru_cache
from math import ceil, comb

import numpy as np

from .errors import AmbiguousSnap, CtxMismatch, NoSnap, OutOfRange, PrecisionExhausted, UsageError
from .padic import int_val, require_prime
from .unramified import FqCtx, UnramElem, _poly_mulmod, build_field, unram_ring


def cyclotomic_poly(p: int, l: int) -> list[int]:
    """Integer coefficients of Phi_{p^l}(Y), lowest degree first."""
    step = p ** (l - 1)
    coeffs = [0] * (step * (p - 1) + 1)
    for k in range(p):
        coeffs[k * step] = 1
    return coeffs


def shifted_cyclotomic_poly(p: int, l: int) -> list[int]:
    """Coefficients of Phi_{p^l}(1 + X)."""
    phi = cyclotomic_poly(p, l)
    out = [0] * len(phi)
    for i, c in enumerate(phi):
        if c:
            for j in range(i + 1):
                out[j] += c * comb(i, j)
    return out


def is_eisenstein(coeffs: list[int], p: int) -> bool:
    return (
        coeffs[-1] == 1
        and all(c % p == 0 for c in coeffs[:-1])
        and coeffs[0] % (p * p) != 0
    )


class CycloCtx:
    def __init__(self, p: int, l: int, m: int = 1, N: int = 4, fq: FqCtx | None = None):
        require_prime(p)
        if l < 1:
            raise OutOfRange("level l must be >= 1")
        if fq is None:
            fq = build_field(p, m)
        elif fq.p != p or fq.m != m:
            raise CtxMismatch("field does not match (p, m)")
        self.p, self.l, self.m, self.N = p, l, m, N
        self.fq = fq
        self.ring = unram_ring(fq, N)
        self.mod = p**N
        self.e = p ** (l - 1) * (p - 1)
        self.order = p**l
        self._step = p ** (l - 1)
        self._key = (p, l, fq._key, N)
        if not is_eisenstein(shifted_cyclotomic_poly(p, l), p):
            raise AssertionError(f"Phi_{p}^{l}(1+X) is not Eisenstein")
        self._binom = None  # binom[i][j] for the (Y-1)-power basis, built on demand
        self._y_powers = None
        self._y_index = None
        self._binom_p = None
        bound = (self.mod - 1) ** 2 * self.e * m + 1
        self._slot_bytes = (bound.bit_length() + 8) // 8
        # slots of the packed product after folding: A + c*mod - top with
        # c*mod >= bound stays in [0, 2*bound + mod)
        c = -(-bound // self.mod)
        self._fold_bytes = ((2 * bound + self.mod).bit_length() + 8) // 8
        w = 1 if m == 1 else 2 * m - 1
        rowbits = 8 * self._fold_bytes * w
        slot = 8 * self._fold_bytes
        self._fold_offset = sum((c * self.mod) << (i * slot) for i in range(self.e * w))
        self._fold_rep = sum(1 << (k * self._step * rowbits) for k in range(p - 1))
        # 64-bit slots suffice and reductions stay inside int64
        self._fast = bound < 2**63 and self.mod * p * p < 2**62

    def __eq__(self, other):
        return isinstance(other, CycloCtx) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"CycloCtx(p={self.p}, l={self.l}, m={self.m}, N={self.N})"

    # -- constructors -------------------------------------------------
    def _make(self, coeffs) -> CycloElem:
        return CycloElem(self, coeffs)

    @property
    def zero(self) -> CycloElem:
        return self._make((0,) * (self.e * self.m))

    @property
    def one(self) -> CycloElem:
        return self.from_int(1)

    def from_int(self, c: int) -> CycloElem:
        out = [0] * (self.e * self.m)
        out[0] = c % self.mod
        return self._make(tuple(out))

    def from_unram(self, u: UnramElem) -> CycloElem:
        if u.ring != self.ring:
            raise CtxMismatch("unramified element from another ring")
        return self._make(tuple(u.coeffs) + (0,) * ((self.e - 1) * self.m))

    def from_scalars(self, coeffs) -> CycloElem:
        """Element sum c_i Y^i with integer c_i (i < e)."""
        coeffs = list(coeffs)
        if len(coeffs) > self.e:
            raise UsageError("too many coefficients; reduce modulo Phi first")
        out = [0] * (self.e * self.m)
        for i, c in enumerate(coeffs):
            out[i * self.m] = c % self.mod
        return self._make(tuple(out))

    def from_rows(self, rows) -> CycloElem:
        """Element sum_i rows[i] Y^i with rows[i] in O_m (any number of rows)."""
        acc = [[0] * self.m for _ in range(max(len(rows), self.e))]
        for i, r in enumerate(rows):
            cs = r.coeffs if isinstance(r, UnramElem) else r
            for j, c in enumerate(cs):
                acc[i][j] += c
        return self._make(self._reduce_rows(acc))

    @property
    def Y(self) -> CycloElem:
        return self.y_power(1)

    @property
    def pi_hat(self) -> CycloElem:
        """The uniformizer Y - 1."""
        return self.y_power(1) - self.one

    def y_power(self, t: int) -> CycloElem:
        if self._y_powers is None:
            powers = []
            for s in range(self.order):
                rows = [[0] * self.m for _ in range(max(s + 1, self.e))]
                rows[s][0] = 1
                powers.append(self._make(self._reduce_rows(rows)))
            self._y_powers = tuple(powers)
        return self._y_powers[t % self.order]

    def _y_powers_mod_p(self) -> dict:
        """Residues of Y^t mod p, mapped to the exponents t that give them."""
        if self._y_index is None:
            index: dict = {}
            for t in range(self.order):
                key = tuple(c % self.p for c in self.y_power(t).coeffs)
                index.setdefault(key, []).append(t)
            self._y_index = index
        return self._y_index

    # -- embeddings ---------------------------------------------------
    def embed(self, z: CycloElem) -> CycloElem:
        """Bring ``z`` into this context.

        Accepts an element of a pure (m = 1) or same-field context at a level
        j <= l and precision >= N; Y_j is sent to Y^{p^{l-j}}.
        """
        src = z.ctx
        if src.p != self.p or src.l > self.l or src.N < self.N:
            raise CtxMismatch(f"cannot embed {src} into {self}")
        if src.m != 1 and src.fq != self.fq:
            raise CtxMismatch("unramified parts differ")
        stride = self.p ** (self.l - src.l)
        out = [0] * (self.e * self.m)
        mod = self.mod
        for i in range(src.e):
            base = i * stride * self.m
            for j in range(src.m):
                out[base + j] = z.coeffs[i * src.m + j] % mod
        return self._make(tuple(out))

    # -- arithmetic on raw tuples ---------------------------------------
    def _reduce_rows(self, rows) -> tuple[int, ...]:
        """rows: list of length >= e of length-m integer lists (X already
        reduced).  Reduces modulo Phi_{p^l}(Y) and p^N.

        Y^{p^l} = 1 folds everything below degree p^l; then the top block of
        ``step`` rows is removed with Y^e = -(1 + Y^step + ... + Y^{(p-2) step}).
        """
        e, step, p, m, n = self.e, self._step, self.p, self.m, self.order
        acc = [[0] * m for _ in range(n)]
        for d, r in enumerate(rows):
            tgt = acc[d % n]
            for j, c in enumerate(r):
                if c:
                    tgt[j] += c
        top = acc[e:]
        mod = self.mod
        out = []
        for i in range(e):
            row, t = acc[i], top[i % step]
            out.extend((row[j] - t[j]) % mod for j in range(m))
        return tuple(out)

    def _mul(self, a, b) -> tuple[int, ...]:
        """Product by Kronecker substitution: both operands are packed into
        one integer with a slot per (Y^i, X^j) coefficient and multiplied
        once.  Y is reduced on the packed product: the high rows fold back
        by Y^(p^l) = 1, then the top ``step`` rows are subtracted blockwise
        (Y^e = -(1 + Y^step + ...)) after adding c*mod to every slot so no
        slot goes negative.  Only then is it unpacked and X reduced mod f."""
        if self._fast:
            return self._mul_words(a, b)
        e, m, mod = self.e, self.m, self.mod
        w = 1 if m == 1 else 2 * m - 1  # X-degrees of a product row
        nb = self._fold_bytes
        rowbits = 8 * nb * w
        prod = self._pack(a, w, nb) * self._pack(b, w, nb)
        n = self.order
        prod = (prod & ((1 << n * rowbits) - 1)) + (prod >> n * rowbits)
        top = prod >> e * rowbits
        prod = (prod & ((1 << e * rowbits) - 1)) + self._fold_offset - top * self._fold_rep
        size = e * w * nb
        buf = memoryview(prod.to_bytes(size, "little"))
        flat = [int.from_bytes(buf[k:k + nb], "little") % mod for k in range(0, size, nb)]
        if m == 1:
            return tuple(flat)
        f = self.ring.f
        out = []
        for i in range(e):
            row = flat[i * w:(i + 1) * w]
            for d in range(w - 1, m - 1, -1):
                c = row[d]
                if c:
                    base = d - m
                    for k, fk in enumerate(f):
                        if fk:
                            row[base + k] -= c * fk
            out.extend(c % mod for c in row[:m])
        return tuple(out)

    def _pack(self, v, w: int, nb: int) -> int:
        """Coefficients into little-endian slots of nb bytes, w slots per row."""
        m = self.m
        if self.mod < 2**64 and nb >= 8:
            arr = np.zeros((self.e, w, nb), dtype=np.uint8)
            words = np.array(v, dtype=np.uint64).reshape(self.e, m)
            arr[:, :m, :8] = words.view(np.uint8).reshape(self.e, m, 8)
            return int.from_bytes(arr.tobytes(), "little")
        if w == 1:
            return int.from_bytes(b"".join([c.to_bytes(nb, "little") for c in v]), "little")
        pad = [(0).to_bytes(nb, "little")] * (w - m)
        parts = []
        for i in range(self.e):
            parts.extend([c.to_bytes(nb, "little") for c in v[i * m:(i + 1) * m]])
            parts.extend(pad)
        return int.from_bytes(b"".join(parts), "little")

    def _mul_words(self, a, b) -> tuple[int, ...]:
        """Kronecker product with 64-bit slots, unpacked through numpy."""
        e, m, mod = self.e, self.m, self.mod
        width = 2 * m - 1
        if m == 1:
            ia = int.from_bytes(np.array(a, dtype=np.uint64).tobytes(), "little")
            ib = int.from_bytes(np.array(b, dtype=np.uint64).tobytes(), "little")
        else:
            pa = np.zeros((e, width), dtype=np.uint64)
            pb = np.zeros((e, width), dtype=np.uint64)
            pa[:, :m] = np.array(a, dtype=np.uint64).reshape(e, m)
            pb[:, :m] = np.array(b, dtype=np.uint64).reshape(e, m)
            ia = int.from_bytes(pa.tobytes(), "little")
            ib = int.from_bytes(pb.tobytes(), "little")
        nslots = (2 * e - 1) * width
        flat = np.frombuffer((ia * ib).to_bytes(nslots * 8, "little"), dtype=np.uint64)
        rows = (flat % np.uint64(mod)).astype(np.int64).reshape(2 * e - 1, width)
        if m > 1:
            f = self.ring.f
            for d in range(width - 1, m - 1, -1):
                c = rows[:, d].copy()
                for k, fk in enumerate(f):
                    if fk:
                        rows[:, d - m + k] -= c * fk
                rows %= mod
            rows = rows[:, :m].copy()
        # fold with Y^{p^l} = 1, then Y^e = -(1 + Y^step + ... + Y^{(p-2) step})
        n, step, p = self.order, self._step, self.p
        full = np.zeros((n, m), dtype=np.int64)
        full[: 2 * e - 1 if 2 * e - 1 < n else n] = rows[:n]
        if 2 * e - 1 > n:
            full[: 2 * e - 1 - n] += rows[n:]
        blocks = full.reshape(p, step, m)
        out = (blocks[: p - 1] - blocks[p - 1]) % mod
        return tuple(out.reshape(-1).tolist())

    # -- valuations -----------------------------------------------------
    @property
    def cap(self) -> int:
        return self.e * self.N

    def _binom_rows(self) -> list[list[int]]:
        if self._binom is None:
            self._binom = [[comb(i, j) for j in range(self.e)] for i in range(self.e)]
        return self._binom

    def pi_basis(self, z: CycloElem) -> list[list[int]]:
        """Coordinates of z in the basis (Y-1)^j, j < e, over O_m."""
        e, m, mod = self.e, self.m, self.mod
        out = [[0] * m for _ in range(e)]
        for i in range(e):
            row = z.coeffs[i * m:(i + 1) * m]
            if any(row):
                bi = self._binom_rows()[i]
                for j in range(i + 1):
                    b = bi[j]
                    tgt = out[j]
                    for k in range(m):
                        tgt[k] += b * row[k]
        return [[c % mod for c in r] for r in out]

    def pi_valuation(self, z: CycloElem) -> int:
        """Largest k <= e*N with z in (Y - 1)^k.

        With p^v the largest power of p dividing every coefficient, z/p^v
        reduces to a nonzero element of O/p = F_q[Y]/(Y - 1)^e, and its order
        of vanishing at Y = 1 is the rest."""
        self._same(z)
        return self._valuation(z.coeffs)

    def _valuation(self, coeffs, at_least: int = 0) -> int:
        e, m, N, p = self.e, self.m, self.N, self.p
        v = N
        for c in coeffs:
            if c:
                v = min(v, int_val(c, p, cap=v))
                if v == 0:
                    break
        if v >= N:
            return self.cap
        pv = p**v
        reduced = np.array([c // pv % p for c in coeffs], dtype=np.int64)
        # coordinates in the (Y - 1)-power basis over F_q; the first nonzero
        # row is the order of vanishing at Y = 1
        basis = (self._binom_mod_p() @ reduced.reshape(e, m)) % p
        nonzero = np.flatnonzero(basis.any(axis=1))
        return e * v + int(nonzero[0])

    def _binom_mod_p(self) -> np.ndarray:
        """B[j, i] = C(i, j) mod p, so B @ coeffs gives (Y-1)-basis coordinates."""
        if self._binom_p is None:
            p, e = self.p, self.e
            B = np.zeros((e, e), dtype=np.int64)
            row = [1] + [0] * (e - 1)  # C(i, .) mod p by Pascal's rule
            for i in range(e):
                B[:, i] = row
                row = [row[0]] + [(row[j] + row[j - 1]) % p for j in range(1, e)]
            self._binom_p = B
        return self._binom_p

    def pi_valuation_via_basis(self, z: CycloElem) -> int:
        """Same value, from the coordinates in the (Y - 1)-power basis."""
        self._same(z)
        e, N, p = self.e, self.N, self.p
        best = self.cap
        for j, row in enumerate(self.pi_basis(z)):
            v = min(int_val(c, p, cap=N) for c in row)
            if v < N:
                best = min(best, e * v + j)
        return best

    def in_pi_ideal(self, z: CycloElem, k: int) -> bool:
        """z in (Y-1)^k, decided by multiplying into (Y-1)^{e q} = p^q * unit
        and testing coefficient-wise divisibility by p^q."""
        self._same(z)
        if k <= 0:
            return True
        q = ceil(k / self.e)
        if q > self.N:
            raise PrecisionExhausted(f"depth {k} needs precision {q} > N = {self.N}")
        w = z * self.pi_hat ** (self.e * q - k)
        pq = self.p**q
        return all(c % pq == 0 for c in w.coeffs)

    def congruent_mod_pi(self, x: CycloElem, y: CycloElem, k: int) -> bool:
        if k > self.e * (self.N - 1):
            raise PrecisionExhausted(f"depth {k} exceeds e*(N-1) = {self.e * (self.N - 1)}")
        return self.in_pi_ideal(x - y, k)

    def snap_root_of_unity(self, z: CycloElem) -> int:
        """The unique t with v_pi(z - Y^t) > e, i.e. v_p(z - Y^t) > 1."""
        self._same(z)
        need = self.e + 1
        if need > self.e * (self.N - 1):
            raise PrecisionExhausted(f"snapping needs N >= 3, have N = {self.N}")
        p, mod = self.p, self.mod
        hits = []
        # v_pi >= e + 1 forces every coefficient of z - Y^t into pZ
        for t in self._y_powers_mod_p().get(tuple(c % p for c in z.coeffs), ()):
            diff = [(a - b) % mod for a, b in zip(z.coeffs, self.y_power(t).coeffs)]
            if self._valuation(diff) >= need:
                hits.append(t)
        if not hits:
            raise NoSnap(f"{z} is not within p-adic distance < p^-1 of a p^{self.l}-th root of unity")
        if len(hits) > 1:
            raise AmbiguousSnap(f"two roots of unity match: exponents {hits}")
        return hits[0]

    def _same(self, z):
        if z.ctx is not self and z.ctx != self:
            raise CtxMismatch(f"{z.ctx} vs {self}")


class CycloElem:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: CycloCtx, coeffs):
        self.ctx = ctx
        self.coeffs = coeffs

    def _other(self, other):
        if isinstance(other, int):
            return self.ctx.from_int(other)
        if isinstance(other, UnramElem):
            return self.ctx.from_unram(other)
        if isinstance(other, CycloElem):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise CtxMismatch(f"{other.ctx} vs {self.ctx}")
            return other
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        mod = self.ctx.mod
        return CycloElem(self.ctx, tuple((a + b) % mod for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        mod = self.ctx.mod
        return CycloElem(self.ctx, tuple((a - b) % mod for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        mod = self.ctx.mod
        return CycloElem(self.ctx, tuple(-a % mod for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            mod = self.ctx.mod
            return CycloElem(self.ctx, tuple(a * other % mod for a in self.coeffs))
        if isinstance(other, UnramElem):
            return self.scale(other)
        o = self._other(other)
        if o is None:
            return NotImplemented
        return CycloElem(self.ctx, self.ctx._mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def scale(self, u: UnramElem) -> CycloElem:
        ctx = self.ctx
        if u.ring != ctx.ring:
            raise CtxMismatch("unramified scalar from another ring")
        m = ctx.m
        if m == 1:
            c, mod = u.coeffs[0], ctx.mod
            return CycloElem(ctx, tuple(a * c % mod for a in self.coeffs))
        out = []
        for i in range(ctx.e):
            row = self.coeffs[i * m:(i + 1) * m]
            out.extend(_poly_mulmod(row, u.coeffs, ctx.ring.f, ctx.mod) if any(row) else row)
        return CycloElem(ctx, tuple(out))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        result, base = self.ctx.one, self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        try:
            o = self._other(other)
        except CtxMismatch:
            return False
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        terms = []
        m = self.ctx.m
        for i in range(self.ctx.e):
            row = self.coeffs[i * m:(i + 1) * m]
            if any(row):
                c = row[0] if m == 1 else row
                terms.append(f"{c}*Y^{i}")
        return "CycloElem(" + (" + ".join(terms) or "0") + f" mod {self.ctx.p}^{self.ctx.N})"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def coefficient(self, i: int) -> UnramElem:
        m = self.ctx.m
        return self.ctx.ring.elem(self.coeffs[i * m:(i + 1) * m])

    def pi_valuation(self) -> int:
        return self.ctx.pi_valuation(self)

    def with_precision(self, ctx: CycloCtx) -> CycloElem:
        if (ctx.p, ctx.l, ctx.fq) != (self.ctx.p, self.ctx.l, self.ctx.fq) or ctx.N > self.ctx.N:
            raise CtxMismatch(f"cannot move {self.ctx} element to {ctx}")
        mod = ctx.mod
        return CycloElem(ctx, tuple(c % mod for c in self.coeffs))


@lru_cache(maxsize=None)
def cyclo_ctx(p: int, l: int, m: int, N: int, fq: FqCtx | None = None) -> CycloCtx:
    return CycloCtx(p, l, m, N, fq)


def pi_valuation(z: CycloElem) -> int:
    return z.ctx.pi_valuation(z)


def congruent_mod_pi(x: CycloElem, y: CycloElem, k: int) -> bool:
    return x.ctx.congruent_mod_pi(x, y, k)


def snap_root_of_unity(z: CycloElem) -> int:
    return z.ctx.snap_root_of_unity(z)


def cyclo_mul(a: CycloElem, b: CycloElem) -> CycloElem:
    return a * b
