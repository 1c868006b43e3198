"""Bimodule N-complexes over a truncated filtered algebra.

Given a presentation whose filtration oracle passes up to a bound D, the
algebra U is represented on the monomial coset basis carved out by the
oracle's reduced rows: the basis of each filtration level consists of the
(word, g) coordinates that are not pivots of the ideal rows.  Right and
left multiplications by generators and group elements are cached sparse
operators on that basis.

On top sit the spaces U (x)_K W_n (x)_K U truncated to total filtration
degree <= D.  The right half W_n (x)_K U embeds into V^{(x)n} (x) U by
moving group coordinates into the right tensorand; the left U is collapsed
through a right-free monomial basis, which requires the pivot words of the
ideal rows to be orbit-pure over the group.  That holds automatically when
the relations extend field-level data (all the presentations built by this
package); other inputs raise a clear error.

The differentials d_l and d_r, the q-twisted maps d_l - q^{n-1} d_r, the
degree-lowering correction maps induced by phi, the contracted complex
alternating d and d^{N-1}, and the explicit wedge-basis formulas for
antisymmetrizer presentations are all provided as sparse column maps, with
rank checks restricted to the safe filtration window <= D - N where
truncation cannot create spurious homology.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .elim import SparseEliminator
from .filtered import FilteredPresentation, OracleEngine, build_phi
from .grouppres import PsiMap, wedge_apply
from .homogeneous import w_rows, zeta
from .scalar import DimensionMismatch, Scalar
from .smashtensor import GroupData, TensorContext


class UnsupportedStructure(ValueError):
    """The truncated algebra lacks the structure a construction needs."""


class TruncatedU:
    """U = T(V)#Gamma / I(P) on a monomial coset basis up to degree D."""

    def __init__(self, pres: FilteredPresentation, bound: int):
        self.pres = pres
        self.bound = bound
        engine = OracleEngine(pres, bound)
        engine.run()
        if not all(engine.equalities.values()):
            bad = sorted(n for n, ok in engine.equalities.items() if not ok)
            raise ValueError(
                f"filtration equalities fail at degree {bad[0]}; the truncated algebra is undefined"
            )
        self.engine = engine
        ctx = pres.ctx
        self.ctx = ctx
        field = ctx.field
        # basis: non-pivot coordinates, grouped by degree ascending
        pivots = engine.elim.pivot_rows
        self.basis: list[tuple[int, tuple[int, ...], int]] = []
        self.index_of_coord: dict[int, int] = {}
        self.dims_by_degree: list[int] = []
        for d in range(bound + 1):
            start = engine.offsets_desc[d + 1]
            end = engine.offsets_desc[d]
            count = 0
            for coord in range(start, end):
                if coord not in pivots:
                    word, g = ctx.word_of(coord - start, d)
                    self.index_of_coord[coord] = len(self.basis)
                    self.basis.append((d, word, g))
                    count += 1
            self.dims_by_degree.append(count)
        self._rmul_letter: dict[tuple[int, int], list] = {}
        self._lmul_letter: dict[tuple[int, int], list] = {}
        self._lmul_group: dict[tuple[int, int], list] = {}
        self._rmul_group: dict[tuple[int, int], list] = {}
        self._b0: Optional[list] = None
        self._b0_index: Optional[dict] = None

    @property
    def field(self):
        return self.ctx.field

    def dim_filtration(self, n: int) -> int:
        return sum(self.dims_by_degree[: n + 1])

    def degree_of(self, idx: int) -> int:
        return self.basis[idx][0]

    def _reduce_coord_vec(self, vec: dict) -> dict:
        """Reduce a degree-descending coordinate vector onto the basis."""
        red = self.engine.elim.reduce(vec)
        return {self.index_of_coord[c]: v for c, v in red.items()}

    def reduce_terms(self, terms: dict) -> dict:
        """Normal form of a term dict as a sparse vector over the basis."""
        vec: dict = {}
        field = self.field
        for (word, g), c in terms.items():
            if len(word) > self.bound:
                raise DimensionMismatch("term exceeds the truncation bound")
            raw = c.raw if c.conductor == self.ctx.conductor else self.field.from_fraction(c.as_fraction())
            coord = self.engine.coord_desc(word, g)
            cur = vec.get(coord)
            nv = raw if cur is None else field.add(cur, raw)
            if field.is_zero(nv):
                vec.pop(coord, None)
            else:
                vec[coord] = nv
        return self._reduce_coord_vec(vec)

    # -- cached one-step multiplications --------------------------------

    def right_mult_letter(self, idx: int, letter: int) -> list:
        key = (idx, letter)
        got = self._rmul_letter.get(key)
        if got is not None:
            return got
        d, word, g = self.basis[idx]
        if d + 1 > self.bound:
            raise DimensionMismatch("product exceeds the truncation bound")
        field = self.field
        vec: dict = {}
        for i, c in self.ctx._cols[g][letter]:
            coord = self.engine.coord_desc(word + (i,), g)
            cur = vec.get(coord)
            nv = c if cur is None else field.add(cur, c)
            if field.is_zero(nv):
                vec.pop(coord, None)
            else:
                vec[coord] = nv
        out = sorted(self._reduce_coord_vec(vec).items())
        self._rmul_letter[key] = out
        return out

    def left_mult_letter(self, idx: int, letter: int) -> list:
        key = (idx, letter)
        got = self._lmul_letter.get(key)
        if got is not None:
            return got
        d, word, g = self.basis[idx]
        if d + 1 > self.bound:
            raise DimensionMismatch("product exceeds the truncation bound")
        coord = self.engine.coord_desc((letter,) + word, g)
        out = sorted(self._reduce_coord_vec({coord: self.field.one}).items())
        self._lmul_letter[key] = out
        return out

    def left_mult_group(self, idx: int, g2: int) -> list:
        key = (idx, g2)
        got = self._lmul_group.get(key)
        if got is not None:
            return got
        d, word, g = self.basis[idx]
        field = self.field
        gg = self.ctx.group.mult_table[g2][g]
        vec: dict = {}
        for tw, c in self.ctx.apply_group_to_word(g2, word):
            coord = self.engine.coord_desc(tw, gg)
            cur = vec.get(coord)
            nv = c if cur is None else field.add(cur, c)
            if field.is_zero(nv):
                vec.pop(coord, None)
            else:
                vec[coord] = nv
        out = sorted(self._reduce_coord_vec(vec).items())
        self._lmul_group[key] = out
        return out

    def right_mult_group(self, idx: int, g2: int) -> list:
        key = (idx, g2)
        got = self._rmul_group.get(key)
        if got is not None:
            return got
        d, word, g = self.basis[idx]
        coord = self.engine.coord_desc(word, self.ctx.group.mult_table[g][g2])
        out = sorted(self._reduce_coord_vec({coord: self.field.one}).items())
        self._rmul_group[key] = out
        return out

    def apply_linear(self, vec: dict, step) -> dict:
        field = self.field
        out: dict = {}
        for idx, c in vec.items():
            for idx2, c2 in step(idx):
                term = field.mul(c, c2)
                cur = out.get(idx2)
                nv = term if cur is None else field.add(cur, term)
                if field.is_zero(nv):
                    out.pop(idx2, None)
                else:
                    out[idx2] = nv
        return out

    def multiply_basis(self, left_idx: int, right_idx: int) -> dict:
        """Product of two basis monomials as a sparse basis vector."""
        d1, _, _ = self.basis[left_idx]
        d2, word2, g2 = self.basis[right_idx]
        if d1 + d2 > self.bound:
            raise DimensionMismatch("product exceeds the truncation bound")
        vec = {left_idx: self.field.one}
        for letter in word2:
            vec = self.apply_linear(vec, lambda i, l=letter: self.right_mult_letter(i, l))
        if g2 != 0:
            vec = self.apply_linear(vec, lambda i: self.right_mult_group(i, g2))
        return vec

    # -- right-free monomial structure ----------------------------------

    def monomial_right_free_basis(self) -> tuple[list, dict]:
        """Words w with (w, g) in the basis for every g, as left factors.

        Returns (list of basis indices of (w, identity), map from basis index
        to (left-factor index, group element)).  Raises when the pivot words
        are not orbit-pure, in which case the collapsed representation of
        U (x)_K - is unavailable.
        """
        if self._b0 is not None:
            return self._b0, self._b0_index
        order = self.ctx.order
        by_word: dict[tuple[int, tuple[int, ...]], list] = {}
        for idx, (d, word, g) in enumerate(self.basis):
            by_word.setdefault((d, word), []).append((g, idx))
        b0 = []
        decomposition = {}
        for (d, word), entries in by_word.items():
            if len(entries) != order:
                raise UnsupportedStructure(
                    "coset monomials are not orbit-pure over the group; "
                    "the collapsed tensor representation is unavailable"
                )
        for idx, (d, word, g) in enumerate(self.basis):
            if g == 0:
                b0.append(idx)
        b0_pos = {idx: pos for pos, idx in enumerate(b0)}
        for idx, (d, word, g) in enumerate(self.basis):
            e_idx = self.index_of_coord[self.engine.coord_desc(word, 0)]
            decomposition[idx] = (b0_pos[e_idx], g)
        self._b0 = b0
        self._b0_index = decomposition
        return b0, decomposition


# -- the right tensor factor W_n (x)_K U ------------------------------------


class _XSpace:
    """W_n (x)_K U^{<= D-n} embedded in V^{(x)n} (x) U.

    Coordinates are pairs (word number, U-basis index) ordered with the
    U-degree descending first, so a row's pivot block is its filtration
    level; the canonical rows are nested across levels.
    """

    def __init__(self, tu: TruncatedU, n: int, w_row_list: list):
        self.tu = tu
        self.n = n
        ctx = tu.ctx
        field = tu.field
        self.w_rows = w_row_list
        nb = len(tu.basis)
        vn = ctx.dimV**n
        max_u = tu.bound - n
        # coordinate order: U-degree descending, then word number, then index
        flat = []
        for b_idx, (d, _, _) in enumerate(tu.basis):
            if d <= max_u:
                flat.append(b_idx)
        flat.sort(key=lambda b: (-tu.basis[b][0], b))
        self.coord_rank: dict[tuple[int, int], int] = {}
        self.coord_list: list[tuple[int, int]] = []
        for b in flat:
            for w in range(vn):
                self.coord_rank[(w, b)] = len(self.coord_list)
                self.coord_list.append((w, b))
        elim = SparseEliminator(field)
        generators = []
        tags = {}
        amb = len(self.coord_list)
        tag_no = 0
        order = ctx.order
        for t, w_row in enumerate(w_row_list):
            for b_idx, (d, _, _) in enumerate(tu.basis):
                if d > max_u:
                    continue
                vec: dict = {}
                for coord, raw in w_row.items():
                    g = coord % order
                    wnum = coord // order
                    if g == 0:
                        entries = [(b_idx, field.one)]
                    else:
                        entries = tu.left_mult_group(b_idx, g)
                    for b2, c in entries:
                        key = self.coord_rank[(wnum, b2)]
                        term = field.mul(raw, c)
                        cur = vec.get(key)
                        nv = term if cur is None else field.add(cur, term)
                        if field.is_zero(nv):
                            vec.pop(key, None)
                        else:
                            vec[key] = nv
                vec[amb + tag_no] = field.one
                tags[tag_no] = (t, b_idx)
                generators.append(vec)
                tag_no += 1
        self.amb = amb
        self.tags = tags
        gen_elim = SparseEliminator(field)
        for gvec in generators:
            gen_elim.add(gvec)
        # canonical rows of the untagged space
        plain = SparseEliminator(field)
        for gvec in generators:
            plain.add({c: v for c, v in gvec.items() if c < amb})
        self.rows = plain.rows_canonical()
        self.pivots = [min(r) for r in self.rows]
        self.level = [self.tu.basis[self.coord_list[min(r)][1]][0] for r in self.rows]
        self._gen_elim = gen_elim
        self._gen_cache: dict[tuple[int, int], list] = {}

    @property
    def dim(self) -> int:
        return len(self.rows)

    def express(self, vec: dict) -> list:
        """Coefficients of a vector over the canonical rows."""
        field = self.tu.field
        residual = dict(vec)
        out = []
        for t, piv in enumerate(self.pivots):
            c = residual.get(piv)
            if c is None or field.is_zero(c):
                continue
            out.append((t, c))
            for col, v in self.rows[t].items():
                cur = residual.get(col)
                term = field.mul(c, v)
                nv = field.sub(cur, term) if cur is not None else field.neg(term)
                if field.is_zero(nv):
                    residual.pop(col, None)
                else:
                    residual[col] = nv
        if residual:
            raise ValueError("vector does not lie in the tensor space")
        return out

    def generator_expression(self, row_idx: int) -> list:
        """The canonical row as a combination of generators w_t (x) b."""
        field = self.tu.field
        res = self._gen_elim.reduce(dict(self.rows[row_idx]))
        out = []
        for c, v in res.items():
            if c < self.amb:
                raise RuntimeError("generator expression failed")
            out.append((self.tags[c - self.amb], field.neg(v)))
        return out

    def embed_generator(self, t: int, b_idx: int) -> dict:
        """Embedded vector of w_t (x) b as coordinates (word, U-index)."""
        key = (t, b_idx)
        got = self._gen_cache.get(key)
        if got is not None:
            return got
        tu = self.tu
        ctx = tu.ctx
        field = tu.field
        order = ctx.order
        vec: dict = {}
        for coord, raw in self.w_rows[t].items():
            g = coord % order
            wnum = coord // order
            entries = [(b_idx, field.one)] if g == 0 else tu.left_mult_group(b_idx, g)
            for b2, c in entries:
                k = self.coord_rank[(wnum, b2)]
                term = field.mul(raw, c)
                cur = vec.get(k)
                nv = term if cur is None else field.add(cur, term)
                if field.is_zero(nv):
                    vec.pop(k, None)
                else:
                    vec[k] = nv
        self._gen_cache[key] = vec
        return vec

    def group_action(self, g: int, row_idx: int) -> list:
        """g · row expressed over the canonical rows (diagonal action)."""
        tu = self.tu
        ctx = tu.ctx
        field = tu.field
        vn = ctx.dimV**self.n
        vec: dict = {}
        for key, raw in self.rows[row_idx].items():
            wnum, b = self.coord_list[key]
            word = _num_to_word(wnum, ctx.dimV, self.n)
            for tw, c in ctx.apply_group_to_word(g, word):
                wnum2 = _word_to_num(tw, ctx.dimV)
                for b2, c2 in tu.left_mult_group(b, g):
                    k = self.coord_rank[(wnum2, b2)]
                    term = field.mul(raw, field.mul(c, c2))
                    cur = vec.get(k)
                    nv = term if cur is None else field.add(cur, term)
                    if field.is_zero(nv):
                        vec.pop(k, None)
                    else:
                        vec[k] = nv
        return self.express(vec)

    def first_letter_split(self, row_idx: int, target: "_XSpace") -> dict:
        """Row as sum over first letters j of vectors in the lower space."""
        tu = self.tu
        ctx = tu.ctx
        vlow = ctx.dimV ** (self.n - 1)
        blocks: dict[int, dict] = {}
        for key, raw in self.rows[row_idx].items():
            wnum, b = self.coord_list[key]
            j, rest = divmod(wnum, vlow)
            blocks.setdefault(j, {})[target.coord_rank[(rest, b)]] = raw
        return {j: target.express(vec) for j, vec in sorted(blocks.items())}

    def last_letter_image(self, row_idx: int, target: "_XSpace") -> list:
        """Image under moving the last letter into U, over the lower rows."""
        tu = self.tu
        ctx = tu.ctx
        field = tu.field
        vec: dict = {}
        for key, raw in self.rows[row_idx].items():
            wnum, b = self.coord_list[key]
            rest, ell = divmod(wnum, ctx.dimV)
            for b2, c in tu.left_mult_letter(b, ell):
                k = target.coord_rank[(rest, b2)]
                term = field.mul(raw, c)
                cur = vec.get(k)
                nv = term if cur is None else field.add(cur, term)
                if field.is_zero(nv):
                    vec.pop(k, None)
                else:
                    vec[k] = nv
        return target.express(vec)


def _num_to_word(num: int, dimV: int, length: int) -> tuple[int, ...]:
    word = []
    for _ in range(length):
        word.append(num % dimV)
        num //= dimV
    return tuple(reversed(word))


def _word_to_num(word: tuple[int, ...], dimV: int) -> int:
    num = 0
    for letter in word:
        num = num * dimV + letter
    return num


# -- the complex family -------------------------------------------------


class NComplexSlice:
    """Truncated spaces U (x)_K W_n (x)_K U with the maps between them.

    ``basis(n)`` lists pairs (left monomial index, right tensor row index)
    with total filtration degree within the bound.  Maps are sparse column
    dictionaries; ``d_left``/``d_right`` are the two one-step maps, and the
    q-twisted differential of the N-complex at slice n is
    d_left - q^{n-1} d_right.
    """

    def __init__(self, pres: FilteredPresentation, bound: int):
        self.pres = pres
        self.tu = TruncatedU(pres, bound)
        self.bound = bound
        ctx = pres.ctx
        self.ctx = ctx
        self.N = pres.N
        phi = build_phi(pres)
        for j in range(1, self.N):
            if not phi.is_zero_component(j):
                raise UnsupportedStructure(
                    "the bimodule complex needs the correction map concentrated in degree zero"
                )
        self.phi = phi
        self.b0, self.b_decomp = self.tu.monomial_right_free_basis()
        alg = pres.homogenization()
        self._w_cache: dict = {}
        self._w_lists: dict[int, list] = {}
        self._x: dict[int, _XSpace] = {}
        self._slice_basis: dict[int, list] = {}
        self._slice_index: dict[int, dict] = {}
        self._dl: dict[int, dict] = {}
        self._dr: dict[int, dict] = {}
        self._alg = alg
        self._act_cache: dict = {}
        self.max_n = self._max_nonzero_w()

    def _w_list(self, n: int) -> list:
        if n not in self._w_lists:
            ctx = self.ctx
            if n < self.N:
                rows = []
                order = ctx.order
                for wnum in range(ctx.dimV**n):
                    for g in range(order):
                        rows.append({wnum * order + g: ctx.field.one})
                self._w_lists[n] = rows
            else:
                self._w_lists[n] = w_rows(self._alg, n, self._w_cache)
        return self._w_lists[n]

    def _max_nonzero_w(self) -> int:
        for n in range(self.bound, -1, -1):
            if self._w_list(n):
                return n
        return 0

    def x_space(self, n: int) -> _XSpace:
        if n not in self._x:
            self._x[n] = _XSpace(self.tu, n, self._w_list(n))
        return self._x[n]

    def basis(self, n: int) -> list:
        if n not in self._slice_basis:
            x = self.x_space(n)
            out = []
            for pos, b0_idx in enumerate(self.b0):
                a = self.tu.basis[b0_idx][0]
                for t in range(x.dim):
                    if a + n + x.level[t] <= self.bound:
                        out.append((pos, t))
            self._slice_basis[n] = out
            self._slice_index[n] = {key: i for i, key in enumerate(out)}
        return self._slice_basis[n]

    def slice_dim(self, n: int) -> int:
        return len(self.basis(n))

    def total_degree(self, n: int, key: tuple[int, int]) -> int:
        pos, t = key
        return self.tu.basis[self.b0[pos]][0] + n + self.x_space(n).level[t]

    def _push_left(self, u_vec: dict, x_combo: list, n_low: int, out: dict, scale) -> None:
        """Accumulate sum u (x) x with u expanded over b0 · Gamma."""
        field = self.ctx.field
        x_low = self.x_space(n_low)
        self.basis(n_low)
        index = self._slice_index[n_low]
        act_cache: dict[tuple[int, int], list] = self._act_cache.setdefault(n_low, {})
        for b_idx, cu in u_vec.items():
            pos, g = self.b_decomp[b_idx]
            for t, cx in x_combo:
                if g == 0:
                    targets = [(t, field.one)]
                else:
                    key = (g, t)
                    targets = act_cache.get(key)
                    if targets is None:
                        targets = x_low.group_action(g, t)
                        act_cache[key] = targets
                for t2, c2 in targets:
                    skey = index.get((pos, t2))
                    if skey is None:
                        raise RuntimeError("image left the truncated slice")
                    term = field.mul(scale, field.mul(cu, field.mul(cx, c2)))
                    cur = out.get(skey)
                    nv = term if cur is None else field.add(cur, term)
                    if field.is_zero(nv):
                        out.pop(skey, None)
                    else:
                        out[skey] = nv

    def d_left(self, n: int) -> dict:
        """Columns of d_l : slice n -> slice n-1."""
        if n in self._dl:
            return self._dl[n]
        if n < 1:
            raise ValueError("d_l needs a positive tensor degree")
        field = self.ctx.field
        x_hi = self.x_space(n)
        x_lo = self.x_space(n - 1)
        self.basis(n - 1)
        splits = [x_hi.first_letter_split(t, x_lo) for t in range(x_hi.dim)]
        cols: dict = {}
        for src, (pos, t) in enumerate(self.basis(n)):
            b0_idx = self.b0[pos]
            out: dict = {}
            for j, combo in splits[t].items():
                u_vec = dict(self.tu.right_mult_letter(b0_idx, j))
                self._push_left(u_vec, combo, n - 1, out, field.one)
            cols[src] = out
        self._dl[n] = cols
        return cols

    def d_right(self, n: int) -> dict:
        """Columns of d_r : slice n -> slice n-1."""
        if n in self._dr:
            return self._dr[n]
        if n < 1:
            raise ValueError("d_r needs a positive tensor degree")
        field = self.ctx.field
        x_hi = self.x_space(n)
        x_lo = self.x_space(n - 1)
        self.basis(n - 1)
        index = self._slice_index[n - 1]
        nus = [x_hi.last_letter_image(t, x_lo) for t in range(x_hi.dim)]
        cols: dict = {}
        for src, (pos, t) in enumerate(self.basis(n)):
            out: dict = {}
            for t2, c in nus[t]:
                skey = index.get((pos, t2))
                if skey is None:
                    raise RuntimeError("image left the truncated slice")
                cur = out.get(skey)
                nv = c if cur is None else field.add(cur, c)
                if field.is_zero(nv):
                    out.pop(skey, None)
                else:
                    out[skey] = nv
            cols[src] = out
        self._dr[n] = cols
        return cols

    # -- phi-induced degree-N drops -------------------------------------

    def _phi_K_values(self) -> list:
        """phi(r_t) as lists of (group element, raw coefficient)."""
        out = []
        for row in self.phi.rows:
            vals = []
            for c, v in row.items():
                # phi is concentrated in degree zero: coordinates are group slots
                vals.append((c, v))
            out.append(vals)
        return out

    def _w_left_split(self, n: int) -> list:
        """W_n rows over r_t · W_{n-N}: lists of (t, kappa, coeff)."""
        ctx = self.ctx
        field = ctx.field
        r_rows = self.pres.homogenization().R.basis_sparse()
        low = self._w_list(n - self.N)
        amb = ctx.component_dim(n)
        elim = SparseEliminator(field)
        tags = {}
        tag = 0
        for t, rrow in enumerate(r_rows):
            for kappa, wrow in enumerate(low):
                vec = _smash_row_product(ctx, rrow, self.N, wrow, n - self.N)
                vec[amb + tag] = field.one
                tags[tag] = (t, kappa)
                elim.add(vec)
                tag += 1
        out = []
        for wrow in self._w_list(n):
            res = elim.reduce(dict(wrow))
            combo = []
            for c, v in res.items():
                if c < amb:
                    raise ValueError("W row does not lie in R · W")
                combo.append((tags[c - amb], field.neg(v)))
            out.append(combo)
        return out

    def _w_right_split(self, n: int) -> list:
        """W_n rows over W_{n-N} · r_t: lists of (kappa, t, coeff)."""
        ctx = self.ctx
        field = ctx.field
        r_rows = self.pres.homogenization().R.basis_sparse()
        low = self._w_list(n - self.N)
        amb = ctx.component_dim(n)
        elim = SparseEliminator(field)
        tags = {}
        tag = 0
        for kappa, wrow in enumerate(low):
            for t, rrow in enumerate(r_rows):
                vec = _smash_row_product(ctx, wrow, n - self.N, rrow, self.N)
                vec[amb + tag] = field.one
                tags[tag] = (kappa, t)
                elim.add(vec)
                tag += 1
        out = []
        for wrow in self._w_list(n):
            res = elim.reduce(dict(wrow))
            combo = []
            for c, v in res.items():
                if c < amb:
                    raise ValueError("W row does not lie in W · R")
                combo.append((tags[c - amb], field.neg(v)))
            out.append(combo)
        return out

    def phi_left(self, n: int) -> dict:
        """Columns of 1 (x) phi^{1,N} (x) 1 : slice n -> slice n-N."""
        field = self.ctx.field
        ctx = self.ctx
        x_hi = self.x_space(n)
        x_lo = self.x_space(n - self.N)
        self.basis(n - self.N)
        index = self._slice_index[n - self.N]
        phi_vals = self._phi_K_values()
        left_split = self._w_left_split(n)
        w_low = self._w_list(n - self.N)
        # group action on the low W rows, expressed back over them
        low_piv = [min(r) for r in w_low] if w_low else []

        def act_on_w(g: int, kappa: int) -> list:
            img = ctx.left_action_sparse(g, w_low[kappa], n - self.N)
            out = []
            residual = dict(img)
            for t2, piv in enumerate(low_piv):
                c = residual.get(piv)
                if c is None or field.is_zero(c):
                    continue
                out.append((t2, c))
                for col, v in w_low[t2].items():
                    cur = residual.get(col)
                    term = field.mul(c, v)
                    nv = field.sub(cur, term) if cur is not None else field.neg(term)
                    if field.is_zero(nv):
                        residual.pop(col, None)
                    else:
                        residual[col] = nv
            if residual:
                raise ValueError("group action left the W space")
            return out

        cols: dict = {}
        for src, (pos, t) in enumerate(self.basis(n)):
            out: dict = {}
            for (gt, b_idx), cg in x_hi.generator_expression(t):
                for (s, kappa), c2 in left_split[gt]:
                    for g, c3 in phi_vals[s]:
                        scale = field.mul(cg, field.mul(c2, c3))
                        for kappa2, c4 in act_on_w(g, kappa):
                            vec = x_lo.embed_generator(kappa2, b_idx)
                            for t2, c5 in x_lo.express(vec):
                                skey = index.get((pos, t2))
                                if skey is None:
                                    raise RuntimeError("image left the truncated slice")
                                term = field.mul(scale, field.mul(c4, c5))
                                cur = out.get(skey)
                                nv = term if cur is None else field.add(cur, term)
                                if field.is_zero(nv):
                                    out.pop(skey, None)
                                else:
                                    out[skey] = nv
            cols[src] = out
        return cols

    def phi_right(self, n: int) -> dict:
        """Columns of 1 (x) phi^{n-N+1,n} (x) 1 : slice n -> slice n-N."""
        field = self.ctx.field
        x_hi = self.x_space(n)
        x_lo = self.x_space(n - self.N)
        self.basis(n - self.N)
        index = self._slice_index[n - self.N]
        phi_vals = self._phi_K_values()
        right_split = self._w_right_split(n)
        cols: dict = {}
        for src, (pos, t) in enumerate(self.basis(n)):
            out: dict = {}
            for (gt, b_idx), cg in x_hi.generator_expression(t):
                for (kappa, s), c2 in right_split[gt]:
                    for g, c3 in phi_vals[s]:
                        for b2, c4 in self.tu.left_mult_group(b_idx, g):
                            vec = x_lo.embed_generator(kappa, b2)
                            scale = field.mul(cg, field.mul(c2, c3))
                            for t2, c5 in x_lo.express(vec):
                                skey = index.get((pos, t2))
                                if skey is None:
                                    raise RuntimeError("image left the truncated slice")
                                term = field.mul(scale, field.mul(c4, c5))
                                cur = out.get(skey)
                                nv = term if cur is None else field.add(cur, term)
                                if field.is_zero(nv):
                                    out.pop(skey, None)
                                else:
                                    out[skey] = nv
            cols[src] = out
        return cols

    # -- assembled maps ---------------------------------------------------

    def d_twisted(self, n: int, q: Scalar) -> dict:
        """d = d_l - q^{n-1} d_r at slice n."""
        field = self.ctx.field
        qn = (q ** (n - 1)).raw
        dl = self.d_left(n)
        dr = self.d_right(n)
        cols = {}
        for src in range(self.slice_dim(n)):
            out = dict(dl.get(src, {}))
            for k, v in dr.get(src, {}).items():
                term = field.mul(qn, v)
                cur = out.get(k)
                nv = field.neg(term) if cur is None else field.sub(cur, term)
                if field.is_zero(nv):
                    out.pop(k, None)
                else:
                    out[k] = nv
            cols[src] = out
        return cols

    def mu_matrix(self) -> dict:
        """Multiplication (U (x)_K U)_{<= D} -> U^{<= D} on slice 0."""
        cols = {}
        for src, (pos, t) in enumerate(self.basis(0)):
            b0_idx = self.b0[pos]
            x0 = self.x_space(0)
            out: dict = {}
            field = self.ctx.field
            for key, raw in x0.rows[t].items():
                _, b = x0.coord_list[key]
                prod = self.tu.multiply_basis(b0_idx, b)
                for b2, c in prod.items():
                    term = field.mul(raw, c)
                    cur = out.get(b2)
                    nv = term if cur is None else field.add(cur, term)
                    if field.is_zero(nv):
                        out.pop(b2, None)
                    else:
                        out[b2] = nv
            cols[src] = out
        return cols


def _smash_row_product(ctx: TensorContext, row1: dict, deg1: int, row2: dict, deg2: int) -> dict:
    """Product of two sparse component rows inside the smash algebra."""
    field = ctx.field
    order = ctx.order
    out: dict = {}
    for c1, v1 in row1.items():
        g1 = c1 % order
        w1 = c1 // order
        word2_cache = None
        for c2, v2 in row2.items():
            g2 = c2 % order
            w2 = c2 // order
            word2 = _num_to_word(w2, ctx.dimV, deg2)
            coeff = field.mul(v1, v2)
            gh = ctx.group.mult_table[g1][g2]
            for tw, c in ctx.apply_group_to_word(g1, word2):
                coord = (w1 * ctx.dimV**deg2 + _word_to_num(tw, ctx.dimV)) * order + gh
                term = field.mul(coeff, c)
                cur = out.get(coord)
                nv = term if cur is None else field.add(cur, term)
                if field.is_zero(nv):
                    out.pop(coord, None)
                else:
                    out[coord] = nv
    return out


# -- map algebra --------------------------------------------------------


def compose_maps(outer: dict, inner: dict, field) -> dict:
    """Columns of outer ∘ inner for sparse column maps."""
    cols = {}
    for src, vec in inner.items():
        out: dict = {}
        for mid, c in vec.items():
            for tgt, c2 in outer.get(mid, {}).items():
                term = field.mul(c, c2)
                cur = out.get(tgt)
                nv = term if cur is None else field.add(cur, term)
                if field.is_zero(nv):
                    out.pop(tgt, None)
                else:
                    out[tgt] = nv
        cols[src] = out
    return cols


def map_difference(a: dict, b: dict, field, n_cols: int) -> dict:
    cols = {}
    for src in range(n_cols):
        out = dict(a.get(src, {}))
        for k, v in b.get(src, {}).items():
            cur = out.get(k)
            nv = field.neg(v) if cur is None else field.sub(cur, v)
            if field.is_zero(nv):
                out.pop(k, None)
            else:
                out[k] = nv
        cols[src] = out
    return cols


def map_is_zero(cols: dict) -> bool:
    return all(not vec for vec in cols.values())


def maps_equal(a: dict, b: dict, field, n_cols: int) -> bool:
    return map_is_zero(map_difference(a, b, field, n_cols))


def check_dN_zero(slice_family: NComplexSlice, q: Scalar) -> list[tuple[int, bool]]:
    """d^N = 0 on every slice where N successive maps are defined."""
    N = slice_family.N
    field = slice_family.ctx.field
    if (q**N) != Scalar.one(q.conductor):
        raise ValueError("q must be an N-th root of unity")
    for m in range(1, N):
        if (q**m) == Scalar.one(q.conductor):
            raise ValueError("q must be a primitive N-th root of unity")
    results = []
    top = slice_family.max_n
    if top < N:
        raise ValueError("bound too small: no slice admits N successive maps")
    for n in range(N, top + 1):
        if slice_family.slice_dim(n) == 0:
            continue
        comp = slice_family.d_twisted(n, q)
        for step in range(1, N):
            comp = compose_maps(slice_family.d_twisted(n - step, q), comp, field)
        results.append((n, map_is_zero(comp)))
    return results


def factorization_identity_holds(slice_family: NComplexSlice, q: Scalar, n: int) -> bool:
    """Product of the twisted maps vs d_l^N - d_r^N vs the phi correction."""
    field = slice_family.ctx.field
    N = slice_family.N
    comp = slice_family.d_twisted(n, q)
    for step in range(1, N):
        comp = compose_maps(slice_family.d_twisted(n - step, q), comp, field)
    dl = slice_family.d_left(n)
    dr = slice_family.d_right(n)
    dl_pow = dl
    dr_pow = dr
    for step in range(1, N):
        dl_pow = compose_maps(slice_family.d_left(n - step), dl_pow, field)
        dr_pow = compose_maps(slice_family.d_right(n - step), dr_pow, field)
    ncols = slice_family.slice_dim(n)
    lhs_eq = maps_equal(comp, map_difference(dl_pow, dr_pow, field, ncols), field, ncols)
    phi_diff = map_difference(
        slice_family.phi_left(n), slice_family.phi_right(n), field, ncols
    )
    rhs_eq = maps_equal(map_difference(dl_pow, dr_pow, field, ncols), phi_diff, field, ncols)
    return lhs_eq and rhs_eq


@dataclass
class ContractionReport:
    bound: int
    window: int
    positions: list[dict]
    composition_zero: bool
    exact_in_window: bool

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "window": self.window,
            "positions": self.positions,
            "composition_zero": self.composition_zero,
            "exact_in_window": self.exact_in_window,
        }


def contracted_complex(slice_family: NComplexSlice) -> ContractionReport:
    """The alternating d, d^{N-1} complex with rank checks in the window.

    Exactness is asserted only at total filtration degree <= D - N, where a
    truncated complex cannot show spurious homology: the maps preserve the
    filtration and the associated graded complex is checked degreewise
    elsewhere.
    """
    fam = slice_family
    N = fam.N
    field = fam.ctx.field
    window = fam.bound - N
    if window < 0:
        raise ValueError("bound too small for a meaningful window")
    # homological positions i with zeta(i) <= bound and nonzero slices
    zs = []
    i = 0
    while zeta(i, N) <= fam.bound:
        zs.append(zeta(i, N))
        i += 1
    maps = {}
    for i in range(1, len(zs)):
        hi = zs[i]
        if fam.slice_dim(hi) == 0:
            maps[i] = {}
            continue
        maps[i] = _contraction_map(fam, i, zs, field)
    mu = fam.mu_matrix()

    def restricted_rank(cols: dict, src_n: int) -> int:
        elim = SparseEliminator(field)
        basis = fam.basis(src_n)
        for src, vec in cols.items():
            if fam.total_degree(src_n, basis[src]) <= window:
                elim.add(dict(vec))
        return elim.rank

    def windowed_dim(n: int) -> int:
        basis = fam.basis(n)
        return sum(1 for key in basis if fam.total_degree(n, key) <= window)

    positions = []
    comp_zero = True
    exact_all = True
    # position 0: exactness of (U (x) U) -> U at the window
    rank_mu = None
    elim_mu = SparseEliminator(field)
    basis0 = fam.basis(0)
    for src, vec in mu.items():
        if fam.total_degree(0, basis0[src]) <= window:
            elim_mu.add(dict(vec))
    rank_mu = elim_mu.rank
    rank1 = restricted_rank(maps[1], zs[1]) if len(zs) > 1 else 0
    dim0 = windowed_dim(0)
    exact0 = rank_mu + rank1 == dim0
    onto = rank_mu == fam.tu.dim_filtration(window)
    positions.append(
        {
            "i": 0,
            "zeta": 0,
            "dim_total": fam.slice_dim(0),
            "dim_window": dim0,
            "rank_in": rank1,
            "rank_out": rank_mu,
            "exact": exact0 and onto,
        }
    )
    exact_all = exact_all and exact0 and onto
    for i in range(1, len(zs)):
        if fam.slice_dim(zs[i]) == 0:
            break
        rank_out = restricted_rank(maps[i], zs[i])
        rank_in = (
            restricted_rank(maps[i + 1], zs[i + 1])
            if i + 1 < len(zs) and fam.slice_dim(zs[i + 1]) > 0
            else 0
        )
        dim_i = windowed_dim(zs[i])
        ok = rank_out + rank_in == dim_i
        positions.append(
            {
                "i": i,
                "zeta": zs[i],
                "dim_total": fam.slice_dim(zs[i]),
                "dim_window": dim_i,
                "rank_in": rank_in,
                "rank_out": rank_out,
                "exact": ok,
            }
        )
        exact_all = exact_all and ok
        # composition zero of consecutive maps on the full slices
        if i + 1 < len(zs) and fam.slice_dim(zs[i + 1]) > 0:
            comp = compose_maps(maps[i], maps[i + 1], field)
            if not map_is_zero(comp):
                comp_zero = False
    comp_mu = compose_maps(mu, maps[1], field) if len(zs) > 1 else {}
    if not map_is_zero(comp_mu):
        comp_zero = False
    return ContractionReport(
        bound=fam.bound,
        window=window,
        positions=positions,
        composition_zero=comp_zero,
        exact_in_window=exact_all,
    )


def _add_vec(a: dict, b: dict, field) -> dict:
    out = dict(a)
    for k, v in b.items():
        cur = out.get(k)
        nv = v if cur is None else field.add(cur, v)
        if field.is_zero(nv):
            out.pop(k, None)
        else:
            out[k] = nv
    return out


def _contraction_map(fam: NComplexSlice, i: int, zs: list, field) -> dict:
    """Map out of homological position i: d when i is odd, d^{N-1} when even."""
    hi = zs[i]
    N = fam.N
    if i % 2 == 1:
        return map_difference(fam.d_left(hi), fam.d_right(hi), field, fam.slice_dim(hi))
    total = None
    ncols = fam.slice_dim(hi)
    for a in range(N):
        b = N - 1 - a
        cur = {src: {src: field.one} for src in range(ncols)}
        level = hi
        for _ in range(b):
            cur = compose_maps(fam.d_right(level), cur, field)
            level -= 1
        for _ in range(a):
            cur = compose_maps(fam.d_left(level), cur, field)
            level -= 1
        total = cur if total is None else {
            src: _add_vec(total[src], cur[src], field) for src in range(ncols)
        }
    return total


# -- explicit wedge-basis differentials for antisymmetrizer presentations ----


class WedgeComplex:
    """Slices U (x) Λ^m V (x) U on the wedge basis with the explicit maps.

    Requires the presentation to come from the antisymmetrizer family, so
    that W_m is the span of antisymmetrized tensors with group coefficients
    and the wedge words index it freely over K.
    """

    def __init__(self, family: NComplexSlice, group: GroupData, p: int, psi: PsiMap):
        if family.N != p:
            raise DimensionMismatch("the wedge picture needs relation degree p")
        self.family = family
        self.group = group
        self.p = p
        self.psi = psi
        self.tu = family.tu
        self.ctx = family.ctx
        self._basis: dict[int, list] = {}
        self._index: dict[int, dict] = {}

    def basis(self, m: int) -> list:
        if m not in self._basis:
            out = []
            dimV = self.ctx.dimV
            for pos, b0_idx in enumerate(self.family.b0):
                a = self.tu.basis[b0_idx][0]
                for combo in combinations(range(dimV), m):
                    for b_idx, (c, _, _) in enumerate(self.tu.basis):
                        if a + m + c <= self.family.bound:
                            out.append((pos, combo, b_idx))
            self._basis[m] = out
            self._index[m] = {key: i for i, key in enumerate(out)}
        return self._basis[m]

    def _emit(self, out: dict, m_low: int, pos: int, combo: tuple, b_idx: int, coeff) -> None:
        field = self.ctx.field
        skey = self._index[m_low].get((pos, combo, b_idx))
        if skey is None:
            raise RuntimeError("wedge image left the truncated slice")
        cur = out.get(skey)
        nv = coeff if cur is None else field.add(cur, coeff)
        if field.is_zero(nv):
            out.pop(skey, None)
        else:
            out[skey] = nv

    def _left_term(self, out: dict, m_low: int, b0_idx: int, letter: int, combo: tuple, b_idx: int, scale) -> None:
        """(b0 · v_letter) (x) combo (x) b, normalized over b0 · Gamma."""
        field = self.ctx.field
        for b2, c in self.tu.right_mult_letter(b0_idx, letter):
            pos2, g = self.family.b_decomp[b2]
            coeff = field.mul(scale, c)
            if g == 0:
                self._emit(out, m_low, pos2, combo, b_idx, coeff)
            else:
                # push g through the wedge and the right factor
                expansion = wedge_apply(self.group.matrices[g], combo, self.ctx.conductor)
                for combo2, cw in expansion.items():
                    raw_cw = cw.raw if cw.conductor == self.ctx.conductor else field.from_fraction(cw.as_fraction())
                    for b3, c3 in self.tu.left_mult_group(b_idx, g):
                        self._emit(
                            out,
                            m_low,
                            pos2,
                            combo2,
                            b3,
                            field.mul(coeff, field.mul(raw_cw, c3)),
                        )

    def differential(self, m: int, parity: str) -> dict:
        """The explicit wedge formula at wedge size m.

        parity "odd" gives the single-step alternating map (the contraction
        map out of odd homological positions); parity "even" gives the
        (p-1)-fold sum used out of even positions.
        """
        if parity == "odd":
            return self._odd_map(m)
        if parity == "even":
            return self._even_map(m)
        raise ValueError("parity must be 'odd' or 'even'")

    def _odd_map(self, m: int) -> dict:
        field = self.ctx.field
        self.basis(m - 1)
        cols = {}
        for src, (pos, combo, b_idx) in enumerate(self.basis(m)):
            out: dict = {}
            b0_idx = self.family.b0[pos]
            for jpos in range(m):
                letter = combo[jpos]
                rest = combo[:jpos] + combo[jpos + 1 :]
                sign_l = field.one if jpos % 2 == 0 else field.neg(field.one)
                self._left_term(out, m - 1, b0_idx, letter, rest, b_idx, sign_l)
                sign_r = field.one if (m - 1 - jpos) % 2 == 0 else field.neg(field.one)
                for b2, c in self.tu.left_mult_letter(b_idx, letter):
                    self._emit(out, m - 1, pos, rest, b2, field.neg(field.mul(sign_r, c)))
            cols[src] = out
        return cols

    def _even_map(self, m: int) -> dict:
        """Sum over a + b = p - 1 of a left-steps and b right-steps."""
        field = self.ctx.field
        p = self.p
        total = None
        ncols = len(self.basis(m))
        for a in range(p):
            b = p - 1 - a
            cur = {src: {src: field.one} for src in range(ncols)}
            level = m
            for _ in range(b):
                cur = compose_maps(self._right_step(level), cur, field)
                level -= 1
            for _ in range(a):
                cur = compose_maps(self._left_step(level), cur, field)
                level -= 1
            total = cur if total is None else {
                src: _add_vec(total[src], cur[src], field) for src in range(ncols)
            }
        return total

    def _left_step(self, m: int) -> dict:
        field = self.ctx.field
        self.basis(m - 1)
        cols = {}
        for src, (pos, combo, b_idx) in enumerate(self.basis(m)):
            out: dict = {}
            b0_idx = self.family.b0[pos]
            for jpos in range(m):
                letter = combo[jpos]
                rest = combo[:jpos] + combo[jpos + 1 :]
                sign_l = field.one if jpos % 2 == 0 else field.neg(field.one)
                self._left_term(out, m - 1, b0_idx, letter, rest, b_idx, sign_l)
            cols[src] = out
        return cols

    def _right_step(self, m: int) -> dict:
        field = self.ctx.field
        self.basis(m - 1)
        cols = {}
        for src, (pos, combo, b_idx) in enumerate(self.basis(m)):
            out: dict = {}
            for jpos in range(m):
                letter = combo[jpos]
                rest = combo[:jpos] + combo[jpos + 1 :]
                sign_r = field.one if (m - 1 - jpos) % 2 == 0 else field.neg(field.one)
                for b2, c in self.tu.left_mult_letter(b_idx, letter):
                    self._emit(out, m - 1, pos, rest, b2, field.mul(sign_r, c))
            cols[src] = out
        return cols

    def iso_to_generic(self, m: int) -> dict:
        """Column map identifying the wedge slice with the generic slice.

        Sends b0 (x) wedge(combo) (x) b to the generic basis expansion of
        b0 (x) Alt(combo) (x) b.
        """
        from .smashtensor import alternating_sum_terms

        field = self.ctx.field
        fam = self.family
        x = fam.x_space(m)
        fam.basis(m)
        index = fam._slice_index[m]
        cols = {}
        for src, (pos, combo, b_idx) in enumerate(self.basis(m)):
            terms = alternating_sum_terms(self.ctx, combo)
            vec: dict = {}
            for (word, g), coeff in terms.items():
                raw = coeff.raw if coeff.conductor == self.ctx.conductor else field.from_fraction(coeff.as_fraction())
                wnum = _word_to_num(word, self.ctx.dimV)
                key = x.coord_rank[(wnum, b_idx)]
                cur = vec.get(key)
                nv = raw if cur is None else field.add(cur, raw)
                if field.is_zero(nv):
                    vec.pop(key, None)
                else:
                    vec[key] = nv
            out: dict = {}
            for t, c in x.express(vec):
                skey = index.get((pos, t))
                if skey is None:
                    raise RuntimeError("wedge embedding left the truncated slice")
                cur = out.get(skey)
                nv = c if cur is None else field.add(cur, c)
                if field.is_zero(nv):
                    out.pop(skey, None)
                else:
                    out[skey] = nv
            cols[src] = out
        return cols


def wedge_differentials(family: NComplexSlice, group: GroupData, p: int, psi: PsiMap, parity: str, m: int) -> dict:
    """Explicit wedge-formula matrix at wedge size m for the given parity."""
    wc = WedgeComplex(family, group, p, psi)
    return wc.differential(m, parity)


def wedge_agreement(family: NComplexSlice, group: GroupData, p: int, psi: PsiMap) -> bool:
    """The wedge formulas match the generic maps under the identification."""
    wc = WedgeComplex(family, group, p, psi)
    field = family.ctx.field
    N = family.N
    zs = []
    i = 0
    while zeta(i, N) <= family.bound:
        zs.append(zeta(i, N))
        i += 1
    ok = True
    for i in range(1, len(zs)):
        hi, lo = zs[i], zs[i - 1]
        if family.slice_dim(hi) == 0 or not wc.basis(hi):
            break
        parity = "odd" if i % 2 == 1 else "even"
        wedge_map = wc.differential(hi, parity)
        generic = _contraction_map(family, i, zs, field)
        iso_hi = wc.iso_to_generic(hi)
        iso_lo = wc.iso_to_generic(lo)
        lhs = compose_maps(generic, iso_hi, field)
        rhs = compose_maps(iso_lo, wedge_map, field)
        if not maps_equal(lhs, rhs, field, len(wc.basis(hi))):
            ok = False
    return ok
