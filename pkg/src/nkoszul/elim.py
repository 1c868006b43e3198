"""Internal incremental row reduction on sparse raw-valued rows.

Rows are dicts mapping column index to a nonzero raw field element.  The
eliminator keeps a fully reduced basis (each pivot column appears in exactly
one row, with coefficient one), so reduction against it yields unique normal
forms.  Insertion order never changes the resulting row space, and the
stored basis equals the canonical RREF basis of that space.

This is an implementation detail: the public ``Subspace`` API stays dense,
but ambient dimensions in the thousands with very sparse rows make dense
elimination wasteful, so the heavy modules route through this engine.
"""

from __future__ import annotations

import heapq


class SparseEliminator:
    """Maintains the RREF of a growing row space over a cyclotomic field."""

    def __init__(self, field):
        self.field = field
        self.pivot_rows: dict[int, dict] = {}
        self._col_index: dict[int, set[int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def pivot_columns(self) -> list[int]:
        return sorted(self.pivot_rows)

    def reduce(self, row: dict) -> dict:
        """Normal form of a row against the current basis (input unchanged).

        Eliminating a pivot column only ever introduces larger column
        indices (pivot rows have their pivot as least index), so a single
        heap sweep visits every column that can need elimination.
        """
        field = self.field
        out = dict(row)
        pivot_rows = self.pivot_rows
        heap = list(out)
        heapq.heapify(heap)
        seen = set(heap)
        while heap:
            col = heapq.heappop(heap)
            seen.discard(col)
            if col not in out:
                continue
            prow = pivot_rows.get(col)
            if prow is None:
                continue
            c = out.pop(col)
            for j, v in prow.items():
                if j == col:
                    continue
                cur = out.get(j)
                term = field.mul(c, v)
                if cur is None:
                    nv = field.neg(term)
                else:
                    nv = field.sub(cur, term)
                if field.is_zero(nv):
                    out.pop(j, None)
                else:
                    out[j] = nv
                    if j not in seen:
                        seen.add(j)
                        heapq.heappush(heap, j)
        return out

    def add(self, row: dict) -> int | None:
        """Insert a row; returns the new pivot column or None if dependent."""
        field = self.field
        red = self.reduce(row)
        if not red:
            return None
        piv = min(red)
        lead = red[piv]
        if not field.is_one(lead):
            inv = field.inv(lead)
            red = {j: field.mul(inv, v) for j, v in red.items()}
        red[piv] = field.one
        # Back-substitute into existing rows so the basis stays fully reduced.
        holders = self._col_index.get(piv)
        if holders:
            for hp in list(holders):
                hrow = self.pivot_rows[hp]
                c = hrow.get(piv)
                if c is None:
                    continue
                for j, v in red.items():
                    if j == piv:
                        continue
                    cur = hrow.get(j)
                    term = field.mul(c, v)
                    nv = field.sub(cur, term) if cur is not None else field.neg(term)
                    if field.is_zero(nv):
                        if cur is not None:
                            del hrow[j]
                            self._discard_index(j, hp)
                    else:
                        if cur is None:
                            self._col_index.setdefault(j, set()).add(hp)
                        hrow[j] = nv
                del hrow[piv]
            holders.clear()
        self.pivot_rows[piv] = red
        for j in red:
            if j != piv:
                self._col_index.setdefault(j, set()).add(piv)
        return piv

    def _discard_index(self, col: int, pivot: int) -> None:
        s = self._col_index.get(col)
        if s is not None:
            s.discard(pivot)
            if not s:
                del self._col_index[col]

    def add_all(self, rows) -> int:
        added = 0
        for r in rows:
            if self.add(r) is not None:
                added += 1
        return added

    def contains(self, row: dict) -> bool:
        return not self.reduce(row)

    def rows_canonical(self) -> list[dict]:
        return [dict(self.pivot_rows[p]) for p in sorted(self.pivot_rows)]


def vec_to_sparse(field, vec) -> dict:
    return {j: x for j, x in enumerate(vec) if not field.is_zero(x)}


def sparse_to_vec(field, row: dict, n: int) -> list:
    out = [field.zero] * n
    for j, v in row.items():
        out[j] = v
    return out


def sparse_rank(field, rows) -> int:
    elim = SparseEliminator(field)
    return elim.add_all(rows)


def sparse_span_equal(field, rows_a, rows_b) -> bool:
    ea = SparseEliminator(field)
    ea.add_all(rows_a)
    eb = SparseEliminator(field)
    eb.add_all(rows_b)
    if ea.rank != eb.rank:
        return False
    return ea.rows_canonical() == eb.rows_canonical()


def sparse_intersection(field, rows_a, rows_b) -> list[dict]:
    """Canonical RREF rows of span(rows_a) ∩ span(rows_b).

    Solves for combinations of the A-rows that reduce to zero against the
    B-span; the kernel of the residual coefficient matrix gives the
    intersection.
    """
    ea = SparseEliminator(field)
    ea.add_all(rows_a)
    basis_a = ea.rows_canonical()
    eb = SparseEliminator(field)
    eb.add_all(rows_b)
    residuals = [eb.reduce(r) for r in basis_a]
    support = sorted({c for r in residuals for c in r})
    col_of = {c: i for i, c in enumerate(support)}
    # dense kernel over the combination space
    nrows = len(basis_a)
    mat = [[field.zero] * nrows for _ in support]
    for i, r in enumerate(residuals):
        for c, v in r.items():
            mat[col_of[c]][i] = v
    # row reduce mat (equations) to find free combination coordinates
    pivots: dict[int, list] = {}
    for eq in mat:
        eq = list(eq)
        for p, prow in sorted(pivots.items()):
            c = eq[p]
            if not field.is_zero(c):
                for j in range(nrows):
                    if not field.is_zero(prow[j]):
                        eq[j] = field.sub(eq[j], field.mul(c, prow[j]))
        lead = None
        for j in range(nrows):
            if not field.is_zero(eq[j]):
                lead = j
                break
        if lead is None:
            continue
        inv = field.inv(eq[lead])
        eq = [field.mul(inv, x) for x in eq]
        for p, prow in pivots.items():
            c = prow[lead]
            if not field.is_zero(c):
                for j in range(nrows):
                    if not field.is_zero(eq[j]):
                        prow[j] = field.sub(prow[j], field.mul(c, eq[j]))
        pivots[lead] = eq
    out = SparseEliminator(field)
    free = [j for j in range(nrows) if j not in pivots]
    for fc in free:
        combo = {fc: field.one}
        for p, prow in pivots.items():
            c = prow[fc]
            if not field.is_zero(c):
                combo[p] = field.neg(c)
        vec: dict = {}
        for idx, coeff in combo.items():
            for col, v in basis_a[idx].items():
                cur = vec.get(col)
                term = field.mul(coeff, v)
                nv = term if cur is None else field.add(cur, term)
                if field.is_zero(nv):
                    vec.pop(col, None)
                else:
                    vec[col] = nv
        out.add(vec)
    return out.rows_canonical()
