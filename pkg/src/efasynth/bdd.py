"""Reduced ordered binary decision diagrams with exact operation accounting.

The manager keeps every node in flat arrays, hash-conses through a unique
table, and memoizes results in a single unbounded computed cache.  All
counters (operation counts, live/peak node counts) are plain integers that
advance identically on every platform, which is what makes benchmark output
reproducible: an operation is counted exactly when a recursive invocation
survives the terminal-case shortcuts *and* misses the computed cache.

Variable levels come in adjacent pairs: an even level holds a current-state
bit and the next odd level holds its primed (next-state) partner.  The
relational products (:meth:`BddManager.relnext`, :meth:`BddManager.relprev`)
rely on this layout and quantify exactly the current-state variables whose
primed partner occurs in the transition relation; bits that are not assigned
by the relation keep their source value implicitly, so partial relations
need no explicit frame conjuncts.

Node lifetime is explicit.  Nodes are never deleted; ``live`` counts the
decision nodes with a positive reference count, which covers registered
roots plus the temporaries of the operation currently in flight.  ``peak``
is the high-water mark of ``live``.
"""

from __future__ import annotations

from typing import Iterable, Mapping

__all__ = ["BddError", "BddManager", "NodeRef"]

# Sentinel level for the two terminal nodes; larger than any real level.
_TERMINAL_LEVEL = 1 << 30

# Internal operation codes.  The public names double as stats keys.
_OP_NAMES = (
    "and", "or", "xor", "diff", "imp", "biimp",
    "not", "ite", "exists", "replace", "restrict", "relnext", "relprev",
)
_AND, _OR, _XOR, _DIFF, _IMP, _BIIMP, _NOT, _ITE, _EXISTS, _REPLACE, \
    _RESTRICT, _RELNEXT, _RELPREV = range(13)
_COMMUTATIVE = frozenset((_AND, _OR, _XOR, _BIIMP))


class BddError(Exception):
    """Raised on misuse of the manager (bad operands, unbalanced roots)."""


class NodeRef:
    """Handle to a BDD node.

    A ``NodeRef`` is a value object: equality means "same node in the same
    manager", which by canonicity is semantic equivalence.  It carries no
    lifetime semantics; use :meth:`BddManager.register_root` to keep a node's
    subgraph counted as live between operations.
    """

    __slots__ = ("manager", "node")

    def __init__(self, manager: "BddManager", node: int):
        self.manager = manager
        self.node = node

    def __eq__(self, other):
        return (
            isinstance(other, NodeRef)
            and other.manager is self.manager
            and other.node == self.node
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((id(self.manager), self.node))

    def __and__(self, other):
        return self.manager.apply("and", self, other)

    def __or__(self, other):
        return self.manager.apply("or", self, other)

    def __xor__(self, other):
        return self.manager.apply("xor", self, other)

    def __invert__(self):
        return self.manager.negate(self)

    def __bool__(self):
        raise BddError(
            "NodeRef has no truth value; compare against manager.true or "
            "manager.false, or use is_true/is_false"
        )

    @property
    def is_false(self) -> bool:
        return self.node == 0

    @property
    def is_true(self) -> bool:
        return self.node == 1

    def __repr__(self):
        return f"NodeRef({self.node})"


class BddManager:
    """Shared-node BDD store with deterministic metrics.

    Levels are allocated in current/next pairs via :meth:`add_pair`.  The
    manager never reorders and never garbage-collects: determinism of the
    operation and node counters takes precedence over memory reuse.
    """

    def __init__(self):
        # Node 0 is FALSE, node 1 is TRUE.
        self._var = [_TERMINAL_LEVEL, _TERMINAL_LEVEL]
        self._low = [0, 1]
        self._high = [0, 1]
        self._ref = [0, 0]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._cache: dict[tuple, int] = {}
        # Interned level sets / rename maps referenced from cache keys.
        self._set_ids: dict[frozenset[int], int] = {}
        self._sets: list[tuple[frozenset[int], int]] = []  # (levels, max)
        self._map_ids: dict[tuple[tuple[int, int], ...], int] = {}
        self._maps: list[tuple[dict[int, int], int]] = []  # (map, max key)
        self._num_vars = 0
        self._labels: list[str] = []
        # Metrics.
        self._ops = [0] * len(_OP_NAMES)
        self._live = 0
        self._peak = 0
        self._roots: dict[int, int] = {}
        # Temporary-reference frame for the public operation in flight.
        self._depth = 0
        self._temps: list[int] = []
        self._support_memo: dict[int, frozenset[int]] = {}
        self.false = NodeRef(self, 0)
        self.true = NodeRef(self, 1)

    # ------------------------------------------------------------------
    # variables

    def add_pair(self, label: str = "") -> tuple[int, int]:
        """Allocate a current/next level pair; returns ``(even, odd)``."""
        c = self._num_vars
        self._num_vars += 2
        self._labels.append(label or f"b{c // 2}")
        return c, c + 1

    @property
    def num_vars(self) -> int:
        return self._num_vars

    def level_name(self, level: int) -> str:
        base = self._labels[level // 2]
        return base + ("'" if level & 1 else "")

    def var(self, level: int) -> NodeRef:
        """The function of a single variable at ``level``."""
        if not 0 <= level < self._num_vars:
            raise BddError(f"level {level} out of range")
        self._begin()
        try:
            return self._wrap(self._node(level, 0, 1))
        finally:
            self._end()

    def nvar(self, level: int) -> NodeRef:
        """Negated single variable, allocated without an apply call."""
        if not 0 <= level < self._num_vars:
            raise BddError(f"level {level} out of range")
        self._begin()
        try:
            return self._wrap(self._node(level, 1, 0))
        finally:
            self._end()

    # ------------------------------------------------------------------
    # node store

    def _node(self, var: int, low: int, high: int) -> int:
        if low == high:
            return low
        key = (var, low, high)
        u = self._unique.get(key)
        if u is None:
            u = len(self._var)
            self._var.append(var)
            self._low.append(low)
            self._high.append(high)
            self._ref.append(0)
            self._unique[key] = u
        # Hold every node touched by the running operation as a temporary
        # so live/peak accounting sees intermediate results.
        self._ref_inc(u)
        self._temps.append(u)
        return u

    def _ref_inc(self, u: int) -> None:
        stack = [u]
        ref = self._ref
        while stack:
            v = stack.pop()
            if v <= 1:
                continue
            ref[v] += 1
            if ref[v] == 1:
                self._live += 1
                if self._live > self._peak:
                    self._peak = self._live
                stack.append(self._low[v])
                stack.append(self._high[v])

    def _ref_dec(self, u: int) -> None:
        stack = [u]
        ref = self._ref
        while stack:
            v = stack.pop()
            if v <= 1:
                continue
            if ref[v] <= 0:
                raise BddError("reference count underflow")
            ref[v] -= 1
            if ref[v] == 0:
                self._live -= 1
                stack.append(self._low[v])
                stack.append(self._high[v])

    def _begin(self) -> None:
        self._depth += 1

    def _end(self) -> None:
        self._depth -= 1
        if self._depth == 0:
            for u in reversed(self._temps):
                self._ref_dec(u)
            self._temps.clear()

    def _wrap(self, node: int) -> NodeRef:
        return NodeRef(self, node)

    def _unwrap(self, ref: NodeRef) -> int:
        if not isinstance(ref, NodeRef) or ref.manager is not self:
            raise BddError("operand belongs to a different manager")
        return ref.node

    # ------------------------------------------------------------------
    # roots and metrics

    def register_root(self, ref: NodeRef) -> NodeRef:
        """Pin ``ref`` so its subgraph stays in the live count; returns it."""
        u = self._unwrap(ref)
        if u > 1:
            self._roots[u] = self._roots.get(u, 0) + 1
            self._ref_inc(u)
        return ref

    def release_root(self, ref: NodeRef) -> None:
        u = self._unwrap(ref)
        if u <= 1:
            return
        count = self._roots.get(u, 0)
        if count == 0:
            raise BddError("release of a node that is not a registered root")
        if count == 1:
            del self._roots[u]
        else:
            self._roots[u] = count - 1
        self._ref_dec(u)

    @property
    def live_nodes(self) -> int:
        return self._live

    @property
    def peak_nodes(self) -> int:
        return self._peak

    @property
    def allocated_nodes(self) -> int:
        return len(self._var) - 2

    def op_counts(self) -> dict[str, int]:
        return {name: self._ops[i] for i, name in enumerate(_OP_NAMES)}

    @property
    def op_total(self) -> int:
        return sum(self._ops)

    # ------------------------------------------------------------------
    # interning helpers

    def _intern_set(self, levels: frozenset[int]) -> int:
        sid = self._set_ids.get(levels)
        if sid is None:
            sid = len(self._sets)
            self._set_ids[levels] = sid
            self._sets.append((levels, max(levels) if levels else -1))
        return sid

    def _intern_map(self, mapping: dict[int, int]) -> int:
        key = tuple(sorted(mapping.items()))
        mid = self._map_ids.get(key)
        if mid is None:
            mid = len(self._maps)
            self._map_ids[key] = mid
            self._maps.append((dict(mapping), max(mapping) if mapping else -1))
        return mid

    # ------------------------------------------------------------------
    # boolean connectives

    def apply(self, op: str, f: NodeRef, g: NodeRef) -> NodeRef:
        try:
            code = _OP_NAMES.index(op)
        except ValueError:
            raise BddError(f"unknown operator {op!r}") from None
        if code > _BIIMP:
            raise BddError(f"{op!r} is not a binary connective")
        u, v = self._unwrap(f), self._unwrap(g)
        self._begin()
        try:
            return self._wrap(self._apply(code, u, v))
        finally:
            self._end()

    def negate(self, f: NodeRef) -> NodeRef:
        u = self._unwrap(f)
        self._begin()
        try:
            return self._wrap(self._not(u))
        finally:
            self._end()

    def ite(self, f: NodeRef, g: NodeRef, h: NodeRef) -> NodeRef:
        a, b, c = self._unwrap(f), self._unwrap(g), self._unwrap(h)
        self._begin()
        try:
            return self._wrap(self._ite(a, b, c))
        finally:
            self._end()

    def _apply(self, code: int, u: int, v: int) -> int:
        # Terminal-case shortcuts; nothing here is counted.
        if code == _AND:
            if u == 0 or v == 0:
                return 0
            if u == 1:
                return v
            if v == 1:
                return u
            if u == v:
                return u
        elif code == _OR:
            if u == 1 or v == 1:
                return 1
            if u == 0:
                return v
            if v == 0:
                return u
            if u == v:
                return u
        elif code == _XOR:
            if u == v:
                return 0
            if u == 0:
                return v
            if v == 0:
                return u
            if u == 1:
                return self._not(v)
            if v == 1:
                return self._not(u)
        elif code == _DIFF:
            if u == 0 or v == 1:
                return 0
            if u == v:
                return 0
            if v == 0:
                return u
            if u == 1:
                return self._not(v)
        elif code == _IMP:
            if u == 0 or v == 1:
                return 1
            if u == v:
                return 1
            if u == 1:
                return v
            if v == 0:
                return self._not(u)
        else:  # _BIIMP
            if u == v:
                return 1
            if u == 1:
                return v
            if v == 1:
                return u
            if u == 0:
                return self._not(v)
            if v == 0:
                return self._not(u)
        if code in _COMMUTATIVE and u > v:
            u, v = v, u
        key = (code, u, v)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        self._ops[code] += 1
        var_u, var_v = self._var[u], self._var[v]
        level = var_u if var_u < var_v else var_v
        u0, u1 = (self._low[u], self._high[u]) if var_u == level else (u, u)
        v0, v1 = (self._low[v], self._high[v]) if var_v == level else (v, v)
        res = self._node(
            level, self._apply(code, u0, v0), self._apply(code, u1, v1)
        )
        self._cache[key] = res
        return res

    def _not(self, u: int) -> int:
        if u == 0:
            return 1
        if u == 1:
            return 0
        key = (_NOT, u)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        self._ops[_NOT] += 1
        res = self._node(
            self._var[u], self._not(self._low[u]), self._not(self._high[u])
        )
        self._cache[key] = res
        return res

    def _ite(self, f: int, g: int, h: int) -> int:
        if f == 1:
            return g
        if f == 0:
            return h
        if g == h:
            return g
        if g == 1 and h == 0:
            return f
        if g == 0 and h == 1:
            return self._not(f)
        key = (_ITE, f, g, h)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        self._ops[_ITE] += 1
        level = min(self._var[f], self._var[g], self._var[h])
        f0, f1 = self._cof(f, level)
        g0, g1 = self._cof(g, level)
        h0, h1 = self._cof(h, level)
        res = self._node(
            level, self._ite(f0, g0, h0), self._ite(f1, g1, h1)
        )
        self._cache[key] = res
        return res

    def _cof(self, u: int, level: int) -> tuple[int, int]:
        if self._var[u] == level:
            return self._low[u], self._high[u]
        return u, u

    # ------------------------------------------------------------------
    # quantification, renaming, generalized cofactor

    def exists(self, f: NodeRef, levels: Iterable[int]) -> NodeRef:
        u = self._unwrap(f)
        lvls = frozenset(levels)
        for l in lvls:
            if not 0 <= l < self._num_vars:
                raise BddError(f"level {l} out of range")
        if not lvls:
            return f
        sid = self._intern_set(lvls)
        self._begin()
        try:
            return self._wrap(self._exists(u, sid))
        finally:
            self._end()

    def _exists(self, u: int, sid: int) -> int:
        levels, top = self._sets[sid]
        if u <= 1 or self._var[u] > top:
            return u
        key = (_EXISTS, u, sid)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        self._ops[_EXISTS] += 1
        a = self._exists(self._low[u], sid)
        b = self._exists(self._high[u], sid)
        if self._var[u] in levels:
            res = self._apply(_OR, a, b)
        else:
            res = self._node(self._var[u], a, b)
        self._cache[key] = res
        return res

    def replace(self, f: NodeRef, mapping: Mapping[int, int]) -> NodeRef:
        """Rename variables by level; the map must preserve level order.

        The map extended with the identity must be strictly increasing on
        the support of ``f``; anything else would require reordering the
        diagram and is rejected.
        """
        u = self._unwrap(f)
        mapping = {k: v for k, v in mapping.items() if k != v}
        if not mapping:
            return f
        for k, v in mapping.items():
            if not (0 <= k < self._num_vars and 0 <= v < self._num_vars):
                raise BddError("rename level out of range")
        sup = sorted(self._support(u))
        imgs = [mapping.get(l, l) for l in sup]
        if any(b <= a for a, b in zip(imgs, imgs[1:])):
            raise BddError(
                f"rename map is not order-preserving on support {sup}"
            )
        mid = self._intern_map(mapping)
        self._begin()
        try:
            return self._wrap(self._replace(u, mid))
        finally:
            self._end()

    def _replace(self, u: int, mid: int) -> int:
        mapping, top = self._maps[mid]
        if u <= 1 or self._var[u] > top:
            return u
        key = (_REPLACE, u, mid)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        self._ops[_REPLACE] += 1
        var = self._var[u]
        res = self._node(
            mapping.get(var, var),
            self._replace(self._low[u], mid),
            self._replace(self._high[u], mid),
        )
        self._cache[key] = res
        return res

    def restrict(self, f: NodeRef, care: NodeRef) -> NodeRef:
        """Generalized-cofactor simplification of ``f`` against ``care``.

        Returns some ``g`` with ``g & care == f & care``, chosen by the
        sibling-substitution rule; outside the care set ``g`` is arbitrary.
        """
        u, c = self._unwrap(f), self._unwrap(care)
        if c == 0:
            raise BddError("restrict against an empty care set")
        self._begin()
        try:
            return self._wrap(self._restrict(u, c))
        finally:
            self._end()

    def _restrict(self, u: int, c: int) -> int:
        if c == 1 or u <= 1:
            return u
        key = (_RESTRICT, u, c)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        self._ops[_RESTRICT] += 1
        var_u, var_c = self._var[u], self._var[c]
        if var_c < var_u:
            c0, c1 = self._low[c], self._high[c]
            if c0 == 0:
                res = self._restrict(u, c1)
            elif c1 == 0:
                res = self._restrict(u, c0)
            else:
                res = self._restrict(u, self._apply(_OR, c0, c1))
        elif var_u < var_c:
            res = self._node(
                var_u,
                self._restrict(self._low[u], c),
                self._restrict(self._high[u], c),
            )
        else:
            c0, c1 = self._low[c], self._high[c]
            if c0 == 0:
                res = self._restrict(self._high[u], c1)
            elif c1 == 0:
                res = self._restrict(self._low[u], c0)
            else:
                res = self._node(
                    var_u,
                    self._restrict(self._low[u], c0),
                    self._restrict(self._high[u], c1),
                )
        self._cache[key] = res
        return res

    # ------------------------------------------------------------------
    # relational products

    def _check_state_predicate(self, u: int, what: str) -> None:
        for l in self._support(u):
            if l & 1:
                raise BddError(
                    f"{what} mentions next-state level {l}; state "
                    "predicates must use current-state (even) levels"
                )

    def relnext(
        self,
        p: NodeRef,
        t: NodeRef,
        constrain: NodeRef | None = None,
        assigned: Iterable[int] | None = None,
    ) -> NodeRef:
        """Image of state set ``p`` under relation ``t``.

        ``t`` may be partial: a current/next pair whose odd level does not
        occur in ``t`` is treated as unchanged.  The result is expressed
        over current-state levels, intersected with ``constrain`` (also over
        current-state levels) when given.

        ``assigned`` lists the odd levels the relation constrains, for
        relations where an assigned bit can be vacuous in the diagram — a
        union of deterministic branches may agree on a bit or cover both of
        its values, erasing it from the support even though the bit does
        not keep its source value.  It must cover the odd support of ``t``;
        by default the odd support itself is used.
        """
        pn, tn = self._unwrap(p), self._unwrap(t)
        rn = 1 if constrain is None else self._unwrap(constrain)
        self._check_state_predicate(pn, "source set")
        if rn != 1:
            self._check_state_predicate(rn, "constraint set")
        quant = frozenset(
            l - 1 for l in self._assigned_levels(tn, assigned)
        )
        sid = self._intern_set(quant)
        self._begin()
        try:
            return self._wrap(self._relnext(pn, tn, rn, sid))
        finally:
            self._end()

    def _assigned_levels(
        self, tn: int, assigned: Iterable[int] | None
    ) -> frozenset[int]:
        odd_support = frozenset(l for l in self._support(tn) if l & 1)
        if assigned is None:
            return odd_support
        odd = frozenset(assigned)
        for l in odd:
            if not (0 <= l < self._num_vars and l & 1):
                raise BddError(f"assigned level {l} is not an odd level")
        missing = odd_support - odd
        if missing:
            raise BddError(
                f"relation constrains odd levels {sorted(missing)} outside "
                "the assigned set"
            )
        return odd

    def _relnext(self, p: int, t: int, r: int, sid: int) -> int:
        if p == 0 or t == 0 or r == 0:
            return 0
        if t == 1:
            return self._apply(_AND, self._exists(p, sid), r)
        key = (_RELNEXT, p, t, r, sid)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        self._ops[_RELNEXT] += 1
        quant, _ = self._sets[sid]
        c = (min(self._var[p], self._var[t], self._var[r]) >> 1) << 1
        n = c + 1
        p0, p1 = self._cof(p, c)
        r0, r1 = self._cof(r, c)
        tc0, tc1 = self._cof(t, c)
        if c in quant:
            t00, t01 = self._cof(tc0, n)
            t10, t11 = self._cof(tc1, n)
            a0 = self._apply(
                _OR,
                self._relnext(p0, t00, r0, sid),
                self._relnext(p1, t10, r0, sid),
            )
            a1 = self._apply(
                _OR,
                self._relnext(p0, t01, r1, sid),
                self._relnext(p1, t11, r1, sid),
            )
            res = self._node(c, a0, a1)
        else:
            res = self._node(
                c,
                self._relnext(p0, tc0, r0, sid),
                self._relnext(p1, tc1, r1, sid),
            )
        self._cache[key] = res
        return res

    def relprev(
        self,
        p: NodeRef,
        t: NodeRef,
        constrain: NodeRef | None = None,
        assigned: Iterable[int] | None = None,
    ) -> NodeRef:
        """Preimage of state set ``p`` under relation ``t``.

        States with a ``t``-successor inside ``p``, intersected with
        ``constrain`` when given; all sets over current-state levels.
        ``assigned`` is as for :meth:`relnext`.
        """
        pn, tn = self._unwrap(p), self._unwrap(t)
        rn = 1 if constrain is None else self._unwrap(constrain)
        self._check_state_predicate(pn, "target set")
        if rn != 1:
            self._check_state_predicate(rn, "constraint set")
        quant = self._assigned_levels(tn, assigned)
        sid = self._intern_set(quant)
        self._begin()
        try:
            return self._wrap(self._relprev(tn, pn, rn, sid))
        finally:
            self._end()

    def _relprev(self, t: int, p: int, r: int, sid: int) -> int:
        if t == 0 or p == 0 or r == 0:
            return 0
        if p == 1:
            return self._apply(_AND, self._exists(t, sid), r)
        key = (_RELPREV, t, p, r, sid)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        self._ops[_RELPREV] += 1
        quant, _ = self._sets[sid]
        c = (min(self._var[t], self._var[p], self._var[r]) >> 1) << 1
        n = c + 1
        p0, p1 = self._cof(p, c)
        r0, r1 = self._cof(r, c)
        tc0, tc1 = self._cof(t, c)
        if n in quant:
            t00, t01 = self._cof(tc0, n)
            t10, t11 = self._cof(tc1, n)
            b0 = self._apply(
                _OR,
                self._relprev(t00, p0, r0, sid),
                self._relprev(t01, p1, r0, sid),
            )
            b1 = self._apply(
                _OR,
                self._relprev(t10, p0, r1, sid),
                self._relprev(t11, p1, r1, sid),
            )
            res = self._node(c, b0, b1)
        else:
            res = self._node(
                c,
                self._relprev(tc0, p0, r0, sid),
                self._relprev(tc1, p1, r1, sid),
            )
        self._cache[key] = res
        return res

    # ------------------------------------------------------------------
    # inspection

    def _support(self, u: int) -> frozenset[int]:
        memo = self._support_memo
        out = memo.get(u)
        if out is not None:
            return out
        if u <= 1:
            memo[u] = frozenset()
            return memo[u]
        out = frozenset(
            (self._var[u],)
        ) | self._support(self._low[u]) | self._support(self._high[u])
        memo[u] = out
        return out

    def support(self, f: NodeRef) -> frozenset[int]:
        return self._support(self._unwrap(f))

    def size(self, f: NodeRef) -> int:
        """Number of decision nodes in ``f`` (terminals excluded)."""
        u = self._unwrap(f)
        seen: set[int] = set()
        stack = [u]
        while stack:
            v = stack.pop()
            if v <= 1 or v in seen:
                continue
            seen.add(v)
            stack.append(self._low[v])
            stack.append(self._high[v])
        return len(seen)

    def evaluate(self, f: NodeRef, assignment: Mapping[int, int]) -> bool:
        """Evaluate ``f`` under a level -> {0,1} assignment."""
        u = self._unwrap(f)
        while u > 1:
            u = self._high[u] if assignment[self._var[u]] else self._low[u]
        return u == 1

    def sat_count(self, f: NodeRef, levels: Iterable[int]) -> int:
        """Number of satisfying assignments of ``f`` over ``levels``.

        ``levels`` must cover the support of ``f``; variables in ``levels``
        that ``f`` does not mention contribute a factor of two each.
        """
        u = self._unwrap(f)
        lvls = sorted(set(levels))
        rank = {l: i for i, l in enumerate(lvls)}
        missing = self._support(u) - set(lvls)
        if missing:
            raise BddError(f"sat_count domain misses support levels {sorted(missing)}")
        n = len(lvls)
        memo: dict[int, int] = {}

        def count(v: int) -> int:
            # Solutions over the variables ranked at or below var(v).
            if v == 0:
                return 0
            if v == 1:
                return 1
            out = memo.get(v)
            if out is not None:
                return out
            rv = rank[self._var[v]]
            lo, hi = self._low[v], self._high[v]
            rlo = n if lo <= 1 else rank[self._var[lo]]
            rhi = n if hi <= 1 else rank[self._var[hi]]
            out = count(lo) * (1 << (rlo - rv - 1)) + count(hi) * (
                1 << (rhi - rv - 1)
            )
            memo[v] = out
            return out

        top = n if u <= 1 else rank[self._var[u]]
        return count(u) * (1 << top)

    def to_dot(self, f: NodeRef, name: str = "bdd") -> str:
        """Graphviz rendering of ``f`` (dashed = low, solid = high)."""
        u = self._unwrap(f)
        lines = [f"digraph {name} {{"]
        lines.append('  f [shape=plaintext, label="f"];')
        lines.append('  n0 [shape=box, label="0"];')
        lines.append('  n1 [shape=box, label="1"];')
        seen: set[int] = set()
        stack = [u]
        order: list[int] = []
        while stack:
            v = stack.pop()
            if v <= 1 or v in seen:
                continue
            seen.add(v)
            order.append(v)
            stack.append(self._high[v])
            stack.append(self._low[v])
        for v in sorted(order):
            lines.append(
                f'  n{v} [shape=circle, label="{self.level_name(self._var[v])}"];'
            )
            lines.append(f"  n{v} -> n{self._low[v]} [style=dashed];")
            lines.append(f"  n{v} -> n{self._high[v]};")
        lines.append(f"  f -> n{u};")
        lines.append("}")
        return "\n".join(lines)
