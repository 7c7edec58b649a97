"""Tagged graphs: planar binary trees with labelled leaves and loop pairs.

A tree is a nested structure: a leaf is a ``str`` (free label) or an ``int``
(loop end; the two slots of a loop carry the same integer), and an internal
vertex is a ``(left, right)`` tuple.  ``TaggedGraph(None)`` is the empty
element.  Loop ids are renumbered ``0, 1, ...`` by first occurrence, so
structural equality of the stored tree is equality of graphs.

Text form::

    <<1 2> <3 <4 5>>>          loop-free tree
    <1 <2 3>> | 2~3             1-based slot positions joined into a loop
    0                           the empty graph
"""

from __future__ import annotations

import itertools
import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

Tree = Union[str, int, tuple]

EMPTY_TEXT = "0"
_IDENT = re.compile(r"[A-Za-z0-9_]+")


class GraphSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class LoopValidityError(ValueError):
    pass


class WorkLimitExceeded(RuntimeError):
    pass


def max_work() -> int:
    return int(os.environ.get("HOPF_TR_MAX_WORK", "5000000"))


def check_work(estimate: int, what: str) -> None:
    limit = max_work()
    if estimate > limit:
        raise WorkLimitExceeded(f"{what}: estimated {estimate} items exceeds HOPF_TR_MAX_WORK={limit}")


# ---------------------------------------------------------------- tree helpers


def is_leaf(t: Tree) -> bool:
    return not isinstance(t, tuple)


def leaves(t: Tree) -> list:
    if is_leaf(t):
        return [t]
    return leaves(t[0]) + leaves(t[1])


def degree(t: Tree) -> int:
    return 0 if is_leaf(t) else 1 + degree(t[0]) + degree(t[1])


def shape_of(t: Tree) -> Tree:
    """The tree with every leaf replaced by ``None``."""
    return None if is_leaf(t) else (shape_of(t[0]), shape_of(t[1]))


def fill(shape: Tree, items: Sequence) -> Tree:
    """Place ``items`` into the leaf slots of ``shape`` left to right."""
    it = iter(items)

    def go(s):
        return next(it) if s is None else (go(s[0]), go(s[1]))

    out = go(shape)
    if next(it, None) is not None:
        raise ValueError("more items than leaf slots")
    return out


def map_leaves(t: Tree, f) -> Tree:
    return f(t) if is_leaf(t) else (map_leaves(t[0], f), map_leaves(t[1], f))


def _canonical_ids(t: Tree) -> Tree:
    ids: dict[int, int] = {}

    def f(x):
        if isinstance(x, int):
            return ids.setdefault(x, len(ids))
        return x

    return map_leaves(t, f)


def pairs_of(items: Sequence) -> list[tuple[int, int]]:
    """0-based slot positions of each loop, sorted by first slot."""
    where: dict[int, list[int]] = {}
    for i, x in enumerate(items):
        if isinstance(x, int):
            where.setdefault(x, []).append(i)
    return sorted(tuple(v) for v in where.values())


def balanced(items: Sequence) -> bool:
    """Every loop encloses only slots of loops nested inside it."""
    where: dict[int, list[int]] = {}
    for i, x in enumerate(items):
        if isinstance(x, int):
            where.setdefault(x, []).append(i)
    for a, b in where.values():
        for s in range(a + 1, b):
            x = items[s]
            if not isinstance(x, int):
                return False
            c, d = where[x]
            if c < a or d > b:
                return False
    return True


# ---------------------------------------------------------------- the graph type


@dataclass(frozen=True, eq=False)
class TaggedGraph:
    tree: Tree | None

    def __eq__(self, other) -> bool:
        return isinstance(other, TaggedGraph) and self._hash == other._hash and self.tree == other.tree

    def __hash__(self) -> int:
        return self._hash

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(self.tree))
        if self.tree is None:
            return
        t = _canonical_ids(self.tree)
        object.__setattr__(self, "tree", t)
        object.__setattr__(self, "_hash", hash(t))
        items = leaves(t)
        counts: dict = {}
        for x in items:
            if isinstance(x, bool) or not isinstance(x, (str, int)):
                raise TypeError(f"bad leaf item {x!r}")
            counts[x] = counts.get(x, 0) + 1
        for x, n in counts.items():
            if isinstance(x, int) and n != 2:
                raise LoopValidityError(f"loop end {x} occurs {n} times")
            if isinstance(x, str) and n != 1:
                raise ValueError(f"duplicate free label {x!r}")

    @property
    def is_empty(self) -> bool:
        return self.tree is None

    @property
    def slots(self) -> list:
        return [] if self.tree is None else leaves(self.tree)

    @property
    def free_labels(self) -> list[str]:
        return [x for x in self.slots if isinstance(x, str)]

    @property
    def n_leaves(self) -> int:
        return len(self.slots)

    @property
    def n_loops(self) -> int:
        return sum(1 for x in self.slots if isinstance(x, int)) // 2

    @property
    def degree(self) -> int:
        return 0 if self.tree is None else degree(self.tree)

    @property
    def is_balanced(self) -> bool:
        return balanced(self.slots)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return pairs_of(self.slots)

    def __str__(self) -> str:
        return render_graph(self)

    def __repr__(self) -> str:
        return f"TaggedGraph({render_graph(self)!r})"

    def __lt__(self, other: "TaggedGraph") -> bool:
        return render_graph(self) < render_graph(other)


EMPTY = TaggedGraph(None)


def leaf(label) -> TaggedGraph:
    return TaggedGraph(str(label))


# ---------------------------------------------------------------- text form


def render_graph(g: TaggedGraph) -> str:
    if g.tree is None:
        return EMPTY_TEXT
    pos = itertools.count(1)

    def go(t):
        if isinstance(t, tuple):
            return f"<{go(t[0])} {go(t[1])}>"
        p = next(pos)
        return t if isinstance(t, str) else str(p)

    body = go(g.tree)
    ps = g.pairs
    if ps:
        body += " | " + ", ".join(f"{a + 1}~{b + 1}" for a, b in ps)
    return body


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "<>|~,":
            toks.append((c, c, i))
            i += 1
        else:
            m = _IDENT.match(text, i)
            if not m:
                raise GraphSyntaxError(f"unexpected character {c!r}", i)
            toks.append(("id", m.group(), i))
            i = m.end()
    return toks


def parse_graph(text: str) -> TaggedGraph:
    toks = _tokenize(text)
    if len(toks) == 1 and toks[0][1] == EMPTY_TEXT:
        return EMPTY
    pos = 0
    end = len(text)

    def peek():
        return toks[pos] if pos < len(toks) else ("eof", "", end)

    def take(kind):
        nonlocal pos
        tok = peek()
        if tok[0] != kind:
            raise GraphSyntaxError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        pos += 1
        return tok

    def node():
        tok = peek()
        if tok[0] == "<":
            take("<")
            left = node()
            if peek()[0] == ">":  # "<1>" is accepted as the single leaf 1
                take(">")
                return left
            right = node()
            take(">")
            return (left, right)
        return take("id")[1]

    tree = node()
    items = leaves(tree)
    loops: list[tuple[int, int, int]] = []
    if peek()[0] == "|":
        take("|")
        while True:
            a_tok = take("id")
            take("~")
            b_tok = take("id")
            for t in (a_tok, b_tok):
                if not t[1].isdigit():
                    raise GraphSyntaxError("loop positions must be integers", t[2])
            loops.append((int(a_tok[1]), int(b_tok[1]), a_tok[2]))
            if peek()[0] != ",":
                break
            take(",")
    if peek()[0] != "eof":
        raise GraphSyntaxError(f"trailing input {peek()[1]!r}", peek()[2])
    items = list(items)
    used: set[int] = set()
    for k, (a, b, where) in enumerate(loops):
        for p in (a, b):
            if not 1 <= p <= len(items):
                raise GraphSyntaxError(f"loop position {p} out of range", where)
            if p in used:
                raise LoopValidityError(f"slot {p} is in two loops")
            used.add(p)
        if a == b:
            raise LoopValidityError(f"loop {a}~{b} joins a slot to itself")
        items[a - 1] = k
        items[b - 1] = k
    if not balanced(items):
        raise LoopValidityError("loop pairing is not realizable by nearest-neighbour contractions")
    if EMPTY_TEXT in items and len(items) == 1:
        raise ValueError("a lone leaf labelled '0' is indistinguishable from the empty graph")
    return TaggedGraph(fill(shape_of(tree), items))


# ---------------------------------------------------------------- constructions


def _shift_ids(t: Tree, by: int) -> Tree:
    return map_leaves(t, lambda x: x + by if isinstance(x, int) else x)


def _max_id(t: Tree) -> int:
    ids = [x for x in leaves(t) if isinstance(x, int)]
    return max(ids) + 1 if ids else 0


def join_trees(t1: Tree, t2: Tree) -> Tree:
    """Graft two raw trees, keeping their loop ids apart."""
    return (t1, _shift_ids(t2, _max_id(t1)))


def graft(t1: TaggedGraph, t2: TaggedGraph) -> TaggedGraph:
    if t1.is_empty or t2.is_empty:
        raise ValueError("cannot graft the empty graph")
    return TaggedGraph(join_trees(t1.tree, t2.tree))


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def shapes(n_leaves: int) -> tuple:
    """All planar binary tree shapes with ``n_leaves`` leaves, in a fixed order."""
    if n_leaves == 1:
        return (None,)
    out = []
    for a in range(1, n_leaves):
        for left in shapes(a):
            for right in shapes(n_leaves - a):
                out.append((left, right))
    return tuple(out)


def canonical_labels(n: int) -> list[str]:
    return [str(i) for i in range(1, n + 1)]


def marked_labels(k: int) -> list[str]:
    """Leaf labels of recursion graphs: marked point ``p{i}`` sits on variable ``z{i}``."""
    return [f"p{i}" for i in range(1, k + 1)]


def labelled(shape: Tree, labels: Sequence[str] | None = None) -> TaggedGraph:
    n = len(leaves(shape))
    return TaggedGraph(fill(shape, labels if labels is not None else canonical_labels(n)))


def contract(g: TaggedGraph, pos: int) -> TaggedGraph:
    """Join the free leaves at free positions ``pos`` and ``pos + 1`` (1-based) into a loop."""
    items = g.slots
    free_at = [i for i, x in enumerate(items) if isinstance(x, str)]
    if len(free_at) < 2:
        raise ValueError("contraction needs at least two free leaves")
    if not 1 <= pos < len(free_at):
        raise IndexError(f"free position {pos} out of range 1..{len(free_at) - 1}")
    a, b = free_at[pos - 1], free_at[pos]
    labels = [items[i] for i in free_at]
    new_id = max([x for x in items if isinstance(x, int)], default=-1) + 1
    items = list(items)
    items[a] = items[b] = new_id
    if labels == canonical_labels(len(labels)):
        rest = iter(canonical_labels(len(labels) - 2))
        items = [next(rest) if isinstance(x, str) else x for x in items]
    return TaggedGraph(fill(shape_of(g.tree), items))


def contraction_patterns(n_slots: int) -> list[tuple[tuple[int, int], ...]]:
    """All loop pairings on ``n_slots`` slots reachable by successive nearest-neighbour contractions."""
    out = []

    def go(i, open_stack, acc):
        # balanced pairings: a pair encloses only nested pairs, free slots sit outside all pairs
        if i == n_slots:
            if not open_stack:
                out.append(tuple(sorted(acc)))
            return
        if not open_stack:
            go(i + 1, open_stack, acc)  # free slot
        go(i + 1, open_stack + [i], acc)  # open a loop
        if open_stack:
            go(i + 1, open_stack[:-1], acc + [(open_stack[-1], i)])

    go(0, [], [])
    return out


def adjacent_patterns(n_slots: int, n_loops: int) -> list[tuple[tuple[int, int], ...]]:
    """Sets of ``n_loops`` disjoint pairs of originally adjacent slots."""
    out = []
    for starts in itertools.combinations(range(n_slots - 1), n_loops):
        if all(b - a >= 2 for a, b in zip(starts, starts[1:])):
            out.append(tuple((s, s + 1) for s in starts))
    return out


def apply_pattern(shape: Tree, pattern: Iterable[tuple[int, int]], labels: Sequence[str] | None = None) -> TaggedGraph:
    n = len(leaves(shape))
    items: list = [None] * n
    for k, (a, b) in enumerate(pattern):
        items[a] = items[b] = k
    free = [i for i in range(n) if items[i] is None]
    labs = labels if labels is not None else canonical_labels(len(free))
    for i, lab in zip(free, labs):
        items[i] = lab
    return TaggedGraph(fill(shape, items))


# ---------------------------------------------------------------- permutations


def tree_from_permutation(p: Sequence[int]) -> TaggedGraph:
    """Bracket tree of a permutation: gap ``j`` between leaves ``j`` and ``j+1`` closes at step ``p[j]``."""
    n = len(p)
    if n == 0 or sorted(p) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}: {p}")
    blocks: list[Tree] = [str(i) for i in range(1, n + 2)]
    gaps = list(range(n))  # gaps[i] = original index of the gap between blocks i and i+1
    for value in range(1, n + 1):
        gap = p.index(value)
        i = gaps.index(gap)
        blocks[i:i + 2] = [(blocks[i], blocks[i + 1])]
        del gaps[i]
    return TaggedGraph(blocks[0])


def permutation_fiber(t: TaggedGraph) -> list[tuple[int, ...]]:
    if t.is_empty or t.n_loops or t.degree == 0:
        raise ValueError("fibers are defined for loop-free trees with at least one vertex")
    n = t.degree
    check_work(math.factorial(n), "permutation fiber")
    target = shape_of(t.tree)
    return [p for p in itertools.permutations(range(1, n + 1))
            if shape_of(tree_from_permutation(p).tree) == target]


# ---------------------------------------------------------------- restriction


def restrict_tree(t: Tree, keep) -> Tree | None:
    """Subtree spanned by the leaves satisfying ``keep``, with unary vertices smoothed."""
    if is_leaf(t):
        return t if keep(t) else None
    left = restrict_tree(t[0], keep)
    right = restrict_tree(t[1], keep)
    if left is None:
        return right
    if right is None:
        return left
    return (left, right)


def induced_subgraph(g: TaggedGraph, labels: Iterable[str]) -> TaggedGraph:
    if g.n_loops:
        raise ValueError("induced_subgraph expects a loop-free graph")
    labels = set(labels)
    unknown = labels - set(g.free_labels)
    if unknown:
        raise KeyError(f"unknown labels {sorted(unknown)}")
    if g.is_empty or not labels:
        return EMPTY
    return TaggedGraph(restrict_tree(g.tree, lambda x: x in labels))


# ---------------------------------------------------------------- mirrors


def vertex_count(t: Tree) -> int:
    return degree(t)


def mirror(t: Tree, flips: Sequence[bool]) -> Tree:
    """Swap children at the vertices (preorder index) whose flag is set."""
    it = iter(flips)

    def go(s):
        if is_leaf(s):
            return s
        f = next(it)
        left, right = go(s[0]), go(s[1])
        return (right, left) if f else (left, right)

    return go(t)


def mirror_images(t: Tree) -> Iterator[Tree]:
    for flips in itertools.product((False, True), repeat=degree(t)):
        yield mirror(t, flips)


# ---------------------------------------------------------------- families


@dataclass(frozen=True)
class GraphFamilyId:
    """``kind`` is one of Y, X, Xbar, Xg, EO.

    Y(n): loop-free trees with n vertices.  X(n): loop-free trees with n leaves
    (X(0) holds the empty graph).  Xbar(n): X(n) with every realizable loop
    pattern.  Xg(k, g): 2g+k leaves, g loops on disjoint pairs of originally
    adjacent leaves, k free leaves.  EO(k, g): the recursion graphs of the
    genus-g correlator with k marked leaves, see :func:`eo_family`.
    """

    kind: str
    n: int = 0
    g: int = 0

    def __post_init__(self):
        if self.kind not in {"Y", "X", "Xbar", "Xg", "EO"}:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.n < 0 or self.g < 0:
            raise ValueError("family parameters must be non-negative")

    def __str__(self) -> str:
        if self.kind in ("Xg", "EO"):
            return f"{self.kind}({self.n},{self.g})"
        return f"{self.kind}({self.n})"


def enumerate_family(fid: GraphFamilyId) -> list[TaggedGraph]:
    kind, n, g = fid.kind, fid.n, fid.g
    if kind == "Y":
        check_work(catalan(n), str(fid))
        out = [labelled(s) for s in shapes(n + 1)]
    elif kind == "X":
        if n == 0:
            return [EMPTY]
        check_work(catalan(n - 1), str(fid))
        out = [labelled(s) for s in shapes(n)]
    elif kind == "Xbar":
        if n == 0:
            return [EMPTY]
        pats = contraction_patterns(n)
        check_work(catalan(n - 1) * len(pats), str(fid))
        out = [apply_pattern(s, p) for s in shapes(n) for p in pats]
    elif kind == "Xg":
        slots = 2 * g + n
        if slots == 0:
            return [EMPTY]
        pats = adjacent_patterns(slots, g)
        check_work(catalan(slots - 1) * len(pats), str(fid))
        out = [apply_pattern(s, p) for s in shapes(slots) for p in pats]
    else:
        return [G for G, _ in eo_family(n, g)]
    return sorted(set(out), key=render_graph)


# ---------------------------------------------------------------- recursion graphs


def recursion_graphs(k: int, g: int, labels: Sequence[str] | None = None) -> list[Tree]:
    """One raw tree per term of the genus-g recursion with ``k`` marked leaves.

    At every vertex the left slot carries the point ``q`` and the right slot its
    conjugate.  A leaf item is either a label (a propagator to that marked
    point) or an int loop id; the handle term puts a fresh loop end on the
    right slot and feeds its partner into the left subgraph.
    """
    labels = list(labels) if labels is not None else marked_labels(k)
    if len(labels) != k:
        raise ValueError("label count does not match k")
    counter = itertools.count()

    def terms(genus: int, items: tuple) -> list[Tree]:
        n = len(items)
        if genus < 0 or (genus == 0 and n == 0):
            return []
        if genus == 0 and n == 1:
            return [items[0]]
        out: list[Tree] = []
        for m in range(genus + 1):
            for mask in range(1 << n):
                inside = tuple(items[i] for i in range(n) if mask >> i & 1)
                outside = tuple(items[i] for i in range(n) if not mask >> i & 1)
                if (m, len(inside)) in ((genus, n), (0, 0)):
                    continue
                lefts = terms(m, inside)
                if not lefts:
                    continue
                rights = terms(genus - m, outside)
                out.extend((a, b) for a in lefts for b in rights)
        if genus >= 1:
            lid = next(counter)
            out.extend((a, lid) for a in terms(genus - 1, (lid,) + items))
        return out

    check_work(recursion_count(k, g), f"recursion graphs ({k},{g})")
    return terms(g, tuple(labels))


@lru_cache(maxsize=None)
def recursion_count(k: int, g: int) -> int:
    """Number of recursion terms (graphs) of the genus-g correlator with k marked leaves."""
    if g < 0 or (g == 0 and k == 0):
        return 0
    if g == 0 and k == 1:
        return 1
    total = 0
    for m in range(g + 1):
        for i in range(k + 1):
            if (i, m) in ((k, g), (0, 0)):
                continue  # partner factor is W(0, 0) = 0
            total += math.comb(k, i) * recursion_count(i, m) * recursion_count(k - i, g - m)
    return total + recursion_count(k + 1, g - 1)


def orbit_key(t: Tree) -> str:
    """Canonical text of the mirror orbit of a raw tree (loops need not be balanced)."""
    return min(render_graph(TaggedGraph(m)) for m in mirror_images(t))


@dataclass(frozen=True)
class EOClass:
    key: str
    multiplicity: int           # number of recursion terms in the orbit
    representatives: tuple      # balanced tagged graphs in the orbit
    fallback: TaggedGraph       # canonical member, used when no balanced one exists


@lru_cache(maxsize=None)
def eo_classes(k: int, g: int) -> tuple[EOClass, ...]:
    if k + 2 * g < 2 or (g == 0 and k < 1):
        return ()
    groups: dict[str, int] = {}
    sample: dict[str, Tree] = {}
    for t in recursion_graphs(k, g):
        key = orbit_key(t)
        groups[key] = groups.get(key, 0) + 1
        sample.setdefault(key, t)
    out = []
    for key in sorted(groups):
        images = {TaggedGraph(m) for m in mirror_images(sample[key])}
        reps = tuple(sorted((G for G in images if G.is_balanced), key=render_graph))
        fallback = min(images, key=render_graph)
        out.append(EOClass(key, groups[key], reps, fallback))
    return tuple(out)


def eo_family(k: int, g: int) -> list[tuple[TaggedGraph, "Fraction"]]:
    """Balanced tagged graphs of the recursion, each with its symmetry weight.

    A mirror orbit holding ``m`` recursion terms and ``r`` balanced members
    contributes each member with weight ``m / r``; orbits without a balanced
    member fall back to one canonical (unbalanced) member with weight ``m``.
    """
    out = []
    for c in eo_classes(k, g):
        if c.representatives:
            w = Fraction(c.multiplicity, len(c.representatives))
            out.extend((G, w) for G in c.representatives)
        else:
            out.append((c.fallback, Fraction(c.multiplicity)))
    return out
