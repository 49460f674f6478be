# src/sosw/terms.py

"""
Signatures, open terms, substitutions and the liquid/frozen occurrence
calculus.

Provides:
  - Var / App: immutable terms (Term is their union).
  - Signature: function symbols with fixed arities.
  - ArgumentMarking: a named set of liquid argument positions (f, i).
  - occurrence_liquidity / is_univariate / apply / fresh_variables:
    the term-level operations every format condition builds on.
  - match / unify / resolve: first-order matching and unification
    (unification knows rigid variables that may not be bound).
  - closed_terms: bounded enumeration of closed terms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import (
    AbstractSet,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from .errors import ArityError


# ============================================================
# Terms
# ============================================================

# Binary symbols written infix; higher binds tighter, all left-associative.
INFIX_PRECEDENCE = {"+": 1, ".": 2, "*": 3}

Path = Tuple[int, ...]


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    symbol: str
    args: Tuple["Term", ...] = ()

    def __str__(self) -> str:
        return render_term(self)


Term = Union[Var, App]
Substitution = Mapping[str, Term]


def const(name: str) -> App:
    return App(name, ())


def _is_infix(t: Term) -> bool:
    return isinstance(t, App) and t.symbol in INFIX_PRECEDENCE and len(t.args) == 2


def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.symbol
    if _is_infix(t):
        prec = INFIX_PRECEDENCE[t.symbol]
        left, right = t.args
        ltxt = render_term(left)
        rtxt = render_term(right)
        if _is_infix(left) and INFIX_PRECEDENCE[left.symbol] < prec:
            ltxt = f"({ltxt})"
        if _is_infix(right) and INFIX_PRECEDENCE[right.symbol] <= prec:
            rtxt = f"({rtxt})"
        return f"{ltxt} {t.symbol} {rtxt}"
    return f"{t.symbol}({', '.join(render_term(a) for a in t.args)})"


def term_key(t: Term) -> Tuple[int, str]:
    """Sort key: by size, then printed form."""
    return (size(t), render_term(t))


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


def is_closed(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(is_closed(a) for a in t.args)


def var_occurrences(t: Term, path: Path = ()) -> Iterator[Tuple[str, Path]]:
    """Every variable occurrence with its path, in left-to-right order."""
    if isinstance(t, Var):
        yield t.name, path
        return
    for i, a in enumerate(t.args, start=1):
        yield from var_occurrences(a, path + (i,))


def variables(t: Term) -> FrozenSet[str]:
    return frozenset(name for name, _ in var_occurrences(t))


def ordered_variables(t: Term) -> List[str]:
    seen: Dict[str, None] = {}
    for name, _ in var_occurrences(t):
        seen.setdefault(name, None)
    return list(seen)


def subterm(t: Term, path: Path) -> Term:
    for i in path:
        assert isinstance(t, App)
        t = t.args[i - 1]
    return t


def replace_at(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    assert isinstance(t, App)
    i = path[0]
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], path[1:], new)
    return App(t.symbol, tuple(args))


# ============================================================
# Signature + markings
# ============================================================

@dataclass(frozen=True)
class Signature:
    symbols: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        names = [n for n, _ in self.symbols]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise ArityError(f"Symbol declared twice: {', '.join(dupes)}", dupes[0])
        for name, ar in self.symbols:
            if ar < 0:
                raise ArityError(f"Negative arity for {name}", name)
        object.__setattr__(self, "symbols", tuple(sorted(self.symbols)))

    @classmethod
    def of(cls, pairs: Iterable[Tuple[str, int]]) -> "Signature":
        return cls(tuple(pairs))

    @cached_property
    def _arities(self) -> Dict[str, int]:
        return dict(self.symbols)

    def arity(self, name: str) -> Optional[int]:
        return self._arities.get(name)

    def __contains__(self, name: object) -> bool:
        return name in self._arities

    def constants(self) -> List[str]:
        return [n for n, ar in self.symbols if ar == 0]

    def functions(self) -> List[Tuple[str, int]]:
        return [(n, ar) for n, ar in self.symbols if ar > 0]

    def check(self, t: Term) -> None:
        if isinstance(t, Var):
            return
        ar = self.arity(t.symbol)
        if ar is None:
            raise ArityError(f"Undeclared symbol '{t.symbol}'", t.symbol)
        if ar != len(t.args):
            raise ArityError(
                f"Symbol '{t.symbol}' has arity {ar} but got {len(t.args)} argument(s)",
                t.symbol,
            )
        for a in t.args:
            self.check(a)

    def generic(self, name: str, avoid: AbstractSet[str] = frozenset()) -> App:
        """f(x1, ..., xn) with fresh, pairwise distinct variables."""
        ar = self.arity(name)
        if ar is None:
            raise ArityError(f"Undeclared symbol '{name}'", name)
        names = fresh_variables(avoid, ar, prefix="x")
        return App(name, tuple(Var(n) for n in names))


@dataclass(frozen=True)
class ArgumentMarking:
    name: str
    liquid: FrozenSet[Tuple[str, int]] = field(default_factory=frozenset)

    def is_liquid(self, symbol: str, index: int) -> bool:
        return (symbol, index) in self.liquid

    def intersect(self, other: "ArgumentMarking", name: Optional[str] = None) -> "ArgumentMarking":
        return ArgumentMarking(name or f"{self.name}&{other.name}", self.liquid & other.liquid)

    def validate(self, signature: Signature) -> None:
        for symbol, index in sorted(self.liquid):
            ar = signature.arity(symbol)
            if ar is None:
                raise ArityError(f"Marking {self.name} names undeclared symbol '{symbol}'", symbol)
            if not 1 <= index <= ar:
                raise ArityError(
                    f"Marking {self.name}: argument {index} out of range for {symbol}/{ar}",
                    symbol,
                )

    def __str__(self) -> str:
        body = " ".join(f"{f}/{i}" for f, i in sorted(self.liquid))
        return f"{self.name}: {body}"


def universal_marking(signature: Signature, name: str = "universal") -> ArgumentMarking:
    return ArgumentMarking(
        name, frozenset((f, i) for f, ar in signature.symbols for i in range(1, ar + 1))
    )


EMPTY_MARKING = ArgumentMarking("empty")


# ============================================================
# Occurrence calculus
# ============================================================

def path_is_liquid(t: Term, path: Path, marking: ArgumentMarking) -> bool:
    """True iff every frame on the way down `path` is a liquid argument."""
    node = t
    for i in path:
        assert isinstance(node, App)
        if not marking.is_liquid(node.symbol, i):
            return False
        node = node.args[i - 1]
    return True


def occurrence_liquidity(t: Term, x: str, marking: ArgumentMarking) -> List[Tuple[Path, bool]]:
    return [
        (path, path_is_liquid(t, path, marking))
        for name, path in var_occurrences(t)
        if name == x
    ]


def liquid_occurrences(t: Term, x: str, marking: ArgumentMarking) -> int:
    return sum(1 for _, liquid in occurrence_liquidity(t, x, marking) if liquid)


def frozen_occurrences(t: Term, x: str, marking: ArgumentMarking) -> int:
    return sum(1 for _, liquid in occurrence_liquidity(t, x, marking) if not liquid)


def is_univariate(t: Term) -> bool:
    names = [name for name, _ in var_occurrences(t)]
    return len(names) == len(set(names))


# ============================================================
# Substitutions
# ============================================================

def apply(sigma: Substitution, t: Term) -> Term:
    """Simultaneous substitution; unmapped variables stay."""
    if not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return App(t.symbol, tuple(apply(sigma, a) for a in t.args))


def compose(sigma: Substitution, rho: Substitution) -> Dict[str, Term]:
    """sigma after rho: apply(compose(s, r), t) == apply(s, apply(r, t))."""
    out = {x: apply(sigma, u) for x, u in rho.items()}
    for x, u in sigma.items():
        out.setdefault(x, u)
    return out


def fresh_variables(avoid: AbstractSet[str], count: int, prefix: str = "z") -> List[str]:
    out: List[str] = []
    for n in itertools.count():
        if len(out) == count:
            break
        cand = f"{prefix}{n}"
        if cand not in avoid:
            out.append(cand)
    return out


def fresh_variable(avoid: AbstractSet[str], prefix: str = "z") -> str:
    return fresh_variables(avoid, 1, prefix)[0]


def renaming(names: Sequence[str], avoid: AbstractSet[str], prefix: str = "v") -> Dict[str, Term]:
    """Map each name to a fresh variable outside `avoid`."""
    fresh = fresh_variables(set(avoid) | set(names), len(names), prefix)
    return {old: Var(new) for old, new in zip(names, fresh)}


# ============================================================
# Matching + unification
# ============================================================

def match(pattern: Term, t: Term, subst: Optional[Dict[str, Term]] = None) -> Optional[Dict[str, Term]]:
    """One-way matching: find sigma with apply(sigma, pattern) == t."""
    out = dict(subst or {})
    stack = [(pattern, t)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = out.get(p.name)
            if bound is None:
                out[p.name] = s
            elif bound != s:
                return None
            continue
        if not isinstance(s, App) or s.symbol != p.symbol or len(s.args) != len(p.args):
            return None
        stack.extend(zip(p.args, s.args))
    return out


def walk(t: Term, subst: Mapping[str, Term]) -> Term:
    while isinstance(t, Var) and t.name in subst:
        t = subst[t.name]
    return t


def _occurs(name: str, t: Term, subst: Mapping[str, Term]) -> bool:
    t = walk(t, subst)
    if isinstance(t, Var):
        return t.name == name
    return any(_occurs(name, a, subst) for a in t.args)


def unify(
    a: Term,
    b: Term,
    subst: Optional[Mapping[str, Term]] = None,
    rigid: AbstractSet[str] = frozenset(),
) -> Optional[Dict[str, Term]]:
    """
    Most general unifier extending `subst` (triangular form), or None.
    Variables in `rigid` behave like constants.
    """
    out = dict(subst or {})
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = walk(x, out)
        y = walk(y, out)
        if x == y:
            continue
        if isinstance(x, Var) and x.name not in rigid:
            if _occurs(x.name, y, out):
                return None
            out[x.name] = y
            continue
        if isinstance(y, Var) and y.name not in rigid:
            if _occurs(y.name, x, out):
                return None
            out[y.name] = x
            continue
        if isinstance(x, App) and isinstance(y, App) and x.symbol == y.symbol and len(x.args) == len(y.args):
            stack.extend(zip(x.args, y.args))
            continue
        return None
    return out


def resolve(t: Term, subst: Mapping[str, Term]) -> Term:
    """Fully apply a triangular substitution."""
    t = walk(t, subst)
    if isinstance(t, Var) or not t.args:
        return t
    return App(t.symbol, tuple(resolve(a, subst) for a in t.args))


# ============================================================
# Closed-term enumeration
# ============================================================

def closed_terms(signature: Signature, max_depth: int) -> List[Term]:
    """All closed terms of depth <= max_depth, smallest first."""
    levels: List[List[Term]] = [[const(n) for n in signature.constants()]]
    for _ in range(max_depth):
        known = [t for level in levels for t in level]
        fresh: List[Term] = []
        seen = set(known)
        for name, ar in signature.functions():
            for args in itertools.product(known, repeat=ar):
                t = App(name, tuple(args))
                if t not in seen:
                    seen.add(t)
                    fresh.append(t)
        levels.append(fresh)
    out = [t for level in levels for t in level]
    return sorted(out, key=term_key)


def open_terms(
    signature: Signature,
    max_depth: int,
    univariate: bool = True,
    max_variables: int = 4,
    prefix: str = "x",
    with_constants: bool = True,
) -> List[Term]:
    """
    Terms with variables as leaves (constants included) up to max_depth,
    with variables numbered left to right. With univariate=True every
    variable occurs once; otherwise variables may repeat.
    """
    shapes: List[Term] = [Var("_")]
    if with_constants:
        shapes += [const(n) for n in signature.constants()]
    level = list(shapes)
    for _ in range(max_depth):
        grown: List[Term] = list(level)
        for name, ar in signature.functions():
            for args in itertools.product(level, repeat=ar):
                grown.append(App(name, tuple(args)))
        level = list(dict.fromkeys(grown))
    out: List[Term] = []
    seen = set()
    for shape in level:
        holes = sum(1 for n, _ in var_occurrences(shape) if n == "_")
        if holes > max_variables:
            continue
        if univariate:
            labellings = [tuple(range(holes))]
        else:
            labellings = [
                lab for lab in itertools.product(range(holes), repeat=holes)
                if all(lab[i] <= max(lab[:i], default=-1) + 1 for i in range(holes))
            ]
        for lab in labellings:
            counter = iter(lab)
            t = _fill_holes(shape, counter, prefix)
            if t not in seen:
                seen.add(t)
                out.append(t)
    return sorted(out, key=term_key)


def _fill_holes(t: Term, counter: Iterator[int], prefix: str) -> Term:
    if isinstance(t, Var):
        return Var(f"{prefix}{next(counter) + 1}")
    if not t.args:
        return t
    return App(t.symbol, tuple(_fill_holes(a, counter, prefix) for a in t.args))
