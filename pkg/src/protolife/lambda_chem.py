"""Lambda-term molecules and the oriented rewrite rules of the lambda chemistry.

Terms follow the grammar::

    term := var | "λ" var "." term | "(" term ")" term

so ``(M)N`` is application and ``λx.M`` is abstraction.  Reduction uses the
local rewrite rules below::

    identity    (λx.x)Q        -> Q
    discard     (λx.E)Q        -> E                    if x not free in E
    descend     (λx.λy.E)Q     -> λy.(λx.E)Q           if y not free in Q
    distribute  (λx.(E1)E2)Q   -> ((λx.E1)Q)(λx.E2)Q
    rename      (λx.λy.E)Q     -> (λx.λz.(λy.E)z)Q     z fresh

``rename`` only fires when ``descend`` is blocked by a name clash.

The strategy is leftmost-innermost: the rules move a substitution through a
term one node at a time, and contracting the outermost redex first would let
a new substitution overtake an unfinished one, so even
``((λx.λy.(x)y)λu.u)λv.v`` would never reach its normal form.

All traversals are iterative; terms produced by ``distribute`` can get deep.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError

IDENT = re.compile(r"[a-z][a-z0-9]*")
LAMBDA_CHARS = ("λ", "\\")


class Term:
    """Base class for lambda terms.

    Every node caches derived data (``size``, ``fv``, ``redex``) so that
    finding the next redex costs only the depth of the path.
    """

    __slots__ = ("size", "fv", "redex", "_text", "_key")

    def __str__(self):
        if self._text is None:
            self._text = _render(self, canonical=False)
        return self._text

    def __repr__(self):
        return f"{type(self).__name__}<{self}>"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return self.size == other.size and str(self) == str(other)

    def __hash__(self):
        return hash(str(self))

    @property
    def key(self) -> str:
        """Alpha-canonical printed form; equal for alpha-equivalent terms."""
        if self._key is None:
            self._key = _render(self, canonical=True)
        return self._key


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self.size = 1
        self.fv = frozenset((name,))
        self.redex = False
        self._text = None
        self._key = None


class Lam(Term):
    __slots__ = ("var", "body")

    def __init__(self, var: str, body: Term):
        self.var = var
        self.body = body
        self.size = body.size + 1
        self.fv = body.fv - {var} if var in body.fv else body.fv
        self.redex = body.redex
        self._text = None
        self._key = None


class App(Term):
    __slots__ = ("fn", "arg")

    def __init__(self, fn: Term, arg: Term):
        self.fn = fn
        self.arg = arg
        self.size = fn.size + arg.size + 1
        self.fv = fn.fv | arg.fv
        self.redex = isinstance(fn, Lam) or fn.redex or arg.redex
        self._text = None
        self._key = None


def _render(term: Term, canonical: bool) -> str:
    out = []
    scope: dict[str, list[str]] = {}
    taken = term.fv
    counter = 0
    stack: list = [term]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
        elif isinstance(item, tuple):
            scope[item[1]].pop()
        elif isinstance(item, Var):
            names = scope.get(item.name)
            out.append(names[-1] if names else item.name)
        elif isinstance(item, Lam):
            if canonical:
                name = f"x{counter}"
                counter += 1
                while name in taken:
                    name = f"x{counter}"
                    counter += 1
            else:
                name = item.var
            scope.setdefault(item.var, []).append(name)
            out.append(f"λ{name}.")
            stack.append(("exit", item.var))
            stack.append(item.body)
        else:
            out.append("(")
            stack.append(item.arg)
            stack.append(")")
            stack.append(item.fn)
    return "".join(out)


def alpha_equal(a: Term, b: Term) -> bool:
    return a.key == b.key


def depth(term: Term) -> int:
    best = 0
    stack = [(term, 0)]
    while stack:
        t, d = stack.pop()
        best = max(best, d)
        if isinstance(t, Lam):
            stack.append((t.body, d + 1))
        elif isinstance(t, App):
            stack.append((t.fn, d + 1))
            stack.append((t.arg, d + 1))
    return best


def all_names(term: Term) -> set[str]:
    """Every identifier occurring in ``term``, bound or free."""
    names = set()
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            names.add(t.name)
        elif isinstance(t, Lam):
            names.add(t.var)
            stack.append(t.body)
        else:
            stack.append(t.fn)
            stack.append(t.arg)
    return names


# -- parsing -----------------------------------------------------------------


class LambdaSyntaxError(SyntaxError):
    """Malformed term text; ``offset`` is the character position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


def parse(text: str) -> Term:
    """Parse a term.  ``\\`` is accepted for ``λ`` and whitespace is ignored."""
    pos = 0
    n = len(text)

    def skip(p):
        while p < n and text[p].isspace():
            p += 1
        return p

    def ident(p):
        m = IDENT.match(text, p)
        if m is None:
            raise LambdaSyntaxError("expected identifier", p)
        return m.group(), m.end()

    # frames: ("lam", var) | ("fn",) | ("arg", fn_term)
    stack: list[tuple] = []
    while True:
        pos = skip(pos)
        if pos >= n:
            raise LambdaSyntaxError("unexpected end of input", pos)
        ch = text[pos]
        if ch in LAMBDA_CHARS:
            pos = skip(pos + 1)
            var, pos = ident(pos)
            pos = skip(pos)
            if pos >= n or text[pos] != ".":
                raise LambdaSyntaxError("expected '.'", pos)
            stack.append(("lam", var))
            pos += 1
            continue
        if ch == "(":
            stack.append(("fn",))
            pos += 1
            continue
        name, pos = ident(pos)
        term: Term = Var(name)
        while stack:
            frame = stack.pop()
            if frame[0] == "lam":
                term = Lam(frame[1], term)
            elif frame[0] == "arg":
                term = App(frame[1], term)
            else:
                pos = skip(pos)
                if pos >= n or text[pos] != ")":
                    raise LambdaSyntaxError("expected ')'", pos)
                pos += 1
                stack.append(("arg", term))
                break
        else:
            pos = skip(pos)
            if pos != n:
                raise LambdaSyntaxError("trailing input", pos)
            return term


def free_vars(term: Term) -> frozenset[str]:
    return term.fv


# -- rewriting ---------------------------------------------------------------


def fresh_name(term: Term, prefix: str = "v") -> str:
    used = all_names(term)
    i = 0
    while f"{prefix}{i}" in used:
        i += 1
    return f"{prefix}{i}"


def contract(redex: App, whole: Term) -> Term:
    """Apply the first matching rule to the redex ``(λx.E)Q``.

    When ``descend`` is blocked by a name clash, ``rename`` renames the
    inner abstraction instead, with a name that does not occur in ``whole``.
    """
    lam = redex.fn
    x, body, q = lam.var, lam.body, redex.arg
    if isinstance(body, Var) and body.name == x:
        return q
    if x not in body.fv:
        return body
    if isinstance(body, Lam):
        # x is free in λy.E here, so x != y and x is free in E
        y, inner = body.var, body.body
        if y not in q.fv:
            return Lam(y, App(Lam(x, inner), q))
        z = fresh_name(whole)
        return App(Lam(x, Lam(z, App(body, Var(z)))), q)
    # body is an application with x free
    return App(App(Lam(x, body.fn), q), App(Lam(x, body.arg), q))


def rewrite_step(term: Term) -> Optional[Term]:
    """One leftmost-innermost rewrite, or None if ``term`` is in normal form."""
    if not term.redex:
        return None
    path = []
    node = term
    while True:
        if isinstance(node, App):
            if node.fn.redex:
                path.append((node, "fn"))
                node = node.fn
            elif node.arg.redex:
                path.append((node, "arg"))
                node = node.arg
            else:
                break
        else:
            path.append((node, "body"))
            node = node.body
    new = contract(node, term)
    for parent, side in reversed(path):
        if side == "fn":
            new = App(new, parent.arg)
        elif side == "arg":
            new = App(parent.fn, new)
        else:
            new = Lam(parent.var, new)
    return new


@dataclass(frozen=True)
class ReductionBudget:
    max_steps: int = 10_000
    max_nodes: int = 100_000

    def __post_init__(self):
        if self.max_steps < 1 or self.max_nodes < 1:
            raise ConfigError("reduction budget limits must be positive")


@dataclass(frozen=True)
class ReductionResult:
    term: Term
    steps_used: int
    exhausted: bool


def normal_form(term: Term, budget: ReductionBudget = ReductionBudget()) -> ReductionResult:
    steps = 0
    while True:
        if term.size > budget.max_nodes:
            return ReductionResult(term, steps, True)
        if not term.redex:
            return ReductionResult(term, steps, False)
        if steps == budget.max_steps:
            return ReductionResult(term, steps, True)
        term = rewrite_step(term)
        steps += 1


# -- collisions --------------------------------------------------------------

DEFAULT_PHI = "λx.λy.(x)y"


@dataclass(frozen=True)
class CollisionLaw:
    """How two molecules react: ``A + B -> A + B + nf(((phi)A)B)``."""

    phi: Term = field(default_factory=lambda: parse(DEFAULT_PHI))
    budget: ReductionBudget = ReductionBudget()

    def __post_init__(self):
        if not isinstance(self.phi, Lam):
            raise ConfigError("collision law phi must be an abstraction")


def operator_filter(a: Term, b: Term, law: CollisionLaw) -> bool:
    # an operator that does not start with λ is discarded before collision
    return isinstance(law.phi, Lam) and isinstance(a, Lam)


def product_filter(product: Term, law: CollisionLaw) -> bool:
    return not isinstance(product, Var) and product.size <= law.budget.max_nodes


def collide(a: Term, b: Term, law: CollisionLaw) -> Optional[Term]:
    """Product of an ``a``-on-``b`` collision, or None for an elastic one."""
    if not operator_filter(a, b, law):
        return None
    res = normal_form(App(App(law.phi, a), b), law.budget)
    if res.exhausted or not product_filter(res.term, law):
        return None
    return res.term


# -- random terms ------------------------------------------------------------


@dataclass(frozen=True)
class RandomTermParams:
    max_depth: int = 6
    var_pool_size: int = 3
    p_var: float = 0.3
    p_abs: float = 0.4
    p_app: float = 0.3
    closed: bool = False

    def __post_init__(self):
        total = self.p_var + self.p_abs + self.p_app
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"p_var + p_abs + p_app must be 1, got {total!r}")
        if min(self.p_var, self.p_abs, self.p_app) < 0:
            raise ConfigError("term probabilities must be non-negative")
        if self.max_depth < 0 or self.var_pool_size < 1:
            raise ConfigError("max_depth must be >= 0 and var_pool_size >= 1")


def var_pool(size: int) -> list[str]:
    if size <= 26:
        return [chr(ord("a") + i) for i in range(size)]
    return [f"x{i}" for i in range(size)]


def random_term(rng: np.random.Generator, params: RandomTermParams) -> Term:
    """Random term of depth at most ``max_depth``.

    With ``closed=True`` the remaining free variables are bound by extra
    outer abstractions, which may add up to ``var_pool_size`` to the depth.
    """
    pool = var_pool(params.var_pool_size)
    probs = np.array([params.p_var, params.p_abs, params.p_app])
    cdf = np.cumsum(probs)

    def gen(d):
        if d >= params.max_depth:
            kind = 0
        else:
            kind = min(int(np.searchsorted(cdf, rng.random(), side="right")), 2)
        if kind == 0:
            return Var(pool[rng.integers(len(pool))])
        if kind == 1:
            return Lam(pool[rng.integers(len(pool))], gen(d + 1))
        fn = gen(d + 1)
        return App(fn, gen(d + 1))

    term = gen(0)
    if params.closed:
        for name in sorted(term.fv, reverse=True):
            term = Lam(name, term)
    return term
