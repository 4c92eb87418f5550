"""Finite many-sorted models and evaluation.

Choice policies (all deterministic, driven by the per-sort total order,
which is the listing order of the model file):

  eps  x. F   least element satisfying F; the sort's least element if none.
  tau  x. F   least element falsifying F; the sort's least element if none.
  iota x. F   the unique satisfier when existence and uniqueness hold,
              otherwise the least element plus an undetermination flag.
  eta  x. F   least satisfier outside the environment's excluded set,
              falling back to the eps policy.

"most" is measure-based: measure(restriction-and-body) / measure(restriction)
compared against the threshold, strictly or weakly per majority mode.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import syntax as sx
from .syntax import (Atom, And, App, Binder, Const, Generic, GenericRestricted,
                     Implies, Not, Or, PredApp, Quant, Quant2, Signature, Var)


class EvalError(Exception):
    """Raised for hard evaluation failures (ill-sorted input, unknown symbol)."""


class EnumerationBound(Exception):
    """Raised when a model enumeration would exceed its combinatorial budget."""

    def __init__(self, estimate, budget):
        self.estimate = estimate
        self.budget = budget
        super().__init__("enumeration would produce about %d models (budget %d)"
                         % (estimate, budget))


def _is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


BUILTIN_PREDS = {
    "prime": lambda n: _is_prime(int(n)),
    "even": lambda n: int(n) % 2 == 0,
    "odd": lambda n: int(n) % 2 == 1,
}


@dataclass(frozen=True)
class Model:
    signature: Signature
    domains: dict                  # sort -> ordered list of elements
    preds: dict = field(default_factory=dict)      # name -> frozenset of tuples
    builtins: dict = field(default_factory=dict)   # name -> builtin name
    consts: dict = field(default_factory=dict)     # name -> element
    funcs: dict = field(default_factory=dict)      # name -> {arg tuple: element}
    measure: dict = field(default_factory=dict)    # sort -> ("count",)|("density", N)
    most_threshold: Fraction = Fraction(1, 2)
    many_threshold: Fraction = Fraction(2, 5)
    majority_mode: str = "strict"
    star_regime: str = "B"

    def domain(self, sort):
        try:
            return self.domains[sort]
        except KeyError:
            raise EvalError("model has no sort %s" % sort)

    def pred_holds(self, name, args):
        if name in self.builtins:
            fn = BUILTIN_PREDS.get(self.builtins[name])
            if fn is None:
                raise EvalError("unknown builtin predicate @%s" % self.builtins[name])
            return fn(*args)
        try:
            return tuple(args) in self.preds[name]
        except KeyError:
            raise EvalError("model does not interpret predicate %s" % name)

    def sort_measure(self, sort, count):
        m = self.measure.get(sort, ("count",))
        if m[0] == "density":
            return Fraction(count, m[1])
        return Fraction(count)


class Environment:
    """Immutable evaluation environment; binding builds a new one.
    Plain slotted class: bind() is the hottest call in model checking."""

    __slots__ = ("vars", "predvars", "eta_excluded")

    def __init__(self, vars=(), predvars=(), eta_excluded=frozenset()):
        self.vars = vars                # ((name, element), ...)
        self.predvars = predvars        # ((name, frozenset of elements), ...)
        self.eta_excluded = eta_excluded

    def lookup(self, name):
        for n, e in self.vars:
            if n == name:
                return e
        raise EvalError("unbound variable %s" % name)

    def lookup_pred(self, name):
        for n, s in self.predvars:
            if n == name:
                return s
        raise EvalError("unbound predicate variable %s" % name)

    def bind(self, name, elem):
        return Environment(((name, elem),) + self.vars, self.predvars,
                           self.eta_excluded)

    def bind_pred(self, name, subset):
        return Environment(self.vars,
                           ((name, frozenset(subset)),) + self.predvars,
                           self.eta_excluded)

    def exclude(self, elems):
        return Environment(self.vars, self.predvars,
                           self.eta_excluded | frozenset(elems))


@dataclass
class EvalResult:
    value: object            # bool for formulas, element for terms
    flags: list
    witnesses: list          # (term text, chosen element) per binder evaluated


FLAG_IOTA = "iota-undetermined"
FLAG_PRESUPPOSITION = "presupposition-failure"
FLAG_EMPTY_RESTRICTION = "empty-restriction"


class _Evaluator:
    def __init__(self, model, record=True):
        self.m = model
        self.record = record
        self.flags = []
        self.witnesses = []
        self._choice_cache = {}   # id(closed eps/tau term) -> element
        self._closed = {}         # id(term) -> bool

    def _is_closed(self, t):
        key = id(t)
        got = self._closed.get(key)
        if got is None:
            got = not sx.free_vars(t)
            self._closed[key] = got
        return got

    def flag(self, f):
        if f not in self.flags:
            self.flags.append(f)

    # -- terms ------------------------------------------------------------

    def term(self, t, env):
        if isinstance(t, Var):
            return env.lookup(t.name)
        if isinstance(t, Const):
            try:
                return self.m.consts[t.name]
            except KeyError:
                raise EvalError("model does not interpret constant %s" % t.name)
        if isinstance(t, App):
            args = tuple(self.term(a, env) for a in t.args)
            try:
                return self.m.funcs[t.func][args]
            except KeyError:
                raise EvalError("function %s undefined at %r" % (t.func, args))
        if isinstance(t, Binder):
            return self._binder(t, env)
        if isinstance(t, Generic):
            return self.m.domain(t.sort)[0]
        if isinstance(t, GenericRestricted):
            sat = self._satisfiers(t.var, t.restriction, env)
            if not sat:
                self.flag(FLAG_PRESUPPOSITION)
                return self.m.domain(t.sort)[0]
            return sat[0]
        raise EvalError("not a term: %r" % (t,))

    def _satisfiers(self, var, body, env):
        return [e for e in self.m.domain(var.sort)
                if self.formula(body, env.bind(var.name, e))]

    def _binder(self, t, env):
        dom = self.m.domain(t.var.sort)
        if not dom:
            raise EvalError("empty domain for sort %s" % t.var.sort)
        # closed eps/tau choices do not depend on the environment; caching
        # them keeps nested embedded terms from going exponential
        cacheable = not self.record and t.kind in (sx.EPS, sx.TAU) \
            and self._is_closed(t)
        if cacheable and id(t) in self._choice_cache:
            return self._choice_cache[id(t)]
        if t.kind == sx.EPS:
            sat = self._satisfiers(t.var, t.body, env)
            chosen = sat[0] if sat else dom[0]
        elif t.kind == sx.TAU:
            bad = [e for e in dom if not self.formula(t.body, env.bind(t.var.name, e))]
            chosen = bad[0] if bad else dom[0]
        elif t.kind == sx.IOTA:
            sat = self._satisfiers(t.var, t.body, env)
            if len(sat) == 1:
                chosen = sat[0]
            else:
                self.flag(FLAG_IOTA)
                chosen = dom[0]
        elif t.kind == sx.ETA:
            sat = self._satisfiers(t.var, t.body, env)
            fresh = [e for e in sat if e not in env.eta_excluded]
            chosen = fresh[0] if fresh else (sat[0] if sat else dom[0])
        else:
            raise EvalError("unknown binder kind %s" % t.kind)
        if self.record:
            self.witnesses.append((t, chosen))
        if cacheable:
            self._choice_cache[id(t)] = chosen
        return chosen

    # -- formulas ---------------------------------------------------------

    def formula(self, f, env):
        if isinstance(f, Atom):
            return self._atom(f, env)
        if isinstance(f, PredApp):
            return self.term(f.arg, env) in env.lookup_pred(f.predvar)
        if isinstance(f, Not):
            return not self.formula(f.body, env)
        if isinstance(f, And):
            return self.formula(f.left, env) and self.formula(f.right, env)
        if isinstance(f, Or):
            return self.formula(f.left, env) or self.formula(f.right, env)
        if isinstance(f, Implies):
            return (not self.formula(f.left, env)) or self.formula(f.right, env)
        if isinstance(f, Quant):
            return self._quant(f, env)
        if isinstance(f, Quant2):
            dom = self.m.domain(f.sort)
            subsets = _all_subsets(dom)
            if f.kind == sx.FORALL2:
                return all(self.formula(f.body, env.bind_pred(f.predvar, s))
                           for s in subsets)
            return any(self.formula(f.body, env.bind_pred(f.predvar, s))
                       for s in subsets)
        raise EvalError("not a formula: %r" % (f,))

    def _atom(self, f, env):
        # a unary atom over a most/many generic term is the generalized
        # quantifier in disguise: P(most:S) means "most x:S. P(x)"
        if len(f.args) == 1 and isinstance(f.args[0], (Generic, GenericRestricted)):
            g = f.args[0]
            x = Var("x", g.sort)
            body = Atom(f.pred, (x,))
            if isinstance(g, Generic):
                return self._most(x, None, body, env, kind=g.kind)
            restr = sx.substitute(g.restriction, g.var, x) if g.var != x \
                else g.restriction
            return self._most(x, restr, body, env, kind=g.kind)
        args = tuple(self.term(a, env) for a in f.args)
        if f.pred == sx.EQ:
            return args[0] == args[1]
        return self.m.pred_holds(f.pred, args)

    def _restriction_elems(self, var, restriction, env):
        dom = self.m.domain(var.sort)
        if restriction is None:
            return list(dom)
        return [e for e in dom
                if self.formula(restriction, env.bind(var.name, e))]

    def _quant(self, f, env):
        if f.kind in (sx.FORALL, sx.EXISTS):
            elems = self._restriction_elems(f.var, f.restriction, env)
            if f.kind == sx.FORALL:
                return all(self.formula(f.body, env.bind(f.var.name, e))
                           for e in elems)
            return any(self.formula(f.body, env.bind(f.var.name, e))
                       for e in elems)
        if f.kind == sx.MOST:
            return self._most(f.var, f.restriction, f.body, env, mode=f.mode)
        if f.kind in (sx.FORALL_STAR, sx.EXISTS_STAR):
            return self._star(f, env)
        raise EvalError("unknown quantifier kind %s" % f.kind)

    def _ratio(self, var, restriction, body, env):
        """measure(restriction and body) / measure(restriction), or None
        when the restriction is empty."""
        elems = self._restriction_elems(var, restriction, env)
        if not elems:
            return None
        hits = sum(1 for e in elems
                   if self.formula(body, env.bind(var.name, e)))
        return (self.m.sort_measure(var.sort, hits)
                / self.m.sort_measure(var.sort, len(elems)))

    def _most(self, var, restriction, body, env, mode=None, kind="most"):
        ratio = self._ratio(var, restriction, body, env)
        if ratio is None:
            self.flag(FLAG_EMPTY_RESTRICTION)
            return False
        theta = self.m.many_threshold if kind == "many" else self.m.most_threshold
        mode = mode or self.m.majority_mode
        self.flags.append("most-ratio %s" % ratio)
        return ratio > theta if mode == "strict" else ratio >= theta

    def _star(self, f, env):
        if self.m.star_regime == "A":
            # regime A: the starred quantifiers coincide with the classical
            # ones on finite models, keeping forall* stronger-or-equal
            plain = Quant(sx.FORALL if f.kind == sx.FORALL_STAR else sx.EXISTS,
                          f.var, f.restriction, f.body)
            return self._quant(plain, env)
        theta = self.m.most_threshold
        ratio = self._ratio(f.var, f.restriction, f.body, env)
        if f.kind == sx.FORALL_STAR:
            if ratio is None:
                self.flag(FLAG_EMPTY_RESTRICTION)
                return True
            return ratio >= theta
        if ratio is None:
            self.flag(FLAG_EMPTY_RESTRICTION)
            return False
        return ratio > 1 - theta


def _all_subsets(dom):
    out = []
    for r in range(len(dom) + 1):
        out.extend(frozenset(c) for c in itertools.combinations(dom, r))
    return out


def eval_term(model, env, t):
    """Evaluate a term; returns EvalResult with the chosen element."""
    ev = _Evaluator(model)
    val = ev.term(t, env or Environment())
    return EvalResult(val, ev.flags, [(str(w), e) for w, e in ev.witnesses])


def eval_formula(model, env, f):
    """Evaluate a formula; returns EvalResult with a boolean value."""
    ev = _Evaluator(model)
    val = ev.formula(f, env or Environment())
    return EvalResult(val, ev.flags, [(str(w), e) for w, e in ev.witnesses])


def truth(model, f, env=None):
    """Truth value only, flags discarded."""
    ev = _Evaluator(model, record=False)
    return ev.formula(f, env or Environment())


# ---------------------------------------------------------------------------
# square of oppositions


@dataclass(frozen=True)
class SquareReport:
    corners: dict            # name -> bool; All/Some/No/NotAll
    relations: dict          # relation name -> bool (holds in this model)
    existential_import: bool


def check_square(model, a, b, existential_import=False):
    """Evaluate the four Aristotelian corners for unary predicates a, b
    (same sort) and report which square relations hold in this model."""
    sig = model.signature
    sa, sb = sig.predicates.get(a), sig.predicates.get(b)
    if sa is None or sb is None or len(sa) != 1 or len(sb) != 1 or sa != sb:
        raise EvalError("square needs two unary predicates of one sort")
    sort = sa[0]
    x = Var("x", sort)
    ax, bx = Atom(a, (x,)), Atom(b, (x,))
    all_f = Quant(sx.FORALL, x, ax, bx)
    some_f = Quant(sx.EXISTS, x, ax, bx)
    if existential_import:
        all_f = And(all_f, Quant(sx.EXISTS, x, None, ax))
    corners = {
        "All": truth(model, all_f),
        "Some": truth(model, some_f),
        "No": truth(model, Not(some_f)),
        "NotAll": truth(model, Not(all_f)),
    }
    relations = {
        "contradictory-A-O": corners["All"] != corners["NotAll"],
        "contradictory-E-I": corners["No"] != corners["Some"],
        "contrary-A-E": not (corners["All"] and corners["No"]),
        "subcontrary-I-O": corners["Some"] or corners["NotAll"],
        "subalternation-A-I": (not corners["All"]) or corners["Some"],
        "subalternation-E-O": (not corners["No"]) or corners["NotAll"],
    }
    return SquareReport(corners, relations, existential_import)


# ---------------------------------------------------------------------------
# quantifier classification


@dataclass(frozen=True)
class QuantifierProfile:
    name: str
    conservative: bool
    left_monotone: str       # "upward" | "downward" | "none"
    right_monotone: str
    symmetric: bool
    intersective: bool
    size_bound: int


def _quantifier_fn(name, theta=Fraction(1, 2), mode="strict"):
    """Truth function Q(domain, A, B) for a named determiner."""
    if name == "forall":
        return lambda dom, a, b: a <= b
    if name == "exists":
        return lambda dom, a, b: bool(a & b)
    if name == "no":
        return lambda dom, a, b: not (a & b)
    if name in ("most", "many"):
        def most(dom, a, b):
            if not a:
                return False
            r = Fraction(len(a & b), len(a))
            return r > theta if mode == "strict" else r >= theta
        return most
    if name == "forall*":
        def fstar(dom, a, b):
            if not a:
                return True
            return Fraction(len(a & b), len(a)) >= theta
        return fstar
    if name == "exists*":
        def estar(dom, a, b):
            if not a:
                return False
            return Fraction(len(a & b), len(a)) > 1 - theta
        return estar
    raise ValueError("unknown quantifier %r" % name)


def classify_quantifier(q, size_bound, theta=Fraction(1, 2), mode="strict"):
    """Exhaustively classify a determiner over all (domain, A, B) with
    |domain| <= size_bound.  `q` is a name or a callable (dom, A, B) -> bool."""
    if size_bound < 1:
        raise ValueError("size bound must be at least 1")
    fn = q if callable(q) else _quantifier_fn(q, theta, mode)
    name = q if isinstance(q, str) else getattr(q, "__name__", "custom")

    conservative = symmetric = intersective = True
    left_up = left_down = right_up = right_down = True
    for n in range(1, size_bound + 1):
        dom = frozenset(range(n))
        subsets = _all_subsets(sorted(dom))
        for a in subsets:
            for b in subsets:
                v = fn(dom, a, b)
                if v != fn(dom, a, a & b):
                    conservative = False
                if v != fn(dom, b, a):
                    symmetric = False
                if v != fn(dom, a & b, a & b):
                    intersective = False
                if v:
                    for b2 in subsets:
                        if b <= b2 and not fn(dom, a, b2):
                            right_up = False
                        if b2 <= b and not fn(dom, a, b2):
                            right_down = False
                    for a2 in subsets:
                        if a <= a2 and not fn(dom, a2, b):
                            left_up = False
                        if a2 <= a and not fn(dom, a2, b):
                            left_down = False

    def mono(up, down):
        if up and down:
            return "both"
        if up:
            return "upward"
        if down:
            return "downward"
        return "none"

    return QuantifierProfile(name, conservative,
                             mono(left_up, left_down), mono(right_up, right_down),
                             symmetric, intersective, size_bound)


# ---------------------------------------------------------------------------
# brute-force model enumeration


def count_models(sig, max_size):
    """Estimated number of models enumerate_models would yield."""
    total = 0
    sorts = sorted(sig.sorts)
    for sizes in itertools.product(range(1, max_size + 1), repeat=len(sorts)):
        by_sort = dict(zip(sorts, sizes))
        n = 1
        for p, args in sig.predicates.items():
            cells = 1
            for s in args:
                cells *= by_sort[s]
            n *= 2 ** cells
        for c, s in sig.constants.items():
            n *= by_sort[s]
        for fname, (args, res) in sig.functions.items():
            cells = 1
            for s in args:
                cells *= by_sort[s]
            n *= by_sort[res] ** cells
        total += n
    return total


def enumerate_models(sig, max_size, budget=2_000_000, **config):
    """Yield every model of `sig` with per-sort domains of size 1..max_size,
    in a fixed deterministic order.  Raises EnumerationBound when the
    estimated count exceeds `budget`.  Extra keyword arguments become
    model configuration (thresholds, majority mode, star regime)."""
    if sig.integer_sort is not None:
        raise EvalError("cannot enumerate models of a density signature")
    estimate = count_models(sig, max_size)
    if estimate > budget:
        raise EnumerationBound(estimate, budget)

    sorts = sorted(sig.sorts)
    preds = sorted(sig.predicates)
    consts = sorted(sig.constants)
    funcs = sorted(sig.functions)
    for sizes in itertools.product(range(1, max_size + 1), repeat=len(sorts)):
        domains = {s: ["%s%d" % (s.lower(), i + 1) for i in range(k)]
                   for s, k in zip(sorts, sizes)}
        pred_spaces = []
        for p in preds:
            cells = list(itertools.product(*(domains[s] for s in sig.predicates[p])))
            pred_spaces.append([frozenset(c) for c in _all_subsets(cells)])
        const_spaces = [domains[sig.constants[c]] for c in consts]
        func_spaces = []
        for fname in funcs:
            args, res = sig.functions[fname]
            cells = list(itertools.product(*(domains[s] for s in args)))
            tables = [dict(zip(cells, vals))
                      for vals in itertools.product(domains[res], repeat=len(cells))]
            func_spaces.append(tables)
        for choice in itertools.product(*pred_spaces, *const_spaces, *func_spaces):
            pext = dict(zip(preds, choice[:len(preds)]))
            cext = dict(zip(consts, choice[len(preds):len(preds) + len(consts)]))
            fext = dict(zip(funcs, choice[len(preds) + len(consts):]))
            yield Model(signature=sig, domains=domains, preds=pext,
                        consts=cext, funcs=fext, **config)
