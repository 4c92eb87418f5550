"""Core term/formula representation: sorted first-order syntax with
Hilbert-style binder terms (eps/tau/iota/eta), generalized quantifiers
(forall*/exists*/most), generic "most" terms and a bounded second-order
fragment (unary predicate variables).

All values are immutable; every operation here is a pure function.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

# quantifier kinds
FORALL = "forall"
EXISTS = "exists"
FORALL_STAR = "forall*"
EXISTS_STAR = "exists*"
MOST = "most"
QUANT_KINDS = (FORALL, EXISTS, FORALL_STAR, EXISTS_STAR, MOST)

# binder kinds
EPS = "eps"
TAU = "tau"
IOTA = "iota"
ETA = "eta"
BINDER_KINDS = (EPS, TAU, IOTA, ETA)

# second-order quantifier kinds
FORALL2 = "forall2"
EXISTS2 = "exists2"

# reserved built-in equality predicate
EQ = "="


class SortError(Exception):
    """Raised for hard sort violations (e.g. substituting at the wrong sort)."""


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    func: str
    args: tuple

    def __str__(self):
        return "%s(%s)" % (self.func, ", ".join(map(str, self.args)))


@dataclass(frozen=True)
class Binder:
    """Hilbert-style binder term: eps/tau/iota/eta x:S. body."""

    kind: str
    var: Var
    body: "Formula"

    def __str__(self):
        return "%s %s:%s. %s" % (self.kind, self.var.name, self.var.sort, self.body)


@dataclass(frozen=True)
class Generic:
    """Typed generic element for a vague quantifier (type version)."""

    kind: str  # "most" or "many"
    sort: str

    def __str__(self):
        return "%s:%s" % (self.kind, self.sort)


@dataclass(frozen=True)
class GenericRestricted:
    """Generic element restricted by a predicate over its sort.

    The restriction has exactly one designated free variable (`var`).
    """

    kind: str
    sort: str
    var: Var
    restriction: "Formula"

    def __str__(self):
        return "%s:%s(%s. %s)" % (self.kind, self.sort, self.var.name, self.restriction)


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple

    def __str__(self):
        if self.pred == EQ:
            return "%s = %s" % (self.args[0], self.args[1])
        if not self.args:
            return self.pred
        return "%s(%s)" % (self.pred, ", ".join(map(str, self.args)))


@dataclass(frozen=True)
class PredApp:
    """Application of a unary predicate variable to a term."""

    predvar: str
    arg: object

    def __str__(self):
        return "%s(%s)" % (self.predvar, self.arg)


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quant:
    """First-order quantifier, optionally restricted to a class.

    `mode` is only meaningful for kind "most": None (model default),
    "strict" (> threshold) or "weak" (>= threshold).
    """

    kind: str
    var: Var
    restriction: object  # Formula or None
    body: "Formula"
    mode: object = None


@dataclass(frozen=True)
class Quant2:
    """Second-order quantifier over unary predicate variables of one sort."""

    kind: str  # forall2 / exists2
    predvar: str
    sort: str
    body: "Formula"


Term = (Var, Const, App, Binder, Generic, GenericRestricted)
Formula = (Atom, PredApp, Not, And, Or, Implies, Quant, Quant2)


def is_term(e):
    return isinstance(e, Term)


def is_formula(e):
    return isinstance(e, Formula)


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class Signature:
    sorts: frozenset = frozenset()
    constants: dict = field(default_factory=dict)  # name -> sort
    functions: dict = field(default_factory=dict)  # name -> (arg sorts, result)
    predicates: dict = field(default_factory=dict)  # name -> arg sorts
    integer_sort: object = None  # sort treated as pseudo-infinite (density)

    def validate(self):
        """Return a list of declaration errors (empty list means well-formed)."""
        errs = []
        for c, s in self.constants.items():
            if s not in self.sorts:
                errs.append("constant %s has undeclared sort %s" % (c, s))
        for f, (args, res) in self.functions.items():
            for s in (*args, res):
                if s not in self.sorts:
                    errs.append("function %s uses undeclared sort %s" % (f, s))
        for p, args in self.predicates.items():
            for s in args:
                if s not in self.sorts:
                    errs.append("predicate %s uses undeclared sort %s" % (p, s))
        if self.integer_sort is not None and self.integer_sort not in self.sorts:
            errs.append("integer sort %s is not declared" % self.integer_sort)
        return errs

    def with_predicate(self, name, arg_sorts):
        preds = dict(self.predicates)
        preds[name] = tuple(arg_sorts)
        return Signature(self.sorts, self.constants, self.functions, preds,
                         self.integer_sort)


def term_sort(t, sig):
    """Sort of a term under `sig`; raises SortError for unknown symbols."""
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, Const):
        try:
            return sig.constants[t.name]
        except KeyError:
            raise SortError("unknown constant %s" % t.name)
    if isinstance(t, App):
        try:
            return sig.functions[t.func][1]
        except KeyError:
            raise SortError("unknown function %s" % t.func)
    if isinstance(t, Binder):
        return t.var.sort
    if isinstance(t, (Generic, GenericRestricted)):
        return t.sort
    raise SortError("not a term: %r" % (t,))


# ---------------------------------------------------------------------------
# free variables


def free_vars(e):
    """Set of free variables (as Var values) of a term or formula."""
    out = set()
    _free_vars(e, frozenset(), out)
    return out


def _free_vars(e, bound, out):
    if isinstance(e, Var):
        if e not in bound:
            out.add(e)
    elif isinstance(e, (Const, Generic)):
        pass
    elif isinstance(e, App):
        for a in e.args:
            _free_vars(a, bound, out)
    elif isinstance(e, Binder):
        _free_vars(e.body, bound | {e.var}, out)
    elif isinstance(e, GenericRestricted):
        _free_vars(e.restriction, bound | {e.var}, out)
    elif isinstance(e, Atom):
        for a in e.args:
            _free_vars(a, bound, out)
    elif isinstance(e, PredApp):
        _free_vars(e.arg, bound, out)
    elif isinstance(e, Not):
        _free_vars(e.body, bound, out)
    elif isinstance(e, (And, Or, Implies)):
        _free_vars(e.left, bound, out)
        _free_vars(e.right, bound, out)
    elif isinstance(e, Quant):
        if e.restriction is not None:
            _free_vars(e.restriction, bound | {e.var}, out)
        _free_vars(e.body, bound | {e.var}, out)
    elif isinstance(e, Quant2):
        _free_vars(e.body, bound, out)
    else:
        raise TypeError("not a term or formula: %r" % (e,))


def free_predvars(e):
    """Free predicate-variable names of a formula."""
    out = set()
    _free_predvars(e, frozenset(), out)
    return out


def _free_predvars(e, bound, out):
    if isinstance(e, PredApp):
        if e.predvar not in bound:
            out.add(e.predvar)
        _free_predvars(e.arg, bound, out)
    elif isinstance(e, (Atom, App)):
        for a in e.args:
            _free_predvars(a, bound, out)
    elif isinstance(e, (Binder,)):
        _free_predvars(e.body, bound, out)
    elif isinstance(e, GenericRestricted):
        _free_predvars(e.restriction, bound, out)
    elif isinstance(e, Not):
        _free_predvars(e.body, bound, out)
    elif isinstance(e, (And, Or, Implies)):
        _free_predvars(e.left, bound, out)
        _free_predvars(e.right, bound, out)
    elif isinstance(e, Quant):
        if e.restriction is not None:
            _free_predvars(e.restriction, bound, out)
        _free_predvars(e.body, bound, out)
    elif isinstance(e, Quant2):
        _free_predvars(e.body, bound | {e.predvar}, out)


# ---------------------------------------------------------------------------
# substitution


def fresh_name(base, taken):
    """A name not in `taken`, derived from `base` by numeric suffixing."""
    if base not in taken:
        return base
    stem = base.rstrip("0123456789")
    for i in itertools.count(1):
        cand = "%s%d" % (stem, i)
        if cand not in taken:
            return cand


def substitute(e, v, t, sig=None):
    """Capture-avoiding substitution of term `t` for free variable `v`.

    Works on terms and formulas.  When `sig` is given the sorts of `v`
    and `t` must agree.
    """
    if sig is not None:
        ts = term_sort(t, sig)
        if ts != v.sort:
            raise SortError("cannot substitute %s-term for %s-variable" % (ts, v.sort))
    return _subst(e, v, t, frozenset(x.name for x in free_vars(t)))


def _rename_bound(var, inner, v, avoid):
    """Rename `var` in the bodies `inner` (list) when capture threatens."""
    taken = set(avoid) | {v.name}
    for b in inner:
        taken |= {x.name for x in free_vars(b)}
    nv = Var(fresh_name(var.name, taken), var.sort)
    return nv, [_subst(b, var, nv, frozenset()) for b in inner]


def _subst(e, v, t, tfree):
    if isinstance(e, Var):
        return t if e == v else e
    if isinstance(e, (Const, Generic)):
        return e
    if isinstance(e, App):
        return App(e.func, tuple(_subst(a, v, t, tfree) for a in e.args))
    if isinstance(e, Binder):
        if e.var == v:
            return e
        if e.var.name in tfree and any(x == v for x in free_vars(e)):
            nv, (body,) = _rename_bound(e.var, [e.body], v, tfree)
            return Binder(e.kind, nv, _subst(body, v, t, tfree))
        return Binder(e.kind, e.var, _subst(e.body, v, t, tfree))
    if isinstance(e, GenericRestricted):
        if e.var == v:
            return e
        if e.var.name in tfree and any(x == v for x in free_vars(e)):
            nv, (r,) = _rename_bound(e.var, [e.restriction], v, tfree)
            return GenericRestricted(e.kind, e.sort, nv, _subst(r, v, t, tfree))
        return GenericRestricted(e.kind, e.sort, e.var, _subst(e.restriction, v, t, tfree))
    if isinstance(e, Atom):
        return Atom(e.pred, tuple(_subst(a, v, t, tfree) for a in e.args))
    if isinstance(e, PredApp):
        return PredApp(e.predvar, _subst(e.arg, v, t, tfree))
    if isinstance(e, Not):
        return Not(_subst(e.body, v, t, tfree))
    if isinstance(e, And):
        return And(_subst(e.left, v, t, tfree), _subst(e.right, v, t, tfree))
    if isinstance(e, Or):
        return Or(_subst(e.left, v, t, tfree), _subst(e.right, v, t, tfree))
    if isinstance(e, Implies):
        return Implies(_subst(e.left, v, t, tfree), _subst(e.right, v, t, tfree))
    if isinstance(e, Quant):
        if e.var == v:
            return e
        if e.var.name in tfree and any(x == v for x in free_vars(e)):
            inner = [e.body] if e.restriction is None else [e.body, e.restriction]
            nv, renamed = _rename_bound(e.var, inner, v, tfree)
            body = _subst(renamed[0], v, t, tfree)
            restr = _subst(renamed[1], v, t, tfree) if e.restriction is not None else None
            return Quant(e.kind, nv, restr, body, e.mode)
        restr = None if e.restriction is None else _subst(e.restriction, v, t, tfree)
        return Quant(e.kind, e.var, restr, _subst(e.body, v, t, tfree), e.mode)
    if isinstance(e, Quant2):
        return Quant2(e.kind, e.predvar, e.sort, _subst(e.body, v, t, tfree))
    raise TypeError("not a term or formula: %r" % (e,))


# ---------------------------------------------------------------------------
# alpha equivalence


def alpha_eq(a, b):
    """Equality up to consistent renaming of bound variables (individual
    and predicate variables, including binder-term bound variables)."""
    return _alpha(a, b, (), ())


def _lookup(env, name):
    for i, (x, _) in enumerate(env):
        if x == name:
            return i, env[i][1]
    return None, None


def _alpha(a, b, env, penv):
    # env: tuple of (name_in_a, name_in_b) for bound individual variables,
    # innermost first; penv likewise for predicate variables.
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        if a.sort != b.sort:
            return False
        ia, ma = _lookup(env, a.name)
        ib = next((i for i, (_, y) in enumerate(env) if y == b.name), None)
        if ia is None and ib is None:
            return a.name == b.name
        return ia == ib and ma == b.name
    if isinstance(a, Const):
        return a.name == b.name
    if isinstance(a, App):
        return (a.func == b.func and len(a.args) == len(b.args)
                and all(_alpha(x, y, env, penv) for x, y in zip(a.args, b.args)))
    if isinstance(a, Binder):
        if a.kind != b.kind or a.var.sort != b.var.sort:
            return False
        return _alpha(a.body, b.body, ((a.var.name, b.var.name),) + env, penv)
    if isinstance(a, Generic):
        return a.kind == b.kind and a.sort == b.sort
    if isinstance(a, GenericRestricted):
        if a.kind != b.kind or a.sort != b.sort or a.var.sort != b.var.sort:
            return False
        return _alpha(a.restriction, b.restriction,
                      ((a.var.name, b.var.name),) + env, penv)
    if isinstance(a, Atom):
        return (a.pred == b.pred and len(a.args) == len(b.args)
                and all(_alpha(x, y, env, penv) for x, y in zip(a.args, b.args)))
    if isinstance(a, PredApp):
        ia, ma = _lookup(penv, a.predvar)
        ib = next((i for i, (_, y) in enumerate(penv) if y == b.predvar), None)
        if ia is None and ib is None:
            ok = a.predvar == b.predvar
        else:
            ok = ia == ib and ma == b.predvar
        return ok and _alpha(a.arg, b.arg, env, penv)
    if isinstance(a, Not):
        return _alpha(a.body, b.body, env, penv)
    if isinstance(a, (And, Or, Implies)):
        return (_alpha(a.left, b.left, env, penv)
                and _alpha(a.right, b.right, env, penv))
    if isinstance(a, Quant):
        if a.kind != b.kind or a.var.sort != b.var.sort or a.mode != b.mode:
            return False
        if (a.restriction is None) != (b.restriction is None):
            return False
        env2 = ((a.var.name, b.var.name),) + env
        if a.restriction is not None:
            if not _alpha(a.restriction, b.restriction, env2, penv):
                return False
        return _alpha(a.body, b.body, env2, penv)
    if isinstance(a, Quant2):
        if a.kind != b.kind or a.sort != b.sort:
            return False
        return _alpha(a.body, b.body, env, ((a.predvar, b.predvar),) + penv)
    raise TypeError("not a term or formula: %r" % (a,))


# ---------------------------------------------------------------------------
# well-sortedness


def well_sorted(e, sig, env=None, predvars=None):
    """Check sorts; returns a list of error strings (empty means ok).

    Never raises on malformed input: every problem becomes a diagnostic.
    `env` maps in-scope variable names to sorts, `predvars` maps in-scope
    predicate-variable names to their argument sort.
    """
    errs = []
    if is_term(e):
        _check_term(e, sig, dict(env or {}), dict(predvars or {}), errs)
    else:
        _check(e, sig, dict(env or {}), dict(predvars or {}), errs)
    return errs


def _check_term(t, sig, env, predvars, errs):
    """Returns the term's sort, or None when it cannot be determined."""
    if isinstance(t, Var):
        s = env.get(t.name)
        if s is None:
            if t.sort not in sig.sorts:
                errs.append("variable %s has undeclared sort %s" % (t.name, t.sort))
            return t.sort
        if s != t.sort:
            errs.append("variable %s used at sort %s but bound at %s"
                        % (t.name, t.sort, s))
        return s
    if isinstance(t, Const):
        s = sig.constants.get(t.name)
        if s is None:
            errs.append("unknown constant %s" % t.name)
        return s
    if isinstance(t, App):
        decl = sig.functions.get(t.func)
        if decl is None:
            errs.append("unknown function %s" % t.func)
            for a in t.args:
                _check_term(a, sig, env, predvars, errs)
            return None
        args, res = decl
        if len(args) != len(t.args):
            errs.append("function %s expects %d arguments, got %d"
                        % (t.func, len(args), len(t.args)))
        for i, (a, want) in enumerate(zip(t.args, args)):
            got = _check_term(a, sig, env, predvars, errs)
            if got is not None and got != want:
                errs.append("argument %d of %s has sort %s, expected %s"
                            % (i + 1, t.func, got, want))
        return res
    if isinstance(t, Binder):
        if t.var.sort not in sig.sorts:
            errs.append("binder variable %s has undeclared sort %s"
                        % (t.var.name, t.var.sort))
        inner = dict(env)
        inner[t.var.name] = t.var.sort
        _check(t.body, sig, inner, predvars, errs)
        return t.var.sort
    if isinstance(t, Generic):
        if t.sort not in sig.sorts:
            errs.append("generic term has undeclared sort %s" % t.sort)
        return t.sort
    if isinstance(t, GenericRestricted):
        if t.sort not in sig.sorts:
            errs.append("generic term has undeclared sort %s" % t.sort)
        if t.var.sort != t.sort:
            errs.append("restriction variable %s of generic term must have sort %s"
                        % (t.var.name, t.sort))
        inner = dict(env)
        inner[t.var.name] = t.var.sort
        _check(t.restriction, sig, inner, predvars, errs)
        extra = {x for x in free_vars(t.restriction) if x != t.var}
        # restriction must have exactly the designated free variable
        for x in extra:
            if x.name not in env:
                errs.append("restriction of generic term has stray free variable %s"
                            % x.name)
        return t.sort
    errs.append("not a term: %r" % (t,))
    return None


def _check(f, sig, env, predvars, errs):
    if isinstance(f, Atom):
        if f.pred == EQ:
            if len(f.args) != 2:
                errs.append("equality takes two arguments")
                return
            s1 = _check_term(f.args[0], sig, env, predvars, errs)
            s2 = _check_term(f.args[1], sig, env, predvars, errs)
            if s1 is not None and s2 is not None and s1 != s2:
                errs.append("equality between distinct sorts %s and %s" % (s1, s2))
            return
        decl = sig.predicates.get(f.pred)
        if decl is None:
            errs.append("unknown predicate %s" % f.pred)
            for a in f.args:
                _check_term(a, sig, env, predvars, errs)
            return
        if len(decl) != len(f.args):
            errs.append("predicate %s expects %d arguments, got %d"
                        % (f.pred, len(decl), len(f.args)))
        for i, (a, want) in enumerate(zip(f.args, decl)):
            got = _check_term(a, sig, env, predvars, errs)
            if got is not None and got != want:
                errs.append("argument %d of %s has sort %s, expected %s"
                            % (i + 1, f.pred, got, want))
    elif isinstance(f, PredApp):
        want = predvars.get(f.predvar)
        if want is None:
            errs.append("unbound predicate variable %s" % f.predvar)
        got = _check_term(f.arg, sig, env, predvars, errs)
        if want is not None and got is not None and got != want:
            errs.append("predicate variable %s applied at sort %s, expected %s"
                        % (f.predvar, got, want))
    elif isinstance(f, Not):
        _check(f.body, sig, env, predvars, errs)
    elif isinstance(f, (And, Or, Implies)):
        _check(f.left, sig, env, predvars, errs)
        _check(f.right, sig, env, predvars, errs)
    elif isinstance(f, Quant):
        if f.kind not in QUANT_KINDS:
            errs.append("unknown quantifier kind %s" % f.kind)
        if f.var.sort not in sig.sorts:
            errs.append("quantified variable %s has undeclared sort %s"
                        % (f.var.name, f.var.sort))
        if f.mode not in (None, "strict", "weak"):
            errs.append("bad majority mode %r" % (f.mode,))
        if f.mode is not None and f.kind != MOST:
            errs.append("majority mode on non-most quantifier")
        inner = dict(env)
        inner[f.var.name] = f.var.sort
        if f.restriction is not None:
            _check(f.restriction, sig, inner, predvars, errs)
        _check(f.body, sig, inner, predvars, errs)
    elif isinstance(f, Quant2):
        if f.sort not in sig.sorts:
            errs.append("second-order quantifier over undeclared sort %s" % f.sort)
        inner = dict(predvars)
        inner[f.predvar] = f.sort
        _check(f.body, sig, env, inner, errs)
    else:
        errs.append("not a formula: %r" % (f,))


# ---------------------------------------------------------------------------
# misc helpers used across modules


def subterms(e):
    """All subterms of a term or formula (terms only), preorder."""
    out = []
    _subterms(e, out)
    return out


def _subterms(e, out):
    if isinstance(e, Term):
        out.append(e)
        if isinstance(e, App):
            for a in e.args:
                _subterms(a, out)
        elif isinstance(e, Binder):
            _subterms(e.body, out)
        elif isinstance(e, GenericRestricted):
            _subterms(e.restriction, out)
    elif isinstance(e, (Atom,)):
        for a in e.args:
            _subterms(a, out)
    elif isinstance(e, PredApp):
        _subterms(e.arg, out)
    elif isinstance(e, Not):
        _subterms(e.body, out)
    elif isinstance(e, (And, Or, Implies)):
        _subterms(e.left, out)
        _subterms(e.right, out)
    elif isinstance(e, Quant):
        if e.restriction is not None:
            _subterms(e.restriction, out)
        _subterms(e.body, out)
    elif isinstance(e, Quant2):
        _subterms(e.body, out)
