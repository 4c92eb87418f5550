"""Controlled-English fragment: noun phrases become individual terms
(eta for indefinites, eps for definites, tau for universals, typed
"most"/"many" generics), with discourse referents kept on a salience stack.

Fragment shape, per clause:

    Det Noun (that Verb (Det Noun)?)? (Verb | Verb Det Noun | Verb Pronoun)
    Pronoun Verb ...

Clauses are separated by '.'; referents persist across clause boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import syntax as sx
from .kernel import KernelConfig
from .syntax import (Atom, And, Binder, Generic, GenericRestricted, Implies,
                     Not, Quant, Signature, Var, substitute)

DETERMINERS = {"a", "some", "the", "every", "all", "each", "no", "most",
               "many", "not-every"}
UNIVERSAL_DETS = {"every", "all", "each"}
INDEFINITE_DETS = {"a", "some"}


class LexiconError(Exception):
    pass


class SemanticsError(Exception):
    pass


@dataclass(frozen=True)
class Lexicon:
    nouns: dict                  # word -> sort
    iverbs: dict                 # word -> unary predicate name
    tverbs: dict                 # word -> binary predicate name
    adjectives: dict             # word -> unary predicate name
    pronouns: dict               # word -> sort (sort constraint)
    signature: Signature

    def sort_of_noun(self, word):
        try:
            return self.nouns[word]
        except KeyError:
            raise LexiconError("unknown noun %r" % word)


def parse_lexicon(text):
    """Lexicon file, one entry per line:

        noun dog : dog
        verb bite : bite(dog)
        tverb know : know(person, person)
        adj grumpy : grumpy(dog)
        pron he : man
    """
    nouns, iverbs, tverbs, adjectives, pronouns = {}, {}, {}, {}, {}
    sorts, preds = set(), {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 2)
        if len(parts) != 3 or ":" not in parts[2]:
            raise LexiconError("line %d: expected 'KIND word : spec'" % lineno)
        kind, word = parts[0], parts[1]
        spec = parts[2].split(":", 1)[1].strip() if parts[2].startswith(":") \
            else line.split(":", 1)[1].strip()
        if kind == "noun":
            nouns[word] = spec
            sorts.add(spec)
        elif kind in ("verb", "tverb", "adj"):
            if "(" not in spec or not spec.endswith(")"):
                raise LexiconError("line %d: predicate spec must be name(sorts)"
                                   % lineno)
            name, args = spec[:-1].split("(", 1)
            name = name.strip()
            arg_sorts = tuple(s.strip() for s in args.split(","))
            want = 2 if kind == "tverb" else 1
            if len(arg_sorts) != want:
                raise LexiconError("line %d: %s takes %d argument sort(s)"
                                   % (lineno, kind, want))
            sorts.update(arg_sorts)
            preds[name] = arg_sorts
            {"verb": iverbs, "tverb": tverbs, "adj": adjectives}[kind][word] = name
        elif kind == "pron":
            pronouns[word] = spec
            sorts.add(spec)
        else:
            raise LexiconError("line %d: unknown entry kind %r" % (lineno, kind))
    # every noun doubles as a unary predicate over its sort, so that
    # referent terms can mention the noun (man(eta x:man. man(x)))
    for word, sort in nouns.items():
        preds.setdefault(word, (sort,))
    sig = Signature(frozenset(sorts), {}, {}, preds, None)
    return Lexicon(nouns, iverbs, tverbs, adjectives, pronouns, sig)


# ---------------------------------------------------------------------------
# fragment parsing


@dataclass(frozen=True)
class NounPhrase:
    det: str
    noun: str
    rel: object = None           # (verb word, object NounPhrase or None)


@dataclass(frozen=True)
class PronounPhrase:
    word: str


@dataclass(frozen=True)
class Clause:
    subject: object
    verb: str
    obj: object = None


def parse_fragment(tokens, lex):
    """Parse a token sequence (clauses separated by '.') into Clause trees."""
    if isinstance(tokens, str):
        tokens = tokens.split()
    clauses = []
    current = []
    for tok in tokens:
        if tok == ".":
            if current:
                clauses.append(_parse_clause(current, lex))
                current = []
        else:
            current.append(tok)
    if current:
        clauses.append(_parse_clause(current, lex))
    if not clauses:
        raise SemanticsError("empty input")
    return clauses


class _Toks:
    def __init__(self, toks):
        self.toks = list(toks)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise SemanticsError("unexpected end of sentence")
        self.i += 1
        return t


def _parse_clause(words, lex):
    ts = _Toks(words)
    subject = _parse_np(ts, lex)
    verb = ts.next()
    if not _known_verb(verb, lex):
        raise SemanticsError("unknown verb %r" % verb)
    verb = _verb_word(verb, lex)
    obj = None
    if ts.peek() is not None:
        obj = _parse_np(ts, lex)
    if ts.peek() is not None:
        raise SemanticsError("trailing words after clause: %r" % ts.peek())
    return Clause(subject, verb, obj)


def _known_verb(word, lex):
    return _verb_word(word, lex) is not None


def _verb_word(word, lex):
    for w in (word, word.rstrip("s")):
        if w in lex.iverbs or w in lex.tverbs:
            return w
    return None


def _noun_word(word, lex):
    for w in (word, word.rstrip("s")):
        if w in lex.nouns:
            return w
    return None


def _parse_np(ts, lex):
    w = ts.next()
    if w in lex.pronouns:
        return PronounPhrase(w)
    if w not in DETERMINERS:
        raise SemanticsError("expected a determiner or pronoun, found %r" % w)
    noun = _noun_word(ts.next(), lex)
    if noun is None:
        raise SemanticsError("unknown noun after determiner %r" % w)
    rel = None
    if ts.peek() == "that":
        ts.next()
        rv = ts.next()
        if not _known_verb(rv, lex):
            raise SemanticsError("unknown verb %r in relative clause" % rv)
        rv = _verb_word(rv, lex)
        robj = None
        if rv in lex.tverbs:
            robj = _parse_np(ts, lex)
        rel = (rv, robj)
    return NounPhrase(w, noun, rel)


# ---------------------------------------------------------------------------
# discourse state


@dataclass(frozen=True)
class DiscourseState:
    referents: tuple = ()        # (term, sort, noun), most salient first
    presuppositions: tuple = ()
    formula: object = None       # conjunction of the clauses built so far

    def push(self, term, sort, noun):
        return replace(self, referents=((term, sort, noun),) + self.referents)

    def promote(self, index):
        refs = list(self.referents)
        refs.insert(0, refs.pop(index))
        return replace(self, referents=tuple(refs))

    def presuppose(self, f):
        return replace(self, presuppositions=self.presuppositions + (f,))


def resolve_pronoun(state, sort_constraint=None):
    """Topmost sort-compatible referent, promoted to the top of the stack."""
    for i, (term, sort, _) in enumerate(state.referents):
        if sort_constraint is None or sort == sort_constraint:
            return term, state.promote(i)
    if not state.referents:
        raise SemanticsError("pronoun with no discourse referent")
    raise SemanticsError("no referent of sort %s on the salience stack"
                         % sort_constraint)


# ---------------------------------------------------------------------------
# logical-form construction


def build_logical_form(clauses, lex, state=None, cfg=None):
    """Build one conjoined formula for a clause sequence; returns the
    formula together with the final discourse state."""
    state = state or DiscourseState()
    cfg = cfg or KernelConfig()
    if isinstance(clauses, Clause):
        clauses = [clauses]
    formula = None
    for clause in clauses:
        cf, state = _build_clause(clause, lex, state, cfg)
        formula = cf if formula is None else And(formula, cf)
    state = replace(state, formula=formula)
    return formula, state


def _restriction_formula(np, lex, var):
    """Noun (plus adjectival/relative material) as a formula over `var`."""
    f = None
    if np.rel is not None:
        rv, robj = np.rel
        if robj is None:
            f = Atom(lex.iverbs[rv], (var,))
        else:
            raise SemanticsError("relative clauses with objects are not "
                                 "supported in restrictions")
    return f


def _build_clause(clause, lex, state, cfg):
    # the verb phrase as a function of the subject term
    if clause.verb in lex.tverbs:
        if clause.obj is None:
            raise SemanticsError("transitive verb %r needs an object" % clause.verb)
        pred = lex.tverbs[clause.verb]
        obj_term, state, extra = _np_term(clause.obj, lex, state, cfg,
                                          position="object")
        def vp(t):
            return Atom(pred, (t, obj_term))
    else:
        if clause.obj is not None:
            raise SemanticsError("verb %r does not take an object" % clause.verb)
        pred = lex.iverbs[clause.verb]
        extra = []
        def vp(t):
            return Atom(pred, (t,))

    subj = clause.subject
    if isinstance(subj, PronounPhrase):
        term, state = resolve_pronoun(state, lex.pronouns.get(subj.word))
        f = vp(term)
    else:
        f, state, subj_extra = _quantified_subject(subj, lex, state, cfg, vp)
        extra = extra + subj_extra
    for conj in extra:
        f = And(f, conj)
    return f, state


def _noun_body(np, lex, var):
    body = Atom(np.noun, (var,))
    rel = _restriction_formula(np, lex, var)
    if rel is not None:
        body = And(body, rel)
    return body


def _np_term(np, lex, state, cfg, position):
    """Referential noun phrase (a/some/the/most/many) as an individual term.
    Returns (term, new state, extra assertable conjuncts)."""
    if isinstance(np, PronounPhrase):
        term, state = resolve_pronoun(state, lex.pronouns.get(np.word))
        return term, state, []
    sort = lex.sort_of_noun(np.noun)
    x = Var("x", sort)
    if np.det in INDEFINITE_DETS:
        term = Binder(sx.ETA, x, _noun_body(np, lex, x))
        state = state.push(term, sort, np.noun)
        extra = [Atom(np.noun, (term,))] if cfg.epsilon_presupposition else []
        return term, state, extra
    if np.det == "the":
        for i, (term, s, _) in enumerate(state.referents):
            if s == sort:
                return term, state.promote(i), []
        term = Binder(sx.EPS, x, _noun_body(np, lex, x))
        state = state.push(term, sort, np.noun)
        return term, state, []
    if np.det in ("most", "many"):
        rel = _restriction_formula(np, lex, x)
        if rel is None:
            term = Generic(np.det, sort)
        else:
            term = GenericRestricted(np.det, sort, x, rel)
            state = state.presuppose(substitute(rel, x, term))
        return term, state, []
    raise SemanticsError("determiner %r is not supported in %s position"
                         % (np.det, position))


def _quantified_subject(np, lex, state, cfg, vp):
    """Subject noun phrase applied to the verb phrase."""
    sort = lex.sort_of_noun(np.noun)
    x = Var("x", sort)
    if np.det in UNIVERSAL_DETS or np.det in ("no", "not-every"):
        body = vp(x)
        rel = _restriction_formula(np, lex, x)
        if rel is not None:
            body = Implies(rel, body)
        if np.det == "no":
            return Not(Quant(sx.EXISTS, x, None,
                             body if rel is None else And(rel, vp(x)))), state, []
        tau_form = substitute(body, x, Binder(sx.TAU, x, body))
        if np.det == "not-every":
            return Not(tau_form), state, []
        return tau_form, state, []
    term, state, extra = _np_term(np, lex, state, cfg, position="subject")
    return vp(term), state, extra
