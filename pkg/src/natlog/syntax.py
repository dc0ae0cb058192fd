"""Categories, derivations, the lexicon, and the controlled-fragment parser.

Derivations are binary trees of function application over slash categories.
Category strings use CCG-style notation with a monotonicity mark on each
argument slot::

    N                     atomic
    S\\NP[+]               intransitive predicate, upward subject slot
    (S\\NP[+])/NP[+]       transitive verb
    (S/(S\\NP[+])[+])/N[-]  universal determiner in subject position
                          (downward restrictor slot, upward scope slot)

A mark in ``[...]`` follows the argument it describes; ``+`` is an upward
slot, ``-`` downward, ``=`` flat. An omitted mark defaults to ``+``.

The fragment grammar (deterministic, parsed by recursive descent):

    Sentence := NP VP
    NP       := Det Nbar | Nbar                (bare nominals head as NP)
    Nbar     := Adj* N (PP | RelCl)?
    PP       := Prep NP
    RelCl    := "that" VP
    VP       := ("do")? ("not")? Adv* V (NP | PP)? (Adv | PP)*
              | "be" ("not")? Adv* (Adj | PP | NP | VP-core)

Attachment is greedy and low: a nominal grabs at most one following PP,
remaining PPs attach to the verb phrase. Subject dets use the generalized
quantifier category so that the determiner, not the verb, controls the
polarity of the restrictor and the scope.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .core import Mono, Token
from .errors import CombinationError, NoParseError, OovError, SchemaError

ATOMS = ("S", "NP", "N", "PP")


class Slash(enum.Enum):
    FORWARD = "/"
    BACKWARD = "\\"


@dataclass(frozen=True)
class Category:
    """Atomic symbol or a slash category with one marked argument slot."""

    atom: Optional[str] = None
    result: Optional["Category"] = None
    slash: Optional[Slash] = None
    argument: Optional["Category"] = None
    slot_mono: Optional[Mono] = None

    def __post_init__(self):
        if self.atom is not None:
            if self.atom not in ATOMS:
                raise ValueError(f"unknown atomic category: {self.atom!r}")
            if self.result or self.argument or self.slash or self.slot_mono:
                raise ValueError("atomic category cannot carry functional structure")
        else:
            if not (self.result and self.argument and self.slash and self.slot_mono):
                raise ValueError("functional category requires result, slash, argument, slot mark")

    @property
    def is_atomic(self) -> bool:
        return self.atom is not None

    def skeleton(self) -> str:
        """Category string without monotonicity marks (used for unification)."""
        if self.is_atomic:
            return self.atom
        res = self.result.skeleton()
        arg = self.argument.skeleton()
        if not self.result.is_atomic:
            res = f"({res})"
        if not self.argument.is_atomic:
            arg = f"({arg})"
        return f"{res}{self.slash.value}{arg}"

    def render(self) -> str:
        if self.is_atomic:
            return self.atom
        res = self.result.render()
        arg = self.argument.render()
        if not self.result.is_atomic:
            res = f"({res})"
        if not self.argument.is_atomic:
            arg = f"({arg})"
        return f"{res}{self.slash.value}{arg}[{self.slot_mono.render()}]"

    def __str__(self):
        return self.render()


def atom(name: str) -> Category:
    return Category(atom=name)


def func(result: Category, slash: Slash, argument: Category, slot: Mono = Mono.UP_SLOT) -> Category:
    return Category(result=result, slash=slash, argument=argument, slot_mono=slot)


S, NP, N, PP = (atom(a) for a in ATOMS)


def parse_category(text: str) -> Category:
    """Parse a category string. Missing slot marks default to ``+``."""
    pos = 0
    text = text.strip()

    def peek():
        return text[pos] if pos < len(text) else ""

    def parse_operand() -> Category:
        nonlocal pos
        if peek() == "(":
            pos += 1
            cat = parse_expr()
            if peek() != ")":
                raise ValueError(f"unbalanced parentheses in category {text!r}")
            pos += 1
            return cat
        for name in sorted(ATOMS, key=len, reverse=True):
            if text.startswith(name, pos):
                pos += len(name)
                return atom(name)
        raise ValueError(f"cannot read category at position {pos} in {text!r}")

    def parse_mark() -> Optional[Mono]:
        nonlocal pos
        if peek() == "[":
            close = text.find("]", pos)
            if close < 0:
                raise ValueError(f"unclosed slot mark in {text!r}")
            mark = Mono.parse(text[pos + 1 : close])
            pos = close + 1
            return mark
        return None

    def parse_expr() -> Category:
        nonlocal pos
        left = parse_operand()
        if parse_mark() is not None:
            # Marks describe argument slots; the leading operand is a result.
            raise ValueError(f"slot mark on a result category in {text!r}")
        while peek() in ("/", "\\"):
            slash = Slash.FORWARD if peek() == "/" else Slash.BACKWARD
            pos += 1
            argument = parse_operand()
            argmark = parse_mark()
            left = func(left, slash, argument, argmark or Mono.UP_SLOT)
        return left

    out = parse_expr()
    if pos != len(text):
        raise ValueError(f"trailing characters in category {text!r}")
    return out


@dataclass(frozen=True)
class Leaf:
    token: Token
    cat: Category

    @property
    def lemma(self) -> str:
        return self.token.lemma


@dataclass(frozen=True)
class Apply:
    """Function application; linear order follows the function's slash."""

    fn: "Derivation"
    arg: "Derivation"
    cat: Category

    def __post_init__(self):
        fcat = self.fn.cat
        if fcat.is_atomic:
            raise CombinationError(f"function child has atomic category {fcat}")
        if fcat.argument.skeleton() != self.arg.cat.skeleton():
            raise CombinationError(
                f"argument category {self.arg.cat} does not fit slot {fcat.argument} of {fcat}"
            )
        if fcat.result.skeleton() != self.cat.skeleton():
            raise CombinationError(f"node category {self.cat} does not match function result {fcat.result}")

    @property
    def fn_first(self) -> bool:
        return self.fn.cat.slash is Slash.FORWARD

    @property
    def children_in_order(self) -> Tuple["Derivation", "Derivation"]:
        return (self.fn, self.arg) if self.fn_first else (self.arg, self.fn)


Derivation = Union[Leaf, Apply]


def leaves(derivation: Derivation) -> List[Leaf]:
    if isinstance(derivation, Leaf):
        return [derivation]
    left, right = derivation.children_in_order
    return leaves(left) + leaves(right)


def yield_of(derivation: Derivation) -> Tuple[str, ...]:
    """Left-to-right leaf lemmas."""
    return tuple(leaf.lemma for leaf in leaves(derivation))


# ---------------------------------------------------------------------------
# Derivation file schema (JSON-shaped nested nodes)
# ---------------------------------------------------------------------------


def derivation_to_document(derivation: Derivation, polarities: Optional[dict] = None) -> dict:
    """Serialize to the nested-node document schema.

    ``polarities`` maps id(node) -> Polarity; when given, nodes carry a
    ``pol`` field with the rendered arrow.
    """

    def node(d: Derivation) -> dict:
        if isinstance(d, Leaf):
            out = {"leaf": {"lemma": d.token.lemma, "surface": d.token.surface, "cat": d.cat.render()}}
        else:
            out = {"apply": {"fn": node(d.fn), "arg": node(d.arg), "cat": d.cat.render()}}
        if polarities is not None and id(d) in polarities:
            key = "leaf" if isinstance(d, Leaf) else "apply"
            out[key]["pol"] = polarities[id(d)].render()
        return out

    return node(derivation)


def load_derivation(document: Union[str, dict]) -> Derivation:
    """Parse and validate a derivation document.

    Raises SchemaError for malformed documents and CombinationError when
    categories at an apply node do not combine; both name the node path.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc

    counter = {"i": 0}

    def build(node, path):
        if not isinstance(node, dict) or len(set(node) & {"leaf", "apply"}) != 1:
            raise SchemaError("node must be an object with exactly one of 'leaf' / 'apply'", path)
        if "leaf" in node:
            body = node["leaf"]
            if not isinstance(body, dict):
                raise SchemaError("leaf body must be an object", path)
            missing = {"lemma", "cat"} - set(body)
            if missing:
                raise SchemaError(f"leaf missing keys {sorted(missing)}", path)
            lemma = body["lemma"]
            if not isinstance(lemma, str) or not lemma:
                raise SchemaError("leaf lemma must be a nonempty string", path)
            surface = body.get("surface", lemma)
            try:
                cat = parse_category(body["cat"])
            except ValueError as exc:
                raise SchemaError(f"bad category: {exc}", path) from exc
            token = Token(lemma=lemma, surface=surface, index=counter["i"])
            counter["i"] += 1
            return Leaf(token, cat)
        body = node["apply"]
        if not isinstance(body, dict):
            raise SchemaError("apply body must be an object", path)
        missing = {"fn", "arg", "cat"} - set(body)
        if missing:
            raise SchemaError(f"apply missing keys {sorted(missing)}", path)
        try:
            cat = parse_category(body["cat"])
        except ValueError as exc:
            raise SchemaError(f"bad category: {exc}", path) from exc
        fn_cat_first = True
        fn_body = body["fn"]
        # Build children in textual order so token indexes match the yield.
        # Order depends on the function's slash, which we only know after
        # parsing the function child's category; probe it first.
        probe = fn_body
        if isinstance(probe, dict) and "leaf" in probe and isinstance(probe["leaf"], dict):
            cat_str = probe["leaf"].get("cat", "")
        elif isinstance(probe, dict) and "apply" in probe and isinstance(probe["apply"], dict):
            cat_str = probe["apply"].get("cat", "")
        else:
            cat_str = ""
        try:
            fn_cat_first = parse_category(cat_str).slash is not Slash.BACKWARD
        except Exception:
            fn_cat_first = True
        if fn_cat_first:
            fn = build(body["fn"], path + "/fn")
            arg = build(body["arg"], path + "/arg")
        else:
            arg = build(body["arg"], path + "/arg")
            fn = build(body["fn"], path + "/fn")
        try:
            return Apply(fn, arg, cat)
        except CombinationError as exc:
            raise CombinationError(str(exc), path) from exc

    return build(document, "")


# ---------------------------------------------------------------------------
# Lexicon
# ---------------------------------------------------------------------------

# Parts of speech used by the fragment parser and the preprocessor.
POS_NOUN = "N"
POS_VERB_I = "VI"
POS_VERB_T = "VT"
POS_ADJ = "ADJ"
POS_ADV = "ADV"
POS_PREP = "P"
POS_DET = "DET"
POS_PRON = "PRON"  # bare NP words such as "something"

# Lemma pairs fused into a single token before parsing.
FUSED = {("a", "few"): "a_few", ("next", "to"): "next_to"}

VP_CAT = func(S, Slash.BACKWARD, NP, Mono.UP_SLOT)  # S\NP[+]


def det_categories(restrictor: Mono, scope: Mono) -> Tuple[Category, Category]:
    """(subject GQ category, object NP/N category) for a determiner."""
    gq = func(func(S, Slash.FORWARD, VP_CAT, scope), Slash.FORWARD, N, restrictor)
    obj = func(NP, Slash.FORWARD, N, restrictor)
    return gq, obj


class Lexicon:
    """Lemma -> list of (category, part of speech).

    Entries for the hard-coded determiners carry both argument slots
    (restrictor and scope) on the subject-position category.
    """

    def __init__(self):
        self._entries: Dict[str, List[Tuple[Category, str]]] = {}
        self._pos: Dict[str, set] = {}

    def add(self, lemma: str, category: Category, pos: str) -> None:
        self._entries.setdefault(lemma, [])
        if (category, pos) not in self._entries[lemma]:
            self._entries[lemma].append((category, pos))
        self._pos.setdefault(lemma, set()).add(pos)

    def __contains__(self, lemma: str) -> bool:
        return lemma in self._entries

    def entries(self, lemma: str) -> List[Tuple[Category, str]]:
        return list(self._entries.get(lemma, []))

    def pos_of(self, lemma: str) -> set:
        return set(self._pos.get(lemma, set()))

    def has_pos(self, lemma: str, pos: str) -> bool:
        return pos in self._pos.get(lemma, set())

    def lemmas_with_pos(self, pos: str) -> List[str]:
        return sorted(l for l, tags in self._pos.items() if pos in tags)

    def det_marks(self, lemma: str) -> Optional[Tuple[Mono, Mono]]:
        """(restrictor, scope) slot marks for a determiner lemma."""
        for cat, pos in self._entries.get(lemma, []):
            if pos == POS_DET and not cat.is_atomic and not cat.result.is_atomic:
                return (cat.slot_mono, cat.result.slot_mono)
        return None

    @staticmethod
    def from_rows(rows: Iterable[Tuple[str, str, str]]) -> "Lexicon":
        lex = Lexicon()
        for lemma, cat_str, pos in rows:
            lex.add(lemma, parse_category(cat_str), pos)
        return lex

    @staticmethod
    def from_tsv(path) -> "Lexicon":
        rows = []
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise SchemaError(f"lexicon line {lineno}: expected 3 tab-separated columns")
                rows.append((parts[0], parts[1], parts[2]))
        return Lexicon.from_rows(rows)


def fuse_multiwords(lemmas: Sequence[str]) -> Tuple[str, ...]:
    """Fuse known multiword units (``a few`` -> ``a_few``) into single tokens."""
    out: List[str] = []
    i = 0
    while i < len(lemmas):
        if i + 1 < len(lemmas) and (lemmas[i], lemmas[i + 1]) in FUSED:
            out.append(FUSED[(lemmas[i], lemmas[i + 1])])
            i += 2
        else:
            out.append(lemmas[i])
            i += 1
    return tuple(out)


# ---------------------------------------------------------------------------
# Fragment parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: Sequence[Token], lexicon: Lexicon):
        self.tokens = tokens
        self.lex = lexicon
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def peek_lemma(self, ahead: int = 0) -> Optional[str]:
        i = self.pos + ahead
        return self.tokens[i].lemma if i < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, why: str):
        tok = self.peek()
        where = f"token {self.pos} ({tok.lemma!r})" if tok else "end of sentence"
        raise NoParseError(f"{why} at {where}")

    def is_pos(self, lemma: Optional[str], pos: str) -> bool:
        return lemma is not None and self.lex.has_pos(lemma, pos)

    def starts_np(self, lemma: Optional[str]) -> bool:
        if lemma is None:
            return False
        return (
            self.is_pos(lemma, POS_DET)
            or self.is_pos(lemma, POS_NOUN)
            or self.is_pos(lemma, POS_PRON)
            or (self.is_pos(lemma, POS_ADJ) and self._adj_leads_nominal())
        )

    def _adj_leads_nominal(self) -> bool:
        # An adjective starts a bare nominal when the adjective chain ends in a noun.
        i = self.pos
        while i < len(self.tokens) and self.lex.has_pos(self.tokens[i].lemma, POS_ADJ):
            i += 1
        return i < len(self.tokens) and self.lex.has_pos(self.tokens[i].lemma, POS_NOUN)

    # -- grammar ------------------------------------------------------------

    def parse_sentence(self) -> Derivation:
        subj_kind, subj = self.parse_np(subject=True)
        vp = self.parse_vp()
        if self.pos != len(self.tokens):
            self.fail("unexpected trailing material")
        if subj_kind == "gq":
            return Apply(subj, vp, S)
        return Apply(vp, subj, S)

    def parse_np(self, subject: bool) -> Tuple[str, Derivation]:
        tok = self.peek()
        if tok is None:
            self.fail("expected a noun phrase")
        if self.is_pos(tok.lemma, POS_DET):
            det_tok = self.take()
            marks = self.lex.det_marks(det_tok.lemma)
            if marks is None:
                self.fail(f"determiner {det_tok.lemma!r} lacks slot marks")
            gq_cat, obj_cat = det_categories(*marks)
            nbar = self.parse_nbar()
            if subject:
                det = Leaf(det_tok, gq_cat)
                return "gq", Apply(det, nbar, gq_cat.result)
            det = Leaf(det_tok, obj_cat)
            return "np", Apply(det, nbar, NP)
        if self.is_pos(tok.lemma, POS_PRON):
            return "np", Leaf(self.take(), NP)
        # Bare nominal: head noun typed NP, modifiers lifted accordingly.
        return "np", self.parse_nbar(as_np=True)

    def parse_nbar(self, as_np: bool = False) -> Derivation:
        head_atom = NP if as_np else N
        adjs: List[Token] = []
        while True:
            tok = self.peek()
            if tok is None:
                self.fail("expected a noun")
            nxt = self.peek_lemma(1)
            if (
                self.is_pos(tok.lemma, POS_ADJ)
                and nxt is not None
                and (self.is_pos(nxt, POS_ADJ) or self.is_pos(nxt, POS_NOUN))
            ):
                adjs.append(self.take())
                continue
            break
        tok = self.peek()
        if tok is None or not self.is_pos(tok.lemma, POS_NOUN):
            if tok is not None and self.is_pos(tok.lemma, POS_ADJ) and not adjs:
                # Lone adjective used nominally ("in white").
                return Leaf(self.take(), head_atom)
            self.fail("expected a noun")
        node: Derivation = Leaf(self.take(), head_atom)
        # At most one postmodifier: PP or relative clause.
        lemma = self.peek_lemma()
        if lemma == "that" and self.peek_lemma(1) is not None and not self.is_pos(lemma, POS_PREP):
            that_tok = self.take()
            rel_cat = func(func(head_atom, Slash.BACKWARD, head_atom, Mono.UP_SLOT), Slash.FORWARD, VP_CAT)
            vp = self.parse_vp()
            rel = Apply(Leaf(that_tok, rel_cat), vp, rel_cat.result)
            node = Apply(rel, node, head_atom)
        elif self.is_pos(lemma, POS_PREP):
            pp = self.parse_prep_modifier(head_atom)
            node = Apply(pp, node, head_atom)
        for adj in reversed(adjs):
            adj_cat = func(head_atom, Slash.FORWARD, head_atom, Mono.UP_SLOT)
            node = Apply(Leaf(adj, adj_cat), node, head_atom)
        return node

    def parse_prep_modifier(self, target: Category) -> Derivation:
        """PP modifying ``target`` (N, NP, or a verb phrase)."""
        prep_tok = self.take()
        mark = self._prep_mark(prep_tok.lemma)
        mod_cat = func(target, Slash.BACKWARD, target, Mono.UP_SLOT)
        prep_cat = func(mod_cat, Slash.FORWARD, NP, mark)
        _, obj = self.parse_np(subject=False)
        return Apply(Leaf(prep_tok, prep_cat), obj, mod_cat)

    def _prep_mark(self, lemma: str) -> Mono:
        for cat, pos in self.lex.entries(lemma):
            if pos == POS_PREP and not cat.is_atomic:
                return cat.slot_mono
        return Mono.UP_SLOT

    def parse_pp_complement(self) -> Derivation:
        prep_tok = self.take()
        mark = self._prep_mark(prep_tok.lemma)
        prep_cat = func(PP, Slash.FORWARD, NP, mark)
        _, obj = self.parse_np(subject=False)
        return Apply(Leaf(prep_tok, prep_cat), obj, PP)

    def parse_vp(self) -> Derivation:
        pre_advs: List[Token] = []
        while self.is_pos(self.peek_lemma(), POS_ADV) and self.peek_lemma(1) is not None:
            nxt = self.peek_lemma(1)
            if nxt in ("be", "do", "not") or self.is_pos(nxt, POS_VERB_I) or self.is_pos(nxt, POS_VERB_T) or self.is_pos(nxt, POS_ADV):
                pre_advs.append(self.take())
            else:
                break
        lemma = self.peek_lemma()
        if lemma is None:
            self.fail("expected a verb phrase")
        if lemma == "be":
            node = self.parse_copular_vp()
        elif lemma == "do":
            do_tok = self.take()
            aux_cat = func(VP_CAT, Slash.FORWARD, VP_CAT, Mono.UP_SLOT)
            inner = self.parse_neg_or_core()
            node = Apply(Leaf(do_tok, aux_cat), inner, VP_CAT)
        else:
            node = self.parse_neg_or_core()
        for adv in reversed(pre_advs):
            adv_cat = func(VP_CAT, Slash.FORWARD, VP_CAT, Mono.UP_SLOT)
            node = Apply(Leaf(adv, adv_cat), node, VP_CAT)
        return node

    def parse_neg_or_core(self) -> Derivation:
        if self.peek_lemma() == "not":
            not_tok = self.take()
            neg_cat = func(VP_CAT, Slash.FORWARD, VP_CAT, Mono.DOWN_SLOT)
            inner = self.parse_vp_core()
            return Apply(Leaf(not_tok, neg_cat), inner, VP_CAT)
        return self.parse_vp_core()

    def parse_copular_vp(self) -> Derivation:
        be_tok = self.take()
        negated = False
        if self.peek_lemma() == "not":
            not_tok = self.take()
            negated = True
        comp = self.parse_copular_complement()
        comp_cat_skel = comp.cat.skeleton()
        if comp_cat_skel == "PP":
            be_cat = func(VP_CAT, Slash.FORWARD, PP, Mono.UP_SLOT)
        elif comp_cat_skel == "NP":
            be_cat = func(VP_CAT, Slash.FORWARD, NP, Mono.UP_SLOT)
        else:
            be_cat = func(VP_CAT, Slash.FORWARD, VP_CAT, Mono.UP_SLOT)
        if negated:
            neg_arg = comp.cat
            neg_cat = func(VP_CAT, Slash.FORWARD, neg_arg, Mono.DOWN_SLOT)
            comp = Apply(Leaf(not_tok, neg_cat), comp, VP_CAT)
            be_cat = func(VP_CAT, Slash.FORWARD, VP_CAT, Mono.UP_SLOT)
        node = Apply(Leaf(be_tok, be_cat), comp, VP_CAT)
        return self.parse_vp_adjuncts(node)

    def parse_copular_complement(self) -> Derivation:
        lemma = self.peek_lemma()
        if lemma is None:
            self.fail("expected a copular complement")
        if self.is_pos(lemma, POS_PREP):
            return self.parse_pp_complement()
        if self.is_pos(lemma, POS_ADV):
            return self.parse_vp_core()
        is_verb = self.is_pos(lemma, POS_VERB_I) or self.is_pos(lemma, POS_VERB_T)
        if is_verb:
            return self.parse_vp_core()
        if self.is_pos(lemma, POS_ADJ) and not self._complement_is_nominal():
            return Leaf(self.take(), VP_CAT)
        if self.starts_np(lemma):
            _, np_node = self.parse_np(subject=False)
            return np_node
        self.fail("cannot read copular complement")

    def _complement_is_nominal(self) -> bool:
        nxt = self.peek_lemma(1)
        return nxt is not None and (self.is_pos(nxt, POS_NOUN) or self.is_pos(nxt, POS_ADJ))

    def parse_vp_core(self) -> Derivation:
        # Pre-verbal adverbs.
        pre_advs: List[Token] = []
        while self.is_pos(self.peek_lemma(), POS_ADV):
            pre_advs.append(self.take())
        lemma = self.peek_lemma()
        if lemma is None:
            self.fail("expected a verb")
        trans = self.is_pos(lemma, POS_VERB_T)
        intrans = self.is_pos(lemma, POS_VERB_I)
        if not (trans or intrans):
            self.fail(f"{lemma!r} is not a verb")
        verb_tok = self.take()
        nxt = self.peek_lemma()
        node: Derivation
        if trans and self.starts_np(nxt):
            verb_cat = func(VP_CAT, Slash.FORWARD, NP, Mono.UP_SLOT)
            _, obj = self.parse_np(subject=False)
            node = Apply(Leaf(verb_tok, verb_cat), obj, VP_CAT)
        elif intrans:
            node = Leaf(verb_tok, VP_CAT)
        else:
            self.fail(f"transitive verb {verb_tok.lemma!r} lacks an object")
        node = self.parse_vp_adjuncts(node)
        for adv in reversed(pre_advs):
            adv_cat = func(VP_CAT, Slash.FORWARD, VP_CAT, Mono.UP_SLOT)
            node = Apply(Leaf(adv, adv_cat), node, VP_CAT)
        return node

    def parse_vp_adjuncts(self, node: Derivation) -> Derivation:
        while True:
            lemma = self.peek_lemma()
            if self.is_pos(lemma, POS_ADV):
                adv_tok = self.take()
                adv_cat = func(VP_CAT, Slash.BACKWARD, VP_CAT, Mono.UP_SLOT)
                node = Apply(Leaf(adv_tok, adv_cat), node, VP_CAT)
            elif self.is_pos(lemma, POS_PREP):
                pp = self.parse_prep_modifier(VP_CAT)
                node = Apply(pp, node, VP_CAT)
            else:
                return node


def parse_fragment(tokens: Sequence, lexicon: Lexicon) -> Derivation:
    """Deterministically parse a lemma sequence of the controlled fragment.

    Accepts plain lemma strings or Token objects. Raises OovError for
    unknown lemmas and NoParseError for sequences outside the fragment.
    """
    pairs: List[Tuple[str, str]] = []
    for item in tokens:
        if isinstance(item, Token):
            pairs.append((item.lemma, item.surface))
        else:
            pairs.append((str(item), str(item)))
    fused: List[Tuple[str, str]] = []
    i = 0
    while i < len(pairs):
        if i + 1 < len(pairs) and (pairs[i][0], pairs[i + 1][0]) in FUSED:
            lemma = FUSED[(pairs[i][0], pairs[i + 1][0])]
            fused.append((lemma, f"{pairs[i][1]} {pairs[i + 1][1]}".strip()))
            i += 2
        else:
            fused.append(pairs[i])
            i += 1
    toks: List[Token] = []
    for i, (lemma, surface) in enumerate(fused):
        toks.append(Token(lemma=lemma, surface=surface.replace(" ", "_") or lemma, index=i))
    if not toks:
        raise NoParseError("empty sentence")
    for tok in toks:
        if tok.lemma not in lexicon:
            raise OovError(tok.lemma)
    return _Parser(toks, lexicon).parse_sentence()
