"""Structural and reachability formulae: parsing, evaluation, result vectors.

Grammar (keywords are case-insensitive)::

    set     := item (";" item)* [";"]
    item    := ident ":" formula
    formula := "DEADLOCK" | "SAFE" | "BOUND" "(" name ")" cmp int
             | "DEAD" "(" name ")" | "QUASILIVE" "(" name ")" | "LIVE" "(" name ")"
             | ("EF" | "AG") pred
    pred    := pred "|" pred | pred "&" pred | "!" pred | "(" pred ")" | atom
    atom    := "tokens" "(" name ")" cmp (int | "tokens" "(" name ")")
             | "fireable" "(" name ")"
    cmp     := "<=" | "<" | "=" | ">=" | ">" | "!="

``!`` binds tighter than ``&``, which binds tighter than ``|``. A name is an
identifier or a double-quoted string. ``#`` starts a comment.
"""
from __future__ import annotations

import enum
import operator
import random
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

import numpy as np

from .engine import ExploreOptions, ReachabilityGraph, live_transitions, run_exploration
from .net import PetriNet

DEFAULT_MAX_DEPTH = 64

CMP_OPS = {
    "<=": operator.le, "<": operator.lt, "=": operator.eq,
    ">=": operator.ge, ">": operator.gt, "!=": operator.ne,
}


class Verdict(str, enum.Enum):
    T = "T"
    F = "F"
    UNKNOWN = "."

    @classmethod
    def of(cls, value: Optional[bool]) -> "Verdict":
        if value is None:
            return cls.UNKNOWN
        return cls.T if value else cls.F


# -- syntax tree ---------------------------------------------------------

@dataclass(frozen=True)
class Tokens:
    place: str


@dataclass(frozen=True)
class Compare:
    left: Tokens
    op: str
    right: Union[int, Tokens]


@dataclass(frozen=True)
class Fireable:
    transition: str


@dataclass(frozen=True)
class Not:
    arg: "Pred"


@dataclass(frozen=True)
class And:
    left: "Pred"
    right: "Pred"


@dataclass(frozen=True)
class Or:
    left: "Pred"
    right: "Pred"


Pred = Union[Compare, Fireable, Not, And, Or]


@dataclass(frozen=True)
class Deadlock:
    pass


@dataclass(frozen=True)
class Safe:
    pass


@dataclass(frozen=True)
class Bound:
    place: str
    op: str
    k: int


@dataclass(frozen=True)
class LivenessAtom:
    transition: str
    level: str  # "L0", "L1" or "L4"


@dataclass(frozen=True)
class Reach:
    quantifier: str  # "EF" or "AG"
    pred: Pred


Formula = Union[Deadlock, Safe, Bound, LivenessAtom, Reach]

_LEVEL_KEYWORDS = {"DEAD": "L0", "QUASILIVE": "L1", "LIVE": "L4"}
_LEVEL_NAMES = {v: k for k, v in _LEVEL_KEYWORDS.items()}


def is_structural(f: Formula) -> bool:
    return not isinstance(f, Reach)


@dataclass
class FormulaSet:
    """Formulae keyed by identifier, kept in lexicographic identifier order."""

    items: list[tuple[str, Formula]] = field(default_factory=list)

    def __post_init__(self):
        self.items = sorted(self.items, key=lambda kv: kv[0])

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[tuple[str, Formula]]:
        return iter(self.items)

    @property
    def identifiers(self) -> list[str]:
        return [k for k, _ in self.items]

    def formulae(self) -> list[Formula]:
        return [f for _, f in self.items]


@dataclass
class ResultVector:
    identifiers: list[str]
    outcomes: list[Verdict]
    diagnostics: dict[str, str] = field(default_factory=dict)

    def __str__(self) -> str:
        return format_vector(self)

    def as_dict(self) -> dict[str, Verdict]:
        return dict(zip(self.identifiers, self.outcomes))


def format_vector(v: ResultVector | list) -> str:
    """One character per formula: ``T``, ``F`` or ``.`` for unknown."""
    outcomes = v.outcomes if isinstance(v, ResultVector) else v
    out = []
    for o in outcomes:
        if not isinstance(o, Verdict):
            o = Verdict.of(o) if o is None or isinstance(o, bool) else Verdict(o)
        out.append(o.value)
    return "".join(out)


# -- parsing -------------------------------------------------------------

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<cmp><=|>=|!=|<|>|=)
  | (?P<punct>[():;&|!])
  | (?P<int>\d+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.\-]*)
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line,
                                     pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            if kind == "string":
                value = bytes(value[1:-1], "utf-8").decode("unicode_escape")
            toks.append(_Tok(kind, value, line, pos - line_start + 1))
        nl = m.group().count("\n")
        if nl:
            line += nl
            line_start = pos + m.group().rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, max_depth: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.max_depth = max_depth

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return FormulaSyntaxError(msg, tok.line, tok.col)

    def take(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def keyword(self, *words) -> bool:
        t = self.tok
        return t.kind == "ident" and t.text.upper() in words

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind in ("string",):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.take()

    def name(self) -> str:
        if self.tok.kind in ("ident", "string", "int"):
            return self.take().text
        raise self.error(f"expected a name, found {self.tok.text or 'end of input'!r}")

    def cmp(self) -> str:
        if self.tok.kind != "cmp":
            raise self.error(f"expected a comparison, found {self.tok.text or 'end of input'!r}")
        return self.take().text

    def integer(self) -> int:
        if self.tok.kind != "int":
            raise self.error(f"expected an integer, found {self.tok.text or 'end of input'!r}")
        return int(self.take().text)

    def parse_set(self) -> FormulaSet:
        items: list[tuple[str, Formula]] = []
        seen: dict[str, _Tok] = {}
        while self.tok.kind != "eof":
            if self.tok.kind not in ("ident", "int", "string"):
                raise self.error(f"expected a formula identifier, found {self.tok.text!r}")
            id_tok = self.take()
            if id_tok.text in seen:
                raise self.error(f"duplicate identifier {id_tok.text!r}", id_tok)
            seen[id_tok.text] = id_tok
            self.expect(":")
            items.append((id_tok.text, self.formula()))
            if self.tok.text == ";" and self.tok.kind == "punct":
                while self.tok.text == ";" and self.tok.kind == "punct":
                    self.take()
            elif self.tok.kind != "eof":
                raise self.error(f"expected ';' between formulae, found {self.tok.text!r}")
        return FormulaSet(items)

    def formula(self) -> Formula:
        t = self.tok
        if self.keyword("DEADLOCK"):
            self.take()
            return Deadlock()
        if self.keyword("SAFE"):
            self.take()
            return Safe()
        if self.keyword("BOUND"):
            self.take()
            self.expect("(")
            p = self.name()
            self.expect(")")
            return Bound(p, self.cmp(), self.integer())
        if self.keyword(*_LEVEL_KEYWORDS):
            level = _LEVEL_KEYWORDS[self.take().text.upper()]
            self.expect("(")
            tname = self.name()
            self.expect(")")
            return LivenessAtom(tname, level)
        if self.keyword("EF", "AG"):
            q = self.take().text.upper()
            return Reach(q, self.pred(1))
        raise self.error(f"expected a formula, found {t.text or 'end of input'!r}")

    def _depth(self, depth):
        if depth > self.max_depth:
            raise self.error(f"formula nesting exceeds the maximum depth {self.max_depth}")

    def pred(self, depth) -> Pred:
        self._depth(depth)
        left = self.conj(depth)
        while self.tok.kind == "punct" and self.tok.text == "|":
            self.take()
            left = Or(left, self.conj(depth + 1))
            depth += 1
            self._depth(depth)
        return left

    def conj(self, depth) -> Pred:
        left = self.unary(depth)
        while self.tok.kind == "punct" and self.tok.text == "&":
            self.take()
            left = And(left, self.unary(depth + 1))
            depth += 1
            self._depth(depth)
        return left

    def unary(self, depth) -> Pred:
        self._depth(depth)
        if self.tok.kind == "punct" and self.tok.text == "!":
            self.take()
            return Not(self.unary(depth + 1))
        if self.tok.kind == "punct" and self.tok.text == "(":
            self.take()
            p = self.pred(depth + 1)
            self.expect(")")
            return p
        return self.atom()

    def atom(self) -> Pred:
        if self.keyword("TOKENS"):
            self.take()
            self.expect("(")
            left = Tokens(self.name())
            self.expect(")")
            op = self.cmp()
            if self.keyword("TOKENS"):
                self.take()
                self.expect("(")
                right: Union[int, Tokens] = Tokens(self.name())
                self.expect(")")
            else:
                right = self.integer()
            return Compare(left, op, right)
        if self.keyword("FIREABLE"):
            self.take()
            self.expect("(")
            tname = self.name()
            self.expect(")")
            return Fireable(tname)
        raise self.error(f"expected an atom, found {self.tok.text or 'end of input'!r}")


def parse_formulae(text: str, max_depth: int = DEFAULT_MAX_DEPTH) -> FormulaSet:
    """Parse a formula file; errors carry the offending line and column."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text, max_depth).parse_set()


# -- printing ------------------------------------------------------------

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")


def _q(name: str) -> str:
    if _NAME_RE.match(name) and name.upper() not in ("TOKENS", "FIREABLE"):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def pred_to_text(p: Pred) -> str:
    if isinstance(p, Compare):
        right = p.right if isinstance(p.right, int) else f"tokens({_q(p.right.place)})"
        return f"tokens({_q(p.left.place)}) {p.op} {right}"
    if isinstance(p, Fireable):
        return f"fireable({_q(p.transition)})"
    if isinstance(p, Not):
        return f"!({pred_to_text(p.arg)})"
    if isinstance(p, And):
        return f"({pred_to_text(p.left)} & {pred_to_text(p.right)})"
    if isinstance(p, Or):
        return f"({pred_to_text(p.left)} | {pred_to_text(p.right)})"
    raise TypeError(p)


def formula_to_text(f: Formula) -> str:
    if isinstance(f, Deadlock):
        return "DEADLOCK"
    if isinstance(f, Safe):
        return "SAFE"
    if isinstance(f, Bound):
        return f"BOUND({_q(f.place)}) {f.op} {f.k}"
    if isinstance(f, LivenessAtom):
        return f"{_LEVEL_NAMES[f.level]}({_q(f.transition)})"
    if isinstance(f, Reach):
        return f"{f.quantifier} {pred_to_text(f.pred)}"
    raise TypeError(f)


def to_text(fs: FormulaSet) -> str:
    return "".join(f"{k}: {formula_to_text(f)};\n" for k, f in fs)


# -- evaluation ----------------------------------------------------------

class UnresolvedName(KeyError):
    pass


def _names_in(p: Pred, places: set, transitions: set) -> None:
    if isinstance(p, Compare):
        places.add(p.left.place)
        if isinstance(p.right, Tokens):
            places.add(p.right.place)
    elif isinstance(p, Fireable):
        transitions.add(p.transition)
    elif isinstance(p, Not):
        _names_in(p.arg, places, transitions)
    else:
        _names_in(p.left, places, transitions)
        _names_in(p.right, places, transitions)


def check_names(net: PetriNet, f: Formula) -> Optional[str]:
    """A diagnostic when ``f`` mentions a name the net lacks, else ``None``."""
    places, transitions = set(), set()
    if isinstance(f, Bound):
        places.add(f.place)
    elif isinstance(f, LivenessAtom):
        transitions.add(f.transition)
    elif isinstance(f, Reach):
        _names_in(f.pred, places, transitions)
    known_p, known_t = set(net.place_names), set(net.transition_names)
    for p in sorted(places - known_p):
        return f"unknown place {p!r}"
    for t in sorted(transitions - known_t):
        return f"unknown transition {t!r}"
    return None


def eval_pred_block(net: PetriNet, p: Pred, block: np.ndarray) -> np.ndarray:
    """Evaluate ``p`` on every row of an ``(n, places)`` marking array."""
    if isinstance(p, Compare):
        left = block[:, net.place_index(p.left.place)]
        right = p.right if isinstance(p.right, int) else block[:, net.place_index(p.right.place)]
        return CMP_OPS[p.op](left, right)
    if isinstance(p, Fireable):
        ok = np.ones(block.shape[0], dtype=bool)
        for pl, w in net.pre(p.transition):
            ok &= block[:, pl] >= w
        return ok
    if isinstance(p, Not):
        return ~eval_pred_block(net, p.arg, block)
    if isinstance(p, And):
        return eval_pred_block(net, p.left, block) & eval_pred_block(net, p.right, block)
    if isinstance(p, Or):
        return eval_pred_block(net, p.left, block) | eval_pred_block(net, p.right, block)
    raise TypeError(p)


def eval_pred(net: PetriNet, p: Pred, m) -> bool:
    """Evaluate ``p`` on a single marking."""
    return bool(eval_pred_block(net, p, np.asarray([m], dtype=np.int64).reshape(1, -1))[0])


def _bound_verdict(op: str, k: int, observed: int, exact: bool) -> Optional[bool]:
    if exact:
        return CMP_OPS[op](observed, k)
    # Only a lower bound is known: the true value v satisfies v >= observed.
    if op in (">=", ">"):
        return True if CMP_OPS[op](observed, k) else None
    if op in ("<=", "<", "="):
        return False if observed > k or (op == "<" and observed >= k) else None
    if op == "!=":
        return True if observed > k else None
    return None


def evaluate(net: PetriNet, fs: FormulaSet, opts: ExploreOptions | None = None) -> ResultVector:
    """Decide every formula of ``fs`` on ``net`` with one exploration.

    Reachability formulae are checked on the fly, batch by batch, and the
    exploration stops as soon as every formula is settled. Whatever is
    undecided when a budget runs out is reported as unknown.
    """
    opts = opts or ExploreOptions()
    ids = fs.identifiers
    verdicts: dict[str, Optional[bool]] = {}
    diagnostics: dict[str, str] = {}
    pending_reach: dict[str, Reach] = {}
    needs_full = False
    needs_graph = False
    for ident, f in fs:
        problem = check_names(net, f)
        if problem:
            verdicts[ident] = None
            diagnostics[ident] = problem
            continue
        if isinstance(f, Reach):
            pending_reach[ident] = f
        else:
            needs_full = True
            if isinstance(f, LivenessAtom) and f.level == "L4":
                needs_graph = True

    # EF p is settled by a witness of p; AG p by a witness of !p.
    targets = {i: (f.pred if f.quantifier == "EF" else Not(f.pred))
               for i, f in pending_reach.items()}
    found: dict[str, bool] = {}

    def on_states(block, first):
        for ident, target in targets.items():
            if ident in found:
                continue
            if eval_pred_block(net, target, block).any():
                found[ident] = True
        return not needs_full and len(found) == len(targets)

    if not targets and not needs_full:
        return ResultVector(ids, [Verdict.of(verdicts.get(i)) for i in ids], diagnostics)

    run_opts = opts.with_(store_graph=needs_graph)
    result, ex = run_exploration(net, run_opts, on_states=on_states if targets else None, batch=4096)
    exact = result.exhausted

    for ident, f in pending_reach.items():
        if ident in found:
            verdicts[ident] = f.quantifier == "EF"
        elif exact:
            verdicts[ident] = f.quantifier == "AG"
        else:
            verdicts[ident] = None
            diagnostics[ident] = f"budget exhausted ({result.stop_reason})"

    live = None
    for ident, f in fs:
        if ident in verdicts:
            continue
        v: Optional[bool] = None
        if isinstance(f, Deadlock):
            v = True if result.dead_marking is not None else (False if exact else None)
        elif isinstance(f, Safe):
            over = any(b > 1 for b in result.place_bounds)
            v = False if over else (True if exact else None)
        elif isinstance(f, Bound):
            observed = result.place_bounds[net.place_index(f.place)]
            v = _bound_verdict(f.op, f.k, observed, exact)
        elif isinstance(f, LivenessAtom):
            fired = f.transition in result.fired
            if f.level == "L0":
                v = False if fired else (True if exact else None)
            elif f.level == "L1":
                v = True if fired else (False if exact else None)
            elif exact:
                if live is None:
                    graph = ReachabilityGraph(net, ex.markings(), ex.edges())
                    live = live_transitions(graph)
                v = live[net.transition_index(f.transition)]
        verdicts[ident] = v
        if v is None:
            diagnostics[ident] = f"budget exhausted ({result.stop_reason})"
    return ResultVector(ids, [Verdict.of(verdicts[i]) for i in ids], diagnostics)


# -- sampling ------------------------------------------------------------

def _random_pred(rng: random.Random, net: PetriNet, depth: int, hint_max: int) -> Pred:
    if depth <= 0 or rng.random() < 0.35:
        if net.n_transitions and (not net.n_places or rng.random() < 0.3):
            return Fireable(rng.choice(net.transition_names))
        p = rng.choice(net.place_names)
        op = rng.choice(list(CMP_OPS))
        if rng.random() < 0.2 and net.n_places > 1:
            return Compare(Tokens(p), op, Tokens(rng.choice(net.place_names)))
        return Compare(Tokens(p), op, rng.randint(0, max(hint_max, 1)))
    kind = rng.random()
    if kind < 0.2:
        return Not(_random_pred(rng, net, depth - 1, hint_max))
    cls = And if kind < 0.6 else Or
    return cls(_random_pred(rng, net, depth - 1, hint_max),
               _random_pred(rng, net, depth - 1, hint_max))


def sample_formulae(net: PetriNet, count: int, seed: int,
                    kinds: tuple[str, ...] = ("structural", "reachability"),
                    max_depth: int = 3) -> FormulaSet:
    """A reproducible random formula set over the names of ``net``."""
    if not net.n_places and not net.n_transitions:
        raise ValueError("cannot sample formulae over an empty net")
    rng = random.Random(seed)
    hint = max(max(net.initial, default=1), 1) + 1
    width = len(str(max(count - 1, 0)))
    items = []
    for i in range(count):
        kind = rng.choice(kinds)
        if kind == "structural":
            choice = rng.randrange(4)
            if choice == 0 or (not net.n_places and choice in (1, 2)):
                f: Formula = Deadlock()
            elif choice == 1:
                f = Safe()
            elif choice == 2:
                f = Bound(rng.choice(net.place_names), rng.choice(list(CMP_OPS)),
                          rng.randint(0, hint))
            elif net.n_transitions:
                f = LivenessAtom(rng.choice(net.transition_names), rng.choice(["L0", "L1", "L4"]))
            else:
                f = Deadlock()
        else:
            if not net.n_places and not net.n_transitions:
                f = Deadlock()
            else:
                f = Reach(rng.choice(["EF", "AG"]), _random_pred(rng, net, max_depth, hint))
        items.append((f"f{i:0{width}d}", f))
    return FormulaSet(items)
