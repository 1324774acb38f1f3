"""First-order terms, atoms, Horn clauses and programs.

Variables are positions in a context ``x1..xn`` rather than names. A clause's
context is the list of its distinct variables in order of first occurrence;
the source names are kept only so that the clause can be printed back.

The concrete syntax is Prolog-like::

    % comment
    nat(0).
    nat(s(X)) :- nat(X).
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union


@dataclass(frozen=True, slots=True)
class Var:
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"negative variable index {self.index}")


@dataclass(frozen=True, slots=True)
class App:
    symbol: str
    args: tuple = ()
    # cached: highest variable index below this node, and the hash
    _top: int = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_top", max((_max_var(a) for a in self.args), default=-1))
        object.__setattr__(self, "_hash", hash((self.symbol, self.args)))

    def __hash__(self):
        return self._hash


Term = Union[Var, App]


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(term_depth(a) for a in t.args)


def term_vars(t: Term, out: list | None = None) -> list:
    """Variable indices of ``t`` in left-to-right first-occurrence order."""
    if out is None:
        out = []
    if isinstance(t, Var):
        if t.index not in out:
            out.append(t.index)
    else:
        for a in t.args:
            term_vars(a, out)
    return out


def term_key(t: Term) -> tuple:
    # Total order used wherever a deterministic ordering of terms is needed.
    if isinstance(t, Var):
        return (0, t.index)
    return (1, t.symbol, tuple(term_key(a) for a in t.args))


def _max_var(t: Term) -> int:
    return t.index if isinstance(t, Var) else t._top


@dataclass(frozen=True, slots=True)
class Atom:
    """``predicate(args)`` with every variable drawn from ``x1..x{context_size}``."""

    predicate: str
    args: tuple = ()
    context_size: int = 0
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        top = max((_max_var(a) for a in self.args), default=-1)
        if top >= self.context_size:
            raise ValueError(
                f"variable x{top + 1} outside context of size {self.context_size}"
            )
        object.__setattr__(self, "_hash", hash((self.predicate, self.args, self.context_size)))

    def __hash__(self):
        return self._hash

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> list:
        out: list = []
        for a in self.args:
            term_vars(a, out)
        return out

    def widen(self, context_size: int) -> Atom:
        """The same atom seen in a larger context (the canonical inclusion)."""
        if context_size == self.context_size:
            return self
        return Atom(self.predicate, self.args, context_size)

    def key(self) -> tuple:
        return (self.predicate, tuple(term_key(a) for a in self.args))

    def __str__(self):
        return format_atom(self)


@dataclass(frozen=True, slots=True)
class Clause:
    head: Atom
    body: tuple = ()
    context_size: int = 0
    names: tuple = field(default=(), compare=False)
    existentials: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        for a in (self.head, *self.body):
            if a.context_size != self.context_size:
                raise ValueError("head and body must share the clause context")
        head_vars = set(self.head.variables())
        ex: list = []
        for b in self.body:
            for v in b.variables():
                if v not in head_vars and v not in ex:
                    ex.append(v)
        object.__setattr__(self, "existentials", tuple(ex))

    @property
    def existential_vars(self) -> frozenset:
        return frozenset(self.existentials)

    @property
    def is_fact(self) -> bool:
        return not self.body

    def __str__(self):
        return format_clause(self)


@dataclass(frozen=True, slots=True)
class Signature:
    """Function and predicate symbols with arities, in order of first use."""

    functions: tuple = ()
    predicates: tuple = ()

    @property
    def function_symbols(self) -> dict:
        return dict(self.functions)

    @property
    def predicate_symbols(self) -> dict:
        return dict(self.predicates)

    @property
    def constants(self) -> list:
        return [f for f, k in self.functions if k == 0]

    def merge(self, other: Signature) -> Signature:
        funcs = dict(self.functions)
        preds = dict(self.predicates)
        for table, extra, kind in ((funcs, other.functions, "function"),
                                   (preds, other.predicates, "predicate")):
            for name, arity in extra:
                if table.setdefault(name, arity) != arity:
                    raise ArityConflict(
                        f"{kind} symbol {name!r} used with arities "
                        f"{table[name]} and {arity}"
                    )
        return Signature(tuple(funcs.items()), tuple(preds.items()))


@dataclass(frozen=True, slots=True)
class Program:
    signature: Signature = Signature()
    clauses: tuple = ()
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.signature, self.clauses)))

    def __hash__(self):
        return self._hash

    def clause(self, index: int) -> Clause:
        """Clause by its 1-based position in the source."""
        if not 1 <= index <= len(self.clauses):
            raise IndexError(f"no clause {index}")
        return self.clauses[index - 1]

    def numbered(self) -> Iterator[tuple]:
        return enumerate(self.clauses, start=1)

    def __len__(self):
        return len(self.clauses)

    def __str__(self):
        return "\n".join(format_clause(c) for c in self.clauses)


# ---------------------------------------------------------------- printing


def format_term(t: Term, bound: int | None = None, names: Sequence | None = None) -> str:
    """Print ``t``; with ``bound`` set, indices >= bound print as z1, z2, ..."""
    if isinstance(t, Var):
        if names is not None and t.index < len(names):
            return names[t.index]
        if bound is not None and t.index >= bound:
            return f"z{t.index - bound + 1}"
        return f"x{t.index + 1}"
    if not t.args:
        return t.symbol
    inner = ",".join(format_term(a, bound, names) for a in t.args)
    return f"{t.symbol}({inner})"


def format_atom(atom: Atom, bound: int | None = None, names: Sequence | None = None) -> str:
    if not atom.args:
        return atom.predicate
    inner = ",".join(format_term(a, bound, names) for a in atom.args)
    return f"{atom.predicate}({inner})"


def format_clause(clause: Clause, canonical: bool = False) -> str:
    """Program syntax; ``canonical`` prints variables as ``x1, x2, ...`` instead."""
    if canonical:
        names = None
    else:
        names = clause.names or [f"X{i + 1}" for i in range(clause.context_size)]
    head = format_atom(clause.head, names=names)
    if not clause.body:
        return head + "."
    body = ", ".join(format_atom(b, names=names) for b in clause.body)
    return f"{head} :- {body}."


# ---------------------------------------------------------------- parsing


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class ArityConflict(ParseError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<space>[ \t\r\f]+)
  | (?P<newline>\n)
  | (?P<comment>%[^\n]*)
  | (?P<neck>:-)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<sym>[a-z0-9][A-Za-z0-9_]*)
  | (?P<punct>[(),.])
    """,
    re.VERBOSE,
)

_CANONICAL_VAR = re.compile(r"([xz])([1-9][0-9]*)$")


@dataclass(slots=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    toks = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "newline":
            line += 1
            line_start = m.end()
        elif kind not in ("space", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, canonical: bool = False, bound: int | None = None):
        self.toks = _tokenize(text)
        self.i = 0
        self.canonical = canonical
        self.bound = bound
        self.var_names: list = []
        self.functions: dict = {}
        self.predicates: dict = {}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, message: str):
        raise ParseError(message, self.tok.line, self.tok.col)

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind == "eof":
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        tok = self.tok
        self.i += 1
        return tok

    def declare(self, table: dict, kind: str, name: str, arity: int, tok: _Tok):
        if table.setdefault(name, arity) != arity:
            raise ArityConflict(
                f"{kind} symbol {name!r} used with arities {table[name]} and {arity}",
                tok.line, tok.col,
            )

    def variable(self, name: str) -> Var:
        if name == "_":
            name = f"_{len(self.var_names)}"
            while name in self.var_names:
                name += "_"
        if name not in self.var_names:
            self.var_names.append(name)
        return Var(self.var_names.index(name))

    def canonical_variable(self, text: str) -> Var | None:
        m = _CANONICAL_VAR.match(text)
        if not (self.canonical and m):
            return None
        k = int(m.group(2)) - 1
        if m.group(1) == "x":
            return Var(k)
        if self.bound is None:
            self.fail("existential variable without a declared bound context")
        return Var(self.bound + k)

    def term(self) -> Term:
        tok = self.tok
        if tok.kind == "var":
            self.i += 1
            return self.variable(tok.text)
        if tok.kind != "sym":
            self.fail(f"expected a term, found {tok.text or 'end of input'!r}")
        self.i += 1
        args = self.arguments()
        if not args:
            v = self.canonical_variable(tok.text)
            if v is not None:
                return v
        self.declare(self.functions, "function", tok.text, len(args), tok)
        return App(tok.text, tuple(args))

    def arguments(self) -> list:
        if self.tok.text != "(":
            return []
        self.i += 1
        args = [self.term()]
        while self.tok.text == ",":
            self.i += 1
            args.append(self.term())
        self.expect(")")
        return args

    def raw_atom(self) -> tuple:
        tok = self.tok
        if tok.kind != "sym":
            self.fail(f"expected a predicate, found {tok.text or 'end of input'!r}")
        self.i += 1
        args = self.arguments()
        self.declare(self.predicates, "predicate", tok.text, len(args), tok)
        return tok.text, tuple(args)

    def atom_list(self) -> list:
        atoms = [self.raw_atom()]
        while self.tok.text == ",":
            self.i += 1
            atoms.append(self.raw_atom())
        return atoms

    def clause(self) -> Clause:
        self.var_names = []
        head = self.raw_atom()
        body = []
        if self.tok.kind == "neck":
            self.i += 1
            body = self.atom_list()
        self.expect(".")
        n = len(self.var_names)
        return Clause(
            Atom(head[0], head[1], n),
            tuple(Atom(p, a, n) for p, a in body),
            n,
            tuple(self.var_names),
        )

    def signature(self) -> Signature:
        return Signature(tuple(self.functions.items()), tuple(self.predicates.items()))


def parse_program(text: str) -> Program:
    """Parse ``.lp`` source; the signature is inferred from use."""
    p = _Parser(text)
    clauses = []
    while p.tok.kind != "eof":
        clauses.append(p.clause())
    return Program(p.signature(), tuple(clauses))


def load_program(path) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())


@dataclass(frozen=True)
class Query:
    """Goal atoms over one context, with the source variable names."""

    atoms: tuple
    names: tuple
    signature: Signature

    @property
    def context_size(self) -> int:
        return len(self.names)


def parse_query(text: str, signature: Signature | None = None) -> Query:
    """Parse ``a1, ..., ak`` (an optional trailing ``.`` is allowed).

    Variables are numbered by first occurrence across all goals; symbols must
    agree in arity with ``signature`` when given.
    """
    p = _Parser(text)
    raw = p.atom_list()
    if p.tok.text == ".":
        p.i += 1
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r} after query")
    n = len(p.var_names)
    sig = p.signature()
    if signature is not None:
        signature.merge(sig)
    return Query(tuple(Atom(q, a, n) for q, a in raw), tuple(p.var_names), sig)


def parse_atom(text: str, context_size: int | None = None, *,
               canonical: bool = False, bound: int | None = None) -> Atom:
    """Parse a single atom.

    With ``canonical=True`` the printed forms ``x1, x2, ...`` and ``z1, z2, ...``
    (the latter numbered after ``bound``) read back as variables, which makes
    :func:`format_atom` output round-trip. Otherwise uppercase names are
    variables numbered by first occurrence.
    """
    p = _Parser(text, canonical=canonical, bound=bound)
    pred, args = p.raw_atom()
    if p.tok.text == ".":
        p.i += 1
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r} after atom")
    if canonical and p.var_names:
        raise ParseError("canonical atoms use x1, x2, ... rather than named variables")
    needed = max((_max_var(a) for a in args), default=-1) + 1
    n = max(needed, len(p.var_names))
    if context_size is not None:
        if context_size < n:
            raise ParseError(f"atom needs a context of size {n}, got {context_size}")
        n = context_size
    return Atom(pred, tuple(args), n)


# ---------------------------------------------------------- classification


@dataclass(frozen=True)
class Classification:
    witnesses: tuple = ()

    @property
    def existential(self) -> bool:
        return bool(self.witnesses)

    def __str__(self):
        if not self.witnesses:
            return "NonExistential"
        return f"Existential({list(self.witnesses)})"


NonExistential = Classification()


@functools.lru_cache(maxsize=1024)
def classify(program: Program) -> Classification:
    """Existential iff some clause has a body variable missing from its head."""
    return Classification(tuple(i for i, c in program.numbered() if c.existentials))


# ------------------------------------------------------------- enumeration


def enumerate_terms(signature: Signature, n: int, depth: int) -> list:
    """All terms over ``x1..xn`` of depth <= ``depth``, deterministically ordered.

    Variables come first, then each function symbol in signature order with its
    argument tuples in lexicographic order of the depth-1 enumeration.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    layer = [Var(i) for i in range(n)] + [App(f) for f in signature.constants]
    for _ in range(depth):
        nxt = [Var(i) for i in range(n)]
        for f, k in signature.functions:
            if k == 0:
                nxt.append(App(f))
            else:
                nxt.extend(App(f, args) for args in itertools.product(layer, repeat=k))
        layer = nxt
    return layer


def enumerate_atoms(signature: Signature, n: int, depth: int) -> list:
    """Atoms over ``x1..xn`` whose arguments all have depth <= ``depth``."""
    terms = enumerate_terms(signature, n, depth)
    return [
        Atom(p, args, n)
        for p, k in signature.predicates
        for args in itertools.product(terms, repeat=k)
    ]


def distinct(items: Iterable) -> list:
    """Items with duplicates removed, first occurrence kept."""
    seen: set = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out
