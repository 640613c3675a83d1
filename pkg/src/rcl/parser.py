"""RCL parser: declarations, diagnostics with spans, and canonical output.

The grammar is line-friendly but whitespace-insensitive:

    decl      := kind | individual | relation | fact | rule | chain
               | procedure | trace
    kind      := "kind" IDENT "<:" CATEGORY
    individual:= SUGAR IDENT | KINDNAME IDENT
    relation  := "relation" IDENT "(" CATEGORY "," CATEGORY ")" ["base"]
    fact      := IDENT "(" IDENT "," IDENT ")" ["during" "[" INT "," INT "]"]
    rule      := "rule" ATOM ":-" ATOM {"," ATOM} "."
    atom      := PRED "(" TERM ["," TERM] ")"
    chain     := "chain" IDENT "=" IDENT "o" IDENT
    procedure := "procedure" IDENT ["max" INT] "{" step+ "}"
    step      := "step" IDENT ":" IDENT "by" IDENT ["requires" IDENT]
    trace     := "trace" IDENT "{" event+ "}"
    event     := "event" INT IDENT "by" IDENT

SUGAR is one of role/right/activity/person/state/process and declares an
individual of the matching built-in kind. Rules and chains are auto-named
rule_1, rule_2, ... and chain_1, chain_2, ... in declaration order.

Errors never abort: each malformed declaration yields a diagnostic and the
parser resynchronizes at the next plausible declaration opener at the start
of a line, so later declarations always survive.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lexer import ERROR, IDENT, INT, KEYWORD, PUNCT, VAR, SourceSpan, Token, tokenize
from .model import Category, Interval
from .procedures import Event, Procedure, ProcessTrace, Step
from .rules import Atom, ChainSpec, Rule

#: surface keyword -> taxonomy node, for kind and relation declarations
CATEGORY_KEYWORDS: dict[str, Category] = {
    "continuant": Category.CONTINUANT,
    "independent": Category.INDEPENDENT,
    "person": Category.INDEPENDENT,
    "dependent": Category.DEPENDENT,
    "realizable": Category.REALIZABLE,
    "role": Category.ROLE,
    "procedure": Category.PROCEDURE,
    "right": Category.RIGHT,
    "occurrent": Category.OCCURRENT,
    "process": Category.PROCESS,
    "occurrence": Category.ACTIVITY_OCCURRENCE,
    "region": Category.TEMPORAL_REGION,
    "universal": Category.UNIVERSAL,
    "activity": Category.ACTIVITY_KIND,
    "state": Category.STATE,
}

#: taxonomy node -> canonical surface keyword (person normalizes away)
CANONICAL_CATEGORY: dict[Category, str] = {
    node: kw for kw, node in CATEGORY_KEYWORDS.items() if kw != "person"
}

#: sugar keyword -> built-in kind it declares an individual of
INDIVIDUAL_SUGAR = ("role", "right", "activity", "person", "state", "process")

_DECL_KEYWORDS = frozenset(
    {"kind", "relation", "rule", "chain", "procedure", "trace", *INDIVIDUAL_SUGAR}
)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: SourceSpan


@dataclass(frozen=True)
class KindDecl:
    name: str
    category: Category
    span: SourceSpan


@dataclass(frozen=True)
class IndividualDecl:
    name: str
    kind: str
    span: SourceSpan


@dataclass(frozen=True)
class RelationDecl:
    name: str
    subject: Category
    obj: Category
    base_only: bool
    span: SourceSpan


@dataclass(frozen=True)
class FactDecl:
    predicate: str
    subject: str
    obj: str
    extent: Interval | None
    span: SourceSpan


@dataclass(frozen=True)
class RuleDecl:
    rule: Rule
    span: SourceSpan


@dataclass(frozen=True)
class ChainDecl:
    chain: ChainSpec
    span: SourceSpan


@dataclass(frozen=True)
class ProcedureDecl:
    procedure: Procedure
    span: SourceSpan


@dataclass(frozen=True)
class TraceDecl:
    trace: ProcessTrace
    span: SourceSpan


Decl = (
    KindDecl
    | IndividualDecl
    | RelationDecl
    | FactDecl
    | RuleDecl
    | ChainDecl
    | ProcedureDecl
    | TraceDecl
)


@dataclass(frozen=True)
class Ast:
    decls: tuple[Decl, ...]

    def rules(self) -> list[Rule]:
        return [d.rule for d in self.decls if isinstance(d, RuleDecl)]

    def chains(self) -> list[ChainSpec]:
        return [d.chain for d in self.decls if isinstance(d, ChainDecl)]

    def procedures(self) -> dict[str, Procedure]:
        return {d.procedure.name: d.procedure for d in self.decls if isinstance(d, ProcedureDecl)}

    def traces(self) -> dict[str, ProcessTrace]:
        return {d.trace.name: d.trace for d in self.decls if isinstance(d, TraceDecl)}


class _ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span


_EOF_SPAN_LEN = 1


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.decls: list[Decl] = []
        self.diagnostics: list[Diagnostic] = []
        self.rule_count = 0
        self.chain_count = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def here(self) -> SourceSpan:
        tok = self.peek()
        if tok is not None:
            return tok.span
        if self.tokens:
            last = self.tokens[-1].span
            return SourceSpan(last.line, last.column + last.length, _EOF_SPAN_LEN)
        return SourceSpan(1, 1, _EOF_SPAN_LEN)

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise _ParseError("unexpected end of input", self.here())
        self.pos += 1
        return tok

    def expect_punct(self, lexeme: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != PUNCT or tok.lexeme != lexeme:
            got = tok.lexeme if tok else "end of input"
            raise _ParseError(f"expected {lexeme!r}, found {got!r}", self.here())
        return self.take()

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != KEYWORD or tok.lexeme != word:
            got = tok.lexeme if tok else "end of input"
            raise _ParseError(f"expected keyword {word!r}, found {got!r}", self.here())
        return self.take()

    def expect_ident(self, what: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != IDENT:
            got = tok.lexeme if tok else "end of input"
            raise _ParseError(f"expected {what}, found {got!r}", self.here())
        return self.take()

    def expect_int(self, what: str) -> int:
        tok = self.peek()
        if tok is None or tok.kind != INT:
            got = tok.lexeme if tok else "end of input"
            raise _ParseError(f"expected {what}, found {got!r}", self.here())
        return int(self.take().lexeme)

    def expect_category(self) -> Category:
        tok = self.peek()
        if tok is None or tok.kind != KEYWORD or tok.lexeme not in CATEGORY_KEYWORDS:
            got = tok.lexeme if tok else "end of input"
            raise _ParseError(f"expected category name, found {got!r}", self.here())
        return CATEGORY_KEYWORDS[self.take().lexeme]

    def error(self, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(Diagnostic("error", message, span))

    # -- recovery ----------------------------------------------------------

    def synchronize(self) -> None:
        """Skip to the next token that can open a declaration at the start
        of a line (or a declaration keyword anywhere)."""
        while not self.at_end():
            tok = self.peek()
            prev = self.tokens[self.pos - 1] if self.pos > 0 else None
            line_start = prev is None or tok.span.line > prev.span.line
            if tok.kind == KEYWORD and tok.lexeme in _DECL_KEYWORDS:
                if line_start or tok.lexeme in {"kind", "relation", "rule", "chain", "trace"}:
                    return
            if line_start and tok.kind == IDENT:
                nxt = self.peek(1)
                if nxt is not None and (
                    (nxt.kind == PUNCT and nxt.lexeme == "(") or nxt.kind == IDENT
                ):
                    return
            self.pos += 1

    # -- declarations ------------------------------------------------------

    def parse_all(self) -> None:
        while not self.at_end():
            tok = self.peek()
            if tok.kind == ERROR:
                self.error(f"unknown character {tok.lexeme!r}", tok.span)
                self.pos += 1
                continue
            start = self.pos
            try:
                self.parse_decl()
            except _ParseError as exc:
                self.error(exc.message, exc.span)
                if self.pos == start:
                    self.pos += 1
                self.synchronize()

    def parse_decl(self) -> None:
        tok = self.peek()
        if tok.kind == KEYWORD:
            word = tok.lexeme
            if word == "kind":
                self.parse_kind()
            elif word == "relation":
                self.parse_relation()
            elif word == "rule":
                self.parse_rule()
            elif word == "chain":
                self.parse_chain()
            elif word == "procedure":
                self.parse_procedure()
            elif word == "trace":
                self.parse_trace()
            elif word in INDIVIDUAL_SUGAR:
                span = self.take().span
                name = self.expect_ident("individual name").lexeme
                self.decls.append(IndividualDecl(name, word, span))
            else:
                raise _ParseError(f"unexpected keyword {word!r}", tok.span)
            return
        if tok.kind == IDENT:
            nxt = self.peek(1)
            if nxt is not None and nxt.kind == PUNCT and nxt.lexeme == "(":
                self.parse_fact()
                return
            if nxt is not None and nxt.kind == IDENT:
                kind = self.take()
                name = self.take()
                self.decls.append(IndividualDecl(name.lexeme, kind.lexeme, kind.span))
                return
            raise _ParseError(
                f"expected a declaration, found bare identifier {tok.lexeme!r}", tok.span
            )
        raise _ParseError(f"expected a declaration, found {tok.lexeme!r}", tok.span)

    def parse_kind(self) -> None:
        span = self.take().span
        name = self.expect_ident("kind name").lexeme
        self.expect_punct("<:")
        category = self.expect_category()
        self.decls.append(KindDecl(name, category, span))

    def parse_relation(self) -> None:
        span = self.take().span
        name = self.expect_ident("relation name").lexeme
        self.expect_punct("(")
        subject = self.expect_category()
        self.expect_punct(",")
        obj = self.expect_category()
        self.expect_punct(")")
        base_only = False
        tok = self.peek()
        if tok is not None and tok.kind == KEYWORD and tok.lexeme == "base":
            self.take()
            base_only = True
        self.decls.append(RelationDecl(name, subject, obj, base_only, span))

    def parse_fact(self) -> None:
        pred = self.take()
        self.expect_punct("(")
        subject = self.expect_ident("individual name").lexeme
        self.expect_punct(",")
        obj = self.expect_ident("individual name").lexeme
        self.expect_punct(")")
        extent: Interval | None = None
        tok = self.peek()
        if tok is not None and tok.kind == KEYWORD and tok.lexeme == "during":
            during_span = self.take().span
            self.expect_punct("[")
            start = self.expect_int("interval start")
            self.expect_punct(",")
            end = self.expect_int("interval end")
            self.expect_punct("]")
            if start > end:
                raise _ParseError(f"empty interval [{start}, {end}]", during_span)
            extent = Interval(start, end)
        self.decls.append(FactDecl(pred.lexeme, subject, obj, extent, pred.span))

    def parse_atom(self) -> Atom:
        tok = self.peek()
        if tok is None or tok.kind not in (IDENT, KEYWORD):
            got = tok.lexeme if tok else "end of input"
            raise _ParseError(f"expected atom predicate, found {got!r}", self.here())
        pred = self.take()
        self.expect_punct("(")
        args: list[str] = [self.parse_term()]
        tok = self.peek()
        if tok is not None and tok.kind == PUNCT and tok.lexeme == ",":
            self.take()
            args.append(self.parse_term())
        self.expect_punct(")")
        return Atom(pred.lexeme, tuple(args))

    def parse_term(self) -> str:
        tok = self.peek()
        if tok is not None and tok.kind in (IDENT, VAR):
            return self.take().lexeme
        got = tok.lexeme if tok else "end of input"
        raise _ParseError(f"expected variable or individual, found {got!r}", self.here())

    def parse_rule(self) -> None:
        span = self.take().span
        head = self.parse_atom()
        self.expect_punct(":-")
        body = [self.parse_atom()]
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == PUNCT and tok.lexeme == ",":
                self.take()
                body.append(self.parse_atom())
            else:
                break
        self.expect_punct(".")
        self.rule_count += 1
        rule = Rule(f"rule_{self.rule_count}", head, tuple(body))
        self.decls.append(RuleDecl(rule, span))

    def parse_chain(self) -> None:
        span = self.take().span
        derived = self.expect_ident("derived relation name").lexeme
        self.expect_punct("=")
        first = self.expect_ident("relation name").lexeme
        self.expect_keyword("o")
        second = self.expect_ident("relation name").lexeme
        self.chain_count += 1
        chain = ChainSpec(f"chain_{self.chain_count}", derived, first, second)
        self.decls.append(ChainDecl(chain, span))

    def parse_procedure(self) -> None:
        span = self.take().span
        name = self.expect_ident("procedure name").lexeme
        max_duration: int | None = None
        tok = self.peek()
        if tok is not None and tok.kind == KEYWORD and tok.lexeme == "max":
            self.take()
            max_duration = self.expect_int("maximum duration")
        self.expect_punct("{")
        steps: list[Step] = []
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == KEYWORD and tok.lexeme == "step":
                self.take()
                step_name = self.expect_ident("step name").lexeme
                self.expect_punct(":")
                activity = self.expect_ident("activity name").lexeme
                self.expect_keyword("by")
                role = self.expect_ident("role name").lexeme
                guard: str | None = None
                tok = self.peek()
                if tok is not None and tok.kind == KEYWORD and tok.lexeme == "requires":
                    self.take()
                    guard = self.expect_ident("state name").lexeme
                steps.append(Step(step_name, activity, role, guard))
            else:
                break
        self.expect_punct("}")
        try:
            procedure = Procedure(name, tuple(steps), max_duration)
        except ValueError as exc:
            raise _ParseError(str(exc), span) from None
        self.decls.append(ProcedureDecl(procedure, span))

    def parse_trace(self) -> None:
        span = self.take().span
        name = self.expect_ident("trace name").lexeme
        self.expect_punct("{")
        events: list[Event] = []
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == KEYWORD and tok.lexeme == "event":
                self.take()
                time = self.expect_int("event time")
                activity = self.expect_ident("activity name").lexeme
                self.expect_keyword("by")
                actor = self.expect_ident("actor name").lexeme
                events.append(Event(time, activity, actor))
            else:
                break
        self.expect_punct("}")
        if not events:
            raise _ParseError(f"trace {name} has no events", span)
        try:
            trace = ProcessTrace(name, tuple(events))
        except ValueError as exc:
            raise _ParseError(str(exc), span) from None
        self.decls.append(TraceDecl(trace, span))


def parse(tokens: list[Token]) -> tuple[Ast, list[Diagnostic]]:
    """Parse a token stream into declarations plus diagnostics.

    Always returns the declarations of every well-formed prefix; malformed
    declarations are reported and skipped.
    """
    parser = _Parser(tokens)
    parser.parse_all()
    return Ast(tuple(parser.decls)), parser.diagnostics


def parse_source(source: str) -> tuple[Ast, list[Diagnostic]]:
    return parse(tokenize(source))


def _format_atom(atom: Atom) -> str:
    return f"{atom.predicate}({', '.join(atom.args)})"


def _serialize_decl(decl: Decl) -> str:
    if isinstance(decl, KindDecl):
        return f"kind {decl.name} <: {CANONICAL_CATEGORY[decl.category]}"
    if isinstance(decl, IndividualDecl):
        return f"{decl.kind} {decl.name}"
    if isinstance(decl, RelationDecl):
        suffix = " base" if decl.base_only else ""
        return (
            f"relation {decl.name}({CANONICAL_CATEGORY[decl.subject]}, "
            f"{CANONICAL_CATEGORY[decl.obj]}){suffix}"
        )
    if isinstance(decl, FactDecl):
        line = f"{decl.predicate}({decl.subject}, {decl.obj})"
        if decl.extent is not None:
            line += f" during [{decl.extent.start}, {decl.extent.end}]"
        return line
    if isinstance(decl, RuleDecl):
        rule = decl.rule
        body = ", ".join(_format_atom(a) for a in rule.body)
        return f"rule {_format_atom(rule.head)} :- {body}."
    if isinstance(decl, ChainDecl):
        chain = decl.chain
        return f"chain {chain.derived} = {chain.first} o {chain.second}"
    if isinstance(decl, ProcedureDecl):
        proc = decl.procedure
        header = f"procedure {proc.name}"
        if proc.max_duration is not None:
            header += f" max {proc.max_duration}"
        steps = []
        for step in proc.steps:
            text = f"step {step.name}: {step.activity} by {step.role}"
            if step.guard is not None:
                text += f" requires {step.guard}"
            steps.append(text)
        return f"{header} {{ {' '.join(steps)} }}"
    if isinstance(decl, TraceDecl):
        trace = decl.trace
        events = " ".join(
            f"event {e.time} {e.activity} by {e.actor}" for e in trace.events
        )
        return f"trace {trace.name} {{ {events} }}"
    raise TypeError(f"not a declaration: {decl!r}")


def serialize(ast: Ast) -> str:
    """Canonical RCL: one declaration per line, original order, normalized
    whitespace. Parsing the output reproduces an equal Ast."""
    if not ast.decls:
        return ""
    return "\n".join(_serialize_decl(d) for d in ast.decls) + "\n"
