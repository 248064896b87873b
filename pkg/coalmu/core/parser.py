# coalmu/core/parser.py
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List
import logging

import pyparsing as pp

from coalmu.core.exceptions import FormulaSyntaxError
from coalmu.core.formula import And, Formula, Modal, Mu, Nu, Or, Sequent, Var
from coalmu.core.signature import (
    COALITION,
    GRADED,
    KRIPKE,
    MONOTONE,
    PROBABILISTIC,
    Modality,
    Signature,
)

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()

KEYWORDS = ("mu", "nu", "box", "dia")


def _modality_tokens(kind: str) -> pp.ParserElement:
    if kind in (KRIPKE, MONOTONE):
        box = pp.Keyword("box").set_parse_action(lambda: Modality(kind))
        dia = pp.Keyword("dia").set_parse_action(lambda: Modality(kind, True))
        return box | dia
    if kind == GRADED:
        lower = pp.Regex(r"<\s*(?P<n>\d+)\s*>")
        upper = pp.Regex(r"\[\s*(?P<n>\d+)\s*\]")
        lower.set_parse_action(lambda t: Modality(kind, False, int(t["n"])))
        upper.set_parse_action(lambda t: Modality(kind, True, int(t["n"])))
        return lower | upper
    if kind == PROBABILISTIC:
        number = r"(?P<num>\d+)\s*(?:/\s*(?P<den>\d+)\s*)?"
        lower = pp.Regex(r"<\s*" + number + r">")
        upper = pp.Regex(r"\[\s*" + number + r"\]")
        lower.set_parse_action(lambda t: Modality(kind, False, _fraction(t)))
        upper.set_parse_action(lambda t: Modality(kind, True, _fraction(t)))
        return lower | upper
    agents = r"\{(?P<agents>[\d\s,]*)\}"
    base = pp.Regex(r"\[\s*" + agents + r"\s*\]")
    dual = pp.Regex(r"<\s*" + agents + r"\s*>")
    base.set_parse_action(lambda t: Modality(kind, False, _coalition(t["agents"])))
    dual.set_parse_action(lambda t: Modality(kind, True, _coalition(t["agents"])))
    return base | dual


def _fraction(tokens) -> Fraction:
    den = tokens.get("den")
    if den is not None and int(den) == 0:
        raise pp.ParseFatalException("zero denominator in probability index")
    return Fraction(int(tokens["num"]), int(den) if den is not None else 1)


def _coalition(text: str) -> frozenset:
    members = [part.strip() for part in text.split(",") if part.strip()]
    return frozenset(int(m) for m in members)


def _fold(tag: str):
    def action(tokens):
        items = list(tokens)
        node = items[0]
        for item in items[1:]:
            node = (tag, node, item)
        return [node]

    return action


@lru_cache()
def _grammar(kind: str) -> pp.ParserElement:
    """Grammar producing raw syntax trees for one logic"""
    keyword = pp.MatchFirst(pp.Keyword(word) for word in KEYWORDS)
    ident = ~keyword + pp.Regex(r"[A-Za-z_][A-Za-z0-9_']*")
    lpar, rpar = pp.Suppress("("), pp.Suppress(")")

    formula = pp.Forward()
    unary = pp.Forward()

    binder = (pp.Keyword("mu") | pp.Keyword("nu")) + ident + pp.Suppress(".") + formula
    binder.set_parse_action(lambda t: [(t[0], t[1], t[2])])

    variable = ident.copy().set_parse_action(lambda t: [("var", t[0], True)])
    negated_variable = (pp.Suppress("~") + ident).set_parse_action(lambda t: [("var", t[0], False)])
    atom = variable | negated_variable | (lpar + formula + rpar)

    modal = (_modality_tokens(kind) + unary).set_parse_action(lambda t: [("modal", t[0], t[1])])
    general_negation = (pp.Suppress("!") + unary).set_parse_action(lambda t: [("not", t[0])])
    unary <<= modal | general_negation | binder | atom

    conjunction = (unary + pp.ZeroOrMore(pp.Suppress("&") + unary)).set_parse_action(_fold("and"))
    disjunction = (conjunction + pp.ZeroOrMore(pp.Suppress("|") + conjunction)).set_parse_action(
        _fold("or")
    )
    formula <<= binder | disjunction
    return formula


def to_nnf(raw, sig: Signature, negated: bool = False, bound: Dict[str, bool] = None) -> Formula:
    """Push negations inward; bound variables must stay positive"""
    bound = bound or {}
    tag = raw[0]
    if tag == "var":
        _, name, positive = raw
        flipped = negated if positive else not negated
        if name in bound:
            if flipped != bound[name]:
                raise FormulaSyntaxError(f"Bound variable {name} occurs negatively")
            return Var(name)
        return Var(name, not flipped)
    if tag == "not":
        return to_nnf(raw[1], sig, not negated, bound)
    if tag in ("and", "or"):
        left = to_nnf(raw[1], sig, negated, bound)
        right = to_nnf(raw[2], sig, negated, bound)
        if (tag == "and") != negated:
            return And(left, right)
        return Or(left, right)
    if tag == "modal":
        op = raw[1]
        sig.validate(op)
        return Modal(op.negated() if negated else op, to_nnf(raw[2], sig, negated, bound))
    _, name, body = raw
    inner = dict(bound)
    inner[name] = negated
    nnf_body = to_nnf(body, sig, negated, inner)
    if (tag == "mu") != negated:
        return Mu(name, nnf_body)
    return Nu(name, nnf_body)


def parse(text: str, sig: Signature) -> Formula:
    """Parse formula text into negation normal form"""
    if not text.strip():
        raise FormulaSyntaxError("Empty formula", 0)
    try:
        raw = _grammar(sig.kind).parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as exc:
        raise FormulaSyntaxError(f"Cannot parse formula: {exc.msg}", exc.loc) from None
    formula = to_nnf(raw, sig)
    logger.debug(f"Parsed {text!r} for {sig.label()}")
    return formula


def parse_sequent(texts: Iterable[str], sig: Signature) -> Sequent:
    return frozenset(parse(text, sig) for text in texts)


def parse_many(texts: Iterable[str], sig: Signature) -> List[Formula]:
    return [parse(text, sig) for text in texts]
