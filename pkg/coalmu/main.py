# coalmu/main.py
import logging
import sys
from typing import Optional

import click
from pydantic import ValidationError

from coalmu.core.automaton import dump_automaton
from coalmu.core.config import get_settings
from coalmu.core.exceptions import (
    CapExceeded,
    CeilingExceeded,
    CertificateError,
    CoalMuError,
    FormulaSyntaxError,
    GuardednessError,
    ModelFormatError,
    SignatureError,
)
from coalmu.core.extraction import extract_model
from coalmu.core.formula import Formula, make_clean
from coalmu.core.onestep import audit_ruleset
from coalmu.core.parity import EXISTS, dump_arena, solve
from coalmu.core.parser import parse
from coalmu.core.semantics import build_mc_game, evaluate
from coalmu.core.signature import parse_logic
from coalmu.core.tableau import decide_sat, verify_closed
from coalmu.schemas.model import ModelDocument
from coalmu.schemas.run_config import RunConfig
from coalmu.schemas.tableau import TableauDocument
from coalmu.utils.file_storage import file_storage

logger = logging.getLogger(__name__)
settings = get_settings()

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTERNAL = 2
EXIT_SAT = 10
EXIT_UNSAT = 20

# errors caused by the input rather than by the engine
USAGE_ERRORS = (
    FormulaSyntaxError,
    SignatureError,
    GuardednessError,
    ModelFormatError,
    CertificateError,
    ValidationError,
    OSError,
    ValueError,
)


def _fail(exc: Exception) -> None:
    if isinstance(exc, USAGE_ERRORS):
        click.echo(f"Error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    if isinstance(exc, (CeilingExceeded, CapExceeded)):
        click.echo(f"Resource limit: {exc}", err=True)
    else:
        logger.exception("Internal failure")
        click.echo(f"Internal error: {exc}", err=True)
    sys.exit(EXIT_INTERNAL)


def _single_clean(formula: Formula) -> Formula:
    (clean,) = make_clean([formula])
    return clean


def engine_options(f):
    options = [
        click.option("--logic", default="k", show_default=True,
                     help="k, graded, prob, monotone or coalition:N"),
        click.option("--coeff-bound", type=int, default=None,
                     help="Coefficient bound for graded and probabilistic rules"),
        click.option("--max-positions", type=int, default=None, help="Tableau game position ceiling"),
        click.option("--max-states", type=int, default=None, help="State cap for the model-checking game"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


@click.group()
@click.option("--log-level", default=None, help="Logging level, defaults to COALMU_LOG_LEVEL")
def cli(log_level: Optional[str]):
    """Satisfiability, model checking and certificates for coalgebraic fixpoint logics"""
    logging.basicConfig(
        level=(log_level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


@cli.command()
@engine_options
@click.option("--emit-model", type=click.Path(), default=None, help="Write the model JSON on SAT")
@click.option("--emit-tableau", type=click.Path(), default=None, help="Write the tableau JSON on UNSAT")
@click.option("--dump-arena", type=click.Path(), default=None, help="Write the tableau game arena")
@click.option("--dump-automaton", type=click.Path(), default=None, help="Write the trace automaton")
@click.option("--stats", is_flag=True, help="Print arena and timing statistics to standard error")
@click.argument("source")
def sat(source, **options):
    """Decide satisfiability of a formula (literal text or @file)"""
    try:
        config = RunConfig(**options)
        sig = config.signature()
        formula = parse(file_storage.read_source(source), sig)
        verdict = decide_sat(formula, sig, config.bounds(), config.position_ceiling)
    except Exception as exc:
        _fail(exc)

    game = verdict.game
    try:
        if config.dump_arena:
            file_storage.save_text(dump_arena(game.arena), config.dump_arena)
        if config.dump_automaton:
            file_storage.save_text(dump_automaton(game.dta), config.dump_automaton)
    except Exception as exc:
        _fail(exc)

    try:
        if verdict.satisfiable:
            click.echo("SAT")
            if config.emit_model:
                model = extract_model(game, verdict.strategy)
                document = ModelDocument.from_model(model)
                verdict.stats["model_game_checked"] = _self_check_model(document, game.gamma, config)
                file_storage.save_document(document, config.emit_model)
                verdict.stats["model_states"] = len(model.states)
        else:
            click.echo("UNSAT")
            if config.emit_tableau:
                document = TableauDocument.from_tableau(verdict.tableau)
                _self_check_tableau(document, game, config)
                file_storage.save_document(document, config.emit_tableau)
    except Exception as exc:
        _fail(exc)

    if config.stats:
        for key, value in verdict.stats.items():
            click.echo(f"{key}: {value}", err=True)
    sys.exit(EXIT_SAT if verdict.satisfiable else EXIT_UNSAT)


def _self_check_model(document: ModelDocument, gamma, config: RunConfig) -> bool:
    """
    Re-read the emitted model and evaluate the input at its root. Models within
    the state cap are also checked through the model-checking game.
    Returns whether the game check ran.
    """
    model = ModelDocument(**document.model_dump()).to_model()
    for a in gamma:
        if model.root not in evaluate(model, a):
            raise CoalMuError("Emitted model does not satisfy the input at its root")
    if len(model.states) > config.state_cap:
        logger.debug(f"Model has {len(model.states)} states, skipping the game check (cap {config.state_cap})")
        return False
    for a in gamma:
        arena = build_mc_game(model, list(gamma), (a, model.root), config.state_cap)
        if solve(arena).winner(arena.initial) != EXISTS:
            raise CoalMuError("Model-checking game rejects the emitted model at its root")
    return True


def _self_check_tableau(document: TableauDocument, game, config: RunConfig) -> None:
    tableau = TableauDocument(**document.model_dump(by_alias=True)).to_tableau(game.sig)
    result = verify_closed(tableau, game.gamma, game.sig, config.bounds())
    if not result.ok:
        raise CoalMuError(f"Emitted tableau fails verification: {result.diagnostic()}")


@cli.command()
@click.option("--logic", default=None, help="Expected logic of the model, defaults to the model's own")
@click.option("--max-states", type=int, default=None, help="State cap for the model-checking game")
@click.option("--model", "model_path", type=click.Path(), required=True, help="Model JSON file")
@click.option("--via-game", is_flag=True, help="Also solve the model-checking game and compare")
@click.argument("source")
def check(source, logic, max_states, model_path, via_game):
    """Print the states of a model satisfying a formula"""
    try:
        model = ModelDocument(**file_storage.load_json(model_path)).to_model()
        sig = model.signature()
        config = RunConfig(logic=logic or sig.label(), max_states=max_states)
        if config.signature() != sig:
            raise SignatureError(f"Model is a {sig.label()} model, not {config.logic}")
        formula = _single_clean(parse(file_storage.read_source(source), sig))
        truth = evaluate(model, formula)
    except Exception as exc:
        _fail(exc)

    if via_game:
        try:
            for x in model.states:
                arena = build_mc_game(model, [formula], (formula, x), config.state_cap)
                won = solve(arena).winner(arena.initial) == EXISTS
                if won != (x in truth):
                    logger.error(f"Model-checking game and evaluation disagree at {x}")
                    click.echo(f"Internal error: game and evaluation disagree at {x}", err=True)
                    sys.exit(EXIT_INTERNAL)
        except Exception as exc:
            _fail(exc)

    for x in model.states:
        if x in truth:
            click.echo(x)
    sys.exit(EXIT_OK)


@cli.command()
@engine_options
@click.option("--tableau", "tableau_path", type=click.Path(), required=True, help="Tableau JSON file")
@click.argument("source")
def certify(source, tableau_path, **options):
    """Check a closed tableau for a formula"""
    try:
        config = RunConfig(**options)
        sig = config.signature()
        formula = _single_clean(parse(file_storage.read_source(source), sig))
    except Exception as exc:
        _fail(exc)

    try:
        tableau = TableauDocument(**file_storage.load_json(tableau_path)).to_tableau(sig)
        result = verify_closed(tableau, [formula], sig, config.bounds())
        diagnostic = result.diagnostic()
        ok = result.ok
    except (CertificateError, ValidationError, ValueError) as exc:
        ok, diagnostic = False, str(exc)
    except Exception as exc:
        _fail(exc)

    if ok:
        click.echo("ACCEPTED")
        sys.exit(EXIT_OK)
    click.echo(f"REJECTED: {diagnostic}")
    sys.exit(EXIT_USAGE)


@cli.command("onestep-audit")
@click.option("--logic", default="k", show_default=True, help="k, graded, prob, monotone or coalition:N")
@click.option("--samples", type=int, default=settings.DEFAULT_SAMPLES, show_default=True)
@click.option("--seed", type=int, default=None, help="Random seed, defaults to COALMU_RANDOM_SEED")
@click.option("--coeff-bound", type=int, default=None)
def onestep_audit(logic, samples, seed, coeff_bound):
    """Spot-check the one-step rules of a logic against the one-step oracle"""
    try:
        config = RunConfig(logic=logic, coeff_bound=coeff_bound)
        report = audit_ruleset(parse_logic(logic), samples, config.bounds(), seed)
    except Exception as exc:
        _fail(exc)
    click.echo(report.model_dump_json(indent=2))
    sys.exit(EXIT_OK if report.clean else EXIT_USAGE)


if __name__ == "__main__":
    cli()
