"""Command-line front end: ``khoflow <command> [--corpus NAME | --pd FILE | --model M]``."""

import functools
import sys
from dataclasses import dataclass
from pathlib import Path

import click

import report
from audit import run_checks
from branched import branched_summary, determinant
from config_loader import get_settings, resolve_path
from corpus import load_corpus
from diagram import parse_pd, skein_triple
from errors import InputError, InvariantViolation, KhoflowError
from hmr_model import (
    euler_char_formula,
    load_model,
    ordinary_euler_char,
    tilde_homology,
    triangle_rank_check,
)
from khovanov import build_cube, chain_complex, homology
from logger import get_logger, set_level
from pipeline import run_batch
from specseq import e_infinity, for_link, page, pages

logger = get_logger(__name__)

DIAGRAM_COMMANDS = {"kh", "khr", "det", "h1", "ss", "skein"}


@dataclass
class RunConfig:
    command: str
    corpus: str | None = None
    pd_file: str | None = None
    model: str | None = None
    as_json: bool = False
    page: int | None = None
    crossing: int | None = None
    trunc: int | None = None
    dims: str | None = None

    def validate(self):
        given = [s for s in (self.corpus, self.pd_file, self.model) if s is not None]
        if self.command == "skein" and self.dims is not None:
            if given:
                raise InputError("--dims cannot be combined with a diagram source")
            return self
        if len(given) != 1:
            raise InputError("exactly one of --corpus, --pd or --model is required")
        if self.command in DIAGRAM_COMMANDS and self.model is not None:
            raise InputError(f"{self.command} takes a diagram, not a model")
        if self.command == "hmr" and self.model is None:
            raise InputError("hmr takes --model NAME|FILE")
        return self


def _handled(func):
    """Map library errors onto exit codes, naming the input in the message."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except KhoflowError as exc:
            source = ctx.params.get("corpus") or ctx.params.get("pd_file") or ctx.params.get("model")
            where = f"{source}: " if source else ""
            click.echo(f"error: {where}{type(exc).__name__}: {exc}", err=True)
            logger.debug(f"{ctx.command.name} failed", exc_info=True)
            sys.exit(exc.exit_code)

    return wrapper


def diagram_source(func):
    func = click.option("--pd", "pd_file", type=click.Path(dir_okay=False), help="File holding a PD code")(func)
    func = click.option("--corpus", help="Name of a diagram in the corpus")(func)
    return func


def json_flag(func):
    return click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of a table")(func)


def _load_diagram(cfg, settings):
    if cfg.corpus is not None:
        return load_corpus(settings["paths"]["corpus"]).get(cfg.corpus)
    path = Path(cfg.pd_file)
    if not path.exists():
        raise InputError(f"PD file {path} not found")
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"PD file {path} is not UTF-8 text: {exc}") from exc
    return parse_pd(text, name=path.stem)


def _load_model(source, settings):
    bundled = resolve_path(settings["paths"]["models"]) / f"{source}.json"
    if not Path(source).exists() and bundled.exists():
        return load_model(bundled)
    return load_model(source)


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Alternate config.yaml")
@click.option("--verbose", is_flag=True, help="Log at DEBUG level")
@click.pass_context
def cli(ctx, config_path, verbose):
    """Link homology workbench."""
    settings = get_settings(config_path)
    if verbose:
        settings["general"]["log_level"] = "DEBUG"
    set_level(settings["general"]["log_level"])
    ctx.obj = settings


def _homology_command(ctx, corpus, pd_file, as_json, reduced):
    settings = ctx.obj
    cfg = RunConfig("khr" if reduced else "kh", corpus, pd_file, as_json=as_json).validate()
    d = _load_diagram(cfg, settings)
    cube = build_cube(d, settings["khovanov"]["crossing_limit"])
    dims = homology(chain_complex(cube, reduced=reduced), settings["general"]["n_jobs"])
    if as_json:
        click.echo(report.dumps(report.homology_payload(d.name, dims, reduced)))
    else:
        click.echo(report.render_homology(d.name, dims, reduced))


@cli.command()
@diagram_source
@json_flag
@click.pass_context
@_handled
def kh(ctx, corpus, pd_file, as_json):
    """Khovanov homology over F2."""
    _homology_command(ctx, corpus, pd_file, as_json, reduced=False)


@cli.command()
@diagram_source
@json_flag
@click.pass_context
@_handled
def khr(ctx, corpus, pd_file, as_json):
    """Reduced Khovanov homology over F2."""
    _homology_command(ctx, corpus, pd_file, as_json, reduced=True)


def _branched_command(ctx, command, corpus, pd_file, as_json):
    cfg = RunConfig(command, corpus, pd_file, as_json=as_json).validate()
    d = _load_diagram(cfg, ctx.obj)
    payload = report.branched_payload(d.name, branched_summary(d))
    if as_json:
        click.echo(report.dumps(payload))
    elif command == "det":
        click.echo(f"{d.name}: det = {payload['det']}")
    else:
        click.echo(report.render_branched(payload))


@cli.command()
@diagram_source
@json_flag
@click.pass_context
@_handled
def det(ctx, corpus, pd_file, as_json):
    """Determinant from the Goeritz form."""
    _branched_command(ctx, "det", corpus, pd_file, as_json)


@cli.command()
@diagram_source
@json_flag
@click.pass_context
@_handled
def h1(ctx, corpus, pd_file, as_json):
    """First homology of the double branched cover."""
    _branched_command(ctx, "h1", corpus, pd_file, as_json)


@cli.command()
@diagram_source
@json_flag
@click.option("--page", "page_index", type=int, default=None, help="Show only page R")
@click.pass_context
@_handled
def ss(ctx, corpus, pd_file, as_json, page_index):
    """Pages of the weight spectral sequence from Khr of the mirror."""
    settings = ctx.obj
    cfg = RunConfig("ss", corpus, pd_file, as_json=as_json, page=page_index).validate()
    d = _load_diagram(cfg, settings)
    fc = for_link(d, crossing_limit=settings["khovanov"]["crossing_limit"])
    if page_index is not None:
        tables = [page(fc, page_index, with_differentials=False)]
    else:
        tables = pages(fc)
    e_inf = e_infinity(fc).total
    if as_json:
        click.echo(report.dumps(report.spectral_payload(d.name, tables, e_inf)))
    else:
        click.echo(report.render_pages(d.name, tables, e_inf))


@cli.command()
@click.option("--model", required=True, help="Library model name or JSON model file")
@click.option("--trunc", type=int, default=None, help="Truncation level N")
@click.option("--chi", "with_chi", is_flag=True, help="Report Euler characteristics and spin-c split")
@json_flag
@click.pass_context
@_handled
def hmr(ctx, model, trunc, with_chi, as_json):
    """Homology of a model mapping cone."""
    settings = ctx.obj
    RunConfig("hmr", model=model, as_json=as_json, trunc=trunc).validate()
    m = _load_model(model, settings)
    if trunc is None:
        trunc = max(m.default_cutoff(), m.default_cutoff(settings["hmr"]["default_trunc_margin"]))
    dims = tilde_homology(m, trunc)
    payload = report.hmr_payload(
        m, trunc, dims, with_chi,
        euler_char_formula(m.irreducible_gradings) if m.tower_count == 1 else None,
        ordinary_euler_char(m, trunc),
    )
    if as_json:
        click.echo(report.dumps(payload))
    else:
        click.echo(report.render_hmr(payload))


def _parse_dims(text):
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise InputError(f"--dims expects a,b,c integers, got {text!r}") from exc


@cli.command()
@diagram_source
@click.option("--crossing", type=int, default=None, help="Crossing index to resolve")
@click.option("--dims", default=None, help="Check a,b,c against the exact triangle")
@json_flag
@click.pass_context
@_handled
def skein(ctx, corpus, pd_file, crossing, dims, as_json):
    """Unoriented skein triple at one crossing, with the triangle check."""
    cfg = RunConfig("skein", corpus, pd_file, as_json=as_json, crossing=crossing, dims=dims).validate()
    if dims is not None:
        check = triangle_rank_check(_parse_dims(dims))
        if as_json:
            click.echo(report.dumps({"schema": report.SCHEMA_VERSION, "triangle": check.to_json()}))
        else:
            click.echo(report.render_triangle(check))
        return

    d = _load_diagram(cfg, ctx.obj)
    if crossing is None:
        entry = load_corpus(ctx.obj["paths"]["corpus"]).entries.get(corpus, {}) if corpus else {}
        crossing = entry.get("skein_crossing", 0)
    triple = skein_triple(d, crossing)
    dets = [determinant(k) for k in triple]
    payload = report.skein_payload(d.name, crossing, triple, dets, triangle_rank_check(dets))
    if as_json:
        click.echo(report.dumps(payload))
    else:
        click.echo(report.render_skein(payload))


@cli.command()
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Report path")
@click.pass_context
@_handled
def audit(ctx, output):
    """Cross-check every module on the corpus and the model library."""
    result = run_checks(ctx.obj, report_path=output)
    for name, outcome in result.items():
        if isinstance(outcome, dict):
            click.echo(f"{name:20s} {'pass' if outcome['passed'] else 'FAIL'}")
    if not result["passed"]:
        raise InvariantViolation("audit found failing checks")


@cli.command()
@click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="Report directory")
@click.pass_context
@_handled
def batch(ctx, out_dir):
    """Summaries for every corpus diagram under the crossing cap."""
    summary = run_batch(ctx.obj, out_dir=out_dir)
    click.echo(summary.to_string(index=False))


@cli.command(name="list")
@click.pass_context
@_handled
def list_diagrams(ctx):
    """Corpus diagram names."""
    corpus = load_corpus(ctx.obj["paths"]["corpus"])
    for name in corpus.names:
        d = corpus.get(name)
        click.echo(f"{name:24s} {d.n_crossings:3d} crossings  {d.n_components} component(s)")


def main():
    cli(obj={})


if __name__ == "__main__":
    main()
