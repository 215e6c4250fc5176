"""
Command-line interface

    localres resolve examples.lr
    localres --oracle twist-check examples.lr --r 2 --cap 10
    localres resolve examples.lr --save ex1
    localres proj examples.lr --load ex1
    localres sod --n 4 --c 4 --d 1
    localres run examples.lr

Every command prints one JSON report document on stdout (``run`` prints a
list of them). Exit codes: 0 when every attestation passed, 1 when one
failed or an internal identity broke, 2 for parse and usage errors, 3 when
a resource ceiling was hit. Logs go to stderr.
"""

import logging
import sys
from pathlib import Path

import click

from app.dependencies.external.store import settings
from app.dependencies.external.store.store import ResolutionStore
from app.dependencies.internal.errors import LocalResError
from app.dependencies.internal.jobs import (
    COMMANDS,
    ErrorDocument,
    JobSpec,
    ReportDocument,
    parse_job,
    reports_to_json,
    run_all,
    run_job,
)

logger = logging.getLogger("localres")


def _extra_options(args: list[str]) -> dict[str, str]:
    """``--key value``, ``--flag`` or ``key=value`` tokens left over by click."""
    options: dict[str, str] = {}
    i = 0
    while i < len(args):
        token = args[i]
        if token.startswith("--"):
            key = token[2:]
            if "=" in key:
                key, value = key.split("=", 1)
            elif i + 1 < len(args) and not args[i + 1].startswith("--"):
                i += 1
                value = args[i]
            else:
                value = "true"
        elif "=" in token:
            key, value = token.split("=", 1)
        else:
            raise click.UsageError(f"unexpected argument '{token}'")
        options[key.replace("-", "_")] = value
        i += 1
    return options


def _render_table(report: ReportDocument) -> str:
    lines = [f"== {report.command} =="]
    for key, value in report.results.items():
        flat = value is None or isinstance(value, (str, int, float, bool)) or (
            isinstance(value, list) and all(isinstance(v, (str, int)) for v in value)
        )
        lines.append(f"{key:<24} {value if flat else '...'}")
    for attestation in report.attestations:
        lines.append(f"{'PASS' if attestation.passed else 'FAIL'}  {attestation.name}")
    return "\n".join(lines)


def _emit(obj: dict, reports: list[ReportDocument], single: bool):
    if obj["table"]:
        click.echo("\n\n".join(_render_table(r) for r in reports))
    elif single:
        click.echo(reports[0].to_json())
    else:
        click.echo(reports_to_json(reports))
    sys.exit(0 if all(r.passed for r in reports) else 1)


def _fail(exc: LocalResError):
    logger.error("%s: %s", exc.code, exc.message)
    click.echo(ErrorDocument.from_exception(exc).to_json())
    sys.exit(exc.exit_code)


def _load_job(path: str) -> JobSpec:
    return parse_job(Path(path).read_text(encoding="utf-8"))


# ============================================================================
# Command Group
# ============================================================================

@click.group()
@click.option("--oracle", is_flag=True, help="Add independent cross-checks to the attestations.")
@click.option("--meta", is_flag=True, help="Add a meta block (timestamp, settings) to reports.")
@click.option("--table", is_flag=True, help="Print a human-readable table instead of JSON.")
@click.option("--store-dir", type=click.Path(file_okay=False), default=None, help="Resolution store directory.")
@click.pass_context
def main(ctx: click.Context, oracle: bool, meta: bool, table: bool, store_dir: str | None):
    """Local standard bases, resolutions and matrix factorizations."""
    logging.basicConfig(
        level=settings.log_level.upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = {
        "oracle": oracle,
        "meta": meta,
        "table": table,
        "store": ResolutionStore(store_dir),
    }


def _register(name: str):
    options_model = COMMANDS[name][0]
    known = ", ".join(options_model.model_fields) or "none"

    @main.command(
        name=name,
        context_settings={"ignore_unknown_options": True, "allow_extra_args": True},
        help=f"Run '{name}' on JOBFILE. Options (--key value): {known}.",
    )
    @click.argument("jobfile", type=click.Path(exists=True, dir_okay=False))
    @click.pass_context
    def command(ctx: click.Context, jobfile: str):
        obj = dict(ctx.obj)
        try:
            extras = _extra_options(ctx.args)
            for flag in ("oracle", "meta", "table"):
                if flag in extras:
                    obj[flag] = extras.pop(flag).lower() not in ("false", "0", "no")
            job = _load_job(jobfile)
            report = run_job(
                job,
                name,
                extras,
                oracle=obj["oracle"],
                meta=obj["meta"],
                store=obj["store"],
            )
        except LocalResError as exc:
            _fail(exc)
        _emit(obj, [report], single=True)

    return command


for _name in COMMANDS:
    if _name != "sod":
        _register(_name)


@main.command(name="sod")
@click.option("--n", "n", type=int, required=True, help="Dimension of the ambient ring.")
@click.option("--c", "c", type=int, required=True, help="Codimension of the center.")
@click.option("--d", "d", type=int, required=True, help="Degree of the hypersurface.")
@click.pass_context
def sod(ctx: click.Context, n: int, c: int, d: int):
    """Exceptional pieces of the blow-up decomposition for (n, c, d)."""
    obj = ctx.obj
    try:
        report = run_job(None, "sod", {"n": n, "c": c, "d": d}, oracle=obj["oracle"], meta=obj["meta"])
    except LocalResError as exc:
        _fail(exc)
    _emit(obj, [report], single=True)


@main.command(name="run")
@click.argument("jobfile", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def run(ctx: click.Context, jobfile: str):
    """Execute every run directive of JOBFILE in order."""
    obj = ctx.obj
    try:
        reports = run_all(
            _load_job(jobfile),
            oracle=obj["oracle"],
            meta=obj["meta"],
            store=obj["store"],
        )
    except LocalResError as exc:
        _fail(exc)
    _emit(obj, reports, single=False)


if __name__ == "__main__":
    main()
