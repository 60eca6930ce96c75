"""CLI de plumbr usando Typer.

Los informes JSON van a stdout; el texto para humanos y los logs, a stderr.

Códigos de salida:
    0  éxito
    1  alguna comprobación falló
    2  error de parseo o validación del grafo (o de las opciones)
    3  forma de intersección no definida negativa
    4  presupuesto de enumeración excedido
"""

import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import typer
from pydantic import BaseModel
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from plumbr.errors import (
    BudgetExceeded,
    GraphParseError,
    GraphValidationError,
    InvariantViolated,
    NotNegativeDefinite,
    TruncationTooShallow,
    WindowMisaligned,
)
from plumbr.lattice.form import IntersectionForm
from plumbr.lattice.graph import PlumbingGraph
from plumbr.schema import CheckResult, Settings

app = typer.Typer(
    name="plumbr",
    help="Cohomología reticular de grafos de plumbing y la torre de ψ₀",
    add_completion=False,
)
console = Console(stderr=True)

EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_NOT_DEFINITE = 3
EXIT_BUDGET = 4

SOURCE_HELP = "Archivo del grafo, '-' para stdin o '@nombre' del corpus"


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Logs de depuración"),
) -> None:
    """Configura el logging hacia stderr."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


# =============================================================================
# Utilidades
# =============================================================================


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Traduce las excepciones de plumbr a códigos de salida."""
    try:
        yield
    except GraphParseError as e:
        console.print(f"[bold red]✗ Parse error:[/] {e}")
        raise typer.Exit(EXIT_INVALID) from e
    except GraphValidationError as e:
        console.print(f"[bold red]✗ Invalid graph:[/] {e}")
        raise typer.Exit(EXIT_INVALID) from e
    except (TruncationTooShallow, WindowMisaligned) as e:
        console.print(f"[bold red]✗ Invalid options:[/] {e}")
        raise typer.Exit(EXIT_INVALID) from e
    except NotNegativeDefinite as e:
        console.print(f"[bold red]✗ Not negative definite:[/] {e}")
        raise typer.Exit(EXIT_NOT_DEFINITE) from e
    except BudgetExceeded as e:
        console.print(f"[bold red]✗ Budget exceeded:[/] {e}")
        raise typer.Exit(EXIT_BUDGET) from e
    except InvariantViolated as e:
        console.print(f"[bold red]✗ Invariant violated:[/] {e}")
        raise typer.Exit(EXIT_CHECK_FAILED) from e


def _decode_graph_text(data: bytes) -> str:
    """Decodifica UTF-8; un byte inválido es un error de parseo con posición."""
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data.count(b"\n", 0, e.start) + 1
        column = e.start - (data.rfind(b"\n", 0, e.start) + 1) + 1
        raise GraphParseError(
            f"invalid UTF-8 at byte offset {e.start}", line, column
        ) from e


def _read_graph(source: str) -> PlumbingGraph:
    """Lee un grafo desde archivo, stdin o el corpus."""
    from plumbr.corpus import corpus_graph
    from plumbr.lattice.graph import parse_graph

    if source.startswith("@"):
        try:
            return corpus_graph(source[1:])
        except KeyError as e:
            console.print(f"[bold red]✗ {e.args[0]}[/]")
            raise typer.Exit(EXIT_INVALID) from e
    if source == "-":
        return parse_graph(_decode_graph_text(sys.stdin.buffer.read()))
    path = Path(source)
    if not path.exists():
        console.print(f"[bold red]✗ File not found:[/] {source}")
        raise typer.Exit(EXIT_INVALID)
    return parse_graph(_decode_graph_text(path.read_bytes()))


def _load_form(source: str) -> IntersectionForm:
    from plumbr.lattice.form import intersection_form

    return intersection_form(_read_graph(source))


def _settings(
    config: Path | None,
    budget: int | None = None,
    depth: int | None = None,
    max_level: int | None = None,
) -> Settings:
    """Configuración del paquete o de ``--config``, con las opciones encima."""
    settings = Settings.from_yaml(config) if config else Settings.default()
    overrides = {
        key: value
        for key, value in (
            ("budget", budget),
            ("depth", depth),
            ("max_level", max_level),
        )
        if value is not None
    }
    return settings.model_copy(update=overrides)


def _emit(report: BaseModel) -> None:
    typer.echo(report.model_dump_json(indent=2))


def _display_checks(checks: list[CheckResult]) -> None:
    table = Table(title="Checks")
    table.add_column("Check", style="cyan")
    table.add_column("Status")
    table.add_column("Witness", style="dim")
    styles = {"pass": "green", "fail": "bold red", "skipped": "yellow"}
    for check in checks:
        status = f"[{styles[check.status]}]{check.status}[/]"
        table.add_row(check.name, status, check.witness or "")
    console.print(table)


def _finish(checks: list[CheckResult]) -> None:
    failed = [c.name for c in checks if c.is_failure]
    if failed:
        console.print(f"[bold red]✗ Failed checks:[/] {', '.join(failed)}")
        raise typer.Exit(EXIT_CHECK_FAILED)
    console.print("[bold green]✓ All checks passed[/]")


BudgetOption = typer.Option(None, "--budget", "-b", help="Cota de puntos enumerados")
MaxLevelOption = typer.Option(None, "--max-level", help="Nivel superior de la raíz")
DepthOption = typer.Option(None, "--depth", "-d", help="Truncación de la torre")
ConfigOption = typer.Option(None, "--config", "-c", help="Archivo YAML de ajustes")


# =============================================================================
# Comandos
# =============================================================================


@app.command()
def validate(source: str = typer.Argument(..., help=SOURCE_HELP)) -> None:
    """Valida el grafo y certifica la definición negativa."""
    from plumbr.schema import GraphSummary

    with _exit_codes():
        form = _load_form(source)
        summary = GraphSummary.from_form(form)

    console.print("[bold green]✓ Negative definite plumbing tree[/]")
    console.print(f"  Vertices: {summary.n}")
    console.print(f"  det: {summary.det}  |H|: {summary.discriminant_order}")
    console.print(f"  K0: {summary.k0}  K0²: {summary.k0_squared}")
    _emit(summary)


@app.command()
def root(
    source: str = typer.Argument(..., help=SOURCE_HELP),
    char_class: str = typer.Option(
        "canonical",
        "--class",
        help="'canonical' o las evaluaciones de K separadas por comas",
    ),
    dot: Path | None = typer.Option(None, "--dot", help="Escribe la raíz en DOT"),
    budget: int | None = BudgetOption,
    max_level: int | None = MaxLevelOption,
    config: Path | None = ConfigOption,
) -> None:
    """Construye la raíz graduada de χ_K y muestra la tabla de niveles."""
    from plumbr.lattice.chars import canonical_class, char_vector
    from plumbr.lattice.roots import graded_root, root_to_dot
    from plumbr.schema import RootSummary

    settings = _settings(config, budget, max_level=max_level)
    with _exit_codes():
        form = _load_form(source)
        if char_class == "canonical":
            k = canonical_class(form)
        else:
            try:
                k = char_vector(form, [int(t) for t in char_class.split(",")])
            except ValueError as e:
                console.print(f"[bold red]✗ Invalid class:[/] {e}")
                raise typer.Exit(EXIT_INVALID) from e
        graded = graded_root(form, k, settings.budget, settings.max_level)

    table = Table(title="Graded root")
    table.add_column("Level", justify="right")
    table.add_column("Vertices", justify="right")
    table.add_column("Sizes")
    for level, count in graded.level_counts().items():
        sizes = ", ".join(str(v.size) for v in graded.at_level(level))
        table.add_row(str(level), str(count), sizes)
    console.print(table)

    if dot:
        dot.write_text(root_to_dot(graded))
        console.print(f"[bold green]✓ DOT written:[/] {dot}")
    _emit(RootSummary.from_root(graded))


@app.command()
def rational(
    source: str = typer.Argument(..., help=SOURCE_HELP),
    depth: int | None = DepthOption,
    budget: int | None = BudgetOption,
    config: Path | None = ConfigOption,
) -> None:
    """Decide la racionalidad por la forma de la raíz y por ψ₀ ∈ Im U."""
    from plumbr.orchestrator import rational_report

    settings = _settings(config, budget, depth)
    with _exit_codes():
        report = rational_report(_load_form(source), settings)

    _emit(report)
    if report.agreement is False:
        console.print("[bold red]✗ Rationality oracles disagree[/]")
        raise typer.Exit(EXIT_CHECK_FAILED)
    verdict = {True: "rational", False: "not rational", None: "undecided"}
    console.print(f"[bold green]✓ {verdict[report.rational]}[/]  ht = {report.height}")


@app.command()
def blowdown(source: str = typer.Argument(..., help=SOURCE_HELP)) -> None:
    """Contrae las (−1)-curvas y muestra la traza con las proximidades."""
    from plumbr.lattice.blowdown import blowdown_sequence, d_classes
    from plumbr.schema import TraceReport

    with _exit_codes():
        trace = blowdown_sequence(_load_form(source))
        d_classes(trace)

    console.print(
        f"[bold green]✓ {len(trace.classes)} classes in {len(trace.rounds)} rounds[/]"
    )
    _emit(TraceReport.from_trace(trace))


@app.command()
def sset(
    source: str = typer.Argument(..., help=SOURCE_HELP),
    subset_cap: int | None = typer.Option(None, "--subset-cap", help="|𝒟| máximo"),
    budget: int | None = BudgetOption,
    config: Path | None = ConfigOption,
) -> None:
    """Materializa 𝒮 y lo compara con la componente C₀."""
    from plumbr.lattice.blowdown import blowdown_sequence, s_set, verify_s_equals_c0
    from plumbr.schema import SSetReport

    settings = _settings(config, budget)
    cap = subset_cap if subset_cap is not None else settings.subset_cap
    with _exit_codes():
        form = _load_form(source)
        trace = blowdown_sequence(form)
        outcome = verify_s_equals_c0(form, trace, settings.budget, cap)
        points = sorted(s_set(trace, cap).points)

    _emit(
        SSetReport(
            d_size=len(trace.classes),
            s_size=outcome.s_size,
            c0_size=outcome.c0_size,
            points=[list(p) for p in points],
            deepest_path=outcome.deepest_path,
            checks=outcome.checks,
        )
    )
    _display_checks(outcome.checks)
    _finish(outcome.checks)


@app.command()
def verify(
    source: str = typer.Argument(..., help=SOURCE_HELP),
    depth: int | None = DepthOption,
    budget: int | None = BudgetOption,
    max_level: int | None = MaxLevelOption,
    config: Path | None = ConfigOption,
) -> None:
    """Ejecuta el pipeline completo y emite el VerifyReport.

    Ejemplos:
        plumbr verify @sigma_2_3_7
        plumbr verify grafo.txt --depth 6 --budget 1000000
        cat grafo.txt | plumbr verify -
    """
    from plumbr.orchestrator import Verifier

    settings = _settings(config, budget, depth, max_level)
    with _exit_codes():
        verifier = Verifier(_read_graph(source), settings)
        verifier.on_progress(
            lambda p: logging.getLogger(__name__).debug(
                f"Phase {p.current_phase} ({p.completed_phases}/{p.total_phases})"
            )
        )
        report = verifier.run()

    _emit(report)
    console.print(
        f"[bold blue]Root:[/] levels {report.root.min_level}..{report.root.top_level}"
        f", complete: {report.root.complete}"
    )
    console.print(f"[bold blue]ht(ψ₀):[/] {report.height}")
    _display_checks(report.checks)
    _finish(report.checks)


@app.command("models-check")
def models_check(
    source: str = typer.Argument(..., help=SOURCE_HELP),
    radius: int | None = typer.Option(None, "--radius", "-r", help="Caja [-r, r]^n"),
    depth: int | None = DepthOption,
    max_level: int | None = MaxLevelOption,
    budget: int | None = BudgetOption,
    config: Path | None = ConfigOption,
) -> None:
    """Compara los modelos Char, L y raíz sobre una ventana finita."""
    from plumbr.errors import SubsetCapExceeded
    from plumbr.lattice.blowdown import blowdown_sequence, phi0_support
    from plumbr.lattice.chars import canonical_class
    from plumbr.lattice.models import check_model_equivalence
    from plumbr.schema import ModelsReport

    settings = _settings(config, budget, max_level=max_level)
    with _exit_codes():
        form = _load_form(source)
        try:
            phi0 = phi0_support(blowdown_sequence(form), settings.subset_cap).vectors
        except SubsetCapExceeded as e:
            logging.getLogger(__name__).warning(f"phi0 correspondence skipped: {e}")
            phi0 = None
        outcome = check_model_equivalence(
            form,
            radius=radius if radius is not None else settings.box_radius,
            depth=depth if depth is not None else settings.model_depth,
            max_level=settings.max_level,
            budget=settings.budget,
            phi0=phi0,
        )

    _emit(
        ModelsReport(
            k=list(canonical_class(form).evals),
            radius=outcome.radius,
            depth=outcome.depth,
            window_level=outcome.window_level,
            window_size=outcome.window_size,
            char_dimension=outcome.char_dimension,
            l_dimension=outcome.l_dimension,
            root_dimension=outcome.root_dimension,
            checks=outcome.checks,
        )
    )
    _display_checks(outcome.checks)
    _finish(outcome.checks)


@app.command("export-dot")
def export_dot(
    source: str = typer.Argument(..., help=SOURCE_HELP),
    out: Path = typer.Argument(..., help="Archivo DOT de salida"),
    budget: int | None = BudgetOption,
    max_level: int | None = MaxLevelOption,
    config: Path | None = ConfigOption,
) -> None:
    """Exporta la raíz de K₀ (o su germen) en formato DOT."""
    from plumbr.lattice.roots import root_to_dot
    from plumbr.orchestrator import canonical_root

    settings = _settings(config, budget, max_level=max_level)
    with _exit_codes():
        graded = canonical_root(_load_form(source), settings)

    out.write_text(root_to_dot(graded))
    kind = "root" if graded.complete else "trunk germ"
    console.print(f"[bold green]✓ {kind} written:[/] {out}")


@app.command()
def corpus(
    name: str | None = typer.Argument(None, help="Grafo a imprimir"),
) -> None:
    """Lista el corpus o imprime un grafo en el formato de texto."""
    from plumbr.corpus import load_corpus

    entries = load_corpus()
    if name is None:
        table = Table(title="Corpus")
        table.add_column("Name", style="cyan")
        table.add_column("Vertices", justify="right")
        table.add_column("Description")
        for entry in entries.values():
            table.add_row(entry.name, str(entry.graph.n), entry.description)
        console.print(table)
        return

    if name not in entries:
        console.print(f"[bold red]✗ Unknown corpus graph:[/] {name}")
        raise typer.Exit(EXIT_INVALID)
    typer.echo(entries[name].graph.to_text(), nl=False)


@app.command("random")
def random_graph(
    seed: int | None = typer.Option(None, "--seed", "-s", help="Semilla del generador"),
    vertices: int = typer.Option(4, "--vertices", "-n", min=1, help="Tamaño máximo"),
    blowups: int = typer.Option(2, "--blowups", min=0, help="Blowups buenos al azar"),
    config: Path | None = ConfigOption,
) -> None:
    """Imprime un árbol aleatorio con blowups en el formato de texto."""
    import random

    from plumbr.corpus import random_blown_up_tree

    settings = _settings(config)
    rng = random.Random(seed if seed is not None else settings.random_seed)
    graph = random_blown_up_tree(rng, vertices, blowups)
    typer.echo(graph.to_text(), nl=False)


if __name__ == "__main__":
    app()
