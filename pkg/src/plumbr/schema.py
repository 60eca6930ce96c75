"""Modelos Pydantic de plumbr: configuración, espejo JSON del grafo e informes."""

from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Literal

import yaml
from pydantic import BaseModel, Field

if TYPE_CHECKING:
    from plumbr.lattice.blowdown import BlowdownTrace
    from plumbr.lattice.form import IntersectionForm
    from plumbr.lattice.graph import PlumbingGraph
    from plumbr.lattice.roots import GradedRoot

SCHEMA_VERSION = "1.0"


# =============================================================================
# Configuración
# =============================================================================


class Settings(BaseModel):
    """Parámetros de ejecución; los valores por defecto viven en defaults.yaml."""

    budget: int = Field(default=10_000_000, ge=1)
    depth: int | None = Field(default=None, ge=1)
    max_level: int | None = None
    height_cap: int = Field(default=64, ge=1)
    subset_cap: int = Field(default=20, ge=0, le=30)
    germ_budget: int = Field(default=200_000, ge=1)
    box_radius: int = Field(default=1, ge=0)
    model_depth: int = Field(default=3, ge=1)
    chain_margin: int = Field(default=5, ge=1)
    random_seed: int = 0

    @classmethod
    def from_yaml(cls, path: Path) -> "Settings":
        """Carga la configuración desde un archivo YAML."""
        with open(path) as f:
            data = yaml.safe_load(f) or {}
        return cls.model_validate(data)

    @classmethod
    def default(cls) -> "Settings":
        """Configuración incluida en el paquete."""
        text = resources.files("plumbr.config").joinpath("defaults.yaml").read_text()
        return cls.model_validate(yaml.safe_load(text) or {})

    def to_yaml(self, path: Path) -> None:
        """Guarda la configuración a un archivo YAML."""
        with open(path, "w") as f:
            yaml.dump(self.model_dump(), f, default_flow_style=False)


# =============================================================================
# Espejo JSON del grafo
# =============================================================================


class VertexDocument(BaseModel):
    name: str = Field(..., pattern=r"^[A-Za-z0-9_]+$")
    weight: int


class GraphDocument(BaseModel):
    """Forma JSON de un grafo de plumbing."""

    vertices: list[VertexDocument] = Field(..., min_length=1)
    edges: list[tuple[str, str]] = Field(default_factory=list)

    @classmethod
    def from_graph(cls, graph: "PlumbingGraph") -> "GraphDocument":
        return cls(
            vertices=[
                VertexDocument(name=v.name, weight=v.weight) for v in graph.vertices
            ],
            edges=list(graph.edges),
        )

    def to_graph(self) -> "PlumbingGraph":
        """Construye el grafo validando las invariantes de árbol."""
        from plumbr.lattice.graph import make_graph

        return make_graph([(v.name, v.weight) for v in self.vertices], self.edges)


# =============================================================================
# Resultados de verificación
# =============================================================================

CheckStatus = Literal["pass", "fail", "skipped"]


class CheckResult(BaseModel):
    """Resultado con nombre de una comprobación; los fallos llevan testigo."""

    name: str
    status: CheckStatus
    witness: str | None = None

    @classmethod
    def ok(cls, name: str) -> "CheckResult":
        return cls(name=name, status="pass")

    @classmethod
    def failed(cls, name: str, witness: str) -> "CheckResult":
        return cls(name=name, status="fail", witness=witness)

    @classmethod
    def skipped(cls, name: str, reason: str) -> "CheckResult":
        return cls(name=name, status="skipped", witness=reason)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def is_failure(self) -> bool:
        return self.status == "fail"


class GraphSummary(BaseModel):
    """Datos del retículo: tamaño, determinante, grupo discriminante y K₀."""

    n: int
    det: int
    discriminant_order: int
    invariant_factors: list[int]
    k0: list[int]
    k0_squared: str

    @classmethod
    def from_form(cls, form: "IntersectionForm") -> "GraphSummary":
        from plumbr.lattice.chars import canonical_class, k_squared

        k0 = canonical_class(form)
        return cls(
            n=form.n,
            det=form.det,
            discriminant_order=form.discriminant.order,
            invariant_factors=list(form.discriminant.invariant_factors),
            k0=list(k0.evals),
            k0_squared=str(k_squared(form, k0)),
        )


class RootSummary(BaseModel):
    min_level: int
    top_level: int
    stable_level: int | None
    level_counts: dict[int, int]
    branch_count: int
    complete: bool

    @classmethod
    def from_root(cls, root: "GradedRoot") -> "RootSummary":
        return cls(
            min_level=root.min_level,
            top_level=root.top_level,
            stable_level=root.stable_level,
            level_counts=root.level_counts(),
            branch_count=root.branch_count,
            complete=root.complete,
        )


class BlowdownSummary(BaseModel):
    rounds: int
    d_size: int
    s_size: int | None = None


class VerifyReport(BaseModel):
    """Informe completo del pipeline de verificación."""

    schema_version: str = SCHEMA_VERSION
    graph: GraphSummary
    root: RootSummary
    blowdown: BlowdownSummary
    rational: bool | None = None
    height: str | None = None
    checks: list[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True si ninguna comprobación falla; las omitidas no cuentan."""
        return not any(c.is_failure for c in self.checks)

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)


class RationalReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    rational: bool | None
    psi0_in_im_u: bool
    agreement: bool | None
    height: str | None
    complete: bool


# =============================================================================
# Blowdown y 𝒮
# =============================================================================


class ClassDocument(BaseModel):
    vertex: str
    round: int
    vector: list[int]


class ProximityDocument(BaseModel):
    source: str
    target: str
    round: int
    multiplicity: int
    target_blown_down: bool


class SurvivorDocument(BaseModel):
    vertex: str
    vector: list[int]
    self_intersection: int
    smooth: bool


class TraceReport(BaseModel):
    """Traza de blowdown serializada."""

    schema_version: str = SCHEMA_VERSION
    vertices: list[str]
    rounds: list[list[ClassDocument]]
    proximities: list[ProximityDocument]
    survivors: list[SurvivorDocument]
    survivor_intersections: list[tuple[str, str, int]]

    @classmethod
    def from_trace(cls, trace: "BlowdownTrace") -> "TraceReport":
        return cls(
            vertices=list(trace.form.graph.names),
            rounds=[
                [
                    ClassDocument(vertex=c.vertex, round=c.round, vector=list(c.vector))
                    for c in round_
                ]
                for round_ in trace.rounds
            ],
            proximities=[
                ProximityDocument(
                    source=p.source,
                    target=p.target,
                    round=p.round,
                    multiplicity=p.multiplicity,
                    target_blown_down=p.target_blown_down,
                )
                for p in trace.proximities
            ],
            survivors=[
                SurvivorDocument(
                    vertex=s.vertex,
                    vector=list(s.vector),
                    self_intersection=s.self_intersection,
                    smooth=s.smooth,
                )
                for s in trace.survivors
            ],
            survivor_intersections=trace.survivor_intersections(),
        )


class SSetReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    d_size: int
    s_size: int
    c0_size: int
    points: list[list[int]]
    deepest_path: list[str]
    checks: list[CheckResult]

    @property
    def equals_c0(self) -> bool:
        return all(c.passed for c in self.checks if c.name == "s_equals_c0")


class ModelsReport(BaseModel):
    """Dimensiones de los tres modelos sobre una ventana y sus comprobaciones."""

    schema_version: str = SCHEMA_VERSION
    k: list[int]
    radius: int
    depth: int
    window_level: int
    window_size: int
    char_dimension: int
    l_dimension: int
    root_dimension: int
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return not any(c.is_failure for c in self.checks)
