"""Pipeline de verificación de plumbr.

Este módulo encadena las fases de ``plumbr verify``:
1. Forma → definición negativa, determinante, K₀
2. Raíz → raíz graduada de K₀ (o germen del tronco si no cabe)
3. Forma del tronco → comprobaciones del vértice canónico
4. Blowdown → 𝒟, 𝒮 = C₀ y soporte de φ₀
5. Torre → ψ₀ ∈ Ker U, ψ₀ ∈ Im U, racionalidad y altura
"""

import logging
from dataclasses import dataclass, field
from typing import Callable

from plumbr.errors import (
    BudgetExceeded,
    IncompleteRoot,
    RecursionMismatch,
    SubsetCapExceeded,
)
from plumbr.lattice.blowdown import (
    BlowdownTrace,
    blowdown_sequence,
    d_classes,
    phi0_support,
    verify_s_equals_c0,
)
from plumbr.lattice.chars import canonical_class
from plumbr.lattice.form import IntersectionForm, intersection_form
from plumbr.lattice.graph import PlumbingGraph
from plumbr.lattice.roots import (
    GradedRoot,
    canonical_trunk_germ,
    graded_root,
    verify_canonical_root_shape,
)
from plumbr.lattice.tower import (
    TowerHeight,
    faithfulness_bound,
    height_of_tower,
    in_im_u,
    in_ker_u,
    is_rational,
    psi0,
)
from plumbr.schema import (
    BlowdownSummary,
    CheckResult,
    GraphSummary,
    RationalReport,
    RootSummary,
    Settings,
    VerifyReport,
)

logger = logging.getLogger(__name__)

PHASES = ("form", "root", "shape", "blowdown", "tower")


@dataclass
class VerifyProgress:
    """Estado del progreso de la verificación."""

    total_phases: int = len(PHASES)
    completed_phases: int = 0
    current_phase: str = ""
    warnings: list[str] = field(default_factory=list)

    @property
    def is_complete(self) -> bool:
        return self.completed_phases >= self.total_phases

    @property
    def progress(self) -> float:
        return self.completed_phases / self.total_phases


def canonical_root(form: IntersectionForm, settings: Settings) -> GradedRoot:
    """Raíz de K₀ completa o, si excede el presupuesto, el germen del tronco."""
    k0 = canonical_class(form)
    try:
        return graded_root(form, k0, settings.budget, settings.max_level)
    except BudgetExceeded as e:
        logger.warning(f"Full root out of budget ({e}); building the trunk germ")
        return canonical_trunk_germ(form, settings.germ_budget)


@dataclass
class TowerVerdict:
    """ψ₀ frente a Ker U, Im U, racionalidad y altura."""

    in_ker_u: bool
    in_im_u: bool
    rational: bool | None
    height: TowerHeight | None

    @property
    def agreement(self) -> bool | None:
        """(ψ₀ ∈ Im U) ⇔ raíz en cadena; None si la racionalidad es indecidible."""
        return None if self.rational is None else self.in_im_u == self.rational


def tower_verdict(root: GradedRoot, settings: Settings) -> TowerVerdict:
    """Decide las preguntas de la torre sobre ψ₀.

    Raises:
        TruncationTooShallow: Si ``settings.depth`` está bajo la cota de fidelidad
    """
    depth = settings.depth if settings.depth is not None else faithfulness_bound(root)
    function = psi0(root, depth)
    image = in_im_u(root, function, depth)

    rational: bool | None
    try:
        rational = is_rational(root)
    except IncompleteRoot as e:
        logger.warning(f"Rationality undecided: {e}")
        rational = None

    height: TowerHeight | None
    try:
        height = height_of_tower(root, settings.height_cap, settings.depth)
    except IncompleteRoot as e:
        logger.warning(f"Height undecided: {e}")
        height = None

    return TowerVerdict(in_ker_u(function), image.member, rational, height)


def rational_report(form: IntersectionForm, settings: Settings) -> RationalReport:
    """Informe de ``plumbr rational``."""
    root = canonical_root(form, settings)
    verdict = tower_verdict(root, settings)
    return RationalReport(
        rational=verdict.rational,
        psi0_in_im_u=verdict.in_im_u,
        agreement=verdict.agreement,
        height=str(verdict.height) if verdict.height is not None else None,
        complete=root.complete,
    )


class Verifier:
    """Ejecuta el pipeline completo sobre un grafo.

    El verifier gestiona:
    - Construcción de la forma y de la raíz canónica (con germen de respaldo)
    - Comprobaciones del tronco, de blowdown y de la torre
    - Tracking de progreso por fases
    """

    def __init__(self, graph: PlumbingGraph, settings: Settings | None = None) -> None:
        """Inicializa el verifier.

        Args:
            graph: Grafo de plumbing validado
            settings: Parámetros de ejecución (por defecto, los del paquete)
        """
        self.graph = graph
        self.settings = settings or Settings.default()

        self.progress = VerifyProgress()
        self._progress_callbacks: list[Callable[[VerifyProgress], None]] = []

    def on_progress(self, callback: Callable[[VerifyProgress], None]) -> None:
        """Registra un callback para actualizaciones de progreso."""
        self._progress_callbacks.append(callback)

    def _notify_progress(self) -> None:
        for callback in self._progress_callbacks:
            try:
                callback(self.progress)
            except Exception as e:
                logger.warning(f"Progress callback error: {e}")

    def _enter(self, phase: str) -> None:
        self.progress.current_phase = phase
        self._notify_progress()

    def _leave(self) -> None:
        self.progress.completed_phases += 1
        self._notify_progress()

    def run(self) -> VerifyReport:
        """Ejecuta todas las fases y construye el informe.

        Returns:
            VerifyReport; ``passed`` es True si ninguna comprobación falla

        Raises:
            NotNegativeDefinite: Si la forma no es definida negativa
            BudgetExceeded: Si incluso el germen del tronco excede el presupuesto
        """
        settings = self.settings
        logger.info(f"Starting verification of a graph with {self.graph.n} vertices")

        # ==== PHASE 1: FORM ====
        self._enter("form")
        form = intersection_form(self.graph)
        summary = GraphSummary.from_form(form)
        self._leave()

        # ==== PHASE 2: ROOT ====
        self._enter("root")
        root = canonical_root(form, settings)
        if not root.complete:
            self.progress.warnings.append("trunk germ used instead of the full root")
        self._leave()

        # ==== PHASE 3: CANONICAL TRUNK ====
        self._enter("shape")
        checks = verify_canonical_root_shape(
            form, root, settings.budget, settings.chain_margin
        )
        self._leave()

        # ==== PHASE 4: BLOWDOWN ====
        self._enter("blowdown")
        trace = blowdown_sequence(form)
        blowdown_checks, s_size = self._blowdown_checks(form, trace)
        checks.extend(blowdown_checks)
        self._leave()

        # ==== PHASE 5: TOWER ====
        self._enter("tower")
        verdict = tower_verdict(root, settings)
        checks.extend(self._tower_checks(verdict))
        self._leave()

        report = VerifyReport(
            graph=summary,
            root=RootSummary.from_root(root),
            blowdown=BlowdownSummary(
                rounds=len(trace.rounds), d_size=len(trace.classes), s_size=s_size
            ),
            rational=verdict.rational,
            height=str(verdict.height) if verdict.height is not None else None,
            checks=checks,
        )
        failed = [c.name for c in checks if c.is_failure]
        if failed:
            logger.info(f"Verification finished with failures: {failed}")
        else:
            logger.info("Verification finished: all checks passed")
        return report

    def _blowdown_checks(
        self, form: IntersectionForm, trace: BlowdownTrace
    ) -> tuple[list[CheckResult], int | None]:
        checks: list[CheckResult] = []
        try:
            d_classes(trace)
            checks.append(CheckResult.ok("d_recursion"))
        except RecursionMismatch as e:
            checks.append(CheckResult.failed("d_recursion", str(e)))

        try:
            sset = verify_s_equals_c0(
                form, trace, self.settings.budget, self.settings.subset_cap
            )
            support = phi0_support(trace, self.settings.subset_cap)
        except SubsetCapExceeded as e:
            logger.warning(f"S not materialized: {e}")
            self.progress.warnings.append(str(e))
            for name in ("s_equals_c0", "s_paths"):
                checks.append(CheckResult.skipped(name, str(e)))
            return checks, None

        checks.extend(sset.checks)
        checks.extend(support.checks)
        return checks, sset.s_size

    def _tower_checks(self, verdict: TowerVerdict) -> list[CheckResult]:
        checks = [
            CheckResult.ok("psi0_in_ker_u")
            if verdict.in_ker_u
            else CheckResult.failed("psi0_in_ker_u", "U·ψ₀ ≠ 0")
        ]

        if verdict.agreement is None:
            checks.append(
                CheckResult.skipped(
                    "im_u_matches_rationality", "rationality undecided on the germ"
                )
            )
        elif verdict.agreement:
            checks.append(CheckResult.ok("im_u_matches_rationality"))
        else:
            checks.append(
                CheckResult.failed(
                    "im_u_matches_rationality",
                    f"psi0 in Im U: {verdict.in_im_u}, single chain: "
                    f"{verdict.rational}",
                )
            )

        height = verdict.height
        if height is None:
            checks.append(CheckResult.skipped("height", "height undecided on the germ"))
            return checks
        if verdict.rational is True:
            expected = height.is_infinite
        elif verdict.rational is False:
            expected = height.value == 0
        else:
            expected = height.value == 0 and not verdict.in_im_u
        checks.append(
            CheckResult.ok("height")
            if expected
            else CheckResult.failed(
                "height", f"ht = {height} with single chain: {verdict.rational}"
            )
        )
        return checks
