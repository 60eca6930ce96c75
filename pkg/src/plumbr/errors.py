"""Excepciones de plumbr."""

from fractions import Fraction


class PlumbrError(Exception):
    """Error base de plumbr."""


class GraphValidationError(PlumbrError):
    """El grafo de plumbing no es un árbol válido."""


class GraphParseError(GraphValidationError):
    """Error de sintaxis en el formato de texto, con posición 1-based."""

    def __init__(self, message: str, line: int, column: int = 1) -> None:
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class NotNegativeDefinite(PlumbrError):
    """La forma de intersección no es definida negativa."""

    def __init__(self, index: int, pivot: Fraction) -> None:
        self.index = index
        self.pivot = pivot
        super().__init__(
            f"intersection form is not negative definite: "
            f"LDL pivot {index} equals {pivot}"
        )


class SingularMatrix(PlumbrError):
    """Matriz singular donde se requiere det != 0."""


class DimensionMismatch(PlumbrError, ValueError):
    """Vector con longitud distinta al número de vértices."""


class BudgetExceeded(PlumbrError):
    """La instancia excede el presupuesto de enumeración."""

    def __init__(self, budget: int, what: str) -> None:
        self.budget = budget
        self.what = what
        super().__init__(f"budget of {budget} exceeded while {what}")


class SubsetCapExceeded(BudgetExceeded):
    """Demasiadas clases para materializar todas las sumas de subconjuntos."""


class InvariantViolated(PlumbrError):
    """Un invariante interno no se cumple (indica un bug aguas arriba)."""


class RecursionMismatch(InvariantViolated):
    """La recursión de proximidad no reproduce las clases registradas."""


class EdgeConditionViolated(PlumbrError):
    """Una función sobre la raíz no cumple U·ψ(v) = ψ(w) en alguna arista."""


class TruncationTooShallow(PlumbrError):
    """La profundidad de truncación está por debajo de la cota de fidelidad."""

    def __init__(self, depth: int, bound: int) -> None:
        self.depth = depth
        self.bound = bound
        super().__init__(f"truncation depth {depth} is below the bound {bound}")


class IncompleteRoot(PlumbrError):
    """La pregunta no se puede decidir sobre una raíz parcial."""


class WindowMisaligned(PlumbrError):
    """Las ventanas de los modelos no son compatibles."""


class NotConstantOnComponent(PlumbrError):
    """Una función del modelo L no factoriza a través de θ."""

    def __init__(self, first: tuple[int, ...], second: tuple[int, ...]) -> None:
        self.first = first
        self.second = second
        super().__init__(
            f"values differ on one root vertex: {list(first)} vs {list(second)}"
        )
