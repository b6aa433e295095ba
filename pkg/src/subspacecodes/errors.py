"""Exception types shared across the package."""

from __future__ import annotations


class SubspaceCodesError(ValueError):
    """Base class; ``module`` names the owning module for CLI messages."""

    module = "subspacecodes"

    def __str__(self) -> str:
        return f"{self.module}: {super().__str__()}"


class FieldError(SubspaceCodesError):
    module = "gf_linalg"


class ShapeError(SubspaceCodesError):
    module = "gf_linalg"


class AmbientMismatch(SubspaceCodesError):
    module = "grassmann"


class CapExceeded(SubspaceCodesError):
    module = "grassmann"


class CodeError(SubspaceCodesError):
    module = "codes"


class CodeFormatError(CodeError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateCodewordError(CodeFormatError):
    pass


class BoundDomainError(SubspaceCodesError):
    module = "bounds"


class ConstructionError(SubspaceCodesError):
    module = "constructions"


class ModelError(SubspaceCodesError):
    module = "ilp_models"


class PrescriptionConflict(ModelError):
    pass


class SolutionError(ModelError):
    pass


class GraphError(SubspaceCodesError):
    module = "clique_engine"
