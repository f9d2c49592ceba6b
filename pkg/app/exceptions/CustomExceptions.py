from fastapi import status


class TateError(Exception):
    """Base error for the TATE pipeline"""

    exit_code: int = 1
    status_code: int = status.HTTP_500_INTERNAL_SERVER_ERROR

    def __init__(self, detail: str = "TATE pipeline error"):
        super().__init__(detail)
        self.detail = detail


class DimensionError(TateError):
    exit_code = 5
    status_code = status.HTTP_422_UNPROCESSABLE_ENTITY

    def __init__(self, op: str, left: tuple[int, ...], right: tuple[int, ...]):
        super().__init__(f"{op}: incompatible shapes {left} and {right}")
        self.left = left
        self.right = right


class DomainError(TateError):
    exit_code = 5
    status_code = status.HTTP_422_UNPROCESSABLE_ENTITY


class ContractError(TateError):
    status_code = status.HTTP_400_BAD_REQUEST


class ConfigError(TateError):
    exit_code = 2
    status_code = status.HTTP_400_BAD_REQUEST


class SchemaError(TateError):
    exit_code = 3
    status_code = status.HTTP_422_UNPROCESSABLE_ENTITY


class DatasetParseError(SchemaError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number


class EmptyDatasetError(TateError):
    exit_code = 3
    status_code = status.HTTP_400_BAD_REQUEST

    def __init__(self, detail: str = "Dataset is empty"):
        super().__init__(detail)


class CheckpointError(TateError):
    exit_code = 4
    status_code = status.HTTP_503_SERVICE_UNAVAILABLE


class MissingTeacherError(CheckpointError):
    exit_code = 2

    def __init__(self, path: str | None):
        where = f" at {path}" if path else ""
        super().__init__(
            f"No teacher checkpoint{where}. Run `tate pretrain --data ... --out <teacher.json>` "
            "first, or pass --pretrain to train one inline."
        )


class NonFiniteGradientError(TateError):
    exit_code = 5

    def __init__(self, parameter: str):
        super().__init__(f"Non-finite gradient in parameter '{parameter}', training aborted")
        self.parameter = parameter
