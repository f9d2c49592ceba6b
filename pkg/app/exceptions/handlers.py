import json
import logging
import sys

from fastapi import Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from app.exceptions.CustomExceptions import TateError

logger = logging.getLogger(__name__)


async def tate_exception_handler(request: Request, exc: TateError) -> JSONResponse:
    """Handle domain errors raised by the pipeline"""
    logger.error(f"{type(exc).__name__}: {exc.detail}")
    return JSONResponse(
        status_code=exc.status_code,
        content={"detail": exc.detail, "error": type(exc).__name__},
    )


async def validation_exception_handler(
    request: Request, exc: RequestValidationError
) -> JSONResponse:
    """Handle Pydantic validation errors"""
    logger.error(f"Validation error: {exc.errors()}")
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={"detail": jsonable_errors(exc.errors())},
    )


async def general_exception_handler(request: Request, exc: Exception) -> JSONResponse:
    """Handle all other exceptions"""
    logger.exception(f"Unexpected error: {str(exc)}")
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content={
            "detail": "An unexpected error occurred",
            "error": str(exc),
        },
    )


def jsonable_errors(errors) -> list[dict]:
    return [{"loc": list(e.get("loc", ())), "msg": e.get("msg", "")} for e in errors]


def cli_exit_code(exc: BaseException) -> int:
    """Map an exception raised by a command to the process exit status"""
    if isinstance(exc, TateError):
        return exc.exit_code
    if isinstance(exc, ValidationError):
        return 2
    if isinstance(exc, OSError):
        return 3
    return 1


def report_cli_error(command: str, exc: BaseException) -> int:
    """Print the error as a JSON summary line and return the exit status"""
    if isinstance(exc, TateError):
        detail = exc.detail
    elif isinstance(exc, ValidationError):
        detail = "; ".join(
            f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in exc.errors()
        )
    else:
        detail = str(exc)
    code = cli_exit_code(exc)
    if code == 1:
        logger.exception(f"Unexpected error in {command}: {detail}")
    else:
        logger.error(f"{command} failed: {detail}")
    payload = {
        "command": command,
        "status": "error",
        "error": type(exc).__name__,
        "detail": detail,
    }
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    return code
