import logging
import sys


def configure_logging(level: str = "INFO", fmt: str | None = None) -> None:
    """Route every log record to stderr; stdout carries the JSON summaries"""
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        numeric = logging.INFO
    logging.basicConfig(
        level=numeric,
        format=fmt or "%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
