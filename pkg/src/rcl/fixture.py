"""Bundled Roman-constitution model and its frozen expected CLI outputs."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .loader import LoadedModel, load_source
from .model import FactStore
from .parser import Ast

FIXTURE_FILE = "kb_roman.rcl"
EXPECTED_FILE = "kb_roman_expected.txt"


def fixture_path() -> Path:
    """Path of the bundled kb_roman.rcl."""
    return Path(str(resources.files("rcl").joinpath("fixtures", FIXTURE_FILE)))


def fixture_source() -> str:
    return resources.files("rcl").joinpath("fixtures", FIXTURE_FILE).read_text("utf-8")


def load_fixture_model() -> LoadedModel:
    model = load_source(fixture_source())
    if model.store is None:
        details = "; ".join(d.message for d in model.errors)
        raise RuntimeError(f"bundled model failed validation: {details}")
    return model


def load_fixture() -> tuple[FactStore, Ast]:
    """The Roman-constitution store with its closure computed, plus the Ast."""
    model = load_fixture_model()
    return model.closure(), model.ast


def expected_table() -> list[tuple[str, str]]:
    """Frozen (cli-arguments, expected-stdout) pairs for the bundled model.

    The table file holds blocks introduced by `== <arguments>` lines; the
    block body is the exact expected standard output.
    """
    text = resources.files("rcl").joinpath("fixtures", EXPECTED_FILE).read_text("utf-8")
    entries: list[tuple[str, str]] = []
    current: str | None = None
    body: list[str] = []
    for line in text.splitlines():
        if line.startswith("== "):
            if current is not None:
                entries.append((current, "".join(body)))
            current = line[3:].strip()
            body = []
        elif current is not None:
            body.append(line + "\n")
    if current is not None:
        entries.append((current, "".join(body)))
    return entries
