"""Access to the bundled synthetic car catalog and persona suite."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

from .catalog import Catalog, load_catalog_with_sidecar


def data_path(*parts: str) -> Path:
    return Path(str(files("askrec").joinpath("data", *parts)))


def default_catalog_csv() -> Path:
    return data_path("cars.csv")


def default_catalog_schema() -> Path:
    return data_path("cars.schema.json")


def default_personas_dir() -> Path:
    return data_path("personas")


def load_default_catalog() -> Catalog:
    return load_catalog_with_sidecar(default_catalog_csv(), default_catalog_schema())
