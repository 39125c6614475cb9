from __future__ import annotations

import pytest

from askrec.catalog import AttributeSchema, Catalog, Item
from askrec.embedding import EmbeddingStore, HashingEmbedder
from askrec.fixtures import load_default_catalog

CAR_SCHEMA = (
    AttributeSchema("color", "categorical", relaxation_rank=0),
    AttributeSchema("fuel", "categorical", relaxation_rank=3),
    AttributeSchema("body", "categorical", relaxation_rank=5),
    AttributeSchema("price", "continuous", unit="USD", relaxation_rank=9),
)


def make_item(i, color=None, fuel=None, body=None, price=None, description="", pros=(), cons=()):
    return Item(
        id=f"i{i}",
        attributes={"color": color, "fuel": fuel, "body": body, "price": price},
        description=description,
        pros=tuple(pros),
        cons=tuple(cons),
    )


def make_catalog(items, schema=CAR_SCHEMA):
    return Catalog(schema, items)


@pytest.fixture(scope="session")
def cars():
    """The bundled 1000-item synthetic car catalog."""
    return load_default_catalog()


@pytest.fixture(scope="session")
def car_store(cars):
    """Shared description/phrase embeddings for the bundled catalog."""
    return EmbeddingStore(cars, HashingEmbedder())
