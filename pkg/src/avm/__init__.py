"""Rental-market valuation engine.

Subsystems: listing ingestion (``ingest``, ``listings``), OSM building
extraction (``osmx``), self-organizing map (``som``) and the spatial price
index built on it (``spatial_index``), five valuation regressors
(``regress``), benchmark evaluation (``evaluation``), market analytics
(``analytics``), and the snapshot store plus HTTP API (``service``).
"""

from . import analytics, evaluation, ingest, listings, osmx, regress, som, spatial_index
from .listings import (
    CleanListing,
    FEATURE_NAMES,
    FeatureVector,
    RawListing,
    RejectReport,
    encode_features,
    encode_many,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "CleanListing", "FEATURE_NAMES", "FeatureVector", "RawListing",
    "RejectReport", "analytics", "encode_features", "encode_many",
    "evaluation", "ingest", "listings", "osmx", "regress", "som",
    "spatial_index", "validate",
]
