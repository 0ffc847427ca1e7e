from .api import ModelRegistry, ServeConfig, create_app, serve
from .store import FeedbackRecord, IngestSummary, SnapshotStore

__all__ = ["FeedbackRecord", "IngestSummary", "ModelRegistry", "ServeConfig",
           "SnapshotStore", "create_app", "serve"]
