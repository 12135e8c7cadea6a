from .container import (AvatarAsset, load_asset, load_head_model, save_asset,
                        save_head_model)
from .fixture import generate_synthetic_fixture
from .metrics import DEFAULT_WEIGHTS, RegularizerReport, regularizer_metrics
from .validate import Violation, validate_asset

__all__ = [
    "AvatarAsset", "DEFAULT_WEIGHTS", "RegularizerReport", "Violation",
    "generate_synthetic_fixture", "load_asset", "load_head_model",
    "regularizer_metrics", "save_asset", "save_head_model", "validate_asset",
]
