"""Model fitting of g2 curves and the product-curve comparison."""

from superbunch.fitting.models import (
    FitResult,
    fit_g2,
    g2_model,
    model_factors,
)
from superbunch.fitting.product import (
    ProductCheck,
    product_curve_check,
)

__all__ = [
    "FitResult",
    "fit_g2",
    "g2_model",
    "model_factors",
    "ProductCheck",
    "product_curve_check",
]
