"""splmetrics: product-line potential metrics for legacy software.

Decompose each legacy product into components, score pairwise component
similarity under an exact or gradual relationship model, partition the
result into intersection regions, and derive reuse metrics (size of
commonality, product-related reusability, individualization ratio) at a
threshold or across a threshold sweep.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    ExtractionError,
    ParseError,
    SplMetricsError,
    TokenizeError,
    UnknownComponentError,
    ValidationError,
)
from .model import (
    Component,
    ComponentRef,
    Port,
    Product,
    ProductSet,
    SimilarityMatrix,
    Threshold,
    shared_products,
)
from .relationship import (
    ExactRelationship,
    GradualRelationship,
    build_matrix,
    exact_similarity,
    gradual_similarity,
    make_model,
)
from .partition import (
    Cluster,
    RegionPartition,
    cluster_components,
    region_partition,
)
from .metrics import (
    DEFAULT_SCHEDULE,
    MetricsReport,
    SweepResult,
    analyze,
    individualization_ratio,
    product_reusability,
    relative_growth,
    size_of_commonality,
    sweep,
)
from .ingest import (
    extract_c_product,
    load_product_model,
    parse_product_model,
    serialize_product_model,
    tokenize,
    write_product_model,
)

__all__ = [
    "__version__",
    "SplMetricsError", "ValidationError", "ConfigurationError",
    "UnknownComponentError", "ParseError", "TokenizeError", "ExtractionError",
    "Port", "Component", "Product", "ProductSet", "ComponentRef",
    "SimilarityMatrix", "Threshold", "shared_products",
    "ExactRelationship", "GradualRelationship", "make_model",
    "exact_similarity", "gradual_similarity", "build_matrix",
    "Cluster", "RegionPartition", "cluster_components", "region_partition",
    "DEFAULT_SCHEDULE", "MetricsReport", "SweepResult", "analyze", "sweep",
    "individualization_ratio", "product_reusability", "size_of_commonality",
    "relative_growth",
    "tokenize", "parse_product_model", "load_product_model",
    "serialize_product_model", "write_product_model", "extract_c_product",
]
