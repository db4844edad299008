from majorcert.harness.config import RunConfig, config_from_dict, load_config
from majorcert.harness.metrics import MetricsReport, compute_metrics, metrics_for
from majorcert.harness.records import SampleRecord, load_records, write_records
from majorcert.harness.synthetic import generate_synthetic, stub_classify, stub_votes

__all__ = [
    "MetricsReport",
    "RunConfig",
    "SampleRecord",
    "compute_metrics",
    "config_from_dict",
    "generate_synthetic",
    "load_config",
    "load_records",
    "metrics_for",
    "stub_classify",
    "stub_votes",
    "write_records",
]
