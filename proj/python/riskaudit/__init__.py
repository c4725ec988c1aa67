"""Per-group risk score evaluation.

Thin wrapper over the C++ extension: calibration error metrics (including
the debiased adaptive-bin-count estimator), AUROC / AUPRG, expected
under-representation, deterministic bootstrap CIs, synthetic benchmark
generators, and the end-to-end audit pipeline.
"""

import json as _json

from ._riskaudit import (  # noqa: F401
    __version__,
    auprg,
    auroc,
    bootstrap_metric,
    debiased_rmsce,
    drmsce,
    ece,
    eur,
    generate_calibration_stream,
    generate_two_group_example,
    ground_truth_errors,
    max_monotonic_bins,
    prg_curve,
    reliability_curve,
    representation_curve,
    rmsce,
    roc_curve,
    target_representation,
)
from ._riskaudit import run_audit as _run_audit_json


def run_audit(config, output_dir=""):
    """Run the full audit.

    `config` is a dict of audit config keys (see the README) or a JSON
    string. Returns the hierarchical report as a dict; when `output_dir`
    is set the report/table/curve files are written there as well.
    """
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _json.loads(_run_audit_json(config, output_dir))
