"""
Rendering of report rows as CSV, JSON or a plain-text table.

Column order is fixed per subcommand (see COLUMNS); the README documents it.
"""

import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.arthur import RateValue
from src.errors import DomainError

FORMATS = ("csv", "json", "table")

COLUMNS: Dict[str, List[str]] = {
    "rates": ["shape", "pairs", "partition", "nu_sigma", "rate", "principal_levi", "worst_rate"],
    "rate": ["family", "rank", "nu", "rate", "oracle", "decay_threshold"],
    "orbits": ["family", "partition", "weighted_dynkin", "nu_sigma", "rate", "principal_levi"],
    "packets": ["form", "levi", "size", "representatives", "degrees", "total_dim", "total_check", "archimedean_rate"],
    "spherical": ["nu", "p", "r", "radius", "partial_sum", "threshold", "converges"],
    "walk": [
        "graph_id", "seed", "n", "d", "eps", "t_mix", "log_d_n", "cutoff_ratio", "lower_bound",
        "ad_eps", "almost_diameter", "diameter", "collision_horizon", "first_collision",
        "starts_exact", "distances_exact",
    ],
    "spectrum": ["graph_id", "n", "d", "mode", "trivial_count", "top_nontrivial", "top_rate", "r", "density_count", "count_exact"],
    "ledger": ["shape", "rate", "bound_exponent", "dim_G", "target_exponent", "verdict", "tight"],
    "gross": ["n", "a_list", "signs", "sign_product", "gross_form_exists"],
    "counts": ["kind", "key", "value"],
}


def plain(value: Any) -> Any:
    """Convert exact and numpy scalars into JSON-friendly Python values."""
    if isinstance(value, (Fraction, RateValue)):
        return str(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, dict):
        return {k: plain(v) for k, v in value.items()}
    return value


def render(
    rows: Sequence[Dict[str, Any]],
    fmt: str,
    columns: Optional[Sequence[str]] = None,
    config: Optional[Dict[str, Any]] = None,
) -> str:
    """
    Render rows in one of the supported formats.

    Args:
        rows: Row dicts
        fmt: "csv", "json" or "table"
        columns: Column order; defaults to the keys of the first row
        config: Run configuration, embedded in JSON output

    Returns:
        Rendered text ending in a newline
    """
    if fmt not in FORMATS:
        raise DomainError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    rows = [plain(dict(row)) for row in rows]
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    ordered = [{c: row.get(c) for c in columns} for row in rows]

    if fmt == "json":
        payload = {
            "config": {k: plain(config[k]) for k in sorted(config or {})},
            "rows": ordered,
        }
        return json.dumps(payload, indent=2) + "\n"

    df = pd.DataFrame(ordered, columns=list(columns))
    if fmt == "csv":
        return df.to_csv(index=False, lineterminator="\n")
    return df.to_string(index=False) + "\n"


def write_output(text: str, out: Optional[str] = None) -> None:
    """Write to a file when out is given, else to stdout."""
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
