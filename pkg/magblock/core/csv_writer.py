# magblock/core/csv_writer.py

from __future__ import annotations

import logging
import warnings
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from magblock.core.config import PREAMBLE_META_PREFIX, RunConfig
from magblock.core.curves import CorrelationCurve
from magblock.core.errors import ConfigError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.15e"

PLOT_STUB = '''\
# Plots {csv_name}; needs numpy and matplotlib.
import numpy as np
import matplotlib.pyplot as plt

with open("{csv_name}") as f:
    preamble = sum(1 for line in f if line.startswith("#"))
data = np.genfromtxt("{csv_name}", delimiter=",", skip_header=preamble, names=True)
columns = data.dtype.names
for name in columns[1:]:
    plt.plot(data[columns[0]], data[name], label=name)
plt.xlabel(columns[0])
plt.legend()
plt.show()
'''


def preamble_lines(config: RunConfig, metadata: Optional[Mapping[str, object]] = None) -> List[str]:
    """'# key = value' lines for the resolved config, then '# meta.key = value' lines."""
    lines = [f"# {key} = {value}" for key, value in config.as_items()]
    for key, value in (metadata or {}).items():
        lines.append(f"# {PREAMBLE_META_PREFIX}{key} = {value}")
    return lines


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[object]], config: RunConfig,
              metadata: Optional[Mapping[str, object]] = None, plot_stub: bool = True) -> Path:
    """
    Writes one data file: preamble, header row, then one row per entry of
    `rows`. Cells are formatted with %.15e; NaN gaps are written as 'nan'.
    """
    path = Path(path)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"Row has {len(row)} cells, header has {len(header)}.")
    data = np.asarray(rows, dtype=float).reshape(len(rows), len(header))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write("\n".join(preamble_lines(config, metadata)) + "\n")
            np.savetxt(f, data, fmt=FLOAT_FORMAT, delimiter=",", header=",".join(header), comments="")
        if plot_stub:
            stub = path.with_name(path.stem + ".plot.py")
            stub.write_text(PLOT_STUB.format(csv_name=path.name), encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot write output file '{path}': {e}") from e
    logger.debug("Wrote %d rows to %s", len(rows), path)
    return path


def write_curves(path: Path, x_name: str, curves: Mapping[str, CorrelationCurve], config: RunConfig,
                 metadata: Optional[Mapping[str, object]] = None) -> Path:
    """Writes curves sharing one x grid side by side, one g2 column per curve."""
    if not curves:
        raise ValueError("Nothing to write.")
    named = list(curves.items())
    xs = named[0][1].xs
    for name, curve in named[1:]:
        if curve.xs != xs:
            raise ValueError(f"Curve '{name}' does not share the x grid of '{named[0][0]}'.")
    header = [x_name] + [name for name, _ in named]
    rows = [[x] + [curve.points[k].g2 for _, curve in named] for k, x in enumerate(xs)]
    meta = dict(metadata or {})
    for name, curve in named:
        meta.update({f"{name}.{k}": v for k, v in curve.metadata.items()})
    return write_csv(path, header, rows, config, meta)


def read_csv(path: Path) -> Tuple[Dict[str, str], List[str], np.ndarray]:
    """Preamble dict (meta keys included), header and data of a file written by write_csv."""
    preamble: Dict[str, str] = {}
    header: List[str] = []
    skip = 1
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                header = line.strip().split(",")
                break
            key, _, value = line[1:].partition("=")
            preamble[key.strip()] = value.strip()
            skip += 1
    with warnings.catch_warnings():
        # header-only files
        warnings.simplefilter("ignore", UserWarning)
        data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2, encoding="utf-8")
    return preamble, header, data.reshape(-1, len(header))
