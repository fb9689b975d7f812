"""CSV and plot-script writers."""

from pathlib import Path
from typing import Iterable, Optional, Union

import pandas as pd
import structlog

from siet.models.schemas import SweepTable

logger = structlog.get_logger()

# Log-scaled axes per figure number.
LOG_AXES = {2: (), 3: ("x",), 4: ("x", "y")}
Y_LABELS = {
    2: "Average EEH probability",
    3: "Maximal average EEH probability",
    4: "Required standard BS density (BS/m^2)",
}


def ensure_dir(path: Union[str, Path]) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """UTF-8, comma separated, header row, no index, shortest round-trip floats."""
    path = Path(path)
    ensure_dir(path.parent)
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    logger.info("output.csv.written", path=str(path), rows=len(frame))
    return path


def sweep_to_frame(table: SweepTable) -> pd.DataFrame:
    """Axis column first, then one column per series in table order."""
    data = {table.axis_name: table.axis_values}
    data.update(table.series)
    return pd.DataFrame(data)


def plot_script(
    table: SweepTable,
    csv_name: str,
    title: str,
    ylabel: str = "",
    log_axes: Iterable[str] = ()
) -> str:
    """Gnuplot script plotting every series of a CSV written by sweep_to_frame."""
    lines = [
        f"# {title}",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set key outside right",
        "set grid",
        f"set title '{title}'",
        f"set xlabel '{table.axis_name}'",
    ]
    if ylabel:
        lines.append(f"set ylabel '{ylabel}'")
    for axis in log_axes:
        lines.append(f"set logscale {axis}")

    columns = [
        f"'{csv_name}' using 1:{i} with lines lw 2"
        for i in range(2, len(table.series) + 2)
    ]
    lines.append("plot " + ", \\\n     ".join(columns))
    return "\n".join(lines) + "\n"


def write_figure(table: SweepTable, number: int, out_dir: Union[str, Path], title: Optional[str] = None) -> Path:
    """Write fig{number}.csv and fig{number}.plot; the script refers to the CSV by relative path."""
    out_dir = ensure_dir(out_dir)
    csv_name = f"fig{number}.csv"
    write_csv(sweep_to_frame(table), out_dir / csv_name)

    script_path = out_dir / f"fig{number}.plot"
    script_path.write_text(
        plot_script(
            table,
            csv_name,
            title or f"Figure {number}",
            ylabel=Y_LABELS.get(number, ""),
            log_axes=LOG_AXES.get(number, ()),
        ),
        encoding="utf-8",
    )
    logger.info("output.plot.written", path=str(script_path), series=len(table.series))
    return script_path
