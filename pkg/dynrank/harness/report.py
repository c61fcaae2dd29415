import json
import platform
import sys
from typing import Iterable, List, Optional, TextIO, Union

import joblib
import numpy as np
import pandas as pd
import psutil
import scipy

from dynrank import __version__
from dynrank.core.graph.io import PathType
from dynrank.harness.metrics import geometric_mean
from dynrank.harness.plan import EXTRA_COLUMNS, RECORD_COLUMNS, ExperimentPlan, ExperimentRecord
from dynrank.utilities.random import RNG_ALGORITHM

COLUMNS = RECORD_COLUMNS + EXTRA_COLUMNS
SUMMARY_GRAPH = 'geomean'
SUMMARY_KEYS = ['approach', 'mode', 'fraction', 'insert_ratio', 'threads']
GEOMETRIC_COLUMNS = ['elapsed_s', 'preprocess_s', 'rank_updates', 'l1_error']
ARITHMETIC_COLUMNS = ['affected_fraction', 'iterations']

Destination = Union[PathType, TextIO]


def to_frame(records: Iterable[ExperimentRecord]) -> pd.DataFrame:
    return pd.DataFrame([record.to_dict() for record in records], columns=list(COLUMNS))


def _positive_geomean(values: pd.Series) -> float:
    positive = values[values > 0]
    return geometric_mean(positive) if len(positive) else np.nan


def summarize(records: Iterable[ExperimentRecord]) -> pd.DataFrame:
    """ Aggregates successful records across graphs.

    Repetitions of a graph are averaged first. Then, per approach, mode, fraction,
    insert ratio and thread count, timings, work and errors are combined by the
    geometric mean over the graphs (positive values only), while the affected
    fraction and the iteration count use the arithmetic mean.

    Returns:
        frame with the record columns, one ``graph = geomean`` row per group
    """
    frame = to_frame(record for record in records if not record.failed)
    if frame.empty:
        return pd.DataFrame(columns=list(COLUMNS))
    metrics = GEOMETRIC_COLUMNS + ARITHMETIC_COLUMNS + ['affected_final', 'speedup']
    frame[metrics] = frame[metrics].astype(float)
    per_graph = frame.groupby(['graph', 'tau_f'] + SUMMARY_KEYS, dropna=False).agg(
        {**{column: 'mean' for column in metrics}, 'converged': 'all'}).reset_index()

    rows = []
    for group, part in per_graph.groupby(SUMMARY_KEYS + ['tau_f'], dropna=False, sort=True):
        row = dict(zip(SUMMARY_KEYS + ['tau_f'], group))
        row['graph'] = SUMMARY_GRAPH
        for column in GEOMETRIC_COLUMNS:
            row[column] = _positive_geomean(part[column])
        for column in ARITHMETIC_COLUMNS + ['affected_final']:
            row[column] = part[column].mean()
        row['speedup'] = _positive_geomean(part['speedup'].dropna()) if part['speedup'].notna().any() else np.nan
        row['converged'] = bool(part['converged'].all())
        rows.append(row)
    return pd.DataFrame(rows, columns=list(COLUMNS))


def write_csv(records: Iterable[ExperimentRecord], destination: Destination, summary: bool = False):
    """ Writes the records as CSV with the contract columns first.
    With ``summary`` the geometric-mean rows are appended. """
    records = list(records)
    frame = to_frame(records)
    if summary:
        frame = pd.concat([frame, summarize(records)], ignore_index=True)
    frame.to_csv(destination, index=False, lineterminator='\n')


def host_info() -> dict:
    memory = psutil.virtual_memory()
    return dict(platform=platform.platform(),
                machine=platform.machine(),
                processor=platform.processor(),
                python=sys.version.split()[0],
                logical_cpus=psutil.cpu_count(logical=True),
                physical_cpus=psutil.cpu_count(logical=False),
                memory_bytes=memory.total)


def metadata(plan: Optional[ExperimentPlan] = None) -> dict:
    info = dict(rng_algorithm=RNG_ALGORITHM,
                host=host_info(),
                versions=dict(dynrank=__version__, numpy=np.__version__, scipy=scipy.__version__,
                              pandas=pd.__version__, joblib=joblib.__version__))
    if plan is not None:
        info.update(config=plan.config.describe(),
                    repetitions=plan.repetitions,
                    seeds=plan.repetition_seeds,
                    insert_ratio=plan.insert_ratio,
                    strict=plan.strict)
    return info


def _clean(value):
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, np.generic):
        return value.item()
    return value


def records_to_json(records: Iterable[ExperimentRecord], plan: Optional[ExperimentPlan] = None,
                    summary: bool = False) -> dict:
    records = list(records)
    document = dict(metadata=metadata(plan),
                    records=[{key: _clean(value) for key, value in record.to_dict().items()} for record in records])
    if summary:
        summary_rows = summarize(records).astype(object).to_dict(orient='records')
        document['summary'] = [{key: _clean(value) for key, value in row.items()} for row in summary_rows]
    return document


def write_json(records: Iterable[ExperimentRecord], destination: Destination,
               plan: Optional[ExperimentPlan] = None, summary: bool = False):
    document = records_to_json(records, plan, summary)
    if hasattr(destination, 'write'):
        json.dump(document, destination, indent=2)
        destination.write('\n')
    else:
        with open(destination, 'wt', encoding='utf-8') as file:
            json.dump(document, file, indent=2)
